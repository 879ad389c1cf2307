//! Normalized standing-shock endstates and the connecting profile.
//!
//! The mass flux and upstream state are scaled to `m = rho_- = u_- = 1`
//! with zero transverse velocity, leaving the downstream velocity `u_+` as
//! the single shock parameter.

use nalgebra::{Matrix2, Vector2, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas_model::{self, ConservedState, GasParams, PrimitiveState};
use crate::ode::{self, Control, OdeOptions};

const MODULE: &str = "profile";

/// Endstates of the normalized standing shock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShockData {
    pub u_plus: f64,
    pub u_star: f64,
    pub alpha: f64,
    pub e_minus: f64,
    pub e_plus: f64,
    pub rho_plus: f64,
    pub state_minus: ConservedState,
    pub state_plus: ConservedState,
}

impl ShockData {
    /// `U_+ - U_-`.
    pub fn jump(&self) -> Vector4<f64> {
        self.state_plus.to_vector() - self.state_minus.to_vector()
    }

    pub fn primitive_minus(&self) -> PrimitiveState {
        PrimitiveState { rho: 1.0, u: 1.0, v: 0.0, e: self.e_minus }
    }

    pub fn primitive_plus(&self) -> PrimitiveState {
        PrimitiveState { rho: self.rho_plus, u: self.u_plus, v: 0.0, e: self.e_plus }
    }
}

pub fn u_star(gas: &GasParams) -> f64 {
    gas.big_gamma / (gas.big_gamma + 2.0)
}

/// Normalized endstates for downstream velocity `u_plus` in `(u*, 1]`.
pub fn endstates(gas: &GasParams, u_plus: f64) -> Result<ShockData> {
    let g = gas.big_gamma;
    let us = u_star(gas);
    if !(u_plus > us && u_plus <= 1.0) {
        return Err(Error::domain(
            MODULE,
            format!("u_plus = {u_plus} outside the physical range ({us}, 1]"),
        ));
    }
    let alpha = (g + 2.0 - g * u_plus) / (u_plus - us);
    // algebraically reduced forms, regular at u_plus = 1
    let denom = 2.0 * g * (g + 1.0);
    let e_minus = (g + 2.0) * (u_plus - us) / denom;
    let e_plus = u_plus * (g + 2.0 - g * u_plus) / denom;
    let rho_plus = 1.0 / u_plus;
    let state_minus = gas_model::primitive_to_conserved(&PrimitiveState {
        rho: 1.0,
        u: 1.0,
        v: 0.0,
        e: e_minus,
    });
    let state_plus = gas_model::primitive_to_conserved(&PrimitiveState {
        rho: rho_plus,
        u: u_plus,
        v: 0.0,
        e: e_plus,
    });
    let shock = ShockData {
        u_plus,
        u_star: us,
        alpha,
        e_minus,
        e_plus,
        rho_plus,
        state_minus,
        state_plus,
    };
    let resid = rh_residual(gas, &shock)?;
    if resid > 1e-10 {
        return Err(Error::Consistency {
            module: MODULE,
            message: format!("Rankine-Hugoniot residual {resid:.3e} at u_plus = {u_plus}"),
        });
    }
    Ok(shock)
}

/// Endstate energies from the unreduced parametrization through `alpha`
/// (undefined at `u_plus = 1`).
pub fn endstate_energies_alpha_form(gas: &GasParams, u_plus: f64) -> (f64, f64) {
    let g = gas.big_gamma;
    let us = u_star(gas);
    let alpha = (g + 2.0 - g * u_plus) / (u_plus - us);
    let e_plus = u_plus * alpha * (u_plus - 1.0) / (g * (g + 2.0 - alpha));
    let e_minus = (u_plus - 1.0) * (g + 2.0) / (g * (g + 2.0 - alpha));
    (e_minus, e_plus)
}

/// Max-norm of the inviscid flux jump `F_1(U_+) - F_1(U_-)`.
pub fn rh_residual(gas: &GasParams, shock: &ShockData) -> Result<f64> {
    let fp = gas_model::flux_x(gas, &shock.state_plus)?;
    let fm = gas_model::flux_x(gas, &shock.state_minus)?;
    Ok((fp - fm).amax())
}

/// Lax 1-shock inequalities: all speeds positive upstream, exactly the
/// slowest negative downstream.
pub fn is_lax_1_shock(gas: &GasParams, shock: &ShockData) -> Result<bool> {
    let sm = gas_model::char_speeds(gas, &shock.state_minus)?;
    let sp = gas_model::char_speeds(gas, &shock.state_plus)?;
    Ok(sm.iter().all(|&a| a > 0.0) && sp[0] < 0.0 && sp[1] > 0.0)
}

/// Right-hand side of the profile ODE for `(u, e)`.
pub fn profile_rhs(gas: &GasParams, shock: &ShockData, u: f64, e: f64) -> Result<(f64, f64)> {
    if !(u > 0.0) {
        return Err(Error::domain(MODULE, format!("vacuum state u = {u}")));
    }
    Ok(rhs_deviation(gas, shock, u - 1.0, e - shock.e_minus))
}

// The same field written in deviations from U_- to avoid cancellation in
// the tail.
fn rhs_deviation(gas: &GasParams, shock: &ShockData, du: f64, de: f64) -> (f64, f64) {
    let g = gas.big_gamma;
    let em = shock.e_minus;
    let fu = (du + g * (de - em * du) / (1.0 + du)) / gas.b();
    let fe = (de - 0.5 * du * du + du * g * em) / gas.nu;
    (fu, fe)
}

/// Jacobian of [`profile_rhs`] at `(u, e)`.
pub fn rhs_jacobian(gas: &GasParams, shock: &ShockData, u: f64, e: f64) -> Matrix2<f64> {
    let g = gas.big_gamma;
    let b = gas.b();
    Matrix2::new(
        (1.0 - g * e / (u * u)) / b,
        g / (b * u),
        (-(u - 1.0) + g * shock.e_minus) / gas.nu,
        1.0 / gas.nu,
    )
}

/// Linearization of the profile ODE at the upstream state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Linearization {
    pub m_minus: Matrix2<f64>,
    pub omega_minus: f64,
    pub omega_plus: f64,
    pub s_minus: Vector2<f64>,
    pub s_plus: Vector2<f64>,
    /// True when the eigenvalues merged within tolerance and the
    /// eigenvectors came from a direct decomposition.
    pub degenerate: bool,
}

pub fn m_minus(gas: &GasParams, shock: &ShockData) -> Matrix2<f64> {
    let g = gas.big_gamma;
    let em = shock.e_minus;
    Matrix2::new(1.0 / gas.b(), 0.0, 0.0, 1.0 / gas.nu)
        * Matrix2::new(1.0 - g * em, g, g * em, 1.0)
}

pub fn det_m_minus_formula(gas: &GasParams, shock: &ShockData) -> f64 {
    let g = gas.big_gamma;
    (1.0 - g * (1.0 + g) * shock.e_minus) / (gas.nu * gas.b())
}

pub fn linearization_minus(gas: &GasParams, shock: &ShockData) -> Linearization {
    let g = gas.big_gamma;
    let b = gas.b();
    let nu = gas.nu;
    let em = shock.e_minus;
    let m = m_minus(gas, shock);
    // d = omega - 1/nu solves d^2 - D d - a12 a21 = 0
    let dd = (1.0 - g * em) / b - 1.0 / nu;
    let prod = g * g * em / (b * nu);
    let root = (dd * dd + 4.0 * prod).sqrt();
    let (d_plus, d_minus) = if dd >= 0.0 {
        let dp = 0.5 * (dd + root);
        (dp, if dp != 0.0 { -prod / dp } else { 0.0 })
    } else {
        let dm = 0.5 * (dd - root);
        (if dm != 0.0 { -prod / dm } else { 0.0 }, dm)
    };
    let omega_plus = 1.0 / nu + d_plus;
    let omega_minus = 1.0 / nu + d_minus;
    let degenerate = (omega_plus - omega_minus).abs() <= 1e-9 * omega_plus.abs().max(1.0);
    let (s_minus, s_plus) = if degenerate {
        (
            eigenvector2(&m, omega_minus, Vector2::new(-1.0, 0.0)),
            eigenvector2(&m, omega_plus, Vector2::new(0.0, 1.0)),
        )
    } else {
        // second component -g em / (nu d_j) rewritten through the product
        // of the two roots
        (
            Vector2::new(-1.0, b * d_plus / g),
            Vector2::new(-1.0, b * d_minus / g),
        )
    };
    Linearization {
        m_minus: m,
        omega_minus,
        omega_plus,
        s_minus,
        s_plus,
        degenerate,
    }
}

/// Null vector of `m - omega`, scaled to first component -1 when possible;
/// `fallback` when `m - omega` vanishes.
fn eigenvector2(m: &Matrix2<f64>, omega: f64, fallback: Vector2<f64>) -> Vector2<f64> {
    let a = m - Matrix2::identity() * omega;
    let r0 = a[(0, 0)].abs() + a[(0, 1)].abs();
    let r1 = a[(1, 0)].abs() + a[(1, 1)].abs();
    let scale = m.norm();
    if r0.max(r1) <= 1e-7 * scale {
        return fallback;
    }
    let v = if r0 >= r1 {
        Vector2::new(a[(0, 1)], -a[(0, 0)])
    } else {
        Vector2::new(-a[(1, 1)], a[(1, 0)])
    };
    if v[0].abs() > 1e-12 * v.norm() {
        v / -v[0]
    } else {
        v / v.norm()
    }
}

/// `∂U/∂(u, e)` at the upstream state.
pub fn du_d_ue(shock: &ShockData) -> nalgebra::Matrix4x2<f64> {
    nalgebra::Matrix4x2::new(-1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5 - shock.e_minus, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticData {
    pub linearization: Linearization,
    /// Unit tangent of `(u, e)` at minus infinity.
    pub s: Vector2<f64>,
    /// Conservative direction scaled to first component 1.
    pub big_s: Vector4<f64>,
}

pub fn asymptotic_direction(gas: &GasParams, shock: &ShockData) -> Result<AsymptoticData> {
    let lin = linearization_minus(gas, shock);
    if lin.degenerate {
        return Err(Error::Numerical {
            module: MODULE,
            message: "slow and fast rates merged; use the strong-shock limit direction".into(),
        });
    }
    let sm = lin.s_minus;
    let big_s = du_d_ue(shock) * sm;
    let big_s = big_s / big_s[0];
    Ok(AsymptoticData {
        linearization: lin,
        s: sm / sm.norm(),
        big_s,
    })
}

/// Limit of the conservative direction as `u_plus -> u*`.
pub fn strong_shock_direction(gas: &GasParams) -> Vector4<f64> {
    let g = gas.big_gamma;
    let s4 = -0.5 + (1.0 - gas.phi).max(0.0) / g;
    Vector4::new(1.0, 0.0, 0.0, s4)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileOptions {
    /// Minimal half-length of the returned grid on each side of the anchor.
    pub half_length: f64,
    /// Endpoint tolerance.
    pub tol: f64,
    /// Relative integration tolerance; `None` ties it to `tol`.
    pub rtol: Option<f64>,
    pub max_step: f64,
    pub max_steps: usize,
    /// Seed offset relative to `|U_+ - U_-|`.
    pub seed_scale: f64,
    /// Allowed overshoot of `u` outside `[u_+, 1]` relative to the jump.
    pub margin: f64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions {
            half_length: 20.0,
            tol: 1e-10,
            rtol: None,
            max_step: 0.1,
            max_steps: 200_000,
            seed_scale: 1e-7,
            margin: 1e-3,
        }
    }
}

/// Least-squares fit of the decaying tail toward minus infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub rate: f64,
    /// Unit direction in `(u, e)`.
    pub direction: Vector2<f64>,
    /// Unit direction in conservative variables.
    pub direction_conserved: Vector4<f64>,
    pub decades: f64,
}

/// The connecting orbit on a grid, anchored at `u = (1 + u_+)/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSolution {
    pub gas: GasParams,
    pub shock: ShockData,
    pub grid: Vec<f64>,
    pub u: Vec<f64>,
    pub e: Vec<f64>,
    pub du: Vec<f64>,
    pub de: Vec<f64>,
    pub ddu: Vec<f64>,
    pub dde: Vec<f64>,
    pub half_length: f64,
    pub anchor: usize,
    pub monotone: bool,
    /// Stable rate of the downstream tail.
    pub plus_rate: f64,
    pub tail: TailFit,
}

/// Profile state with first and second derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint {
    pub u: f64,
    pub e: f64,
    pub du: f64,
    pub de: f64,
    pub ddu: f64,
    pub dde: f64,
}

impl ProfileSolution {
    pub fn x_min(&self) -> f64 {
        self.grid[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.grid.last().expect("non-empty grid")
    }

    /// Endpoint deviations from `(1, e_-)` and `(u_+, e_+)`.
    pub fn endpoint_errors(&self) -> (f64, f64) {
        let n = self.grid.len() - 1;
        let left = ((self.u[0] - 1.0).powi(2) + (self.e[0] - self.shock.e_minus).powi(2)).sqrt();
        let right = ((self.u[n] - self.shock.u_plus).powi(2)
            + (self.e[n] - self.shock.e_plus).powi(2))
        .sqrt();
        (left, right)
    }

    /// Evaluate the profile anywhere; outside the grid the linearized tails
    /// are used.
    pub fn eval(&self, x: f64) -> ProfilePoint {
        let n = self.grid.len();
        if x <= self.grid[0] {
            let m = linearization_minus(&self.gas, &self.shock).m_minus;
            let dev0 = Vector2::new(self.u[0] - 1.0, self.e[0] - self.shock.e_minus);
            let dev = (m * (x - self.grid[0])).exp() * dev0;
            let d1 = m * dev;
            let d2 = m * d1;
            return ProfilePoint {
                u: 1.0 + dev[0],
                e: self.shock.e_minus + dev[1],
                du: d1[0],
                de: d1[1],
                ddu: d2[0],
                dde: d2[1],
            };
        }
        if x >= self.grid[n - 1] {
            let k = n - 1;
            let f = (self.plus_rate * (x - self.grid[k])).exp();
            let du0 = self.u[k] - self.shock.u_plus;
            let de0 = self.e[k] - self.shock.e_plus;
            let r = self.plus_rate;
            return ProfilePoint {
                u: self.shock.u_plus + du0 * f,
                e: self.shock.e_plus + de0 * f,
                du: r * du0 * f,
                de: r * de0 * f,
                ddu: r * r * du0 * f,
                dde: r * r * de0 * f,
            };
        }
        let i = match self.grid.binary_search_by(|g| g.partial_cmp(&x).expect("finite grid")) {
            Ok(i) => i.min(n - 2),
            Err(i) => i - 1,
        };
        let h = self.grid[i + 1] - self.grid[i];
        let t = (x - self.grid[i]) / h;
        let (u, du, ddu) = hermite5(
            t,
            h,
            [self.u[i], self.du[i], self.ddu[i]],
            [self.u[i + 1], self.du[i + 1], self.ddu[i + 1]],
        );
        let (e, de, dde) = hermite5(
            t,
            h,
            [self.e[i], self.de[i], self.dde[i]],
            [self.e[i + 1], self.de[i + 1], self.dde[i + 1]],
        );
        ProfilePoint { u, e, du, de, ddu, dde }
    }

    /// Maximal norm of the profile-ODE Jacobian over the grid.
    pub fn lipschitz_bound(&self) -> f64 {
        self.u
            .iter()
            .zip(&self.e)
            .map(|(&u, &e)| rhs_jacobian(&self.gas, &self.shock, u, e).norm())
            .fold(0.0, f64::max)
    }
}

/// Quintic Hermite interpolant and its first two derivatives.
fn hermite5(t: f64, h: f64, y0: [f64; 3], y1: [f64; 3]) -> (f64, f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;
    let b = [
        1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5,
        t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5,
        0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5),
        10.0 * t3 - 15.0 * t4 + 6.0 * t5,
        -4.0 * t3 + 7.0 * t4 - 3.0 * t5,
        0.5 * (t3 - 2.0 * t4 + t5),
    ];
    let db = [
        -30.0 * t2 + 60.0 * t3 - 30.0 * t4,
        1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4,
        0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4),
        30.0 * t2 - 60.0 * t3 + 30.0 * t4,
        -12.0 * t2 + 28.0 * t3 - 15.0 * t4,
        0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4),
    ];
    let ddb = [
        -60.0 * t + 180.0 * t2 - 120.0 * t3,
        -36.0 * t + 96.0 * t2 - 60.0 * t3,
        0.5 * (2.0 - 18.0 * t + 36.0 * t2 - 20.0 * t3),
        60.0 * t - 180.0 * t2 + 120.0 * t3,
        -24.0 * t + 84.0 * t2 - 60.0 * t3,
        0.5 * (6.0 * t - 24.0 * t2 + 20.0 * t3),
    ];
    let c = [y0[0], h * y0[1], h * h * y0[2], y1[0], h * y1[1], h * h * y1[2]];
    let mut v = 0.0;
    let mut d = 0.0;
    let mut dd = 0.0;
    for k in 0..6 {
        v += b[k] * c[k];
        d += db[k] * c[k];
        dd += ddb[k] * c[k];
    }
    (v, d / h, dd / (h * h))
}

/// Stable eigenpair of the profile ODE at the downstream saddle, oriented
/// with positive `u` component.
fn saddle_stable_mode(gas: &GasParams, shock: &ShockData) -> Result<(f64, Vector2<f64>)> {
    let j = rhs_jacobian(gas, shock, shock.u_plus, shock.e_plus);
    let tr = j.trace();
    let det = j.determinant();
    if !(det < 0.0) {
        return Err(Error::numerical(
            MODULE,
            format!("downstream state is not a saddle (det J = {det:.3e})"),
        ));
    }
    let mu = 0.5 * (tr - (tr * tr - 4.0 * det).sqrt());
    // (j - mu) w = 0 using the better-conditioned row
    let r0 = (j[(0, 0)] - mu).abs() + j[(0, 1)].abs();
    let r1 = j[(1, 0)].abs() + (j[(1, 1)] - mu).abs();
    let mut w = if r0 >= r1 {
        Vector2::new(j[(0, 1)], mu - j[(0, 0)])
    } else {
        Vector2::new(mu - j[(1, 1)], j[(1, 0)])
    };
    w /= w.norm();
    if w[0] < 0.0 {
        w = -w;
    }
    Ok((mu, w))
}

/// Compute the connecting orbit from `U_-` at minus infinity to `U_+`.
///
/// `half_length` is a lower bound: the grid is extended on each side until
/// the endpoint deviations drop below `tol`.
pub fn solve_profile(
    gas: &GasParams,
    shock: &ShockData,
    opts: &ProfileOptions,
) -> Result<ProfileSolution> {
    if !(opts.half_length > 0.0) {
        return Err(Error::Validation {
            module: MODULE,
            param: "half_length",
            message: format!("must be positive, got {}", opts.half_length),
        });
    }
    if !(opts.tol > 0.0) {
        return Err(Error::Validation {
            module: MODULE,
            param: "tol",
            message: format!("must be positive, got {}", opts.tol),
        });
    }
    if !(shock.u_plus < 1.0) {
        return Err(Error::domain(MODULE, "profile requires a strictly interior shock u_plus < 1"));
    }
    let (mu_s, w_s) = saddle_stable_mode(gas, shock)?;
    let jump = shock.jump().norm();
    let eps = opts.seed_scale * jump;
    let u_mid = 0.5 * (1.0 + shock.u_plus);
    let em = shock.e_minus;
    let rtol = opts.rtol.unwrap_or((1e-2 * opts.tol).clamp(1e-13, 1e-9));
    let ode_opts = OdeOptions {
        rtol,
        atol: 1e-3 * rtol * opts.tol.min(1.0),
        h0: 1e-3,
        max_step: opts.max_step,
        max_steps: opts.max_steps,
    };
    let lo = shock.u_plus - opts.margin * (1.0 - shock.u_plus);
    let hi = 1.0 + opts.margin * (1.0 - shock.u_plus);

    let mut xs = Vec::new();
    let mut ys: Vec<[f64; 2]> = Vec::new();
    let mut fs: Vec<[f64; 2]> = Vec::new();
    let mut anchor_x: Option<f64> = None;
    let mut exit: Option<(f64, f64)> = None;
    let mut closest = f64::INFINITY;
    let stop_tol = 0.1 * opts.tol;

    let mut y = [
        shock.u_plus - 1.0 + eps * w_s[0],
        shock.e_plus - em + eps * w_s[1],
    ];
    let x_seed = 0.0;
    let span_guess = 1e6;
    let stats = ode::integrate(
        |_, y, f| {
            let (a, b) = rhs_deviation(gas, shock, y[0], y[1]);
            f[0] = a;
            f[1] = b;
        },
        x_seed,
        &mut y,
        x_seed - span_guess,
        &ode_opts,
        |x, y, f| {
            let u = 1.0 + y[0];
            if !(u > lo && u < hi) || !y[1].is_finite() {
                exit = Some((x, u));
                return Control::Stop;
            }
            if anchor_x.is_none() {
                if let Some(&prev) = ys.last() {
                    let up = 1.0 + prev[0];
                    if (up - u_mid) * (u - u_mid) <= 0.0 && up != u {
                        let xp = *xs.last().expect("paired");
                        anchor_x = Some(xp + (x - xp) * (u_mid - up) / (u - up));
                    }
                }
            }
            xs.push(x);
            ys.push([y[0], y[1]]);
            fs.push([f[0], f[1]]);
            let dev = (y[0] * y[0] + y[1] * y[1]).sqrt();
            closest = closest.min(dev);
            match anchor_x {
                Some(xa) if dev < stop_tol && x <= xa - opts.half_length => Control::Stop,
                _ => Control::Continue,
            }
        },
    );
    if let Some((x, u)) = exit {
        return Err(Error::Connection { x, u });
    }
    let stats = match stats {
        Ok(s) => s,
        Err(_) => {
            return Err(Error::Truncation {
                closest,
                steps: xs.len(),
            })
        }
    };
    if !stats.stopped {
        return Err(Error::Truncation {
            closest,
            steps: stats.accepted,
        });
    }
    let anchor_guess = anchor_x.ok_or(Error::Truncation {
        closest,
        steps: stats.accepted,
    })?;

    // reverse to increasing x
    xs.reverse();
    ys.reverse();
    fs.reverse();

    let second = |u: f64, e: f64, fu: f64, fe: f64| -> (f64, f64) {
        let v = rhs_jacobian(gas, shock, u, e) * Vector2::new(fu, fe);
        (v[0], v[1])
    };

    let mut sol = ProfileSolution {
        gas: *gas,
        shock: *shock,
        grid: Vec::with_capacity(xs.len() + 64),
        u: Vec::new(),
        e: Vec::new(),
        du: Vec::new(),
        de: Vec::new(),
        ddu: Vec::new(),
        dde: Vec::new(),
        half_length: opts.half_length,
        anchor: 0,
        monotone: true,
        plus_rate: mu_s,
        tail: TailFit {
            rate: 0.0,
            direction: Vector2::zeros(),
            direction_conserved: Vector4::zeros(),
            decades: 0.0,
        },
    };
    for k in 0..xs.len() {
        let u = 1.0 + ys[k][0];
        let e = em + ys[k][1];
        let (uu, ee) = second(u, e, fs[k][0], fs[k][1]);
        sol.grid.push(xs[k]);
        sol.u.push(u);
        sol.e.push(e);
        sol.du.push(fs[k][0]);
        sol.de.push(fs[k][1]);
        sol.ddu.push(uu);
        sol.dde.push(ee);
    }

    // refine the anchor on the interpolant, then translate
    let mut a = anchor_guess - opts.max_step;
    let mut bnd = anchor_guess + opts.max_step;
    a = a.max(sol.x_min());
    bnd = bnd.min(sol.x_max());
    let fa = sol.eval(a).u - u_mid;
    if fa * (sol.eval(bnd).u - u_mid) > 0.0 {
        a = sol.x_min();
        bnd = sol.x_max();
    }
    for _ in 0..200 {
        let m = 0.5 * (a + bnd);
        if (sol.eval(m).u - u_mid) * (sol.eval(a).u - u_mid) <= 0.0 {
            bnd = m;
        } else {
            a = m;
        }
        if bnd - a < 1e-15 * m.abs().max(1.0) {
            break;
        }
    }
    let x_anchor = 0.5 * (a + bnd);
    for x in sol.grid.iter_mut() {
        *x -= x_anchor;
    }

    // downstream linear tail
    let x_last = *sol.grid.last().expect("non-empty");
    let off_u = sol.u.last().copied().expect("non-empty") - shock.u_plus;
    let off_e = sol.e.last().copied().expect("non-empty") - shock.e_plus;
    let off = (off_u * off_u + off_e * off_e).sqrt();
    let h = opts.max_step;
    let mut k = 1usize;
    loop {
        let x = x_last + k as f64 * h;
        let f = (mu_s * (x - x_last)).exp();
        sol.grid.push(x);
        sol.u.push(shock.u_plus + off_u * f);
        sol.e.push(shock.e_plus + off_e * f);
        sol.du.push(mu_s * off_u * f);
        sol.de.push(mu_s * off_e * f);
        sol.ddu.push(mu_s * mu_s * off_u * f);
        sol.dde.push(mu_s * mu_s * off_e * f);
        if x >= opts.half_length && off * f < stop_tol {
            break;
        }
        k += 1;
        if k > opts.max_steps {
            return Err(Error::Truncation {
                closest: off * f,
                steps: k,
            });
        }
    }

    sol.anchor = sol
        .grid
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.abs().partial_cmp(&b.abs()).expect("finite"))
        .map(|(i, _)| i)
        .unwrap_or(0);
    sol.monotone = sol.du.iter().all(|&d| d <= 0.0);
    let (el, er) = sol.endpoint_errors();
    if el > opts.tol || er > opts.tol {
        return Err(Error::Truncation {
            closest: el.max(er),
            steps: sol.grid.len(),
        });
    }
    sol.tail = profile_tail_direction(&sol)?;
    Ok(sol)
}

/// Fit rate and direction of the tail of `(x, dev, dev')` samples where
/// `dev` decays toward minus infinity. Samples must be sorted by `x`.
pub fn fit_tail(
    xs: &[f64],
    dev: &[Vector2<f64>],
    ddev: &[Vector2<f64>],
    shock: &ShockData,
) -> Result<TailFit> {
    let norms: Vec<f64> = dev.iter().map(|d| d.norm()).collect();
    let floor = norms.iter().copied().fold(f64::INFINITY, f64::min);
    let top = norms.iter().copied().fold(0.0, f64::max);
    if !(floor > 0.0) || top / floor < 100.0 {
        return Err(Error::Numerical {
            module: MODULE,
            message: format!(
                "tail resolves only {:.2} decades of decay; increase the half-length",
                (top / floor.max(1e-300)).log10()
            ),
        });
    }
    let decades = (top / floor).log10();
    // deepest decade
    let idx: Vec<usize> = (0..xs.len()).filter(|&i| norms[i] <= 10.0 * floor).collect();
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let n = idx.len() as f64;
    for &i in &idx {
        let x = xs[i];
        let y = norms[i].ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let var = n * sxx - sx * sx;
    if idx.len() < 3 || var <= 0.0 {
        return Err(Error::Numerical {
            module: MODULE,
            message: "too few samples in the deepest decade of the tail".into(),
        });
    }
    let rate = (n * sxy - sx * sy) / var;
    let deepest = idx
        .iter()
        .copied()
        .min_by(|&a, &b| norms[a].partial_cmp(&norms[b]).expect("finite"))
        .expect("non-empty");
    let mut d = ddev[deepest];
    if d.norm() == 0.0 {
        d = dev[deepest];
    }
    let mut direction = d / d.norm();
    // orient as the conservative direction with positive density component
    if direction[0] > 0.0 {
        direction = -direction;
    }
    let dc = du_d_ue(shock) * direction;
    Ok(TailFit {
        rate,
        direction,
        direction_conserved: dc / dc.norm(),
        decades,
    })
}

/// Fitted decay rate and direction of `Û'` toward minus infinity.
pub fn profile_tail_direction(profile: &ProfileSolution) -> Result<TailFit> {
    let em = profile.shock.e_minus;
    let end = profile.anchor.max(1);
    let xs = &profile.grid[..end];
    let dev: Vec<Vector2<f64>> = (0..end)
        .map(|i| Vector2::new(profile.u[i] - 1.0, profile.e[i] - em))
        .collect();
    let ddev: Vec<Vector2<f64>> = (0..end)
        .map(|i| Vector2::new(profile.du[i], profile.de[i]))
        .collect();
    fit_tail(xs, &dev, &ddev, &profile.shock)
}

/// Angle between two lines in R^4.
pub fn line_angle(a: &Vector4<f64>, b: &Vector4<f64>) -> f64 {
    let c = (a.dot(b) / (a.norm() * b.norm())).abs().min(1.0);
    let s = (a - b * (a.dot(b) / b.norm_squared())).norm() / a.norm();
    s.atan2(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas_model::kinetic_gas;

    #[test]
    fn reduced_and_alpha_forms_agree() {
        for n in 1..=3 {
            let gas = kinetic_gas(n).unwrap();
            for k in 1..20 {
                let us = u_star(&gas);
                let up = us + (1.0 - us) * k as f64 / 20.0;
                let s = endstates(&gas, up).unwrap();
                let (em, ep) = endstate_energies_alpha_form(&gas, up);
                assert!((em - s.e_minus).abs() < 1e-13);
                assert!((ep - s.e_plus).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn weak_endpoint_limit() {
        let gas = kinetic_gas(1).unwrap();
        let s = endstates(&gas, 1.0).unwrap();
        let g = gas.big_gamma;
        assert!((s.alpha - (g + 2.0)).abs() < 1e-14);
        assert!((s.e_minus - s.e_plus).abs() < 1e-15);
        let (em, ep) = endstate_energies_alpha_form(&gas, 1.0 - 1e-7);
        assert!((em - s.e_minus).abs() < 1e-6);
        assert!((ep - s.e_plus).abs() < 1e-6);
    }

    #[test]
    fn domain_rejection() {
        let gas = kinetic_gas(1).unwrap();
        assert!(matches!(endstates(&gas, 0.25), Err(Error::Domain { .. })));
        assert!(matches!(endstates(&gas, 1.01), Err(Error::Domain { .. })));
        assert!(endstates(&gas, 0.2500001).is_ok());
    }

    #[test]
    fn equilibria_of_rhs() {
        let gas = kinetic_gas(2).unwrap();
        let s = endstates(&gas, 0.5).unwrap();
        let (a, b) = profile_rhs(&gas, &s, 1.0, s.e_minus).unwrap();
        assert_eq!((a, b), (0.0, 0.0));
        let (a, b) = profile_rhs(&gas, &s, s.u_plus, s.e_plus).unwrap();
        assert!(a.abs() < 1e-12 && b.abs() < 1e-12);
        assert!(profile_rhs(&gas, &s, 0.0, 1.0).is_err());
    }

    #[test]
    fn hermite_reproduces_quintics() {
        let p = |x: f64| 1.0 + x - 2.0 * x.powi(3) + 0.5 * x.powi(5);
        let dp = |x: f64| 1.0 - 6.0 * x * x + 2.5 * x.powi(4);
        let ddp = |x: f64| -12.0 * x + 10.0 * x.powi(3);
        let (x0, x1) = (0.3, 1.1);
        let h = x1 - x0;
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            let x = x0 + t * h;
            let (v, d, dd) = hermite5(t, h, [p(x0), dp(x0), ddp(x0)], [p(x1), dp(x1), ddp(x1)]);
            assert!((v - p(x)).abs() < 1e-13);
            assert!((d - dp(x)).abs() < 1e-12);
            assert!((dd - ddp(x)).abs() < 1e-11);
        }
    }

    #[test]
    fn strong_direction_branches() {
        let gas = crate::gas_model::make_gas(1.4, 1.0, 0.0, 1.0, 1.0).unwrap();
        assert!(gas.phi >= 1.0);
        assert_eq!(strong_shock_direction(&gas), Vector4::new(1.0, 0.0, 0.0, -0.5));
    }
}
