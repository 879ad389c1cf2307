//! Stability index on the real axis and zero counts by the argument
//! principle.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bases::{self, LimitingBases};
use super::functions::{self, EvansValue};
use super::system::{checked_boundary_kernel, EvansSystem};
use super::EvansOptions;
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::ode::{self, Control, OdeOptions};

const MODULE: &str = "evans";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexGrid {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub n: usize,
}

impl IndexGrid {
    /// Default grid up to `10 (2 mu + eta2 + nu)` times the profile
    /// Lipschitz bound.
    pub fn default_for(sys: &EvansSystem) -> Self {
        let lmax = 10.0 * (sys.gas.b() + sys.gas.nu) * sys.profile.lipschitz_bound();
        IndexGrid {
            lambda_min: 1e-4,
            lambda_max: lmax,
            n: 200,
        }
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.lambda_min > 0.0 && self.lambda_max > self.lambda_min && self.n >= 2) {
            return Err(Error::Validation {
                module: MODULE,
                param: "lambda_min",
                message: "need 0 < lambda_min < lambda_max and at least two points".into(),
            });
        }
        let (a, b) = (self.lambda_min.ln(), self.lambda_max.ln());
        Ok((0..self.n)
            .map(|k| (a + (b - a) * k as f64 / (self.n - 1) as f64).exp())
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityIndex {
    /// `+1`, `-1`, or `0` when an endpoint value is negligible against its
    /// grid neighbours.
    pub index: i8,
    pub sign_low: i8,
    pub sign_high: i8,
    pub sign_changes: usize,
    /// `|D|` is monotone over the first three grid points.
    pub low_end_monotone: bool,
    /// The decoupled transverse mode has no zero on the grid.
    pub transverse_nonvanishing: bool,
    pub x_shift: f64,
    pub values: Vec<EvansValue>,
}

fn sign_of(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Evans function of the shifted layer along the real grid, with bases
/// carried continuously from `lambda_min`.
pub fn real_trace(sys: &EvansSystem, x_shift: f64, grid: &IndexGrid, opts: &EvansOptions) -> Result<Vec<EvansValue>> {
    let lams: Vec<C64> = grid.points()?.into_iter().map(|l| C64::new(l, 0.0)).collect();
    let path = bases::limiting_bases(sys, &lams)?;
    let e0 = checked_boundary_kernel(opts.boundary, path[0].e_plus.ncols())?;
    path.par_iter()
        .map(|b| functions::evans_boundary(sys, b, &e0, x_shift, opts))
        .collect()
}

pub fn stability_index(sys: &EvansSystem, x_shift: f64, grid: &IndexGrid, opts: &EvansOptions) -> Result<StabilityIndex> {
    let values = real_trace(sys, x_shift, grid, opts)?;
    let re: Vec<f64> = values.iter().map(|v| v.mantissa.re).collect();
    let logs: Vec<f64> = values.iter().map(EvansValue::ln_abs).collect();
    let n = values.len();
    let w = n.min(3);
    let endpoint = |k: usize, near: &[f64]| {
        let ln_tol = near.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 1e-10f64.ln();
        if logs[k] <= ln_tol {
            0
        } else {
            sign_of(re[k])
        }
    };
    let sign_low = endpoint(0, &logs[..w]);
    let sign_high = endpoint(n - 1, &logs[n - w..]);
    let sign_changes = re.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
    let mags: Vec<f64> = logs.iter().take(3).cloned().collect();
    let low_end_monotone =
        mags.windows(2).all(|w| w[1] >= w[0]) || mags.windows(2).all(|w| w[1] <= w[0]);
    let lams: Vec<f64> = values.iter().map(|v| v.lambda.re).collect();
    let transverse: Vec<C64> = lams
        .par_iter()
        .map(|&l| transverse_mode(sys, C64::new(l, 0.0), x_shift, opts))
        .collect::<Result<_>>()?;
    let transverse_nonvanishing = transverse.iter().all(|v| v.re > 0.0);
    Ok(StabilityIndex {
        index: sign_low * sign_high,
        sign_low,
        sign_high,
        sign_changes,
        low_end_monotone,
        transverse_nonvanishing,
        x_shift,
        values,
    })
}

/// Value at the wall of the decaying solution of
/// `mu v'' - v' - lambda rho v = 0` for the layer shifted by `X`,
/// normalized to `exp(k x)` at plus infinity.
pub fn transverse_mode(sys: &EvansSystem, lambda: C64, x_shift: f64, opts: &EvansOptions) -> Result<C64> {
    let mu = sys.gas.mu;
    let (_, lp) = functions::lengths(sys, opts);
    let rho_p = 1.0 / sys.shock.u_plus;
    let k = (1.0 - (1.0 + 4.0 * mu * lambda * rho_p).sqrt()) / (2.0 * mu);
    let mut y = [1.0, 0.0, k.re, k.im];
    let ode_opts = OdeOptions {
        rtol: opts.rtol,
        atol: opts.atol,
        h0: 1e-2,
        max_step: opts.max_step,
        max_steps: opts.max_steps,
    };
    let mut x = lp;
    let mut log_scale = 0.0;
    let target = -x_shift;
    while x > target {
        let next = (x - 1.0).max(target);
        ode::integrate(
            |xx, y, f| {
                let rho = 1.0 / sys.profile.eval(xx).u;
                let v = C64::new(y[0], y[1]);
                let dv = C64::new(y[2], y[3]);
                let ddv = (dv + lambda * rho * v) / mu;
                f[0] = dv.re;
                f[1] = dv.im;
                f[2] = ddv.re;
                f[3] = ddv.im;
            },
            x,
            &mut y,
            next,
            &ode_opts,
            |_, _, _| Control::Continue,
        )?;
        let n = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in y.iter_mut() {
            *v /= n;
        }
        log_scale += n.ln();
        x = next;
    }
    Ok(C64::new(y[0], y[1]) * log_scale.exp())
}

/// Closed contour, counterclockwise: the segment `Re lambda = shift`,
/// `|Im lambda| <= R`, closed by the half circle of radius `R` to the right.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub shift: f64,
    pub radius: f64,
    pub n: usize,
}

impl Contour {
    pub fn points(&self) -> Vec<C64> {
        let n_seg = self.n / 2;
        let n_arc = self.n - n_seg;
        let mut pts = Vec::with_capacity(self.n + 1);
        for k in 0..n_seg {
            let t = 1.0 - 2.0 * k as f64 / n_seg as f64;
            pts.push(C64::new(self.shift, t * self.radius));
        }
        for k in 0..n_arc {
            let th = -std::f64::consts::FRAC_PI_2 + std::f64::consts::PI * k as f64 / n_arc as f64;
            pts.push(C64::new(self.shift, 0.0) + C64::from_polar(self.radius, th));
        }
        pts.push(pts[0]);
        pts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindingResult {
    pub count: i64,
    pub winding: f64,
    pub residual: f64,
    pub samples: usize,
}

fn arg_step(a: C64, b: C64) -> f64 {
    (b / a).arg()
}

/// Winding number of `f` about zero along a closed polyline, refining
/// segments whose argument increment exceeds `max_step` radians.
pub fn winding_number<F>(f: F, closed: &[C64], max_step: f64, max_points: usize) -> Result<WindingResult>
where
    F: Fn(&[C64]) -> Result<Vec<C64>>,
{
    let mut lams = closed.to_vec();
    let mut vals = f(&lams)?;
    loop {
        let bad: Vec<usize> = (0..lams.len() - 1)
            .filter(|&k| arg_step(vals[k], vals[k + 1]).abs() > max_step)
            .collect();
        if bad.is_empty() || lams.len() + bad.len() > max_points {
            break;
        }
        let mids: Vec<C64> = bad.iter().map(|&k| 0.5 * (lams[k] + lams[k + 1])).collect();
        let mut new_l = Vec::with_capacity(lams.len() + mids.len());
        let mut it = bad.iter().zip(&mids).peekable();
        for (k, &l) in lams.iter().enumerate() {
            new_l.push(l);
            if let Some((&kk, &m)) = it.peek() {
                if kk == k {
                    new_l.push(m);
                    it.next();
                }
            }
        }
        lams = new_l;
        vals = f(&lams)?;
    }
    if vals.iter().any(|v| v.norm() == 0.0) {
        return Err(Error::numerical(MODULE, "function vanishes on the contour"));
    }
    let total: f64 = vals.windows(2).map(|w| arg_step(w[0], w[1])).sum();
    let winding = total / (2.0 * std::f64::consts::PI);
    let count = winding.round() as i64;
    let residual = (winding - count as f64).abs();
    if residual >= 0.1 {
        return Err(Error::Numerical {
            module: MODULE,
            message: format!("winding number {winding:.4} is not close to an integer; refine the contour"),
        });
    }
    Ok(WindingResult {
        count,
        winding,
        residual,
        samples: lams.len(),
    })
}

/// Number of zeros of the boundary-layer Evans function inside the
/// contour.
///
/// The argument is tracked for `D_X / beta`, which has the same zeros and a
/// slowly varying phase.
pub fn zero_count(sys: &EvansSystem, x_shift: f64, contour: &Contour, opts: &EvansOptions) -> Result<WindingResult> {
    let eval = |lams: &[C64]| -> Result<Vec<C64>> {
        let path: Vec<LimitingBases> = bases::limiting_bases(sys, lams)?;
        let e0 = checked_boundary_kernel(opts.boundary, path[0].e_plus.ncols())?;
        path.par_iter()
            .map(|b| {
                let d = functions::evans_boundary(sys, b, &e0, x_shift, opts)?;
                let lb = functions::beta_exponent(sys, b, x_shift)?;
                Ok(d.mantissa * C64::new(0.0, -lb.im).exp())
            })
            .collect()
    };
    winding_number(eval, &contour.points(), 0.5, 4 * contour.n.max(64))
}
