//! One- and multi-dimensional Lopatinski-type determinants of the standing
//! shock.

pub mod audit;
pub mod closed_forms;
pub mod curve;

use nalgebra::{DMatrix, DVector, Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas_model::{self, ConservedState, GasParams, PrimitiveState};
use crate::linalg::{self, SchurForm, C64, I};
use crate::profile::{self, ShockData};

const MODULE: &str = "lopatinski";

/// Absolute threshold below which a normalized determinant is marginal.
pub const MARGINAL_TOL: f64 = 1e-12;

pub fn jump_u(shock: &ShockData) -> Vector4<f64> {
    shock.jump()
}

/// `[F_2(U)]`, which reduces to `(0, 0, [p], 0)` when `v = 0` on both sides.
pub fn jump_f2(gas: &GasParams, shock: &ShockData) -> Result<Vector4<f64>> {
    Ok(gas_model::flux_y(gas, &shock.state_plus)? - gas_model::flux_y(gas, &shock.state_minus)?)
}

/// `dF_1(U_-) S`.
pub fn a1_minus_s(gas: &GasParams, shock: &ShockData) -> Result<Vector4<f64>> {
    let asym = profile::asymptotic_direction(gas, shock)?;
    Ok(gas_model::jacobian_f1(gas, &shock.state_minus)? * asym.big_s)
}

/// Left eigenvector of `dF_1` for `u - c`, obtained in primitive variables
/// and mapped back; scaled so the last entry is `p_e / rho`.
pub fn ell_plus_1d(gas: &GasParams, state: &ConservedState) -> Result<Vector4<f64>> {
    let w = gas_model::conserved_to_primitive(state)?;
    let c = gas_model::sound_speed(gas, w.e);
    let p_rho = gas.big_gamma * w.e;
    let p_e = gas.big_gamma * w.rho;
    let lt = nalgebra::RowVector4::new(p_rho, -w.rho * c, 0.0, p_e);
    let (_, s_inv) = gas_model::coordinate_change(&w)?;
    let ell = (lt * s_inv).transpose();
    let a = gas_model::jacobian_f1(gas, state)?;
    let resid = (a.transpose() * ell - ell * (w.u - c)).norm();
    if resid > 1e-10 * ell.norm() * a.norm().max(1.0) {
        return Err(Error::Consistency {
            module: MODULE,
            message: format!("left eigenvector residual {resid:.3e}"),
        });
    }
    Ok(ell)
}

/// Orthonormal basis of the positive-speed subspace of `dF_1(U_+)`, oriented
/// so that `det(R_+ | ell_+) > 0`.
pub fn r_plus(gas: &GasParams, state: &ConservedState) -> Result<nalgebra::Matrix4x3<f64>> {
    let a = gas_model::jacobian_f1(gas, state)?;
    let ac = linalg::to_complex(&DMatrix::from_iterator(4, 4, a.iter().copied()));
    let mut schur = SchurForm::new(&ac)?;
    schur.sort_by(|x, y| y.re.partial_cmp(&x.re).unwrap_or(std::cmp::Ordering::Equal));
    let ev = schur.eigenvalues();
    if !(ev[2].re > 0.0 && ev[3].re < 0.0) {
        return Err(Error::domain(
            MODULE,
            "downstream state does not have exactly one negative speed",
        ));
    }
    let basis = linalg::realify(&schur.leading(3));
    let mut r = nalgebra::Matrix4x3::from_fn(|i, j| basis[(i, j)].re);
    let ell = ell_plus_1d(gas, state)?;
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<4, 3>(0, 0).copy_from(&r);
    m.set_column(3, &ell);
    if m.determinant() < 0.0 {
        let last = -r.column(2);
        r.set_column(2, &last);
    }
    Ok(r)
}

fn det_with(r: &nalgebra::Matrix4x3<f64>, f: &Vector4<f64>) -> f64 {
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<4, 3>(0, 0).copy_from(r);
    m.set_column(3, f);
    m.determinant()
}

/// Both computation paths of the one-dimensional determinants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deltas {
    /// `ell_+ . [U]` with `ell_+` scaled to last entry `Gamma`.
    pub delta: f64,
    /// `ell_+ . dF_1(U_-) S` with the same scaling.
    pub delta_hat: f64,
    /// `det(R_+ | [U])`.
    pub delta_det: f64,
    /// `det(R_+ | dF_1(U_-) S)`.
    pub delta_hat_det: f64,
    pub marginal: bool,
}

impl Deltas {
    pub fn product(&self) -> f64 {
        self.delta * self.delta_hat
    }
}

pub fn deltas(gas: &GasParams, shock: &ShockData) -> Result<Deltas> {
    if !profile::is_lax_1_shock(gas, shock)? {
        return Err(Error::domain(MODULE, "endstates do not form a Lax 1-shock"));
    }
    let r = r_plus(gas, &shock.state_plus)?;
    let ell = ell_plus_1d(gas, &shock.state_plus)?;
    let ju = jump_u(shock);
    let a1s = a1_minus_s(gas, shock)?;
    let delta_det = det_with(&r, &ju);
    let delta_hat_det = det_with(&r, &a1s);
    let scale = gas.big_gamma / ell[3];
    let delta = scale * ell.dot(&ju);
    let delta_hat = scale * ell.dot(&a1s);
    let ra = delta_hat_det / delta_det;
    let rb = delta_hat / delta;
    if (ra - rb).abs() > 1e-10 * rb.abs().max(1.0) {
        return Err(Error::Consistency {
            module: MODULE,
            message: format!("determinant and eigenvector paths disagree: {ra:.15e} vs {rb:.15e}"),
        });
    }
    Ok(Deltas {
        delta,
        delta_hat,
        delta_det,
        delta_hat_det,
        marginal: delta.abs() < MARGINAL_TOL || (delta * delta_hat).abs() < MARGINAL_TOL,
    })
}

pub fn delta(gas: &GasParams, shock: &ShockData) -> Result<f64> {
    Ok(deltas(gas, shock)?.delta)
}

pub fn delta_hat(gas: &GasParams, shock: &ShockData) -> Result<f64> {
    Ok(deltas(gas, shock)?.delta_hat)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Stable,
    Unstable,
    Marginal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneDimVerdict {
    pub verdict: Verdict,
    pub delta: f64,
    pub delta_hat: f64,
    pub product: f64,
    /// Hypotheses under which a positive product implies stability.
    pub assumptions: Vec<String>,
}

pub fn onedim_verdict(gas: &GasParams, shock: &ShockData) -> Result<OneDimVerdict> {
    let d = deltas(gas, shock)?;
    let product = d.product();
    let verdict = if product.abs() < MARGINAL_TOL {
        Verdict::Marginal
    } else if product > 0.0 {
        Verdict::Stable
    } else {
        Verdict::Unstable
    };
    Ok(OneDimVerdict {
        verdict,
        delta: d.delta,
        delta_hat: d.delta_hat,
        product,
        assumptions: vec![
            "limiting shock is spectrally stable".into(),
            "constant layer at the upstream state is spectrally stable".into(),
        ],
    })
}

/// Downstream matrices shared by all multi-dimensional evaluations.
#[derive(Debug, Clone)]
pub struct MultiD {
    pub gas: GasParams,
    pub shock: ShockData,
    pub a1: DMatrix<C64>,
    pub a2: DMatrix<C64>,
    pub a1_inv: DMatrix<C64>,
    pub jump_u: DVector<C64>,
    pub jump_f2: DVector<C64>,
    pub a1s: DVector<C64>,
}

/// Unstable basis of `calA_+` together with its complementary left
/// eigenvector.
#[derive(Debug, Clone)]
pub struct UnstableBasis {
    pub r: DMatrix<C64>,
    pub ell: DVector<C64>,
    pub stable_eigenvalue: C64,
    pub eigenvalues: Vec<C64>,
    /// Some eigenvalue sits on the imaginary axis within tolerance.
    pub glancing: bool,
}

fn to_c4(m: &Matrix4<f64>) -> DMatrix<C64> {
    DMatrix::from_fn(4, 4, |i, j| C64::new(m[(i, j)], 0.0))
}

fn to_cv4(v: &Vector4<f64>) -> DVector<C64> {
    DVector::from_fn(4, |i, _| C64::new(v[i], 0.0))
}

impl MultiD {
    pub fn new(gas: &GasParams, shock: &ShockData) -> Result<Self> {
        let a1 = gas_model::jacobian_f1(gas, &shock.state_plus)?;
        let a2 = gas_model::jacobian_f2(gas, &shock.state_plus)?;
        let a1_inv = a1.try_inverse().ok_or_else(|| {
            Error::numerical(MODULE, "downstream flux Jacobian is singular")
        })?;
        let cond = a1.norm() * a1_inv.norm();
        if cond > 1e12 {
            return Err(Error::numerical(
                MODULE,
                format!("downstream flux Jacobian is ill-conditioned (cond ~ {cond:.2e})"),
            ));
        }
        Ok(MultiD {
            gas: *gas,
            shock: *shock,
            a1: to_c4(&a1),
            a2: to_c4(&a2),
            a1_inv: to_c4(&a1_inv),
            jump_u: to_cv4(&jump_u(shock)),
            jump_f2: to_cv4(&jump_f2(gas, shock)?),
            a1s: to_cv4(&a1_minus_s(gas, shock)?),
        })
    }

    /// `(lambda I + i xi dF_2(U_+)) dF_1(U_+)^{-1}`.
    pub fn cal_a(&self, xi: f64, lambda: C64) -> DMatrix<C64> {
        let mut m = &self.a2 * (I * xi);
        for k in 0..4 {
            m[(k, k)] += lambda;
        }
        m * &self.a1_inv
    }

    /// Basis of the unstable subspace, continuously extended to
    /// `Re lambda = 0`.
    pub fn cal_r(&self, xi: f64, lambda: C64) -> Result<UnstableBasis> {
        if lambda.re < 0.0 {
            return Err(Error::domain(MODULE, "frequency must satisfy Re lambda >= 0"));
        }
        let scale = xi.abs().max(lambda.norm());
        if scale == 0.0 {
            return Err(Error::domain(MODULE, "frequency (xi, lambda) must be nonzero"));
        }
        let a = self.cal_a(xi, lambda);
        let mut schur = SchurForm::new(&a)?;
        schur.sort_by(|x, y| y.re.partial_cmp(&x.re).unwrap_or(std::cmp::Ordering::Equal));
        let ev = schur.eigenvalues();
        let anorm = a.norm().max(1e-300);
        let neutral_tol = 1e-8 * anorm;
        let mut glancing = false;
        let mut perturbed: Option<Vec<C64>> = None;
        let mut mask = Vec::with_capacity(4);
        for &mu in &ev {
            if mu.re.abs() > neutral_tol {
                mask.push(mu.re > 0.0);
                continue;
            }
            glancing = true;
            // on the axis: follow the eigenvalue into Re lambda > 0
            let pert = perturbed.get_or_insert_with(|| {
                let eps = 1e-6 * scale;
                let ap = self.cal_a(xi, lambda + C64::new(eps, 0.0));
                SchurForm::new(&ap)
                    .map(|s| s.eigenvalues())
                    .unwrap_or_default()
            });
            let nearest = pert
                .iter()
                .copied()
                .min_by(|p, q| {
                    (p - mu).norm().partial_cmp(&(q - mu).norm()).unwrap_or(std::cmp::Ordering::Equal)
                })
                .ok_or_else(|| Error::numerical(MODULE, "perturbed spectrum unavailable"))?;
            mask.push(nearest.re - mu.re > 0.0);
        }
        let k = schur.select_top(&mask);
        if k != 3 {
            return Err(Error::Consistency {
                module: MODULE,
                message: format!("unstable subspace has dimension {k}, expected 3"),
            });
        }
        let mut r = schur.leading(3);
        linalg::normalize_phase_columns(&mut r);
        let mut ell = schur.left_eigenvector(3);
        let pivot = ell[3];
        if pivot.norm() > 1e-12 {
            ell *= C64::new(self.gas.big_gamma, 0.0) / pivot;
        }
        Ok(UnstableBasis {
            r,
            ell,
            stable_eigenvalue: schur.t[(3, 3)],
            eigenvalues: schur.eigenvalues(),
            glancing,
        })
    }

    fn forcing(&self, xi: f64, lambda: C64) -> DVector<C64> {
        &self.jump_u * lambda + &self.jump_f2 * (I * xi)
    }

    /// `det(calR_+ | lambda [U] + i xi [F_2] + eta dF_1(U_-) S)` for a given
    /// basis.
    pub fn delta_hat_with(&self, basis: &DMatrix<C64>, xi: f64, lambda: C64, eta: f64) -> C64 {
        let f = self.forcing(xi, lambda) + &self.a1s * C64::new(eta, 0.0);
        linalg::det(&linalg::hcat_vec(basis, &f))
    }

    pub fn delta_md(&self, xi: f64, lambda: C64) -> Result<C64> {
        let b = self.cal_r(xi, lambda)?;
        Ok(self.delta_hat_with(&b.r, xi, lambda, 0.0))
    }

    pub fn delta_hat_md(&self, xi: f64, lambda: C64, eta: f64) -> Result<C64> {
        let b = self.cal_r(xi, lambda)?;
        Ok(self.delta_hat_with(&b.r, xi, lambda, eta))
    }

    /// `-Delta / det(calR_+ | dF_1(U_-) S)` for a given basis; `None` at a
    /// pole.
    pub fn eta_hat_with(&self, basis: &DMatrix<C64>, xi: f64, lambda: C64) -> Option<C64> {
        let num = self.delta_hat_with(basis, xi, lambda, 0.0);
        let den = linalg::det(&linalg::hcat_vec(basis, &self.a1s));
        let size = (xi.abs() + lambda.norm()) * self.jump_u.norm().max(self.jump_f2.norm());
        if den.norm() <= 1e-13 * size.max(self.a1s.norm()) {
            return None;
        }
        Some(-num / den)
    }

    pub fn eta_hat(&self, xi: f64, lambda: C64) -> Result<EtaHat> {
        let b = self.cal_r(xi, lambda)?;
        match self.eta_hat_with(&b.r, xi, lambda) {
            Some(v) => Ok(EtaHat::Value(v)),
            None => Ok(EtaHat::Pole),
        }
    }

    /// The same ratio through the left eigenvector.
    pub fn eta_hat_left(&self, xi: f64, lambda: C64) -> Result<C64> {
        let b = self.cal_r(xi, lambda)?;
        let f = self.forcing(xi, lambda);
        Ok(-linalg::bilinear(&b.ell, &f) / linalg::bilinear(&b.ell, &self.a1s))
    }

    pub fn bundle(&self, xi: f64, lambda: C64, eta: f64) -> Result<LopatinskiBundle> {
        let d = deltas(&self.gas, &self.shock)?;
        let r_plus_1d = r_plus(&self.gas, &self.shock.state_plus)?;
        let ell_1d = ell_plus_1d(&self.gas, &self.shock.state_plus)?;
        let b = self.cal_r(xi, lambda)?;
        let delta_md = self.delta_hat_with(&b.r, xi, lambda, 0.0);
        let delta_hat_md = self.delta_hat_with(&b.r, xi, lambda, eta);
        let eta_hat = self.eta_hat_with(&b.r, xi, lambda);
        Ok(LopatinskiBundle {
            xi,
            lambda,
            eta,
            r_plus: r_plus_1d.iter().copied().collect(),
            cal_r_plus: b.r.iter().copied().collect(),
            ell_plus_1d: ell_1d.iter().copied().collect(),
            ell_plus: b.ell.iter().copied().collect(),
            jump_u: jump_u(&self.shock).iter().copied().collect(),
            jump_f2: self.jump_f2.iter().map(|z| z.re).collect(),
            a1s: self.a1s.iter().map(|z| z.re).collect(),
            delta: d.delta,
            delta_hat: d.delta_hat,
            delta_md,
            delta_hat_md,
            eta_hat,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EtaHat {
    Value(C64),
    Pole,
}

impl EtaHat {
    pub fn value(self) -> Option<C64> {
        match self {
            EtaHat::Value(v) => Some(v),
            EtaHat::Pole => None,
        }
    }
}

/// Determinant values at one frequency with the bases that produced them.
/// Matrices are stored column-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LopatinskiBundle {
    pub xi: f64,
    pub lambda: C64,
    pub eta: f64,
    pub r_plus: Vec<f64>,
    pub cal_r_plus: Vec<C64>,
    pub ell_plus_1d: Vec<f64>,
    pub ell_plus: Vec<C64>,
    pub jump_u: Vec<f64>,
    pub jump_f2: Vec<f64>,
    pub a1s: Vec<f64>,
    pub delta: f64,
    pub delta_hat: f64,
    pub delta_md: C64,
    pub delta_hat_md: C64,
    pub eta_hat: Option<C64>,
}

pub fn cal_a_plus(gas: &GasParams, shock: &ShockData, xi: f64, lambda: C64) -> Result<DMatrix<C64>> {
    Ok(MultiD::new(gas, shock)?.cal_a(xi, lambda))
}

pub fn cal_r_plus(gas: &GasParams, shock: &ShockData, xi: f64, lambda: C64) -> Result<DMatrix<C64>> {
    Ok(MultiD::new(gas, shock)?.cal_r(xi, lambda)?.r)
}

/// Stable left eigenvector of `calA_+` (bilinear convention) and its
/// eigenvalue.
pub fn ell_plus_md(gas: &GasParams, shock: &ShockData, xi: f64, lambda: C64) -> Result<(DVector<C64>, C64)> {
    let b = MultiD::new(gas, shock)?.cal_r(xi, lambda)?;
    Ok((b.ell, b.stable_eigenvalue))
}

pub fn delta_md(gas: &GasParams, shock: &ShockData, xi: f64, lambda: C64) -> Result<C64> {
    MultiD::new(gas, shock)?.delta_md(xi, lambda)
}

pub fn delta_hat_md(gas: &GasParams, shock: &ShockData, xi: f64, lambda: C64, eta: f64) -> Result<C64> {
    MultiD::new(gas, shock)?.delta_hat_md(xi, lambda, eta)
}

pub fn eta_hat(gas: &GasParams, shock: &ShockData, xi: f64, lambda: C64) -> Result<EtaHat> {
    MultiD::new(gas, shock)?.eta_hat(xi, lambda)
}

/// Strong-shock limits from first principles (`e_- = 0`, `u_+ = u*`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstPrincipleLimits {
    pub c_plus: f64,
    pub e_plus: f64,
    pub ell_plus: Vector4<f64>,
    pub big_s: Vector4<f64>,
    pub a1s: Vector4<f64>,
    pub jump_u: Vector4<f64>,
    pub delta: f64,
    pub delta_hat: f64,
}

/// Reference closed forms of the strong-shock limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceLimits {
    pub c_plus: f64,
    pub ell_plus: Vector4<f64>,
    /// Direction for `phi` and for the complementary branch.
    pub big_s: Vector4<f64>,
    pub big_s_phi_small: Vector4<f64>,
    pub big_s_phi_large: Vector4<f64>,
    pub a1s: Vector4<f64>,
    pub jump_u: Vector4<f64>,
    pub delta: f64,
    pub delta_hat: f64,
    pub sigma: f64,
    pub phi_crit: Option<f64>,
    pub kinetic_phi: f64,
    pub kincrit_lhs: f64,
    pub kincrit_rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrongShockLimits {
    pub big_gamma: f64,
    pub phi: f64,
    pub first_principles: FirstPrincipleLimits,
    pub reference: ReferenceLimits,
}

pub fn strong_shock_limits(gas: &GasParams) -> StrongShockLimits {
    use closed_forms as cf;
    let g = gas.big_gamma;
    let phi = gas.phi;
    let us = g / (g + 2.0);
    let e_plus = 2.0 / ((g + 2.0) * (g + 2.0));
    let c = gas_model::sound_speed(gas, e_plus);
    let w_plus = PrimitiveState { rho: 1.0 / us, u: us, v: 0.0, e: e_plus };
    let w_minus = PrimitiveState { rho: 1.0, u: 1.0, v: 0.0, e: 0.0 };
    let ell = {
        let lt = nalgebra::RowVector4::new(g * e_plus, -w_plus.rho * c, 0.0, g * w_plus.rho);
        let (_, s_inv) = gas_model::coordinate_change(&w_plus).expect("positive density");
        let ell = (lt * s_inv).transpose();
        ell * (g / ell[3])
    };
    let big_s = profile::strong_shock_direction(gas);
    let a1 = {
        let (sm, si) = gas_model::coordinate_change(&w_minus).expect("positive density");
        let (mx, _) = gas_model::primitive_matrices(gas, &w_minus);
        sm * (Matrix4::identity() + mx) * si
    };
    let a1s = a1 * big_s;
    let jump = gas_model::primitive_to_conserved(&w_plus).to_vector()
        - gas_model::primitive_to_conserved(&w_minus).to_vector();
    let first = FirstPrincipleLimits {
        c_plus: c,
        e_plus,
        ell_plus: ell,
        big_s,
        a1s,
        jump_u: jump,
        delta: ell.dot(&jump),
        delta_hat: ell.dot(&a1s),
    };
    let (lhs, rhs) = cf::kinetic_criterion(g);
    let reference = ReferenceLimits {
        c_plus: c,
        ell_plus: cf::strong_ell_reference(g),
        big_s: cf::strong_direction_reference(phi),
        big_s_phi_small: cf::strong_direction_reference(phi.min(1.0)),
        big_s_phi_large: cf::strong_direction_reference(1.0),
        a1s: cf::strong_a1s_reference(g, phi),
        jump_u: cf::strong_jump_reference(g),
        delta: cf::strong_delta_reference(g),
        delta_hat: cf::strong_delta_hat_reference(g, phi),
        sigma: cf::sigma(g),
        phi_crit: cf::phi_crit(g),
        kinetic_phi: cf::kinetic_phi(g),
        kincrit_lhs: lhs,
        kincrit_rhs: rhs,
    };
    StrongShockLimits {
        big_gamma: g,
        phi,
        first_principles: first,
        reference,
    }
}

/// Collinearity residual of two complex 4-vectors.
pub fn collinearity(a: &DVector<C64>, b: &DVector<C64>) -> f64 {
    linalg::collinearity_residual(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas_model::kinetic_gas;

    #[test]
    fn ell_pattern() {
        let gas = kinetic_gas(1).unwrap();
        let s = profile::endstates(&gas, 0.5).unwrap();
        let ell = ell_plus_1d(&gas, &s.state_plus).unwrap();
        assert_eq!(ell[2], 0.0);
        assert!((ell[3] - gas.big_gamma).abs() < 1e-14);
    }

    #[test]
    fn paths_agree() {
        let gas = kinetic_gas(2).unwrap();
        for up in [0.3, 0.5, 0.8, 0.99] {
            let s = profile::endstates(&gas, up).unwrap();
            let d = deltas(&gas, &s).unwrap();
            assert!(d.delta > 0.0 && d.delta_det > 0.0);
            assert!((d.delta_hat / d.delta - d.delta_hat_det / d.delta_det).abs() < 1e-10);
        }
    }

    #[test]
    fn pure_lambda_reduces_to_one_dimension() {
        let gas = kinetic_gas(1).unwrap();
        let s = profile::endstates(&gas, 0.6).unwrap();
        let md = MultiD::new(&gas, &s).unwrap();
        let b = md.cal_r(0.0, crate::linalg::ONE).unwrap();
        let r = r_plus(&gas, &s.state_plus).unwrap();
        let rc = DMatrix::from_fn(4, 3, |i, j| C64::new(r[(i, j)], 0.0));
        assert!(linalg::subspace_distance(&b.r, &rc) < 1e-10);
    }
}
