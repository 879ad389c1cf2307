//! Comparison of the reference closed forms with first-principles numerics.

use nalgebra::{DVector, Vector4};
use serde::{Deserialize, Serialize};

use super::closed_forms as cf;
use super::{a1_minus_s, ell_plus_1d, strong_shock_limits, MultiD};
use crate::error::Result;
use crate::gas_model::{self, GasParams, PrimitiveState};
use crate::linalg::{self, C64};
use crate::profile;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AuditStatus {
    Confirmed { tol: f64 },
    Discrepant { details: String },
}

impl AuditStatus {
    pub fn is_confirmed(&self) -> bool {
        matches!(self, AuditStatus::Confirmed { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub id: String,
    pub description: String,
    pub status: AuditStatus,
    /// Relative residual between the closed form and the numeric value.
    pub residual: f64,
    pub closed_form: Vec<f64>,
    pub numeric: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub gamma: f64,
    pub phi: f64,
    /// Downstream velocity used for the entries at a finite-amplitude shock.
    pub u_plus: f64,
    pub entries: Vec<AuditEntry>,
}

impl AuditReport {
    pub fn entry(&self, id: &str) -> Option<&AuditEntry> {
        self.entries.iter().find(|e| e.id == id)
    }
}

fn rel(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt().max(1e-300);
    if den < 1e-14 {
        num
    } else {
        num / den
    }
}

fn entry(id: &str, description: &str, closed: Vec<f64>, numeric: Vec<f64>, tol: f64) -> AuditEntry {
    let residual = rel(&closed, &numeric);
    let status = if residual <= tol {
        AuditStatus::Confirmed { tol }
    } else {
        AuditStatus::Discrepant {
            details: format!("relative residual {residual:.3e} exceeds {tol:.1e}"),
        }
    };
    AuditEntry {
        id: id.into(),
        description: description.into(),
        status,
        residual,
        closed_form: closed,
        numeric,
    }
}

fn collinear_entry(id: &str, description: &str, closed: &DVector<C64>, numeric: &DVector<C64>, tol: f64) -> AuditEntry {
    let residual = linalg::collinearity_residual(closed, numeric);
    let flat = |v: &DVector<C64>| v.iter().flat_map(|z| [z.re, z.im]).collect::<Vec<_>>();
    let status = if residual <= tol {
        AuditStatus::Confirmed { tol }
    } else {
        AuditStatus::Discrepant {
            details: format!("collinearity residual {residual:.3e} exceeds {tol:.1e}"),
        }
    };
    AuditEntry {
        id: id.into(),
        description: description.into(),
        status,
        residual,
        closed_form: flat(closed),
        numeric: flat(numeric),
    }
}

fn v4(v: &Vector4<f64>) -> Vec<f64> {
    v.iter().copied().collect()
}

fn m4(m: &nalgebra::Matrix4<f64>) -> Vec<f64> {
    // row-major for readability
    (0..4).flat_map(|i| (0..4).map(move |j| m[(i, j)])).collect()
}

const TOL: f64 = 1e-10;

/// Audit at the midpoint shock `u_+ = (u* + 1)/2` and in the strong-shock
/// limit.
pub fn audit_report(gas: &GasParams) -> Result<AuditReport> {
    let us = profile::u_star(gas);
    let u_plus = 0.5 * (us + 1.0);
    audit_report_at(gas, u_plus)
}

pub fn audit_report_at(gas: &GasParams, u_plus: f64) -> Result<AuditReport> {
    let g = gas.big_gamma;
    let us = profile::u_star(gas);
    let shock = profile::endstates(gas, u_plus)?;
    let mut entries = Vec::new();

    let (em_alpha, ep_alpha) = profile::endstate_energies_alpha_form(gas, u_plus);
    entries.push(entry(
        "endstate_energies",
        "endstate energies through alpha against the direct Rankine-Hugoniot solution",
        vec![em_alpha, ep_alpha],
        vec![shock.e_minus, shock.e_plus],
        TOL,
    ));

    let w = PrimitiveState { rho: 1.3, u: 0.7, v: 0.4, e: 0.9 };
    let flux = gas_model::flux_x(gas, &gas_model::primitive_to_conserved(&w))?;
    entries.push(entry(
        "inviscid_x_flux",
        "x-flux (rho u, rho u^2 + p, rho v^2, rho u E) at a state with v != 0",
        v4(&cf::flux_x_reference(gas, &w)),
        v4(&flux),
        TOL,
    ));

    let a1m = gas_model::jacobian_f1(gas, &shock.state_minus)?;
    let (a1_first, a1_second) = cf::a1_minus_reference(gas, &shock);
    entries.push(entry(
        "upstream_flux_jacobian",
        "upstream flux Jacobian in terms of p_rho and p_e",
        m4(&a1_first),
        m4(&a1m),
        TOL,
    ));
    entries.push(entry(
        "upstream_flux_jacobian_gamma_law",
        "upstream flux Jacobian specialized to the gamma law",
        m4(&a1_second),
        m4(&a1m),
        TOL,
    ));

    let m = profile::m_minus(gas, &shock);
    entries.push(entry(
        "upstream_linearization_determinant",
        "determinant of the upstream linearization of the profile ODE",
        vec![profile::det_m_minus_formula(gas, &shock)],
        vec![m.determinant()],
        TOL,
    ));

    let lin = profile::linearization_minus(gas, &shock);
    let (om_ref, op_ref) = cf::omega_reference(gas, &shock);
    entries.push(entry(
        "upstream_rates",
        "eigenvalues of the upstream linearization",
        vec![om_ref, op_ref],
        vec![lin.omega_minus, lin.omega_plus],
        TOL,
    ));

    let s_ref = cf::s_reference(gas, &shock, lin.omega_minus);
    let s_num = lin.s_minus;
    entries.push(entry(
        "upstream_slow_eigenvector",
        "eigenvector of the upstream linearization for the slow rate",
        vec![s_ref[0], s_ref[1]],
        vec![s_num[0], s_num[1]],
        TOL,
    ));

    let asym = profile::asymptotic_direction(gas, &shock)?;
    let (s_prod, s_simpl) = cf::big_s_reference(gas, &shock, lin.omega_minus);
    entries.push(entry(
        "conservative_direction_product",
        "conservative tail direction as dU/d(u,e) times the eigenvector",
        v4(&(s_prod / s_prod[0])),
        v4(&asym.big_s),
        TOL,
    ));
    entries.push(entry(
        "conservative_direction_simplified",
        "simplified conservative tail direction",
        v4(&s_simpl),
        v4(&asym.big_s),
        TOL,
    ));

    let a1s = a1_minus_s(gas, &shock)?;
    entries.push(entry(
        "upstream_jacobian_times_direction",
        "dF_1(U_-) S in closed form",
        v4(&cf::a1s_reference(gas, &shock, lin.omega_minus)),
        v4(&a1s),
        TOL,
    ));

    entries.push(entry(
        "state_jump",
        "jump U_+ - U_- in closed form",
        v4(&cf::jump_u_reference(&shock)),
        v4(&shock.jump()),
        TOL,
    ));

    let wp = shock.primitive_plus();
    let ell = ell_plus_1d(gas, &shock.state_plus)?;
    let ell = ell * (g / ell[3]);
    let (ell_sym, ell_red) = cf::ell_plus_1d_reference(gas, &wp);
    entries.push(entry(
        "downstream_left_eigenvector",
        "left eigenvector for u - c in terms of p_rho, p_e",
        v4(&(ell_sym * (g / ell_sym[3]))),
        v4(&ell),
        TOL,
    ));
    entries.push(entry(
        "downstream_left_eigenvector_gamma_law",
        "left eigenvector for u - c specialized to the gamma law",
        v4(&ell_red),
        v4(&ell),
        TOL,
    ));

    let d = super::deltas(gas, &shock)?;
    entries.push(entry(
        "delta_hat_closed_form",
        "ell_+ . dF_1(U_-) S assembled from the closed forms",
        vec![cf::delta_hat_reference(gas, &shock, lin.omega_minus)],
        vec![d.delta_hat],
        TOL,
    ));

    // multi-dimensional left eigenvector, with both readings of theta
    let md = MultiD::new(gas, &shock)?;
    let xi = 1.0;
    let lambda = C64::new(0.5, 0.3);
    let basis = md.cal_r(xi, lambda)?;
    let (th_identity, th_stated) = cf::theta_readings(gas, &wp);
    entries.push(collinear_entry(
        "multid_left_eigenvector",
        "stable left eigenvector of calA_+ with theta = 2 Gamma e",
        &cf::ell_plus_md_reference(gas, &wp, xi, lambda, th_stated),
        &basis.ell,
        1e-8,
    ));
    entries.push(collinear_entry(
        "multid_left_eigenvector_theta_identity",
        "stable left eigenvector of calA_+ with theta = p_rho - p_e e / rho",
        &cf::ell_plus_md_reference(gas, &wp, xi, lambda, th_identity),
        &basis.ell,
        1e-8,
    ));

    let c_plus = gas_model::sound_speed(gas, wp.e);
    let beta = cf::beta_reference(c_plus, wp.u, xi, lambda);
    let omega = basis.stable_eigenvalue;
    entries.push(entry(
        "acoustic_root",
        "acoustic root of the downstream dispersion relation against the stable eigenvalue of calA_+",
        vec![beta.re, beta.im],
        vec![omega.re, omega.im],
        TOL,
    ));

    // strong-shock limit
    let lim = strong_shock_limits(gas);
    let fp = &lim.first_principles;
    let rf = &lim.reference;
    entries.push(entry(
        "strong_upstream_flux_jacobian",
        "upstream flux Jacobian at e_- = 0",
        m4(&cf::strong_a1_reference(g)),
        m4(&{
            let w0 = PrimitiveState { rho: 1.0, u: 1.0, v: 0.0, e: 0.0 };
            let (sm, si) = gas_model::coordinate_change(&w0)?;
            let (mx, _) = gas_model::primitive_matrices(gas, &w0);
            sm * (nalgebra::Matrix4::identity() + mx) * si
        }),
        TOL,
    ));
    entries.push(entry(
        "strong_conservative_direction",
        "limit of the conservative tail direction as u_+ -> u*",
        v4(&rf.big_s),
        v4(&fp.big_s),
        TOL,
    ));
    entries.push(entry(
        "strong_jacobian_times_direction",
        "limit of dF_1(U_-) S as u_+ -> u*",
        v4(&rf.a1s),
        v4(&fp.a1s),
        TOL,
    ));
    entries.push(entry(
        "strong_state_jump",
        "limit of the jump as u_+ -> u*",
        v4(&rf.jump_u),
        v4(&fp.jump_u),
        TOL,
    ));
    entries.push(entry(
        "strong_left_eigenvector",
        "limit of the downstream left eigenvector",
        v4(&rf.ell_plus),
        v4(&fp.ell_plus),
        TOL,
    ));
    entries.push(entry(
        "strong_delta",
        "limit of delta",
        vec![rf.delta],
        vec![fp.delta],
        TOL,
    ));
    entries.push(entry(
        "strong_delta_hat",
        "limit of delta_hat",
        vec![rf.delta_hat],
        vec![fp.delta_hat],
        TOL,
    ));

    // approach to the limit along the shock family
    let near = profile::endstates(gas, us + 1e-7)?;
    let dn = super::deltas(gas, &near)?;
    entries.push(entry(
        "strong_delta_hat_approach",
        "closed-form limit of delta_hat against delta_hat at u_+ = u* + 1e-7",
        vec![rf.delta_hat],
        vec![dn.delta_hat],
        1e-4,
    ));
    entries.push(entry(
        "strong_delta_hat_first_principles_approach",
        "first-principles limit of delta_hat against delta_hat at u_+ = u* + 1e-7",
        vec![fp.delta_hat],
        vec![dn.delta_hat],
        1e-4,
    ));

    // first-principles limit of delta_hat is 1 - phi * slope for phi < 1
    let c = fp.c_plus;
    let slope = g + 1.0 - g * us - c;
    match rf.phi_crit {
        Some(pc) => {
            entries.push(entry(
                "critical_phi_self_consistency",
                "closed-form limit of delta_hat vanishes at the closed-form critical phi",
                vec![cf::strong_delta_hat_reference(g, pc)],
                vec![0.0],
                1e-12,
            ));
            entries.push(entry(
                "critical_phi",
                "first-principles limit of delta_hat at the closed-form critical phi",
                vec![0.0],
                vec![1.0 - pc.min(1.0) * slope],
                TOL,
            ));
        }
        None => entries.push(AuditEntry {
            id: "critical_phi".into(),
            description: "closed-form critical phi is not applicable for this Gamma".into(),
            status: AuditStatus::Confirmed { tol: 0.0 },
            residual: 0.0,
            closed_form: vec![],
            numeric: vec![],
        }),
    }

    // phi >= 1: the closed form predicts delta_hat > 0 iff sqrt(2 Gamma (Gamma+1)) > 2
    let large_phi = g * us + c - g;
    let predicted = (2.0 * g * (g + 1.0)).sqrt() > 2.0;
    let agrees = predicted == (large_phi > 0.0);
    entries.push(AuditEntry {
        id: "strong_delta_hat_large_phi".into(),
        description: "sign of the limit of delta_hat for phi >= 1 predicted by sqrt(2 Gamma (Gamma+1)) > 2".into(),
        status: if agrees {
            AuditStatus::Confirmed { tol: 0.0 }
        } else {
            AuditStatus::Discrepant {
                details: format!(
                    "predicted {} but the first-principles limit is {large_phi:.6e}",
                    if predicted { "positive" } else { "negative" }
                ),
            }
        },
        residual: if agrees { 0.0 } else { 1.0 },
        closed_form: vec![(2.0 * g * (g + 1.0)).sqrt(), 2.0],
        numeric: vec![large_phi],
    });

    // the kinetic criterion predicts the sign of the limit at kinetic phi
    let (lhs, rhs) = (rf.kincrit_lhs, rf.kincrit_rhs);
    let phi_k = rf.kinetic_phi;
    let direct = cf::strong_delta_hat_reference(g, phi_k);
    let predicted_stable = lhs < rhs;
    let agrees = predicted_stable == (direct > 0.0);
    entries.push(AuditEntry {
        id: "kinetic_criterion".into(),
        description: "sign predicted by 16(Gamma+2) < (2Gamma+1)(1+15Gamma) against the closed-form limit of delta_hat at kinetic phi".into(),
        status: if agrees {
            AuditStatus::Confirmed { tol: 0.0 }
        } else {
            AuditStatus::Discrepant {
                details: format!(
                    "criterion predicts {} but the limit of delta_hat at phi = {phi_k:.6} is {direct:.6e}",
                    if predicted_stable { "stability" } else { "instability" }
                ),
            }
        },
        residual: if agrees { 0.0 } else { 1.0 },
        closed_form: vec![lhs, rhs],
        numeric: vec![phi_k, direct],
    });

    Ok(AuditReport {
        gamma: gas.gamma,
        phi: gas.phi,
        u_plus,
        entries,
    })
}
