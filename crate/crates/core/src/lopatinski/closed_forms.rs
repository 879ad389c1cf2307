//! Reference closed forms for the determinant ingredients and their
//! strong-shock limits.
//!
//! Only the audit evaluates these; it compares them with first-principles
//! values.

use nalgebra::{DVector, Matrix4, Vector4};

use crate::gas_model::{self, GasParams, PrimitiveState};
use crate::linalg::{C64, I};
use crate::profile::ShockData;

/// Inviscid x-flux in reference form: `(rho u, rho u^2 + p, rho v^2, rho u E)`.
pub fn flux_x_reference(gas: &GasParams, w: &PrimitiveState) -> Vector4<f64> {
    let p = gas_model::pressure(gas, w.rho, w.e);
    let etot = w.e + 0.5 * (w.u * w.u + w.v * w.v);
    Vector4::new(
        w.rho * w.u,
        w.rho * w.u * w.u + p,
        w.rho * w.v * w.v,
        w.rho * w.u * etot,
    )
}

/// Upstream flux Jacobian in two reference forms (symbolic in `p_rho`,
/// `p_e`, then specialized to the gamma law).
pub fn a1_minus_reference(gas: &GasParams, shock: &ShockData) -> (Matrix4<f64>, Matrix4<f64>) {
    let g = gas.big_gamma;
    let em = shock.e_minus;
    let p_rho = g * em;
    let p_e = g;
    #[rustfmt::skip]
    let first = Matrix4::new(
        0.0,                       1.0,        0.0, 0.0,
        p_rho - 1.0 + p_e / 2.0,   2.0 - p_e,  0.0, p_e,
        0.0,                       0.0,        1.0, 0.0,
        -0.5,                      0.5,        0.0, 1.0,
    );
    #[rustfmt::skip]
    let second = Matrix4::new(
        0.0,                       1.0,             0.0, 0.0,
        g * em - 1.0 + g / 2.0,    2.0 - g / 2.0,   0.0, g,
        0.0,                       0.0,             1.0, 0.0,
        -0.5,                      0.5,             0.0, 1.0,
    );
    (first, second)
}

/// Upstream rates with discriminant `D^2 + 4 Gamma e_- / ((2mu+eta2) nu)`.
pub fn omega_reference(gas: &GasParams, shock: &ShockData) -> (f64, f64) {
    let g = gas.big_gamma;
    let b = gas.b();
    let nu = gas.nu;
    let em = shock.e_minus;
    let d = (1.0 - g * em) / b - 1.0 / nu;
    let root = (d * d + 4.0 * g * em / (b * nu)).sqrt();
    (1.0 / nu + 0.5 * (d - root), 1.0 / nu + 0.5 * (d + root))
}

/// Eigenvector `(-1, -Gamma e_- / (nu (omega - 1/nu)))`.
pub fn s_reference(gas: &GasParams, shock: &ShockData, omega: f64) -> nalgebra::Vector2<f64> {
    let g = gas.big_gamma;
    nalgebra::Vector2::new(-1.0, -g * shock.e_minus / (gas.nu * (omega - 1.0 / gas.nu)))
}

/// Conservative direction: the product form and its
/// simplification.
pub fn big_s_reference(gas: &GasParams, shock: &ShockData, omega: f64) -> (Vector4<f64>, Vector4<f64>) {
    let em = shock.e_minus;
    let s = s_reference(gas, shock, omega);
    let product = Vector4::new(-s[0], 0.0, 0.0, (0.5 - em) * s[0] + s[1]);
    let g = gas.big_gamma;
    let k = gas.nu * (omega - 1.0 / gas.nu);
    let simplified = Vector4::new(1.0, 0.0, 0.0, em * (g - k) / k - 0.5);
    (product, simplified)
}

/// `A_1^- S` in reference form.
pub fn a1s_reference(gas: &GasParams, shock: &ShockData, omega: f64) -> Vector4<f64> {
    let g = gas.big_gamma;
    let nu = gas.nu;
    let em = shock.e_minus;
    let k1 = nu * (omega - 1.0 / nu);
    let kg = nu * (omega - g / nu);
    Vector4::new(
        0.0,
        g * em - 1.0 + g / 2.0 + g * em * (g - k1) / kg,
        0.0,
        em * (g - k1) / k1 - 1.0,
    )
}

/// Jump `[U]` in reference form.
pub fn jump_u_reference(shock: &ShockData) -> Vector4<f64> {
    let up = shock.u_plus;
    Vector4::new((1.0 - up) / up, 0.0, 0.0, (1.0 - up) / 2.0)
}

/// Downstream 1D left eigenvector: symbolic line and gamma-law line.
pub fn ell_plus_1d_reference(gas: &GasParams, w: &PrimitiveState) -> (Vector4<f64>, Vector4<f64>) {
    let g = gas.big_gamma;
    let c = gas_model::sound_speed_from_derivatives(gas, w.rho, w.e);
    let p_rho = g * w.e;
    let p_e = g * w.rho;
    let (rho, u, e) = (w.rho, w.u, w.e);
    let symbolic = Vector4::new(
        p_rho + c * u + p_e * (u * u / 2.0 - e) / rho,
        -p_e * u / rho - c,
        0.0,
        p_e / rho,
    );
    let reduced = Vector4::new(c * u + g * u * u / 2.0, -g * u - c, 0.0, g);
    (symbolic, reduced)
}

/// `hat delta` assembled from the reference pieces above.
pub fn delta_hat_reference(gas: &GasParams, shock: &ShockData, omega: f64) -> f64 {
    let g = gas.big_gamma;
    let c = gas_model::sound_speed(gas, shock.e_plus);
    let a = a1s_reference(gas, shock, omega);
    (-g * shock.u_plus - c) * a[1] + g * a[3]
}

pub fn c_plus_limit(g: f64) -> f64 {
    (2.0 * g * (g + 1.0)).sqrt() / (g + 2.0)
}

/// Strong-shock limit of the direction, `(1, 0, 0, 1/2 - min(1, phi))`.
pub fn strong_direction_reference(phi: f64) -> Vector4<f64> {
    Vector4::new(1.0, 0.0, 0.0, 0.5 - phi.min(1.0))
}

#[rustfmt::skip]
pub fn strong_a1_reference(g: f64) -> Matrix4<f64> {
    Matrix4::new(
        0.0,              1.0,           0.0, 0.0,
        -1.0 + g / 2.0,   2.0 - g / 2.0, 0.0, g,
        0.0,              0.0,           1.0, 0.0,
        -0.5,             0.5,           0.0, 1.0,
    )
}

pub fn strong_a1s_reference(g: f64, phi: f64) -> Vector4<f64> {
    Vector4::new(0.0, g * (1.0 - phi).max(0.0) - 1.0, 0.0, -phi.min(1.0))
}

pub fn strong_jump_reference(g: f64) -> Vector4<f64> {
    Vector4::new(2.0 / g, 0.0, 0.0, 1.0 / (g + 2.0))
}

pub fn strong_ell_reference(g: f64) -> Vector4<f64> {
    let r = (2.0 * g * (g + 1.0)).sqrt();
    let d = g + 2.0;
    Vector4::new(
        g * r / (d * d) + g.powi(3) / (2.0 * d * d),
        -g * g / d - g * r / d,
        0.0,
        g,
    )
}

pub fn strong_delta_hat_reference(g: f64, phi: f64) -> f64 {
    let r = (2.0 * g * (g + 1.0)).sqrt();
    let d = g + 2.0;
    (-g * g / d - g * r / d) * (g * (1.0 - phi).max(0.0) - 1.0) - g * phi.min(1.0)
}

pub fn strong_delta_reference(g: f64) -> f64 {
    let r = (2.0 * g * (g + 1.0)).sqrt();
    let d = g + 2.0;
    2.0 * r / (d * d) + g / (d * d) + g / d
}

/// `sigma = sqrt(2 Gamma (Gamma+1)) + Gamma`.
pub fn sigma(g: f64) -> f64 {
    (2.0 * g * (g + 1.0)).sqrt() + g
}

/// Critical `phi`; `None` where `Gamma (1 - sigma) + 2 <= 0`.
pub fn phi_crit(g: f64) -> Option<f64> {
    let s = sigma(g);
    let den = g * (1.0 - s) + 2.0;
    if den > 0.0 {
        Some(s * (1.0 - g) / den)
    } else {
        None
    }
}

/// `phi` of the kinetic approximation, `16 / (27 Gamma + 12)`.
pub fn kinetic_phi(g: f64) -> f64 {
    16.0 / (27.0 * g + 12.0)
}

/// Sides of the kinetic criterion `16 (Gamma + 2) < (2 Gamma + 1)(1 + 15 Gamma)`.
pub fn kinetic_criterion(g: f64) -> (f64, f64) {
    (16.0 * (g + 2.0), (2.0 * g + 1.0) * (1.0 + 15.0 * g))
}

/// `beta = (-u lambda - sqrt(lambda^2 + xi^2 (c^2 - u^2))) / (c^2 - u^2)`
/// with the principal root.
pub fn beta_reference(c: f64, u: f64, xi: f64, lambda: C64) -> C64 {
    let k = c * c - u * u;
    (-lambda * u - (lambda * lambda + xi * xi * k).sqrt()) / k
}

/// Multi-dimensional left eigenvector in reference form, with the first entry's
/// `theta` supplied by the caller.
pub fn ell_plus_md_reference(
    gas: &GasParams,
    w: &PrimitiveState,
    xi: f64,
    lambda: C64,
    theta: f64,
) -> DVector<C64> {
    let g = gas.big_gamma;
    let c = gas_model::sound_speed(gas, w.e);
    let u = w.u;
    let beta = beta_reference(c, u, xi, lambda);
    let root = (C64::new(xi * xi, 0.0) - beta * beta).sqrt();
    DVector::from_vec(vec![
        C64::new(theta, 0.0) - I * c * beta * u / root + g * u * u / beta,
        I * c * beta / root - g * u,
        C64::new(c * xi, 0.0) / root,
        C64::new(g, 0.0),
    ])
}

/// The two readings of `theta`: `p_rho - p_e e / rho` and `2 Gamma e`.
pub fn theta_readings(gas: &GasParams, w: &PrimitiveState) -> (f64, f64) {
    let g = gas.big_gamma;
    let p_rho = g * w.e;
    let p_e = g * w.rho;
    (p_rho - p_e * w.e / w.rho, 2.0 * g * w.e)
}
