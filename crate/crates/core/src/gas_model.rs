//! Ideal-gas thermodynamics, fluxes and flux Jacobians.

use nalgebra::{Matrix3, Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MODULE: &str = "gas_model";

/// Thermodynamic and viscous constants of a γ-law gas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasParams {
    pub gamma: f64,
    /// `gamma - 1`.
    pub big_gamma: f64,
    pub mu: f64,
    pub eta2: f64,
    pub kappa: f64,
    pub c_v: f64,
    /// `kappa / c_v`.
    pub nu: f64,
    /// `(2 mu + eta2) / nu`.
    pub phi: f64,
}

impl GasParams {
    /// Longitudinal viscosity `2 mu + eta2`.
    pub fn b(&self) -> f64 {
        2.0 * self.mu + self.eta2
    }

    /// Same gas with `(mu, eta2, kappa)` multiplied by `t`.
    pub fn rescale_viscosity(&self, t: f64) -> Result<GasParams> {
        make_gas(self.gamma, t * self.mu, t * self.eta2, t * self.kappa, self.c_v)
    }
}

fn invalid(param: &'static str, message: impl Into<String>) -> Error {
    Error::Validation {
        module: MODULE,
        param,
        message: message.into(),
    }
}

pub fn make_gas(gamma: f64, mu: f64, eta2: f64, kappa: f64, c_v: f64) -> Result<GasParams> {
    if !(gamma.is_finite() && gamma > 1.0) {
        return Err(invalid("gamma", format!("must satisfy gamma > 1, got {gamma}")));
    }
    if !(mu.is_finite() && eta2.is_finite() && mu > eta2.abs()) {
        return Err(invalid(
            "mu",
            format!("must satisfy mu > |eta2|, got mu = {mu}, eta2 = {eta2}"),
        ));
    }
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(invalid("kappa", format!("must satisfy kappa > 0, got {kappa}")));
    }
    if !(c_v.is_finite() && c_v > 0.0) {
        return Err(invalid("c_v", format!("must satisfy c_v > 0, got {c_v}")));
    }
    let nu = kappa / c_v;
    Ok(GasParams {
        gamma,
        big_gamma: gamma - 1.0,
        mu,
        eta2,
        kappa,
        c_v,
        nu,
        phi: (2.0 * mu + eta2) / nu,
    })
}

/// Kinetic-theory preset for an `n_atoms`-atomic gas with `mu = 1`.
pub fn kinetic_gas(n_atoms: u32) -> Result<GasParams> {
    if n_atoms < 1 {
        return Err(invalid("n_atoms", "must be at least 1"));
    }
    let n = n_atoms as f64;
    let gamma = (2.0 * n + 3.0) / (2.0 * n + 1.0);
    let mu = 1.0;
    let nu = (9.0 * gamma - 5.0) / 4.0 * mu;
    make_gas(gamma, mu, -2.0 / 3.0 * mu, nu, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveState {
    pub rho: f64,
    pub u: f64,
    pub v: f64,
    pub e: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservedState {
    pub rho: f64,
    pub m1: f64,
    pub m2: f64,
    pub etot: f64,
}

impl ConservedState {
    pub fn to_vector(&self) -> Vector4<f64> {
        Vector4::new(self.rho, self.m1, self.m2, self.etot)
    }

    pub fn from_vector(v: &Vector4<f64>) -> Self {
        ConservedState {
            rho: v[0],
            m1: v[1],
            m2: v[2],
            etot: v[3],
        }
    }
}

pub fn primitive_to_conserved(w: &PrimitiveState) -> ConservedState {
    ConservedState {
        rho: w.rho,
        m1: w.rho * w.u,
        m2: w.rho * w.v,
        etot: w.rho * (w.e + 0.5 * (w.u * w.u + w.v * w.v)),
    }
}

pub fn conserved_to_primitive(s: &ConservedState) -> Result<PrimitiveState> {
    if !(s.rho > 0.0) {
        return Err(Error::domain(MODULE, format!("density must be positive, got {}", s.rho)));
    }
    let u = s.m1 / s.rho;
    let v = s.m2 / s.rho;
    let e = s.etot / s.rho - 0.5 * (u * u + v * v);
    if !(e > 0.0) {
        return Err(Error::domain(
            MODULE,
            format!("internal energy must be positive, got {e}"),
        ));
    }
    Ok(PrimitiveState { rho: s.rho, u, v, e })
}

pub fn pressure(gas: &GasParams, rho: f64, e: f64) -> f64 {
    gas.big_gamma * rho * e
}

pub fn sound_speed(gas: &GasParams, e: f64) -> f64 {
    (gas.big_gamma * (gas.big_gamma + 1.0) * e).sqrt()
}

/// Sound speed from `sqrt(p p_e / rho^2 + p_rho)`.
pub fn sound_speed_from_derivatives(gas: &GasParams, rho: f64, e: f64) -> f64 {
    let p = pressure(gas, rho, e);
    let p_rho = gas.big_gamma * e;
    let p_e = gas.big_gamma * rho;
    (p * p_e / (rho * rho) + p_rho).sqrt()
}

pub fn flux_x(gas: &GasParams, s: &ConservedState) -> Result<Vector4<f64>> {
    let w = conserved_to_primitive(s)?;
    let p = pressure(gas, w.rho, w.e);
    Ok(Vector4::new(
        s.m1,
        s.m1 * w.u + p,
        s.m1 * w.v,
        w.u * (s.etot + p),
    ))
}

pub fn flux_y(gas: &GasParams, s: &ConservedState) -> Result<Vector4<f64>> {
    let w = conserved_to_primitive(s)?;
    let p = pressure(gas, w.rho, w.e);
    Ok(Vector4::new(
        s.m2,
        s.m2 * w.u,
        s.m2 * w.v + p,
        w.v * (s.etot + p),
    ))
}

/// `∂U/∂W` and its inverse, with `W = (rho, u, v, e)`.
pub fn coordinate_change(w: &PrimitiveState) -> Result<(Matrix4<f64>, Matrix4<f64>)> {
    if !(w.rho > 0.0) {
        return Err(Error::domain(MODULE, "coordinate change is singular at rho = 0"));
    }
    let (rho, u, v, e) = (w.rho, w.u, w.v, w.e);
    let q2 = u * u + v * v;
    #[rustfmt::skip]
    let s = Matrix4::new(
        1.0,            0.0,     0.0,     0.0,
        u,              rho,     0.0,     0.0,
        v,              0.0,     rho,     0.0,
        e + 0.5 * q2,   rho * u, rho * v, rho,
    );
    #[rustfmt::skip]
    let s_inv = Matrix4::new(
        1.0,                    0.0,      0.0,      0.0,
        -u / rho,               1.0 / rho, 0.0,     0.0,
        -v / rho,               0.0,      1.0 / rho, 0.0,
        (0.5 * q2 - e) / rho,   -u / rho, -v / rho, 1.0 / rho,
    );
    Ok((s, s_inv))
}

/// Quasilinear coefficient matrices `M_x`, `M_y` of the Euler equations in
/// `W` variables with the convective part removed.
pub fn primitive_matrices(gas: &GasParams, w: &PrimitiveState) -> (Matrix4<f64>, Matrix4<f64>) {
    let p = pressure(gas, w.rho, w.e);
    let p_rho = gas.big_gamma * w.e;
    let p_e = gas.big_gamma * w.rho;
    let rho = w.rho;
    #[rustfmt::skip]
    let mx = Matrix4::new(
        0.0,         rho,     0.0, 0.0,
        p_rho / rho, 0.0,     0.0, p_e / rho,
        0.0,         0.0,     0.0, 0.0,
        0.0,         p / rho, 0.0, 0.0,
    );
    #[rustfmt::skip]
    let my = Matrix4::new(
        0.0,         0.0, rho,     0.0,
        0.0,         0.0, 0.0,     0.0,
        p_rho / rho, 0.0, 0.0,     p_e / rho,
        0.0,         0.0, p / rho, 0.0,
    );
    (mx, my)
}

pub fn jacobian_f1(gas: &GasParams, s: &ConservedState) -> Result<Matrix4<f64>> {
    let w = conserved_to_primitive(s)?;
    let (sm, si) = coordinate_change(&w)?;
    let (mx, _) = primitive_matrices(gas, &w);
    Ok(sm * (Matrix4::identity() * w.u + mx) * si)
}

pub fn jacobian_f2(gas: &GasParams, s: &ConservedState) -> Result<Matrix4<f64>> {
    let w = conserved_to_primitive(s)?;
    let (sm, si) = coordinate_change(&w)?;
    let (_, my) = primitive_matrices(gas, &w);
    Ok(sm * (Matrix4::identity() * w.v + my) * si)
}

/// Jacobian of the one-dimensional flux `(m, m^2/rho + p, m(E + p)/rho)` in
/// `(rho, m, E)`.
pub fn jacobian_f1_1d(gas: &GasParams, u: f64, e: f64) -> Matrix3<f64> {
    let g = gas.big_gamma;
    let h = e + 0.5 * u * u + g * e;
    #[rustfmt::skip]
    let a = Matrix3::new(
        0.0,                           1.0,               0.0,
        -u * u + 0.5 * g * u * u,      (2.0 - g) * u,     g,
        u * (0.5 * g * u * u - h),     h - g * u * u,     (1.0 + g) * u,
    );
    a
}

/// Characteristic speeds `(u - c, u, u, u + c)` in the x direction.
pub fn char_speeds(gas: &GasParams, s: &ConservedState) -> Result<[f64; 4]> {
    let w = conserved_to_primitive(s)?;
    let c = sound_speed(gas, w.e);
    Ok([w.u - c, w.u, w.u, w.u + c])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        let g = kinetic_gas(1).unwrap();
        assert!((g.gamma - 5.0 / 3.0).abs() < 1e-15);
        assert!((g.phi - 16.0 / 30.0).abs() < 1e-14);
        let g = kinetic_gas(2).unwrap();
        assert!((g.gamma - 1.4).abs() < 1e-15);
        assert!((g.phi - 16.0 / 22.8).abs() < 1e-14);
        assert!(kinetic_gas(0).is_err());
        let mut last = f64::INFINITY;
        for n in 1..50 {
            let g = kinetic_gas(n).unwrap();
            assert!(g.gamma < last && g.gamma > 1.0);
            last = g.gamma;
        }
    }

    #[test]
    fn explicit_gas_and_rejection() {
        let g = make_gas(1.4, 1.0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(g.phi, 2.0);
        match make_gas(1.0, 1.0, 0.0, 1.0, 1.0) {
            Err(Error::Validation { param, .. }) => assert_eq!(param, "gamma"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(make_gas(1.4, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(make_gas(1.4, 1.0, 0.0, 0.0, 1.0).is_err());
        assert!(make_gas(1.4, 1.0, 0.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn pressure_and_sound_speed_values() {
        let g = kinetic_gas(1).unwrap();
        assert!((pressure(&g, 1.0, 1.5) - 1.0).abs() < 1e-15);
        assert!((pressure(&g, 4.0, 9.0 / 32.0) - 0.75).abs() < 1e-15);
        assert!((sound_speed(&g, 9.0 / 32.0) - 0.559_016_994_374_947_4).abs() < 1e-12);
        let g1 = make_gas(2.0, 1.0, 0.0, 1.0, 1.0).unwrap();
        assert!((sound_speed(&g1, 0.5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn flux_values() {
        let g = kinetic_gas(1).unwrap();
        let em = 0.1;
        let s = ConservedState { rho: 1.0, m1: 1.0, m2: 0.0, etot: em + 0.5 };
        let f = flux_x(&g, &s).unwrap();
        let gg = g.big_gamma;
        let want = Vector4::new(1.0, 1.0 + gg * em, 0.0, em + 0.5 + gg * em);
        assert!((f - want).norm() < 1e-15);
        let fy = flux_y(&g, &s).unwrap();
        assert!((fy - Vector4::new(0.0, 0.0, gg * em, 0.0)).norm() < 1e-15);
        let rest = ConservedState { rho: 2.0, m1: 0.0, m2: 0.0, etot: 1.0 };
        let f = flux_x(&g, &rest).unwrap();
        assert!((f - Vector4::new(0.0, gg, 0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn one_dimensional_jacobian_is_a_block() {
        let g = kinetic_gas(2).unwrap();
        let w = PrimitiveState { rho: 1.7, u: 0.4, v: 0.0, e: 0.9 };
        let a4 = jacobian_f1(&g, &primitive_to_conserved(&w)).unwrap();
        let a3 = jacobian_f1_1d(&g, w.u, w.e);
        let idx = [0usize, 1, 3];
        for (i, &ii) in idx.iter().enumerate() {
            for (j, &jj) in idx.iter().enumerate() {
                assert!((a3[(i, j)] - a4[(ii, jj)]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn speeds_of_rest_state() {
        let g = kinetic_gas(1).unwrap();
        let s = primitive_to_conserved(&PrimitiveState { rho: 1.0, u: 0.0, v: 0.0, e: 2.0 });
        let sp = char_speeds(&g, &s).unwrap();
        let c = sound_speed(&g, 2.0);
        assert_eq!(sp, [-c, 0.0, 0.0, c]);
    }
}
