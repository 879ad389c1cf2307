//! First-order form of the one-dimensional eigenvalue problem.
//!
//! With `W = (viscous flux) - dF_1 U` the linearized equations read
//! `W' = lambda U` together with two parabolic rows. The unknown is
//! `Z = (b u, nu e + b u_hat u, W_1, W_2, W_3)`.

use nalgebra::{DMatrix, Matrix3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas_model::{self, GasParams};
use crate::linalg::C64;
use crate::profile::{ProfileSolution, ShockData};

pub const DIM: usize = 5;
const MODULE: &str = "evans";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryType {
    DirichletInflow,
    DirichletOutflow,
}

/// Linear map `Z -> (rho, m, E)` at the state `(u, e)`, density `1/u`.
pub fn state_map(gas: &GasParams, u: f64, e: f64) -> nalgebra::SMatrix<f64, 3, 5> {
    let b = gas.b();
    let nu = gas.nu;
    let rho = 1.0 / u;
    let h = e + 0.5 * u * u;
    let du = [1.0 / b, 0.0, 0.0, 0.0, 0.0];
    let de = [-u / nu, 1.0 / nu, 0.0, 0.0, 0.0];
    let dm = [0.0, 0.0, -1.0, 0.0, 0.0];
    let mut t = nalgebra::SMatrix::<f64, 3, 5>::zeros();
    for j in 0..5 {
        let drho = (dm[j] - rho * du[j]) / u;
        t[(0, j)] = drho;
        t[(1, j)] = dm[j];
        t[(2, j)] = drho * h + rho * (de[j] + u * du[j]);
    }
    t
}

/// Real part and the `lambda` coefficient of the coefficient matrix.
pub fn coefficient_parts(gas: &GasParams, u: f64, e: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let t = state_map(gas, u, e);
    let a: Matrix3<f64> = gas_model::jacobian_f1_1d(gas, u, e);
    let at = a * t;
    let mut g0 = DMatrix::<f64>::zeros(DIM, DIM);
    let mut g1 = DMatrix::<f64>::zeros(DIM, DIM);
    for j in 0..DIM {
        g0[(0, j)] = at[(1, j)];
        g0[(1, j)] = at[(2, j)];
        for i in 0..3 {
            g1[(2 + i, j)] = t[(i, j)];
        }
    }
    g0[(0, 3)] += 1.0;
    g0[(1, 4)] += 1.0;
    (g0, g1)
}

pub fn coefficient_matrix(gas: &GasParams, u: f64, e: f64, lambda: C64) -> DMatrix<C64> {
    let (g0, g1) = coefficient_parts(gas, u, e);
    DMatrix::from_fn(DIM, DIM, |i, j| C64::new(g0[(i, j)], 0.0) + lambda * g1[(i, j)])
}

/// Trace of the coefficient matrix.
pub fn coefficient_trace(gas: &GasParams, u: f64, e: f64, lambda: C64) -> C64 {
    let (g0, g1) = coefficient_parts(gas, u, e);
    (0..DIM).map(|i| C64::new(g0[(i, i)], 0.0) + lambda * g1[(i, i)]).sum()
}

/// Eigenvalue problem along a resolved profile.
#[derive(Debug, Clone)]
pub struct EvansSystem {
    pub gas: GasParams,
    pub shock: ShockData,
    pub profile: ProfileSolution,
}

pub fn build_system(gas: &GasParams, profile: &ProfileSolution) -> Result<EvansSystem> {
    if !(gas.b() > 0.0 && gas.nu > 0.0) {
        return Err(Error::Domain {
            module: MODULE,
            message: "viscous block is not full rank (need 2 mu + eta2 > 0 and kappa > 0)".into(),
        });
    }
    if let Some(k) = profile.u.iter().position(|&u| !(u > 0.0)) {
        return Err(Error::Domain {
            module: MODULE,
            message: format!("profile reaches u <= 0 at x = {}", profile.grid[k]),
        });
    }
    Ok(EvansSystem {
        gas: *gas,
        shock: profile.shock,
        profile: profile.clone(),
    })
}

impl EvansSystem {
    pub fn g(&self, lambda: C64, x: f64) -> DMatrix<C64> {
        let p = self.profile.eval(x);
        coefficient_matrix(&self.gas, p.u, p.e, lambda)
    }

    pub fn trace(&self, lambda: C64, x: f64) -> C64 {
        let p = self.profile.eval(x);
        coefficient_trace(&self.gas, p.u, p.e, lambda)
    }

    pub fn g_minus(&self, lambda: C64) -> DMatrix<C64> {
        coefficient_matrix(&self.gas, 1.0, self.shock.e_minus, lambda)
    }

    pub fn g_plus(&self, lambda: C64) -> DMatrix<C64> {
        coefficient_matrix(&self.gas, self.shock.u_plus, self.shock.e_plus, lambda)
    }

    /// `Z` built from the profile derivative; solves the system at
    /// `lambda = 0`.
    pub fn translation_mode(&self, x: f64) -> ([f64; DIM], [f64; DIM]) {
        let p = self.profile.eval(x);
        let b = self.gas.b();
        let nu = self.gas.nu;
        let z = [b * p.du, nu * p.de + b * p.u * p.du, 0.0, 0.0, 0.0];
        let dz = [
            b * p.ddu,
            nu * p.dde + b * (p.du * p.du + p.u * p.ddu),
            0.0,
            0.0,
            0.0,
        ];
        (z, dz)
    }
}

/// Kernel of the boundary operator; inflow fixes `(u, e)` and `rho`,
/// outflow only `(u, e)`.
pub fn boundary_kernel(boundary: BoundaryType) -> DMatrix<C64> {
    let cols: &[usize] = match boundary {
        BoundaryType::DirichletInflow => &[3, 4],
        BoundaryType::DirichletOutflow => &[2, 3, 4],
    };
    DMatrix::from_fn(DIM, cols.len(), |i, j| {
        if i == cols[j] {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Kernel checked against the dimension of the decaying bundle.
pub fn checked_boundary_kernel(boundary: BoundaryType, stable_plus: usize) -> Result<DMatrix<C64>> {
    let e0 = boundary_kernel(boundary);
    if e0.ncols() + stable_plus != DIM {
        return Err(Error::Configuration {
            module: MODULE,
            message: format!(
                "{boundary:?} boundary has a {}-dimensional kernel but the decaying bundle is {stable_plus}-dimensional",
                e0.ncols()
            ),
        });
    }
    Ok(e0)
}
