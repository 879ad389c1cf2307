//! Invariant subspaces of the limiting coefficient matrices, continued in
//! `lambda` by projector transport.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::system::{EvansSystem, DIM};
use crate::error::{Error, Result};
use crate::linalg::{self, SchurForm, C64};

const MODULE: &str = "evans";

/// Eigenvalues closer than this (relative) to the imaginary axis break the
/// splitting.
const SPLIT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisKind {
    EPlusStable,
    EMinusUnstable,
    FMinusStable,
    E0Boundary,
}

/// One of the three spectral splittings, with its projector.
#[derive(Debug, Clone)]
struct Split {
    basis: DMatrix<C64>,
    projector: DMatrix<C64>,
    /// Sum of the eigenvalues of the selected group.
    trace: C64,
    eigenvalues: Vec<C64>,
}

fn split(g: &DMatrix<C64>, unstable: bool, expected: usize) -> Result<Split> {
    let mut schur = SchurForm::new(g)?;
    if unstable {
        schur.sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap_or(Ordering::Equal));
    } else {
        schur.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap_or(Ordering::Equal));
    }
    let ev = schur.eigenvalues();
    let scale = g.norm().max(1e-300);
    if ev.iter().any(|z| z.re.abs() <= SPLIT_TOL * scale) {
        return Err(Error::numerical(
            MODULE,
            "limiting matrix has an eigenvalue on the imaginary axis; move the lambda path",
        ));
    }
    let count = ev
        .iter()
        .filter(|z| if unstable { z.re > 0.0 } else { z.re < 0.0 })
        .count();
    if count != expected {
        return Err(Error::Consistency {
            module: MODULE,
            message: format!(
                "{} subspace has dimension {count}, expected {expected}",
                if unstable { "unstable" } else { "stable" }
            ),
        });
    }
    let projector = schur.projector(expected)?;
    let trace = ev.iter().take(expected).sum();
    Ok(Split {
        basis: schur.leading(expected),
        projector,
        trace,
        eigenvalues: ev,
    })
}

/// Bases at one spectral parameter.
#[derive(Debug, Clone)]
pub struct LimitingBases {
    pub lambda: C64,
    /// Stable subspace of `G_+` (decaying at plus infinity).
    pub e_plus: DMatrix<C64>,
    /// Unstable subspace of `G_-` (decaying at minus infinity).
    pub e_minus: DMatrix<C64>,
    /// Stable subspace of `G_-`.
    pub f_minus: DMatrix<C64>,
    /// Sum of the stable eigenvalues of `G_+`.
    pub mu_plus: C64,
    /// Sum of the unstable eigenvalues of `G_-`.
    pub mu_minus: C64,
    pub eigenvalues_plus: Vec<C64>,
    pub eigenvalues_minus: Vec<C64>,
}

impl LimitingBases {
    pub fn basis(&self, kind: BasisKind) -> Option<&DMatrix<C64>> {
        match kind {
            BasisKind::EPlusStable => Some(&self.e_plus),
            BasisKind::EMinusUnstable => Some(&self.e_minus),
            BasisKind::FMinusStable => Some(&self.f_minus),
            BasisKind::E0Boundary => None,
        }
    }
}

struct Splits {
    e_plus: Split,
    e_minus: Split,
    f_minus: Split,
}

fn splits(sys: &EvansSystem, lambda: C64) -> Result<Splits> {
    let gp = sys.g_plus(lambda);
    let gm = sys.g_minus(lambda);
    let e_plus = split(&gp, false, 3)?;
    let e_minus = split(&gm, true, 2)?;
    let f_minus = split(&gm, false, DIM - 2)?;
    Ok(Splits { e_plus, e_minus, f_minus })
}

fn zero_imag(m: &mut DMatrix<C64>) {
    for z in m.iter_mut() {
        z.im = 0.0;
    }
}

fn orth(m: &DMatrix<C64>, real: bool) -> DMatrix<C64> {
    let mut q = linalg::orthonormalize(m);
    if real {
        zero_imag(&mut q);
        q = linalg::orthonormalize(&q);
    }
    q
}

fn assemble(lambda: C64, s: &Splits, e_plus: DMatrix<C64>, e_minus: DMatrix<C64>, f_minus: DMatrix<C64>) -> LimitingBases {
    LimitingBases {
        lambda,
        e_plus,
        e_minus,
        f_minus,
        mu_plus: s.e_plus.trace,
        mu_minus: s.e_minus.trace,
        eigenvalues_plus: s.e_plus.eigenvalues.clone(),
        eigenvalues_minus: s.e_minus.eigenvalues.clone(),
    }
}

/// Schur bases at a single point; made real when `lambda` is real.
pub fn bases_at(sys: &EvansSystem, lambda: C64) -> Result<LimitingBases> {
    let s = splits(sys, lambda)?;
    let real = lambda.im == 0.0;
    let fix = |m: &DMatrix<C64>| if real { linalg::realify(m) } else { m.clone() };
    Ok(assemble(
        lambda,
        &s,
        fix(&s.e_plus.basis),
        fix(&s.e_minus.basis),
        fix(&s.f_minus.basis),
    ))
}

const MAX_SUBDIVISION: usize = 12;

/// Transport `prev` (valid at `prev.lambda`) to `lambda`, subdividing the
/// segment while consecutive subspaces are far apart.
pub fn transport(sys: &EvansSystem, prev: &LimitingBases, lambda: C64) -> Result<LimitingBases> {
    transport_rec(sys, prev, lambda, 0)
}

fn transport_rec(sys: &EvansSystem, prev: &LimitingBases, lambda: C64, depth: usize) -> Result<LimitingBases> {
    let s = splits(sys, lambda)?;
    let real = lambda.im == 0.0 && prev.lambda.im == 0.0;
    let step = |p: &DMatrix<C64>, e: &DMatrix<C64>| orth(&(p * e), real);
    let ep = step(&s.e_plus.projector, &prev.e_plus);
    let em = step(&s.e_minus.projector, &prev.e_minus);
    let fm = step(&s.f_minus.projector, &prev.f_minus);
    let jump = linalg::subspace_distance(&ep, &prev.e_plus)
        .max(linalg::subspace_distance(&em, &prev.e_minus))
        .max(linalg::subspace_distance(&fm, &prev.f_minus));
    let degenerate = [&ep, &em, &fm]
        .iter()
        .any(|m| m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()));
    if jump > 0.3 || degenerate {
        if depth >= MAX_SUBDIVISION {
            return Err(Error::numerical(
                MODULE,
                format!("basis transport did not resolve near lambda = {lambda}; refine the path"),
            ));
        }
        let mid = 0.5 * (prev.lambda + lambda);
        let mid = if real { C64::new(mid.re, 0.0) } else { mid };
        let half = transport_rec(sys, prev, mid, depth + 1)?;
        return transport_rec(sys, &half, lambda, depth + 1);
    }
    Ok(assemble(lambda, &s, ep, em, fm))
}

/// Bases continued along a polyline of `lambda` values.
pub fn limiting_bases(sys: &EvansSystem, path: &[C64]) -> Result<Vec<LimitingBases>> {
    let mut out: Vec<LimitingBases> = Vec::with_capacity(path.len());
    for (k, &lam) in path.iter().enumerate() {
        let b = if k == 0 {
            bases_at(sys, lam)?
        } else {
            transport(sys, &out[k - 1], lam)?
        };
        out.push(b);
    }
    Ok(out)
}
