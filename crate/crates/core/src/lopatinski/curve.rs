//! Tracing of `tau -> eta_hat(1, i tau)` and its intersection with the
//! nonnegative real axis.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::MultiD;
use crate::error::{Error, Result};
use crate::gas_model::GasParams;
use crate::linalg::{C64, I};
use crate::profile::ShockData;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveOptions {
    pub tau_max: f64,
    /// Uniform samples on `[0, tau_max]` before refinement.
    pub n_samples: usize,
    /// Neighbor jumps above `refine_tol * max(1, |eta|)` are bisected.
    pub refine_tol: f64,
    pub max_depth: usize,
    pub intersection_tol: f64,
}

impl Default for CurveOptions {
    fn default() -> Self {
        CurveOptions {
            tau_max: 50.0,
            n_samples: 201,
            refine_tol: 1e-2,
            max_depth: 12,
            intersection_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub tau: f64,
    /// `None` at a pole.
    pub eta: Option<C64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaCurve {
    /// Sorted by `tau` over `[-tau_max, tau_max]`.
    pub points: Vec<CurvePoint>,
    pub poles: Vec<f64>,
    /// `eta_hat(0, i)`, the slope of the asymptote.
    pub asymptote: Option<C64>,
    pub tail_residual: f64,
    /// Intervals still above the refinement threshold at the depth cap.
    pub unresolved: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AxisVerdict {
    Avoids,
    Intersects { tau: f64, eta: f64 },
    Marginal { tau: f64 },
}

impl AxisVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            AxisVerdict::Avoids => "Avoids",
            AxisVerdict::Intersects { .. } => "Intersects",
            AxisVerdict::Marginal { .. } => "Marginal",
        }
    }
}

fn jump_too_large(a: Option<C64>, b: Option<C64>, tol: f64) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => (a - b).norm() > tol * a.norm().max(b.norm()).max(1.0),
        (None, None) => false,
        _ => true,
    }
}

fn sign_change(a: Option<C64>, b: Option<C64>) -> bool {
    matches!((a, b), (Some(a), Some(b)) if a.im * b.im < 0.0)
}

fn refine<F>(f: &F, a: CurvePoint, b: CurvePoint, tol: f64, depth: usize, out: &mut Vec<CurvePoint>) -> usize
where
    F: Fn(f64) -> Option<C64>,
{
    if !(jump_too_large(a.eta, b.eta, tol) || sign_change(a.eta, b.eta)) {
        return 0;
    }
    if depth == 0 {
        return usize::from(jump_too_large(a.eta, b.eta, tol));
    }
    let tm = 0.5 * (a.tau + b.tau);
    let m = CurvePoint { tau: tm, eta: f(tm) };
    // a sign change is resolved as soon as the bracket is small
    if !jump_too_large(a.eta, b.eta, tol) && (b.tau - a.tau) < 1e-6 {
        return 0;
    }
    let left = refine(f, a, m, tol, depth - 1, out);
    out.push(m);
    left + refine(f, m, b, tol, depth - 1, out)
}

/// Adaptive sampling of a conjugation-symmetric curve on `[0, tau_max]`,
/// mirrored to negative `tau`.
pub fn trace_curve<F>(f: F, opts: &CurveOptions) -> Result<EtaCurve>
where
    F: Fn(f64) -> Option<C64> + Sync,
{
    if !(opts.tau_max > 0.0) || opts.n_samples < 2 {
        return Err(Error::Validation {
            module: "lopatinski",
            param: "tau_max",
            message: "need tau_max > 0 and at least two samples".into(),
        });
    }
    let n = opts.n_samples;
    let base: Vec<CurvePoint> = (0..n)
        .into_par_iter()
        .map(|k| {
            let tau = opts.tau_max * k as f64 / (n - 1) as f64;
            CurvePoint { tau, eta: f(tau) }
        })
        .collect();
    let panels: Vec<(Vec<CurvePoint>, usize)> = base
        .par_windows(2)
        .map(|w| {
            let mut out = Vec::new();
            let bad = refine(&f, w[0], w[1], opts.refine_tol, opts.max_depth, &mut out);
            (out, bad)
        })
        .collect();
    let mut half = vec![base[0]];
    let mut unresolved = 0;
    for (k, (extra, bad)) in panels.into_iter().enumerate() {
        half.extend(extra);
        half.push(base[k + 1]);
        unresolved += bad;
    }
    let mut points: Vec<CurvePoint> = half
        .iter()
        .skip(1)
        .rev()
        .map(|p| CurvePoint {
            tau: -p.tau,
            eta: p.eta.map(|z| z.conj()),
        })
        .collect();
    points.extend(half.iter().copied());
    let poles = points.iter().filter(|p| p.eta.is_none()).map(|p| p.tau).collect();
    Ok(EtaCurve {
        points,
        poles,
        asymptote: None,
        tail_residual: f64::NAN,
        unresolved,
    })
}

/// Sampled `eta_hat(1, i tau)`; fails when the tail certificate
/// `|eta_hat(1, i tau_max)/tau_max - eta_hat(0, i)| < refine_tol` is unmet.
pub fn trace_eta_curve(gas: &GasParams, shock: &ShockData, opts: &CurveOptions) -> Result<EtaCurve> {
    let md = MultiD::new(gas, shock)?;
    trace_eta_curve_with(&md, opts)
}

pub fn trace_eta_curve_with(md: &MultiD, opts: &CurveOptions) -> Result<EtaCurve> {
    let asym = md
        .eta_hat(0.0, I)?
        .value()
        .ok_or_else(|| Error::numerical("lopatinski", "eta_hat(0, i) is a pole"))?;
    let eval = |tau: f64| -> Option<C64> {
        let b = md.cal_r(1.0, C64::new(0.0, tau)).ok()?;
        md.eta_hat_with(&b.r, 1.0, C64::new(0.0, tau))
    };
    let mut curve = trace_curve(eval, opts)?;
    let end = curve
        .points
        .last()
        .and_then(|p| p.eta)
        .ok_or_else(|| Error::numerical("lopatinski", "eta_hat has a pole at tau_max"))?;
    let resid = (end / opts.tau_max - asym).norm();
    curve.asymptote = Some(asym);
    curve.tail_residual = resid;
    if !(resid < opts.refine_tol) {
        return Err(Error::Numerical {
            module: "lopatinski",
            message: format!(
                "tail certificate not met at tau_max = {} (residual {resid:.3e} >= {:.3e}); increase tau_max",
                opts.tau_max, opts.refine_tol
            ),
        });
    }
    Ok(curve)
}

fn classify(tau: f64, re: f64, tol: f64) -> Option<AxisVerdict> {
    if re > tol {
        Some(AxisVerdict::Intersects { tau, eta: re })
    } else if re.abs() <= tol {
        Some(AxisVerdict::Marginal { tau })
    } else {
        None
    }
}

/// Locate crossings of `Im eta = 0` and test whether any lies on the
/// nonnegative real axis. `eval` re-evaluates the curve for bisection.
pub fn curve_axis_intersection<F>(curve: &EtaCurve, eval: F, tol: f64) -> AxisVerdict
where
    F: Fn(f64) -> Option<C64>,
{
    let pts = &curve.points;
    let mut marginal: Option<AxisVerdict> = None;
    let note = |v: AxisVerdict, marginal: &mut Option<AxisVerdict>| -> Option<AxisVerdict> {
        match v {
            AxisVerdict::Intersects { .. } => Some(v),
            AxisVerdict::Marginal { .. } => {
                marginal.get_or_insert(v);
                None
            }
            AxisVerdict::Avoids => None,
        }
    };
    for (k, p) in pts.iter().enumerate() {
        match p.eta {
            Some(z) if z.im.abs() <= tol => {
                if let Some(v) = classify(p.tau, z.re, tol) {
                    if let Some(hit) = note(v, &mut marginal) {
                        return hit;
                    }
                }
            }
            None => {
                // pole: look at the nearest finite neighbors
                let left = pts[..k].iter().rev().find_map(|q| q.eta);
                let right = pts[k + 1..].iter().find_map(|q| q.eta);
                if let (Some(l), Some(r)) = (left, right) {
                    if l.im * r.im <= 0.0 && (l.re >= 0.0 || r.re >= 0.0) {
                        marginal.get_or_insert(AxisVerdict::Marginal { tau: p.tau });
                    }
                }
            }
            _ => {}
        }
    }
    for w in pts.windows(2) {
        let (Some(za), Some(zb)) = (w[0].eta, w[1].eta) else {
            continue;
        };
        if za.im.abs() <= tol || zb.im.abs() <= tol || za.im * zb.im > 0.0 {
            continue;
        }
        let (mut a, mut b) = (w[0].tau, w[1].tau);
        let mut ia = za.im;
        let mut hit = None;
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            let Some(zm) = eval(m) else {
                hit = Some(AxisVerdict::Marginal { tau: m });
                break;
            };
            if zm.im.abs() <= tol || (b - a) <= tol {
                hit = classify(m, zm.re, tol);
                break;
            }
            if zm.im * ia < 0.0 {
                b = m;
            } else {
                a = m;
                ia = zm.im;
            }
        }
        if let Some(v) = hit {
            if let Some(h) = note(v, &mut marginal) {
                return h;
            }
        }
    }
    marginal.unwrap_or(AxisVerdict::Avoids)
}

/// Trace and classify in one call.
pub fn eta_curve_verdict(md: &MultiD, opts: &CurveOptions) -> Result<(EtaCurve, AxisVerdict)> {
    let curve = trace_eta_curve_with(md, opts)?;
    let eval = |tau: f64| -> Option<C64> {
        let lam = C64::new(0.0, tau);
        let b = md.cal_r(1.0, lam).ok()?;
        md.eta_hat_with(&b.r, 1.0, lam)
    };
    let v = curve_axis_intersection(&curve, eval, opts.intersection_tol);
    Ok((curve, v))
}
