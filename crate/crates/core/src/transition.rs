//! Sweeps over shock strength, the stability transition in `u_+`, and the
//! comparison of the algebraic verdict with the Evans stability index.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evans::{self, EvansOptions, IndexGrid};
use crate::gas_model::GasParams;
use crate::linalg::C64;
use crate::lopatinski::curve::{self, AxisVerdict, CurveOptions};
use crate::lopatinski::{self, MultiD, Verdict};
use crate::profile::{self, ProfileOptions};

const MODULE: &str = "transition";

/// `n` equally spaced points on `[u_min, u_max]`, validated against the
/// admissible range `(u*, 1)`.
pub fn u_grid(gas: &GasParams, u_min: f64, u_max: f64, n: usize) -> Result<Vec<f64>> {
    let us = profile::u_star(gas);
    if !(u_min > us && u_max < 1.0 && u_min <= u_max) {
        return Err(Error::Validation {
            module: MODULE,
            param: "u_min",
            message: format!("grid [{u_min}, {u_max}] must lie inside ({us}, 1)"),
        });
    }
    if n == 0 {
        return Err(Error::Validation {
            module: MODULE,
            param: "u_steps",
            message: "need at least one point".into(),
        });
    }
    if n == 1 {
        return Ok(vec![u_min]);
    }
    Ok((0..n)
        .map(|k| {
            if k == n - 1 {
                u_max
            } else {
                u_min + (u_max - u_min) * k as f64 / (n - 1) as f64
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub u_plus: f64,
    pub e_minus: Option<f64>,
    pub delta: Option<f64>,
    pub delta_hat: Option<f64>,
    pub verdict_1d: Option<Verdict>,
    pub eta_curve_verdict: Option<AxisVerdict>,
    pub evans_index: Option<i8>,
    /// Failure or skip reason for this point.
    pub note: Option<String>,
    /// Wall-clock seconds; not part of the emitted tables.
    #[serde(skip)]
    pub seconds: f64,
}

impl SweepRow {
    fn empty(u_plus: f64) -> Self {
        SweepRow {
            u_plus,
            e_minus: None,
            delta: None,
            delta_hat: None,
            verdict_1d: None,
            eta_curve_verdict: None,
            evans_index: None,
            note: None,
            seconds: 0.0,
        }
    }

    fn fail(&mut self, e: &Error) {
        self.note = Some(e.to_string());
    }
}

/// Evans settings for the optional index column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerSettings {
    /// Layer shift in units of the upstream decay length `1/|omega_-|`.
    pub x_factor: f64,
    pub profile: ProfileOptions,
    pub evans: EvansOptions,
    /// Overrides for the real index grid.
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    pub n_grid: Option<usize>,
}

impl Default for LayerSettings {
    fn default() -> Self {
        LayerSettings {
            x_factor: 8.0,
            profile: ProfileOptions::default(),
            evans: EvansOptions::default(),
            lambda_min: None,
            lambda_max: None,
            n_grid: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct SweepOptions {
    /// Evaluate the Evans index on every `k`-th point.
    pub evans_stride: Option<usize>,
    pub layer: LayerSettings,
}

/// A resolved boundary-layer problem at one shock strength.
pub struct Layer {
    pub system: evans::EvansSystem,
    pub x_shift: f64,
    pub grid: IndexGrid,
}

pub fn layer(gas: &GasParams, u_plus: f64, settings: &LayerSettings) -> Result<Layer> {
    let shock = profile::endstates(gas, u_plus)?;
    let om = profile::linearization_minus(gas, &shock).omega_minus.abs();
    let mut popts = settings.profile;
    popts.half_length = popts.half_length.max(12.0 / om);
    let prof = profile::solve_profile(gas, &shock, &popts)?;
    let system = evans::build_system(gas, &prof)?;
    let mut grid = IndexGrid::default_for(&system);
    if let Some(v) = settings.lambda_min {
        grid.lambda_min = v;
    }
    if let Some(v) = settings.lambda_max {
        grid.lambda_max = v;
    }
    if let Some(v) = settings.n_grid {
        grid.n = v;
    }
    Ok(Layer {
        system,
        x_shift: settings.x_factor / om,
        grid,
    })
}

fn row_1d(gas: &GasParams, u: f64, row: &mut SweepRow) -> Result<()> {
    let shock = profile::endstates(gas, u)?;
    row.e_minus = Some(shock.e_minus);
    let v = lopatinski::onedim_verdict(gas, &shock)?;
    row.delta = Some(v.delta);
    row.delta_hat = Some(v.delta_hat);
    row.verdict_1d = Some(v.verdict);
    Ok(())
}

/// One-dimensional verdicts along a grid of `u_+`, sorted by `u_+`.
pub fn sweep_1d(gas: &GasParams, u_grid: &[f64], opts: &SweepOptions) -> Vec<SweepRow> {
    let mut rows: Vec<SweepRow> = u_grid
        .par_iter()
        .enumerate()
        .map(|(k, &u)| {
            let t = Instant::now();
            let mut row = SweepRow::empty(u);
            if let Err(e) = row_1d(gas, u, &mut row) {
                row.fail(&e);
            } else if opts.evans_stride.is_some_and(|s| s > 0 && k % s == 0) {
                match layer(gas, u, &opts.layer)
                    .and_then(|l| evans::stability_index(&l.system, l.x_shift, &l.grid, &opts.layer.evans))
                {
                    Ok(ix) => row.evans_index = Some(ix.index),
                    Err(e) => row.fail(&e),
                }
            }
            row.seconds = t.elapsed().as_secs_f64();
            row
        })
        .collect();
    sort_rows(&mut rows);
    rows
}

fn sort_rows(rows: &mut [SweepRow]) {
    rows.sort_by(|a, b| a.u_plus.total_cmp(&b.u_plus));
}

/// Multi-dimensional curve verdicts at the points that are one-dimensionally
/// stable.
pub fn sweep_md(gas: &GasParams, u_grid: &[f64], curve_opts: &CurveOptions) -> Vec<SweepRow> {
    let mut rows: Vec<SweepRow> = u_grid
        .par_iter()
        .map(|&u| {
            let t = Instant::now();
            let mut row = SweepRow::empty(u);
            if let Err(e) = row_1d(gas, u, &mut row) {
                row.fail(&e);
            } else if row.verdict_1d != Some(Verdict::Stable) {
                row.note = Some(format!(
                    "skipped: one-dimensional verdict is {:?}",
                    row.verdict_1d.expect("set by row_1d")
                ));
            } else {
                let res = profile::endstates(gas, u)
                    .and_then(|s| MultiD::new(gas, &s))
                    .and_then(|md| curve::eta_curve_verdict(&md, curve_opts));
                match res {
                    Ok((_, v)) => row.eta_curve_verdict = Some(v),
                    Err(e) => row.fail(&e),
                }
            }
            row.seconds = t.elapsed().as_secs_f64();
            row
        })
        .collect();
    sort_rows(&mut rows);
    rows
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionResult {
    pub u_star_transition: f64,
    pub bracket: (f64, f64),
    pub residual: f64,
    /// Signs of `delta_hat` at the two ends of the bracket.
    pub side_signs: (i8, i8),
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum TransitionOutcome {
    Root(TransitionResult),
    NoTransition {
        bracket: (f64, f64),
        delta_hat: (f64, f64),
    },
}

fn dhat(gas: &GasParams, u: f64) -> Result<f64> {
    let s = profile::endstates(gas, u)?;
    lopatinski::delta_hat(gas, &s)
}

fn sgn(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Root of `delta_hat(u_+)` in `bracket` by bisection.
pub fn find_transition(gas: &GasParams, bracket: (f64, f64), tol: f64) -> Result<TransitionOutcome> {
    if !(tol > 0.0) {
        return Err(Error::Validation {
            module: MODULE,
            param: "tol",
            message: format!("must be positive, got {tol}"),
        });
    }
    let (mut a, mut b) = if bracket.0 <= bracket.1 { bracket } else { (bracket.1, bracket.0) };
    let fa0 = dhat(gas, a)?;
    let fb0 = dhat(gas, b)?;
    if fa0 == 0.0 || fb0 == 0.0 {
        let u = if fa0 == 0.0 { a } else { b };
        return Ok(TransitionOutcome::Root(TransitionResult {
            u_star_transition: u,
            bracket: (a, b),
            residual: 0.0,
            side_signs: (sgn(fa0), sgn(fb0)),
            iterations: 0,
        }));
    }
    if fa0.signum() == fb0.signum() {
        return Ok(TransitionOutcome::NoTransition {
            bracket: (a, b),
            delta_hat: (fa0, fb0),
        });
    }
    let mut fa = fa0;
    let mut iterations = 0;
    let mut mid = 0.5 * (a + b);
    loop {
        let fm = dhat(gas, mid)?;
        iterations += 1;
        if fm.abs() < tol || b - a <= 4.0 * f64::EPSILON * mid.abs() || iterations >= 200 {
            break;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
        mid = 0.5 * (a + b);
    }
    let residual = dhat(gas, mid)?.abs();
    if residual >= tol {
        return Err(Error::Numerical {
            module: MODULE,
            message: format!("bisection stalled at u_+ = {mid} with |delta_hat| = {residual:e}"),
        });
    }
    Ok(TransitionOutcome::Root(TransitionResult {
        u_star_transition: mid,
        bracket: (bracket.0.min(bracket.1), bracket.0.max(bracket.1)),
        residual,
        side_signs: (sgn(fa0), sgn(fb0)),
        iterations,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossOptions {
    pub layer: LayerSettings,
    /// Count zeros on the right half-plane contour as well.
    pub zero_count: bool,
    pub contour_points: usize,
    pub contour_shift: f64,
    /// Upper end of the real interval on which the shock Evans function is
    /// checked for a constant sign.
    pub shock_check_max: f64,
}

impl Default for CrossOptions {
    fn default() -> Self {
        CrossOptions {
            layer: LayerSettings::default(),
            zero_count: false,
            contour_points: 128,
            contour_shift: 1e-3,
            shock_check_max: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossRow {
    pub u_plus: f64,
    pub x_factor: f64,
    pub x_shift: Option<f64>,
    pub product: Option<f64>,
    pub verdict_1d: Option<Verdict>,
    pub index: Option<i8>,
    pub sign_changes: Option<usize>,
    pub zero_count: Option<i64>,
    /// `zero_count mod 2 == (1 - index) / 2`.
    pub parity_ok: Option<bool>,
    /// `index == sgn(delta delta_hat)`.
    pub signs_match: Option<bool>,
    pub constant_layer_sign_constant: Option<bool>,
    pub shock_sign_constant: Option<bool>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValidation {
    pub rows: Vec<CrossRow>,
    pub compared: usize,
    pub mismatches: usize,
    pub parity_mismatches: usize,
}

fn sign_constant(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[0] * w[1] > 0.0)
}

fn cross_row(gas: &GasParams, u: f64, xf: f64, opts: &CrossOptions) -> Result<CrossRow> {
    let shock = profile::endstates(gas, u)?;
    let v = lopatinski::onedim_verdict(gas, &shock)?;
    let mut settings = opts.layer;
    settings.x_factor = xf;
    let l = layer(gas, u, &settings)?;
    let ix = evans::stability_index(&l.system, l.x_shift, &l.grid, &settings.evans)?;

    let lams: Vec<C64> = l.grid.points()?.into_iter().map(|x| C64::new(x, 0.0)).collect();
    let path = evans::limiting_bases(&l.system, &lams)?;
    let e0 = evans::checked_boundary_kernel(settings.evans.boundary, 3)?;
    let d_minus: Vec<f64> = path
        .iter()
        .map(|b| evans::evans_constant(b, &e0).map(|d| d.re))
        .collect::<Result<_>>()?;
    let d_shock: Vec<f64> = path
        .par_iter()
        .filter(|b| b.lambda.re <= opts.shock_check_max)
        .map(|b| evans::evans_shock(&l.system, b, &settings.evans).map(|d| d.mantissa.re))
        .collect::<Result<_>>()?;

    let zc = if opts.zero_count {
        let contour = evans::Contour {
            shift: opts.contour_shift,
            radius: l.grid.lambda_max,
            n: opts.contour_points,
        };
        Some(evans::zero_count(&l.system, l.x_shift, &contour, &settings.evans)?.count)
    } else {
        None
    };
    let marginal = v.verdict == Verdict::Marginal;
    let signs_match = (!marginal && ix.index != 0).then(|| ix.index == sgn(v.product));
    let parity_ok = zc.map(|z| z.rem_euclid(2) == ((1 - ix.index as i64) / 2).rem_euclid(2));
    Ok(CrossRow {
        u_plus: u,
        x_factor: xf,
        x_shift: Some(l.x_shift),
        product: Some(v.product),
        verdict_1d: Some(v.verdict),
        index: Some(ix.index),
        sign_changes: Some(ix.sign_changes),
        zero_count: zc,
        parity_ok,
        signs_match,
        constant_layer_sign_constant: Some(sign_constant(&d_minus)),
        shock_sign_constant: Some(sign_constant(&d_shock)),
        note: None,
    })
}

/// Compare `sgn(delta delta_hat)` with the Evans stability index of the
/// shifted layer at each `(u_+, X)` sample.
pub fn cross_validate(gas: &GasParams, u_samples: &[f64], x_factors: &[f64], opts: &CrossOptions) -> CrossValidation {
    let jobs: Vec<(f64, f64)> = u_samples
        .iter()
        .flat_map(|&u| x_factors.iter().map(move |&x| (u, x)))
        .collect();
    let mut rows: Vec<CrossRow> = jobs
        .par_iter()
        .map(|&(u, xf)| {
            cross_row(gas, u, xf, opts).unwrap_or_else(|e| CrossRow {
                u_plus: u,
                x_factor: xf,
                x_shift: None,
                product: None,
                verdict_1d: None,
                index: None,
                sign_changes: None,
                zero_count: None,
                parity_ok: None,
                signs_match: None,
                constant_layer_sign_constant: None,
                shock_sign_constant: None,
                note: Some(e.to_string()),
            })
        })
        .collect();
    rows.sort_by(|a, b| a.u_plus.total_cmp(&b.u_plus).then(a.x_factor.total_cmp(&b.x_factor)));
    let compared = rows.iter().filter(|r| r.signs_match.is_some()).count();
    let mismatches = rows.iter().filter(|r| r.signs_match == Some(false)).count();
    let parity_mismatches = rows.iter().filter(|r| r.parity_ok == Some(false)).count();
    CrossValidation {
        rows,
        compared,
        mismatches,
        parity_mismatches,
    }
}
