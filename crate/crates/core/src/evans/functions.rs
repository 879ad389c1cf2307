//! Evans functions of the constant layer, the shock and the boundary layer.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::bases::LimitingBases;
use super::system::{EvansSystem, DIM};
use super::EvansOptions;
use crate::error::{Error, Result};
use crate::linalg::{self, CompoundStencil, C64, ZERO};
use crate::ode::{self, Control, OdeOptions};

const MODULE: &str = "evans";

/// A value `mantissa * exp(log_scale)` with the data that fixed its
/// normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvansValue {
    pub lambda: C64,
    /// `None` when the product leaves the range of `f64`.
    pub value: Option<C64>,
    pub mantissa: C64,
    pub log_scale: f64,
    pub shift: f64,
    pub length_minus: f64,
    pub length_plus: f64,
}

impl EvansValue {
    fn new(lambda: C64, mantissa: C64, log_scale: f64, shift: f64, lm: f64, lp: f64) -> Result<Self> {
        if !(mantissa.re.is_finite() && mantissa.im.is_finite() && log_scale.is_finite()) {
            return Err(Error::Numerical {
                module: MODULE,
                message: format!("exterior vector left the floating-point range at lambda = {lambda}"),
            });
        }
        let v = mantissa * log_scale.exp();
        let value = (v.re.is_finite() && v.im.is_finite()).then_some(v);
        Ok(EvansValue {
            lambda,
            value,
            mantissa,
            log_scale,
            shift,
            length_minus: lm,
            length_plus: lp,
        })
    }

    pub fn checked(&self) -> Result<C64> {
        self.value.ok_or_else(|| Error::Numerical {
            module: MODULE,
            message: format!(
                "Evans value overflows at lambda = {} (log scale {:.3e}); use the mantissa and log scale",
                self.lambda, self.log_scale
            ),
        })
    }

    /// `ln |value|`, finite even when `value` overflows.
    pub fn ln_abs(&self) -> f64 {
        self.mantissa.norm().ln() + self.log_scale
    }
}

/// Exterior vector with its accumulated logarithmic scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledWedge {
    pub x: f64,
    pub wedge: DVector<C64>,
    pub log_scale: f64,
}

fn ode_opts(opts: &EvansOptions) -> OdeOptions {
    OdeOptions {
        rtol: opts.rtol,
        atol: opts.atol,
        h0: 1e-2,
        max_step: opts.max_step,
        max_steps: opts.max_steps,
    }
}

/// Integrate `y' = (G^(k)(lambda, x) - shift) y` from `x0` through the
/// monotone list `stops`.
///
/// The modulus is split off continuously: with `y = r w`, `|w| = 1`,
/// `w' = (A - Re<w, A w>) w` and `(ln r)' = Re<w, A w>`.
#[allow(clippy::too_many_arguments)]
pub fn propagate(
    sys: &EvansSystem,
    lambda: C64,
    init: &DVector<C64>,
    k: usize,
    shift: C64,
    x0: f64,
    stops: &[f64],
    opts: &EvansOptions,
) -> Result<Vec<ScaledWedge>> {
    let st = CompoundStencil::new(DIM, k);
    let dim = st.dim;
    let ode_opts = ode_opts(opts);
    let mut y = vec![0.0; 2 * dim + 1];
    let nrm0 = init.norm();
    for i in 0..dim {
        y[i] = init[i].re / nrm0;
        y[dim + i] = init[i].im / nrm0;
    }
    y[2 * dim] = nrm0.ln();
    let mut yc = vec![ZERO; dim];
    let mut fc = vec![ZERO; dim];
    let rhs = |x: f64, y: &[f64], f: &mut [f64], yc: &mut [C64], fc: &mut [C64]| {
        let g = sys.g(lambda, x);
        let mut nn = 0.0;
        for i in 0..dim {
            yc[i] = C64::new(y[i], y[dim + i]);
            nn += yc[i].norm_sqr();
        }
        st.apply(&g, yc, fc);
        let mut rq = 0.0;
        for i in 0..dim {
            fc[i] -= shift * yc[i];
            rq += (yc[i].conj() * fc[i]).re;
        }
        let rq = rq / nn;
        for i in 0..dim {
            let v = fc[i] - rq * yc[i];
            f[i] = v.re;
            f[dim + i] = v.im;
        }
        f[2 * dim] = rq;
    };
    let mut x = x0;
    let mut out = Vec::with_capacity(stops.len());
    for &stop in stops {
        if stop != x {
            ode::integrate(
                |xx, yy, ff| rhs(xx, yy, ff, &mut yc, &mut fc),
                x,
                &mut y,
                stop,
                &ode_opts,
                |_, _, _| Control::Continue,
            )?;
            x = stop;
        }
        let n = y[..2 * dim].iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::Numerical {
                module: MODULE,
                message: format!("exterior vector degenerated at x = {x}"),
            });
        }
        for v in y[..2 * dim].iter_mut() {
            *v /= n;
        }
        y[2 * dim] += n.ln();
        out.push(ScaledWedge {
            x,
            wedge: DVector::from_fn(dim, |i, _| C64::new(y[i], y[dim + i])),
            log_scale: y[2 * dim],
        });
    }
    Ok(out)
}

/// Integration lengths on the two sides.
pub fn lengths(sys: &EvansSystem, opts: &EvansOptions) -> (f64, f64) {
    if let Some(l) = opts.length {
        return (l, l);
    }
    let lin = crate::profile::linearization_minus(&sys.gas, &sys.shock);
    let lm = 12.0 / lin.omega_minus.abs();
    let lp = 12.0 / sys.profile.plus_rate.abs();
    (lm.max(sys.profile.half_length), lp.max(sys.profile.half_length))
}

/// Decaying bundle of `G_+` at the points `-x` for `x` in `shifts`
/// (with `0` first), normalized at plus infinity.
pub fn plus_bundle(
    sys: &EvansSystem,
    bases: &LimitingBases,
    shifts: &[f64],
    opts: &EvansOptions,
) -> Result<Vec<ScaledWedge>> {
    let (_, lp) = lengths(sys, opts);
    let init = linalg::wedge(&bases.e_plus);
    let stops: Vec<f64> = shifts.iter().map(|s| -s).collect();
    if stops.windows(2).any(|w| w[1] > w[0]) || stops.first().is_some_and(|&s| s > lp) {
        return Err(Error::Validation {
            module: MODULE,
            param: "X",
            message: "layer shifts must be nonnegative, increasing and below the integration length".into(),
        });
    }
    let mut out = propagate(sys, bases.lambda, &init, 3, bases.mu_plus, lp, &stops, opts)?;
    // undo the shift from lp to the stop so the bundle is normalized at +infinity
    for w in out.iter_mut() {
        let f = bases.mu_plus * w.x;
        let ph = C64::new(0.0, f.im).exp();
        w.wedge *= ph;
        w.log_scale += f.re;
    }
    Ok(out)
}

/// Growing bundle of `G_-` at `x = 0`, normalized at minus infinity.
pub fn minus_bundle(sys: &EvansSystem, bases: &LimitingBases, opts: &EvansOptions) -> Result<ScaledWedge> {
    let (lm, _) = lengths(sys, opts);
    let init = linalg::wedge(&bases.e_minus);
    let out = propagate(sys, bases.lambda, &init, 2, bases.mu_minus, -lm, &[0.0], opts)?;
    Ok(out.into_iter().next().expect("one stop"))
}

/// `det(E0, F-) / det(E-, F-)`.
pub fn evans_constant(bases: &LimitingBases, e0: &DMatrix<C64>) -> Result<C64> {
    let den = linalg::det(&linalg::hcat(&bases.e_minus, &bases.f_minus));
    if den.norm() < 1e-14 {
        return Err(Error::numerical(MODULE, "upstream bases are not transverse"));
    }
    Ok(linalg::det(&linalg::hcat(e0, &bases.f_minus)) / den)
}

/// The same quantity through the dual basis: the leading block of
/// `(E-, F-)^{-1} E0`.
pub fn evans_constant_dual(bases: &LimitingBases, e0: &DMatrix<C64>) -> Result<C64> {
    let m = linalg::hcat(&bases.e_minus, &bases.f_minus);
    let inv = m
        .try_inverse()
        .ok_or_else(|| Error::numerical(MODULE, "upstream bases are not transverse"))?;
    let k = bases.e_minus.ncols();
    let block = (inv * e0).rows(0, k).into_owned();
    Ok(linalg::det(&block))
}

/// `det(E-(0) | E+(0))`.
pub fn evans_shock(sys: &EvansSystem, bases: &LimitingBases, opts: &EvansOptions) -> Result<EvansValue> {
    let (lm, lp) = lengths(sys, opts);
    let zm = minus_bundle(sys, bases, opts)?;
    let zp = plus_bundle(sys, bases, &[0.0], opts)?.remove(0);
    let m = linalg::wedge_pairing(&zm.wedge, 2, &zp.wedge, DIM);
    EvansValue::new(bases.lambda, m, zm.log_scale + zp.log_scale, 0.0, lm, lp)
}

fn pair_boundary(e0: &DMatrix<C64>, w: &ScaledWedge) -> C64 {
    linalg::wedge_pairing(&linalg::wedge(e0), e0.ncols(), &w.wedge, DIM)
}

/// `det(E0 | E+(-X))` for the layer shifted by `X`.
pub fn evans_boundary(
    sys: &EvansSystem,
    bases: &LimitingBases,
    e0: &DMatrix<C64>,
    x_shift: f64,
    opts: &EvansOptions,
) -> Result<EvansValue> {
    let (lm, lp) = lengths(sys, opts);
    let w = plus_bundle(sys, bases, &[x_shift], opts)?.remove(0);
    EvansValue::new(bases.lambda, pair_boundary(e0, &w), w.log_scale, x_shift, lm, lp)
}

/// Boundary Evans function at several shifts from a single integration.
pub fn evans_boundary_multi(
    sys: &EvansSystem,
    bases: &LimitingBases,
    e0: &DMatrix<C64>,
    shifts: &[f64],
    opts: &EvansOptions,
) -> Result<Vec<EvansValue>> {
    let (lm, lp) = lengths(sys, opts);
    let ws = plus_bundle(sys, bases, shifts, opts)?;
    ws.iter()
        .zip(shifts)
        .map(|(w, &s)| EvansValue::new(bases.lambda, pair_boundary(e0, w), w.log_scale, s, lm, lp))
        .collect()
}

/// `exp(int_0^{-X} Tr G) * exp(mu_- X)`.
pub fn beta_factor(sys: &EvansSystem, bases: &LimitingBases, x_shift: f64) -> Result<C64> {
    Ok(beta_exponent(sys, bases, x_shift)?.exp())
}

/// Logarithm of [`beta_factor`], analytic in `lambda`.
pub fn beta_exponent(sys: &EvansSystem, bases: &LimitingBases, x_shift: f64) -> Result<C64> {
    if x_shift == 0.0 {
        return Ok(ZERO);
    }
    let lambda = bases.lambda;
    let opts = OdeOptions {
        rtol: 1e-13,
        atol: 1e-14,
        h0: 1e-2,
        max_step: 0.5,
        max_steps: 1_000_000,
    };
    let mut y = [0.0, 0.0];
    ode::integrate(
        |x, _, f| {
            let t = sys.trace(lambda, x);
            f[0] = t.re;
            f[1] = t.im;
        },
        0.0,
        &mut y,
        -x_shift,
        &opts,
        |_, _, _| Control::Continue,
    )?;
    let integral = C64::new(y[0], y[1]);
    Ok(integral + bases.mu_minus * x_shift)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorizationRow {
    pub x_shift: f64,
    pub d_boundary: C64,
    pub beta: C64,
    pub d_constant: C64,
    pub d_shock: C64,
    /// `D_X / (beta D_- D)`.
    pub ratio: C64,
    /// `ratio / ratio(X_max)`.
    pub relative: C64,
}

/// Compare the boundary-layer Evans function with the product of the
/// constant-layer and shock Evans functions.
pub fn factorization_check(
    sys: &EvansSystem,
    bases: &LimitingBases,
    e0: &DMatrix<C64>,
    shifts: &[f64],
    opts: &EvansOptions,
) -> Result<Vec<FactorizationRow>> {
    let mut all = vec![0.0];
    all.extend_from_slice(shifts);
    let ws = plus_bundle(sys, bases, &all, opts)?;
    let zm = minus_bundle(sys, bases, opts)?;
    let (lm, lp) = lengths(sys, opts);
    let d_shock = EvansValue::new(
        bases.lambda,
        linalg::wedge_pairing(&zm.wedge, 2, &ws[0].wedge, DIM),
        zm.log_scale + ws[0].log_scale,
        0.0,
        lm,
        lp,
    )?
    .checked()?;
    let d_constant = evans_constant(bases, e0)?;
    let mut rows = Vec::with_capacity(shifts.len());
    for (w, &s) in ws.iter().skip(1).zip(shifts) {
        let d = EvansValue::new(bases.lambda, pair_boundary(e0, w), w.log_scale, s, lm, lp)?.checked()?;
        let beta = beta_factor(sys, bases, s)?;
        let ratio = d / (beta * d_constant * d_shock);
        rows.push(FactorizationRow {
            x_shift: s,
            d_boundary: d,
            beta,
            d_constant,
            d_shock,
            ratio,
            relative: ratio,
        });
    }
    if let Some(last) = rows.last().map(|r| r.ratio) {
        for r in rows.iter_mut() {
            r.relative = r.ratio / last;
        }
    }
    Ok(rows)
}
