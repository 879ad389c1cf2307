//! Adaptive Dormand-Prince 5(4) integrator for real systems.
//!
//! Complex systems are integrated by stacking real and imaginary parts.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h0: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            h0: 1e-3,
            max_step: f64::INFINITY,
            max_steps: 1_000_000,
        }
    }
}

/// Returned by the step observer to continue or stop early.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    /// Final abscissa actually reached.
    pub x: f64,
    pub stopped: bool,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrate `y' = f(x, y)` from `x0` to `x_end` (either direction).
///
/// `observer(x, y, f)` is called at the initial point and after every
/// accepted step; returning [`Control::Stop`] ends the integration there.
/// `y` holds the final state on return.
pub fn integrate<F, O>(
    mut f: F,
    x0: f64,
    y: &mut [f64],
    x_end: f64,
    opts: &OdeOptions,
    mut observer: O,
) -> Result<OdeStats>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    O: FnMut(f64, &[f64], &[f64]) -> Control,
{
    let n = y.len();
    let dir = if x_end >= x0 { 1.0 } else { -1.0 };
    let mut stats = OdeStats {
        x: x0,
        ..Default::default()
    };
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut ytmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];

    let mut x = x0;
    f(x, y, &mut k1);
    stats.evaluations += 1;
    if observer(x, y, &k1) == Control::Stop {
        stats.stopped = true;
        return Ok(stats);
    }
    if x == x_end {
        return Ok(stats);
    }
    let mut h = opts.h0.min(opts.max_step).min((x_end - x0).abs());
    let mut fac_old: f64 = 1e-4;

    while dir * (x_end - x) > 0.0 {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::numerical(
                "ode",
                format!("step limit {} reached at x = {x:.6e}", opts.max_steps),
            ));
        }
        let mut last = false;
        if h >= (x_end - x).abs() {
            h = (x_end - x).abs();
            last = true;
        }
        if h < 1e-14 * x.abs().max(1.0) {
            return Err(Error::numerical(
                "ode",
                format!("step size underflow at x = {x:.6e}"),
            ));
        }
        let hs = dir * h;
        for i in 0..n {
            ytmp[i] = y[i] + hs * A21 * k1[i];
        }
        f(x + C2 * hs, &ytmp, &mut k2);
        for i in 0..n {
            ytmp[i] = y[i] + hs * (A31 * k1[i] + A32 * k2[i]);
        }
        f(x + C3 * hs, &ytmp, &mut k3);
        for i in 0..n {
            ytmp[i] = y[i] + hs * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f(x + C4 * hs, &ytmp, &mut k4);
        for i in 0..n {
            ytmp[i] = y[i] + hs * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f(x + C5 * hs, &ytmp, &mut k5);
        for i in 0..n {
            ytmp[i] = y[i]
                + hs * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let xnew = if last { x_end } else { x + hs };
        f(xnew, &ytmp, &mut k6);
        for i in 0..n {
            ynew[i] = y[i] + hs * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        f(xnew, &ynew, &mut k7);
        stats.evaluations += 6;

        let mut err = 0.0;
        for i in 0..n {
            let e = hs
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(ynew[i].abs());
            err += (e / sc) * (e / sc);
        }
        let err = (err / n as f64).sqrt();
        if !err.is_finite() {
            stats.rejected += 1;
            h *= 0.1;
            continue;
        }

        if err <= 1.0 {
            // PI step-size control
            let fac = (err.max(1e-10)).powf(0.17) / fac_old.powf(0.04) / 0.9;
            let fac = fac.clamp(0.2, 10.0);
            fac_old = err.max(1e-4);
            x = xnew;
            y.copy_from_slice(&ynew);
            k1.copy_from_slice(&k7);
            stats.accepted += 1;
            stats.x = x;
            if observer(x, y, &k1) == Control::Stop {
                stats.stopped = true;
                return Ok(stats);
            }
            h = (h / fac).min(opts.max_step);
        } else {
            stats.rejected += 1;
            let fac = (err.powf(0.2) / 0.9).min(5.0);
            h /= fac;
        }
    }
    stats.x = x;
    Ok(stats)
}
