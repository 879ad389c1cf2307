//! Tabular exports with lossless number formatting.

use crate::evans::EvansValue;
use crate::lopatinski::curve::EtaCurve;
use crate::profile::ProfileSolution;
use crate::transition::SweepRow;

/// Scientific notation with 17 significant digits.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

/// Columns `x, u_hat, e_hat`.
pub fn profile_csv(p: &ProfileSolution) -> String {
    table(
        &["x", "u_hat", "e_hat"],
        p.grid
            .iter()
            .zip(&p.u)
            .zip(&p.e)
            .map(|((x, u), e)| vec![num(*x), num(*u), num(*e)]),
    )
}

/// Columns `tau, re_eta, im_eta`; both value fields are empty at poles.
pub fn curve_csv(c: &EtaCurve) -> String {
    table(
        &["tau", "re_eta", "im_eta"],
        c.points.iter().map(|p| {
            vec![
                num(p.tau),
                opt(p.eta.map(|z| z.re)),
                opt(p.eta.map(|z| z.im)),
            ]
        }),
    )
}

/// Columns `lambda_re, lambda_im, D_re, D_im, log_scale`; the value is
/// `(D_re + i D_im) exp(log_scale)`.
pub fn evans_csv(values: &[EvansValue]) -> String {
    table(
        &["lambda_re", "lambda_im", "D_re", "D_im", "log_scale"],
        values.iter().map(|v| {
            vec![
                num(v.lambda.re),
                num(v.lambda.im),
                num(v.mantissa.re),
                num(v.mantissa.im),
                num(v.log_scale),
            ]
        }),
    )
}

/// Columns `u_plus, e_minus, delta, delta_hat, verdict_1d,
/// eta_curve_verdict, evans_index, note`.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    table(
        &[
            "u_plus",
            "e_minus",
            "delta",
            "delta_hat",
            "verdict_1d",
            "eta_curve_verdict",
            "evans_index",
            "note",
        ],
        rows.iter().map(|r| {
            vec![
                num(r.u_plus),
                opt(r.e_minus),
                opt(r.delta),
                opt(r.delta_hat),
                r.verdict_1d.map(|v| format!("{v:?}")).unwrap_or_default(),
                r.eta_curve_verdict.map(|v| v.label().to_string()).unwrap_or_default(),
                r.evans_index.map(|v| v.to_string()).unwrap_or_default(),
                r.note.clone().unwrap_or_default(),
            ]
        }),
    )
}
