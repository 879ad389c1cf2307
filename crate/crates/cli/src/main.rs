//! `shockline`: stability of viscous standing-shock boundary layers.

mod config;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use config::{EvansKind, Format, RunConfig};
use shockline_core::evans::{self, Contour, EvansOptions, IndexGrid};
use shockline_core::gas_model::{self, GasParams};
use shockline_core::io;
use shockline_core::linalg::C64;
use shockline_core::lopatinski::curve::{self, CurveOptions};
use shockline_core::lopatinski::{self, audit, MultiD};
use shockline_core::profile::{self, ProfileOptions};
use shockline_core::transition::{self, CrossOptions, LayerSettings, SweepOptions};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] shockline_core::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) if e.is_usage() => 2,
            CliError::Core(_) => 3,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(name = "shockline", version, about = "Spectral stability of ideal-gas Navier-Stokes boundary layers near a standing shock")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Upstream and downstream states of the standing shock (jump conditions, Lax inequalities)
    Endstates(RunConfig),
    /// Viscous shock profile connecting the endstates; CSV columns x, u_hat, e_hat
    Profile(RunConfig),
    /// One-dimensional determinants delta = det(R+, [U]) and delta_hat = det(R+, dF1(U-) S) with the verdict
    Deltas(RunConfig),
    /// Image of eta_hat(1, i tau) and its intersection with the nonnegative real axis; CSV columns tau, re_eta, im_eta
    Curve(RunConfig),
    /// Bisection for a sign change of delta_hat in u_+
    Transition(RunConfig),
    /// One-dimensional verdicts on a u_+ grid; CSV columns u_plus, e_minus, delta, delta_hat, verdict_1d, eta_curve_verdict, evans_index, note
    Sweep(RunConfig),
    /// Evans function of the boundary layer, shock or constant layer on the real axis; CSV columns lambda_re, lambda_im, D_re, D_im, log_scale
    Evans(RunConfig),
    /// Stability index of the shifted boundary layer, optionally with a zero count
    Index(RunConfig),
    /// Closed-form expressions checked against independent numerical evaluations
    Audit(RunConfig),
    /// Evans stability index against the sign of delta * delta_hat
    CrossValidate(RunConfig),
}

fn gas(c: &RunConfig) -> Result<GasParams> {
    if let Some(n) = c.n_atoms {
        if c.gamma.is_some() || c.mu.is_some() || c.eta2.is_some() || c.kappa.is_some() || c.cv.is_some() {
            return Err(CliError::Usage(
                "`n-atoms` selects a preset; drop the explicit gas constants".into(),
            ));
        }
        return Ok(gas_model::kinetic_gas(n)?);
    }
    let gamma = c
        .gamma
        .ok_or_else(|| CliError::Usage("specify the gas with `--n-atoms` or `--gamma`".into()))?;
    Ok(gas_model::make_gas(
        gamma,
        c.mu.unwrap_or(1.0),
        c.eta2.unwrap_or(0.0),
        c.kappa.unwrap_or(1.0),
        c.cv.unwrap_or(1.0),
    )?)
}

fn uplus(c: &RunConfig, g: &GasParams) -> Result<f64> {
    let u = c.uplus.ok_or_else(|| CliError::Usage("`uplus` is required".into()))?;
    let us = profile::u_star(g);
    if !(u > us && u < 1.0) {
        return Err(CliError::Usage(format!("`uplus` = {u} must lie in ({us}, 1)")));
    }
    Ok(u)
}

fn grid(c: &RunConfig, g: &GasParams, default_steps: usize) -> Result<Vec<f64>> {
    let us = profile::u_star(g);
    let lo = c.u_min.unwrap_or(us + 1e-3);
    let hi = c.u_max.unwrap_or(1.0 - 1e-3);
    Ok(transition::u_grid(g, lo, hi, c.u_steps.unwrap_or(default_steps))?)
}

fn profile_options(c: &RunConfig) -> ProfileOptions {
    let mut p = ProfileOptions::default();
    if let Some(x) = c.xmax {
        p.half_length = x;
    }
    if let Some(t) = c.tol {
        p.tol = t;
    }
    p
}

fn evans_options(c: &RunConfig) -> EvansOptions {
    EvansOptions {
        length: c.evans_length,
        ..EvansOptions::default()
    }
}

fn curve_options(c: &RunConfig) -> CurveOptions {
    let mut o = CurveOptions::default();
    if let Some(t) = c.tau_max {
        o.tau_max = t;
    }
    if let Some(t) = c.refine_tol {
        o.refine_tol = t;
    }
    o
}

fn layer_settings(c: &RunConfig) -> LayerSettings {
    LayerSettings {
        profile: {
            let mut p = profile_options(c);
            if c.xmax.is_none() {
                p.half_length = ProfileOptions::default().half_length;
            }
            p
        },
        evans: evans_options(c),
        lambda_min: c.lambda_min,
        lambda_max: c.lambda_max,
        n_grid: c.n_lambda,
        ..LayerSettings::default()
    }
}

/// Resolved layer with the translation from `--X` when given.
fn layer(c: &RunConfig, g: &GasParams, u: f64) -> Result<transition::Layer> {
    let mut l = transition::layer(g, u, &layer_settings(c))?;
    if let Some(x) = c.x_shift {
        l.x_shift = x;
    }
    Ok(l)
}

struct Output {
    body: String,
    summary: String,
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable report");
    s.push('\n');
    s
}

fn format_or(c: &RunConfig, default: Format, allowed: &[Format], cmd: &str) -> Result<Format> {
    let f = c.format.unwrap_or(default);
    if !allowed.contains(&f) {
        return Err(CliError::Usage(format!("`{cmd}` does not support format {f:?}")));
    }
    Ok(f)
}

fn cmd_endstates(c: &RunConfig) -> Result<Output> {
    let g = gas(c)?;
    let u = uplus(c, &g)?;
    let f = format_or(c, Format::Json, &[Format::Json, Format::Csv], "endstates")?;
    let s = profile::endstates(&g, u)?;
    let rh = profile::rh_residual(&g, &s)?;
    let lax = profile::is_lax_1_shock(&g, &s)?;
    let lin = profile::linearization_minus(&g, &s);
    let body = match f {
        Format::Json => to_json(&json!({
            "gas": g,
            "shock": s,
            "rh_residual": rh,
            "lax_1_shock": lax,
            "det_m_minus": lin.m_minus.determinant(),
            "omega_minus": lin.omega_minus,
        })),
        Format::Csv => format!(
            "u_plus,u_star,e_minus,e_plus,rho_plus,rh_residual,lax_1_shock\n{},{},{},{},{},{},{}\n",
            io::num(s.u_plus),
            io::num(s.u_star),
            io::num(s.e_minus),
            io::num(s.e_plus),
            io::num(s.rho_plus),
            io::num(rh),
            lax
        ),
    };
    Ok(Output {
        body,
        summary: format!(
            "endstates u_plus={} e_minus={} e_plus={} rh_residual={rh:e} lax_1_shock={lax}",
            s.u_plus, s.e_minus, s.e_plus
        ),
    })
}

fn cmd_profile(c: &RunConfig) -> Result<Output> {
    let g = gas(c)?;
    let u = uplus(c, &g)?;
    let f = format_or(c, Format::Csv, &[Format::Json, Format::Csv], "profile")?;
    let s = profile::endstates(&g, u)?;
    let mut opts = profile_options(c);
    if c.xmax.is_none() {
        let om = profile::linearization_minus(&g, &s).omega_minus.abs();
        opts.half_length = 12.0 / om;
    }
    let p = profile::solve_profile(&g, &s, &opts)?;
    let (el, er) = p.endpoint_errors();
    let body = match f {
        Format::Csv => io::profile_csv(&p),
        Format::Json => to_json(&p),
    };
    Ok(Output {
        body,
        summary: format!(
            "profile u_plus={u} points={} x_min={} x_max={} endpoint_error_minus={el:e} endpoint_error_plus={er:e} monotone={}",
            p.grid.len(),
            p.x_min(),
            p.x_max(),
            p.monotone
        ),
    })
}

fn cmd_deltas(c: &RunConfig) -> Result<Output> {
    let g = gas(c)?;
    let u = uplus(c, &g)?;
    let f = format_or(c, Format::Json, &[Format::Json, Format::Csv], "deltas")?;
    let s = profile::endstates(&g, u)?;
    let d = lopatinski::deltas(&g, &s)?;
    let v = lopatinski::onedim_verdict(&g, &s)?;
    let body = match f {
        Format::Json => to_json(&json!({
            "u_plus": u,
            "delta": d.delta,
            "delta_hat": d.delta_hat,
            "delta_det": d.delta_det,
            "delta_hat_det": d.delta_hat_det,
            "product": v.product,
            "verdict": v.verdict,
            "marginal": d.marginal,
            "assumptions": v.assumptions,
        })),
        Format::Csv => format!(
            "u_plus,delta,delta_hat,product,verdict\n{},{},{},{},{:?}\n",
            io::num(u),
            io::num(d.delta),
            io::num(d.delta_hat),
            io::num(v.product),
            v.verdict
        ),
    };
    Ok(Output {
        body,
        summary: format!(
            "deltas u_plus={u} delta={} delta_hat={} verdict={:?}",
            d.delta, d.delta_hat, v.verdict
        ),
    })
}

fn cmd_curve(c: &RunConfig) -> Result<Output> {
    let g = gas(c)?;
    let u = uplus(c, &g)?;
    let f = format_or(c, Format::Csv, &[Format::Json, Format::Csv], "curve")?;
    let s = profile::endstates(&g, u)?;
    let md = MultiD::new(&g, &s)?;
    let (cv, verdict) = curve::eta_curve_verdict(&md, &curve_options(c))?;
    let body = match f {
        Format::Csv => io::curve_csv(&cv),
        Format::Json => to_json(&json!({ "u_plus": u, "verdict": verdict, "curve": cv })),
    };
    Ok(Output {
        body,
        summary: format!(
            "curve u_plus={u} verdict={} points={} poles={} tail_residual={:e}",
            verdict.label(),
            cv.points.len(),
            cv.poles.len(),
            cv.tail_residual
        ),
    })
}

fn cmd_transition(c: &RunConfig) -> Result<Output> {
    let g = gas(c)?;
    format_or(c, Format::Json, &[Format::Json], "transition")?;
    let us = profile::u_star(&g);
    let a = c.u_min.unwrap_or(us + 1e-3);
    let b = c.u_max.unwrap_or(1.0 - 1e-3);
    if !(a > us && b < 1.0 && a < b) {
        return Err(CliError::Usage(format!("bracket [{a}, {b}] must lie inside ({us}, 1)")));
    }
    let out = transition::find_transition(&g, (a, b), c.tol.unwrap_or(1e-10))?;
    let summary = match &out {
        transition::TransitionOutcome::Root(r) => format!(
            "transition root u_plus={} residual={:e} iterations={}",
            r.u_star_transition, r.residual, r.iterations
        ),
        transition::TransitionOutcome::NoTransition { delta_hat, .. } => format!(
            "transition none delta_hat_low={} delta_hat_high={}",
            delta_hat.0, delta_hat.1
        ),
    };
    Ok(Output {
        body: to_json(&out),
        summary,
    })
}

fn cmd_sweep(c: &RunConfig) -> Result<Output> {
    let g = gas(c)?;
    let f = format_or(c, Format::Csv, &[Format::Json, Format::Csv], "sweep")?;
    let us = grid(c, &g, 50)?;
    let opts = SweepOptions {
        evans_stride: c.evans_stride,
        layer: layer_settings(c),
    };
    let mut rows = transition::sweep_1d(&g, &us, &opts);
    if c.md {
        let md = transition::sweep_md(&g, &us, &curve_options(c));
        for (r, m) in rows.iter_mut().zip(md) {
            r.eta_curve_verdict = m.eta_curve_verdict;
            if r.note.is_none() {
                r.note = m.note;
            }
        }
    }
    let stable = rows
        .iter()
        .filter(|r| r.verdict_1d == Some(lopatinski::Verdict::Stable))
        .count();
    let failed = rows.iter().filter(|r| r.delta.is_none()).count();
    let body = match f {
        Format::Csv => io::sweep_csv(&rows),
        Format::Json => to_json(&rows),
    };
    Ok(Output {
        body,
        summary: format!("sweep points={} stable={stable} failed={failed}", rows.len()),
    })
}

fn real_lambdas(c: &RunConfig, grid: &IndexGrid) -> Result<Vec<C64>> {
    let g = IndexGrid {
        lambda_min: c.lambda_min.unwrap_or(grid.lambda_min),
        lambda_max: c.lambda_max.unwrap_or(grid.lambda_max),
        n: c.n_lambda.unwrap_or(grid.n),
    };
    Ok(g.points()?.into_iter().map(|l| C64::new(l, 0.0)).collect())
}

fn cmd_evans(c: &RunConfig) -> Result<Output> {
    let g = gas(c)?;
    let u = uplus(c, &g)?;
    let f = format_or(c, Format::Csv, &[Format::Json, Format::Csv], "evans")?;
    let l = layer(c, &g, u)?;
    let eo = evans_options(c);
    let lams = real_lambdas(c, &l.grid)?;
    let path = evans::limiting_bases(&l.system, &lams)?;
    let e0 = evans::checked_boundary_kernel(eo.boundary, 3)?;
    let kind = c.function.unwrap_or(EvansKind::Boundary);
    let values: Vec<evans::EvansValue> = match kind {
        EvansKind::Boundary => path
            .iter()
            .map(|b| evans::evans_boundary(&l.system, b, &e0, l.x_shift, &eo))
            .collect::<std::result::Result<_, _>>()?,
        EvansKind::Shock => path
            .iter()
            .map(|b| evans::evans_shock(&l.system, b, &eo))
            .collect::<std::result::Result<_, _>>()?,
        EvansKind::Constant => path
            .iter()
            .map(|b| {
                evans::evans_constant(b, &e0).map(|d| evans::EvansValue {
                    lambda: b.lambda,
                    value: Some(d),
                    mantissa: d,
                    log_scale: 0.0,
                    shift: 0.0,
                    length_minus: 0.0,
                    length_plus: 0.0,
                })
            })
            .collect::<std::result::Result<_, _>>()?,
    };
    let changes = values
        .windows(2)
        .filter(|w| w[0].mantissa.re * w[1].mantissa.re < 0.0)
        .count();
    let body = match f {
        Format::Csv => io::evans_csv(&values),
        Format::Json => to_json(&values),
    };
    Ok(Output {
        body,
        summary: format!(
            "evans function={kind:?} u_plus={u} X={} points={} sign_changes={changes}",
            l.x_shift,
            values.len()
        ),
    })
}

fn cmd_index(c: &RunConfig) -> Result<Output> {
    let g = gas(c)?;
    let u = uplus(c, &g)?;
    format_or(c, Format::Json, &[Format::Json], "index")?;
    let l = layer(c, &g, u)?;
    let eo = evans_options(c);
    let ix = evans::stability_index(&l.system, l.x_shift, &l.grid, &eo)?;
    let zc = if c.zero_count {
        let contour = Contour {
            shift: 1e-3,
            radius: l.grid.lambda_max,
            n: c.contour_points.unwrap_or(128),
        };
        Some(evans::zero_count(&l.system, l.x_shift, &contour, &eo)?)
    } else {
        None
    };
    let s = profile::endstates(&g, u)?;
    let v = lopatinski::onedim_verdict(&g, &s)?;
    let body = to_json(&json!({
        "u_plus": u,
        "x_shift": l.x_shift,
        "grid": l.grid,
        "index": ix.index,
        "sign_low": ix.sign_low,
        "sign_high": ix.sign_high,
        "sign_changes": ix.sign_changes,
        "low_end_monotone": ix.low_end_monotone,
        "transverse_nonvanishing": ix.transverse_nonvanishing,
        "product_1d": v.product,
        "verdict_1d": v.verdict,
        "zero_count": zc,
    }));
    Ok(Output {
        body,
        summary: format!(
            "index u_plus={u} X={} index={} sign_changes={} zero_count={}",
            l.x_shift,
            ix.index,
            ix.sign_changes,
            zc.map(|z| z.count.to_string()).unwrap_or_else(|| "-".into())
        ),
    })
}

fn cmd_audit(c: &RunConfig) -> Result<Output> {
    let g = gas(c)?;
    format_or(c, Format::Json, &[Format::Json], "audit")?;
    let r = match c.uplus {
        Some(_) => audit::audit_report_at(&g, uplus(c, &g)?)?,
        None => audit::audit_report(&g)?,
    };
    let confirmed = r.entries.iter().filter(|e| e.status.is_confirmed()).count();
    Ok(Output {
        body: to_json(&r),
        summary: format!(
            "audit entries={} confirmed={confirmed} discrepant={}",
            r.entries.len(),
            r.entries.len() - confirmed
        ),
    })
}

fn cmd_cross(c: &RunConfig) -> Result<Output> {
    let g = gas(c)?;
    format_or(c, Format::Json, &[Format::Json], "cross-validate")?;
    let us = match c.uplus {
        Some(_) => vec![uplus(c, &g)?],
        None => grid(c, &g, 3)?,
    };
    let xf = c.x_factors.clone().unwrap_or_else(|| vec![8.0]);
    let opts = CrossOptions {
        layer: layer_settings(c),
        zero_count: c.zero_count,
        contour_points: c.contour_points.unwrap_or(128),
        ..CrossOptions::default()
    };
    let r = transition::cross_validate(&g, &us, &xf, &opts);
    Ok(Output {
        body: to_json(&r),
        summary: format!(
            "cross-validate samples={} compared={} mismatches={} parity_mismatches={}",
            r.rows.len(),
            r.compared,
            r.mismatches,
            r.parity_mismatches
        ),
    })
}

fn run(cli: Cli) -> Result<()> {
    let (cmd, c) = match cli.command {
        Command::Endstates(c) => ("endstates", c),
        Command::Profile(c) => ("profile", c),
        Command::Deltas(c) => ("deltas", c),
        Command::Curve(c) => ("curve", c),
        Command::Transition(c) => ("transition", c),
        Command::Sweep(c) => ("sweep", c),
        Command::Evans(c) => ("evans", c),
        Command::Index(c) => ("index", c),
        Command::Audit(c) => ("audit", c),
        Command::CrossValidate(c) => ("cross-validate", c),
    };
    let c = c.resolve()?;
    let out = match cmd {
        "endstates" => cmd_endstates(&c),
        "profile" => cmd_profile(&c),
        "deltas" => cmd_deltas(&c),
        "curve" => cmd_curve(&c),
        "transition" => cmd_transition(&c),
        "sweep" => cmd_sweep(&c),
        "evans" => cmd_evans(&c),
        "index" => cmd_index(&c),
        "audit" => cmd_audit(&c),
        _ => cmd_cross(&c),
    }?;
    match &c.output {
        Some(path) => {
            std::fs::write(path, &out.body)
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
            println!("{}", out.summary);
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(out.body.as_bytes())
                .map_err(|e| CliError::Usage(format!("cannot write output: {e}")))?;
            eprintln!("{}", out.summary);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
