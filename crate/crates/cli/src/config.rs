//! Run configuration: command-line flags layered over a `key = value` file.

use std::path::PathBuf;

use clap::{Args, ValueEnum};

use crate::CliError;

/// Decimal or `p/q` rational.
pub fn parse_num(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
            let q: f64 = q.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
            p / q
        }
        None => s.parse().map_err(|_| format!("`{s}` is not a number"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(parse_num).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvansKind {
    Boundary,
    Shock,
    Constant,
}

/// Options shared by all subcommands.
#[derive(Debug, Clone, Default, Args)]
pub struct RunConfig {
    /// Adiabatic index
    #[arg(long, value_parser = parse_num)]
    pub gamma: Option<f64>,
    /// Shear viscosity
    #[arg(long, value_parser = parse_num)]
    pub mu: Option<f64>,
    /// Second viscosity
    #[arg(long, value_parser = parse_num, allow_hyphen_values = true)]
    pub eta2: Option<f64>,
    /// Heat conductivity
    #[arg(long, value_parser = parse_num)]
    pub kappa: Option<f64>,
    /// Specific heat at constant volume
    #[arg(long, value_parser = parse_num)]
    pub cv: Option<f64>,
    /// Kinetic-theory preset for an n-atomic gas (replaces the explicit constants)
    #[arg(long = "n-atoms")]
    pub n_atoms: Option<u32>,
    /// Downstream velocity u_+ in (u*, 1)
    #[arg(long, value_parser = parse_num)]
    pub uplus: Option<f64>,
    /// Lower end of the u_+ range
    #[arg(long = "u-min", value_parser = parse_num)]
    pub u_min: Option<f64>,
    /// Upper end of the u_+ range
    #[arg(long = "u-max", value_parser = parse_num)]
    pub u_max: Option<f64>,
    /// Number of u_+ points
    #[arg(long = "u-steps")]
    pub u_steps: Option<usize>,
    /// Minimal profile half-length
    #[arg(long, value_parser = parse_num)]
    pub xmax: Option<f64>,
    /// Tolerance (profile endpoints, or |delta_hat| for transition)
    #[arg(long, value_parser = parse_num)]
    pub tol: Option<f64>,
    /// Half-width of the tau interval for the eta curve
    #[arg(long = "tau-max", value_parser = parse_num)]
    pub tau_max: Option<f64>,
    /// Relative jump that triggers curve refinement
    #[arg(long = "refine-tol", value_parser = parse_num)]
    pub refine_tol: Option<f64>,
    /// Smallest real spectral parameter
    #[arg(long = "lambda-min", value_parser = parse_num)]
    pub lambda_min: Option<f64>,
    /// Largest real spectral parameter (also the contour radius)
    #[arg(long = "lambda-max", value_parser = parse_num)]
    pub lambda_max: Option<f64>,
    /// Number of real spectral points
    #[arg(long = "n-lambda")]
    pub n_lambda: Option<usize>,
    /// Layer translation X (default 8 upstream decay lengths)
    #[arg(long = "X", value_parser = parse_num)]
    pub x_shift: Option<f64>,
    /// Layer translations in upstream decay lengths, comma separated
    #[arg(long = "x-factors", value_parser = parse_list)]
    pub x_factors: Option<Vec<f64>>,
    /// Half-length of the Evans integration line
    #[arg(long = "evans-length", value_parser = parse_num)]
    pub evans_length: Option<f64>,
    /// Evans function to tabulate
    #[arg(long, value_enum)]
    pub function: Option<EvansKind>,
    /// Also count zeros on the right half-plane contour
    #[arg(long = "zero-count")]
    pub zero_count: bool,
    /// Number of contour points before refinement
    #[arg(long = "contour-points")]
    pub contour_points: Option<usize>,
    /// Add multi-dimensional curve verdicts to a sweep
    #[arg(long)]
    pub md: bool,
    /// Evans index on every k-th sweep point
    #[arg(long = "evans-stride")]
    pub evans_stride: Option<usize>,
    /// Output format
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file (default: standard output)
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
    /// Configuration file with `key = value` lines using the long flag names
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn bad(key: &str, value: &str, why: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("config key `{key}`: invalid value `{value}`: {why}"))
}

fn set_num(slot: &mut Option<f64>, key: &str, value: &str) -> Result<(), CliError> {
    if slot.is_none() {
        *slot = Some(parse_num(value).map_err(|e| bad(key, value, e))?);
    }
    Ok(())
}

fn set_parsed<T: std::str::FromStr>(slot: &mut Option<T>, key: &str, value: &str) -> Result<(), CliError>
where
    T::Err: std::fmt::Display,
{
    if slot.is_none() {
        *slot = Some(value.parse().map_err(|e| bad(key, value, e))?);
    }
    Ok(())
}

fn set_enum<T: ValueEnum>(slot: &mut Option<T>, key: &str, value: &str) -> Result<(), CliError> {
    if slot.is_none() {
        *slot = Some(T::from_str(value, true).map_err(|e| bad(key, value, e))?);
    }
    Ok(())
}

fn set_flag(slot: &mut bool, key: &str, value: &str) -> Result<(), CliError> {
    let v: bool = value.parse().map_err(|e| bad(key, value, e))?;
    *slot = *slot || v;
    Ok(())
}

impl RunConfig {
    /// Fill every option not given on the command line from `text`.
    pub fn merge_file(&mut self, text: &str) -> Result<(), CliError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected `key = value`", lineno + 1)))?;
            let key = key.trim();
            let value = value.trim();
            match key {
                "gamma" => set_num(&mut self.gamma, key, value)?,
                "mu" => set_num(&mut self.mu, key, value)?,
                "eta2" => set_num(&mut self.eta2, key, value)?,
                "kappa" => set_num(&mut self.kappa, key, value)?,
                "cv" => set_num(&mut self.cv, key, value)?,
                "n-atoms" => set_parsed(&mut self.n_atoms, key, value)?,
                "uplus" => set_num(&mut self.uplus, key, value)?,
                "u-min" => set_num(&mut self.u_min, key, value)?,
                "u-max" => set_num(&mut self.u_max, key, value)?,
                "u-steps" => set_parsed(&mut self.u_steps, key, value)?,
                "xmax" => set_num(&mut self.xmax, key, value)?,
                "tol" => set_num(&mut self.tol, key, value)?,
                "tau-max" => set_num(&mut self.tau_max, key, value)?,
                "refine-tol" => set_num(&mut self.refine_tol, key, value)?,
                "lambda-min" => set_num(&mut self.lambda_min, key, value)?,
                "lambda-max" => set_num(&mut self.lambda_max, key, value)?,
                "n-lambda" => set_parsed(&mut self.n_lambda, key, value)?,
                "X" => set_num(&mut self.x_shift, key, value)?,
                "x-factors" => {
                    if self.x_factors.is_none() {
                        self.x_factors = Some(parse_list(value).map_err(|e| bad(key, value, e))?);
                    }
                }
                "evans-length" => set_num(&mut self.evans_length, key, value)?,
                "function" => set_enum(&mut self.function, key, value)?,
                "zero-count" => set_flag(&mut self.zero_count, key, value)?,
                "contour-points" => set_parsed(&mut self.contour_points, key, value)?,
                "md" => set_flag(&mut self.md, key, value)?,
                "evans-stride" => set_parsed(&mut self.evans_stride, key, value)?,
                "format" => set_enum(&mut self.format, key, value)?,
                "output" => {
                    if self.output.is_none() {
                        self.output = Some(PathBuf::from(value));
                    }
                }
                other => return Err(CliError::Usage(format!("unknown config key `{other}`"))),
            }
        }
        Ok(())
    }

    /// Apply the file named by `--config`, if any.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        if let Some(path) = self.config.clone() {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            self.merge_file(&text)?;
        }
        self.check_positive()?;
        Ok(self)
    }

    fn check_positive(&self) -> Result<(), CliError> {
        let items = [
            ("tol", self.tol),
            ("tau-max", self.tau_max),
            ("refine-tol", self.refine_tol),
            ("lambda-min", self.lambda_min),
            ("lambda-max", self.lambda_max),
            ("xmax", self.xmax),
            ("evans-length", self.evans_length),
        ];
        for (k, v) in items {
            if let Some(v) = v {
                if v.is_nan() || v <= 0.0 {
                    return Err(CliError::Usage(format!("`{k}` must be positive, got {v}")));
                }
            }
        }
        if let Some(x) = self.x_shift {
            if x < 0.0 {
                return Err(CliError::Usage(format!("`X` must be nonnegative, got {x}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_and_decimals() {
        assert_eq!(parse_num("5/3").unwrap(), 5.0 / 3.0);
        assert_eq!(parse_num(" 0.25 ").unwrap(), 0.25);
        assert!(parse_num("abc").is_err());
        assert!(parse_num("1/0").is_err());
    }

    #[test]
    fn flags_win_over_file() {
        let mut c = RunConfig {
            uplus: Some(0.5),
            ..Default::default()
        };
        c.merge_file("uplus = 0.7\nn-atoms = 2\n# comment\n\nformat = json").unwrap();
        assert_eq!(c.uplus, Some(0.5));
        assert_eq!(c.n_atoms, Some(2));
        assert_eq!(c.format, Some(Format::Json));
    }

    #[test]
    fn unknown_and_malformed_keys() {
        let mut c = RunConfig::default();
        let e = c.merge_file("colour = red").unwrap_err();
        assert!(e.to_string().contains("colour"));
        let e = c.merge_file("gamma = fast").unwrap_err();
        assert!(e.to_string().contains("gamma"));
        assert!(c.merge_file("just text").is_err());
    }
}
