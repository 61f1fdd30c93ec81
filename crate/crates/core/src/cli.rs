//! Command-line front end.
//!
//! Every command writes CSV: a header row, then comma-separated data rows with
//! LF endings. Numbers use the shortest decimal form that parses back to the
//! same `f64`.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::expansion::{expand, l2_error};
use crate::function::{FunctionSpec, Interpolation, SampledFunction};
use crate::hankel_kernel::{atom_hankel, AtomKind, BasisTransform, KernelConfig};
use crate::pipeline::{series_transform, transform, transform_with_oracle, TransformRequest};
use crate::splines::{SplineOrder, WaveletIndex};
use crate::Error;

#[derive(Parser, Debug, Clone)]
#[command(
    name = "hankel-wavelet",
    version,
    about = "Hankel transforms through B-spline wavelet expansions"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Transform the input function on a p grid.
    Transform {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Grid `min:max:count`, endpoints included.
        #[arg(long)]
        p: GridSpec,
        /// Add reference values and absolute errors.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Transform of a single basis atom.
    Basis {
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, default_value_t = 0)]
        nu: u32,
        #[arg(long, default_value_t = 0)]
        j: u32,
        #[arg(long, default_value_t = 0)]
        k: u32,
        #[arg(long, value_enum, default_value_t = Kind::Wavelet)]
        kind: Kind,
        #[arg(long)]
        p: GridSpec,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Expansion coefficients; scaling rows have level -1.
    Coeffs {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the consistency checks on one configuration.
    Validate {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        p: GridSpec,
        /// Bound on the largest deviation from the reference transform.
        #[arg(long, default_value_t = 2e-2)]
        tol: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    #[arg(long, value_enum, conflicts_with = "input")]
    pub builtin: Option<Builtin>,
    /// Gaussian width.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub a: f64,
    /// Factor applied to the builtin function.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub scale: f64,
    /// Two-column CSV `r,f`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Interp::Linear)]
    pub interp: Interp,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 0)]
    pub nu: u32,
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    #[arg(long = "R", allow_negative_numbers = true)]
    pub radius: f64,
    #[arg(long = "J", default_value_t = 3)]
    pub level: u32,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Gaussian,
    Constant,
    Ramp,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interp {
    Linear,
    Cubic,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Scaling,
    Wavelet,
}

/// Uniform grid `min:max:count` with both endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.max
                } else {
                    self.min + step * i as f64
                }
            })
            .collect()
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [min, max, count] = parts.as_slice() else {
            return Err(format!("expected min:max:count, got `{s}`"));
        };
        let min: f64 = min.trim().parse().map_err(|e| format!("grid min: {e}"))?;
        let max: f64 = max.trim().parse().map_err(|e| format!("grid max: {e}"))?;
        let count: usize = count
            .trim()
            .parse()
            .map_err(|e| format!("grid count: {e}"))?;
        if !(min.is_finite() && max.is_finite()) {
            return Err("grid bounds must be finite".into());
        }
        if min < 0.0 {
            return Err("grid min must be non-negative".into());
        }
        if !(min < max) {
            return Err("grid min must be below grid max".into());
        }
        if count < 2 {
            return Err("grid count must be at least 2".into());
        }
        Ok(Self { min, max, count })
    }
}

/// Failure classes with distinct exit codes.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    InputData(String),
    Numerical(String),
    /// Number of failed checks.
    Validation(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Config(_) => 2,
            CliError::InputData(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::InputData(m) => write!(f, "input data error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Validation(n) => write!(f, "{n} validation check(s) failed"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } => CliError::Config(e.to_string()),
            Error::InputData(_) | Error::NonFiniteSample { .. } => {
                CliError::InputData(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Config(format!("cannot write output: {e}"))
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Config(format!("cannot write output: {e}"))
    }
}

/// Shortest round-trip decimal form.
pub fn format_number(x: f64) -> String {
    format!("{x:?}")
}

fn order(m: u32) -> Result<SplineOrder, CliError> {
    Ok(SplineOrder::new(m)?)
}

fn function_spec(input: &InputArgs) -> Result<FunctionSpec<f64>, CliError> {
    if !input.scale.is_finite() {
        return Err(CliError::Config("`scale` must be finite".into()));
    }
    match (&input.input, input.builtin) {
        (Some(path), None) => {
            let rule = match input.interp {
                Interp::Linear => Interpolation::Linear,
                Interp::Cubic => Interpolation::Cubic,
            };
            let sampled = SampledFunction::from_csv_path(path, rule).map_err(|e| match e {
                Error::InvalidParameter { .. } => CliError::InputData(e.to_string()),
                other => other.into(),
            })?;
            Ok(FunctionSpec::Sampled(sampled))
        }
        (None, Some(Builtin::Gaussian)) => Ok(FunctionSpec::gaussian(input.a)?.scaled(input.scale)),
        (None, Some(Builtin::Constant)) => Ok(FunctionSpec::constant(input.scale)),
        (None, Some(Builtin::Ramp)) => Ok(FunctionSpec::ramp().scaled(input.scale)),
        (None, None) => Err(CliError::Config(
            "one of `builtin` or `input` is required".into(),
        )),
        (Some(_), Some(_)) => Err(CliError::Config(
            "`builtin` and `input` are exclusive".into(),
        )),
    }
}

fn request(
    input: &InputArgs,
    model: &ModelArgs,
    grid: &GridSpec,
) -> Result<TransformRequest<f64>, CliError> {
    Ok(TransformRequest::new(
        function_spec(input)?,
        model.nu,
        order(model.m)?,
        model.radius,
        model.level,
        grid.points(),
    )?)
}

fn csv_writer<'a>(
    output: &Option<PathBuf>,
    stdout: &'a mut dyn Write,
) -> Result<csv::Writer<Box<dyn Write + 'a>>, CliError> {
    let sink: Box<dyn Write + 'a> = match output {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| {
            CliError::Config(format!("cannot create `{}`: {e}", path.display()))
        })?)),
        None => Box::new(stdout),
    };
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink))
}

/// Executes one command, writing CSV to `--output` or to `stdout`.
pub fn run(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &config.command {
        Command::Transform {
            input,
            model,
            p,
            oracle,
            output,
        } => {
            let req = request(input, model, p)?;
            let result = if *oracle {
                transform_with_oracle(&req)?
            } else {
                transform(&req)?
            };
            let mut w = csv_writer(output, stdout)?;
            match &result.diagnostics.oracle {
                Some(cmp) => {
                    w.write_record(["p", "F", "F_oracle", "abs_err"])?;
                    for i in 0..result.p_grid.len() {
                        w.write_record([
                            format_number(result.p_grid[i]),
                            format_number(result.values[i]),
                            format_number(cmp.values[i]),
                            format_number(cmp.abs_errors[i]),
                        ])?;
                    }
                }
                None => {
                    w.write_record(["p", "F"])?;
                    for (&p, &v) in result.p_grid.iter().zip(&result.values) {
                        w.write_record([format_number(p), format_number(v)])?;
                    }
                }
            }
            w.flush()?;
        }
        Command::Basis {
            m,
            nu,
            j,
            k,
            kind,
            p,
            output,
        } => {
            let bt = BasisTransform {
                order: order(*m)?,
                nu: *nu,
                kind: match kind {
                    Kind::Scaling => AtomKind::Scaling,
                    Kind::Wavelet => AtomKind::Wavelet,
                },
                index: WaveletIndex::new(*j, *k),
            };
            let cfg = KernelConfig::default();
            let mut w = csv_writer(output, stdout)?;
            w.write_record(["p", if *kind == Kind::Scaling { "Phi" } else { "Psi" }])?;
            for x in p.points() {
                w.write_record([format_number(x), format_number(atom_hankel(&bt, x, &cfg))])?;
            }
            w.flush()?;
        }
        Command::Coeffs {
            input,
            model,
            output,
        } => {
            let f = function_spec(input)?;
            let coeffs = expand(&f, order(model.m)?, model.radius, model.level)?;
            let mut w = csv_writer(output, stdout)?;
            w.write_record(["level", "k", "value"])?;
            for (id, c) in coeffs.atoms() {
                w.write_record([
                    id.listing_level().to_string(),
                    id.k.to_string(),
                    format_number(c),
                ])?;
            }
            w.flush()?;
        }
        Command::Validate {
            input,
            model,
            p,
            tol,
            output,
        } => {
            let req = request(input, model, p)?;
            let checks = validation_checks(&req, *tol)?;
            let failed = checks.iter().filter(|c| !c.passed()).count();
            let mut w = csv_writer(output, stdout)?;
            w.write_record(["check", "measured", "limit", "result"])?;
            for c in &checks {
                w.write_record([
                    c.name.to_string(),
                    format_number(c.measured),
                    format_number(c.limit),
                    if c.passed() { "pass" } else { "fail" }.to_string(),
                ])?;
            }
            w.flush()?;
            if failed > 0 {
                return Err(CliError::Validation(failed));
            }
        }
    }
    Ok(())
}

struct Check {
    name: &'static str,
    measured: f64,
    limit: f64,
}

impl Check {
    fn passed(&self) -> bool {
        self.measured <= self.limit
    }
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn validation_checks(req: &TransformRequest<f64>, tol: f64) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();

    let first = transform_with_oracle(req)?;
    let oracle = first.diagnostics.oracle.as_ref().expect("oracle requested");
    checks.push(Check {
        name: "oracle_agreement",
        measured: oracle.max_abs_error,
        limit: tol,
    });

    let coeffs = &first.coefficients;
    let again = expand(coeffs, req.m, req.radius, req.max_level)?;
    let idempotence = coeffs
        .atoms()
        .zip(again.atoms())
        .map(|((_, a), (_, b))| (a - b).abs())
        .fold(0.0, f64::max);
    checks.push(Check {
        name: "projection_idempotence",
        measured: idempotence,
        limit: 1e-9,
    });

    let series = series_transform(&again, req.nu, &req.p_grid, &req.kernel)?;
    checks.push(Check {
        name: "approximation_space_exactness",
        measured: max_diff(&series.values, &first.values),
        limit: 1e-9,
    });

    let finer = expand(&req.f, req.m, req.radius, req.max_level + 1)?;
    checks.push(Check {
        name: "level_convergence",
        measured: l2_error(&finer, &req.f) - l2_error(coeffs, &req.f),
        limit: 0.0,
    });

    let scaled = TransformRequest {
        f: req.f.scaled(2.0),
        ..req.clone()
    };
    let doubled: Vec<f64> = first.values.iter().map(|v| 2.0 * v).collect();
    let peak = first.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    checks.push(Check {
        name: "linearity",
        measured: max_diff(&transform(&scaled)?.values, &doubled) / peak,
        limit: 1e-12,
    });

    let alone = TransformRequest {
        p_grid: vec![req.p_grid[req.p_grid.len() / 2]],
        ..req.clone()
    };
    checks.push(Check {
        name: "grid_independence",
        measured: (transform(&alone)?.values[0] - first.values[req.p_grid.len() / 2]).abs(),
        limit: 0.0,
    });

    let repeat = transform(req)?;
    let identical = repeat
        .values
        .iter()
        .zip(&first.values)
        .all(|(a, b)| a.to_bits() == b.to_bits());
    checks.push(Check {
        name: "determinism",
        measured: if identical { 0.0 } else { 1.0 },
        limit: 0.0,
    });
    Ok(checks)
}
