//! Command-line front end.
//!
//! Every run produces one [`RunReport`]; `--format` selects a text table, a
//! single JSON object or CSV rendering of it.

pub mod checks;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{ratio_sweep, BoundKind, BoundsError, RatioSweepReport};
use crate::scalar::{ratio_from_str, ratio_to_string, serde_ratio_opt, Scalar};
use crate::series::{k_min_search, series_sweep, thresholds, KMinReport, SeriesError, SeriesReport, ThresholdRecord};
use crate::space::{parse_point, GrassmannianSpace, PointSummary, SphericalWeight, TorusPoint};
use crate::spherical::{
    CalibrationRecord, EvalMode, EvalPath, EvalRequest, EvalResult, SphericalError, SphericalEvaluator,
};
use checks::{Suite, SuiteResult};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable holding the default worker-thread count.
pub const THREADS_ENV: &str = "GRASSMANN_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_COMPUTE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Help(String),
    #[error(transparent)]
    Eval(#[from] SphericalError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("output failed: {0}")]
    Io(#[from] io::Error),
    #[error("json output failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Help(_) => EXIT_OK,
            CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_COMPUTE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Auto,
    Generic,
    Confluent,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    GeneralPqStrict,
    GeneralPqEqual,
    Regular,
    FlatInterior,
    MinusOne,
    PriorRegular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Normalization,
    Boundedness,
    Oracle,
    Calibration,
    Jacobi,
    All,
}

#[derive(Debug, Parser)]
#[command(name = "grassmannian", version, about = "Spherical functions and orbital-measure series on SU(p+q)/S(U(p)xU(q))")]
struct Cli {
    #[command(subcommand)]
    command: CommandArgs,
    /// Output format.
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: OutputFormat,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, env = THREADS_ENV, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct SpaceArgs {
    #[arg(long = "p")]
    p: u32,
    #[arg(long = "q")]
    q: u32,
}

#[derive(Debug, Args)]
struct PointArg {
    /// Angles t_k: `num/den` are multiples of pi, `1.25f` are radians.
    #[arg(long = "t", allow_hyphen_values = true)]
    t: String,
}

#[derive(Debug, Subcommand)]
enum CommandArgs {
    /// Evaluate phi_lambda at one point.
    Eval {
        #[command(flatten)]
        space: SpaceArgs,
        /// Angles; may be omitted when --nodes is given.
        #[arg(long = "t", allow_hyphen_values = true)]
        t: Option<String>,
        /// Weight as m-vector.
        #[arg(long = "m", conflicts_with = "n", required_unless_present = "n")]
        m: Option<String>,
        /// Weight as n-vector.
        #[arg(long = "n")]
        n: Option<String>,
        #[arg(long, value_enum, default_value = "auto")]
        mode: ModeArg,
        /// Rational nodes x_k = cos 2t_k for the exact oracle.
        #[arg(long, allow_hyphen_values = true)]
        nodes: Option<String>,
    },
    /// Classify a torus point.
    Classify {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        point: PointArg,
    },
    /// Ratio sweep against a decay envelope.
    Sweep {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        point: PointArg,
        #[arg(long = "nmax", default_value_t = 40)]
        n_max: u32,
        /// Envelope; defaults to the sharpest one for the point class.
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
    },
    /// Truncated L2 / H^s series for mu_a^k.
    Series {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        point: PointArg,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value = "0")]
        s: String,
        #[arg(long = "nmax", default_value_t = 60)]
        n_max: u32,
    },
    /// Smallest convergent convolution power.
    Kmin {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        point: PointArg,
        #[arg(long, default_value = "0")]
        s: String,
        #[arg(long = "kcap", default_value_t = 8)]
        k_cap: u32,
        #[arg(long = "nmax", default_value_t = 60)]
        n_max: u32,
    },
    /// Sufficient powers from the decay theorems.
    Thresholds {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, default_value = "0")]
        s: String,
    },
    /// Run self-check suites.
    Check {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        #[arg(long = "nmax", default_value_t = 12)]
        n_max: u32,
    },
}

/// Validated invocation.
#[derive(Debug, Clone)]
pub struct CliConfig {
    pub command: Command,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone)]
pub enum Command {
    Eval {
        space: GrassmannianSpace,
        point: Option<TorusPoint>,
        weight: SphericalWeight,
        mode: EvalMode,
        nodes: Option<Vec<BigRational>>,
    },
    Classify { space: GrassmannianSpace, point: TorusPoint },
    Sweep { space: GrassmannianSpace, point: TorusPoint, kind: Option<BoundKind>, n_max: u32 },
    Series { space: GrassmannianSpace, point: TorusPoint, k: u32, s: BigRational, n_max: u32 },
    Kmin { space: GrassmannianSpace, point: TorusPoint, s: BigRational, k_cap: u32, n_max: u32 },
    Thresholds { space: GrassmannianSpace, s: BigRational },
    Check { suite: Suite, n_max: u32 },
}

fn usage(flag: &str, err: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("error: {flag}: {err}"))
}

fn build_space(a: &SpaceArgs) -> Result<GrassmannianSpace, CliError> {
    GrassmannianSpace::new(a.p, a.q).map_err(|e| usage("--p/--q", e))
}

fn build_point(space: &GrassmannianSpace, t: &str) -> Result<TorusPoint, CliError> {
    parse_point(space, t).map_err(|e| usage("--t", e))
}

fn parse_list(flag: &str, s: &str) -> Result<Vec<u32>, CliError> {
    s.split(',')
        .map(|v| v.trim().parse::<u32>().map_err(|e| usage(flag, format!("{v:?}: {e}"))))
        .collect()
}

fn parse_rational(flag: &str, s: &str) -> Result<BigRational, CliError> {
    ratio_from_str(s).ok_or_else(|| usage(flag, format!("expected a rational, got {s:?}")))
}

fn parse_s(s: &str) -> Result<BigRational, CliError> {
    let v = parse_rational("--s", s)?;
    if v < BigRational::from_integer(0.into()) {
        return Err(usage("--s", "must be nonnegative"));
    }
    Ok(v)
}

fn positive(flag: &str, v: u32) -> Result<u32, CliError> {
    if v == 0 {
        return Err(usage(flag, "must be at least 1"));
    }
    Ok(v)
}

/// Parses and validates `argv` (including the program name).
pub fn parse_args<I, T>(argv: I) -> Result<CliConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| {
        use clap::error::ErrorKind;
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Help(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    })?;
    let command = match cli.command {
        CommandArgs::Eval { space, t, m, n, mode, nodes } => {
            let space = build_space(&space)?;
            let weight = match (m, n) {
                (Some(m), _) => space.weight_from_m(&parse_list("--m", &m)?).map_err(|e| usage("--m", e))?,
                (None, Some(n)) => space.weight_from_n(&parse_list("--n", &n)?).map_err(|e| usage("--n", e))?,
                (None, None) => return Err(usage("--m", "a weight is required")),
            };
            let nodes = nodes
                .map(|s| s.split(',').map(|v| parse_rational("--nodes", v)).collect::<Result<Vec<_>, _>>())
                .transpose()?;
            if let Some(nodes) = &nodes {
                if nodes.len() != space.q() as usize {
                    return Err(usage("--nodes", format!("expected {} nodes, got {}", space.q(), nodes.len())));
                }
            }
            let mode = match mode {
                ModeArg::Auto => EvalMode::Auto,
                ModeArg::Generic => EvalMode::Generic,
                ModeArg::Confluent => EvalMode::Confluent,
                ModeArg::Oracle => EvalMode::Oracle,
            };
            let point = match t {
                Some(t) => Some(build_point(&space, &t)?),
                None if nodes.is_some() => None,
                None => return Err(usage("--t", "required unless --nodes is given")),
            };
            if point.is_none() && !matches!(mode, EvalMode::Auto | EvalMode::Oracle) {
                return Err(usage("--mode", "--nodes without --t only supports the oracle"));
            }
            Command::Eval { space, point, weight, mode, nodes }
        }
        CommandArgs::Classify { space, point } => {
            let space = build_space(&space)?;
            let point = build_point(&space, &point.t)?;
            Command::Classify { space, point }
        }
        CommandArgs::Sweep { space, point, n_max, kind } => {
            let space = build_space(&space)?;
            let point = build_point(&space, &point.t)?;
            let kind = kind.map(|k| match k {
                KindArg::GeneralPqStrict => BoundKind::GeneralPqStrict,
                KindArg::GeneralPqEqual => BoundKind::GeneralPqEqual,
                KindArg::Regular => BoundKind::Regular,
                KindArg::FlatInterior => BoundKind::FlatInterior,
                KindArg::MinusOne => BoundKind::MinusOne,
                KindArg::PriorRegular => BoundKind::PriorRegular,
            });
            Command::Sweep { space, point, kind, n_max: positive("--nmax", n_max)? }
        }
        CommandArgs::Series { space, point, k, s, n_max } => {
            let space = build_space(&space)?;
            let point = build_point(&space, &point.t)?;
            Command::Series { space, point, k: positive("--k", k)?, s: parse_s(&s)?, n_max: positive("--nmax", n_max)? }
        }
        CommandArgs::Kmin { space, point, s, k_cap, n_max } => {
            let space = build_space(&space)?;
            let point = build_point(&space, &point.t)?;
            Command::Kmin {
                space,
                point,
                s: parse_s(&s)?,
                k_cap: positive("--kcap", k_cap)?,
                n_max: positive("--nmax", n_max)?,
            }
        }
        CommandArgs::Thresholds { space, s } => Command::Thresholds { space: build_space(&space)?, s: parse_s(&s)? },
        CommandArgs::Check { suite, n_max } => {
            let suite = match suite {
                SuiteArg::Normalization => Suite::Normalization,
                SuiteArg::Boundedness => Suite::Boundedness,
                SuiteArg::Oracle => Suite::Oracle,
                SuiteArg::Calibration => Suite::Calibration,
                SuiteArg::Jacobi => Suite::Jacobi,
                SuiteArg::All => Suite::All,
            };
            Command::Check { suite, n_max }
        }
    };
    Ok(CliConfig { command, format: cli.format, output: cli.output, threads: cli.threads })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceSummary {
    pub p: u32,
    pub q: u32,
    pub label: String,
    pub rank: u32,
    pub dim: u32,
}

impl From<&GrassmannianSpace> for SpaceSummary {
    fn from(s: &GrassmannianSpace) -> Self {
        Self { p: s.p(), q: s.q(), label: s.label(), rank: s.rank(), dim: s.dim() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalOutput {
    pub m: Vec<u32>,
    pub n: Vec<u32>,
    pub result: EvalResult,
    /// Exact value for oracle runs.
    #[serde(with = "serde_ratio_opt")]
    pub exact: Option<BigRational>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOutput {
    pub point: PointSummary,
    pub bound_kind: Option<BoundKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutput {
    pub passed: bool,
    pub suites: Vec<SuiteResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum RunResults {
    Eval(EvalOutput),
    Classify(ClassifyOutput),
    Sweep(RatioSweepReport),
    Series(SeriesReport),
    Kmin(KMinReport),
    Thresholds(ThresholdRecord),
    Check(CheckOutput),
}

/// One run, as emitted by `--format json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub space: Option<SpaceSummary>,
    pub point: Option<PointSummary>,
    pub params: BTreeMap<String, String>,
    pub results: RunResults,
    pub calibration: Option<CalibrationRecord>,
    pub version: String,
}

impl RunReport {
    pub fn to_json(&self) -> Result<String, serde_json::Error> {
        serde_json::to_string_pretty(self)
    }

    pub fn check_failed(&self) -> bool {
        matches!(&self.results, RunResults::Check(c) if !c.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.check_failed() {
            EXIT_CHECK_FAILED
        } else {
            EXIT_OK
        }
    }

    pub fn write(&self, format: OutputFormat, out: &mut dyn Write) -> Result<(), CliError> {
        match format {
            OutputFormat::Json => writeln!(out, "{}", self.to_json()?)?,
            OutputFormat::Csv => self.write_csv(out)?,
            OutputFormat::Text => self.write_text(out)?,
        }
        Ok(())
    }

    fn write_csv(&self, out: &mut dyn Write) -> Result<(), CliError> {
        let rows: Vec<Vec<String>> = match &self.results {
            RunResults::Sweep(r) => return Ok(r.write_csv(out)?),
            RunResults::Series(r) => return Ok(r.write_csv(out)?),
            RunResults::Eval(e) => vec![
                vec!["m".into(), "n".into(), "value".into(), "path".into(), "condition_estimate".into()],
                vec![
                    join(&e.m),
                    join(&e.n),
                    format!("{:.16e}", e.result.value),
                    e.result.path.to_string(),
                    format!("{:.16e}", e.result.condition_estimate),
                ],
            ],
            RunResults::Classify(c) => {
                let mut rows = vec![vec!["block".into(), "members".into(), "node".into()]];
                for (i, members) in c.point.blocks.iter().enumerate() {
                    let node = c.point.cosines[members[0]];
                    rows.push(vec![i.to_string(), join(&members.iter().map(|m| m + 1).collect::<Vec<_>>()), format!("{node:.16e}")]);
                }
                rows
            }
            RunResults::Kmin(r) => {
                let mut rows = vec![vec!["k".into(), "verdict".into(), "tail_exponent".into()]];
                for st in &r.steps {
                    let tail = st.tail_exponent.map(|v| format!("{v:.16e}")).unwrap_or_default();
                    rows.push(vec![st.k.to_string(), st.verdict.to_string(), tail]);
                }
                rows
            }
            RunResults::Thresholds(t) => vec![
                vec!["k_main".into(), "k_regular".into(), "k_prior".into(), "k_sobolev".into(), "k_sobolev_general".into()],
                vec![
                    t.k_main.to_string(),
                    t.k_regular.to_string(),
                    t.k_prior.to_string(),
                    t.k_sobolev.to_string(),
                    t.k_sobolev_general.to_string(),
                ],
            ],
            RunResults::Check(c) => {
                let mut rows = vec![vec!["suite".into(), "passed".into(), "cases".into(), "worst".into(), "tolerance".into()]];
                for s in &c.suites {
                    rows.push(vec![
                        s.suite.to_string(),
                        s.passed.to_string(),
                        s.cases.to_string(),
                        format!("{:.16e}", s.worst),
                        format!("{:.16e}", s.tolerance),
                    ]);
                }
                rows
            }
        };
        let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        for row in rows {
            wtr.write_record(&row).map_err(|e| io::Error::other(e.to_string()))?;
        }
        wtr.flush()?;
        Ok(())
    }

    fn write_text(&self, out: &mut dyn Write) -> Result<(), CliError> {
        if let Some(s) = &self.space {
            writeln!(out, "space  {} (p={}, q={}, dim {})", s.label, s.p, s.q, s.dim)?;
        }
        if let Some(pt) = &self.point {
            let class = if pt.is_regular {
                "regular"
            } else if pt.in_normalizer {
                "normalizer"
            } else {
                "singular"
            };
            writeln!(out, "point  t = ({}) pi  [{class}]", pt.angles)?;
        }
        match &self.results {
            RunResults::Eval(e) => {
                writeln!(out, "m = ({})  n = ({})", join(&e.m), join(&e.n))?;
                writeln!(out, "phi = {:.17e}", e.result.value)?;
                if let Some(x) = &e.exact {
                    writeln!(out, "exact = {}", ratio_to_string(x))?;
                }
                writeln!(out, "path = {}  condition = {:e}", e.result.path, e.result.condition_estimate)?;
                if e.result.condition_warning {
                    writeln!(out, "warning: ill-conditioned node spacing")?;
                }
            }
            RunResults::Classify(c) => {
                writeln!(out, "cos 2t = {:?}", c.point.cosines)?;
                let blocks: Vec<String> = c
                    .point
                    .blocks
                    .iter()
                    .map(|b| format!("{{{}}}", join(&b.iter().map(|m| m + 1).collect::<Vec<_>>())))
                    .collect();
                writeln!(out, "blocks = {}", blocks.join(" "))?;
                writeln!(
                    out,
                    "regular = {}  normalizer = {}  all -1 = {}  all +1 = {}",
                    c.point.is_regular, c.point.in_normalizer, c.point.all_minus_one, c.point.all_plus_one
                )?;
                match c.bound_kind {
                    Some(k) => writeln!(out, "envelope = {k}")?,
                    None => writeln!(out, "envelope = none (normalizer point)")?,
                }
                for w in &c.point.warnings {
                    writeln!(out, "warning: {w}")?;
                }
            }
            RunResults::Sweep(r) => {
                writeln!(out, "envelope {}  n_max {}  weights {}", r.kind, r.n_max, r.weights_evaluated)?;
                writeln!(out, "{:>6} {:>24}", "shell", "max_ratio")?;
                for (i, v) in r.max_ratio_per_shell.iter().enumerate() {
                    writeln!(out, "{:>6} {:>24.16e}", i + 1, v)?;
                }
                writeln!(out, "sup ratio = {:.6e}  max |phi| = {:.12}", r.overall_sup, r.max_abs_phi)?;
                match r.log_log_slope {
                    Some(s) => writeln!(out, "log-log slope = {s:.4}  bounded = {}", r.is_bounded())?,
                    None => writeln!(out, "log-log slope = n/a (insufficient data)")?,
                }
            }
            RunResults::Series(r) => {
                writeln!(out, "k = {}  s = {}  n_max = {}", r.k, ratio_to_string(&r.s), r.n_max)?;
                if r.normalizer_point {
                    writeln!(out, "normalizer point: every power is singular, series not computed")?;
                } else {
                    writeln!(out, "{:>6} {:>24} {:>24}", "shell", "shell_sum", "partial_sum")?;
                    for (n, (a, b)) in r.shell_sums.iter().zip(&r.partial_sums).enumerate() {
                        writeln!(out, "{n:>6} {a:>24.16e} {b:>24.16e}")?;
                    }
                }
                match r.tail_exponent {
                    Some(t) => writeln!(out, "tail exponent = {t:.4}")?,
                    None => writeln!(out, "tail exponent = n/a")?,
                }
                writeln!(out, "verdict = {}", r.verdict)?;
            }
            RunResults::Kmin(r) => {
                for st in &r.steps {
                    let tail = st.tail_exponent.map(|v| format!("{v:.4}")).unwrap_or_else(|| "n/a".into());
                    writeln!(out, "k = {:<3} tail = {:<8} {}", st.k, tail, st.verdict)?;
                }
                writeln!(out, "{r}")?;
            }
            RunResults::Thresholds(t) => {
                writeln!(out, "k_main={}", t.k_main)?;
                writeln!(out, "k_regular={}", t.k_regular)?;
                writeln!(out, "k_prior={}", t.k_prior)?;
                writeln!(out, "k_sobolev={}", t.k_sobolev)?;
                writeln!(out, "k_sobolev_general={}", t.k_sobolev_general)?;
            }
            RunResults::Check(c) => {
                for s in &c.suites {
                    let status = if s.passed { "PASS" } else { "FAIL" };
                    writeln!(
                        out,
                        "{status} {:<14} cases {:<8} worst {:.3e} (tol {:.0e})",
                        s.suite.as_str(),
                        s.cases,
                        s.worst,
                        s.tolerance
                    )?;
                    for note in &s.notes {
                        writeln!(out, "     {note}")?;
                    }
                    for f in &s.failures {
                        writeln!(out, "     failed: {f}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn base_params(space: &GrassmannianSpace) -> BTreeMap<String, String> {
    BTreeMap::from([("p".to_string(), space.p().to_string()), ("q".to_string(), space.q().to_string())])
}

/// Computes the report for a validated command.
pub fn execute(command: &Command) -> Result<RunReport, CliError> {
    let report = |space: &GrassmannianSpace,
                  point: Option<&TorusPoint>,
                  params: BTreeMap<String, String>,
                  results: RunResults,
                  calibration: Option<CalibrationRecord>| RunReport {
        space: Some(space.into()),
        point: point.map(|p| p.summary()),
        params,
        results,
        calibration,
        version: VERSION.to_string(),
    };
    Ok(match command {
        Command::Eval { space, point, weight, mode, nodes } => {
            let e = SphericalEvaluator::new(space.clone())?;
            let mut params = base_params(space);
            params.insert("m".into(), join(weight.m()));
            params.insert("mode".into(), format!("{mode:?}").to_lowercase());
            let (result, exact) = match (nodes, point) {
                (Some(nodes), _) if matches!(mode, EvalMode::Auto | EvalMode::Oracle) => {
                    params.insert("nodes".into(), nodes.iter().map(ratio_to_string).collect::<Vec<_>>().join(","));
                    let x = e.oracle_exact_nodes(weight, nodes)?;
                    (oracle_result(&x), Some(x))
                }
                (_, Some(pt)) if *mode == EvalMode::Oracle => {
                    let x = e.oracle_exact(weight, pt)?;
                    (oracle_result(&x), Some(x))
                }
                (_, Some(pt)) => (e.evaluate(&EvalRequest { weight, point: pt, mode: *mode })?, None),
                (_, None) => return Err(CliError::Usage("error: --t: required".into())),
            };
            let out = EvalOutput { m: weight.m().to_vec(), n: weight.n().to_vec(), result, exact };
            report(space, point.as_ref(), params, RunResults::Eval(out), Some(e.calibration().clone()))
        }
        Command::Classify { space, point } => {
            let out = ClassifyOutput { point: point.summary(), bound_kind: BoundKind::for_point(space, point) };
            report(space, Some(point), base_params(space), RunResults::Classify(out), None)
        }
        Command::Sweep { space, point, kind, n_max } => {
            let e = SphericalEvaluator::new(space.clone())?;
            let kind = match kind {
                Some(k) => *k,
                None => BoundKind::for_point(space, point)
                    .ok_or_else(|| CliError::Usage("error: --t: normalizer point has no decay envelope".into()))?,
            };
            let rep = ratio_sweep(&e, kind, point, *n_max)?;
            let mut params = base_params(space);
            params.insert("kind".into(), kind.to_string());
            params.insert("n_max".into(), n_max.to_string());
            report(space, Some(point), params, RunResults::Sweep(rep), Some(e.calibration().clone()))
        }
        Command::Series { space, point, k, s, n_max } => {
            let e = SphericalEvaluator::new(space.clone())?;
            let rep = series_sweep(&e, point, *k, s, *n_max)?;
            let mut params = base_params(space);
            params.insert("k".into(), k.to_string());
            params.insert("s".into(), ratio_to_string(s));
            params.insert("n_max".into(), n_max.to_string());
            report(space, Some(point), params, RunResults::Series(rep), Some(e.calibration().clone()))
        }
        Command::Kmin { space, point, s, k_cap, n_max } => {
            let e = SphericalEvaluator::new(space.clone())?;
            let rep = k_min_search(&e, point, s, *k_cap, *n_max)?;
            let mut params = base_params(space);
            params.insert("s".into(), ratio_to_string(s));
            params.insert("k_cap".into(), k_cap.to_string());
            params.insert("n_max".into(), n_max.to_string());
            report(space, Some(point), params, RunResults::Kmin(rep), Some(e.calibration().clone()))
        }
        Command::Thresholds { space, s } => {
            let t = thresholds(space, s)?;
            let mut params = base_params(space);
            params.insert("s".into(), ratio_to_string(s));
            report(space, None, params, RunResults::Thresholds(t), None)
        }
        Command::Check { suite, n_max } => {
            let suites = checks::run_suite(*suite, *n_max)?;
            let passed = suites.iter().all(|s| s.passed);
            let params = BTreeMap::from([
                ("suite".to_string(), suite.to_string()),
                ("n_max".to_string(), n_max.to_string()),
            ]);
            RunReport {
                space: None,
                point: None,
                params,
                results: RunResults::Check(CheckOutput { passed, suites }),
                calibration: None,
                version: VERSION.to_string(),
            }
        }
    })
}

fn oracle_result(x: &BigRational) -> EvalResult {
    EvalResult {
        value: x.to_f64(),
        path: EvalPath::Oracle,
        condition_estimate: 0.0,
        condition_warning: false,
        generic_cross_check: None,
    }
}

/// Runs `config`, writing output and diagnostics; returns the exit status.
pub fn run(config: &CliConfig) -> i32 {
    let result = match config.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&config.command)),
            Err(e) => {
                eprintln!("error: --threads: {e}");
                return EXIT_USAGE;
            }
        },
        None => execute(&config.command),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    let written = match &config.output {
        Some(path) => File::create(path)
            .map_err(CliError::from)
            .and_then(|f| {
                let mut w = io::BufWriter::new(f);
                report.write(config.format, &mut w)?;
                w.flush()?;
                Ok(())
            }),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            report.write(config.format, &mut lock)
        }
    };
    if let Err(e) = written {
        eprintln!("{e}");
        return EXIT_COMPUTE;
    }
    report.exit_code()
}

/// Entry point for the binary: parse, run, map errors to exit codes.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match parse_args(argv) {
        Ok(config) => run(&config),
        Err(CliError::Help(text)) => {
            print!("{text}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &str) -> Result<CliConfig, CliError> {
        parse_args(std::iter::once("grassmannian").chain(args.split_whitespace()))
    }

    #[test]
    fn parses_eval() {
        let cfg = parse("eval --p 3 --q 2 --t 1/5,1/7 --m 3,1").unwrap();
        match cfg.command {
            Command::Eval { space, point, weight, mode, .. } => {
                assert_eq!((space.p(), space.q()), (3, 2));
                assert!(point.unwrap().is_regular());
                assert_eq!(weight.m(), &[3, 1]);
                assert_eq!(mode, EvalMode::Auto);
            }
            _ => panic!(),
        }
        let cfg = parse("eval --p 3 --q 2 --t -1/5,1/7 --n 4,1").unwrap();
        assert!(matches!(cfg.command, Command::Eval { .. }));
    }

    #[test]
    fn failed_check_maps_to_exit_three() {
        let cfg = parse("check --suite calibration").unwrap();
        let mut report = execute(&cfg.command).unwrap();
        assert_eq!(report.exit_code(), EXIT_OK);
        if let RunResults::Check(c) = &mut report.results {
            c.passed = false;
        }
        assert_eq!(report.exit_code(), EXIT_CHECK_FAILED);
    }

    #[test]
    fn parses_series() {
        let cfg = parse("series --p 3 --q 2 --t 1/5,1/7 --k 2 --nmax 60 --format json").unwrap();
        assert_eq!(cfg.format, OutputFormat::Json);
        assert!(matches!(cfg.command, Command::Series { k: 2, n_max: 60, .. }));
    }

    #[test]
    fn usage_errors_name_the_flag() {
        let err = parse("eval --p 2 --q 3 --t 0,0 --m 0,0").unwrap_err();
        assert_eq!(err.exit_code(), EXIT_USAGE);
        assert!(err.to_string().contains("invalid rank parameters"));
        let err = parse("eval --p 3 --q 2 --t 0.3,1/7 --m 1,0").unwrap_err();
        assert!(err.to_string().contains("--t"));
        let err = parse("eval --p 3 --q 2 --t 1/5,1/7 --m 1,2").unwrap_err();
        assert!(err.to_string().contains("--m"));
        let err = parse("series --p 3 --q 2 --t 1/5,1/7").unwrap_err();
        assert!(err.to_string().contains("--k"));
        let err = parse("series --p 3 --q 2 --t 1/5,1/7 --k 0").unwrap_err();
        assert!(err.to_string().contains("--k"));
        assert_eq!(parse("bogus").unwrap_err().exit_code(), EXIT_USAGE);
    }

    #[test]
    fn thresholds_text() {
        let cfg = parse("thresholds --p 3 --q 2").unwrap();
        let rep = execute(&cfg.command).unwrap();
        let mut buf = Vec::new();
        rep.write(OutputFormat::Text, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("k_main=6") && text.contains("k_regular=2") && text.contains("k_prior=3"));
    }

    #[test]
    fn oracle_nodes_eval() {
        let cfg = parse("eval --p 2 --q 2 --m 1,0 --nodes 1/2,-1/3").unwrap();
        let rep = execute(&cfg.command).unwrap();
        match rep.results {
            RunResults::Eval(e) => assert_eq!(e.exact.map(|x| ratio_to_string(&x)), Some("1/12".into())),
            _ => panic!(),
        }
    }

    #[test]
    fn json_round_trip_of_every_command() {
        for args in [
            "eval --p 3 --q 2 --t 1/5,1/7 --m 3,1",
            "eval --p 3 --q 2 --t 1/6,1/6 --m 3,1",
            "eval --p 2 --q 2 --t 1/6,1/4 --m 2,1 --mode oracle",
            "classify --p 3 --q 3 --t 1/5,1/5,1/7",
            "sweep --p 3 --q 2 --t 1/5,1/7 --nmax 12",
            "series --p 3 --q 2 --t 1/5,1/7 --k 2 --s 1/2 --nmax 16",
            "kmin --p 2 --q 2 --t 1/2,1/2 --kcap 3 --nmax 10",
            "thresholds --p 4 --q 3 --s 3/2",
        ] {
            let cfg = parse(args).unwrap();
            let rep = execute(&cfg.command).unwrap();
            let json = rep.to_json().unwrap();
            let back: RunReport = serde_json::from_str(&json).unwrap();
            assert_eq!(rep, back, "{args}");
        }
    }
}
