//! Experiment specification, execution and output for the `qbp` binary.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Parser;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use qldpc_bp::{
    build_planar_surface, build_xzzx_surface, curves_from_rows, estimate_threshold, sweep, BpConfig, ChannelSpec,
    CorrectionScope, Flavor, NoiseModel, StabilizerCode, SweepRow, ThresholdEstimate, UpdateRule, DEFAULT_LLR_CLAMP,
};

pub const DEFAULT_TRIALS: u64 = 10_000;
pub const DEFAULT_SEED: u64 = 1;
/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "QBP_THREADS";

pub const CSV_HEADER: [&str; 17] = [
    "code",
    "L",
    "n",
    "decoder",
    "rule",
    "channel",
    "p_x",
    "p_z",
    "p_y",
    "p",
    "trials",
    "failures",
    "ler",
    "ler_ci95",
    "bp_converged_frac",
    "avg_iterations",
    "seed",
];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Decoder(#[from] qldpc_bp::Error),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 1 for problems with the request, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Decoder(
                qldpc_bp::Error::InvalidParameter(_) | qldpc_bp::Error::InvalidCode(_) | qldpc_bp::Error::Parse { .. },
            ) => 1,
            _ => 2,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeFamily {
    Planar,
    Xzzx,
    File(PathBuf),
}

impl CodeFamily {
    pub fn build(&self, l: usize) -> qldpc_bp::Result<StabilizerCode> {
        match self {
            CodeFamily::Planar => build_planar_surface(l),
            CodeFamily::Xzzx => build_xzzx_surface(l),
            CodeFamily::File(path) => StabilizerCode::load(path),
        }
    }
}

impl fmt::Display for CodeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeFamily::Planar => f.write_str("planar"),
            CodeFamily::Xzzx => f.write_str("xzzx"),
            CodeFamily::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl FromStr for CodeFamily {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "planar" => Ok(CodeFamily::Planar),
            "xzzx" => Ok(CodeFamily::Xzzx),
            other => match other.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(CodeFamily::File(PathBuf::from(p))),
                _ => Err(usage(format!("unknown code `{other}` (planar, xzzx or file:<path>)"))),
            },
        }
    }
}

/// A fully resolved experiment. `iter_max: None` means "code length".
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub code: CodeFamily,
    pub sizes: Vec<usize>,
    pub decoder: Flavor,
    pub rule: UpdateRule,
    pub channel: String,
    pub trials: u64,
    pub iter_max: Option<usize>,
    pub seed: u64,
    pub llr_clamp: f64,
    pub correction: CorrectionScope,
    pub output: Option<PathBuf>,
    pub threshold_output: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn channel_spec(&self) -> Result<ChannelSpec, CliError> {
        self.channel.parse().map_err(|e: qldpc_bp::Error| usage(e.to_string()))
    }

    pub fn noise_models(&self) -> Result<Vec<NoiseModel>, CliError> {
        Ok(self.channel_spec()?.models().to_vec())
    }

    pub fn bp_config(&self) -> BpConfig {
        let mut cfg = BpConfig::new(self.decoder, self.rule, self.iter_max.unwrap_or(1));
        cfg.llr_clamp = self.llr_clamp;
        cfg.correction = self.correction;
        cfg
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.trials == 0 {
            return Err(usage("--trials must be at least 1"));
        }
        if self.iter_max == Some(0) {
            return Err(usage("--iter-max must be at least 1"));
        }
        if !(self.llr_clamp > 0.0 && self.llr_clamp.is_finite()) {
            return Err(usage("--llr-clamp must be positive"));
        }
        if self.sizes.is_empty() {
            return Err(usage("at least one lattice size is required (--L)"));
        }
        if !matches!(self.code, CodeFamily::File(_)) {
            if let Some(l) = self.sizes.iter().find(|&&l| l < 2) {
                return Err(usage(format!("lattice size {l} is below 2")));
            }
        }
        self.channel_spec()?;
        Ok(())
    }
}

/// Command-line flags. Every flag overrides the matching field of
/// `--config`.
#[derive(Clone, Debug, Default, Parser)]
#[command(name = "qbp", version, about = "BP+OSD logical error rate sweeps on surface codes")]
pub struct Args {
    /// planar, xzzx or file:<path> (one Pauli word per line)
    #[arg(long)]
    pub code: Option<String>,
    /// Comma-separated lattice sizes
    #[arg(long = "L", value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// sbp, pdbp or fdbp
    #[arg(long)]
    pub decoder: Option<String>,
    /// min-sum or sum-product
    #[arg(long)]
    pub rule: Option<String>,
    /// x:p, y:p, z:p, depol:p or custom:pX,pZ,pY; p may be a list `a,b` or a range `a..b:step`
    #[arg(long)]
    pub channel: Option<String>,
    /// Trials per point [default: 10000]
    #[arg(long)]
    pub trials: Option<u64>,
    /// Maximum BP iterations [default: code length]
    #[arg(long)]
    pub iter_max: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// all-partners or check-partners
    #[arg(long)]
    pub correction: Option<String>,
    #[arg(long)]
    pub llr_clamp: Option<f64>,
    /// CSV destination [default: stdout]
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Threshold summary JSON (needs at least two sizes)
    #[arg(long)]
    pub threshold_output: Option<PathBuf>,
    /// JSON file with any subset of the spec fields
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Spec fields as they may appear in a `--config` file.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialSpec {
    code: Option<String>,
    #[serde(alias = "L")]
    sizes: Option<Vec<usize>>,
    decoder: Option<String>,
    rule: Option<String>,
    channel: Option<String>,
    trials: Option<u64>,
    iter_max: Option<usize>,
    seed: Option<u64>,
    correction: Option<String>,
    llr_clamp: Option<f64>,
    output: Option<PathBuf>,
    threshold_output: Option<PathBuf>,
}

fn parse_correction(s: &str) -> Result<CorrectionScope, CliError> {
    match s.trim() {
        "all-partners" | "all" => Ok(CorrectionScope::AllPartners),
        "check-partners" | "check" => Ok(CorrectionScope::CheckPartners),
        other => Err(usage(format!("unknown correction scope `{other}`"))),
    }
}

/// Merges flags over an optional config file and applies defaults.
pub fn parse_spec(args: &Args) -> Result<ExperimentSpec, CliError> {
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            serde_json::from_str::<PartialSpec>(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        None => PartialSpec::default(),
    };
    let code = args
        .code
        .clone()
        .or(file.code)
        .ok_or_else(|| usage("--code is required"))?;
    let code: CodeFamily = code.parse()?;
    let sizes = match (args.sizes.clone().or(file.sizes), &code) {
        (Some(s), _) => s,
        (None, CodeFamily::File(_)) => vec![0],
        (None, _) => return Err(usage("--L is required for surface codes")),
    };
    let decoder = args
        .decoder
        .clone()
        .or(file.decoder)
        .ok_or_else(|| usage("--decoder is required"))?;
    let rule = args.rule.clone().or(file.rule).unwrap_or_else(|| "min-sum".into());
    let channel = args
        .channel
        .clone()
        .or(file.channel)
        .ok_or_else(|| usage("--channel is required"))?;
    let correction = match args.correction.clone().or(file.correction) {
        Some(c) => parse_correction(&c)?,
        None => CorrectionScope::default(),
    };
    let spec = ExperimentSpec {
        code,
        sizes,
        decoder: decoder.parse().map_err(|e: qldpc_bp::Error| usage(e.to_string()))?,
        rule: rule.parse().map_err(|e: qldpc_bp::Error| usage(e.to_string()))?,
        channel,
        trials: args.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS),
        iter_max: args.iter_max.or(file.iter_max),
        seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        llr_clamp: args.llr_clamp.or(file.llr_clamp).unwrap_or(DEFAULT_LLR_CLAMP),
        correction,
        output: args.output.clone().or(file.output),
        threshold_output: args.threshold_output.clone().or(file.threshold_output),
    };
    spec.validate()?;
    Ok(spec)
}

/// Threshold summary written next to the CSV.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub code: String,
    pub decoder: Flavor,
    pub rule: UpdateRule,
    pub channel: String,
    pub sizes: Vec<usize>,
    pub estimate: Option<ThresholdEstimate>,
    pub status: String,
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub rows: Vec<SweepRow>,
    pub threshold: Option<ThresholdReport>,
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes the spec comment line, the header and one flushed row per point.
pub fn run_to_writer<W: Write>(spec: &ExperimentSpec, out: W) -> Result<RunSummary, CliError> {
    spec.validate()?;
    let channel = spec.channel_spec()?;
    let noises = channel.models().to_vec();
    let mut out = out;
    writeln!(out, "# {}", serde_json::to_string(spec)?).map_err(io_err(Path::new("<output>")))?;
    let mut csv = csv::WriterBuilder::new().from_writer(out);
    csv.write_record(CSV_HEADER)?;
    csv.flush().map_err(io_err(Path::new("<output>")))?;
    let code_name = spec.code.to_string();
    let rows = sweep(
        |l| spec.code.build(l),
        &spec.sizes,
        &noises,
        spec.bp_config(),
        spec.iter_max,
        spec.trials,
        spec.seed,
        |row| {
            let pt = &row.point;
            csv.write_record([
                code_name.clone(),
                row.l.to_string(),
                row.n.to_string(),
                spec.decoder.to_string(),
                spec.rule.to_string(),
                channel.kind().to_string(),
                pt.p_x.to_string(),
                pt.p_z.to_string(),
                pt.p_y.to_string(),
                pt.p.to_string(),
                pt.trials.to_string(),
                pt.failures.to_string(),
                pt.ler.to_string(),
                pt.ler_ci95.to_string(),
                pt.bp_converged_frac().to_string(),
                pt.avg_iterations.to_string(),
                spec.seed.to_string(),
            ])
            .map_err(|e| qldpc_bp::Error::Io(io::Error::other(e)))?;
            csv.flush()?;
            Ok(())
        },
    )?;

    let threshold = (spec.sizes.len() >= 2).then(|| {
        let estimate = estimate_threshold(&curves_from_rows(&rows));
        ThresholdReport {
            code: code_name.clone(),
            decoder: spec.decoder,
            rule: spec.rule,
            channel: spec.channel.clone(),
            sizes: spec.sizes.clone(),
            status: match &estimate {
                Ok(_) => "ok".into(),
                Err(qldpc_bp::Error::NoCrossing) => "no-crossing".into(),
                Err(e) => e.to_string(),
            },
            estimate: estimate.ok(),
        }
    });
    Ok(RunSummary { rows, threshold })
}

/// Runs `spec`, writing the CSV to its output (or stdout) and the threshold
/// JSON if requested.
pub fn run(spec: &ExperimentSpec) -> Result<RunSummary, CliError> {
    let summary = match &spec.output {
        Some(path) => {
            let file = File::create(path).map_err(io_err(path))?;
            run_to_writer(spec, BufWriter::new(file))?
        }
        None => run_to_writer(spec, io::stdout().lock())?,
    };
    if let Some(path) = &spec.threshold_output {
        match &summary.threshold {
            Some(report) => {
                let mut f = File::create(path).map_err(io_err(path))?;
                serde_json::to_writer_pretty(&mut f, report)?;
                writeln!(f).map_err(io_err(path))?;
            }
            None => eprintln!("qbp: threshold output skipped, it needs at least two lattice sizes"),
        }
    }
    Ok(summary)
}

/// Reads `QBP_THREADS`; unset or empty means rayon's default.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&t| t > 0)
            .map(Some)
            .ok_or_else(|| usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        _ => Ok(None),
    }
}
