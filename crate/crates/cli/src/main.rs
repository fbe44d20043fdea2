use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use freqop::analysis::{self, SamplingConfig};
use freqop::analytic;
use freqop::dense::{self, MATRIX_LIMIT};
use freqop::hilbert::{check_scale, StateRecord, VECTOR_LIMIT};
use freqop::sampler;
use freqop::{EnsembleSpec, StateVector};
use serde::Serialize;

mod output;

use output::{emit, num, opt_num, render, Format, Metadata, Table};

/// Largest deviation tolerated by `verify`.
const ALGEBRA_TOLERANCE: f64 = 1e-13;
/// Largest dense-vs-closed-form deviation tolerated by `stats --cross-check`.
const CROSS_CHECK_TOLERANCE: f64 = 1e-11;
const CROSS_CHECK_MAX_N: usize = analysis::DENSE_CHECK_MAX_N;

#[derive(Parser)]
#[command(name = "freqop", version)]
#[command(
    about = "Frequency operators on N-fold ensembles: brute force, closed forms and sampling"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the operator algebra on explicit matrices for every j and N <= n-max
    Verify(VerifyArgs),
    /// Expectation, uncertainty, distance and Gram value of F^j_N on |psi>^N
    Stats(StatsArgs),
    /// Closed-form (and optionally sampled) statistics over a list of N
    Converge(ConvergeArgs),
    /// Distance to the Born-scaled state against spread of spectral mass
    Noncollapse(NoncollapseArgs),
    /// Monte Carlo frequencies of label j over repeated ensembles
    Sample(SampleArgs),
    /// Weights of |psi>^N on the eigenspaces k/N of F^j_N
    Spectrum(SpectrumArgs),
}

#[derive(Args, Serialize)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Output file; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct StateArgs {
    /// "two-level:P", "uniform:D", or a path to a state JSON file
    #[arg(long)]
    state: String,
    /// Rescale an unnormalized state instead of rejecting it
    #[arg(long)]
    renormalize: bool,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    n_max: usize,
    #[command(flatten)]
    #[serde(skip)]
    output: OutputArgs,
}

#[derive(Args, Serialize)]
struct StatsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    state: StateArgs,
    #[arg(long)]
    j: usize,
    #[arg(long)]
    n: usize,
    /// Compare against the brute-force oracle (N <= 7)
    #[arg(long)]
    cross_check: bool,
    #[command(flatten)]
    #[serde(skip)]
    output: OutputArgs,
}

#[derive(Args, Serialize)]
struct ConvergeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    state: StateArgs,
    #[arg(long)]
    j: usize,
    /// Comma-separated, strictly increasing
    #[arg(long, value_delimiter = ',', required = true)]
    n_list: Vec<usize>,
    /// Add Monte Carlo columns
    #[arg(long)]
    sample: bool,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    output: OutputArgs,
}

#[derive(Args, Serialize)]
struct NoncollapseArgs {
    #[command(flatten)]
    #[serde(flatten)]
    state: StateArgs,
    #[arg(long)]
    j: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    n_list: Vec<usize>,
    #[command(flatten)]
    #[serde(skip)]
    output: OutputArgs,
}

#[derive(Args, Serialize)]
struct SampleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    state: StateArgs,
    #[arg(long, default_value_t = 0)]
    j: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    output: OutputArgs,
}

#[derive(Args, Serialize)]
struct SpectrumArgs {
    #[command(flatten)]
    #[serde(flatten)]
    state: StateArgs,
    #[arg(long)]
    j: usize,
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    #[serde(skip)]
    output: OutputArgs,
}

fn parse_state(args: &StateArgs) -> Result<StateVector> {
    if let Some(p) = args.state.strip_prefix("two-level:") {
        let p: f64 = p
            .parse()
            .with_context(|| format!("bad probability in {:?}", args.state))?;
        return Ok(StateVector::two_level(p)?);
    }
    if let Some(d) = args.state.strip_prefix("uniform:") {
        let d: usize = d
            .parse()
            .with_context(|| format!("bad dimension in {:?}", args.state))?;
        return Ok(StateVector::uniform(d)?);
    }
    let path = Path::new(&args.state);
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let record: StateRecord =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(StateVector::from_record(&record, args.renormalize)?)
}

fn config<T: Serialize>(args: &T) -> serde_json::Value {
    serde_json::to_value(args).expect("arguments serialize")
}

/// Outcome of a command that produced output.
enum Status {
    Pass,
    Breach,
}

fn run(cli: Cli) -> Result<Status> {
    match cli.command {
        Command::Verify(a) => verify(a),
        Command::Stats(a) => stats(a),
        Command::Converge(a) => converge(a),
        Command::Noncollapse(a) => noncollapse(a),
        Command::Sample(a) => sample(a),
        Command::Spectrum(a) => spectrum(a),
    }
}

#[derive(Serialize)]
struct VerifyResult {
    tolerance: f64,
    pass: bool,
    max_deviation: f64,
    reports: Vec<dense::AlgebraReport>,
}

fn verify(a: VerifyArgs) -> Result<Status> {
    if a.dim == 0 || a.n_max == 0 {
        bail!("--dim and --n-max must be positive");
    }
    check_scale("dense operator", a.dim, a.n_max, MATRIX_LIMIT)?;
    let reports = (1..=a.n_max)
        .map(|n| dense::verify_operator_algebra(a.dim, n))
        .collect::<freqop::Result<Vec<_>>>()?;
    let max_deviation = reports
        .iter()
        .map(|r| r.max_deviation())
        .fold(0.0, f64::max);
    let pass = max_deviation <= ALGEBRA_TOLERANCE;
    let result = VerifyResult {
        tolerance: ALGEBRA_TOLERANCE,
        pass,
        max_deviation,
        reports,
    };
    let meta = Metadata::new("verify", config(&a), None);
    let text = render(a.output.format, &meta, &result, || Table {
        header: &[
            "n",
            "identity",
            "commutator",
            "hermiticity",
            "spectrum",
            "construction",
            "eigenrelation",
        ],
        rows: result
            .reports
            .iter()
            .map(|r| {
                vec![
                    r.n.to_string(),
                    num(r.identity),
                    num(r.commutator),
                    num(r.hermiticity),
                    num(r.spectrum),
                    num(r.construction),
                    num(r.eigenrelation),
                ]
            })
            .collect(),
        notes: vec![format!(
            "verdict={} max_deviation={}",
            if pass { "PASS" } else { "FAIL" },
            num(max_deviation)
        )],
    })?;
    emit(&text, a.output.out.as_deref())?;
    eprintln!(
        "{}: max deviation {max_deviation:.3e} (tolerance {ALGEBRA_TOLERANCE:.0e})",
        if pass { "PASS" } else { "FAIL" }
    );
    Ok(if pass { Status::Pass } else { Status::Breach })
}

#[derive(Serialize)]
struct CrossCheck {
    expectation: f64,
    gram: f64,
    distance_sq: f64,
    max_deviation: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct StatsResult {
    n: usize,
    j: usize,
    expectation: f64,
    uncertainty: f64,
    variance: f64,
    distance_sq: f64,
    gram: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    cross_check: Option<CrossCheck>,
}

fn stats(a: StatsArgs) -> Result<Status> {
    let spec = EnsembleSpec::new(parse_state(&a.state)?, a.n, a.j)?;
    let s = analytic::statistics(&spec);
    let cross_check = if a.cross_check {
        if a.n > CROSS_CHECK_MAX_N
            || check_scale("dense check", spec.dim(), a.n, VECTOR_LIMIT).is_err()
        {
            bail!("--cross-check needs N <= {CROSS_CHECK_MAX_N} and d^N <= {VECTOR_LIMIT}");
        }
        let d = dense::dense_statistics(&spec)?;
        let max_deviation = (d.expectation - s.expectation)
            .abs()
            .max((d.gram - s.gram).abs())
            .max((d.distance_sq - s.distance_sq).abs());
        Some(CrossCheck {
            expectation: d.expectation,
            gram: d.gram,
            distance_sq: d.distance_sq,
            max_deviation,
            tolerance: CROSS_CHECK_TOLERANCE,
            pass: max_deviation <= CROSS_CHECK_TOLERANCE,
        })
    } else {
        None
    };
    let pass = cross_check.as_ref().is_none_or(|c| c.pass);
    let result = StatsResult {
        n: s.n,
        j: a.j,
        expectation: s.expectation,
        uncertainty: s.uncertainty(),
        variance: s.variance,
        distance_sq: s.distance_sq,
        gram: s.gram,
        cross_check,
    };
    let meta = Metadata::new("stats", config(&a), None);
    let text = render(a.output.format, &meta, &result, || Table {
        header: &["n", "expectation", "uncertainty", "distance_sq", "gram"],
        rows: vec![vec![
            result.n.to_string(),
            num(result.expectation),
            num(result.uncertainty),
            num(result.distance_sq),
            num(result.gram),
        ]],
        notes: result
            .cross_check
            .iter()
            .map(|c| {
                format!(
                    "cross_check={} max_deviation={}",
                    if c.pass { "PASS" } else { "FAIL" },
                    num(c.max_deviation)
                )
            })
            .collect(),
    })?;
    emit(&text, a.output.out.as_deref())?;
    Ok(if pass { Status::Pass } else { Status::Breach })
}

fn converge(a: ConvergeArgs) -> Result<Status> {
    let state = parse_state(&a.state)?;
    let sampling = a.sample.then_some(SamplingConfig {
        trials: a.trials,
        seed: a.seed,
    });
    let sweep = analysis::convergence_sweep(&state, a.j, &a.n_list, sampling)?;
    let pass = sweep
        .dense_max_deviation
        .is_none_or(|d| d <= CROSS_CHECK_TOLERANCE);
    let meta = Metadata::new("converge", config(&a), a.sample.then_some(a.seed));
    let text = render(a.output.format, &meta, &sweep, || Table {
        header: &[
            "n",
            "distance_sq",
            "uncertainty",
            "max_weight",
            "sampled_mean",
            "sampled_variance",
        ],
        rows: sweep
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.n.to_string(),
                    num(r.distance_sq),
                    num(r.uncertainty),
                    num(r.max_weight),
                    opt_num(r.sampled_mean),
                    opt_num(r.sampled_variance),
                ]
            })
            .collect(),
        notes: vec![format!(
            "slope={}",
            sweep.slope.value().map_or("undefined".into(), num)
        )],
    })?;
    emit(&text, a.output.out.as_deref())?;
    Ok(if pass { Status::Pass } else { Status::Breach })
}

fn noncollapse(a: NoncollapseArgs) -> Result<Status> {
    let state = parse_state(&a.state)?;
    let report = analysis::noncollapse_report(&state, a.j, &a.n_list)?;
    let meta = Metadata::new("noncollapse", config(&a), None);
    let text = render(a.output.format, &meta, &report, || Table {
        header: &[
            "n",
            "distance_sq",
            "max_weight",
            "off_peak_mass",
            "peak_k",
            "scaled_max_weight",
        ],
        rows: report
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.n.to_string(),
                    num(r.distance_sq),
                    num(r.max_weight),
                    num(r.off_peak_mass),
                    r.peak.count.to_string(),
                    num(r.scaled_max_weight),
                ]
            })
            .collect(),
        notes: vec![format!("verdict={}", report.verdict)],
    })?;
    emit(&text, a.output.out.as_deref())?;
    Ok(Status::Pass)
}

fn sample(a: SampleArgs) -> Result<Status> {
    let state = parse_state(&a.state)?;
    let summary = sampler::run_trials(&state, a.n, a.j, a.trials, a.seed)?;
    let meta = Metadata::new("sample", config(&a), Some(a.seed));
    let text = render(a.output.format, &meta, &summary, || Table {
        header: &["trial", "frequency"],
        rows: summary
            .frequencies
            .iter()
            .enumerate()
            .map(|(t, f)| vec![t.to_string(), num(*f)])
            .collect(),
        notes: vec![format!(
            "mean_frequency={} sample_variance={}",
            num(summary.mean_frequency),
            num(summary.sample_variance)
        )],
    })?;
    emit(&text, a.output.out.as_deref())?;
    Ok(Status::Pass)
}

fn spectrum(a: SpectrumArgs) -> Result<Status> {
    let spec = EnsembleSpec::new(parse_state(&a.state)?, a.n, a.j)?;
    let weights = analytic::spectral_weights(&spec)?;
    let meta = Metadata::new("spectrum", config(&a), None);
    let n = weights.n as f64;
    let text = render(a.output.format, &meta, &weights, || Table {
        header: &["k", "eigenvalue", "weight"],
        rows: weights
            .weights
            .iter()
            .enumerate()
            .map(|(k, w)| vec![k.to_string(), num(k as f64 / n), num(*w)])
            .collect(),
        notes: Vec::new(),
    })?;
    emit(&text, a.output.out.as_deref())?;
    Ok(Status::Pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Breach) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
