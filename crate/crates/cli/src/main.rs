mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use witness_lab::analytic::{self, AnalyticDensity};
use witness_lab::ensemble::{
    self, DecayConfig, DenseCodingScanConfig, EnsembleConfig, EpsilonScaling, LambdaMinScanConfig,
    PtSpectrumConfig, ScanResult, WitnessSpec,
};
use witness_lab::qstate::BipartiteDims;
use witness_lab::stats::{EmpiricalDistribution, HistogramSpec};

use output::RunDir;

pub const WORKERS_ENV: &str = "WITNESS_LAB_WORKERS";

const CSV_HELP: &str = "\
Output files (all CSV use a decimal point and no thousands separators):
  *_histogram.csv  bin_left,bin_right,density   normalized over in-range samples
  *_analytic.csv   bin_left,bin_right,bin_center,density,bin_average
  *_scan.csv       N,m,statistic,std_err,samples
  *_summary.json   scalar results
  manifest.json    command line, config, seed, version, wall time, outputs

Results are identical for every worker count. WITNESS_LAB_WORKERS, when set,
overrides --workers.";

/// Monte Carlo study of entanglement-witness statistics on random bipartite
/// states. N and N' are the dimensions of subsystems A and B; m is the number
/// of pure states mixed with equal weights.
#[derive(Parser)]
#[command(name = "witness-lab", version, after_long_help = CSV_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distribution of the rescaled witness value w = N·N'·tr(Wρ).
    Wdist(WdistArgs),
    /// Eigenvalues of the partially transposed density matrix ρ^{T_B}.
    Ptspec(PtspecArgs),
    /// Mean minimal eigenvalue of ρ^{T_B} against m, and its sign change m*.
    Lmin(LminArgs),
    /// Detection probability P(w<0) against m with a log-slope fit.
    Decay(DecayArgs),
    /// Dense-coding margin S(ρ_A) − S(ρ) against m.
    Densecoding(DenseCodingArgs),
}

#[derive(Args)]
struct Common {
    /// Random seed; equal seeds give identical outputs.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads, 0 for all cores.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct WdistArgs {
    /// Subsystem dimensions N_A N_B.
    #[arg(long, num_args = 2, value_names = ["N_A", "N_B"], default_values_t = [32, 32])]
    dims: Vec<usize>,
    /// Number of sampled states; accepts forms such as 1e5.
    #[arg(long, default_value = "1e5", value_parser = parse_count)]
    samples: usize,
    /// Mixture size m.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    m: u64,
    /// random, rank2:λ (λ may be a fraction such as 1/26), rankk:K or optimal.
    #[arg(long, default_value = "random")]
    witness: WitnessSpec,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct PtspecArgs {
    #[arg(long, num_args = 2, value_names = ["N_A", "N_B"], default_values_t = [32, 32])]
    dims: Vec<usize>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    m: u64,
    /// Number of states whose spectra are pooled.
    #[arg(long, default_value = "10", value_parser = parse_count)]
    states: usize,
    /// Keep the N eigenvalues μ_i² of pure states instead of dropping them.
    #[arg(long)]
    keep_diagonal: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct LminArgs {
    /// Subsystem dimensions N of square bipartitions N×N.
    #[arg(long, num_args = 1.., value_delimiter = ',', default_values_t = [8, 16])]
    dims_list: Vec<usize>,
    /// Mixture sizes m.
    #[arg(long, num_args = 1.., value_delimiter = ',', default_values_t = [1])]
    m_list: Vec<usize>,
    /// Repetitions per point (at least 6); default 1000/100/10/6 by size.
    #[arg(long, value_parser = parse_count)]
    reps: Option<usize>,
    /// Accuracy ε₀ for the critical mixture size m_crit.
    #[arg(long)]
    epsilon: Option<f64>,
    /// How ε scales with N: const, inv-n or inv-n2.
    #[arg(long, default_value = "const", value_parser = parse_scaling)]
    scaling: EpsilonScaling,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct DecayArgs {
    #[arg(long, num_args = 2, value_names = ["N_A", "N_B"], default_values_t = [32, 32])]
    dims: Vec<usize>,
    /// Largest mixture size m.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    m_max: u64,
    /// Lower bound on samples per m.
    #[arg(long, default_value = "1e5", value_parser = parse_count)]
    min_samples: usize,
    /// Samples per m grow until this many negative values are expected.
    #[arg(long, default_value = "4000", value_parser = parse_count)]
    target_tail: usize,
    /// First m in the log-slope fit.
    #[arg(long, default_value_t = 3)]
    fit_from: usize,
    #[arg(long, default_value = "random")]
    witness: WitnessSpec,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct DenseCodingArgs {
    #[arg(long, num_args = 2, value_names = ["N_A", "N_B"], default_values_t = [16, 16])]
    dims: Vec<usize>,
    #[arg(long, num_args = 1.., value_delimiter = ',', default_values_t = [1, 4, 16, 64])]
    m_list: Vec<usize>,
    #[arg(long, default_value = "4", value_parser = parse_count)]
    reps: usize,
    #[command(flatten)]
    common: Common,
}

fn parse_count(s: &str) -> Result<usize, String> {
    if let Ok(n) = s.parse::<usize>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("not a count: {s:?}"))?;
    if x.fract() != 0.0 || !(0.0..=9.0e15).contains(&x) {
        return Err(format!("not a whole nonnegative count: {s:?}"));
    }
    Ok(x as usize)
}

fn parse_scaling(s: &str) -> Result<EpsilonScaling, String> {
    match s {
        "const" => Ok(EpsilonScaling::Const),
        "inv-n" | "inv_n" => Ok(EpsilonScaling::InvN),
        "inv-n2" | "inv_n2" => Ok(EpsilonScaling::InvN2),
        _ => Err(format!("unknown scaling {s:?}; expected const, inv-n or inv-n2")),
    }
}

/// `--workers`, unless the environment variable overrides it; 0 resolves to
/// the number of available cores.
fn resolve_workers(flag: usize) -> Result<usize> {
    let n = match std::env::var(WORKERS_ENV) {
        Ok(v) => v.trim().parse().with_context(|| format!("{WORKERS_ENV}={v:?} is not a count"))?,
        Err(_) => flag,
    };
    Ok(if n == 0 { std::thread::available_parallelism().map_or(1, |p| p.get()) } else { n })
}

fn bipartite(d: &[usize]) -> Result<BipartiteDims> {
    Ok(BipartiteDims::new(d[0], d[1])?)
}

#[derive(Serialize)]
struct HistogramRow {
    bin_left: f64,
    bin_right: f64,
    density: f64,
}

fn histogram_rows(d: &EmpiricalDistribution) -> Vec<HistogramRow> {
    d.bin_edges
        .windows(2)
        .zip(&d.densities)
        .map(|(e, &density)| HistogramRow { bin_left: e[0], bin_right: e[1], density })
        .collect()
}

#[derive(Serialize)]
struct AnalyticRow {
    bin_left: f64,
    bin_right: f64,
    bin_center: f64,
    density: f64,
    /// Density averaged over the bin, comparable with the histogram.
    bin_average: f64,
}

fn analytic_rows(a: &AnalyticDensity, spec: &HistogramSpec) -> Result<Vec<AnalyticRow>> {
    let edges = spec.edges();
    edges
        .windows(2)
        .map(|e| {
            let c = 0.5 * (e[0] + e[1]);
            Ok(AnalyticRow {
                bin_left: e[0],
                bin_right: e[1],
                bin_center: c,
                density: a.density(c)?,
                bin_average: a.mass_between(e[0], e[1]) / (e[1] - e[0]),
            })
        })
        .collect()
}

#[derive(Serialize)]
struct ScanCsvRow {
    #[serde(rename = "N")]
    n: usize,
    m: usize,
    statistic: f64,
    std_err: f64,
    samples: usize,
}

fn scan_rows(s: &ScanResult) -> Vec<ScanCsvRow> {
    s.rows
        .iter()
        .map(|r| ScanCsvRow { n: r.n, m: r.m, statistic: r.statistic, std_err: r.std_err, samples: r.samples })
        .collect()
}

#[derive(Serialize)]
struct AnalyticOverlay {
    density: AnalyticDensity,
    detection_probability: Option<f64>,
    ks_distance: f64,
}

#[derive(Serialize)]
struct WdistSummary<'a> {
    samples: usize,
    m: usize,
    witness: String,
    distribution: &'a EmpiricalDistribution,
    analytic: Option<AnalyticOverlay>,
    cumulants: Option<ensemble::CumulantReport>,
}

fn cmd_wdist(a: WdistArgs) -> Result<()> {
    let workers = resolve_workers(a.common.workers)?;
    let config = EnsembleConfig::new(bipartite(&a.dims)?, a.samples, a.m as usize, a.witness, a.common.seed)
        .with_workers(workers);
    config.validate()?;
    let run = ensemble::run_w_ensemble(&config)?;
    let dist = run.distribution();
    let prediction = a.witness.analytic_density(config.m);

    let mut out = RunDir::create(&a.common.out)?;
    out.csv("wdist_histogram.csv", histogram_rows(dist))?;
    let analytic = match &prediction {
        Some(p) => {
            out.csv("wdist_analytic.csv", analytic_rows(p, &config.histogram)?)?;
            Some(AnalyticOverlay {
                density: *p,
                detection_probability: analytic::detection_probability(p).ok(),
                ks_distance: p.ks_distance(run.values())?,
            })
        }
        None => None,
    };
    let cumulants = match &run.witness {
        Some(w) => ensemble::witness_trace_powers(w, 4)
            .ok()
            .map(|_| ensemble::cumulant_report(dist, w, config.m))
            .transpose()?,
        None => None,
    };
    let summary = WdistSummary {
        samples: config.samples,
        m: config.m,
        witness: a.witness.to_string(),
        distribution: dist,
        analytic,
        cumulants,
    };
    out.json("wdist_summary.json", &summary)?;
    out.finish("wdist", &config, config.seed, workers)
}

#[derive(Serialize)]
struct PtspecSummary {
    states: usize,
    m: usize,
    eigenvalues: usize,
    excluded_diagonal: usize,
    ks_vs_analytic: Option<f64>,
    beyond_support_fraction: f64,
    /// μ₄/μ₂² of the centered N·N'·λ; 2 for a semicircle, 3 for a Gaussian.
    kurtosis_ratio: witness_lab::stats::Estimate,
    y: EmpiricalDistribution,
}

fn cmd_ptspec(a: PtspecArgs) -> Result<()> {
    let workers = resolve_workers(a.common.workers)?;
    let dims = bipartite(&a.dims)?;
    let mut config = PtSpectrumConfig::new(dims, a.m as usize, a.states, a.common.seed);
    config.workers = workers;
    config.exclude_diagonal = !a.keep_diagonal;
    if config.states == 0 {
        bail!("--states must be >= 1");
    }
    let spec = ensemble::run_pt_spectrum(&config)?;

    let mut out = RunDir::create(&a.common.out)?;
    out.csv("ptspec_y_histogram.csv", histogram_rows(&spec.y.distribution))?;
    if config.m >= dims.n_a() {
        out.csv("ptspec_scaled_histogram.csv", histogram_rows(&spec.scaled.distribution))?;
    }
    if config.m == 1 {
        out.csv("ptspec_analytic.csv", analytic_rows(&AnalyticDensity::PtEigs, &config.histogram)?)?;
    }
    let summary = PtspecSummary {
        states: config.states,
        m: config.m,
        eigenvalues: spec.y.values.len(),
        excluded_diagonal: spec.excluded,
        ks_vs_analytic: spec.ks_vs_analytic,
        beyond_support_fraction: spec.beyond_support,
        kurtosis_ratio: spec.kurtosis_ratio,
        y: spec.y.distribution.clone(),
    };
    out.json("ptspec_summary.json", &summary)?;
    out.finish("ptspec", &config, config.seed, workers)
}

#[derive(Serialize)]
struct SignChange {
    #[serde(rename = "N")]
    n: usize,
    m_star: Option<f64>,
    m_star_over_n2: Option<f64>,
}

#[derive(Serialize)]
struct LminSummary {
    sign_changes: Vec<SignChange>,
    /// N·λ̄_min for rows with m = 1.
    pure_state_scaled: Vec<(usize, f64)>,
    monotonicity_violations: Vec<(usize, usize, usize)>,
    critical_m: Option<ensemble::CriticalM>,
}

fn cmd_lmin(a: LminArgs) -> Result<()> {
    let workers = resolve_workers(a.common.workers)?;
    if a.m_list.contains(&0) {
        bail!("--m-list entries must be >= 1");
    }
    let config = LambdaMinScanConfig {
        n_list: a.dims_list.clone(),
        m_list: a.m_list.clone(),
        repetitions: a.reps,
        seed: a.common.seed,
        workers,
    };
    let scan = ensemble::run_lambda_min_scan(&config)?;
    let critical_m = a.epsilon.map(|e| ensemble::critical_m(&scan, e, a.scaling)).transpose()?;
    let summary = LminSummary {
        sign_changes: scan
            .crossings
            .iter()
            .map(|c| SignChange { n: c.n, m_star: c.m, m_star_over_n2: c.m.map(|m| m / (c.n * c.n) as f64) })
            .collect(),
        pure_state_scaled: scan.rows.iter().filter(|r| r.m == 1).map(|r| (r.n, r.n as f64 * r.statistic)).collect(),
        monotonicity_violations: scan.monotonicity_violations.clone(),
        critical_m,
    };

    let mut out = RunDir::create(&a.common.out)?;
    out.csv("lmin_scan.csv", scan_rows(&scan))?;
    out.json("lmin_summary.json", &summary)?;
    out.finish("lmin", &config, config.seed, workers)
}

fn cmd_decay(a: DecayArgs) -> Result<()> {
    let workers = resolve_workers(a.common.workers)?;
    let mut config = DecayConfig::new(bipartite(&a.dims)?, a.m_max as usize, a.common.seed);
    config.min_samples = a.min_samples;
    config.target_tail_count = a.target_tail;
    config.fit_from = a.fit_from;
    config.witness = a.witness;
    config.workers = workers;
    if config.min_samples == 0 {
        bail!("--min-samples must be >= 1");
    }
    let scan = ensemble::run_mixture_decay(&config)?;

    let mut out = RunDir::create(&a.common.out)?;
    out.csv("decay_scan.csv", scan_rows(&scan.scan))?;
    out.json("decay_summary.json", &scan)?;
    out.finish("decay", &config, config.seed, workers)
}

fn cmd_densecoding(a: DenseCodingArgs) -> Result<()> {
    let workers = resolve_workers(a.common.workers)?;
    let config = DenseCodingScanConfig {
        dims: bipartite(&a.dims)?,
        m_list: a.m_list.clone(),
        repetitions: a.reps,
        seed: a.common.seed,
        workers,
    };
    let scan = ensemble::run_dense_coding_scan(&config)?;

    let mut out = RunDir::create(&a.common.out)?;
    out.csv("densecoding_scan.csv", scan_rows(&scan))?;
    out.json("densecoding_summary.json", &scan)?;
    out.finish("densecoding", &config, config.seed, workers)
}

fn main() -> ExitCode {
    output::start_clock();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Wdist(a) => cmd_wdist(a),
        Command::Ptspec(a) => cmd_ptspec(a),
        Command::Lmin(a) => cmd_lmin(a),
        Command::Decay(a) => cmd_decay(a),
        Command::Densecoding(a) => cmd_densecoding(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
