//! Seeded Monte Carlo ensembles and parameter scans.
//!
//! Every random draw comes from a ChaCha8 generator seeded with the run seed
//! and switched to a stream chosen by the sample's global index, never by the
//! worker that happens to process it. Results are collected in index order
//! before any reduction, so output is bit-identical for every worker count.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::analytic::{self, AnalyticDensity};
use crate::error::{invalid, Error, Result};
use crate::linalg;
use crate::qstate::{self, BipartiteDims, MixedState};
use crate::stats::{self, Draws, Estimate, HistogramSpec, LinearFit};
use crate::witness::{self, Rank2WitnessParams, Witness};

/// Stream reserved for drawing the fixed witness of an ensemble.
pub const WITNESS_STREAM: u64 = u64::MAX;

/// Generator for global sample index `index` under `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Maps `f` over `0..n` on a pool of `workers` threads (0 picks the rayon
/// default), returning results in index order.
pub fn par_map<T, F>(workers: usize, n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    if workers == 1 {
        return (0..n).map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
    pool.install(|| (0..n).into_par_iter().map(f).collect())
}

/// Which witness an ensemble measures with.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WitnessSpec {
    /// `(|φ⟩⟨φ|)^{T_B}` with a Haar-random `φ` drawn once per ensemble.
    RandomFullRank,
    /// `φ = √λ|00⟩ + √(1−λ)|11⟩`.
    Rank2 { lambda: f64 },
    /// `k` Haar-random orthonormal vectors with weights `1/k`.
    RankK { k: usize },
    /// A fresh optimal witness for every state, so `w = N·N'·λ_min`.
    OptimalPerState,
}

impl WitnessSpec {
    /// The fixed witness of an ensemble, drawn from [`WITNESS_STREAM`];
    /// `None` for [`WitnessSpec::OptimalPerState`].
    pub fn build(&self, dims: BipartiteDims, seed: u64) -> Result<Option<Witness>> {
        let mut rng = stream_rng(seed, WITNESS_STREAM);
        Ok(Some(match *self {
            Self::RandomFullRank => witness::witness_from_vector(qstate::sample_random_pure(dims, &mut rng)),
            Self::Rank2 { lambda } => Rank2WitnessParams::new(lambda)?.witness(dims),
            Self::RankK { k } => {
                witness::witness_rank_k(qstate::sample_orthonormal_states(dims, k, &mut rng)?, None)?
            }
            Self::OptimalPerState => return Ok(None),
        }))
    }

    /// Large-N prediction for the density of `w` on pure states.
    pub fn analytic_density(&self, m: usize) -> Option<AnalyticDensity> {
        match *self {
            Self::RandomFullRank => Some(AnalyticDensity::GaussWidth { k: m as f64 }),
            Self::Rank2 { lambda } if m == 1 => Some(AnalyticDensity::Rank2 { lambda }),
            Self::RankK { k } => Some(AnalyticDensity::GaussWidth { k: (k * m) as f64 }),
            _ => None,
        }
    }
}

impl fmt::Display for WitnessSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::RandomFullRank => write!(f, "random"),
            Self::Rank2 { lambda } => write!(f, "rank2:{lambda}"),
            Self::RankK { k } => write!(f, "rankk:{k}"),
            Self::OptimalPerState => write!(f, "optimal"),
        }
    }
}

impl FromStr for WitnessSpec {
    type Err = Error;

    /// `random`, `optimal`, `rankk:K` or `rank2:λ` with `λ` a decimal or a
    /// fraction such as `1/26`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "random" => return Ok(Self::RandomFullRank),
            "optimal" => return Ok(Self::OptimalPerState),
            _ => {}
        }
        if let Some(v) = s.strip_prefix("rank2:") {
            let lambda = parse_fraction(v)?;
            Rank2WitnessParams::new(lambda)?;
            return Ok(Self::Rank2 { lambda });
        }
        if let Some(v) = s.strip_prefix("rankk:") {
            let k: usize = v.parse().map_err(|_| invalid(format!("bad rank {v:?}")))?;
            if k == 0 {
                return Err(invalid("rank k must be >= 1"));
            }
            return Ok(Self::RankK { k });
        }
        Err(invalid(format!("unknown witness {s:?}; expected random, rank2:λ, rankk:K or optimal")))
    }
}

fn parse_fraction(v: &str) -> Result<f64> {
    let bad = || invalid(format!("bad number {v:?}"));
    match v.split_once('/') {
        Some((a, b)) => {
            let (a, b): (f64, f64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            Ok(a / b)
        }
        None => v.trim().parse().map_err(|_| bad()),
    }
}

impl Serialize for WitnessSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for WitnessSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub dims: BipartiteDims,
    pub samples: usize,
    /// Mixture size of each measured state.
    pub m: usize,
    pub witness: WitnessSpec,
    pub seed: u64,
    /// Thread count; 0 uses every available core. Never affects results.
    pub workers: usize,
    pub histogram: HistogramSpec,
}

impl EnsembleConfig {
    pub fn new(dims: BipartiteDims, samples: usize, m: usize, witness: WitnessSpec, seed: u64) -> Self {
        Self { dims, samples, m, witness, seed, workers: 0, histogram: HistogramSpec::W }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(invalid("samples must be >= 1"));
        }
        if self.m == 0 {
            return Err(invalid("mixture size m must be >= 1"));
        }
        Ok(())
    }
}

/// Output of [`run_w_ensemble`].
#[derive(Clone, Debug)]
pub struct WEnsemble {
    pub draws: Draws,
    /// The fixed witness, absent for optimal-per-state runs.
    pub witness: Option<Witness>,
}

impl WEnsemble {
    pub fn values(&self) -> &[f64] {
        &self.draws.values
    }

    pub fn distribution(&self) -> &stats::EmpiricalDistribution {
        &self.draws.distribution
    }
}

/// Samples `config.samples` mixtures of `config.m` Haar-random states and
/// measures `w` on each against one witness fixed for the whole run.
pub fn run_w_ensemble(config: &EnsembleConfig) -> Result<WEnsemble> {
    config.validate()?;
    let values = sample_w(config, 0)?;
    let witness = config.witness.build(config.dims, config.seed)?;
    Ok(WEnsemble { draws: Draws::new(values, config.histogram)?, witness })
}

/// Raw `w` draws for sample indices `offset..offset + samples`.
fn sample_w(config: &EnsembleConfig, offset: u64) -> Result<Vec<f64>> {
    let dims = config.dims;
    let witness = config.witness.build(dims, config.seed)?;
    let (m, seed) = (config.m, config.seed);
    par_map(config.workers, config.samples, |i| {
        let mut rng = stream_rng(seed, offset + i as u64);
        let state = qstate::mix_random_states(dims, m, &mut rng)?;
        match &witness {
            Some(w) => Ok(w.expectation(&state)?.w),
            None => Ok(dims.total() as f64 * lambda_min(&state)?),
        }
    })
}

/// `λ_min(ρ^{T_B})`, through the Schmidt coefficients for a single component.
pub fn lambda_min(state: &MixedState) -> Result<f64> {
    match state.components() {
        Some([psi]) => qstate::pure_pt_min_eigenvalue(psi),
        _ => Ok(linalg::hermitian_eigenvalues_unchecked(&state.partial_transpose_b())?[0]),
    }
}

/// One row of a scan: a statistic at `(N, m)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub n: usize,
    pub m: usize,
    pub statistic: f64,
    pub std_err: f64,
    pub samples: usize,
}

/// Where the scanned statistic changes sign at fixed `N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Crossing {
    pub n: usize,
    /// Linear interpolation between the bracketing grid points.
    pub m: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanResult {
    pub statistic: String,
    pub rows: Vec<ScanRow>,
    /// Adjacent `(N, m_lo, m_hi)` pairs where the statistic drops by more than
    /// two combined standard errors as `m` grows. Recorded, not enforced.
    pub monotonicity_violations: Vec<(usize, usize, usize)>,
    pub crossings: Vec<Crossing>,
    pub fit: Option<LinearFit>,
    pub metadata: BTreeMap<String, String>,
}

impl ScanResult {
    fn new(statistic: &str, rows: Vec<ScanRow>, metadata: BTreeMap<String, String>) -> Self {
        let monotonicity_violations = monotonicity_violations(&rows);
        let crossings = crossings(&rows, 0.0);
        Self { statistic: statistic.into(), rows, monotonicity_violations, crossings, fit: None, metadata }
    }

    pub fn is_monotone(&self) -> bool {
        self.monotonicity_violations.is_empty()
    }

    pub fn rows_for(&self, n: usize) -> impl Iterator<Item = &ScanRow> {
        self.rows.iter().filter(move |r| r.n == n)
    }

    pub fn ns(&self) -> Vec<usize> {
        let mut ns: Vec<usize> = self.rows.iter().map(|r| r.n).collect();
        ns.dedup();
        ns
    }

    pub fn crossing(&self, n: usize) -> Option<f64> {
        self.crossings.iter().find(|c| c.n == n).and_then(|c| c.m)
    }
}

fn monotonicity_violations(rows: &[ScanRow]) -> Vec<(usize, usize, usize)> {
    rows.windows(2)
        .filter(|p| p[0].n == p[1].n && p[1].m > p[0].m)
        .filter(|p| {
            let tol = 2.0 * p[0].std_err.hypot(p[1].std_err);
            p[1].statistic < p[0].statistic - tol
        })
        .map(|p| (p[0].n, p[0].m, p[1].m))
        .collect()
}

/// First upward crossing of `level` per `N`, rows assumed sorted by `m`.
fn crossings(rows: &[ScanRow], level: f64) -> Vec<Crossing> {
    let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    ns.dedup();
    ns.into_iter()
        .map(|n| {
            let r: Vec<&ScanRow> = rows.iter().filter(|r| r.n == n).collect();
            let m = r.windows(2).find(|p| p[0].statistic < level && p[1].statistic >= level).map(|p| {
                let (x0, x1) = (p[0].m as f64, p[1].m as f64);
                let (y0, y1) = (p[0].statistic - level, p[1].statistic - level);
                x0 + (x1 - x0) * (-y0) / (y1 - y0)
            });
            Crossing { n, m }
        })
        .collect()
}

/// Per-`m` tail estimate of [`run_mixture_decay`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayRow {
    pub m: usize,
    pub samples: usize,
    pub neg_tail: Estimate,
    /// `(1 − erf(√(m/2)))/2`.
    pub exact: f64,
    pub asymptotic: f64,
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayConfig {
    pub dims: BipartiteDims,
    pub m_max: usize,
    /// Lower bound on samples per point.
    pub min_samples: usize,
    /// Samples per point are raised until the expected number of negative
    /// draws reaches this count.
    pub target_tail_count: usize,
    /// First `m` included in the log-slope fit.
    pub fit_from: usize,
    pub witness: WitnessSpec,
    pub seed: u64,
    pub workers: usize,
}

impl DecayConfig {
    pub fn new(dims: BipartiteDims, m_max: usize, seed: u64) -> Self {
        Self {
            dims,
            m_max,
            min_samples: 100_000,
            target_tail_count: 4000,
            fit_from: 3,
            witness: WitnessSpec::RandomFullRank,
            seed,
            workers: 0,
        }
    }

    pub fn samples_for(&self, m: usize) -> Result<usize> {
        let p = analytic::detection_probability_mixture(m)?;
        Ok(self.min_samples.max((self.target_tail_count as f64 / p).ceil() as usize))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayScan {
    pub rows: Vec<DecayRow>,
    /// Weighted fit of `ln P(w<0)` against `m` over `m ≥ fit_from`.
    pub fit: Option<LinearFit>,
    pub fit_window: (usize, usize),
    pub scan: ScanResult,
}

/// Detection probability `P(w<0)` against mixture size `m = 1..=m_max` for
/// one fixed witness, with a log-slope fit.
pub fn run_mixture_decay(config: &DecayConfig) -> Result<DecayScan> {
    if config.m_max == 0 {
        return Err(invalid("m_max must be >= 1"));
    }
    let mut rows = Vec::with_capacity(config.m_max);
    for m in 1..=config.m_max {
        let samples = config.samples_for(m)?;
        let ec = EnsembleConfig {
            dims: config.dims,
            samples,
            m,
            witness: config.witness,
            seed: config.seed,
            workers: config.workers,
            histogram: HistogramSpec::W,
        };
        let values = sample_w(&ec, (m as u64) << 40)?;
        let neg = values.iter().filter(|&&w| w < 0.0).count() as f64;
        let p = neg / samples as f64;
        let se = (p * (1.0 - p) / samples as f64).sqrt();
        let exact = analytic::detection_probability_mixture(m)?;
        rows.push(DecayRow {
            m,
            samples,
            neg_tail: Estimate { value: p, std_err: se },
            exact,
            asymptotic: analytic::detection_probability_asymptotic(m)?,
            z: (p - exact) / se,
        });
    }
    let window: Vec<&DecayRow> =
        rows.iter().filter(|r| r.m >= config.fit_from && r.neg_tail.value > 0.0).collect();
    let fit = if window.len() >= 2 {
        let x: Vec<f64> = window.iter().map(|r| r.m as f64).collect();
        let y: Vec<f64> = window.iter().map(|r| r.neg_tail.value.ln()).collect();
        let s: Vec<f64> = window.iter().map(|r| r.neg_tail.std_err / r.neg_tail.value).collect();
        Some(stats::linear_fit(&x, &y, &s)?)
    } else {
        None
    };
    let n = config.dims.n_a();
    let scan_rows = rows
        .iter()
        .map(|r| ScanRow { n, m: r.m, statistic: r.neg_tail.value, std_err: r.neg_tail.std_err, samples: r.samples })
        .collect();
    let mut meta = BTreeMap::new();
    meta.insert("dims".into(), format!("{}x{}", config.dims.n_a(), config.dims.n_b()));
    meta.insert("witness".into(), config.witness.to_string());
    meta.insert("seed".into(), config.seed.to_string());
    let mut scan = ScanResult::new("detection_probability", scan_rows, meta);
    scan.crossings.clear();
    scan.fit = fit;
    Ok(DecayScan { rows, fit, fit_window: (config.fit_from, config.m_max), scan })
}

/// Exact-form slope of `ln[(1 − erf(√(m/2)))/2]` over `m ∈ [lo, hi]`.
pub fn exact_decay_slope(lo: usize, hi: usize) -> Result<f64> {
    let x: Vec<f64> = (lo..=hi).map(|m| m as f64).collect();
    let y = (lo..=hi)
        .map(|m| analytic::detection_probability_mixture(m).map(f64::ln))
        .collect::<Result<Vec<f64>>>()?;
    Ok(stats::linear_fit(&x, &y, &vec![1.0; x.len()])?.slope)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PtSpectrumConfig {
    pub dims: BipartiteDims,
    pub m: usize,
    pub states: usize,
    pub seed: u64,
    pub workers: usize,
    /// For pure states, drop the `N` eigenvalues matching `μ_i²`.
    pub exclude_diagonal: bool,
    pub histogram: HistogramSpec,
}

impl PtSpectrumConfig {
    pub fn new(dims: BipartiteDims, m: usize, states: usize, seed: u64) -> Self {
        Self { dims, m, states, seed, workers: 0, exclude_diagonal: true, histogram: HistogramSpec::Y }
    }
}

#[derive(Clone, Debug)]
pub struct PtSpectrum {
    /// `y = N_A·λ`, pooled over all states.
    pub y: Draws,
    /// `N·N'·λ`, pooled; its centered kurtosis tests the semicircle.
    pub scaled: Draws,
    pub kurtosis_ratio: Estimate,
    /// Fraction of pooled `|y|` above `4.5`.
    pub beyond_support: f64,
    /// KS distance of `y` to the pure-state density; only for `m = 1`.
    pub ks_vs_analytic: Option<f64>,
    pub excluded: usize,
}

/// Pools eigenvalues of `ρ^{T_B}` over `states` random mixtures of `m`
/// states, each found by a full Hermitian eigensolve.
pub fn run_pt_spectrum(config: &PtSpectrumConfig) -> Result<PtSpectrum> {
    if config.states == 0 || config.m == 0 {
        return Err(invalid("states and m must be >= 1"));
    }
    let dims = config.dims;
    let exclude = config.exclude_diagonal && config.m == 1;
    let per_state = par_map(config.workers, config.states, |i| {
        let mut rng = stream_rng(config.seed, i as u64);
        let state = qstate::mix_random_states(dims, config.m, &mut rng)?;
        let mut eig = linalg::hermitian_eigenvalues_unchecked(&state.partial_transpose_b())?;
        let mut dropped = 0;
        if exclude {
            let psi = &state.components().expect("component form")[0];
            for mu in qstate::schmidt_coefficients(psi)? {
                let target = mu * mu;
                if let Some((k, _)) = eig
                    .iter()
                    .enumerate()
                    .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))
                {
                    eig.remove(k);
                    dropped += 1;
                }
            }
        }
        Ok((eig, dropped))
    })?;
    let all: Vec<f64> = per_state.iter().flat_map(|(e, _)| e.iter().copied()).collect();
    let excluded = per_state.iter().map(|(_, d)| d).sum();
    let n = dims.n_a() as f64;
    let d = dims.total() as f64;
    let y: Vec<f64> = all.iter().map(|l| n * l).collect();
    let scaled: Vec<f64> = all.iter().map(|l| d * l).collect();
    let beyond_support = y.iter().filter(|v| v.abs() > 4.5).count() as f64 / y.len() as f64;
    let ks_vs_analytic =
        if config.m == 1 { Some(AnalyticDensity::PtEigs.ks_distance(&y)?) } else { None };
    let kurtosis_ratio = stats::kurtosis_ratio_estimate(&scaled);
    let scaled_spec = HistogramSpec::covering(&scaled, config.histogram.bins)?;
    Ok(PtSpectrum {
        y: Draws::new(y, config.histogram)?,
        scaled: Draws::new(scaled, scaled_spec)?,
        kurtosis_ratio,
        beyond_support,
        ks_vs_analytic,
        excluded,
    })
}

/// Repetitions per point used for the minimal-eigenvalue scans, by total
/// dimension: 1000, 100, 10 and 6 for `N² ≤ 2⁶, 2⁸, 2¹⁰` and above.
pub fn default_repetitions(dims: BipartiteDims) -> usize {
    match dims.total() {
        0..=64 => 1000,
        65..=256 => 100,
        257..=1024 => 10,
        _ => 6,
    }
}

pub const MIN_REPETITIONS: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaMinScanConfig {
    /// Subsystem dimensions `N` (square bipartitions).
    pub n_list: Vec<usize>,
    pub m_list: Vec<usize>,
    /// Repetitions per point; `None` uses [`default_repetitions`].
    pub repetitions: Option<usize>,
    pub seed: u64,
    pub workers: usize,
}

/// `λ̄_min(ρ^{T_B})` over a grid of `(N, m)` with the sign change `m*` per
/// `N`.
pub fn run_lambda_min_scan(config: &LambdaMinScanConfig) -> Result<ScanResult> {
    if config.n_list.is_empty() || config.m_list.is_empty() {
        return Err(invalid("empty N or m list"));
    }
    if config.m_list.contains(&0) {
        return Err(invalid("mixture size m must be >= 1"));
    }
    let mut m_list = config.m_list.clone();
    m_list.sort_unstable();
    m_list.dedup();
    let mut rows = Vec::new();
    for (ni, &n) in config.n_list.iter().enumerate() {
        let dims = BipartiteDims::square(n)?;
        let reps = config.repetitions.unwrap_or_else(|| default_repetitions(dims));
        if reps < MIN_REPETITIONS {
            return Err(invalid(format!("at least {MIN_REPETITIONS} repetitions per point are required")));
        }
        for (mi, &m) in m_list.iter().enumerate() {
            let base = ((ni as u64) << 48) | ((mi as u64) << 32);
            let lmins = par_map(config.workers, reps, |r| {
                let mut rng = stream_rng(config.seed, base | r as u64);
                lambda_min(&qstate::mix_random_states(dims, m, &mut rng)?)
            })?;
            let e = stats::mean_estimate(&lmins);
            rows.push(ScanRow { n, m, statistic: e.value, std_err: e.std_err, samples: reps });
        }
    }
    let mut meta = BTreeMap::new();
    meta.insert("n_list".into(), format!("{:?}", config.n_list));
    meta.insert("m_list".into(), format!("{m_list:?}"));
    meta.insert("seed".into(), config.seed.to_string());
    Ok(ScanResult::new("mean_lambda_min", rows, meta))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonScaling {
    Const,
    InvN,
    InvN2,
}

impl EpsilonScaling {
    pub fn epsilon(&self, eps0: f64, n: usize) -> f64 {
        let n = n as f64;
        match self {
            Self::Const => eps0,
            Self::InvN => eps0 / n,
            Self::InvN2 => eps0 / (n * n),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CriticalRow {
    pub n: usize,
    pub epsilon: f64,
    /// Interpolated `m` where `λ̄_min` rises through `−ε`; 0 when even the
    /// smallest scanned `m` is not below `−ε`.
    pub m_crit: f64,
    /// `λ̄_min` is still below `−ε` at the largest scanned `m`; `m_crit` is
    /// then only a lower bound.
    pub insufficient_range: bool,
    pub m_crit_over_n: f64,
    pub m_crit_over_n2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalM {
    pub scaling: EpsilonScaling,
    pub eps0: f64,
    pub rows: Vec<CriticalRow>,
    /// `max/min` of `m_crit/N²` over rows with `m_crit > 0`.
    pub n2_ratio_spread: Option<f64>,
    /// `m_crit/N` decreases with `N` across all rows.
    pub over_n_decreasing: bool,
}

/// Largest `m` at which `λ̄_min < −ε(N)`, i.e. at which the mean optimal
/// witness still beats measurement accuracy `ε`.
pub fn critical_m(scan: &ScanResult, eps0: f64, scaling: EpsilonScaling) -> Result<CriticalM> {
    if !(eps0 >= 0.0) {
        return Err(invalid("epsilon must be >= 0"));
    }
    let mut rows = Vec::new();
    for n in scan.ns() {
        let eps = scaling.epsilon(eps0, n);
        let pts: Vec<&ScanRow> = scan.rows_for(n).collect();
        let level = -eps;
        let row = if pts[0].statistic >= level {
            (0.0, false)
        } else {
            match pts.windows(2).find(|p| p[0].statistic < level && p[1].statistic >= level) {
                Some(p) => {
                    let (x0, x1) = (p[0].m as f64, p[1].m as f64);
                    let (y0, y1) = (p[0].statistic - level, p[1].statistic - level);
                    (x0 + (x1 - x0) * (-y0) / (y1 - y0), false)
                }
                None => (pts.last().expect("nonempty").m as f64, true),
            }
        };
        let nf = n as f64;
        rows.push(CriticalRow {
            n,
            epsilon: eps,
            m_crit: row.0,
            insufficient_range: row.1,
            m_crit_over_n: row.0 / nf,
            m_crit_over_n2: row.0 / (nf * nf),
        });
    }
    let ratios: Vec<f64> = rows.iter().filter(|r| r.m_crit > 0.0).map(|r| r.m_crit_over_n2).collect();
    let n2_ratio_spread = if ratios.len() >= 2 {
        let max = ratios.iter().copied().fold(f64::MIN, f64::max);
        let min = ratios.iter().copied().fold(f64::MAX, f64::min);
        Some(max / min)
    } else {
        None
    };
    let over_n_decreasing = rows.windows(2).all(|p| p[1].m_crit_over_n <= p[0].m_crit_over_n);
    Ok(CriticalM { scaling, eps0, rows, n2_ratio_spread, over_n_decreasing })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DenseCoding {
    pub usable: bool,
    /// `S(ρ_A) − S(ρ)` in bits.
    pub margin: f64,
    pub entropy_a: f64,
    pub entropy: f64,
}

/// Dense-coding criterion `S(ρ_A) > S(ρ)`.
pub fn dense_coding_usable(state: &MixedState) -> Result<DenseCoding> {
    let entropy_a = qstate::von_neumann_entropy(&state.reduced_a())?;
    let entropy = state.entropy()?;
    let margin = entropy_a - entropy;
    Ok(DenseCoding { usable: margin > 0.0, margin, entropy_a, entropy })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseCodingScanConfig {
    pub dims: BipartiteDims,
    pub m_list: Vec<usize>,
    pub repetitions: usize,
    pub seed: u64,
    pub workers: usize,
}

/// Mean dense-coding margin against `m`; the crossing records where it turns
/// negative.
pub fn run_dense_coding_scan(config: &DenseCodingScanConfig) -> Result<ScanResult> {
    if config.repetitions == 0 || config.m_list.is_empty() || config.m_list.contains(&0) {
        return Err(invalid("dense-coding scan needs repetitions >= 1 and m >= 1"));
    }
    let mut m_list = config.m_list.clone();
    m_list.sort_unstable();
    m_list.dedup();
    let n = config.dims.n_a();
    let mut rows = Vec::new();
    for (mi, &m) in m_list.iter().enumerate() {
        let margins = par_map(config.workers, config.repetitions, |r| {
            let mut rng = stream_rng(config.seed, ((mi as u64) << 32) | r as u64);
            Ok(dense_coding_usable(&qstate::mix_random_states(config.dims, m, &mut rng)?)?.margin)
        })?;
        let e = if margins.len() > 1 {
            stats::mean_estimate(&margins)
        } else {
            Estimate { value: margins[0], std_err: f64::NAN }
        };
        rows.push(ScanRow { n, m, statistic: e.value, std_err: e.std_err, samples: config.repetitions });
    }
    let mut meta = BTreeMap::new();
    meta.insert("dims".into(), format!("{}x{}", config.dims.n_a(), config.dims.n_b()));
    meta.insert("m_list".into(), format!("{m_list:?}"));
    meta.insert("seed".into(), config.seed.to_string());
    let mut scan = ScanResult::new("dense_coding_margin", rows, meta);
    // The margin falls with m, so the interesting crossing is downward.
    scan.monotonicity_violations.clear();
    scan.crossings = downward_crossings(&scan.rows);
    Ok(scan)
}

fn downward_crossings(rows: &[ScanRow]) -> Vec<Crossing> {
    let flipped: Vec<ScanRow> = rows.iter().map(|r| ScanRow { statistic: -r.statistic, ..*r }).collect();
    crossings(&flipped, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CumulantRow {
    pub order: usize,
    pub empirical: Estimate,
    pub predicted: f64,
    pub z: f64,
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CumulantReport {
    pub m: usize,
    pub trace_powers: Vec<f64>,
    pub rows: Vec<CumulantRow>,
}

impl CumulantReport {
    pub fn any_flagged(&self) -> bool {
        self.rows.iter().any(|r| r.flagged)
    }

    pub fn row(&self, order: usize) -> Option<&CumulantRow> {
        self.rows.iter().find(|r| r.order == order)
    }
}

/// `|z|` above which a cumulant is flagged.
pub const CUMULANT_Z_FLAG: f64 = 4.0;

/// Compares sample cumulants with the leading-order predictions
/// `κ₂ = tr W²`, `κ₃ = 2 tr W³`, `κ₄ = 6 tr W⁴`, each divided by `m^{n−1}`
/// for an `m`-component mixture (the mean of `m` independent draws).
pub fn cumulant_report(
    dist: &stats::EmpiricalDistribution,
    witness: &Witness,
    m: usize,
) -> Result<CumulantReport> {
    if m == 0 {
        return Err(invalid("mixture size m must be >= 1"));
    }
    let tp = witness_trace_powers(witness, 4)?;
    let mf = m as f64;
    let rows = [(2, dist.kappa2, tp[1]), (3, dist.kappa3, 2.0 * tp[2]), (4, dist.kappa4, 6.0 * tp[3])]
        .into_iter()
        .map(|(order, empirical, base)| {
            let predicted = base / mf.powi(order as i32 - 1);
            let z = empirical.z_score(predicted);
            CumulantRow { order, empirical, predicted, z, flagged: z.abs() > CUMULANT_Z_FLAG }
        })
        .collect();
    Ok(CumulantReport { m, trace_powers: tp, rows })
}

/// Largest total dimension at which trace powers of a general witness are
/// taken from explicit matrix powers.
const DIRECT_TRACE_POWER_DIM: usize = 256;

/// `tr Wⁿ`, `n = 1..=k_max`: closed form for rank-1 witnesses, explicit
/// matrix powers otherwise at small dimension.
pub fn witness_trace_powers(witness: &Witness, k_max: usize) -> Result<Vec<f64>> {
    match witness::trace_powers(witness, k_max) {
        Ok(tp) => Ok(tp),
        Err(_) if witness.dims().total() <= DIRECT_TRACE_POWER_DIM => {
            Ok(witness::trace_powers_direct(witness, k_max))
        }
        Err(e) => Err(e),
    }
}
