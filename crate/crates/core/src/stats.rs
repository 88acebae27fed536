//! Histograms, moment and cumulant estimators with error bars, and
//! Kolmogorov–Smirnov distances.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Number of delete-one blocks used for jackknife standard errors.
pub const JACKKNIFE_BLOCKS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
}

impl Estimate {
    /// `(value − target)/std_err`.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.value - target) / self.std_err
    }

    pub fn within(&self, target: f64, n_sigma: f64) -> bool {
        (self.value - target).abs() <= n_sigma * self.std_err
    }
}

/// Fixed-width binning over `[lo, hi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramSpec {
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
}

impl HistogramSpec {
    /// Default binning for distributions of `w`.
    pub const W: HistogramSpec = HistogramSpec { lo: -4.0, hi: 6.0, bins: 80 };
    /// Default binning for scaled partial-transpose eigenvalues `y = Nλ`.
    pub const Y: HistogramSpec = HistogramSpec { lo: -4.5, hi: 4.5, bins: 80 };

    pub fn new(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) || bins == 0 {
            return Err(invalid(format!("histogram range [{lo}, {hi}) with {bins} bins")));
        }
        Ok(Self { lo, hi, bins })
    }

    /// Range spanning the data, padded by half a bin on each side.
    pub fn covering(values: &[f64], bins: usize) -> Result<Self> {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() || !hi.is_finite() {
            return Err(invalid("cannot derive a histogram range from empty or non-finite data"));
        }
        let span = if hi > lo { hi - lo } else { 1.0 };
        let pad = 0.5 * span / bins.max(1) as f64;
        Self::new(lo - pad, hi + pad, bins)
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins as f64
    }

    pub fn edges(&self) -> Vec<f64> {
        let w = self.width();
        (0..=self.bins).map(|i| if i == self.bins { self.hi } else { self.lo + w * i as f64 }).collect()
    }

    pub fn centers(&self) -> Vec<f64> {
        let w = self.width();
        (0..self.bins).map(|i| self.lo + w * (i as f64 + 0.5)).collect()
    }

    pub fn bin_of(&self, x: f64) -> Option<usize> {
        if !(x >= self.lo && x < self.hi) {
            return None;
        }
        let i = ((x - self.lo) / self.width()) as usize;
        Some(i.min(self.bins - 1))
    }
}

/// Histogram plus summary statistics of a sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpiricalDistribution {
    pub bin_edges: Vec<f64>,
    /// Normalized over the in-range samples so that `Σ density·width = 1`.
    pub densities: Vec<f64>,
    pub sample_count: usize,
    pub out_of_range: usize,
    pub mean: Estimate,
    pub variance: Estimate,
    pub kappa2: Estimate,
    pub kappa3: Estimate,
    pub kappa4: Estimate,
    /// Fraction of samples below zero, binomial standard error.
    pub neg_tail: Estimate,
}

impl EmpiricalDistribution {
    pub fn from_samples(samples: &[f64], spec: HistogramSpec) -> Result<Self> {
        let n = samples.len();
        if n == 0 {
            return Err(invalid("empty sample"));
        }
        let mut counts = vec![0u64; spec.bins];
        let mut out_of_range = 0;
        for &x in samples {
            match spec.bin_of(x) {
                Some(i) => counts[i] += 1,
                None => out_of_range += 1,
            }
        }
        let inside = (n - out_of_range) as f64;
        let width = spec.width();
        let densities = counts
            .iter()
            .map(|&c| if inside > 0.0 { c as f64 / (inside * width) } else { 0.0 })
            .collect();

        let neg = samples.iter().filter(|&&x| x < 0.0).count() as f64;
        let p = neg / n as f64;
        let neg_tail = Estimate { value: p, std_err: (p * (1.0 - p) / n as f64).sqrt() };

        let m = Moments::of(samples);
        let c = m.cumulants();
        let jk = jackknife(samples, |mm| {
            let c = mm.cumulants();
            [c[0], c[1], c[2], c[3]]
        });
        let est = |i: usize| Estimate { value: c[i], std_err: jk[i] };

        Ok(Self {
            bin_edges: spec.edges(),
            densities,
            sample_count: n,
            out_of_range,
            mean: est(0),
            variance: est(1),
            kappa2: est(1),
            kappa3: est(2),
            kappa4: est(3),
            neg_tail,
        })
    }

    pub fn bin_centers(&self) -> Vec<f64> {
        self.bin_edges.windows(2).map(|e| 0.5 * (e[0] + e[1])).collect()
    }

    /// `Σ density·width`; 1 unless every sample fell outside the range.
    pub fn total_mass(&self) -> f64 {
        self.bin_edges.windows(2).zip(&self.densities).map(|(e, d)| d * (e[1] - e[0])).sum()
    }
}

/// Raw draws kept alongside their summary, for KS comparisons.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Draws {
    #[serde(skip)]
    pub values: Vec<f64>,
    pub distribution: EmpiricalDistribution,
}

impl Draws {
    pub fn new(values: Vec<f64>, spec: HistogramSpec) -> Result<Self> {
        let distribution = EmpiricalDistribution::from_samples(&values, spec)?;
        Ok(Self { values, distribution })
    }
}

/// Power sums about a fixed shift, so blocks can be combined exactly.
#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    shift: f64,
    n: f64,
    s: [f64; 4],
}

impl Moments {
    fn of(xs: &[f64]) -> Self {
        let shift = if xs.is_empty() { 0.0 } else { xs.iter().sum::<f64>() / xs.len() as f64 };
        Self::about(xs, shift)
    }

    fn about(xs: &[f64], shift: f64) -> Self {
        let mut s = [0.0; 4];
        for &x in xs {
            let d = x - shift;
            let d2 = d * d;
            s[0] += d;
            s[1] += d2;
            s[2] += d2 * d;
            s[3] += d2 * d2;
        }
        Self { shift, n: xs.len() as f64, s }
    }

    fn minus(&self, other: &Moments) -> Self {
        let mut s = self.s;
        for (a, b) in s.iter_mut().zip(other.s) {
            *a -= b;
        }
        Self { shift: self.shift, n: self.n - other.n, s }
    }

    /// `[mean, κ₂, κ₃, κ₄]` from plug-in central moments.
    fn cumulants(&self) -> [f64; 4] {
        let n = self.n;
        let r1 = self.s[0] / n;
        let r2 = self.s[1] / n;
        let r3 = self.s[2] / n;
        let r4 = self.s[3] / n;
        let m2 = r2 - r1 * r1;
        let m3 = r3 - 3.0 * r1 * r2 + 2.0 * r1.powi(3);
        let m4 = r4 - 4.0 * r1 * r3 + 6.0 * r1 * r1 * r2 - 3.0 * r1.powi(4);
        [self.shift + r1, m2, m3, m4 - 3.0 * m2 * m2]
    }
}

/// Delete-one-block jackknife standard errors of `stat`, with
/// [`JACKKNIFE_BLOCKS`] contiguous blocks (fewer if the sample is smaller).
fn jackknife<const K: usize>(xs: &[f64], stat: impl Fn(&Moments) -> [f64; K]) -> [f64; K] {
    let n = xs.len();
    let blocks = JACKKNIFE_BLOCKS.min(n);
    if blocks < 2 {
        return [f64::NAN; K];
    }
    let total = Moments::of(xs);
    let mut estimates = Vec::with_capacity(blocks);
    for b in 0..blocks {
        let (lo, hi) = (b * n / blocks, (b + 1) * n / blocks);
        let part = Moments::about(&xs[lo..hi], total.shift);
        estimates.push(stat(&total.minus(&part)));
    }
    let g = blocks as f64;
    let mut out = [0.0; K];
    for (k, o) in out.iter_mut().enumerate() {
        let mean = estimates.iter().map(|e| e[k]).sum::<f64>() / g;
        let ss: f64 = estimates.iter().map(|e| (e[k] - mean).powi(2)).sum();
        *o = ((g - 1.0) / g * ss).sqrt();
    }
    out
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Mean with the standard error `s/√n`.
pub fn mean_estimate(xs: &[f64]) -> Estimate {
    let n = xs.len() as f64;
    let mu = mean(xs);
    let var = xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (n - 1.0);
    Estimate { value: mu, std_err: (var / n).sqrt() }
}

/// `μ₄/μ₂²` of the centered sample.
pub fn kurtosis_ratio(xs: &[f64]) -> f64 {
    let mu = mean(xs);
    let (mut m2, mut m4) = (0.0, 0.0);
    for &x in xs {
        let d2 = (x - mu).powi(2);
        m2 += d2;
        m4 += d2 * d2;
    }
    let n = xs.len() as f64;
    (m4 / n) / (m2 / n).powi(2)
}

/// Kurtosis ratio with a jackknife standard error.
pub fn kurtosis_ratio_estimate(xs: &[f64]) -> Estimate {
    let value = kurtosis_ratio(xs);
    let [std_err] = jackknife(xs, |m| {
        let c = m.cumulants();
        [(c[3] + 3.0 * c[1] * c[1]) / (c[1] * c[1])]
    });
    Estimate { value, std_err }
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// One-sample KS distance `sup |F_n − F|`.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let s = sorted(samples);
    let cdfs: Vec<f64> = s.iter().map(|&x| cdf(x)).collect();
    ks_distance_sorted(&cdfs)
}

/// KS distance given the model CDF evaluated at the sorted samples.
pub fn ks_distance_sorted(cdf_at_sorted: &[f64]) -> f64 {
    let n = cdf_at_sorted.len() as f64;
    cdf_at_sorted
        .iter()
        .enumerate()
        .map(|(i, &f)| ((i + 1) as f64 / n - f).max(f - i as f64 / n))
        .fold(0.0, f64::max)
}

/// Two-sample KS distance `sup |F_a − F_b|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Ordinary least squares `y ≈ intercept + slope·x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_std_err: f64,
}

/// Weighted least squares with weights `1/σ²`; pass equal sigmas for plain OLS.
pub fn linear_fit(x: &[f64], y: &[f64], sigma: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() != sigma.len() || x.len() < 2 {
        return Err(invalid("linear fit needs at least two matched points"));
    }
    let (mut s, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ((&xi, &yi), &si) in x.iter().zip(y).zip(sigma) {
        let w = 1.0 / (si * si);
        s += w;
        sx += w * xi;
        sy += w * yi;
        sxx += w * xi * xi;
        sxy += w * xi * yi;
    }
    let det = s * sxx - sx * sx;
    if det <= 0.0 {
        return Err(invalid("degenerate abscissae in linear fit"));
    }
    Ok(LinearFit {
        slope: (s * sxy - sx * sy) / det,
        intercept: (sxx * sy - sx * sxy) / det,
        slope_std_err: (s / det).sqrt(),
    })
}
