//! Closed-form densities of the witness statistic `w`, of scaled
//! partial-transpose eigenvalues and of the Marčenko–Pastur law.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::Serialize;

use super::quadrature::integrate;
use super::special::{elliptic_ke_from_sqrt_complement, erf, erfc};
use crate::error::{invalid, Error, Result};

/// Below this distance from `λ = ½` the rank-2 density switches to its
/// `λ = ½` limit, which it matches to `O((λ − ½)²)`; the general form loses
/// digits to cancellation there.
const RANK2_HALF_BAND: f64 = 1e-4;

/// Offset at which integrals are split next to an interior singularity.
const SINGULAR_OFFSET: f64 = 1e-6;

const CDF_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnalyticDensity {
    /// `e^{−(w−1)²/2}/√(2π)`: full-Schmidt-rank rank-1 witness.
    GaussUnit,
    /// `√(k/2π) e^{−k(w−1)²/2}`: rank-k witness with uniform weights, or an
    /// m-component mixture with `k = m`.
    GaussWidth { k: f64 },
    /// Rank-1 witness from a Schmidt-rank-2 vector with `μ₁² = λ`.
    Rank2 { lambda: f64 },
    /// The `λ = ½` limit of [`AnalyticDensity::Rank2`].
    Rank2Half,
    /// Off-diagonal partial-transpose eigenvalues `y = Nλ` of a random pure
    /// state, on `[−4, 4]`.
    PtEigs,
    /// `τ = Nμ²` for Schmidt coefficients of a random pure state, on `[0, 4]`.
    MarcenkoPastur,
}

impl AnalyticDensity {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::GaussWidth { k } if !(k >= 1.0 && k.is_finite()) => {
                Err(invalid(format!("gauss width parameter k = {k} must be >= 1")))
            }
            Self::Rank2 { lambda } if !(lambda > 0.0 && lambda < 1.0) => {
                Err(invalid(format!("rank-2 weight lambda = {lambda} outside (0, 1)")))
            }
            _ => Ok(()),
        }
    }

    /// Closed support `(lo, hi)`; infinite for the `w` densities.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Self::PtEigs => (-4.0, 4.0),
            Self::MarcenkoPastur => (0.0, 4.0),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Points inside the support where the density diverges.
    fn singularity(&self) -> Option<f64> {
        match self {
            Self::PtEigs | Self::MarcenkoPastur => Some(0.0),
            _ => None,
        }
    }

    /// Pointwise density; 0 outside the support. Diverges (returns
    /// `f64::INFINITY`) at `y = 0` for `PtEigs` and `τ = 0` for
    /// `MarcenkoPastur`.
    pub fn density(&self, x: f64) -> Result<f64> {
        self.validate()?;
        Ok(self.density_unchecked(x))
    }

    fn density_unchecked(&self, x: f64) -> f64 {
        match *self {
            Self::GaussUnit => gauss(x, 1.0),
            Self::GaussWidth { k } => gauss(x, k),
            Self::Rank2 { lambda } if (lambda - 0.5).abs() < RANK2_HALF_BAND => rank2_half(x),
            Self::Rank2 { lambda } => rank2(x, lambda),
            Self::Rank2Half => rank2_half(x),
            Self::PtEigs => pt_eigs(x),
            Self::MarcenkoPastur => marcenko_pastur(x),
        }
    }

    /// Cumulative distribution function.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.validate()?;
        Ok(self.cdf_unchecked(x))
    }

    fn cdf_unchecked(&self, x: f64) -> f64 {
        match *self {
            Self::GaussUnit => gauss_cdf(x, 1.0),
            Self::GaussWidth { k } => gauss_cdf(x, k),
            Self::Rank2 { lambda } if (lambda - 0.5).abs() < RANK2_HALF_BAND => rank2_half_cdf(x),
            Self::Rank2 { lambda } => rank2_cdf(x, lambda),
            Self::Rank2Half => rank2_half_cdf(x),
            Self::PtEigs => {
                if x <= -4.0 {
                    0.0
                } else if x >= 4.0 {
                    1.0
                } else {
                    // Even density: F(y) = ½ ± ∫₀^{|y|}.
                    let half = self.mass_between(0.0, x.abs());
                    (0.5 + half.copysign(x)).clamp(0.0, 1.0)
                }
            }
            Self::MarcenkoPastur => {
                if x <= 0.0 {
                    0.0
                } else if x >= 4.0 {
                    1.0
                } else {
                    self.mass_between(0.0, x).clamp(0.0, 1.0)
                }
            }
        }
    }

    /// `∫_a^b p` by adaptive quadrature, clipped to the support and split
    /// next to an interior singularity.
    pub fn mass_between(&self, a: f64, b: f64) -> f64 {
        if b < a {
            return -self.mass_between(b, a);
        }
        let (lo, hi) = self.support();
        let (a, b) = (a.max(lo), b.min(hi));
        if a >= b {
            return 0.0;
        }
        let f = |x: f64| self.density_unchecked(x);
        let mut pieces = vec![a];
        if let Some(s) = self.singularity() {
            for p in [s - SINGULAR_OFFSET, s, s + SINGULAR_OFFSET] {
                if p > a && p < b {
                    pieces.push(p);
                }
            }
        }
        pieces.push(b);
        pieces.windows(2).map(|w| integrate(f, w[0], w[1], CDF_TOL).value).sum()
    }

    /// Total probability over the support; 1 for a valid density.
    pub fn total_mass(&self) -> Result<f64> {
        self.validate()?;
        let (lo, hi) = self.support();
        if lo.is_finite() {
            return Ok(self.mass_between(lo, hi));
        }
        // Gaussians are negligible beyond 40 widths and the exponentials in
        // the rank-2 forms beyond w = 80.
        Ok(self.mass_between(-80.0, 1.0) + self.mass_between(1.0, 80.0))
    }

    /// One-sample Kolmogorov–Smirnov distance between `samples` and this
    /// distribution. Numerically integrated CDFs are accumulated between
    /// consecutive sorted samples, so the cost stays linear in the sample size.
    pub fn ks_distance(&self, samples: &[f64]) -> Result<f64> {
        self.validate()?;
        if samples.is_empty() {
            return Err(invalid("KS distance of an empty sample"));
        }
        let mut s = samples.to_vec();
        s.sort_by(f64::total_cmp);
        let cdfs = match self {
            Self::PtEigs | Self::MarcenkoPastur => {
                let mut out = Vec::with_capacity(s.len());
                let mut f = self.cdf_unchecked(s[0]);
                out.push(f);
                for w in s.windows(2) {
                    f += self.mass_between(w[0], w[1]);
                    out.push(f.clamp(0.0, 1.0));
                }
                out
            }
            _ => s.iter().map(|&x| self.cdf_unchecked(x)).collect(),
        };
        Ok(crate::stats::ks_distance_sorted(&cdfs))
    }
}

fn gauss(w: f64, k: f64) -> f64 {
    (k / (2.0 * PI)).sqrt() * (-0.5 * k * (w - 1.0).powi(2)).exp()
}

fn gauss_cdf(w: f64, k: f64) -> f64 {
    let z = (w - 1.0) * (0.5 * k).sqrt();
    if z < 0.0 {
        0.5 * erfc(-z)
    } else {
        0.5 * (1.0 + erf(z))
    }
}

fn rank2(w: f64, lambda: f64) -> f64 {
    let s = (lambda * (1.0 - lambda)).sqrt();
    if w < 0.0 {
        return (w / s).exp() / (4.0 * s + 2.0);
    }
    let mu = 1.0 - lambda;
    (lambda * (-w / lambda).exp() + mu * (-w / mu).exp()) / (1.0 - 2.0 * lambda).powi(2)
        + (-w / s).exp() / (4.0 * s - 2.0)
}

fn rank2_cdf(w: f64, lambda: f64) -> f64 {
    let s = (lambda * (1.0 - lambda)).sqrt();
    if w < 0.0 {
        return s * (w / s).exp() / (4.0 * s + 2.0);
    }
    let mu = 1.0 - lambda;
    let tail = (lambda * lambda * (-w / lambda).exp() + mu * mu * (-w / mu).exp())
        / (1.0 - 2.0 * lambda).powi(2)
        + s * (-w / s).exp() / (4.0 * s - 2.0);
    1.0 - tail
}

fn rank2_half(w: f64) -> f64 {
    if w < 0.0 {
        0.25 * (2.0 * w).exp()
    } else {
        (1.0 + 4.0 * w + 8.0 * w * w) * (-2.0 * w).exp() / 4.0
    }
}

fn rank2_half_cdf(w: f64) -> f64 {
    if w < 0.0 {
        (2.0 * w).exp() / 8.0
    } else {
        1.0 - (3.5 + 6.0 * w + 4.0 * w * w) * (-2.0 * w).exp() / 4.0
    }
}

fn pt_eigs(y: f64) -> f64 {
    if !(-4.0..=4.0).contains(&y) {
        return 0.0;
    }
    if y == 0.0 {
        return f64::INFINITY;
    }
    let (k, e) = elliptic_ke_from_sqrt_complement(0.25 * y.abs());
    ((16.0 + y * y) * k - 32.0 * e).max(0.0) / (8.0 * PI * PI)
}

fn marcenko_pastur(t: f64) -> f64 {
    if !(0.0..=4.0).contains(&t) {
        return 0.0;
    }
    if t == 0.0 {
        return f64::INFINITY;
    }
    (t * (4.0 - t)).sqrt() / (2.0 * PI * t)
}

/// `P(w < 0)` for the densities of `w`.
pub fn detection_probability(d: &AnalyticDensity) -> Result<f64> {
    d.validate()?;
    match *d {
        AnalyticDensity::GaussUnit => Ok(0.5 * erfc(FRAC_1_SQRT_2)),
        AnalyticDensity::GaussWidth { k } => Ok(0.5 * erfc((0.5 * k).sqrt())),
        AnalyticDensity::Rank2 { lambda } => {
            let s = (lambda * (1.0 - lambda)).sqrt();
            Ok(1.0 / (4.0 + 2.0 / s))
        }
        AnalyticDensity::Rank2Half => Ok(0.125),
        AnalyticDensity::PtEigs | AnalyticDensity::MarcenkoPastur => Err(Error::Unsupported(
            format!("{d:?} is not a distribution of the witness statistic"),
        )),
    }
}

/// Exact Gaussian detection probability for an m-component mixture,
/// `(1 − erf(√(m/2)))/2`.
pub fn detection_probability_mixture(m: usize) -> Result<f64> {
    if m == 0 {
        return Err(invalid("mixture size m must be >= 1"));
    }
    detection_probability(&AnalyticDensity::GaussWidth { k: m as f64 })
}

/// Large-m asymptote `e^{−m/2}/√(2πm)` of
/// [`detection_probability_mixture`]. It overestimates the exact value by
/// a factor `1 + O(1/m)`.
pub fn detection_probability_asymptotic(m: usize) -> Result<f64> {
    if m == 0 {
        return Err(invalid("mixture size m must be >= 1"));
    }
    let m = m as f64;
    Ok((-0.5 * m).exp() / (2.0 * PI * m).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const ALL: [AnalyticDensity; 7] = [
        AnalyticDensity::GaussUnit,
        AnalyticDensity::GaussWidth { k: 4.0 },
        AnalyticDensity::Rank2 { lambda: 1.0 / 26.0 },
        AnalyticDensity::Rank2 { lambda: 0.3 },
        AnalyticDensity::Rank2Half,
        AnalyticDensity::PtEigs,
        AnalyticDensity::MarcenkoPastur,
    ];

    #[test]
    fn every_density_is_normalized() {
        for d in ALL {
            let total = d.total_mass().unwrap();
            assert!((total - 1.0).abs() < 1e-6, "{d:?}: {total}");
        }
    }

    #[test]
    fn point_values() {
        let g = AnalyticDensity::GaussUnit.density(1.0).unwrap();
        assert!((g - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
        let mp = AnalyticDensity::MarcenkoPastur.density(2.0).unwrap();
        assert!((mp - 1.0 / (2.0 * PI)).abs() < 1e-15);
        let h = AnalyticDensity::Rank2Half;
        assert_eq!(h.density(-0.5).unwrap(), 0.25 * (-1.0f64).exp());
        let w: f64 = 0.7;
        let expect = (1.0 + 4.0 * w + 8.0 * w * w) * (-2.0 * w).exp() / 4.0;
        assert_eq!(h.density(w).unwrap(), expect);
        assert_eq!(AnalyticDensity::PtEigs.density(4.5).unwrap(), 0.0);
        assert_eq!(AnalyticDensity::PtEigs.density(4.0).unwrap(), 0.0);
        assert_eq!(AnalyticDensity::MarcenkoPastur.density(-0.1).unwrap(), 0.0);
    }

    #[test]
    fn pt_eigs_is_finite_off_zero_and_diverges_at_zero() {
        let d = AnalyticDensity::PtEigs;
        assert_eq!(d.density(0.0).unwrap(), f64::INFINITY);
        for y in [1e-300, 1e-12, 1e-6, 1e-3, 0.5] {
            let v = d.density(y).unwrap();
            assert!(v.is_finite() && v > 0.0, "{y}: {v}");
        }
        // Logarithmic growth: p(y) ≈ (2 ln(16/|y|) − 4)/(8π²) as y → 0.
        let y: f64 = 1e-8;
        let approx = (16.0 * (16.0 / y).ln() - 32.0) / (8.0 * PI * PI);
        assert!((d.density(y).unwrap() / approx - 1.0).abs() < 1e-6);
    }

    #[test]
    fn pt_eigs_matches_product_of_marcenko_pastur_samples() {
        // y = ±√(τ_i τ_j) with τ independent MP variates, via inverse CDF.
        let mp = AnalyticDensity::MarcenkoPastur;
        let quantile = |u: f64| {
            let (mut lo, mut hi) = (0.0, 4.0);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if mp.cdf(mid).unwrap() < u {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let n = 400;
        let q: Vec<f64> = (0..n).map(|i| quantile((i as f64 + 0.5) / n as f64)).collect();
        let mut ys = Vec::with_capacity(2 * n * n);
        for a in &q {
            for b in &q {
                let y = (a * b).sqrt();
                ys.push(y);
                ys.push(-y);
            }
        }
        let ks = AnalyticDensity::PtEigs.ks_distance(&ys).unwrap();
        assert!(ks < 2e-3, "{ks}");
    }

    #[test]
    fn rank2_is_continuous_at_zero() {
        for lambda in [0.01, 1.0 / 26.0, 0.2, 0.45] {
            let d = AnalyticDensity::Rank2 { lambda };
            let (l, r) = (d.density(-1e-9).unwrap(), d.density(1e-9).unwrap());
            assert!((l - r).abs() < 1e-6, "λ={lambda}: {l} vs {r}");
        }
        let h = AnalyticDensity::Rank2Half;
        assert!((h.density(-1e-9).unwrap() - h.density(1e-9).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn rank2_tends_to_half_limit() {
        let h = AnalyticDensity::Rank2Half;
        for w in [-1.0, 0.2, 1.5, 4.0] {
            let near = AnalyticDensity::Rank2 { lambda: 0.5 - 2e-3 }.density(w).unwrap();
            assert!((near - h.density(w).unwrap()).abs() < 1e-4, "w={w}");
        }
    }

    #[test]
    fn cdf_closed_forms_match_quadrature() {
        for d in ALL {
            for x in [-1.5, -0.2, 0.0, 0.4, 1.0, 2.5] {
                let closed = d.cdf(x).unwrap();
                let (lo, _) = d.support();
                let quad = d.mass_between(if lo.is_finite() { lo } else { -80.0 }, x);
                assert!((closed - quad).abs() < 1e-8, "{d:?} at {x}: {closed} vs {quad}");
            }
        }
    }

    #[test]
    fn detection_probabilities() {
        let g = detection_probability(&AnalyticDensity::GaussUnit).unwrap();
        assert!((g - 0.158_655_253_931_457).abs() < 1e-12);
        assert_eq!(format!("{g:.3}"), "0.159");
        let half = detection_probability(&AnalyticDensity::Rank2 { lambda: 0.5 }).unwrap();
        assert!((half - 0.125).abs() < 1e-15);
        let r = detection_probability(&AnalyticDensity::Rank2 { lambda: 1.0 / 26.0 }).unwrap();
        assert!((r - 5.0 / 72.0).abs() < 1e-15);
        let m4 = detection_probability(&AnalyticDensity::GaussWidth { k: 4.0 }).unwrap();
        let oracle = 0.5 * (1.0 - erf(2.0f64.sqrt()));
        assert!((m4 - oracle).abs() < 1e-15 && (m4 - 0.02275).abs() < 1e-5);
        assert!(detection_probability(&AnalyticDensity::PtEigs).is_err());
        assert!(detection_probability(&AnalyticDensity::Rank2 { lambda: 1.0 }).is_err());
    }

    #[test]
    fn detection_probability_peaks_at_half() {
        let p = |l: f64| detection_probability(&AnalyticDensity::Rank2 { lambda: l }).unwrap();
        let best = (1..=19).map(|i| 0.05 * i as f64).max_by(|a, b| p(*a).total_cmp(&p(*b))).unwrap();
        assert!((best - 0.5).abs() < 1e-12);
    }

    #[test]
    fn tail_probability_is_cdf_at_zero() {
        for d in [AnalyticDensity::GaussUnit, AnalyticDensity::Rank2 { lambda: 0.2 }, AnalyticDensity::Rank2Half] {
            let a = detection_probability(&d).unwrap();
            assert!((a - d.cdf(0.0).unwrap()).abs() < 1e-14);
            assert!((a - d.mass_between(-80.0, 0.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn asymptotic_tail() {
        let a1 = detection_probability_asymptotic(1).unwrap();
        assert!((a1 - (-0.5f64).exp() / (2.0 * PI).sqrt()).abs() < 1e-15);
        assert!((a1 - 0.2420).abs() < 1e-4);
        let ratio = detection_probability_asymptotic(9).unwrap() / detection_probability_mixture(9).unwrap();
        assert!((0.9..=1.2).contains(&ratio), "{ratio}");
        assert!(detection_probability_asymptotic(0).is_err());
    }

    #[test]
    fn gauss_width_second_moment() {
        for k in [1.0, 4.0, 16.0] {
            let d = AnalyticDensity::GaussWidth { k };
            let f = |w: f64| (w - 1.0).powi(2) * d.density(w).unwrap();
            let var = integrate(f, -9.0, 11.0, 1e-12).value;
            assert!((var - 1.0 / k).abs() < 1e-9, "k={k}: {var}");
        }
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(AnalyticDensity::Rank2 { lambda: 0.0 }.density(0.1).is_err());
        assert!(AnalyticDensity::GaussWidth { k: 0.5 }.cdf(0.1).is_err());
    }

    proptest! {
        #[test]
        fn pt_eigs_is_even_and_nonnegative(y in -4.5f64..4.5) {
            let d = AnalyticDensity::PtEigs;
            let (a, b) = (d.density(y).unwrap(), d.density(-y).unwrap());
            prop_assert!(a >= 0.0);
            prop_assert_eq!(a, b);
        }

        #[test]
        fn densities_nonnegative_and_cdfs_monotone(x in -5.0f64..8.0, dx in 0.0f64..1.0) {
            for d in ALL {
                prop_assert!(d.density(x).unwrap() >= 0.0);
                prop_assert!(d.cdf(x + dx).unwrap() >= d.cdf(x).unwrap() - 1e-12);
            }
        }
    }
}
