//! Error function and complete elliptic integrals.
//!
//! `erf` uses the all-positive series
//! `erf(x) = 2/√π · e^{−x²} Σ 2ⁿ x^{2n+1} / (1·3·…·(2n+1))` below `|x| = 3`
//! and a Lentz continued fraction for `erfc` above it. `K` and `E` come from
//! the arithmetic–geometric mean in the parameter convention `m = k²`.

use std::f64::consts::{FRAC_2_SQRT_PI, PI};

use crate::error::{invalid, Error, Result};

const SERIES_CUTOFF: f64 = 3.0;

pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let v = if ax < SERIES_CUTOFF { erf_series(ax) } else { 1.0 - erfc_cf(ax) };
    v.copysign(x)
}

pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < SERIES_CUTOFF {
        1.0 - erf_series(x)
    } else {
        erfc_cf(x)
    }
}

fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    FRAC_2_SQRT_PI * (-x2).exp() * sum
}

/// `erfc(x) = e^{−x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …))))`, x ≥ 3.
fn erfc_cf(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..500 {
        let a = n as f64 * 0.5;
        d = x + a * d;
        d = if d.abs() < TINY { TINY } else { d };
        c = x + a / c;
        c = if c.abs() < TINY { TINY } else { c };
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (f * PI.sqrt())
}

const AGM_TOL: f64 = 1e-16;

/// Complete elliptic integral of the first kind, `K(m) = ∫₀^{π/2} dθ/√(1 − m sin²θ)`.
pub fn elliptic_k(m: f64) -> Result<f64> {
    check_param(m)?;
    if m == 1.0 {
        return Err(Error::Divergent("K(m) at m = 1"));
    }
    Ok(agm(m, (1.0 - m).sqrt()).0)
}

/// Complete elliptic integral of the second kind, `E(m) = ∫₀^{π/2} √(1 − m sin²θ) dθ`.
pub fn elliptic_e(m: f64) -> Result<f64> {
    check_param(m)?;
    if m == 1.0 {
        return Ok(1.0);
    }
    Ok(agm(m, (1.0 - m).sqrt()).1)
}

/// `(K(m), E(m))` from one AGM run.
pub fn elliptic_ke(m: f64) -> Result<(f64, f64)> {
    check_param(m)?;
    if m == 1.0 {
        return Err(Error::Divergent("K(m) at m = 1"));
    }
    Ok(agm(m, (1.0 - m).sqrt()))
}

/// `(K(1 − m₁), E(1 − m₁))` from the complementary parameter `m₁`, keeping
/// full precision as `m₁ → 0` where `1 − m₁` would round to 1.
pub fn elliptic_ke_complementary(m1: f64) -> Result<(f64, f64)> {
    check_param(m1)?;
    if m1 == 0.0 {
        return Err(Error::Divergent("K(m) at m = 1"));
    }
    Ok(agm(1.0 - m1, m1.sqrt()))
}

/// `(K, E)` at parameter `1 − b²` for `b ∈ (0, 1]`; avoids squaring `b`, so
/// it stays finite for `b` far below `√f64::MIN_POSITIVE`.
pub(crate) fn elliptic_ke_from_sqrt_complement(b: f64) -> (f64, f64) {
    agm(1.0 - b * b, b)
}

fn check_param(m: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&m) {
        return Err(invalid(format!("elliptic parameter {m} outside [0, 1]")));
    }
    Ok(())
}

/// `K = π/(2 a_∞)`, `E = K (1 − Σ 2^{n−1} c_n²)` with `c_0² = m`, starting
/// from `a = 1`, `b = √(1 − m)`.
fn agm(m: f64, b: f64) -> (f64, f64) {
    let mut a = 1.0f64;
    let mut b = b;
    let mut sum = 0.5 * m;
    let mut pow = 0.5;
    for _ in 0..64 {
        let c = 0.5 * (a - b);
        if c.abs() <= AGM_TOL * a {
            break;
        }
        pow *= 2.0;
        sum += pow * c * c;
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    let k = PI / (2.0 * a);
    (k, k * (1.0 - sum))
}
