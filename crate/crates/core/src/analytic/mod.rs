//! Closed-form predictions that Monte Carlo ensembles are checked against.

mod density;
pub mod quadrature;
pub mod special;

pub use density::{
    detection_probability, detection_probability_asymptotic, detection_probability_mixture,
    AnalyticDensity,
};
pub use special::{elliptic_e, elliptic_k, elliptic_ke, elliptic_ke_complementary, erf, erfc};

use rand::Rng;

use crate::error::{invalid, Result};
use crate::stats::{Draws, HistogramSpec};
use crate::witness;

/// Draws `w` from the overlap model with Schmidt weights `(λ, 1 − λ)`,
/// independently of any quantum-state simulation, and summarizes them on the
/// default `w` histogram.
pub fn rank2_density_convolution_oracle<R: Rng + ?Sized>(
    lambda: f64,
    samples: usize,
    rng: &mut R,
) -> Result<Draws> {
    AnalyticDensity::Rank2 { lambda }.validate()?;
    if samples == 0 {
        return Err(invalid("samples must be >= 1"));
    }
    let weights = [lambda, 1.0 - lambda];
    let values = (0..samples).map(|_| witness::overlap_draw(&weights, rng)).collect();
    Draws::new(values, HistogramSpec::W)
}
