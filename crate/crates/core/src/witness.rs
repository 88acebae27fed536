//! Decomposable entanglement witnesses `W = P + Q^{T_B}` with
//! `Q = Σ d_k |φ_k⟩⟨φ_k|`, normalized to `tr W = 1` when `P` is absent.
//!
//! For a pure `|ψ⟩` and a single `|φ⟩`,
//! `⟨ψ|(|φ⟩⟨φ|)^{T_B}|ψ⟩ = Σ_{αβ} A_{αβ} conj(A_{βα})` with `A = Ψ†Φ`, where
//! `Ψ` and `Φ` are the `n_a × n_b` amplitude matrices. This costs one small
//! matrix product instead of an `(N·N')²` operator.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use faer::Mat;
use rand::Rng;
use rand_distr::{Exp1, Uniform};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, CMat, C64, ZERO};
use crate::qstate::{self, BipartiteDims, MixedState, PureState, StateRef, PSD_TOL};

/// Gram-matrix tolerance for orthonormal witness vectors.
pub const ORTHONORMAL_TOL: f64 = 1e-8;
/// Tolerance on `Σ d_k = 1` and `Σ λ_i = 1`.
pub const WEIGHT_SUM_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    Rank1,
    RankK,
    OptimalForState,
}

#[derive(Clone, Debug)]
pub struct Witness {
    dims: BipartiteDims,
    q_weights: Vec<f64>,
    q_vectors: Vec<PureState>,
    p_part: Option<CMat>,
    kind: WitnessKind,
    /// `[Φ_1 | Φ_2 | …]`, amplitude matrices side by side.
    phi_block: CMat,
}

/// One evaluation of a witness on a state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WitnessSample {
    /// `N·N'·tr(Wρ)`.
    pub w: f64,
    /// `tr(Wρ)`.
    pub raw: f64,
    /// Number of mixture components; `None` for an explicit density matrix.
    pub m: Option<usize>,
}

impl WitnessSample {
    fn new(dims: BipartiteDims, raw: f64, m: Option<usize>) -> Self {
        Self { w: dims.total() as f64 * raw, raw, m }
    }
}

impl Witness {
    fn build(
        dims: BipartiteDims,
        q_weights: Vec<f64>,
        q_vectors: Vec<PureState>,
        kind: WitnessKind,
    ) -> Self {
        let phi_block = qstate::stacked_amplitudes(&q_vectors);
        Self { dims, q_weights, q_vectors, p_part: None, kind, phi_block }
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn kind(&self) -> WitnessKind {
        self.kind
    }

    pub fn q_weights(&self) -> &[f64] {
        &self.q_weights
    }

    pub fn q_vectors(&self) -> &[PureState] {
        &self.q_vectors
    }

    pub fn p_part(&self) -> Option<&CMat> {
        self.p_part.as_ref()
    }

    pub fn rank(&self) -> usize {
        self.q_vectors.len()
    }

    /// `σ² = Σ d_k²`, the predicted variance of `w` over random pure states.
    pub fn sigma_squared(&self) -> f64 {
        self.q_weights.iter().map(|d| d * d).sum()
    }

    /// Adds a positive semidefinite `P`. The result no longer has unit trace.
    pub fn with_positive_part(mut self, p: CMat) -> Result<Self> {
        self.dims.check_matrix(&p)?;
        let s = linalg::hermitian_spectrum(&p, false)?;
        if s.min_eigenvalue < -PSD_TOL {
            return Err(Error::NegativeEigenvalue(s.min_eigenvalue));
        }
        self.p_part = Some(p);
        Ok(self)
    }

    /// The full `(N·N')²` operator `P + Σ d_k (|φ_k⟩⟨φ_k|)^{T_B}`.
    pub fn operator(&self) -> CMat {
        let d = self.dims.total();
        let mut q = Mat::<C64>::zeros(d, d);
        for (dk, phi) in self.q_weights.iter().zip(&self.q_vectors) {
            let a = phi.amplitudes();
            for c in 0..d {
                for r in 0..d {
                    q[(r, c)] += a[r] * a[c].conj() * *dk;
                }
            }
        }
        let mut w = qstate::partial_transpose_b(&q, self.dims).expect("dims are consistent");
        if let Some(p) = &self.p_part {
            w.col_iter_mut().zip(p.col_iter()).for_each(|(a, b)| {
                a.iter_mut().zip(b.iter()).for_each(|(x, y)| *x += y);
            });
        }
        w
    }

    /// `tr(Wρ)` and `w = N·N'·tr(Wρ)`. Component mixtures are averaged
    /// component by component; explicit matrices go through the operator.
    pub fn expectation<'a>(&self, state: impl Into<StateRef<'a>>) -> Result<WitnessSample> {
        let state = state.into();
        self.dims.check_same(&state.dims())?;
        match state {
            StateRef::Pure(psi) => {
                let raw = self.components_expectation(std::slice::from_ref(psi));
                Ok(WitnessSample::new(self.dims, raw, Some(1)))
            }
            StateRef::Mixed(rho) => match rho.components() {
                Some(c) => {
                    let raw = self.components_expectation(c);
                    Ok(WitnessSample::new(self.dims, raw, Some(c.len())))
                }
                None => self.expectation_explicit(rho),
            },
        }
    }

    /// `tr(Wρ)` with the explicit operator and density matrix; the reference
    /// path for [`Witness::expectation`].
    pub fn expectation_explicit(&self, state: &MixedState) -> Result<WitnessSample> {
        self.dims.check_same(&state.dims())?;
        let raw = linalg::trace_product(&self.operator(), &state.to_matrix()).re;
        Ok(WitnessSample::new(self.dims, raw, state.mixture_size()))
    }

    fn components_expectation(&self, comps: &[PureState]) -> f64 {
        let nb = self.dims.n_b();
        let psi = qstate::stacked_amplitudes(comps);
        // Rows: component c, index α; columns: witness vector k, index β.
        let a = linalg::adjoint_mul(&psi, &self.phi_block);
        let mut total = 0.0;
        for c in 0..comps.len() {
            for (k, dk) in self.q_weights.iter().enumerate() {
                let (r0, c0) = (c * nb, k * nb);
                let mut acc = 0.0;
                for al in 0..nb {
                    for be in 0..nb {
                        let x = a[(r0 + al, c0 + be)];
                        let y = a[(r0 + be, c0 + al)];
                        acc += x.re * y.re + x.im * y.im;
                    }
                }
                total += dk * acc;
            }
        }
        if let Some(p) = &self.p_part {
            total += comps
                .iter()
                .map(|s| linalg::sandwich(s.amplitudes(), p, s.amplitudes()).re)
                .sum::<f64>();
        }
        total / comps.len() as f64
    }
}

/// Rank-1 witness `(|φ⟩⟨φ|)^{T_B}`.
pub fn witness_from_vector(phi: PureState) -> Witness {
    Witness::build(phi.dims(), vec![1.0], vec![phi], WitnessKind::Rank1)
}

/// `Σ d_k (|φ_k⟩⟨φ_k|)^{T_B}` for orthonormal `φ_k`; weights default to `1/k`.
pub fn witness_rank_k(phis: Vec<PureState>, weights: Option<Vec<f64>>) -> Result<Witness> {
    let k = phis.len();
    if k == 0 {
        return Err(invalid("a witness needs at least one vector"));
    }
    let dims = phis[0].dims();
    for p in &phis {
        dims.check_same(&p.dims())?;
    }
    let mut worst = 0.0f64;
    for i in 0..k {
        for j in i..k {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((phis[i].inner(&phis[j]) - C64::new(target, 0.0)).norm());
        }
    }
    if worst > ORTHONORMAL_TOL {
        return Err(Error::NotOrthonormal(worst));
    }
    let weights = validate_weights(weights.unwrap_or_else(|| vec![1.0 / k as f64; k]), k)?;
    let kind = if k == 1 { WitnessKind::Rank1 } else { WitnessKind::RankK };
    Ok(Witness::build(dims, weights, phis, kind))
}

/// Skips the orthonormality check, to probe what overlapping vectors do.
#[cfg(test)]
fn witness_rank_k_unchecked(phis: Vec<PureState>, weights: Vec<f64>) -> Witness {
    let dims = phis[0].dims();
    Witness::build(dims, weights, phis, WitnessKind::RankK)
}

fn validate_weights(w: Vec<f64>, k: usize) -> Result<Vec<f64>> {
    if w.len() != k {
        return Err(invalid(format!("{} weights for {k} vectors", w.len())));
    }
    if w.iter().any(|&d| !(d > 0.0)) {
        return Err(invalid("witness weights must be positive"));
    }
    let s: f64 = w.iter().sum();
    if (s - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(invalid(format!("witness weights sum to {s}, expected 1")));
    }
    Ok(w)
}

/// Weight `λ = μ₁²` of a Schmidt-rank-2 witness vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Rank2WitnessParams {
    lambda: f64,
}

impl Rank2WitnessParams {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(invalid(format!("rank-2 weight lambda = {lambda} outside (0, 1)")));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `√λ|00⟩ + √(1−λ)|11⟩`.
    pub fn vector(&self, dims: BipartiteDims) -> PureState {
        let mut amps = vec![ZERO; dims.total()];
        amps[dims.index(0, 0)] = C64::new(self.lambda.sqrt(), 0.0);
        amps[dims.index(1, 1)] = C64::new((1.0 - self.lambda).sqrt(), 0.0);
        PureState::new(dims, amps).expect("unit norm by construction")
    }

    pub fn witness(&self, dims: BipartiteDims) -> Witness {
        witness_from_vector(self.vector(dims))
    }
}

/// Optimal decomposable witness of a state together with `λ_min(ρ^{T_B})`.
#[derive(Clone, Debug)]
pub struct OptimalWitness {
    pub witness: Witness,
    pub lambda_min: f64,
    /// `λ_min ≥ 0`: the state is PPT and no decomposable witness detects it.
    pub ppt: bool,
}

/// `W_opt = (|φ_min⟩⟨φ_min|)^{T_B}` with `φ_min` the eigenvector of `ρ^{T_B}`
/// for its smallest eigenvalue; `tr(W_opt ρ) = λ_min`. Degenerate minima
/// take the first vector returned by the eigensolver.
pub fn optimal_witness(state: &MixedState) -> Result<OptimalWitness> {
    let pt = state.partial_transpose_b();
    let s = linalg::hermitian_spectrum(&pt, true)?;
    let v = s.min_eigenvector.ok_or_else(|| Error::Numerical("missing eigenvector".into()))?;
    let phi = PureState::from_unnormalized(state.dims(), v)?;
    let mut witness = witness_from_vector(phi);
    witness.kind = WitnessKind::OptimalForState;
    Ok(OptimalWitness { witness, lambda_min: s.min_eigenvalue, ppt: s.min_eigenvalue >= 0.0 })
}

/// One draw of `w = Σ_{ij} √(λ_iλ_j) √(y_ij y_ji) cos(φ_ij − φ_ji)` with
/// independent `y_ij ~ Exp(1)` and uniform phases.
///
/// The `(i,j)` and `(j,i)` terms coincide, and the difference of two
/// independent uniform phases is again uniform mod 2π, so each unordered pair
/// draws two exponentials and one angle.
pub fn sample_w_overlap_model<R: Rng + ?Sized>(lambdas: &[f64], rng: &mut R) -> Result<f64> {
    validate_spectrum(lambdas)?;
    Ok(overlap_draw(lambdas, rng))
}

pub(crate) fn validate_spectrum(lambdas: &[f64]) -> Result<()> {
    if lambdas.is_empty() || lambdas.iter().any(|&l| !(l >= 0.0)) {
        return Err(invalid("overlap-model weights must be nonnegative"));
    }
    let s: f64 = lambdas.iter().sum();
    if (s - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(invalid(format!("overlap-model weights sum to {s}, expected 1")));
    }
    Ok(())
}

pub(crate) fn overlap_draw<R: Rng + ?Sized>(lambdas: &[f64], rng: &mut R) -> f64 {
    let angle = Uniform::new(0.0, 2.0 * PI).expect("valid range");
    let r = lambdas.len();
    let mut w = 0.0;
    for i in 0..r {
        let y: f64 = rng.sample(Exp1);
        w += lambdas[i] * y;
        for j in i + 1..r {
            let (yij, yji): (f64, f64) = (rng.sample(Exp1), rng.sample(Exp1));
            let theta = rng.sample(angle);
            w += 2.0 * (lambdas[i] * lambdas[j] * yij * yji).sqrt() * theta.cos();
        }
    }
    w
}

/// `tr Wⁿ` for `n = 1..=k_max` of a rank-1 witness from the Schmidt
/// spectrum `λ_i` of its vector: `tr W^{2k} = (Σλ_i^k)²`,
/// `tr W^{2k+1} = Σλ_i^{2k+1}`.
pub fn trace_powers(witness: &Witness, k_max: usize) -> Result<Vec<f64>> {
    let lambdas = rank1_spectrum(witness)?;
    let p = |e: i32| lambdas.iter().map(|l| l.powi(e)).sum::<f64>();
    Ok((1..=k_max as i32)
        .map(|n| if n % 2 == 0 { p(n / 2).powi(2) } else { p(n) })
        .collect())
}

/// `tr Wⁿ` from explicit matrix powers; the reference for [`trace_powers`],
/// practical only at small dimensions.
pub fn trace_powers_direct(witness: &Witness, k_max: usize) -> Vec<f64> {
    let w = witness.operator();
    let mut power = w.clone();
    let mut out = Vec::with_capacity(k_max);
    for n in 1..=k_max {
        if n > 1 {
            power = linalg::mul(&power, &w);
        }
        out.push(linalg::trace(&power).re);
    }
    out
}

/// Schmidt weights `λ_i = μ_i²` of the vector behind a rank-1 witness.
pub fn rank1_spectrum(witness: &Witness) -> Result<Vec<f64>> {
    if witness.rank() != 1 || witness.p_part.is_some() {
        return Err(Error::Unsupported("trace powers need a rank-1 witness without P".into()));
    }
    Ok(qstate::schmidt(&witness.q_vectors[0])?.reduced_eigenvalues())
}

/// `(|00⟩ + |11⟩)/√2` padded into `dims`.
pub fn bell_vector(dims: BipartiteDims) -> PureState {
    let mut amps = vec![ZERO; dims.total()];
    amps[dims.index(0, 0)] = C64::new(FRAC_1_SQRT_2, 0.0);
    amps[dims.index(1, 1)] = C64::new(FRAC_1_SQRT_2, 0.0);
    PureState::new(dims, amps).expect("unit norm by construction")
}
