//! Bipartite quantum states on `C^{N_A} ⊗ C^{N_B}`.
//!
//! Amplitudes use the row-major product basis `|iα⟩ = |i⟩_A ⊗ |α⟩_B` with the
//! A index slow: `index = i·n_b + α`. Every matrix-valued routine in the crate
//! follows the same ordering.

use faer::Mat;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, CMat, Spectrum, C64, ONE, ZERO};

/// Normalization tolerance for pure states (squared norm).
pub const NORM_TOL: f64 = 1e-12;
/// Relative threshold below which a Schmidt coefficient counts as zero.
pub const SCHMIDT_RANK_TOL: f64 = 1e-12;
/// Most negative eigenvalue accepted as round-off for a density matrix.
pub const PSD_TOL: f64 = 1e-10;
/// Most negative eigenvalue accepted by the entropy routines.
pub const ENTROPY_NEG_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BipartiteDims {
    n_a: usize,
    n_b: usize,
}

impl BipartiteDims {
    pub fn new(n_a: usize, n_b: usize) -> Result<Self> {
        if n_a < 2 || n_b < 2 {
            return Err(Error::InvalidDims { n_a, n_b });
        }
        Ok(Self { n_a, n_b })
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    /// Total Hilbert space dimension `N·N'`.
    pub fn total(&self) -> usize {
        self.n_a * self.n_b
    }

    pub fn index(&self, i: usize, alpha: usize) -> usize {
        i * self.n_b + alpha
    }

    pub(crate) fn check_same(&self, other: &BipartiteDims) -> Result<()> {
        if self != other {
            return Err(Error::DimsMismatch(format!(
                "{}x{} vs {}x{}",
                self.n_a, self.n_b, other.n_a, other.n_b
            )));
        }
        Ok(())
    }

    pub(crate) fn check_matrix(&self, m: &CMat) -> Result<()> {
        let d = self.total();
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimsMismatch(format!(
                "matrix is {}x{}, dims {}x{} need {d}x{d}",
                m.nrows(),
                m.ncols(),
                self.n_a,
                self.n_b
            )));
        }
        Ok(())
    }
}

/// A normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    dims: BipartiteDims,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Wraps amplitudes that are already normalized.
    pub fn new(dims: BipartiteDims, amplitudes: Vec<C64>) -> Result<Self> {
        check_len(&dims, amplitudes.len())?;
        let norm_sqr: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm_sqr));
        }
        Ok(Self { dims, amplitudes })
    }

    /// Normalizes the given amplitudes.
    pub fn from_unnormalized(dims: BipartiteDims, mut amplitudes: Vec<C64>) -> Result<Self> {
        check_len(&dims, amplitudes.len())?;
        let norm = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(invalid("cannot normalize a zero or non-finite vector"));
        }
        let inv = 1.0 / norm;
        amplitudes.iter_mut().for_each(|c| *c *= inv);
        Ok(Self { dims, amplitudes })
    }

    /// Computational basis state `|i⟩⊗|α⟩`.
    pub fn basis(dims: BipartiteDims, i: usize, alpha: usize) -> Result<Self> {
        if i >= dims.n_a || alpha >= dims.n_b {
            return Err(invalid(format!("basis index ({i}, {alpha}) out of range")));
        }
        let mut amplitudes = vec![ZERO; dims.total()];
        amplitudes[dims.index(i, alpha)] = ONE;
        Ok(Self { dims, amplitudes })
    }

    /// `|a⟩⊗|b⟩`, each factor normalized first.
    pub fn product(a: &[C64], b: &[C64]) -> Result<Self> {
        let dims = BipartiteDims::new(a.len(), b.len())?;
        let amplitudes = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
        Self::from_unnormalized(dims, amplitudes)
    }

    /// Builds a state from its `n_a × n_b` amplitude matrix.
    pub fn from_amplitude_matrix(m: &CMat) -> Result<Self> {
        let dims = BipartiteDims::new(m.nrows(), m.ncols())?;
        let amplitudes = (0..dims.n_a)
            .flat_map(|i| (0..dims.n_b).map(move |a| (i, a)))
            .map(|(i, a)| m[(i, a)])
            .collect();
        Self::from_unnormalized(dims, amplitudes)
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, i: usize, alpha: usize) -> C64 {
        self.amplitudes[self.dims.index(i, alpha)]
    }

    /// `Ψ_{iα} = ⟨iα|ψ⟩` as an `n_a × n_b` matrix.
    pub fn amplitude_matrix(&self) -> CMat {
        let nb = self.dims.n_b;
        Mat::from_fn(self.dims.n_a, nb, |i, a| self.amplitudes[i * nb + a])
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn density(&self) -> CMat {
        linalg::projector(&self.amplitudes)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `ρ_A = tr_B |ψ⟩⟨ψ| = Ψ Ψ†`.
    pub fn reduced_a(&self) -> CMat {
        linalg::gram_outer(&self.amplitude_matrix())
    }

    /// `ρ_B = tr_A |ψ⟩⟨ψ| = (Ψ† Ψ)^T`.
    pub fn reduced_b(&self) -> CMat {
        let psi = self.amplitude_matrix();
        linalg::adjoint_mul(&psi, &psi).transpose().to_owned()
    }
}

fn check_len(dims: &BipartiteDims, got: usize) -> Result<()> {
    if got != dims.total() {
        return Err(Error::LengthMismatch { expected: dims.total(), got });
    }
    Ok(())
}

#[derive(Clone, Debug)]
enum Representation {
    Components(Vec<PureState>),
    Matrix(CMat),
}

/// A density operator, either a uniform mixture `ρ = (1/m) Σ |ψ_i⟩⟨ψ_i|` of
/// pure components or an explicit Hermitian matrix.
///
/// The component form is kept whenever it is available so that witness
/// expectations never need the `(N·N')²` matrix.
#[derive(Clone, Debug)]
pub struct MixedState {
    dims: BipartiteDims,
    repr: Representation,
}

impl MixedState {
    pub fn pure(psi: PureState) -> Self {
        Self { dims: psi.dims, repr: Representation::Components(vec![psi]) }
    }

    pub fn uniform_mixture(components: Vec<PureState>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| invalid("a mixture needs at least one component"))?;
        let dims = first.dims;
        for c in &components {
            dims.check_same(&c.dims)?;
        }
        Ok(Self { dims, repr: Representation::Components(components) })
    }

    /// Validates Hermiticity, unit trace and positivity.
    pub fn from_matrix(dims: BipartiteDims, matrix: CMat) -> Result<Self> {
        dims.check_matrix(&matrix)?;
        let dev = linalg::hermitian_deviation(&matrix);
        if dev > 1e-12 {
            return Err(Error::NotHermitian(dev));
        }
        let tr = linalg::trace(&matrix).re;
        if (tr - 1.0).abs() > 1e-12 {
            return Err(Error::BadTrace(tr));
        }
        let lmin = linalg::hermitian_spectrum(&matrix, false)?.min_eigenvalue;
        if lmin < -PSD_TOL {
            return Err(Error::NegativeEigenvalue(lmin));
        }
        Ok(Self { dims, repr: Representation::Matrix(matrix) })
    }

    /// `𝟙 / (N·N')`.
    pub fn maximally_mixed(dims: BipartiteDims) -> Self {
        let d = dims.total();
        let m = Mat::from_fn(d, d, |i, j| if i == j { C64::new(1.0 / d as f64, 0.0) } else { ZERO });
        Self { dims, repr: Representation::Matrix(m) }
    }

    /// `ρ_A ⊗ ρ_B`.
    pub fn product(rho_a: &CMat, rho_b: &CMat) -> Result<Self> {
        let dims = BipartiteDims::new(rho_a.nrows(), rho_b.nrows())?;
        Self::from_matrix(dims, linalg::kron(rho_a, rho_b))
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    /// Number of mixed components `m`, when known.
    pub fn mixture_size(&self) -> Option<usize> {
        match &self.repr {
            Representation::Components(c) => Some(c.len()),
            Representation::Matrix(_) => None,
        }
    }

    pub fn components(&self) -> Option<&[PureState]> {
        match &self.repr {
            Representation::Components(c) => Some(c),
            Representation::Matrix(_) => None,
        }
    }

    /// Materializes the density matrix.
    pub fn to_matrix(&self) -> CMat {
        match &self.repr {
            Representation::Matrix(m) => m.clone(),
            Representation::Components(c) => {
                let mut g = linalg::gram_outer(&component_columns(c));
                let inv = 1.0 / c.len() as f64;
                g.col_iter_mut().for_each(|col| col.iter_mut().for_each(|x| *x *= inv));
                g
            }
        }
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        match &self.repr {
            Representation::Matrix(m) => linalg::trace_product(m, m).re,
            Representation::Components(c) => {
                let m = c.len() as f64;
                let mut acc = 0.0;
                for a in c {
                    for b in c {
                        acc += a.inner(b).norm_sqr();
                    }
                }
                acc / (m * m)
            }
        }
    }

    pub fn partial_transpose_b(&self) -> CMat {
        partial_transpose_b(&self.to_matrix(), self.dims).expect("dims are consistent")
    }

    pub fn reduced_a(&self) -> CMat {
        partial_trace_b(self)
    }

    pub fn reduced_b(&self) -> CMat {
        partial_trace_a(self)
    }

    /// Nonzero-relevant eigenvalues of `ρ`, ascending.
    ///
    /// For a mixture of `m < N·N'` components this diagonalizes the `m × m`
    /// Gram matrix `G†G/m`, which shares the nonzero spectrum of `ρ = GG†/m`.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        match &self.repr {
            Representation::Components(c) if c.len() < self.dims.total() => {
                let g = component_columns(c);
                let mut gram = linalg::adjoint_mul(&g, &g);
                let inv = 1.0 / c.len() as f64;
                gram.col_iter_mut().for_each(|col| col.iter_mut().for_each(|x| *x *= inv));
                Ok(linalg::hermitian_spectrum(&gram, false)?.eigenvalues)
            }
            _ => Ok(linalg::hermitian_spectrum(&self.to_matrix(), false)?.eigenvalues),
        }
    }

    /// `S(ρ)` in bits.
    pub fn entropy(&self) -> Result<f64> {
        entropy_from_eigenvalues(&self.eigenvalues()?)
    }
}

/// `D × m` matrix whose columns are the component amplitude vectors.
fn component_columns(c: &[PureState]) -> CMat {
    let d = c[0].dims.total();
    Mat::from_fn(d, c.len(), |r, k| c[k].amplitudes[r])
}

/// `[Ψ_1 | Ψ_2 | …]`, the component amplitude matrices side by side.
pub(crate) fn stacked_amplitudes(c: &[PureState]) -> CMat {
    let dims = c[0].dims;
    let nb = dims.n_b;
    Mat::from_fn(dims.n_a, nb * c.len(), |i, col| c[col / nb].amplitudes[i * nb + col % nb])
}

/// Borrowed view accepted by the partial traces.
#[derive(Clone, Copy, Debug)]
pub enum StateRef<'a> {
    Pure(&'a PureState),
    Mixed(&'a MixedState),
}

impl<'a> From<&'a PureState> for StateRef<'a> {
    fn from(p: &'a PureState) -> Self {
        StateRef::Pure(p)
    }
}

impl<'a> From<&'a MixedState> for StateRef<'a> {
    fn from(m: &'a MixedState) -> Self {
        StateRef::Mixed(m)
    }
}

impl StateRef<'_> {
    pub fn dims(&self) -> BipartiteDims {
        match self {
            StateRef::Pure(p) => p.dims,
            StateRef::Mixed(m) => m.dims,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    /// `μ_i`, nonincreasing, length `min(n_a, n_b)`.
    pub coefficients: Vec<f64>,
    pub basis_a: Vec<Vec<C64>>,
    pub basis_b: Vec<Vec<C64>>,
    pub rank: usize,
}

impl SchmidtDecomposition {
    /// `Σ μ_i |a_i⟩⊗|b_i⟩`.
    pub fn reconstruct(&self) -> Vec<C64> {
        let (na, nb) = (self.basis_a[0].len(), self.basis_b[0].len());
        let mut out = vec![ZERO; na * nb];
        for (k, mu) in self.coefficients.iter().enumerate() {
            for i in 0..na {
                let ai = self.basis_a[k][i] * *mu;
                for a in 0..nb {
                    out[i * nb + a] += ai * self.basis_b[k][a];
                }
            }
        }
        out
    }

    /// Eigenvalues `λ_i = μ_i²` of the reduced density matrix.
    pub fn reduced_eigenvalues(&self) -> Vec<f64> {
        self.coefficients.iter().map(|m| m * m).collect()
    }
}

/// Haar-random pure state: i.i.d. standard complex Gaussian amplitudes,
/// normalized.
pub fn sample_random_pure<R: Rng + ?Sized>(dims: BipartiteDims, rng: &mut R) -> PureState {
    let mut amplitudes: Vec<C64> = (0..dims.total())
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let inv = 1.0 / amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    amplitudes.iter_mut().for_each(|c| *c *= inv);
    PureState { dims, amplitudes }
}

/// Uniform mixture of `m` independent Haar-random pure states.
pub fn mix_random_states<R: Rng + ?Sized>(
    dims: BipartiteDims,
    m: usize,
    rng: &mut R,
) -> Result<MixedState> {
    if m == 0 {
        return Err(invalid("mixture size m must be at least 1"));
    }
    let comps = (0..m).map(|_| sample_random_pure(dims, rng)).collect();
    Ok(MixedState { dims, repr: Representation::Components(comps) })
}

/// `k` Haar-random, mutually orthonormal states (Gram–Schmidt on Gaussian
/// vectors).
pub fn sample_orthonormal_states<R: Rng + ?Sized>(
    dims: BipartiteDims,
    k: usize,
    rng: &mut R,
) -> Result<Vec<PureState>> {
    if k == 0 || k > dims.total() {
        return Err(invalid(format!("cannot draw {k} orthonormal states in dimension {}", dims.total())));
    }
    let mut out: Vec<PureState> = Vec::with_capacity(k);
    while out.len() < k {
        let mut v = sample_random_pure(dims, rng).amplitudes;
        // Two passes keep the set orthonormal to round-off.
        for _ in 0..2 {
            for q in &out {
                let ov: C64 = q.amplitudes.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                v.iter_mut().zip(&q.amplitudes).for_each(|(x, a)| *x -= ov * a);
            }
        }
        if let Ok(p) = PureState::from_unnormalized(dims, v) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Random density matrix on `C^n` (`GG†/tr`, `G` an `n × n` Ginibre matrix).
pub fn sample_random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let g = Mat::from_fn(n, n, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let mut rho = linalg::gram_outer(&g);
    let tr = linalg::trace(&rho).re;
    rho.col_iter_mut().for_each(|c| c.iter_mut().for_each(|x| *x /= tr));
    rho
}

/// Random separable product state `ρ_A ⊗ ρ_B`.
pub fn sample_product_state<R: Rng + ?Sized>(dims: BipartiteDims, rng: &mut R) -> MixedState {
    let rho_a = sample_random_density(dims.n_a, rng);
    let rho_b = sample_random_density(dims.n_b, rng);
    MixedState { dims, repr: Representation::Matrix(linalg::kron(&rho_a, &rho_b)) }
}

/// Schmidt decomposition from the SVD `Ψ = U S V†`: `|a_k⟩ = U e_k`,
/// `|b_k⟩ = conj(V e_k)`.
pub fn schmidt(state: &PureState) -> Result<SchmidtDecomposition> {
    let psi = state.amplitude_matrix();
    let svd = psi.thin_svd().map_err(|e| Error::Numerical(format!("{e:?}")))?;
    let (u, s, v) = (svd.U(), svd.S(), svd.V());
    let r = s.dim();
    let coefficients: Vec<f64> = (0..r).map(|k| s[k].re).collect();
    let basis_a = (0..r).map(|k| (0..u.nrows()).map(|i| u[(i, k)]).collect()).collect();
    let basis_b = (0..r).map(|k| (0..v.nrows()).map(|a| v[(a, k)].conj()).collect()).collect();
    let rank = schmidt_rank(&coefficients);
    Ok(SchmidtDecomposition { coefficients, basis_a, basis_b, rank })
}

/// Schmidt coefficients only, nonincreasing.
pub fn schmidt_coefficients(state: &PureState) -> Result<Vec<f64>> {
    linalg::singular_values(&state.amplitude_matrix())
}

pub fn schmidt_rank(coefficients: &[f64]) -> usize {
    let max = coefficients.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    coefficients.iter().filter(|&&m| m / max > SCHMIDT_RANK_TOL).count()
}

/// `ρ_A = tr_B ρ`, `(ρ_A)_{ij} = Σ_α ρ_{iα,jα}`.
pub fn partial_trace_b<'a>(state: impl Into<StateRef<'a>>) -> CMat {
    match state.into() {
        StateRef::Pure(p) => p.reduced_a(),
        StateRef::Mixed(m) => match &m.repr {
            Representation::Components(c) => {
                let mut r = linalg::gram_outer(&stacked_amplitudes(c));
                let inv = 1.0 / c.len() as f64;
                r.col_iter_mut().for_each(|col| col.iter_mut().for_each(|x| *x *= inv));
                r
            }
            Representation::Matrix(rho) => partial_trace_b_matrix(rho, m.dims),
        },
    }
}

/// `ρ_B = tr_A ρ`, `(ρ_B)_{αβ} = Σ_i ρ_{iα,iβ}`.
pub fn partial_trace_a<'a>(state: impl Into<StateRef<'a>>) -> CMat {
    match state.into() {
        StateRef::Pure(p) => p.reduced_b(),
        StateRef::Mixed(m) => match &m.repr {
            Representation::Components(c) => {
                let nb = m.dims.n_b;
                let mut acc = Mat::<C64>::zeros(nb, nb);
                for p in c {
                    let rb = p.reduced_b();
                    acc.col_iter_mut().zip(rb.col_iter()).for_each(|(a, b)| {
                        a.iter_mut().zip(b.iter()).for_each(|(x, y)| *x += y);
                    });
                }
                let inv = 1.0 / c.len() as f64;
                acc.col_iter_mut().for_each(|col| col.iter_mut().for_each(|x| *x *= inv));
                acc
            }
            Representation::Matrix(rho) => partial_trace_a_matrix(rho, m.dims),
        },
    }
}

fn partial_trace_b_matrix(rho: &CMat, dims: BipartiteDims) -> CMat {
    let nb = dims.n_b;
    Mat::from_fn(dims.n_a, dims.n_a, |i, j| (0..nb).map(|a| rho[(i * nb + a, j * nb + a)]).sum())
}

fn partial_trace_a_matrix(rho: &CMat, dims: BipartiteDims) -> CMat {
    let nb = dims.n_b;
    Mat::from_fn(nb, nb, |a, b| (0..dims.n_a).map(|i| rho[(i * nb + a, i * nb + b)]).sum())
}

/// `ρ^{T_B}_{iα,jβ} = ρ_{iβ,jα}`.
pub fn partial_transpose_b(rho: &CMat, dims: BipartiteDims) -> Result<CMat> {
    dims.check_matrix(rho)?;
    let nb = dims.n_b;
    Ok(Mat::from_fn(rho.nrows(), rho.ncols(), |r, c| {
        let (i, a) = (r / nb, r % nb);
        let (j, b) = (c / nb, c % nb);
        rho[(i * nb + b, j * nb + a)]
    }))
}

pub use crate::linalg::hermitian_spectrum;

/// Spectrum of a Hermitian matrix; see [`linalg::hermitian_spectrum`].
pub fn spectrum(matrix: &CMat, want_vectors: bool) -> Result<Spectrum> {
    linalg::hermitian_spectrum(matrix, want_vectors)
}

/// `S(ρ) = −tr ρ log₂ ρ` of a PSD, unit-trace matrix.
pub fn von_neumann_entropy(rho: &CMat) -> Result<f64> {
    let tr = linalg::trace(rho).re;
    if (tr - 1.0).abs() > 1e-8 {
        return Err(Error::BadTrace(tr));
    }
    entropy_from_eigenvalues(&linalg::hermitian_spectrum(rho, false)?.eigenvalues)
}

/// `−Σ λ log₂ λ` with `0 log 0 = 0`; rejects eigenvalues below `−1e−8`.
pub fn entropy_from_eigenvalues(eigenvalues: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &l in eigenvalues {
        if l < -ENTROPY_NEG_TOL {
            return Err(Error::NegativeEigenvalue(l));
        }
        if l > 0.0 {
            s -= l * l.log2();
        }
    }
    Ok(s)
}

/// `(|0…0⟩ + |1…1⟩)/√2` on `n_qubits`, split into two halves.
pub fn ghz_state(n_qubits: usize) -> Result<PureState> {
    if n_qubits < 2 || !n_qubits.is_multiple_of(2) {
        return Err(invalid(format!("GHZ bipartition needs an even qubit count >= 2, got {n_qubits}")));
    }
    let half = 1usize
        .checked_shl(n_qubits as u32 / 2)
        .filter(|&h| h <= 1 << 15)
        .ok_or_else(|| invalid("too many qubits"))?;
    let dims = BipartiteDims::square(half)?;
    let mut amplitudes = vec![ZERO; dims.total()];
    let h = std::f64::consts::FRAC_1_SQRT_2;
    amplitudes[0] = C64::new(h, 0.0);
    amplitudes[dims.total() - 1] = C64::new(h, 0.0);
    Ok(PureState { dims, amplitudes })
}

/// Full eigenvalue multiset of `(|ψ⟩⟨ψ|)^{T_B}` from Schmidt coefficients:
/// `{μ_i²} ∪ {±μ_iμ_j : i<j}`, zero-padded to `N·N'`, ascending.
pub fn pure_pt_spectrum(coefficients: &[f64], dims: BipartiteDims) -> Vec<f64> {
    let r = coefficients.len();
    let mut out = Vec::with_capacity(dims.total());
    for i in 0..r {
        out.push(coefficients[i] * coefficients[i]);
        for j in i + 1..r {
            let p = coefficients[i] * coefficients[j];
            out.push(p);
            out.push(-p);
        }
    }
    out.resize(dims.total(), 0.0);
    out.sort_by(f64::total_cmp);
    out
}

/// Minimal eigenvalue of `(|ψ⟩⟨ψ|)^{T_B}`, from the two largest Schmidt
/// coefficients.
pub fn pure_pt_min_eigenvalue(state: &PureState) -> Result<f64> {
    let mu = schmidt_coefficients(state)?;
    let dims = state.dims;
    let full_square = mu.len() * mu.len() == dims.total();
    Ok(if mu.len() >= 2 && mu[1] > 0.0 {
        -mu[0] * mu[1]
    } else if full_square {
        mu.last().map(|m| m * m).unwrap_or(0.0)
    } else {
        0.0
    })
}
