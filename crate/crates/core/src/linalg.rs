//! Dense complex linear algebra used throughout the crate.
//!
//! Matrices are `faer::Mat<Complex64>`. The Hermitian eigensolver and the SVD
//! delegate to faer; everything here is judged by reconstruction error rather
//! than by the algorithm behind it.

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, Par, Side};
use serde::Serialize;

use crate::error::{Error, Result};

pub type C64 = num_complex::Complex64;
pub type CMat = Mat<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Hermiticity tolerance, relative to `max(1, max|A_ij|)`.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug, Serialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `eigenvalues`.
    #[serde(skip)]
    pub eigenvectors: Option<CMat>,
    pub min_eigenvalue: f64,
    #[serde(skip)]
    pub min_eigenvector: Option<Vec<C64>>,
}

impl Spectrum {
    /// `V diag(λ) V†`, if eigenvectors were requested.
    pub fn reconstruct(&self) -> Option<CMat> {
        let v = self.eigenvectors.as_ref()?;
        let n = v.nrows();
        let scaled = Mat::from_fn(n, n, |i, j| v[(i, j)] * self.eigenvalues[j]);
        Some(mul(&scaled, &adjoint(v)))
    }
}

/// Full spectrum of a Hermitian matrix.
///
/// The input is symmetrized as `(A + A†)/2` before solving. Inputs whose
/// anti-Hermitian part exceeds [`HERMITIAN_TOL`] are rejected.
pub fn hermitian_spectrum(a: &CMat, want_vectors: bool) -> Result<Spectrum> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimsMismatch(format!(
            "spectrum of a non-square {}x{} matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    let dev = hermitian_deviation(a);
    if dev > HERMITIAN_TOL * max_abs(a).max(1.0) {
        return Err(Error::NotHermitian(dev));
    }
    let n = a.nrows();
    let sym = Mat::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    if want_vectors {
        let evd = sym
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Numerical(format!("{e:?}")))?;
        let eigenvalues: Vec<f64> = (0..n).map(|i| evd.S()[i].re).collect();
        let u = evd.U().to_owned();
        let min_eigenvector = (n > 0).then(|| (0..n).map(|i| u[(i, 0)]).collect());
        Ok(Spectrum {
            min_eigenvalue: eigenvalues.first().copied().unwrap_or(f64::NAN),
            eigenvalues,
            eigenvectors: Some(u),
            min_eigenvector,
        })
    } else {
        let eigenvalues = hermitian_eigenvalues_unchecked(&sym)?;
        Ok(Spectrum {
            min_eigenvalue: eigenvalues.first().copied().unwrap_or(f64::NAN),
            eigenvalues,
            eigenvectors: None,
            min_eigenvector: None,
        })
    }
}

/// Ascending eigenvalues; reads only the lower triangle.
pub(crate) fn hermitian_eigenvalues_unchecked(a: &CMat) -> Result<Vec<f64>> {
    a.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numerical(format!("{e:?}")))
}

/// Singular values, nonincreasing.
pub(crate) fn singular_values(a: &CMat) -> Result<Vec<f64>> {
    a.singular_values()
        .map_err(|e| Error::Numerical(format!("{e:?}")))
}

pub fn hermitian_deviation(a: &CMat) -> f64 {
    let n = a.nrows();
    let mut dev = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            dev = dev.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn max_abs(a: &CMat) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    m
}

pub fn trace(a: &CMat) -> C64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)]).sum()
}

pub fn adjoint(a: &CMat) -> CMat {
    a.adjoint().to_owned()
}

pub fn mul(a: &CMat, b: &CMat) -> CMat {
    let mut out = Mat::zeros(a.nrows(), b.ncols());
    matmul(out.as_mut(), Accum::Replace, a.as_ref(), b.as_ref(), ONE, Par::Seq);
    out
}

/// `A† B` without forming the adjoint.
pub fn adjoint_mul(a: &CMat, b: &CMat) -> CMat {
    let mut out = Mat::zeros(a.ncols(), b.ncols());
    matmul(out.as_mut(), Accum::Replace, a.adjoint(), b.as_ref(), ONE, Par::Seq);
    out
}

/// `A A†`.
pub fn gram_outer(a: &CMat) -> CMat {
    let mut out = Mat::zeros(a.nrows(), a.nrows());
    matmul(out.as_mut(), Accum::Replace, a.as_ref(), a.adjoint(), ONE, Par::Seq);
    out
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ra, ca, rb, cb) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    Mat::from_fn(ra * rb, ca * cb, |r, c| a[(r / rb, c / cb)] * b[(r % rb, c % cb)])
}

pub fn identity(n: usize) -> CMat {
    Mat::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
}

pub fn from_real_diagonal(d: &[f64]) -> CMat {
    let n = d.len();
    Mat::from_fn(n, n, |i, j| if i == j { C64::new(d[i], 0.0) } else { ZERO })
}

/// `|v⟩⟨v|`.
pub fn projector(v: &[C64]) -> CMat {
    let n = v.len();
    Mat::from_fn(n, n, |i, j| v[i] * v[j].conj())
}

/// `⟨u|A|v⟩`.
pub fn sandwich(u: &[C64], a: &CMat, v: &[C64]) -> C64 {
    let mut acc = ZERO;
    for j in 0..a.ncols() {
        let mut col = ZERO;
        for i in 0..a.nrows() {
            col += u[i].conj() * a[(i, j)];
        }
        acc += col * v[j];
    }
    acc
}

/// Real part of `tr(A B)` for square matrices of equal size.
pub fn trace_product(a: &CMat, b: &CMat) -> C64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}
