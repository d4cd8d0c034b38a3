//! Dense complex matrices and the operator norm.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::LinalgError;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Matrices up to this size go through a full Hermitian eigendecomposition.
pub const EIGEN_DIM_LIMIT: usize = 64;
pub const POWER_REL_TOL: f64 = 1e-12;
pub const POWER_MAX_ITERS: usize = 10_000;

/// A square complex matrix (column-major).
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator(CMatrix);

impl DenseOperator {
    pub fn new(m: CMatrix) -> Self {
        assert!(m.is_square(), "DenseOperator must be square");
        DenseOperator(m)
    }

    pub fn identity(dim: usize) -> Self {
        DenseOperator(CMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        DenseOperator(CMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        DenseOperator(self.0.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn mul(&self, other: &DenseOperator) -> DenseOperator {
        DenseOperator(&self.0 * &other.0)
    }

    /// `‖A - B‖∞`.
    pub fn distance(&self, other: &DenseOperator) -> Result<f64, LinalgError> {
        operator_norm(&(&self.0 - &other.0))
    }

    /// `dim × dim` matrix of i.i.d. standard complex Gaussians from ChaCha8
    /// seeded with `seed`, filled column by column.
    pub fn random_gaussian(dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DenseOperator(crate::codespace::gaussian_matrix(&mut rng, dim, dim))
    }

    /// Max-entry deviation of `M†M` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        max_abs_diff(
            &(self.0.adjoint() * &self.0),
            &CMatrix::identity(self.dim(), self.dim()),
        )
    }
}

impl From<CMatrix> for DenseOperator {
    fn from(m: CMatrix) -> Self {
        DenseOperator::new(m)
    }
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Largest singular value of `m`.
///
/// Uses the Hermitian eigendecomposition of `M†M` up to [`EIGEN_DIM_LIMIT`]
/// columns and Rayleigh-quotient power iteration beyond.
pub fn operator_norm(m: &CMatrix) -> Result<f64, LinalgError> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(LinalgError::NonFinite);
    }
    if m.is_empty() {
        return Ok(0.0);
    }
    if m.ncols() == 1 {
        return Ok(m.column(0).norm());
    }
    let gram = m.adjoint() * m;
    if gram.nrows() <= EIGEN_DIM_LIMIT {
        let eig = SymmetricEigen::new(gram);
        let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
        return Ok(top.sqrt());
    }
    power_top_eigenvalue(&gram).map(f64::sqrt)
}

fn power_top_eigenvalue(h: &CMatrix) -> Result<f64, LinalgError> {
    let n = h.nrows();
    // deterministic, generic starting vector
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    let mut v = CVector::from_fn(n, |_, _| {
        state = splitmix64(state);
        let re = (state >> 11) as f64 / (1u64 << 53) as f64 + 0.5;
        state = splitmix64(state);
        let im = (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
        Complex64::new(re, im)
    });
    v /= Complex64::from(v.norm());
    let mut prev = f64::NAN;
    for _ in 0..POWER_MAX_ITERS {
        let w = h * &v;
        let lambda = v.dotc(&w).re;
        let norm = w.norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        v = w / Complex64::from(norm);
        if (lambda - prev).abs() <= POWER_REL_TOL * lambda.abs() {
            return Ok(lambda.max(0.0));
        }
        prev = lambda;
    }
    Err(LinalgError::NoConvergence {
        iterations: POWER_MAX_ITERS,
    })
}

pub(crate) fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Modified Gram-Schmidt on the columns of `a`.
///
/// Returns `None` when a column loses more than `rank_tol` of its norm to the
/// previous ones, i.e. the columns are numerically dependent.
pub fn modified_gram_schmidt(a: &CMatrix, rank_tol: f64) -> Option<CMatrix> {
    let mut q = a.clone();
    for j in 0..q.ncols() {
        let original = q.column(j).norm();
        for i in 0..j {
            let qi = q.column(i).clone_owned();
            let proj = qi.dotc(&q.column(j));
            let mut cj = q.column_mut(j);
            cj -= qi * proj;
        }
        let norm = q.column(j).norm();
        if norm.is_nan() || norm <= rank_tol * original.max(f64::MIN_POSITIVE) {
            return None;
        }
        let mut cj = q.column_mut(j);
        cj /= Complex64::from(norm);
    }
    Some(q)
}

/// Max-entry deviation of `C†C` from the identity.
pub fn orthonormality_defect(c: &CMatrix) -> f64 {
    max_abs_diff(&(c.adjoint() * c), &CMatrix::identity(c.ncols(), c.ncols()))
}
