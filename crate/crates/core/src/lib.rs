//! Verification toolkit for Pauli manipulation detection (PMD) codes.
//!
//! A `q^k`-dimensional subspace with projector `Π` of `C^{q^n}` is an
//! `(n, k, ε)_q`-PMD code when `‖Π E Π‖∞ ≤ ε` for every non-identity Pauli
//! operator `E`. This crate builds the q-ary Pauli operators from finite-field
//! data, measures `ε` exactly for arbitrary code spaces, checks the averaging
//! identities behind the lower bound
//! `ε ≥ √((q^{2n−λ} − 1)/(q^{2n} − 1))` with `λ = n − k`, and searches for codes
//! that approach it.
//!
//! Modules:
//!
//! - [`finite_field`]: GF(p^m) arithmetic, field trace, dual bases
//! - [`pauli`]: labels, dense and sparse realizations, commutation phases
//! - [`codespace`]: code subspaces, file I/O, random generation
//! - [`metrics`]: operator norms, `ε`, design and overlap identities, bounds
//! - [`search`]: multi-restart local search over code spaces

pub mod codespace;
pub mod error;
pub mod finite_field;
pub mod linalg;
pub mod metrics;
pub mod pauli;
pub mod search;

pub use codespace::CodeSpace;
pub use error::{CodeSpaceError, FieldError, LinalgError, MetricsError, PauliError, SearchError};
pub use finite_field::{FieldCtx, FieldElement};
pub use linalg::DenseOperator;
pub use metrics::{DesignCheckReport, PmdReport};
pub use pauli::{PauliLabel, PauliSpace};
pub use search::{SearchConfig, SearchResult};

/// Size limits applied before any dense or exhaustive computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest `q^n` for which dense `q^n × q^n` matrices are formed.
    pub max_dense_dim: u64,
    /// Largest number of Pauli labels enumerated.
    pub max_labels: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_dense_dim: 1024,
            max_labels: 10_000_000,
        }
    }
}

impl Limits {
    /// Defaults, with `max_dense_dim` taken from `PMD_MAX_DIM` when set.
    pub fn from_env() -> Self {
        let mut limits = Limits::default();
        if let Some(v) = std::env::var("PMD_MAX_DIM").ok().and_then(|s| s.trim().parse().ok()) {
            limits.max_dense_dim = v;
        }
        limits
    }

    pub fn check_dense(&self, dim: u64) -> Result<(), PauliError> {
        if dim > self.max_dense_dim {
            return Err(PauliError::DenseLimit {
                dim,
                limit: self.max_dense_dim,
            });
        }
        Ok(())
    }

    pub fn check_labels(&self, count: u128) -> Result<(), PauliError> {
        if count > self.max_labels as u128 {
            return Err(PauliError::EnumerationLimit {
                count,
                limit: self.max_labels,
            });
        }
        Ok(())
    }
}
