//! The quantitative core: `ε` of a code space, the averaging identities used
//! to lower-bound it, and the closed-form bounds.
//!
//! All sums over the `q^{2n}` Pauli labels are split into fixed-size chunks of
//! [`CHUNK`] labels. Chunks may run on any number of rayon workers; partial
//! results are always combined in chunk order, so every output is identical
//! for every worker count.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codespace::CodeSpace;
use crate::error::MetricsError;
use crate::linalg::{operator_norm, CMatrix, DenseOperator};
use crate::pauli::{PauliAction, PauliLabel, PauliSpace};
use crate::Limits;

pub use crate::linalg::operator_norm as operator_norm_of;

/// Labels per work unit.
pub const CHUNK: u64 = 64;

/// Tolerance for bound slack and identity checks.
pub const IDENTITY_TOL: f64 = 1e-9;

/// `C† E C`, whose operator norm equals `‖Π E Π‖∞`.
pub fn reduced_error_matrix(space: &PauliSpace, cs: &CodeSpace, label: &PauliLabel) -> Result<CMatrix, MetricsError> {
    check_space(space, cs)?;
    let action = space.action(label)?;
    Ok(reduce(&action, cs.basis()))
}

fn reduce(action: &PauliAction, c: &CMatrix) -> CMatrix {
    c.adjoint() * action.apply_columns(c)
}

fn check_space(space: &PauliSpace, cs: &CodeSpace) -> Result<(), MetricsError> {
    if space.ctx().id() != cs.ctx().id() || space.n() != cs.n() {
        return Err(MetricsError::InvalidParameters(format!(
            "code space (q={}, n={}) does not match Pauli space (q={}, n={})",
            cs.q(),
            cs.n(),
            space.q(),
            space.n()
        )));
    }
    Ok(())
}

/// Result of a full scan over all Pauli labels.
#[derive(Clone, Debug)]
pub struct EpsilonResult {
    /// `max_{E ≠ I} ‖Π E Π‖∞`.
    pub epsilon: f64,
    pub worst_index: u64,
    pub worst_label: PauliLabel,
    /// `(1/q^{2n}) Σ_E ‖Π E Π‖∞²`, identity included.
    pub mean_sq_norm: f64,
}

#[derive(Clone, Copy)]
struct ChunkMax {
    norm: f64,
    index: u64,
    sum_sq: f64,
}

impl ChunkMax {
    fn merge(self, other: ChunkMax) -> ChunkMax {
        // earlier index wins ties; `other` always comes later in chunk order
        let (norm, index) = if other.norm > self.norm {
            (other.norm, other.index)
        } else {
            (self.norm, self.index)
        };
        ChunkMax {
            norm,
            index,
            sum_sq: self.sum_sq + other.sum_sq,
        }
    }
}

/// Evaluates `ε` exactly by enumerating every non-identity label.
///
/// Ties are broken by enumeration order. Runs on the current rayon pool.
pub fn epsilon_of(cs: &CodeSpace, limits: &Limits) -> Result<EpsilonResult, MetricsError> {
    let space = PauliSpace::new(cs.ctx(), cs.n())?;
    epsilon_in(&space, cs, limits)
}

pub fn epsilon_in(space: &PauliSpace, cs: &CodeSpace, limits: &Limits) -> Result<EpsilonResult, MetricsError> {
    check_space(space, cs)?;
    limits.check_labels(space.num_labels() as u128)?;
    let c = cs.basis();
    let partials: Vec<Result<ChunkMax, MetricsError>> = space
        .chunks(CHUNK)
        .into_par_iter()
        .map(|range| {
            let mut acc = ChunkMax {
                norm: f64::NEG_INFINITY,
                index: u64::MAX,
                sum_sq: 0.0,
            };
            for idx in range {
                let norm = operator_norm(&reduce(&space.action_at(idx), c))?;
                acc.sum_sq += norm * norm;
                if idx != 0 && norm > acc.norm {
                    acc.norm = norm;
                    acc.index = idx;
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total: Option<ChunkMax> = None;
    for part in partials {
        let part = part?;
        total = Some(match total {
            None => part,
            Some(t) => t.merge(part),
        });
    }
    let total = total.expect("at least one chunk");
    Ok(EpsilonResult {
        epsilon: total.norm,
        worst_index: total.index,
        worst_label: space.label(total.index),
        mean_sq_norm: total.sum_sq / space.num_labels() as f64,
    })
}

/// `|⟨ψ₁| E† |ψ₂⟩|` for unit code states `ψ₁, ψ₂`; bounded by `‖Π E Π‖∞`.
pub fn orthogonality_witness(
    cs: &CodeSpace,
    label: &PauliLabel,
    psi1: &[Complex64],
    psi2: &[Complex64],
) -> Result<f64, MetricsError> {
    let space = PauliSpace::new(cs.ctx(), cs.n())?;
    for psi in [psi1, psi2] {
        if psi.len() != cs.dim() {
            return Err(MetricsError::InvalidParameters(format!(
                "state has length {}, expected {}",
                psi.len(),
                cs.dim()
            )));
        }
        let v = nalgebra::DVector::from_column_slice(psi);
        let norm = v.norm();
        if (norm - 1.0).abs() > IDENTITY_TOL {
            return Err(MetricsError::InvalidParameters(format!(
                "state has norm {norm}, expected 1"
            )));
        }
        let c = cs.basis();
        let residual = (&v - c * (c.adjoint() * &v)).norm();
        if residual > IDENTITY_TOL {
            return Err(MetricsError::OutsideCodeSpace { residual });
        }
    }
    // ⟨ψ₁|E†|ψ₂⟩ = conj(⟨ψ₂|E|ψ₁⟩)
    let e_psi1 = space.apply(label, psi1)?;
    let amp: Complex64 = psi2.iter().zip(&e_psi1).map(|(a, b)| a.conj() * b).sum();
    Ok(amp.norm())
}

/// `‖ (1/q^{2n}) Σ_E E O E† − (Tr O / q^n) I ‖∞`.
pub fn design_average_check(space: &PauliSpace, o: &DenseOperator, limits: &Limits) -> Result<f64, MetricsError> {
    let dim = space.dim();
    if o.dim() != dim {
        return Err(MetricsError::InvalidParameters(format!(
            "operator is {}x{}, expected {dim}x{dim}",
            o.dim(),
            o.dim()
        )));
    }
    limits.check_dense(dim as u64)?;
    limits.check_labels(space.num_labels() as u128)?;
    let m = o.matrix();
    let sum = ordered_sum(space, dim, |idx| space.action_at(idx).conjugate(m));
    let avg = sum / Complex64::from(space.num_labels() as f64);
    let target = CMatrix::identity(dim, dim) * (o.trace() / dim as f64);
    Ok(operator_norm(&(avg - target))?)
}

fn ordered_sum<F>(space: &PauliSpace, size: usize, term: F) -> CMatrix
where
    F: Fn(u64) -> CMatrix + Sync,
{
    let partials: Vec<CMatrix> = space
        .chunks(CHUNK)
        .into_par_iter()
        .map(|range| {
            let mut acc = CMatrix::zeros(size, size);
            for idx in range {
                acc += term(idx);
            }
            acc
        })
        .collect();
    partials
        .into_iter()
        .fold(CMatrix::zeros(size, size), |acc, part| acc + part)
}

/// Average-overlap operator `A = (1/q^{2n}) Σ_E Π E† Π E Π`, reported as
/// `(‖A‖∞, ‖A − q^{−λ} Π‖∞)`. Both are computed in the code basis.
pub fn average_overlap(cs: &CodeSpace, limits: &Limits) -> Result<(f64, f64), MetricsError> {
    let space = PauliSpace::new(cs.ctx(), cs.n())?;
    limits.check_labels(space.num_labels() as u128)?;
    let c = cs.basis();
    let kd = cs.code_dim();
    let sum = ordered_sum(&space, kd, |idx| {
        let m = reduce(&space.action_at(idx), c);
        m.adjoint() * m
    });
    let avg = sum / Complex64::from(space.num_labels() as f64);
    let value = operator_norm(&avg)?;
    let expected = (cs.q() as f64).powi(-(cs.lambda() as i32));
    let deviation = operator_norm(&(avg - CMatrix::identity(kd, kd) * Complex64::from(expected)))?;
    Ok((value, deviation))
}

fn check_q(q: u64) -> Result<(), MetricsError> {
    if q < 2 {
        return Err(MetricsError::InvalidParameters(format!("q = {q} must be at least 2")));
    }
    Ok(())
}

/// Lower bound `√((q^{2n−λ} − 1)/(q^{2n} − 1))` on `ε` for any
/// `(n, n−λ, ε)_q` code. The ratio is formed from exact integers.
pub fn theorem1_bound(n: u32, lambda: u32, q: u64) -> Result<f64, MetricsError> {
    check_q(q)?;
    if n == 0 || lambda > n {
        return Err(MetricsError::InvalidParameters(format!(
            "need 0 <= lambda <= n and n >= 1 (n = {n}, lambda = {lambda})"
        )));
    }
    let q = BigUint::from(q);
    let num = q.pow(2 * n - lambda) - BigUint::one();
    let den = q.pow(2 * n) - BigUint::one();
    Ok(big_sqrt_ratio(&num, &den))
}

/// `√(num/den)` for `0 < num ≤ den`, via an integer quotient carrying ~128
/// significant bits so that neither overflow nor underflow occurs before the root.
fn big_sqrt_ratio(num: &BigUint, den: &BigUint) -> f64 {
    let deficit = den.bits().saturating_sub(num.bits()) + 128;
    let half = deficit.div_ceil(2);
    let quotient = (num << (2 * half)) / den;
    let root = quotient.to_f64().expect("quotient fits in f64").sqrt();
    root * 2f64.powi(-(half as i32))
}

/// `q^{−n}`, the floor every `ε` sits above.
pub fn epsilon_floor(n: u32, q: u64) -> f64 {
    (q as f64).powi(-(n as i32))
}

/// Minimum redundancy `2 log_q(1/ε) − log_q 2` implied by `ε`.
pub fn corollary1_bound(epsilon: f64, q: u64) -> Result<f64, MetricsError> {
    check_q(q)?;
    if epsilon.is_nan() || epsilon <= 0.0 || epsilon.is_infinite() {
        return Err(MetricsError::InvalidParameters(format!(
            "epsilon = {epsilon} must be positive"
        )));
    }
    Ok(corollary_formula(epsilon, q))
}

fn corollary_formula(epsilon: f64, q: u64) -> f64 {
    let ln_q = (q as f64).ln();
    2.0 * (1.0 / epsilon).ln() / ln_q - 2f64.ln() / ln_q
}

/// Comparison of the purity-testing-based `(n+ℓ, n−ℓ, ε)_q` construction with
/// the redundancy lower bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub n: u32,
    pub ell: u32,
    pub q: u64,
    pub lambda_construction: f64,
    pub epsilon_upper: f64,
    pub lambda_lower: f64,
    pub gap: f64,
    /// `gap − ℓ`, the part that grows like `log_q n`.
    pub excess_over_ell: f64,
    /// Set when `epsilon_upper ≥ 1`, i.e. `ℓ` is too small for the construction
    /// to say anything.
    pub out_of_regime: bool,
}

pub fn bergamaschi_gap(n: u32, ell: u32, q: u64) -> Result<GapReport, MetricsError> {
    check_q(q)?;
    if n == 0 || ell == 0 {
        return Err(MetricsError::InvalidParameters(format!(
            "need n >= 1 and ell >= 1 (n = {n}, ell = {ell})"
        )));
    }
    let lambda_construction = 2.0 * ell as f64;
    let epsilon_upper = ((2 * n as u64 + 1) as f64 * (q as f64).powi(-(ell as i32))).sqrt();
    let lambda_lower = corollary_formula(epsilon_upper, q);
    Ok(GapReport {
        n,
        ell,
        q,
        lambda_construction,
        epsilon_upper,
        lambda_lower,
        gap: lambda_construction - lambda_lower,
        excess_over_ell: lambda_construction - lambda_lower - ell as f64,
        out_of_regime: epsilon_upper >= 1.0,
    })
}

/// Result of evaluating one code space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PmdReport {
    pub n: usize,
    pub k: usize,
    pub q: u64,
    pub lambda: usize,
    pub epsilon: f64,
    /// Text form of the first label attaining `epsilon`.
    pub worst_label: String,
    pub bound_theorem1: f64,
    pub slack: f64,
    pub corollary_lambda_min: f64,
    pub eps_floor_ok: bool,
}

impl PmdReport {
    pub fn evaluate(cs: &CodeSpace, limits: &Limits) -> Result<(PmdReport, EpsilonResult), MetricsError> {
        let res = epsilon_of(cs, limits)?;
        Ok((Self::from_result(cs, &res)?, res))
    }

    pub fn from_result(cs: &CodeSpace, res: &EpsilonResult) -> Result<PmdReport, MetricsError> {
        let q = cs.q() as u64;
        let bound = theorem1_bound(cs.n() as u32, cs.lambda() as u32, q)?;
        Ok(PmdReport {
            n: cs.n(),
            k: cs.k(),
            q,
            lambda: cs.lambda(),
            epsilon: res.epsilon,
            worst_label: res.worst_label.to_string(),
            bound_theorem1: bound,
            slack: res.epsilon - bound,
            corollary_lambda_min: corollary1_bound(res.epsilon, q)?,
            eps_floor_ok: res.epsilon >= epsilon_floor(cs.n() as u32, q) - 1e-12,
        })
    }

    /// The lower bound on epsilon holds up to [`IDENTITY_TOL`].
    pub fn respects_bound(&self) -> bool {
        self.slack >= -IDENTITY_TOL
    }

    pub const CSV_HEADER: &'static str =
        "n,k,q,lambda,epsilon,worst_label,bound_theorem1,slack,corollary_lambda_min,eps_floor_ok";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},\"{}\",{},{},{},{}",
            self.n,
            self.k,
            self.q,
            self.lambda,
            self.epsilon,
            self.worst_label,
            self.bound_theorem1,
            self.slack,
            self.corollary_lambda_min,
            self.eps_floor_ok
        )
    }
}

/// Deviations of the 1-design and average-overlap identities.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DesignCheckReport {
    pub moment_deviation: f64,
    pub overlap_deviation: f64,
    pub overlap_value: f64,
}

impl DesignCheckReport {
    pub const CSV_HEADER: &'static str = "moment_deviation,overlap_deviation,overlap_value";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{}",
            self.moment_deviation, self.overlap_deviation, self.overlap_value
        )
    }
}
