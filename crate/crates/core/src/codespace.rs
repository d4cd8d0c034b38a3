//! Code subspaces `Π ⊆ C^{q^n}` represented by an orthonormal basis.

use std::io::Read;
use std::path::Path;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::CodeSpaceError;
use crate::finite_field::{FieldCtx, FieldSpec};
use crate::linalg::{modified_gram_schmidt, orthonormality_defect, CMatrix, DenseOperator};
use crate::Limits;

/// Orthonormality tolerance for bases read from files.
pub const FILE_ORTHONORMALITY_TOL: f64 = 1e-8;
/// Relative residual below which a column counts as linearly dependent.
pub const RANK_TOL: f64 = 1e-8;

pub const FORMAT_VERSION: u32 = 1;

/// A `q^k`-dimensional subspace of `C^{q^n}`.
///
/// `basis` is the `q^n × q^k` isometry `C`; the projector is `Π = C C†`.
#[derive(Clone, Debug, PartialEq)]
pub struct CodeSpace {
    ctx: FieldCtx,
    n: usize,
    k: usize,
    basis: CMatrix,
}

/// On-disk layout of a code space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSpaceFile {
    pub format_version: u32,
    pub p: u32,
    pub m: usize,
    pub modulus: Vec<u32>,
    pub n: usize,
    pub k: usize,
    #[serde(default)]
    pub reorthonormalize: bool,
    /// `q^k` columns of `q^n` `[re, im]` pairs.
    pub basis: Vec<Vec<[f64; 2]>>,
}

fn pow_usize(q: u32, e: usize) -> Option<usize> {
    (q as usize).checked_pow(e as u32)
}

impl CodeSpace {
    /// Validates an explicit basis. With `reorthonormalize`, a basis that is
    /// off by more than [`FILE_ORTHONORMALITY_TOL`] is repaired by modified
    /// Gram-Schmidt instead of rejected. Dependent columns are always an error.
    pub fn from_basis(
        ctx: &FieldCtx,
        n: usize,
        k: usize,
        basis: CMatrix,
        reorthonormalize: bool,
    ) -> Result<Self, CodeSpaceError> {
        if n == 0 {
            return Err(CodeSpaceError::Dimension("n must be at least 1".into()));
        }
        if k > n {
            return Err(CodeSpaceError::InvalidK { n, k });
        }
        let rows = pow_usize(ctx.q(), n).ok_or_else(|| CodeSpaceError::Dimension("q^n overflows".into()))?;
        let cols = pow_usize(ctx.q(), k).unwrap_or(usize::MAX);
        if basis.nrows() != rows || basis.ncols() != cols {
            return Err(CodeSpaceError::Dimension(format!(
                "basis is {}x{}, expected {rows}x{cols}",
                basis.nrows(),
                basis.ncols()
            )));
        }
        if basis.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(CodeSpaceError::Dimension("basis has non-finite entries".into()));
        }
        let deviation = orthonormality_defect(&basis);
        let basis = if deviation <= FILE_ORTHONORMALITY_TOL {
            basis
        } else {
            let repaired = modified_gram_schmidt(&basis, RANK_TOL).ok_or(CodeSpaceError::RankDeficient)?;
            if !reorthonormalize {
                return Err(CodeSpaceError::NotOrthonormal { deviation });
            }
            repaired
        };
        Ok(CodeSpace {
            ctx: ctx.clone(),
            n,
            k,
            basis,
        })
    }

    /// Span of the first `q^k` computational basis vectors.
    pub fn standard(ctx: &FieldCtx, n: usize, k: usize) -> Result<Self, CodeSpaceError> {
        if k > n {
            return Err(CodeSpaceError::InvalidK { n, k });
        }
        let rows = pow_usize(ctx.q(), n).ok_or_else(|| CodeSpaceError::Dimension("q^n overflows".into()))?;
        let cols = pow_usize(ctx.q(), k).unwrap_or(usize::MAX);
        Self::from_basis(ctx, n, k, CMatrix::identity(rows, cols), false)
    }

    /// Haar-random code: modified Gram-Schmidt applied to a `q^n × q^k` matrix
    /// of i.i.d. standard complex Gaussians drawn from ChaCha8 seeded with `seed`.
    pub fn random(ctx: &FieldCtx, n: usize, k: usize, seed: u64) -> Result<Self, CodeSpaceError> {
        if k > n {
            return Err(CodeSpaceError::InvalidK { n, k });
        }
        let rows = pow_usize(ctx.q(), n).ok_or_else(|| CodeSpaceError::Dimension("q^n overflows".into()))?;
        let cols = pow_usize(ctx.q(), k).unwrap_or(usize::MAX);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let g = gaussian_matrix(&mut rng, rows, cols);
            if let Some(basis) = modified_gram_schmidt(&g, RANK_TOL) {
                return Ok(CodeSpace {
                    ctx: ctx.clone(),
                    n,
                    k,
                    basis,
                });
            }
        }
    }

    /// Single-qubit state `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩` as a `(1, 0)_2` code.
    pub fn bloch_state(theta: f64, phi: f64) -> Self {
        let ctx = FieldCtx::new(2, 1).expect("GF(2)");
        let basis = CMatrix::from_column_slice(
            2,
            1,
            &[
                Complex64::new((theta / 2.0).cos(), 0.0),
                Complex64::from_polar((theta / 2.0).sin(), phi),
            ],
        );
        CodeSpace { ctx, n: 1, k: 0, basis }
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Redundancy `λ = n − k`.
    pub fn lambda(&self) -> usize {
        self.n - self.k
    }

    pub fn q(&self) -> u32 {
        self.ctx.q()
    }

    /// `q^n`.
    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// `q^k`.
    pub fn code_dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    /// `Π = C C†`.
    pub fn projector(&self, limits: &Limits) -> Result<DenseOperator, CodeSpaceError> {
        limits.check_dense(self.dim() as u64)?;
        Ok(DenseOperator::new(&self.basis * self.basis.adjoint()))
    }

    /// Replaces the basis, re-validating it.
    pub fn with_basis(&self, basis: CMatrix) -> Result<Self, CodeSpaceError> {
        Self::from_basis(&self.ctx, self.n, self.k, basis, false)
    }

    pub(crate) fn with_basis_unchecked(&self, basis: CMatrix) -> Self {
        CodeSpace {
            ctx: self.ctx.clone(),
            n: self.n,
            k: self.k,
            basis,
        }
    }

    pub fn to_file(&self) -> CodeSpaceFile {
        let FieldSpec { p, m, modulus } = self.ctx.spec();
        CodeSpaceFile {
            format_version: FORMAT_VERSION,
            p,
            m,
            modulus,
            n: self.n,
            k: self.k,
            reorthonormalize: false,
            basis: self
                .basis
                .column_iter()
                .map(|col| col.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }

    pub fn from_file(file: &CodeSpaceFile) -> Result<Self, CodeSpaceError> {
        if file.format_version != FORMAT_VERSION {
            return Err(CodeSpaceError::FormatVersion(file.format_version));
        }
        let ctx = FieldCtx::from_spec(&FieldSpec {
            p: file.p,
            m: file.m,
            modulus: file.modulus.clone(),
        })?;
        if file.k > file.n {
            return Err(CodeSpaceError::InvalidK { n: file.n, k: file.k });
        }
        let rows = pow_usize(ctx.q(), file.n).ok_or_else(|| CodeSpaceError::Dimension("q^n overflows".into()))?;
        let cols = pow_usize(ctx.q(), file.k).unwrap_or(usize::MAX);
        if file.basis.len() != cols {
            return Err(CodeSpaceError::Dimension(format!(
                "expected {cols} basis columns, got {}",
                file.basis.len()
            )));
        }
        if let Some(bad) = file.basis.iter().find(|c| c.len() != rows) {
            return Err(CodeSpaceError::Dimension(format!(
                "basis column has {} entries, expected {rows}",
                bad.len()
            )));
        }
        let flat: Vec<Complex64> = file
            .basis
            .iter()
            .flat_map(|col| col.iter().map(|&[re, im]| Complex64::new(re, im)))
            .collect();
        let basis = CMatrix::from_column_slice(rows, cols, &flat);
        Self::from_basis(&ctx, file.n, file.k, basis, file.reorthonormalize)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("code-space file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CodeSpaceError> {
        let file: CodeSpaceFile = serde_json::from_str(text)?;
        Self::from_file(&file)
    }

    pub fn load<R: Read>(mut reader: R) -> Result<Self, CodeSpaceError> {
        let mut text = String::new();
        reader.read_to_string(&mut text)?;
        Self::from_json(&text)
    }

    pub fn load_path(path: impl AsRef<Path>) -> Result<Self, CodeSpaceError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save_path(&self, path: impl AsRef<Path>) -> Result<(), CodeSpaceError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    /// CSV export: one line per ambient basis index, `re`/`im` pairs per code column.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row");
        for j in 0..self.code_dim() {
            out.push_str(&format!(",c{j}_re,c{j}_im"));
        }
        out.push('\n');
        for i in 0..self.dim() {
            out.push_str(&i.to_string());
            for j in 0..self.code_dim() {
                let z = self.basis[(i, j)];
                out.push_str(&format!(",{:e},{:e}", z.re, z.im));
            }
            out.push('\n');
        }
        out
    }
}

pub(crate) fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    // column-major fill order keeps the stream layout stable
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        data.push(Complex64::new(re, im));
    }
    CMatrix::from_column_slice(rows, cols, &data)
}
