//! n-qudit q-ary Pauli operators `E_{a,b}`.
//!
//! A label `(a, b) ∈ F_q^n × F_q^n` names the phaseless operator
//! `⊗_j ⊗_i T^{a_i^(j)} R^{b_i^(j)}`, where `a^(j)` is expanded in the field's
//! primary basis and `b^(j)` in its dual basis. Qudit 1 is the most significant
//! digit of the `q^n`-dimensional index, and within a qudit the first basis
//! component is the most significant digit of the `p^m` layout.
//!
//! [`PauliSpace`] fixes `(field, n)` and owns the lookup tables needed to build,
//! enumerate and apply labels quickly; [`PauliAction`] is the compiled sparse
//! form of one label (a permutation plus a phase per basis state).

use std::fmt;
use std::ops::Range;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::PauliError;
use crate::finite_field::{FieldCtx, FieldElement, Residue};
use crate::linalg::{CMatrix, DenseOperator};
use crate::Limits;

/// Phaseless label `(a, b)` of `E_{a,b}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliLabel {
    a: Vec<FieldElement>,
    b: Vec<FieldElement>,
}

impl PauliLabel {
    pub fn new(ctx: &FieldCtx, a: Vec<FieldElement>, b: Vec<FieldElement>) -> Result<Self, PauliError> {
        if a.len() != b.len() {
            return Err(PauliError::QuditCount {
                expected: a.len(),
                got: b.len(),
            });
        }
        if a.iter().chain(&b).any(|e| e.ctx_id() != ctx.id()) {
            return Err(crate::error::FieldError::ContextMismatch.into());
        }
        Ok(PauliLabel { a, b })
    }

    pub fn identity(ctx: &FieldCtx, n: usize) -> Self {
        PauliLabel {
            a: vec![ctx.zero(); n],
            b: vec![ctx.zero(); n],
        }
    }

    /// Single-qudit label `(a, b)`.
    pub fn single(a: FieldElement, b: FieldElement) -> Self {
        PauliLabel { a: vec![a], b: vec![b] }
    }

    pub fn a(&self) -> &[FieldElement] {
        &self.a
    }

    pub fn b(&self) -> &[FieldElement] {
        &self.b
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn is_identity(&self) -> bool {
        self.a.iter().chain(&self.b).all(FieldElement::is_zero)
    }

    /// Parses the text form produced by `Display`, e.g. `a=(1,0);b=(0,1)` or,
    /// for extension fields, `a=((0,1));b=((1,1))`.
    pub fn parse(ctx: &FieldCtx, s: &str) -> Result<Self, PauliError> {
        let bad = || PauliError::Parse(s.to_string());
        let (a_part, b_part) = s.trim().split_once(';').ok_or_else(bad)?;
        let a_body = a_part.trim().strip_prefix("a=").ok_or_else(bad)?;
        let b_body = b_part.trim().strip_prefix("b=").ok_or_else(bad)?;
        let a = parse_elements(ctx, a_body).ok_or_else(bad)?;
        let b = parse_elements(ctx, b_body).ok_or_else(bad)?;
        if a.len() != b.len() || a.is_empty() {
            return Err(bad());
        }
        Ok(PauliLabel { a, b })
    }
}

fn parse_elements(ctx: &FieldCtx, body: &str) -> Option<Vec<FieldElement>> {
    let inner = body.trim().strip_prefix('(')?.strip_suffix(')')?;
    let parse_coeffs = |s: &str| -> Option<FieldElement> {
        let cs: Option<Vec<u64>> = s.split(',').map(|t| t.trim().parse().ok()).collect();
        ctx.element(&cs?).ok()
    };
    if ctx.m() == 1 {
        return inner.split(',').map(parse_coeffs).collect();
    }
    let mut out = Vec::new();
    let mut rest = inner.trim();
    while !rest.is_empty() {
        let open = rest.strip_prefix('(')?;
        let close = open.find(')')?;
        out.push(parse_coeffs(&open[..close])?);
        rest = open[close + 1..].trim_start();
        rest = rest.strip_prefix(',').unwrap_or(rest).trim_start();
    }
    Some(out)
}

impl fmt::Display for PauliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[FieldElement]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        write!(f, "a=({});b=({})", join(&self.a), join(&self.b))
    }
}

/// Shift `T` and phase `R` on `C^p`.
pub fn weyl_matrices(p: u32) -> Result<(DenseOperator, DenseOperator), PauliError> {
    if !crate::finite_field::is_prime(p as u64) {
        return Err(crate::error::FieldError::NotPrime(p as u64).into());
    }
    let d = p as usize;
    let t = CMatrix::from_fn(d, d, |i, j| {
        if i == (j + 1) % d {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let r = CMatrix::from_fn(d, d, |i, j| {
        if i == j {
            omega_pow(p, i as u32)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok((DenseOperator::new(t), DenseOperator::new(r)))
}

/// `ω^k` with `ω = e^{2πi/p}`.
pub fn omega_pow(p: u32, k: u32) -> Complex64 {
    let k = k % p;
    match (p, k) {
        (_, 0) => Complex64::new(1.0, 0.0),
        (2, 1) => Complex64::new(-1.0, 0.0),
        _ => Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / p as f64),
    }
}

/// The Pauli operators on `n` qudits of dimension `q` over a fixed field.
#[derive(Clone, Debug)]
pub struct PauliSpace {
    ctx: FieldCtx,
    n: usize,
    dim: usize,
    digits: usize,
    omega: Vec<Complex64>,
    basis_table: Vec<Vec<Residue>>,
    dual_table: Vec<Vec<Residue>>,
}

impl PauliSpace {
    pub fn new(ctx: &FieldCtx, n: usize) -> Result<Self, PauliError> {
        if n == 0 {
            return Err(PauliError::QuditCount { expected: 1, got: 0 });
        }
        let q = ctx.q() as u64;
        let dim = (q as u128).checked_pow(n as u32).filter(|&d| d <= u32::MAX as u128);
        let Some(dim) = dim else {
            return Err(PauliError::DenseLimit {
                dim: u64::MAX,
                limit: u32::MAX as u64,
            });
        };
        let els: Vec<FieldElement> = ctx.elements().collect();
        Ok(PauliSpace {
            ctx: ctx.clone(),
            n,
            dim: dim as usize,
            digits: n * ctx.m(),
            omega: (0..ctx.p()).map(|k| omega_pow(ctx.p(), k)).collect(),
            basis_table: els.iter().map(|e| ctx.basis_coords(e)).collect(),
            dual_table: els.iter().map(|e| ctx.dual_coords(e)).collect(),
        })
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.ctx.q()
    }

    /// State-space dimension `q^n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `|ℙ_q^n| = q^{2n}`.
    pub fn num_labels(&self) -> u64 {
        (self.dim as u64).saturating_mul(self.dim as u64)
    }

    /// Label at position `idx` of the enumeration order: the `a` half varies
    /// fastest, then `b`; within each half qudit 1 is most significant and
    /// elements are ordered lexicographically by coefficients.
    pub fn label(&self, idx: u64) -> PauliLabel {
        let dim = self.dim as u64;
        let (b_idx, a_idx) = (idx / dim, idx % dim);
        PauliLabel {
            a: self.elements_of(a_idx),
            b: self.elements_of(b_idx),
        }
    }

    pub fn label_index(&self, label: &PauliLabel) -> u64 {
        let q = self.q() as u64;
        let p = self.ctx.p();
        let half = |v: &[FieldElement]| v.iter().fold(0u64, |acc, e| acc * q + e.index(p) as u64);
        half(&label.b) * self.dim as u64 + half(&label.a)
    }

    fn elements_of(&self, mut idx: u64) -> Vec<FieldElement> {
        let q = self.q() as u64;
        let mut out = vec![self.ctx.zero(); self.n];
        for slot in out.iter_mut().rev() {
            *slot = self.ctx.from_index((idx % q) as u32);
            idx /= q;
        }
        out
    }

    fn check_label(&self, label: &PauliLabel) -> Result<(), PauliError> {
        if label.n() != self.n {
            return Err(PauliError::QuditCount {
                expected: self.n,
                got: label.n(),
            });
        }
        if label.a.iter().chain(&label.b).any(|e| e.ctx_id() != self.ctx.id()) {
            return Err(crate::error::FieldError::ContextMismatch.into());
        }
        Ok(())
    }

    /// Per-digit exponents `(shift, phase)` in state-index order.
    fn digit_exponents(&self, label: &PauliLabel) -> (Vec<Residue>, Vec<Residue>) {
        let p = self.ctx.p();
        let mut shift = Vec::with_capacity(self.digits);
        let mut phase = Vec::with_capacity(self.digits);
        for (a, b) in label.a.iter().zip(&label.b) {
            shift.extend_from_slice(&self.basis_table[a.index(p) as usize]);
            phase.extend_from_slice(&self.dual_table[b.index(p) as usize]);
        }
        (shift, phase)
    }

    /// Compiles a label into its sparse action.
    pub fn action(&self, label: &PauliLabel) -> Result<PauliAction, PauliError> {
        self.check_label(label)?;
        Ok(self.compile(label))
    }

    /// Sparse action of the label at enumeration index `idx`.
    pub fn action_at(&self, idx: u64) -> PauliAction {
        self.compile(&self.label(idx))
    }

    fn compile(&self, label: &PauliLabel) -> PauliAction {
        let p = self.ctx.p();
        let (shift, phase) = self.digit_exponents(label);
        let mut target = Vec::with_capacity(self.dim);
        let mut phases = Vec::with_capacity(self.dim);
        let mut x = vec![0u32; self.digits];
        for _ in 0..self.dim {
            let mut t = 0usize;
            let mut e = 0u64;
            for d in 0..self.digits {
                t = t * p as usize + ((x[d] + shift[d]) % p) as usize;
                e += x[d] as u64 * phase[d] as u64;
            }
            target.push(t);
            phases.push(self.omega[(e % p as u64) as usize]);
            // increment the least significant digit first
            for d in (0..self.digits).rev() {
                x[d] += 1;
                if x[d] < p {
                    break;
                }
                x[d] = 0;
            }
        }
        PauliAction { target, phases }
    }

    /// `E·ψ` in O(q^n).
    pub fn apply(&self, label: &PauliLabel, state: &[Complex64]) -> Result<Vec<Complex64>, PauliError> {
        if state.len() != self.dim {
            return Err(PauliError::StateLength {
                expected: self.dim,
                got: state.len(),
            });
        }
        Ok(self.action(label)?.apply(state))
    }

    /// Dense `q^n × q^n` matrix of the label, built as a Kronecker product of
    /// `T^{a_i} R^{b_i}` factors.
    pub fn matrix(&self, label: &PauliLabel, limits: &Limits) -> Result<DenseOperator, PauliError> {
        self.check_label(label)?;
        limits.check_dense(self.dim as u64)?;
        let (t, r) = weyl_matrices(self.ctx.p())?;
        let (shift, phase) = self.digit_exponents(label);
        let mut acc = CMatrix::identity(1, 1);
        for (&s, &ph) in shift.iter().zip(&phase) {
            let factor = mat_pow(t.matrix(), s) * mat_pow(r.matrix(), ph);
            acc = acc.kronecker(&factor);
        }
        Ok(DenseOperator::new(acc))
    }

    /// `Σ_j ⟨a^(j), b'^(j)⟩ − ⟨a'^(j), b^(j)⟩ mod p` for `e1 = (a, b)`, `e2 = (a', b')`.
    ///
    /// With `T` shifting `|x⟩ → |x+1⟩` and `R = diag(ω^x)`, the realized matrices
    /// satisfy `E₂E₁ = ω^{phase} E₁E₂`.
    pub fn commutation_phase(&self, e1: &PauliLabel, e2: &PauliLabel) -> Result<Residue, PauliError> {
        self.check_label(e1)?;
        self.check_label(e2)?;
        let p = self.ctx.p();
        let mut acc = 0u64;
        for j in 0..self.n {
            let ab = self.ctx.inner_product(&e1.a[j], &e2.b[j])?;
            let ba = self.ctx.inner_product(&e2.a[j], &e1.b[j])?;
            acc += (ab + p - ba) as u64;
        }
        Ok((acc % p as u64) as Residue)
    }

    /// All labels in enumeration order, identity first.
    pub fn enumerate(&self, limits: &Limits) -> Result<impl Iterator<Item = PauliLabel> + '_, PauliError> {
        limits.check_labels(self.num_labels() as u128)?;
        Ok((0..self.num_labels()).map(move |i| self.label(i)))
    }

    /// Contiguous index ranges of at most `chunk` labels covering the enumeration.
    pub fn chunks(&self, chunk: u64) -> Vec<Range<u64>> {
        let total = self.num_labels();
        let chunk = chunk.max(1);
        (0..total.div_ceil(chunk))
            .map(|c| c * chunk..((c + 1) * chunk).min(total))
            .collect()
    }
}

fn mat_pow(m: &CMatrix, e: u32) -> CMatrix {
    let mut acc = DMatrix::identity(m.nrows(), m.ncols());
    for _ in 0..e {
        acc = &acc * m;
    }
    acc
}

/// Sparse form of one Pauli operator: `E|x⟩ = phases[x] |target[x]⟩`.
#[derive(Clone, Debug)]
pub struct PauliAction {
    target: Vec<usize>,
    phases: Vec<Complex64>,
}

impl PauliAction {
    pub fn apply(&self, state: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
        for (x, &amp) in state.iter().enumerate() {
            out[self.target[x]] = self.phases[x] * amp;
        }
        out
    }

    /// Applies the operator to every column of `m`.
    pub fn apply_columns(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(m.nrows(), m.ncols());
        for j in 0..m.ncols() {
            for x in 0..m.nrows() {
                out[(self.target[x], j)] = self.phases[x] * m[(x, j)];
            }
        }
        out
    }

    /// `E·M·E†`.
    pub fn conjugate(&self, m: &CMatrix) -> CMatrix {
        // (E M E†)[t(x), t(y)] = φ(x) M[x, y] conj(φ(y))
        let mut out = CMatrix::zeros(m.nrows(), m.ncols());
        for y in 0..m.ncols() {
            let py = self.phases[y].conj();
            for x in 0..m.nrows() {
                out[(self.target[x], self.target[y])] = self.phases[x] * m[(x, y)] * py;
            }
        }
        out
    }
}
