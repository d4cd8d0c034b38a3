//! Exact arithmetic in GF(p^m).
//!
//! Elements are coefficient vectors in the polynomial basis `{1, x, ..., x^(m-1)}`
//! modulo a monic irreducible polynomial. Every [`FieldCtx`] also carries the
//! trace-dual of its basis, which is what turns field products into coordinate
//! inner products when building Pauli operators.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::FieldError;

/// Default cap on the field size `p^m`.
pub const DEFAULT_MAX_FIELD_SIZE: u64 = 1 << 16;

/// Residue in `[0, p)`.
pub type Residue = u32;

/// Description of GF(p^m) together with a basis and its trace-dual basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldCtx {
    p: u32,
    m: usize,
    q: u32,
    modulus: Vec<Residue>,
    basis: Vec<FieldElement>,
    dual_basis: Vec<FieldElement>,
    // Rows map polynomial coefficients to coordinates in `basis` / `dual_basis`.
    basis_coord_map: Vec<Vec<Residue>>,
    dual_coord_map: Vec<Vec<Residue>>,
    id: u64,
}

/// An element of a particular [`FieldCtx`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    coeffs: Vec<Residue>,
    ctx_id: u64,
}

/// Serializable field description `{p, m, modulus}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub m: usize,
    pub modulus: Vec<Residue>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldCtx {
    /// Builds GF(p^m) with the lexicographically smallest monic irreducible
    /// modulus (coefficients compared from the constant term upwards).
    pub fn new(p: u64, m: usize) -> Result<Self, FieldError> {
        Self::with_limit(p, m, DEFAULT_MAX_FIELD_SIZE)
    }

    pub fn with_limit(p: u64, m: usize, max_size: u64) -> Result<Self, FieldError> {
        let (p, _) = check_params(p, m, max_size)?;
        let modulus = smallest_irreducible(p, m);
        Self::build(p, modulus)
    }

    /// Builds the field from an explicit monic modulus `[c_0, ..., c_m]`.
    pub fn with_modulus(p: u64, modulus: &[u64]) -> Result<Self, FieldError> {
        if modulus.len() < 2 {
            return Err(FieldError::ZeroDegree);
        }
        let m = modulus.len() - 1;
        let (p, _) = check_params(p, m, DEFAULT_MAX_FIELD_SIZE)?;
        if modulus.iter().any(|&c| c >= p as u64) {
            return Err(FieldError::CoefficientOutOfRange { p });
        }
        if modulus[m] != 1 {
            return Err(FieldError::NotMonic);
        }
        let modulus: Vec<Residue> = modulus.iter().map(|&c| c as Residue).collect();
        if !is_irreducible(p, &modulus) {
            return Err(FieldError::Reducible(modulus));
        }
        Self::build(p, modulus)
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<Self, FieldError> {
        if spec.modulus.len() != spec.m + 1 {
            return Err(FieldError::ModulusDegree {
                m: spec.m,
                len: spec.modulus.len(),
            });
        }
        let modulus: Vec<u64> = spec.modulus.iter().map(|&c| c as u64).collect();
        Self::with_modulus(spec.p as u64, &modulus)
    }

    fn build(p: u32, modulus: Vec<Residue>) -> Result<Self, FieldError> {
        let m = modulus.len() - 1;
        let q = p.pow(m as u32);
        let id = fingerprint(p, &modulus);
        let basis: Vec<FieldElement> = (0..m)
            .map(|i| {
                let mut coeffs = vec![0; m];
                coeffs[i] = 1;
                FieldElement { coeffs, ctx_id: id }
            })
            .collect();
        let mut ctx = FieldCtx {
            p,
            m,
            q,
            modulus,
            basis_coord_map: coord_map(p, &basis).ok_or(FieldError::SingularBasis)?,
            basis,
            dual_basis: Vec::new(),
            dual_coord_map: Vec::new(),
            id,
        };
        ctx.dual_basis = ctx.dual_of(&ctx.basis)?;
        ctx.dual_coord_map = coord_map(p, &ctx.dual_basis).ok_or(FieldError::SingularBasis)?;
        Ok(ctx)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Field size `p^m`.
    pub fn q(&self) -> u32 {
        self.q
    }

    /// Modulus coefficients, low degree first, length `m + 1`.
    pub fn modulus(&self) -> &[Residue] {
        &self.modulus
    }

    pub fn basis(&self) -> &[FieldElement] {
        &self.basis
    }

    pub fn dual_basis(&self) -> &[FieldElement] {
        &self.dual_basis
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            p: self.p,
            m: self.m,
            modulus: self.modulus.clone(),
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            coeffs: vec![0; self.m],
            ctx_id: self.id,
        }
    }

    pub fn one(&self) -> FieldElement {
        self.from_prime(1)
    }

    /// Embeds a residue of the prime subfield.
    pub fn from_prime(&self, c: u64) -> FieldElement {
        let mut e = self.zero();
        e.coeffs[0] = (c % self.p as u64) as Residue;
        e
    }

    /// The generator `x` of the polynomial basis (equal to 1 when `m == 1`).
    pub fn x(&self) -> FieldElement {
        if self.m == 1 {
            // x ≡ -c_0 mod (x + c_0)
            return self.from_prime(((self.p - self.modulus[0]) % self.p) as u64);
        }
        self.basis[1].clone()
    }

    pub fn element(&self, coeffs: &[u64]) -> Result<FieldElement, FieldError> {
        if coeffs.len() != self.m {
            return Err(FieldError::WrongLength {
                expected: self.m,
                got: coeffs.len(),
            });
        }
        if coeffs.iter().any(|&c| c >= self.p as u64) {
            return Err(FieldError::CoefficientOutOfRange { p: self.p });
        }
        Ok(FieldElement {
            coeffs: coeffs.iter().map(|&c| c as Residue).collect(),
            ctx_id: self.id,
        })
    }

    /// Element with lexicographic index `idx` (`c_0` is the most significant digit).
    pub fn from_index(&self, mut idx: u32) -> FieldElement {
        let mut e = self.zero();
        for i in (0..self.m).rev() {
            e.coeffs[i] = idx % self.p;
            idx /= self.p;
        }
        e
    }

    /// All `q` elements in lexicographic order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(move |i| self.from_index(i))
    }

    fn check(&self, a: &FieldElement) -> Result<(), FieldError> {
        if a.ctx_id != self.id {
            return Err(FieldError::ContextMismatch);
        }
        Ok(())
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add_unchecked(a, b))
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(a)?;
        self.check(b)?;
        let nb = self.neg_unchecked(b);
        Ok(self.add_unchecked(a, &nb))
    }

    pub fn neg(&self, a: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(a)?;
        Ok(self.neg_unchecked(a))
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul_unchecked(a, b))
    }

    pub fn pow(&self, a: &FieldElement, e: u64) -> Result<FieldElement, FieldError> {
        self.check(a)?;
        Ok(self.pow_unchecked(a, e))
    }

    /// Multiplicative inverse, computed as `a^(q-2)`.
    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(a)?;
        if a.is_zero() {
            return Err(FieldError::InverseOfZero);
        }
        Ok(self.pow_unchecked(a, self.q as u64 - 2))
    }

    /// Field trace to F_p, as the Frobenius orbit sum `a + a^p + ... + a^(p^(m-1))`.
    pub fn trace(&self, a: &FieldElement) -> Result<Residue, FieldError> {
        self.check(a)?;
        Ok(self.trace_unchecked(a))
    }

    /// Trace with the exponent range shifted to `a^p + ... + a^(p^m)`.
    /// Agrees with [`FieldCtx::trace`] because `a^(p^m) = a`.
    pub fn trace_shifted(&self, a: &FieldElement) -> Result<Residue, FieldError> {
        self.check(a)?;
        let mut acc = self.zero();
        let mut cur = self.frobenius(a);
        for _ in 0..self.m {
            acc = self.add_unchecked(&acc, &cur);
            cur = self.frobenius(&cur);
        }
        Ok(self.expect_prime(&acc))
    }

    /// `⟨a, b⟩ = Σ a_i b_i` with `a` expanded in the basis and `b` in the dual basis.
    pub fn inner_product(&self, a: &FieldElement, b: &FieldElement) -> Result<Residue, FieldError> {
        self.check(a)?;
        self.check(b)?;
        let ca = self.basis_coords(a);
        let cb = self.dual_coords(b);
        let s: u64 = ca.iter().zip(&cb).map(|(&x, &y)| x as u64 * y as u64).sum();
        Ok((s % self.p as u64) as Residue)
    }

    /// Coordinates of `a` in the primary basis.
    pub fn basis_coords(&self, a: &FieldElement) -> Vec<Residue> {
        apply_map(self.p, &self.basis_coord_map, &a.coeffs)
    }

    /// Coordinates of `a` in the dual basis.
    pub fn dual_coords(&self, a: &FieldElement) -> Vec<Residue> {
        apply_map(self.p, &self.dual_coord_map, &a.coeffs)
    }

    /// Trace-dual of an arbitrary basis: the unique `β` with `tr(α_i β_j) = δ_ij`.
    ///
    /// Inverts the Gram matrix `G_ij = tr(α_i α_j)` over F_p; `β = G^{-1} α`.
    pub fn dual_of(&self, alpha: &[FieldElement]) -> Result<Vec<FieldElement>, FieldError> {
        if alpha.len() != self.m {
            return Err(FieldError::WrongLength {
                expected: self.m,
                got: alpha.len(),
            });
        }
        for a in alpha {
            self.check(a)?;
        }
        let gram: Vec<Vec<Residue>> = alpha
            .iter()
            .map(|ai| {
                alpha
                    .iter()
                    .map(|aj| self.trace_unchecked(&self.mul_unchecked(ai, aj)))
                    .collect()
            })
            .collect();
        let ginv = invert_mod_p(self.p, &gram).ok_or(FieldError::SingularGram)?;
        Ok(ginv
            .iter()
            .map(|row| {
                let mut acc = self.zero();
                for (&g, a) in row.iter().zip(alpha) {
                    acc = self.add_unchecked(&acc, &self.scale(a, g));
                }
                acc
            })
            .collect())
    }

    pub(crate) fn add_unchecked(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| (x + y) % self.p)
                .collect(),
            ctx_id: self.id,
        }
    }

    fn neg_unchecked(&self, a: &FieldElement) -> FieldElement {
        FieldElement {
            coeffs: a.coeffs.iter().map(|&x| (self.p - x) % self.p).collect(),
            ctx_id: self.id,
        }
    }

    fn scale(&self, a: &FieldElement, s: Residue) -> FieldElement {
        FieldElement {
            coeffs: a
                .coeffs
                .iter()
                .map(|&x| ((x as u64 * s as u64) % self.p as u64) as Residue)
                .collect(),
            ctx_id: self.id,
        }
    }

    pub(crate) fn mul_unchecked(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let prod = poly_mul(self.p, &a.coeffs, &b.coeffs);
        let mut r = poly_rem(self.p, &prod, &self.modulus);
        r.resize(self.m, 0);
        FieldElement {
            coeffs: r,
            ctx_id: self.id,
        }
    }

    fn pow_unchecked(&self, a: &FieldElement, mut e: u64) -> FieldElement {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_unchecked(&acc, &base);
            }
            base = self.mul_unchecked(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn frobenius(&self, a: &FieldElement) -> FieldElement {
        self.pow_unchecked(a, self.p as u64)
    }

    pub(crate) fn trace_unchecked(&self, a: &FieldElement) -> Residue {
        let mut acc = a.clone();
        let mut cur = a.clone();
        for _ in 1..self.m {
            cur = self.frobenius(&cur);
            acc = self.add_unchecked(&acc, &cur);
        }
        self.expect_prime(&acc)
    }

    fn expect_prime(&self, a: &FieldElement) -> Residue {
        debug_assert!(a.coeffs[1..].iter().all(|&c| c == 0), "trace left the prime subfield");
        a.coeffs[0]
    }
}

impl FieldElement {
    /// Coefficients in the polynomial basis, low degree first.
    pub fn coeffs(&self) -> &[Residue] {
        &self.coeffs
    }

    pub fn ctx_id(&self) -> u64 {
        self.ctx_id
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Lexicographic index with `c_0` as the most significant digit.
    pub fn index(&self, p: u32) -> u32 {
        self.coeffs.iter().fold(0, |acc, &c| acc * p + c)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.len() == 1 {
            return write!(f, "{}", self.coeffs[0]);
        }
        write!(f, "(")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

fn check_params(p: u64, m: usize, max_size: u64) -> Result<(u32, u64), FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if m == 0 {
        return Err(FieldError::ZeroDegree);
    }
    let q = (p as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if q > max_size as u128 {
        return Err(FieldError::TooLarge { p, m, limit: max_size });
    }
    Ok((p as u32, q as u64))
}

fn fingerprint(p: u32, modulus: &[Residue]) -> u64 {
    // FNV-1a over (p, modulus)
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for w in std::iter::once(p).chain(modulus.iter().copied()) {
        for byte in w.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

fn apply_map(p: u32, map: &[Vec<Residue>], v: &[Residue]) -> Vec<Residue> {
    map.iter()
        .map(|row| {
            let s: u64 = row.iter().zip(v).map(|(&a, &b)| a as u64 * b as u64).sum();
            (s % p as u64) as Residue
        })
        .collect()
}

/// Matrix sending polynomial coefficients to coordinates in `basis`.
fn coord_map(p: u32, basis: &[FieldElement]) -> Option<Vec<Vec<Residue>>> {
    let m = basis.len();
    // column j of A holds the coefficients of basis[j]; coords = A^{-1} c
    let a: Vec<Vec<Residue>> = (0..m).map(|i| (0..m).map(|j| basis[j].coeffs[i]).collect()).collect();
    invert_mod_p(p, &a)
}

fn inv_mod(p: u32, a: Residue) -> Residue {
    // Fermat, p prime
    let mut e = p as u64 - 2;
    let mut base = a as u64 % p as u64;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as Residue
}

/// Gauss-Jordan inverse over F_p; `None` if singular.
pub(crate) fn invert_mod_p(p: u32, mat: &[Vec<Residue>]) -> Option<Vec<Vec<Residue>>> {
    let n = mat.len();
    let pp = p as u64;
    let mut aug: Vec<Vec<u64>> = mat
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<u64> = row.iter().map(|&x| x as u64).collect();
            r.extend((0..n).map(|j| u64::from(i == j)));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| aug[r][col] != 0)?;
        aug.swap(col, pivot);
        let inv = inv_mod(p, aug[col][col] as Residue) as u64;
        for x in aug[col].iter_mut() {
            *x = *x * inv % pp;
        }
        let pivot = aug[col].clone();
        for (r, row) in aug.iter_mut().enumerate() {
            if r != col && row[col] != 0 {
                let f = row[col];
                for (x, pv) in row.iter_mut().zip(&pivot) {
                    *x = (*x + pp * pp - f * pv) % pp;
                }
            }
        }
    }
    Some(
        aug.into_iter()
            .map(|r| r[n..].iter().map(|&x| x as Residue).collect())
            .collect(),
    )
}

// Polynomials over F_p as coefficient vectors, low degree first.

fn trim(mut v: Vec<Residue>) -> Vec<Residue> {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
    if v.is_empty() {
        v.push(0);
    }
    v
}

fn is_zero_poly(v: &[Residue]) -> bool {
    v.iter().all(|&c| c == 0)
}

fn poly_mul(p: u32, a: &[Residue], b: &[Residue]) -> Vec<Residue> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    out.into_iter().map(|c| c as Residue).collect()
}

fn poly_rem(p: u32, a: &[Residue], b: &[Residue]) -> Vec<Residue> {
    let b = trim(b.to_vec());
    let db = b.len() - 1;
    let lead_inv = inv_mod(p, b[db]) as u64;
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let pp = p as u64;
    while r.len() > db {
        let top = r.len() - 1;
        let c = r[top] * lead_inv % pp;
        if c != 0 {
            let shift = top - db;
            for (i, &bc) in b.iter().enumerate() {
                r[shift + i] = (r[shift + i] + pp - c * bc as u64 % pp) % pp;
            }
        }
        r.pop();
    }
    trim(r.into_iter().map(|c| c as Residue).collect())
}

fn poly_sub(p: u32, a: &[Residue], b: &[Residue]) -> Vec<Residue> {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect(),
    )
}

fn poly_gcd(p: u32, a: &[Residue], b: &[Residue]) -> Vec<Residue> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !is_zero_poly(&b) {
        let r = poly_rem(p, &a, &b);
        a = b;
        b = r;
    }
    a
}

fn poly_powmod(p: u32, base: &[Residue], mut e: u64, modulus: &[Residue]) -> Vec<Residue> {
    let mut acc = vec![1];
    let mut b = poly_rem(p, base, modulus);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_rem(p, &poly_mul(p, &acc, &b), modulus);
        }
        b = poly_rem(p, &poly_mul(p, &b, &b), modulus);
        e >>= 1;
    }
    acc
}

fn eval_poly(p: u32, f: &[Residue], x: u32) -> u32 {
    f.iter()
        .rev()
        .fold(0u64, |acc, &c| (acc * x as u64 + c as u64) % p as u64) as u32
}

/// Irreducibility over F_p: no roots, and for degree ≥ 4 also
/// `gcd(f, x^(p^i) - x) = 1` for every `i ≤ m/2`.
pub fn is_irreducible(p: u32, f: &[Residue]) -> bool {
    let f = trim(f.to_vec());
    let m = f.len() - 1;
    if m == 0 {
        return false;
    }
    if m == 1 {
        return true;
    }
    if (0..p).any(|x| eval_poly(p, &f, x) == 0) {
        return false;
    }
    if m <= 3 {
        return true;
    }
    let x = vec![0, 1];
    let mut xp = x.clone();
    for _ in 1..=m / 2 {
        xp = poly_powmod(p, &xp, p as u64, &f);
        let g = poly_gcd(p, &f, &poly_sub(p, &xp, &x));
        if g.len() > 1 {
            return false;
        }
    }
    true
}

fn smallest_irreducible(p: u32, m: usize) -> Vec<Residue> {
    let total = (p as u64).pow(m as u32);
    (0..total)
        .map(|mut idx| {
            let mut f = vec![0; m + 1];
            for i in (0..m).rev() {
                f[i] = (idx % p as u64) as Residue;
                idx /= p as u64;
            }
            f[m] = 1;
            f
        })
        .find(|f| is_irreducible(p, f))
        .expect("an irreducible polynomial of every degree exists")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(ctx: &FieldCtx, c: &[u64]) -> FieldElement {
        ctx.element(c).unwrap()
    }

    /// Independent irreducibility check by exhaustive trial division over all
    /// monic polynomials of degree ≤ m/2.
    fn brute_irreducible(p: u32, f: &[Residue]) -> bool {
        let m = f.len() - 1;
        for d in 1..=m / 2 {
            let count = (p as u64).pow(d as u32);
            for mut idx in 0..count {
                let mut g = vec![0; d + 1];
                for c in g.iter_mut().take(d) {
                    *c = (idx % p as u64) as Residue;
                    idx /= p as u64;
                }
                g[d] = 1;
                if is_zero_poly(&poly_rem(p, f, &g)) {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn prime_field_gf2() {
        let f = FieldCtx::new(2, 1).unwrap();
        assert_eq!(f.q(), 2);
        assert_eq!(f.basis(), &[f.one()]);
        assert_eq!(f.dual_basis(), &[f.one()]);
        assert_eq!(f.trace(&f.one()).unwrap(), 1);
        for a in f.elements() {
            assert_eq!(f.trace(&a).unwrap(), a.coeffs()[0]);
        }
    }

    #[test]
    fn gf4_modulus_and_products() {
        let f = FieldCtx::new(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        let x = f.x();
        assert_eq!(f.mul(&x, &x).unwrap(), el(&f, &[1, 1]));
        assert_eq!(f.trace(&f.zero()).unwrap(), 0);
        assert_eq!(f.trace(&x).unwrap(), 1);
    }

    #[test]
    fn gf9_modulus_matches_enumeration() {
        // smallest monic quadratic over F_3 without roots, scanning (c0, c1) lexicographically
        let mut expected = None;
        'outer: for c0 in 0..3u32 {
            for c1 in 0..3u32 {
                let f = [c0, c1, 1];
                if (0..3).all(|x| eval_poly(3, &f, x) != 0) {
                    expected = Some(f.to_vec());
                    break 'outer;
                }
            }
        }
        let f = FieldCtx::new(3, 2).unwrap();
        assert_eq!(f.modulus(), expected.unwrap().as_slice());
        assert_eq!(f.modulus(), &[1, 0, 1]);
    }

    #[test]
    fn gf3_two_squared() {
        let f = FieldCtx::new(3, 1).unwrap();
        let two = f.from_prime(2);
        assert_eq!(f.mul(&two, &two).unwrap(), f.one());
    }

    #[test]
    fn irreducibility_agrees_with_trial_division() {
        for (p, m) in [(2u32, 4usize), (2, 5), (2, 6), (3, 4), (5, 4)] {
            let total = (p as u64).pow(m as u32);
            for mut idx in 0..total {
                let mut f = vec![0; m + 1];
                for c in f.iter_mut().take(m) {
                    *c = (idx % p as u64) as Residue;
                    idx /= p as u64;
                }
                f[m] = 1;
                assert_eq!(is_irreducible(p, &f), brute_irreducible(p, &f), "p={p} f={f:?}");
            }
        }
    }

    #[test]
    fn dual_basis_of_gf4() {
        let f = FieldCtx::new(2, 2).unwrap();
        let x = f.x();
        let beta = f.dual_basis();
        assert_eq!(f.trace(&beta[0]).unwrap(), 1);
        assert_eq!(f.trace(&f.mul(&x, &beta[0]).unwrap()).unwrap(), 0);
        assert_eq!(f.trace(&beta[1]).unwrap(), 0);
        assert_eq!(f.trace(&f.mul(&x, &beta[1]).unwrap()).unwrap(), 1);
        // G = [[0,1],[1,1]], G^{-1} = [[1,1],[1,0]]: β1 = 1 + x, β2 = 1
        assert_eq!(beta[0], el(&f, &[1, 1]));
        assert_eq!(beta[1], el(&f, &[1, 0]));
    }

    #[test]
    fn duality_is_symmetric() {
        for (p, m) in [(2, 1), (2, 2), (2, 3), (3, 2), (5, 2), (2, 4), (3, 3)] {
            let f = FieldCtx::new(p, m).unwrap();
            let back = f.dual_of(f.dual_basis()).unwrap();
            assert_eq!(back, f.basis());
        }
    }

    #[test]
    fn dual_pairing_is_kronecker_delta() {
        for (p, m) in [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3), (5, 2), (7, 2)] {
            let f = FieldCtx::new(p, m).unwrap();
            for (i, a) in f.basis().iter().enumerate() {
                for (j, b) in f.dual_basis().iter().enumerate() {
                    let t = f.trace(&f.mul(a, b).unwrap()).unwrap();
                    assert_eq!(t, u32::from(i == j));
                }
            }
        }
    }

    #[test]
    fn inner_product_examples() {
        let f = FieldCtx::new(2, 2).unwrap();
        let x = f.x();
        let beta = f.dual_basis()[1].clone();
        assert_eq!(f.inner_product(&x, &beta).unwrap(), 1);
        for a in f.elements() {
            assert_eq!(f.inner_product(&a, &f.zero()).unwrap(), 0);
        }
        let g = FieldCtx::new(2, 1).unwrap();
        assert_eq!(g.inner_product(&g.one(), &g.one()).unwrap(), 1);
    }

    #[test]
    fn inner_product_equals_trace_of_product_exhaustive() {
        for (p, m) in [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (5, 1), (7, 1), (13, 1)] {
            let f = FieldCtx::new(p, m).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    let lhs = f.inner_product(&a, &b).unwrap();
                    let rhs = f.trace(&f.mul(&a, &b).unwrap()).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn shifted_trace_agrees() {
        for (p, m) in [(2, 2), (2, 3), (3, 2), (5, 2), (2, 4)] {
            let f = FieldCtx::new(p, m).unwrap();
            for a in f.elements() {
                assert_eq!(f.trace(&a).unwrap(), f.trace_shifted(&a).unwrap());
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for (p, m) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (7, 1)] {
            let f = FieldCtx::new(p, m).unwrap();
            let els: Vec<_> = f.elements().collect();
            for a in &els {
                assert_eq!(&f.mul(a, &f.one()).unwrap(), a);
                assert!(f.add(a, &f.neg(a).unwrap()).unwrap().is_zero());
                if !a.is_zero() {
                    assert_eq!(f.mul(a, &f.inv(a).unwrap()).unwrap(), f.one());
                }
                for b in &els {
                    assert_eq!(f.mul(a, b).unwrap(), f.mul(b, a).unwrap());
                    for c in &els {
                        let ab_c = f.mul(&f.mul(a, b).unwrap(), c).unwrap();
                        let a_bc = f.mul(a, &f.mul(b, c).unwrap()).unwrap();
                        assert_eq!(ab_c, a_bc);
                        let lhs = f.mul(a, &f.add(b, c).unwrap()).unwrap();
                        let rhs = f.add(&f.mul(a, b).unwrap(), &f.mul(a, c).unwrap()).unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(FieldCtx::new(4, 1), Err(FieldError::NotPrime(4))));
        assert!(matches!(FieldCtx::new(2, 0), Err(FieldError::ZeroDegree)));
        assert!(matches!(FieldCtx::new(2, 17), Err(FieldError::TooLarge { .. })));
        assert!(FieldCtx::new(2, 16).is_ok());
        let f = FieldCtx::new(2, 2).unwrap();
        let g = FieldCtx::new(3, 1).unwrap();
        assert!(matches!(f.mul(&f.one(), &g.one()), Err(FieldError::ContextMismatch)));
        assert!(matches!(f.inv(&f.zero()), Err(FieldError::InverseOfZero)));
        assert!(matches!(
            FieldCtx::with_modulus(2, &[1, 0, 1]),
            Err(FieldError::Reducible(_))
        ));
    }

    #[test]
    fn construction_is_deterministic() {
        for (p, m) in [(2, 8), (3, 5), (5, 3), (251, 2)] {
            let a = FieldCtx::new(p, m).unwrap();
            let b = FieldCtx::new(p, m).unwrap();
            assert_eq!(a, b);
            let c = FieldCtx::from_spec(&a.spec()).unwrap();
            assert_eq!(a, c);
        }
    }

    #[test]
    fn index_round_trip() {
        let f = FieldCtx::new(3, 2).unwrap();
        for i in 0..f.q() {
            assert_eq!(f.from_index(i).index(f.p()), i);
        }
    }
}
