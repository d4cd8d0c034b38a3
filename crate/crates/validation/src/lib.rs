//! Fixtures shared by the acceptance suite.

use nalgebra::DMatrix;
use num_complex::Complex64;
use pmd_core::linalg::CMatrix;
use pmd_core::{CodeSpace, FieldCtx};

/// `(p, m, n)` points of the acceptance grid: q ∈ {2, 3, 4, 5} with small n.
pub const GRID: [(u64, usize, usize); 7] = [
    (2, 1, 1),
    (2, 1, 2),
    (2, 1, 3),
    (3, 1, 1),
    (3, 1, 2),
    (2, 2, 1),
    (5, 1, 1),
];

pub fn q_of(p: u64, m: usize) -> u64 {
    p.pow(m as u32)
}

/// First `q^k` columns of the `n`-fold tensor power of the `q × q` DFT.
pub fn fourier_code(ctx: &FieldCtx, n: usize, k: usize) -> CodeSpace {
    let q = ctx.q() as usize;
    let f = DMatrix::from_fn(q, q, |i, j| {
        Complex64::from_polar(
            1.0 / (q as f64).sqrt(),
            2.0 * std::f64::consts::PI * (i * j) as f64 / q as f64,
        )
    });
    let mut full = CMatrix::identity(1, 1);
    for _ in 0..n {
        full = full.kronecker(&f);
    }
    let basis = full.columns(0, q.pow(k as u32)).into_owned();
    CodeSpace::from_basis(ctx, n, k, basis, false).expect("DFT columns are orthonormal")
}

/// The single-qubit state along the (1,1,1)/√3 Bloch direction.
pub fn magic_state() -> CodeSpace {
    CodeSpace::bloch_state((1.0f64 / 3.0).sqrt().acos(), std::f64::consts::FRAC_PI_4)
}
