use pmd_core::linalg::operator_norm;
use pmd_core::metrics::{corollary1_bound, epsilon_floor, epsilon_of, theorem1_bound};
use pmd_core::search::{bloch_grid_oracle, optimize_epsilon};
use pmd_core::{CodeSpace, FieldCtx, Limits, PauliSpace, PmdReport, SearchConfig};

/// Dense `max_E ‖Π E Π‖∞`, the definition without any reduction.
fn dense_epsilon(cs: &CodeSpace, limits: &Limits) -> f64 {
    let space = PauliSpace::new(cs.ctx(), cs.n()).unwrap();
    let proj = cs.projector(limits).unwrap().into_matrix();
    (1..space.num_labels())
        .map(|i| {
            let e = space.matrix(&space.label(i), limits).unwrap().into_matrix();
            operator_norm(&(&proj * e * &proj)).unwrap()
        })
        .fold(0.0, f64::max)
}

#[test]
fn epsilon_matches_dense_definition() {
    let limits = Limits::default();
    for (p, m, n, k) in [(2, 1, 2, 1), (3, 1, 2, 1), (2, 2, 1, 0), (2, 1, 3, 1), (5, 1, 1, 0)] {
        let ctx = FieldCtx::new(p, m).unwrap();
        for seed in 0..3 {
            let cs = CodeSpace::random(&ctx, n, k, seed).unwrap();
            let fast = epsilon_of(&cs, &limits).unwrap().epsilon;
            assert!((fast - dense_epsilon(&cs, &limits)).abs() < 1e-10);
        }
    }
}

#[test]
fn file_round_trip_preserves_report() {
    let limits = Limits::default();
    let dir = tempfile::tempdir().unwrap();
    let ctx = FieldCtx::new(3, 1).unwrap();
    let cs = CodeSpace::random(&ctx, 2, 1, 11).unwrap();
    let path = dir.path().join("code.json");
    cs.save_path(&path).unwrap();
    let back = CodeSpace::load_path(&path).unwrap();
    assert_eq!(back.basis(), cs.basis());
    let (a, _) = PmdReport::evaluate(&cs, &limits).unwrap();
    let (b, _) = PmdReport::evaluate(&back, &limits).unwrap();
    assert_eq!(a, b);
    assert!(a.respects_bound() && a.eps_floor_ok);
    assert!(a.corollary_lambda_min <= a.lambda as f64 + 1e-6);
}

#[test]
fn bound_never_below_floor() {
    for q in [2u64, 3, 4, 5, 7, 8, 9] {
        for n in 1..=8u32 {
            for lambda in 0..=n {
                let b = theorem1_bound(n, lambda, q).unwrap();
                assert!(b >= epsilon_floor(n, q) - 1e-15, "q={q} n={n} lambda={lambda}");
            }
        }
    }
}

#[test]
fn corollary_inverts_theorem_within_log2() {
    // λ ≥ 2 log_q(1/bound) − log_q 2 is implied by the bound itself
    for q in [2u64, 3, 4] {
        for n in 1..=5u32 {
            for lambda in 0..=n {
                let b = theorem1_bound(n, lambda, q).unwrap();
                assert!(corollary1_bound(b, q).unwrap() <= lambda as f64 + 1e-9);
            }
        }
    }
}

#[test]
fn search_agrees_with_grid_oracle() {
    let limits = Limits::default();
    let oracle = bloch_grid_oracle(100).unwrap();
    let found = optimize_epsilon(&SearchConfig::new(1, 0, 2, 1), &limits).unwrap();
    assert!((oracle.min_epsilon - found.report.epsilon).abs() < 1e-4);
    let exact = (1.0f64 / 3.0).sqrt();
    assert!(found.report.epsilon >= exact - 1e-9);
}
