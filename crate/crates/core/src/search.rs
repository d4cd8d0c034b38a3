//! Local search over code spaces for small `ε`, plus a brute-force grid oracle
//! for the single-qubit, single-state case.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codespace::{gaussian_matrix, CodeSpace, RANK_TOL};
use crate::error::SearchError;
use crate::finite_field::FieldCtx;
use crate::linalg::{modified_gram_schmidt, splitmix64};
use crate::metrics::{epsilon_in, theorem1_bound, PmdReport, IDENTITY_TOL};
use crate::pauli::PauliSpace;
use crate::Limits;

/// Search parameters. The field is given as `(p, m)` with `q = p^m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n: usize,
    pub k: usize,
    pub p: u64,
    pub m: usize,
    pub seed: u64,
    pub restarts: usize,
    pub local_steps: usize,
    pub initial_step: f64,
    pub step_decay: f64,
    /// Consecutive rejections before the step shrinks.
    pub rejection_streak: usize,
    /// Stop a restart once `ε ≤ target + 1e-6`.
    pub target: Option<f64>,
}

impl SearchConfig {
    pub fn new(n: usize, k: usize, p: u64, m: usize) -> Self {
        SearchConfig {
            n,
            k,
            p,
            m,
            seed: 0,
            restarts: 8,
            local_steps: 500,
            initial_step: 0.5,
            step_decay: 0.7,
            rejection_streak: 10,
            target: None,
        }
    }

    fn validate(&self) -> Result<(), SearchError> {
        if self.restarts == 0 {
            return Err(SearchError::Config("restarts must be at least 1".into()));
        }
        if !(self.step_decay > 0.0 && self.step_decay < 1.0) {
            return Err(SearchError::Config(format!(
                "step_decay = {} must lie in (0, 1)",
                self.step_decay
            )));
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return Err(SearchError::Config("initial_step must be positive".into()));
        }
        if self.rejection_streak == 0 {
            return Err(SearchError::Config("rejection_streak must be at least 1".into()));
        }
        if self.k > self.n {
            return Err(SearchError::Config(format!("k = {} exceeds n = {}", self.k, self.n)));
        }
        Ok(())
    }
}

/// Seed of restart `i`: `splitmix64(seed + i · 0x9E3779B97F4A7C15)` (wrapping).
pub fn restart_seed(seed: u64, i: usize) -> u64 {
    splitmix64(seed.wrapping_add((i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub best: CodeSpace,
    pub report: PmdReport,
    /// `(iteration, best ε so far)` at every improvement; iterations of restart
    /// `i` are offset by `i · (local_steps + 1)`.
    pub trajectory: Vec<(u64, f64)>,
}

impl SearchResult {
    pub fn trajectory_csv(&self) -> String {
        let mut out = String::from("iteration,epsilon\n");
        for (it, eps) in &self.trajectory {
            out.push_str(&format!("{it},{eps}\n"));
        }
        out
    }
}

struct RestartOutcome {
    best: CodeSpace,
    epsilon: f64,
    worst_index: u64,
    mean_sq_norm: f64,
    history: Vec<(u64, f64)>,
}

/// Multi-restart local search minimizing `ε`.
///
/// Each restart starts from a Haar-random code, proposes `C + step·G` with `G`
/// Gaussian, re-orthonormalizes, and accepts strict improvements only. After
/// `rejection_streak` consecutive rejections the step is multiplied by
/// `step_decay`. Every evaluated `ε` is checked against the proved lower bound;
/// falling below it is reported as [`SearchError::BoundViolated`].
pub fn optimize_epsilon(cfg: &SearchConfig, limits: &Limits) -> Result<SearchResult, SearchError> {
    cfg.validate()?;
    let ctx = FieldCtx::new(cfg.p, cfg.m).map_err(crate::error::CodeSpaceError::from)?;
    let space = PauliSpace::new(&ctx, cfg.n).map_err(crate::error::MetricsError::from)?;
    limits
        .check_labels(space.num_labels() as u128)
        .map_err(crate::error::MetricsError::from)?;
    let bound = theorem1_bound(cfg.n as u32, (cfg.n - cfg.k) as u32, ctx.q() as u64)?;

    let outcomes: Vec<Result<RestartOutcome, SearchError>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| run_restart(cfg, &ctx, &space, limits, bound, restart_seed(cfg.seed, i)))
        .collect();

    let stride = cfg.local_steps as u64 + 1;
    let mut trajectory = Vec::new();
    let mut best: Option<RestartOutcome> = None;
    let mut best_eps = f64::INFINITY;
    for (i, outcome) in outcomes.into_iter().enumerate() {
        let outcome = outcome?;
        for &(step, eps) in &outcome.history {
            if eps < best_eps {
                best_eps = eps;
                trajectory.push((i as u64 * stride + step, eps));
            }
        }
        if best.as_ref().is_none_or(|b| outcome.epsilon < b.epsilon) {
            best = Some(outcome);
        }
    }
    let best = best.expect("restarts >= 1");
    let res = crate::metrics::EpsilonResult {
        epsilon: best.epsilon,
        worst_index: best.worst_index,
        worst_label: space.label(best.worst_index),
        mean_sq_norm: best.mean_sq_norm,
    };
    let report = PmdReport::from_result(&best.best, &res)?;
    Ok(SearchResult {
        best: best.best,
        report,
        trajectory,
    })
}

fn run_restart(
    cfg: &SearchConfig,
    ctx: &FieldCtx,
    space: &PauliSpace,
    limits: &Limits,
    bound: f64,
    seed: u64,
) -> Result<RestartOutcome, SearchError> {
    let check = |eps: f64| {
        if eps < bound - IDENTITY_TOL {
            Err(SearchError::BoundViolated { epsilon: eps, bound })
        } else {
            Ok(())
        }
    };
    let mut current = CodeSpace::random(ctx, cfg.n, cfg.k, seed)?;
    let first = epsilon_in(space, &current, limits)?;
    check(first.epsilon)?;
    let mut eps = first.epsilon;
    let mut worst_index = first.worst_index;
    let mut mean_sq_norm = first.mean_sq_norm;
    let mut history = vec![(0u64, eps)];

    let reached = |e: f64| cfg.target.is_some_and(|t| e <= t + 1e-6);
    // with k = n the code is the whole space and there is nothing to move
    if cfg.k < cfg.n && !reached(eps) {
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ 0x5eed_5eed_5eed_5eed));
        let mut step = cfg.initial_step;
        let mut streak = 0usize;
        let (rows, cols) = (current.dim(), current.code_dim());
        for it in 1..=cfg.local_steps {
            let g = gaussian_matrix(&mut rng, rows, cols);
            let proposal = current.basis() + g * Complex64::from(step);
            let mut accepted = false;
            if let Some(basis) = modified_gram_schmidt(&proposal, RANK_TOL) {
                let candidate = current.with_basis_unchecked(basis);
                let res = epsilon_in(space, &candidate, limits)?;
                check(res.epsilon)?;
                if res.epsilon < eps {
                    eps = res.epsilon;
                    worst_index = res.worst_index;
                    mean_sq_norm = res.mean_sq_norm;
                    current = candidate;
                    history.push((it as u64, eps));
                    accepted = true;
                }
            }
            if accepted {
                streak = 0;
                if reached(eps) {
                    break;
                }
            } else {
                streak += 1;
                if streak >= cfg.rejection_streak {
                    step *= cfg.step_decay;
                    streak = 0;
                }
            }
        }
    }
    Ok(RestartOutcome {
        best: current,
        epsilon: eps,
        worst_index,
        mean_sq_norm,
        history,
    })
}

/// Grid minimum of `ε` over single-qubit states.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochGridResult {
    pub min_epsilon: f64,
    pub theta: f64,
    pub phi: f64,
}

/// Zoom levels used by [`bloch_grid_oracle`].
pub const DEFAULT_GRID_REFINEMENTS: usize = 3;

/// `ε` of `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`, computed directly as
/// `max(|⟨X⟩|, |⟨Z⟩|, |⟨XZ⟩|)` from explicit 2×2 matrices.
pub fn bloch_epsilon(theta: f64, phi: f64) -> f64 {
    let a = Complex64::new((theta / 2.0).cos(), 0.0);
    let b = Complex64::from_polar((theta / 2.0).sin(), phi);
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    // row-major [[m00, m01], [m10, m11]]
    let x = [o, one, one, o];
    let z = [one, o, o, -one];
    let xz = [o, -one, one, o];
    let expect = |m: [Complex64; 4]| {
        let v0 = m[0] * a + m[1] * b;
        let v1 = m[2] * a + m[3] * b;
        (a.conj() * v0 + b.conj() * v1).norm()
    };
    expect(x).max(expect(z)).max(expect(xz))
}

fn grid_min(resolution: usize, theta: (f64, f64), phi: (f64, f64), phi_closed: bool) -> BlochGridResult {
    let theta_step = (theta.1 - theta.0) / (resolution - 1) as f64;
    let phi_div = if phi_closed { resolution - 1 } else { resolution };
    let phi_step = (phi.1 - phi.0) / phi_div as f64;
    let mut best = BlochGridResult {
        min_epsilon: f64::INFINITY,
        theta: 0.0,
        phi: 0.0,
    };
    for i in 0..resolution {
        let t = theta.0 + i as f64 * theta_step;
        for j in 0..resolution {
            let f = phi.0 + j as f64 * phi_step;
            let e = bloch_epsilon(t, f);
            if e < best.min_epsilon {
                best = BlochGridResult {
                    min_epsilon: e,
                    theta: t,
                    phi: f,
                };
            }
        }
    }
    best
}

/// Exhaustive `resolution × resolution` grid over `θ ∈ [0, π]`, `φ ∈ [0, 2π)`
/// with no refinement.
pub fn bloch_grid_single(resolution: usize) -> Result<BlochGridResult, SearchError> {
    bloch_grid(resolution, 0)
}

/// Grid oracle: the exhaustive grid of [`bloch_grid_single`] followed by
/// [`DEFAULT_GRID_REFINEMENTS`] exhaustive grids of the same resolution, each
/// spanning ±3 cells of the previous level around its minimizer.
pub fn bloch_grid_oracle(resolution: usize) -> Result<BlochGridResult, SearchError> {
    bloch_grid(resolution, DEFAULT_GRID_REFINEMENTS)
}

pub fn bloch_grid(resolution: usize, refinements: usize) -> Result<BlochGridResult, SearchError> {
    if resolution < 2 {
        return Err(SearchError::Config(format!(
            "resolution {resolution} must be at least 2"
        )));
    }
    let mut best = grid_min(resolution, (0.0, PI), (0.0, 2.0 * PI), false);
    let mut dt = PI / (resolution - 1) as f64;
    let mut dp = 2.0 * PI / resolution as f64;
    for _ in 0..refinements {
        let theta = ((best.theta - 3.0 * dt).max(0.0), (best.theta + 3.0 * dt).min(PI));
        let phi = (best.phi - 3.0 * dp, best.phi + 3.0 * dp);
        let level = grid_min(resolution, theta, phi, true);
        if level.min_epsilon < best.min_epsilon {
            best = level;
        }
        dt = (theta.1 - theta.0) / (resolution - 1) as f64;
        dp = (phi.1 - phi.0) / (resolution - 1) as f64;
    }
    best.phi = best.phi.rem_euclid(2.0 * PI);
    Ok(best)
}
