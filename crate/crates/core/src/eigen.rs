//! Ground-state solvers: dense symmetric eigendecomposition for small
//! sectors, Lanczos with full reorthogonalization for large ones.
//!
//! All reductions use fixed-size chunked summation, so results are
//! bit-identical for a given seed regardless of thread count or the
//! `parallel` feature.

use nalgebra::DMatrix;

use crate::hamiltonian::SparseHamiltonian;
use crate::rng::SplitMix64;
use crate::{Error, Result};

/// Sectors at or below this dimension use the dense path.
pub const DENSE_THRESHOLD: usize = 4096;

/// Gap threshold (units of t) below which a ground state is flagged
/// degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;

/// Krylov vectors kept per Lanczos cycle; the solver restarts from the
/// current Ritz vector when a cycle is exhausted without convergence.
const MAX_CYCLE: usize = 400;

const CHECK_EVERY: usize = 10;
const SUM_CHUNK: usize = 8192;

/// Lowest eigenpair of a sector Hamiltonian.
#[derive(Clone, Debug)]
pub struct GroundState {
    pub energy: f64,
    /// Unit-norm eigenvector over the sector basis, sign-fixed so its
    /// largest-magnitude component is positive.
    pub vector: Vec<f64>,
    /// Estimate of E_1 - E_0 (exact on the dense path).
    pub gap: f64,
    pub converged: bool,
    /// ||H v - E v||, recomputed after the solve.
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let partials: Vec<f64> = a
            .par_chunks(SUM_CHUNK)
            .zip(b.par_chunks(SUM_CHUNK))
            .map(|(ca, cb)| ca.iter().zip(cb).map(|(x, y)| x * y).sum())
            .collect();
        partials.iter().sum()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let partials: Vec<f64> = a
            .chunks(SUM_CHUNK)
            .zip(b.chunks(SUM_CHUNK))
            .map(|(ca, cb)| ca.iter().zip(cb).map(|(x, y)| x * y).sum())
            .collect();
        partials.iter().sum()
    }
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// y += alpha * x
fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        y.par_chunks_mut(SUM_CHUNK)
            .zip(x.par_chunks(SUM_CHUNK))
            .for_each(|(cy, cx)| {
                for (py, px) in cy.iter_mut().zip(cx) {
                    *py += alpha * px;
                }
            });
    }
    #[cfg(not(feature = "parallel"))]
    for (py, px) in y.iter_mut().zip(x) {
        *py += alpha * px;
    }
}

fn scale(v: &mut [f64], alpha: f64) {
    for x in v.iter_mut() {
        *x *= alpha;
    }
}

/// Flip the global sign so the largest-magnitude component is positive;
/// ties resolve to the lowest index.
pub fn sign_fix(v: &mut [f64]) {
    let mut best = 0usize;
    let mut best_abs = f64::NEG_INFINITY;
    for (k, &x) in v.iter().enumerate() {
        if x.abs() > best_abs {
            best_abs = x.abs();
            best = k;
        }
    }
    if v[best] < 0.0 {
        scale(v, -1.0);
    }
}

fn residual_of(h: &SparseHamiltonian, energy: f64, v: &[f64]) -> f64 {
    let mut hv = vec![0.0; v.len()];
    h.matvec_into(v, &mut hv);
    axpy(&mut hv, -energy, v);
    norm(&hv)
}

/// Full symmetric eigendecomposition; exact gap.
pub fn dense_ground_state(h: &SparseHamiltonian) -> Result<GroundState> {
    let dim = h.dim();
    if dim > DENSE_THRESHOLD {
        return Err(Error::DenseTooLarge {
            dim,
            threshold: DENSE_THRESHOLD,
        });
    }
    let max_asym = h.max_asymmetry();
    if max_asym > 0.0 {
        return Err(Error::NotSymmetric { max_asym });
    }
    let eig = h.to_dense().symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let energy = eig.eigenvalues[order[0]];
    let gap = if dim > 1 {
        eig.eigenvalues[order[1]] - energy
    } else {
        f64::INFINITY
    };
    let mut vector: Vec<f64> = eig.eigenvectors.column(order[0]).iter().copied().collect();
    let nrm = norm(&vector);
    scale(&mut vector, 1.0 / nrm);
    sign_fix(&mut vector);
    let residual = residual_of(h, energy, &vector);
    Ok(GroundState {
        energy,
        vector,
        gap,
        converged: true,
        residual,
    })
}

struct CycleOutcome {
    energy: f64,
    vector: Vec<f64>,
    gap: f64,
    iterations: usize,
}

/// One Lanczos cycle from `start`, at most `cap` Krylov vectors, with full
/// reorthogonalization against every stored vector.
fn lanczos_cycle(h: &SparseHamiltonian, start: &[f64], cap: usize, tol: f64) -> CycleOutcome {
    let n = h.dim();
    let breakdown = 1e-13;

    let mut vs: Vec<Vec<f64>> = Vec::with_capacity(cap);
    let mut alpha: Vec<f64> = Vec::with_capacity(cap);
    let mut beta: Vec<f64> = Vec::with_capacity(cap);

    let mut v = start.to_vec();
    let nrm = norm(&v);
    scale(&mut v, 1.0 / nrm);
    vs.push(v);

    let mut w = vec![0.0; n];
    loop {
        let j = alpha.len();
        h.matvec_into(&vs[j], &mut w);
        if j > 0 {
            let b = beta[j - 1];
            let prev = vs[j - 1].clone();
            axpy(&mut w, -b, &prev);
        }
        let a = dot(&w, &vs[j]);
        alpha.push(a);
        {
            let vj = vs[j].clone();
            axpy(&mut w, -a, &vj);
        }
        // Full reorthogonalization.
        for prev in &vs {
            let proj = dot(&w, prev);
            if proj != 0.0 {
                axpy(&mut w, -proj, prev);
            }
        }
        let b_next = norm(&w);

        let k = alpha.len();
        let exhausted = k == cap || k == n || b_next < breakdown;
        let should_check = exhausted || k % CHECK_EVERY == 0;
        if should_check && k >= 1 {
            let (theta, gap, y) = tridiag_ground(&alpha, &beta);
            let est = b_next * y.last().copied().unwrap_or(0.0).abs();
            if est <= 0.5 * tol || exhausted {
                let mut ritz = vec![0.0; n];
                for (coef, basis_vec) in y.iter().zip(&vs) {
                    axpy(&mut ritz, *coef, basis_vec);
                }
                let nrm = norm(&ritz);
                scale(&mut ritz, 1.0 / nrm);
                sign_fix(&mut ritz);
                return CycleOutcome {
                    energy: theta,
                    vector: ritz,
                    gap,
                    iterations: k,
                };
            }
        }

        beta.push(b_next);
        let mut next = w.clone();
        scale(&mut next, 1.0 / b_next);
        vs.push(next);
    }
}

/// Lowest Ritz value, gap to the second, and ground eigenvector of the
/// current tridiagonal matrix.
fn tridiag_ground(alpha: &[f64], beta: &[f64]) -> (f64, f64, Vec<f64>) {
    let k = alpha.len();
    let mut t = DMatrix::zeros(k, k);
    for (i, &a) in alpha.iter().enumerate() {
        t[(i, i)] = a;
    }
    for (i, &b) in beta.iter().take(k.saturating_sub(1)).enumerate() {
        t[(i, i + 1)] = b;
        t[(i + 1, i)] = b;
    }
    let eig = t.symmetric_eigen();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let theta = eig.eigenvalues[order[0]];
    let gap = if k > 1 {
        eig.eigenvalues[order[1]] - theta
    } else {
        f64::INFINITY
    };
    let y: Vec<f64> = eig.eigenvectors.column(order[0]).iter().copied().collect();
    (theta, gap, y)
}

/// Lanczos from a seeded deterministic start vector. Non-convergence after
/// `max_iter` total iterations is reported in the result, never silently.
pub fn lanczos_ground_state(
    h: &SparseHamiltonian,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<GroundState> {
    lanczos_with_cycle(h, tol, max_iter, seed, MAX_CYCLE)
}

/// As [`lanczos_ground_state`] with an explicit per-cycle Krylov cap;
/// exposed for tests of the restart path.
pub fn lanczos_with_cycle(
    h: &SparseHamiltonian,
    tol: f64,
    max_iter: usize,
    seed: u64,
    cycle_cap: usize,
) -> Result<GroundState> {
    let n = h.dim();
    if n < 2 {
        return Err(Error::DimensionTooSmall { dim: n });
    }
    let mut rng = SplitMix64::new(seed);
    let mut start: Vec<f64> = (0..n).map(|_| rng.centered()).collect();
    let nrm = norm(&start);
    scale(&mut start, 1.0 / nrm);

    let mut iters_left = max_iter.max(2);
    loop {
        let cap = cycle_cap.max(2).min(iters_left).min(n);
        let outcome = lanczos_cycle(h, &start, cap, tol);
        iters_left = iters_left.saturating_sub(outcome.iterations);
        let residual = residual_of(h, outcome.energy, &outcome.vector);
        let converged = residual <= tol;
        if converged || iters_left < 2 {
            return Ok(GroundState {
                energy: outcome.energy,
                vector: outcome.vector,
                gap: outcome.gap,
                converged,
                residual,
            });
        }
        start = outcome.vector;
    }
}

/// Dispatch on [`DENSE_THRESHOLD`].
pub fn ground_state(
    h: &SparseHamiltonian,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<GroundState> {
    if h.dim() <= DENSE_THRESHOLD {
        dense_ground_state(h)
    } else {
        lanczos_ground_state(h, tol, max_iter, seed)
    }
}

/// Flags a gap below `threshold` (in units of t) so downstream reduced
/// density matrices are marked unreliable. Callers must pass a converged
/// ground state.
pub fn degeneracy_check(gs: &GroundState, threshold: f64) -> bool {
    debug_assert!(gs.converged, "degeneracy_check expects a converged state");
    gs.gap < threshold
}
