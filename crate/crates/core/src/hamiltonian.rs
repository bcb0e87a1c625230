//! Sector-restricted sparse Fermi-Hubbard Hamiltonian with open boundaries.
//!
//! H = -t * sum_{i,sigma} (c†_{i,sigma} c_{i+1,sigma} + h.c.)
//!     + u * sum_i n_{i,up} n_{i,down}
//!
//! The matrix is real symmetric in the occupation basis and never leaves a
//! particle-number sector. Both triangles are stored so the row-parallel
//! matvec stays branch-free.

use nalgebra::DMatrix;

use crate::fock::{apply_hop, FockState, SectorBasis, Spin};
use crate::{Error, Result};

/// Default cap on matrix storage (values + column indices), in bytes.
pub const DEFAULT_MEMORY_BUDGET: usize = 2 << 30;

/// Chain parameters. `t` is the hopping amplitude, `u` the on-site Coulomb
/// energy; the dimensionless coupling U = u/t is the sweep parameter.
#[derive(Clone, Copy, Debug)]
pub struct HubbardParams {
    sites: usize,
    t: f64,
    u: f64,
}

impl HubbardParams {
    pub fn new(sites: usize, t: f64, u: f64) -> Result<Self> {
        if t <= 0.0 || !t.is_finite() {
            return Err(Error::NonPositiveHopping { t });
        }
        Ok(Self { sites, t, u })
    }

    /// t = 1 so that U = u.
    pub fn with_coupling(sites: usize, coupling: f64) -> Result<Self> {
        Self::new(sites, 1.0, coupling)
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    /// Dimensionless coupling U = u/t.
    pub fn coupling(&self) -> f64 {
        self.u / self.t
    }
}

/// Real symmetric sparse matrix in CSR layout with sorted columns per row.
#[derive(Clone, Debug)]
pub struct SparseHamiltonian {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl SparseHamiltonian {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    fn row(&self, r: usize) -> (&[u32], &[f64]) {
        let lo = self.row_ptr[r];
        let hi = self.row_ptr[r + 1];
        (&self.cols[lo..hi], &self.vals[lo..hi])
    }

    /// y = H x with a fixed per-row summation order.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::LengthMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let mut y = vec![0.0; self.dim];
        self.matvec_into(x, &mut y);
        Ok(y)
    }

    /// Hot path used by the solvers; `x` and `y` must have length `dim`.
    #[cfg(feature = "parallel")]
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        use rayon::prelude::*;
        const ROWS_PER_CHUNK: usize = 2048;
        y.par_chunks_mut(ROWS_PER_CHUNK)
            .enumerate()
            .for_each(|(chunk, out)| {
                let base = chunk * ROWS_PER_CHUNK;
                for (k, slot) in out.iter_mut().enumerate() {
                    *slot = self.row_dot(base + k, x);
                }
            });
    }

    #[cfg(not(feature = "parallel"))]
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        self.matvec_into_seq(x, y);
    }

    /// Sequential matvec; identical numbers to [`SparseHamiltonian::matvec_into`]
    /// because each output row is an independent ordered sum either way.
    pub fn matvec_into_seq(&self, x: &[f64], y: &mut [f64]) {
        for (r, slot) in y.iter_mut().enumerate() {
            *slot = self.row_dot(r, x);
        }
    }

    #[inline]
    fn row_dot(&self, r: usize, x: &[f64]) -> f64 {
        let (cols, vals) = self.row(r);
        let mut acc = 0.0;
        for (&c, &v) in cols.iter().zip(vals) {
            acc += v * x[c as usize];
        }
        acc
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                m[(r, c as usize)] = v;
            }
        }
        m
    }

    /// Largest asymmetry |H(r,c) - H(c,r)| over all stored entries.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.dim {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                let mirror = self.entry(c as usize, r);
                worst = worst.max((v - mirror).abs());
            }
        }
        worst
    }

    fn entry(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&(c as u32)) {
            Ok(pos) => vals[pos],
            Err(_) => 0.0,
        }
    }

    /// Build from a dense symmetric matrix, keeping structural zeros on the
    /// diagonal. Symmetry is not checked here; the dense solver validates.
    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let dim = m.nrows();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for r in 0..dim {
            for c in 0..dim {
                if m[(r, c)] != 0.0 || r == c {
                    cols.push(c as u32);
                    vals.push(m[(r, c)]);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }
}

/// Assemble the sector Hamiltonian with the default memory budget.
pub fn build_hamiltonian(params: &HubbardParams, basis: &SectorBasis) -> Result<SparseHamiltonian> {
    build_hamiltonian_with_budget(params, basis, DEFAULT_MEMORY_BUDGET)
}

/// Assemble the sector Hamiltonian, failing upfront if the estimated CSR
/// storage would exceed `budget` bytes.
pub fn build_hamiltonian_with_budget(
    params: &HubbardParams,
    basis: &SectorBasis,
    budget: usize,
) -> Result<SparseHamiltonian> {
    let sites = basis.sector().sites();
    if sites != params.sites() {
        return Err(Error::SiteCountMismatch {
            basis_sites: sites,
            param_sites: params.sites(),
        });
    }
    let dim = basis.len();
    let max_per_row = 4 * sites.saturating_sub(1) + 1;
    let needed = dim
        .saturating_mul(max_per_row)
        .saturating_mul(std::mem::size_of::<f64>() + std::mem::size_of::<u32>());
    if needed > budget {
        return Err(Error::MemoryBudget { needed, budget });
    }

    let t = params.t();
    let u = params.u();
    let mut row_ptr = Vec::with_capacity(dim + 1);
    let mut cols: Vec<u32> = Vec::new();
    let mut vals: Vec<f64> = Vec::new();
    row_ptr.push(0);

    let mut scratch: Vec<(u32, f64)> = Vec::with_capacity(max_per_row);
    for r in 0..dim {
        let state = basis.state(r);
        scratch.clear();
        scratch.push((r as u32, u * state.double_occupancy_count() as f64));
        for spin in [Spin::Up, Spin::Down] {
            for bond in 1..sites {
                for (to, from) in [(bond, bond + 1), (bond + 1, bond)] {
                    if let Some((moved, sign)) =
                        apply_hop(state, sites, to, from, spin).expect("sites in range")
                    {
                        let c = basis.index_of(moved).expect("hop stays in sector") as u32;
                        scratch.push((c, -t * f64::from(sign)));
                    }
                }
            }
        }
        scratch.sort_unstable_by_key(|&(c, _)| c);
        for &(c, v) in &scratch {
            cols.push(c);
            vals.push(v);
        }
        row_ptr.push(cols.len());
    }

    Ok(SparseHamiltonian {
        dim,
        row_ptr,
        cols,
        vals,
    })
}

/// Apply the total-spin operator S^2 = S^- S^+ + S_z (S_z + 1) to a sector
/// vector. Used by tests to confirm [H, S^2] = 0; the intermediate S^+
/// image lives in the (N_up + 1, N_down - 1) sector.
pub fn apply_s_squared(basis: &SectorBasis, x: &[f64]) -> Result<Vec<f64>> {
    let dim = basis.len();
    if x.len() != dim {
        return Err(Error::LengthMismatch {
            expected: dim,
            got: x.len(),
        });
    }
    let sector = basis.sector();
    let sites = sector.sites();
    let sz = (sector.n_up() as f64 - sector.n_down() as f64) / 2.0;
    let mut y: Vec<f64> = x.iter().map(|v| v * sz * (sz + 1.0)).collect();

    let up_mode = |site: usize| (site - 1) as u32;
    let down_mode = |site: usize| (sites + site - 1) as u32;

    for k in 0..dim {
        let amp = x[k];
        if amp == 0.0 {
            continue;
        }
        let packed = basis.state(k).packed(sites);
        for i in 1..=sites {
            // S_i^+ : move a down electron at site i into the up mode.
            let Some((mid, sign1)) = crate::fock::move_mode(packed, down_mode(i), up_mode(i))
            else {
                continue;
            };
            for j in 1..=sites {
                // S_j^- : move an up electron at site j into the down mode.
                let Some((fin, sign2)) = crate::fock::move_mode(mid, up_mode(j), down_mode(j))
                else {
                    continue;
                };
                let idx = basis
                    .index_of(FockState::from_packed(fin, sites))
                    .expect("S^- S^+ returns to the sector");
                y[idx] += f64::from(sign1 * sign2) * amp;
            }
        }
    }
    Ok(y)
}
