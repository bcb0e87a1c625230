//! Brute-force full-Fock-space reference implementations, used only by
//! tests to validate the fast paths.
//!
//! Operators are assembled from elementary annihilation matrices carrying
//! explicit Jordan-Wigner sign strings over the full 4^L space. None of the
//! sign handling here is shared with the production paths; the duplication
//! is the point of the check.

use nalgebra::DMatrix;

use crate::fock::{FockState, SectorBasis};
use crate::hamiltonian::HubbardParams;
use crate::{Error, Result};

/// The oracle is capped at L <= 6 (full dimension 4096).
pub const MAX_ORACLE_SITES: usize = 6;

/// Elementary annihilation operators `c_m` for all 2L modes, each stored as
/// one optional (row, sign) entry per column of the 4^L-dimensional space.
pub struct ModeOperators {
    sites: usize,
    /// `ops[m][col] = Some((row, sign))` iff `c_m |col> = sign |row>`.
    ops: Vec<Vec<Option<(usize, f64)>>>,
}

/// Full-space basis index of a Fock state: mode m occupied <=> bit m set.
pub fn full_index(state: FockState, sites: usize) -> usize {
    state.packed(sites) as usize
}

impl ModeOperators {
    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn n_modes(&self) -> usize {
        2 * self.sites
    }

    pub fn full_dim(&self) -> usize {
        1 << (2 * self.sites)
    }

    /// y = c_m x
    pub fn apply_c(&self, m: usize, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; x.len()];
        for (col, entry) in self.ops[m].iter().enumerate() {
            if let Some((row, sign)) = entry {
                y[*row] += sign * x[col];
            }
        }
        y
    }

    /// y = c†_m x (transpose of the real matrix for c_m).
    pub fn apply_c_dag(&self, m: usize, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; x.len()];
        for (col, entry) in self.ops[m].iter().enumerate() {
            if let Some((row, sign)) = entry {
                y[col] += sign * x[*row];
            }
        }
        y
    }

    /// y = n_m x
    pub fn apply_number(&self, m: usize, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        for (col, slot) in y.iter_mut().enumerate() {
            if col >> m & 1 == 0 {
                *slot = 0.0;
            }
        }
        y
    }

    /// Dense matrix of `c_m`; for the anticommutator checks at small L.
    pub fn c_dense(&self, m: usize) -> DMatrix<f64> {
        let dim = self.full_dim();
        let mut out = DMatrix::zeros(dim, dim);
        for (col, entry) in self.ops[m].iter().enumerate() {
            if let Some((row, sign)) = entry {
                out[(*row, col)] = *sign;
            }
        }
        out
    }

    /// y = H x with H assembled purely from mode operators.
    pub fn apply_hamiltonian(&self, params: &HubbardParams, x: &[f64]) -> Vec<f64> {
        let sites = self.sites;
        let t = params.t();
        let u = params.u();
        let mut y = vec![0.0; x.len()];
        for spin_block in [0, sites] {
            for site in 1..sites {
                let a = spin_block + site - 1;
                let b = a + 1;
                // -t (c†_a c_b + c†_b c_a)
                for (to, from) in [(a, b), (b, a)] {
                    let hopped = self.apply_c_dag(to, &self.apply_c(from, x));
                    for (slot, v) in y.iter_mut().zip(&hopped) {
                        *slot -= t * v;
                    }
                }
            }
        }
        for site in 1..=sites {
            let both = self.apply_number(site - 1, &self.apply_number(sites + site - 1, x));
            for (slot, v) in y.iter_mut().zip(&both) {
                *slot += u * v;
            }
        }
        y
    }

    /// Dense full Hamiltonian, column by column.
    pub fn dense_hamiltonian(&self, params: &HubbardParams) -> DMatrix<f64> {
        let dim = self.full_dim();
        let mut out = DMatrix::zeros(dim, dim);
        let mut e = vec![0.0; dim];
        for col in 0..dim {
            e[col] = 1.0;
            let hcol = self.apply_hamiltonian(params, &e);
            for (row, v) in hcol.iter().enumerate() {
                out[(row, col)] = *v;
            }
            e[col] = 0.0;
        }
        out
    }
}

/// Build the 2L elementary annihilation operators with explicit sign
/// strings: `c_m |n> = (-1)^(popcount of occupied modes below m) |n - 2^m>`.
pub fn build_mode_operators(sites: usize) -> Result<ModeOperators> {
    if sites == 0 || sites > MAX_ORACLE_SITES {
        return Err(Error::OracleTooLarge {
            sites,
            max: MAX_ORACLE_SITES,
        });
    }
    let n_modes = 2 * sites;
    let dim = 1usize << n_modes;
    let mut ops = Vec::with_capacity(n_modes);
    for m in 0..n_modes {
        let mut col_entries: Vec<Option<(usize, f64)>> = vec![None; dim];
        let below = (1usize << m) - 1;
        for (n, slot) in col_entries.iter_mut().enumerate() {
            if n >> m & 1 == 1 {
                let sign = if (n & below).count_ones() % 2 == 0 {
                    1.0
                } else {
                    -1.0
                };
                *slot = Some((n ^ (1 << m), sign));
            }
        }
        ops.push(col_entries);
    }
    Ok(ModeOperators { sites, ops })
}

/// Embed a sector vector into the full 4^L space.
pub fn embed_sector_vector(basis: &SectorBasis, v: &[f64]) -> Result<Vec<f64>> {
    if v.len() != basis.len() {
        return Err(Error::LengthMismatch {
            expected: basis.len(),
            got: v.len(),
        });
    }
    let sites = basis.sector().sites();
    let mut full = vec![0.0; 1 << (2 * sites)];
    for (k, state) in basis.iter().enumerate() {
        full[full_index(state, sites)] = v[k];
    }
    Ok(full)
}

/// Pair reduced density matrix reconstructed element by element from
/// expectation values of a complete operator basis of the two sites.
///
/// `rho[(a,b),(a',b')] = <psi| C_i(a') C_j(b') P_vac A_j(b) A_i(a) |psi>`
/// where `C`/`A` are ordered creation/annihilation strings for the local
/// configuration and `P_vac` projects both sites empty.
pub fn rdm_by_expectation(
    ops: &ModeOperators,
    full_state: &[f64],
    i: usize,
    j: usize,
) -> Result<DMatrix<f64>> {
    let sites = ops.sites();
    for site in [i, j] {
        if site == 0 || site > sites {
            return Err(Error::SiteOutOfRange { site, sites });
        }
    }
    if i == j {
        return Err(Error::EqualSites { site: i });
    }

    let up = |site: usize| site - 1;
    let down = |site: usize| sites + site - 1;

    // Annihilation string for local configuration `a` at `site`, in
    // application order (rightmost operator first): A(0) = 1, A(up) = c_up,
    // A(down) = c_down, A(updown) = c_down c_up applied as written.
    let annihilation_string = |site: usize, a: usize| -> Vec<usize> {
        match a {
            0 => vec![],
            1 => vec![up(site)],
            2 => vec![down(site)],
            3 => vec![up(site), down(site)],
            _ => unreachable!(),
        }
    };

    let sys_mask =
        (1usize << up(i)) | (1usize << down(i)) | (1usize << up(j)) | (1usize << down(j));
    let project_vacant = |x: &mut Vec<f64>| {
        for (n, slot) in x.iter_mut().enumerate() {
            if n & sys_mask != 0 {
                *slot = 0.0;
            }
        }
    };

    let mut rho = DMatrix::zeros(16, 16);
    for row in 0..16 {
        let (a, b) = (row / 4, row % 4);
        for col in 0..16 {
            let (a2, b2) = (col / 4, col % 4);

            let mut x = full_state.to_vec();
            for &m in &annihilation_string(i, a) {
                x = ops.apply_c(m, &x);
            }
            for &m in &annihilation_string(j, b) {
                x = ops.apply_c(m, &x);
            }
            project_vacant(&mut x);
            // Creation strings are the daggered annihilation strings in
            // reverse order.
            for &m in annihilation_string(j, b2).iter().rev() {
                x = ops.apply_c_dag(m, &x);
            }
            for &m in annihilation_string(i, a2).iter().rev() {
                x = ops.apply_c_dag(m, &x);
            }
            rho[(row, col)] = full_state.iter().zip(&x).map(|(p, q)| p * q).sum();
        }
    }
    Ok(rho)
}
