//! Per-point measurement pipeline behind the CLI driver: solve the
//! half-filling ground state on a coupling grid, extract pair measures, and
//! track the half-filled pair state across the grid.
//!
//! Points are independent; the measurement phase runs in parallel with the
//! `parallel` feature. All outputs are deterministic for a fixed
//! configuration regardless of thread count.

use crate::eigen::{degeneracy_check, ground_state, GroundState, DEGENERACY_THRESHOLD};
use crate::entanglement::{
    lbc, pure_state_lbc, spectral_decomposition, track_lhfs, von_neumann_entropy,
    SpectralDecomposition,
};
use crate::fock::{enumerate_sector, Sector, SectorBasis};
use crate::hamiltonian::{build_hamiltonian, HubbardParams};
use crate::rdm::{pair_rdm, pair_rdm_qudit, single_site_rdm, PairRDM};
use crate::{Error, Result};

/// Which two-site reduced density matrix a sweep reports. The fermionic
/// mode trace is the physically canonical default; the Jordan-Wigner qudit
/// trace differs for non-contiguous pairs and can detect pair entanglement
/// the mode trace does not (tests pin concrete instances).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RdmConvention {
    #[default]
    FermionicModes,
    JordanWignerQudit,
}

impl RdmConvention {
    pub fn pair_rdm(
        self,
        gs: &GroundState,
        basis: &SectorBasis,
        i: usize,
        j: usize,
    ) -> Result<PairRDM> {
        match self {
            RdmConvention::FermionicModes => pair_rdm(gs, basis, i, j),
            RdmConvention::JordanWignerQudit => pair_rdm_qudit(gs, basis, i, j),
        }
    }
}

pub const DEFAULT_U_MIN: f64 = 0.01;
pub const DEFAULT_U_MAX: f64 = 100.0;
pub const DEFAULT_U_COUNT: usize = 60;

/// Geometric grid from `min` to `max` inclusive.
pub fn log_grid(min: f64, max: f64, count: usize) -> Vec<f64> {
    assert!(min > 0.0 && max > min && count >= 2);
    let ratio = (max / min).ln();
    (0..count)
        .map(|k| min * (ratio * k as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Uniform grid from `min` to `max` inclusive.
pub fn linear_grid(min: f64, max: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2);
    (0..count)
        .map(|k| min + (max - min) * k as f64 / (count - 1) as f64)
        .collect()
}

/// U = 0 prepended to 60 log-spaced points on [0.01, 100]: resolves both
/// the weak-coupling rise and the large-U plateau.
pub fn default_u_grid() -> Vec<f64> {
    let mut grid = vec![0.0];
    grid.extend(log_grid(DEFAULT_U_MIN, DEFAULT_U_MAX, DEFAULT_U_COUNT));
    grid
}

/// Solver knobs shared by every sweep point.
#[derive(Clone, Copy, Debug)]
pub struct SolverSettings {
    /// Lanczos residual tolerance.
    pub tol: f64,
    /// Total Lanczos iteration budget (cycles restart internally).
    pub max_iter: usize,
    /// Seed of the deterministic start vector.
    pub seed: u64,
    /// Gap below this (units of t) flags the point degenerate.
    pub degeneracy_threshold: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 500,
            seed: 42,
            degeneracy_threshold: DEGENERACY_THRESHOLD,
        }
    }
}

/// Which measures a sweep computes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MeasureSet {
    pub lbc: bool,
    pub pair_entropy: bool,
    pub site_entropy: bool,
    pub occupations: bool,
    pub lhfs: bool,
    pub frozen_lhfs: bool,
}

impl MeasureSet {
    /// Everything except the frozen-state construction.
    pub fn standard() -> Self {
        Self {
            lbc: true,
            pair_entropy: true,
            site_entropy: true,
            occupations: true,
            lhfs: true,
            frozen_lhfs: false,
        }
    }

    pub fn everything() -> Self {
        Self {
            frozen_lhfs: true,
            ..Self::standard()
        }
    }
}

/// One row of a sweep: measures are `None` when not requested or when the
/// point is degenerate or unconverged.
#[derive(Clone, Debug)]
pub struct EntanglementReport {
    pub l: usize,
    pub u: f64,
    pub i: usize,
    pub j: usize,
    pub tau2: Option<f64>,
    pub sqrt_tau2: Option<f64>,
    pub pair_entropy: Option<f64>,
    pub site_entropy_i: Option<f64>,
    pub site_entropy_j: Option<f64>,
    pub v_i: Option<f64>,
    pub s_up_i: Option<f64>,
    pub s_down_i: Option<f64>,
    pub d_i: Option<f64>,
    pub p_lhfs: Option<f64>,
    pub lhfs_amplitudes: Option<[f64; 4]>,
    pub ground_energy: f64,
    pub gap: f64,
    pub residual: f64,
    pub converged: bool,
    pub degenerate: bool,
}

/// Frozen-state entry for one (pair, U): the bound of the mixture with the
/// reference eigenvector swapped in, next to the bound of the tracked pure
/// state itself.
#[derive(Clone, Copy, Debug)]
pub struct FrozenRecord {
    pub l: usize,
    pub u: f64,
    pub i: usize,
    pub j: usize,
    pub frozen_tau2: f64,
    pub frozen_sqrt_tau2: f64,
    pub lhfs_tau2: f64,
    pub lhfs_sqrt_tau2: f64,
}

/// Result of sweeping one chain length over a coupling grid.
#[derive(Clone, Debug, Default)]
pub struct ChainSweep {
    pub reports: Vec<EntanglementReport>,
    pub frozen: Vec<FrozenRecord>,
}

/// Ground-state summary of one (L, U) point.
#[derive(Clone, Copy, Debug)]
pub struct GroundPoint {
    pub l: usize,
    pub u: f64,
    pub energy: f64,
    pub gap: f64,
    pub residual: f64,
    pub converged: bool,
    pub degenerate: bool,
}

/// Half-filling solver for one chain length.
pub struct ChainSolver {
    sites: usize,
    basis: SectorBasis,
    settings: SolverSettings,
}

/// A solved (L, U) point.
pub struct SolvedPoint {
    pub u: f64,
    pub gs: GroundState,
    pub degenerate: bool,
}

impl ChainSolver {
    /// Only even L is accepted here; the basis layer itself allows odd
    /// sector counts.
    pub fn new(sites: usize, settings: SolverSettings) -> Result<Self> {
        if sites % 2 != 0 {
            return Err(Error::OddSites { sites });
        }
        let basis = enumerate_sector(Sector::half_filling(sites)?);
        Ok(Self {
            sites,
            basis,
            settings,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn basis(&self) -> &SectorBasis {
        &self.basis
    }

    pub fn solve(&self, u: f64) -> Result<SolvedPoint> {
        if u < 0.0 {
            return Err(Error::NegativeCoupling { u });
        }
        let params = HubbardParams::with_coupling(self.sites, u)?;
        let h = build_hamiltonian(&params, &self.basis)?;
        let gs = ground_state(
            &h,
            self.settings.tol,
            self.settings.max_iter,
            self.settings.seed,
        )?;
        let degenerate = gs.converged && degeneracy_check(&gs, self.settings.degeneracy_threshold);
        Ok(SolvedPoint { u, gs, degenerate })
    }

    pub fn ground_point(&self, u: f64) -> Result<GroundPoint> {
        let point = self.solve(u)?;
        Ok(GroundPoint {
            l: self.sites,
            u,
            energy: point.gs.energy,
            gap: point.gs.gap,
            residual: point.gs.residual,
            converged: point.gs.converged,
            degenerate: point.degenerate,
        })
    }
}

fn empty_report(l: usize, i: usize, j: usize, point: &SolvedPoint) -> EntanglementReport {
    EntanglementReport {
        l,
        u: point.u,
        i,
        j,
        tau2: None,
        sqrt_tau2: None,
        pair_entropy: None,
        site_entropy_i: None,
        site_entropy_j: None,
        v_i: None,
        s_up_i: None,
        s_down_i: None,
        d_i: None,
        p_lhfs: None,
        lhfs_amplitudes: None,
        ground_energy: point.gs.energy,
        gap: point.gs.gap,
        residual: point.gs.residual,
        converged: point.gs.converged,
        degenerate: point.degenerate,
    }
}

/// Measure one pair at one solved point. Returns the spectral
/// decomposition alongside when the measure set needs tracked states.
pub fn measure_pair(
    solver: &ChainSolver,
    point: &SolvedPoint,
    i: usize,
    j: usize,
    measures: MeasureSet,
    convention: RdmConvention,
) -> Result<(EntanglementReport, Option<SpectralDecomposition>)> {
    let l = solver.sites();
    let basis = solver.basis();
    let mut report = empty_report(l, i, j, point);
    if point.degenerate || !point.gs.converged {
        return Ok((report, None));
    }

    let pr = convention.pair_rdm(&point.gs, basis, i, j)?;

    if measures.lbc {
        let (tau2, root) = lbc(&pr.to_complex())?;
        report.tau2 = Some(tau2);
        report.sqrt_tau2 = Some(root);
    }
    if measures.pair_entropy {
        report.pair_entropy = Some(von_neumann_entropy(&pr.to_complex())?);
    }
    if measures.site_entropy || measures.occupations {
        let site_i = single_site_rdm(&point.gs, basis, i)?;
        if measures.occupations {
            report.v_i = Some(site_i.vacancy);
            report.s_up_i = Some(site_i.single_up);
            report.s_down_i = Some(site_i.single_down);
            report.d_i = Some(site_i.double);
        }
        if measures.site_entropy {
            let site_j = single_site_rdm(&point.gs, basis, j)?;
            report.site_entropy_i =
                Some(crate::entanglement::shannon_bits(&site_i.probabilities()));
            report.site_entropy_j =
                Some(crate::entanglement::shannon_bits(&site_j.probabilities()));
        }
    }

    let decomp = if measures.lhfs || measures.frozen_lhfs {
        Some(spectral_decomposition(&pr))
    } else {
        None
    };
    Ok((report, decomp))
}

/// Sweep one chain length over an ascending coupling grid.
///
/// Ground states are solved per U; pair measures run in parallel across
/// (pair, U); the half-filled-state tracking then walks each pair's
/// decompositions in grid order. `frozen_ref_u` picks the grid point whose
/// tracked eigenvector is frozen into the mixtures when
/// `measures.frozen_lhfs` is set.
pub fn sweep_chain(
    sites: usize,
    us: &[f64],
    pairs: &[(usize, usize)],
    measures: MeasureSet,
    settings: &SolverSettings,
    frozen_ref_u: f64,
) -> Result<ChainSweep> {
    sweep_chain_with_convention(
        sites,
        us,
        pairs,
        measures,
        settings,
        frozen_ref_u,
        RdmConvention::default(),
    )
}

pub fn sweep_chain_with_convention(
    sites: usize,
    us: &[f64],
    pairs: &[(usize, usize)],
    measures: MeasureSet,
    settings: &SolverSettings,
    frozen_ref_u: f64,
    convention: RdmConvention,
) -> Result<ChainSweep> {
    let solver = ChainSolver::new(sites, *settings)?;
    for &(i, j) in pairs {
        if i == 0 || j > sites || i >= j {
            return Err(Error::SiteOutOfRange {
                site: if j > sites { j } else { i },
                sites,
            });
        }
    }
    let mut points = Vec::with_capacity(us.len());
    for &u in us {
        points.push(solver.solve(u)?);
    }

    // Pair measures, parallel across (pair, U).
    let tasks: Vec<(usize, usize)> = (0..pairs.len())
        .flat_map(|p| (0..points.len()).map(move |k| (p, k)))
        .collect();
    let run = |&(p, k): &(usize, usize)| {
        measure_pair(
            &solver, &points[k], pairs[p].0, pairs[p].1, measures, convention,
        )
    };
    #[cfg(feature = "parallel")]
    let measured: Vec<Result<(EntanglementReport, Option<SpectralDecomposition>)>> = {
        use rayon::prelude::*;
        tasks.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let measured: Vec<Result<(EntanglementReport, Option<SpectralDecomposition>)>> =
        tasks.iter().map(run).collect();

    let mut reports = Vec::with_capacity(tasks.len());
    let mut decomps: Vec<Option<SpectralDecomposition>> = Vec::with_capacity(tasks.len());
    for item in measured {
        let (report, decomp) = item?;
        reports.push(report);
        decomps.push(decomp);
    }

    let mut frozen = Vec::new();
    if measures.lhfs || measures.frozen_lhfs {
        for (p, &(i, j)) in pairs.iter().enumerate() {
            // Tracking runs over the points that actually have a
            // decomposition (degenerate/unconverged ones do not).
            let base = p * points.len();
            let mut tracked_idx = Vec::new();
            let mut tracked_decomps = Vec::new();
            let mut tracked_us = Vec::new();
            for k in 0..points.len() {
                if let Some(d) = &decomps[base + k] {
                    tracked_idx.push(k);
                    tracked_decomps.push(d.clone());
                    tracked_us.push(points[k].u);
                }
            }
            if tracked_decomps.is_empty() {
                continue;
            }
            let records = track_lhfs(&tracked_decomps, &tracked_us)?;
            if measures.lhfs {
                for (slot, record) in tracked_idx.iter().zip(&records) {
                    let report = &mut reports[base + slot];
                    report.p_lhfs = Some(record.probability);
                    report.lhfs_amplitudes = Some(record.amplitudes());
                }
            }
            if measures.frozen_lhfs {
                let ref_pos = tracked_us
                    .iter()
                    .enumerate()
                    .min_by(|a, b| {
                        (a.1 - frozen_ref_u)
                            .abs()
                            .partial_cmp(&(b.1 - frozen_ref_u).abs())
                            .unwrap()
                    })
                    .map(|(pos, _)| pos)
                    .expect("nonempty tracked grid");
                let frozen_vec = records[ref_pos].vector();
                for (pos, record) in records.iter().enumerate() {
                    let state = crate::entanglement::frozen_lhfs_state(
                        &tracked_decomps[pos],
                        record.eigen_index,
                        &frozen_vec,
                    );
                    let (frozen_tau2, frozen_sqrt_tau2) =
                        lbc(&state.map(|x| nalgebra::Complex::new(x, 0.0)))?;
                    let (lhfs_tau2, lhfs_sqrt_tau2) =
                        pure_state_lbc(&record.vector().map(|x| nalgebra::Complex::new(x, 0.0)))?;
                    frozen.push(FrozenRecord {
                        l: sites,
                        u: tracked_us[pos],
                        i,
                        j,
                        frozen_tau2,
                        frozen_sqrt_tau2,
                        lhfs_tau2,
                        lhfs_sqrt_tau2,
                    });
                }
            }
        }
    }

    reports.sort_by(|a, b| {
        a.u.partial_cmp(&b.u)
            .unwrap()
            .then(a.i.cmp(&b.i))
            .then(a.j.cmp(&b.j))
    });
    frozen.sort_by(|a, b| {
        a.u.partial_cmp(&b.u)
            .unwrap()
            .then(a.i.cmp(&b.i))
            .then(a.j.cmp(&b.j))
    });
    Ok(ChainSweep { reports, frozen })
}

/// Every pair (i, j) with 1 <= i < j <= L.
pub fn all_pairs(sites: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for i in 1..=sites {
        for j in (i + 1)..=sites {
            pairs.push((i, j));
        }
    }
    pairs
}
