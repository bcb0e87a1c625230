//! Entanglement functionals for ququart pairs and qubit chains: von Neumann
//! entropy, the d = 4 lower bound of concurrence, Wootters concurrence,
//! spectral decomposition with tracking of the dominant half-filled pair
//! state, the frozen-state construction, confinement-state projection, and
//! the four-tangle.
//!
//! Density-matrix inputs are complex for generality even though the chain
//! ground states produce real symmetric matrices.

use nalgebra::{Complex, DMatrix, DVector};

use crate::eigen::GroundState;
use crate::fock::{SectorBasis, Spin};
use crate::rdm::{pair_block_labels, PairRDM, HALF_FILLED_BLOCK};
use crate::{Error, Result};

pub type C64 = Complex<f64>;

/// Eigenvalues of a density matrix below this are a hard error; anything
/// between it and zero is clamped as float round-off.
const NEGATIVITY_FLOOR: f64 = -1e-8;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// The d(d-1)/2 Hermitian generators G_(m,n) = -i(|m><n| - |n><m|) of
/// SO(d) rotations used by the lower bound of concurrence.
pub struct GeneratorSet {
    d: usize,
    matrices: Vec<DMatrix<C64>>,
}

impl GeneratorSet {
    pub fn new(d: usize) -> Self {
        let mut matrices = Vec::with_capacity(d * (d - 1) / 2);
        for m in 0..d {
            for n in (m + 1)..d {
                let mut g = DMatrix::zeros(d, d);
                g[(m, n)] = C64::new(0.0, -1.0);
                g[(n, m)] = C64::new(0.0, 1.0);
                matrices.push(g);
            }
        }
        Self { d, matrices }
    }

    /// Real antisymmetric alternative L_(m,n) = |m><n| - |n><m|; the factors
    /// of i cancel inside (G x G) rho* (G x G), so both conventions give the
    /// same bound (checked by a test).
    pub fn antisymmetric(d: usize) -> Self {
        let mut matrices = Vec::with_capacity(d * (d - 1) / 2);
        for m in 0..d {
            for n in (m + 1)..d {
                let mut g = DMatrix::zeros(d, d);
                g[(m, n)] = c(1.0);
                g[(n, m)] = c(-1.0);
                matrices.push(g);
            }
        }
        Self { d, matrices }
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn matrices(&self) -> &[DMatrix<C64>] {
        &self.matrices
    }
}

fn check_trace_one(rho: &DMatrix<C64>) -> Result<()> {
    let trace = rho.trace().re;
    if (trace - 1.0).abs() > 1e-8 {
        return Err(Error::TraceNotOne { trace });
    }
    Ok(())
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix. Returns unsorted
/// eigenvalues with their eigenvector columns.
///
/// The general-purpose QL solver can emit NaN on the rank-deficient,
/// exactly-structured matrices this module produces (conjugated rank-one
/// projectors); two-sided rotations have no such failure mode and are
/// plenty fast at d <= 16.
fn jacobi_hermitian(a: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = a.nrows();
    let mut m = a.clone();
    let mut vecs = DMatrix::<C64>::identity(n, n);
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);

    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m[(p, q)].norm());
            }
        }
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let b = m[(p, q)];
                let abs_b = b.norm();
                if abs_b <= 1e-18 * scale {
                    continue;
                }
                let phase = b / c(abs_b);
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let tau = (aqq - app) / (2.0 * abs_b);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cos = 1.0 / (1.0 + t * t).sqrt();
                let sin = t * cos;

                // R[p][p] = cos, R[p][q] = sin phase, R[q][p] = -sin phase*,
                // R[q][q] = cos; apply M <- R† M R and V <- V R.
                let rpq = c(sin) * phase;
                let rqp = -c(sin) * phase.conj();
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = mkp * c(cos) + mkq * rqp;
                    m[(k, q)] = mkp * rpq + mkq * c(cos);
                    let vkp = vecs[(k, p)];
                    let vkq = vecs[(k, q)];
                    vecs[(k, p)] = vkp * c(cos) + vkq * rqp;
                    vecs[(k, q)] = vkp * rpq + vkq * c(cos);
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = mpk * c(cos) + mqk * rqp.conj();
                    m[(q, k)] = mpk * rpq.conj() + mqk * c(cos);
                }
            }
        }
    }
    let values = (0..n).map(|k| m[(k, k)].re).collect();
    (values, vecs)
}

/// Eigenvalues of a Hermitian matrix, descending.
fn hermitian_eigenvalues_desc(m: &DMatrix<C64>) -> Vec<f64> {
    let (mut ev, _) = jacobi_hermitian(m);
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ev
}

/// Hermitian square root with round-off clamping; errors on eigenvalues
/// below the negativity floor.
fn hermitian_sqrt(rho: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let (values, vecs) = jacobi_hermitian(rho);
    let n = rho.nrows();
    let mut diag = DMatrix::<C64>::zeros(n, n);
    for (k, &lam) in values.iter().enumerate() {
        if lam < NEGATIVITY_FLOOR {
            return Err(Error::NegativeEigenvalue { eigenvalue: lam });
        }
        diag[(k, k)] = c(lam.max(0.0).sqrt());
    }
    Ok(&vecs * diag * vecs.adjoint())
}

/// -Tr(rho log2 rho) in bits, with 0 log 0 := 0.
pub fn von_neumann_entropy(rho: &DMatrix<C64>) -> Result<f64> {
    check_trace_one(rho)?;
    let (values, _) = jacobi_hermitian(rho);
    let mut bits = 0.0;
    for lam in values {
        if lam < NEGATIVITY_FLOOR {
            return Err(Error::NegativeEigenvalue { eigenvalue: lam });
        }
        if lam > 0.0 {
            bits -= lam * lam.log2();
        }
    }
    Ok(bits)
}

/// Entropy of a classical probability vector, in bits.
pub fn shannon_bits(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Half-filling single-site entropy as a function of the double-occupancy
/// probability: -2 d log2 d - 2 (1/2 - d) log2 (1/2 - d).
pub fn local_entropy_from_d(d: f64) -> Result<f64> {
    if !(-1e-12..=0.5 + 1e-12).contains(&d) {
        return Err(Error::ProbabilityOutOfRange { value: d });
    }
    let d = d.clamp(0.0, 0.5);
    let term = |p: f64| if p > 0.0 { -2.0 * p * p.log2() } else { 0.0 };
    Ok(term(d) + term(0.5 - d))
}

/// One C_ab = max(0, l1 - l2 - l3 - l4) where l are the square roots of the
/// eigenvalues of rho * rho_tilde, computed through the similar Hermitian
/// matrix sqrt(rho) rho_tilde sqrt(rho).
fn concurrence_component(
    sqrt_rho: &DMatrix<C64>,
    rho_conj: &DMatrix<C64>,
    k: &DMatrix<C64>,
) -> Result<f64> {
    let rho_tilde = k * rho_conj * k;
    let m = sqrt_rho * rho_tilde * sqrt_rho;
    let evs = hermitian_eigenvalues_desc(&m);
    // Eigenvalues at relative round-off scale would blow up to ~1e-8 under
    // the square root; treat them as exact zeros.
    let cutoff = evs[0].max(0.0) * 1e-13;
    let mut lambdas = Vec::with_capacity(4);
    for lam in evs {
        if lam < NEGATIVITY_FLOOR {
            return Err(Error::NegativeEigenvalue { eigenvalue: lam });
        }
        let lam = if lam < cutoff { 0.0 } else { lam };
        lambdas.push(lam.sqrt());
    }
    // Rank of the conjugation is at most 4; missing eigenvalues are 0.
    let l = |i: usize| lambdas.get(i).copied().unwrap_or(0.0);
    Ok((l(0) - l(1) - l(2) - l(3)).max(0.0))
}

fn lbc_with_generators(rho: &DMatrix<C64>, gens: &GeneratorSet) -> Result<(f64, f64)> {
    check_trace_one(rho)?;
    let d = gens.dimension();
    let sqrt_rho = hermitian_sqrt(rho)?;
    let rho_conj = rho.conjugate();
    let mut sum = 0.0;
    for ga in gens.matrices() {
        for gb in gens.matrices() {
            let k = ga.kronecker(gb);
            let comp = concurrence_component(&sqrt_rho, &rho_conj, &k)?;
            sum += comp * comp;
        }
    }
    let tau2 = d as f64 / (2.0 * (d as f64 - 1.0)) * sum;
    Ok((tau2, tau2.sqrt()))
}

/// Lower bound of concurrence for a 16x16 ququart-pair state: returns
/// (tau2, sqrt(tau2)). tau2 sums max(0, l1 - l2 - l3 - l4)^2 over all 36
/// ordered generator pairs, scaled by d / (2 (d - 1)) = 2/3.
pub fn lbc(rho: &DMatrix<C64>) -> Result<(f64, f64)> {
    lbc_with_generators(rho, &GeneratorSet::new(4))
}

/// [`lbc`] applied to the projector of a pure 16-amplitude state.
pub fn pure_state_lbc(psi: &DVector<C64>) -> Result<(f64, f64)> {
    let rho = psi * psi.adjoint();
    lbc(&rho)
}

/// Standard two-qubit concurrence: max(0, l1 - l2 - l3 - l4) with
/// rho_tilde = (sigma_y x sigma_y) rho* (sigma_y x sigma_y).
pub fn wootters_concurrence(rho: &DMatrix<C64>) -> Result<f64> {
    check_trace_one(rho)?;
    let i = C64::new(0.0, 1.0);
    let mut sy = DMatrix::<C64>::zeros(2, 2);
    sy[(0, 1)] = -i;
    sy[(1, 0)] = i;
    let k = sy.kronecker(&sy);
    let sqrt_rho = hermitian_sqrt(rho)?;
    concurrence_component(&sqrt_rho, &rho.conjugate(), &k)
}

/// Eigendecomposition of a pair RDM, computed blockwise per (N, 2 S_z) and
/// ordered by descending probability (ties: N, then 2 S_z, then
/// lexicographic vector comparison).
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Unit eigenvectors in the 16-dimensional pair basis, sign-fixed so the
    /// largest-magnitude component is positive.
    pub vectors: Vec<DVector<f64>>,
    /// (N, 2 S_z) block of each eigenvector.
    pub labels: Vec<(u8, i8)>,
}

impl SpectralDecomposition {
    /// sum_k P_k |psi_k><psi_k|
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(16, 16);
        for (p, v) in self.eigenvalues.iter().zip(&self.vectors) {
            m += *p * v * v.transpose();
        }
        m
    }

    /// Indices of eigenvectors in the (N = 2, S_z = 0) block, in stored
    /// order.
    pub fn half_filled_block_indices(&self) -> Vec<usize> {
        (0..self.labels.len())
            .filter(|&k| self.labels[k] == (2, 0))
            .collect()
    }
}

pub fn spectral_decomposition(pr: &PairRDM) -> SpectralDecomposition {
    let labels = pair_block_labels();
    let mut blocks: Vec<((u8, i8), Vec<usize>)> = Vec::new();
    for idx in 0..16 {
        match blocks.iter_mut().find(|(lab, _)| *lab == labels[idx]) {
            Some((_, v)) => v.push(idx),
            None => blocks.push((labels[idx], vec![idx])),
        }
    }

    let mut trips: Vec<(f64, DVector<f64>, (u8, i8))> = Vec::with_capacity(16);
    for (label, members) in blocks {
        let n = members.len();
        let mut sub = DMatrix::<C64>::zeros(n, n);
        for (r, &ir) in members.iter().enumerate() {
            for (col, &ic) in members.iter().enumerate() {
                sub[(r, col)] = c(pr.matrix()[(ir, ic)]);
            }
        }
        // Real input: the Jacobi rotations stay real, so the eigenvectors
        // come back with zero imaginary parts.
        let (values, vecs) = jacobi_hermitian(&sub);
        for k in 0..n {
            let mut full = vec![0.0; 16];
            for (r, &ir) in members.iter().enumerate() {
                full[ir] = vecs[(r, k)].re;
            }
            crate::eigen::sign_fix(&mut full);
            trips.push((values[k], DVector::from_vec(full), label));
        }
    }

    trips.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap()
            .then_with(|| a.2.cmp(&b.2))
            .then_with(|| {
                for (x, y) in a.1.iter().zip(b.1.iter()) {
                    match x.partial_cmp(y).unwrap() {
                        std::cmp::Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                std::cmp::Ordering::Equal
            })
    });

    SpectralDecomposition {
        eigenvalues: trips.iter().map(|t| t.0).collect(),
        vectors: trips.iter().map(|t| t.1.clone()).collect(),
        labels: trips.iter().map(|t| t.2).collect(),
    }
}

/// Amplitudes and probability of the tracked half-filled pair state at one
/// coupling value. Amplitudes (alpha, beta, gamma, delta) sit on
/// (|up,down>, |down,up>, |updown,0>, |0,updown>).
#[derive(Clone, Copy, Debug)]
pub struct LHFSRecord {
    pub u: f64,
    pub probability: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    /// Position of the tracked eigenvector inside its decomposition.
    pub eigen_index: usize,
}

impl LHFSRecord {
    pub fn amplitudes(&self) -> [f64; 4] {
        [self.alpha, self.beta, self.gamma, self.delta]
    }

    /// Full 16-dimensional vector of the tracked state.
    pub fn vector(&self) -> DVector<f64> {
        let mut v = DVector::zeros(16);
        for (&idx, &a) in HALF_FILLED_BLOCK.iter().zip(&self.amplitudes()) {
            v[idx] = a;
        }
        v
    }
}

/// Follow the half-filled (N = 2, S_z = 0) eigenstate across an ascending
/// coupling grid: at the first point it is the block eigenvector of highest
/// probability, afterwards the block eigenvector of maximal overlap with
/// the previous one (sign-aligned for continuity). An overlap below 0.5 is
/// a tracking discontinuity and is reported, not guessed through.
pub fn track_lhfs(decomps: &[SpectralDecomposition], us: &[f64]) -> Result<Vec<LHFSRecord>> {
    assert_eq!(decomps.len(), us.len());
    let mut records = Vec::with_capacity(decomps.len());
    let mut prev: Option<DVector<f64>> = None;
    for (decomp, &u) in decomps.iter().zip(us) {
        let block = decomp.half_filled_block_indices();
        let chosen = match &prev {
            // Decompositions are sorted by descending probability, so the
            // first block member has the highest P.
            None => block[0],
            Some(p) => {
                let mut best = block[0];
                let mut best_overlap = f64::NEG_INFINITY;
                for &k in &block {
                    let overlap = p.dot(&decomp.vectors[k]).abs();
                    if overlap > best_overlap {
                        best_overlap = overlap;
                        best = k;
                    }
                }
                if best_overlap < 0.5 {
                    return Err(Error::TrackingDiscontinuity {
                        u,
                        overlap: best_overlap,
                    });
                }
                best
            }
        };
        let mut v = decomp.vectors[chosen].clone();
        if let Some(p) = &prev {
            if p.dot(&v) < 0.0 {
                v = -v;
            }
        }
        records.push(LHFSRecord {
            u,
            probability: decomp.eigenvalues[chosen],
            alpha: v[HALF_FILLED_BLOCK[0]],
            beta: v[HALF_FILLED_BLOCK[1]],
            gamma: v[HALF_FILLED_BLOCK[2]],
            delta: v[HALF_FILLED_BLOCK[3]],
            eigen_index: chosen,
        });
        prev = Some(v);
    }
    Ok(records)
}

/// Rebuild sum_k P_k |psi_k><psi_k| with the eigenvector at `lhfs_index`
/// replaced by `frozen`, keeping every probability. Each projector has unit
/// trace, so the trace stays exactly 1 and the result stays positive
/// semidefinite.
pub fn frozen_lhfs_state(
    decomp: &SpectralDecomposition,
    lhfs_index: usize,
    frozen: &DVector<f64>,
) -> DMatrix<f64> {
    debug_assert!((frozen.norm() - 1.0).abs() < 1e-8, "frozen vector not unit");
    let mut m = DMatrix::zeros(16, 16);
    for (k, (p, v)) in decomp.eigenvalues.iter().zip(&decomp.vectors).enumerate() {
        let w = if k == lhfs_index { frozen } else { v };
        m += *p * w * w.transpose();
    }
    m
}

/// Renormalized restriction of a half-filling ground state to the
/// one-electron-per-site subspace, indexed by spin pattern (site 1 is the
/// most significant bit, spin-up = 1).
#[derive(Clone, Debug)]
pub struct SpinProjection {
    pub amplitudes: Vec<f64>,
    /// Weight discarded by the restriction.
    pub leakage: f64,
}

impl SpinProjection {
    pub fn qubits(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }

    pub fn to_complex(&self) -> DVector<C64> {
        DVector::from_iterator(self.amplitudes.len(), self.amplitudes.iter().map(|&x| c(x)))
    }
}

/// Project the ground state onto the confinement (singly occupied)
/// subspace. Errors when the sector is not half filling or when more than
/// half the weight leaks away.
pub fn project_to_spin_state(gs: &GroundState, basis: &SectorBasis) -> Result<SpinProjection> {
    let sector = basis.sector();
    let sites = sector.sites();
    if sector.n_up() != sector.n_down() || sector.n_up() * 2 != sites {
        return Err(Error::NotHalfFilling {
            sites,
            n_up: sector.n_up(),
            n_down: sector.n_down(),
        });
    }
    if gs.vector.len() != basis.len() {
        return Err(Error::LengthMismatch {
            expected: basis.len(),
            got: gs.vector.len(),
        });
    }
    let full_mask = (1u32 << sites) - 1;
    let mut amplitudes = vec![0.0; 1 << sites];
    let mut kept = 0.0;
    for (k, state) in basis.iter().enumerate() {
        if state.up & state.down == 0 && state.up | state.down == full_mask {
            let mut idx = 0usize;
            // Reordering parity between the spin-block mode order and the
            // site-major order defining the spin-pattern kets: each down
            // electron crosses every up electron on a later site.
            let mut crossings = 0u32;
            for site in 1..=sites {
                idx <<= 1;
                if state.occupied(site, Spin::Up) {
                    idx |= 1;
                } else {
                    crossings += (state.up >> site).count_ones();
                }
            }
            let amp = if crossings % 2 == 0 {
                gs.vector[k]
            } else {
                -gs.vector[k]
            };
            amplitudes[idx] = amp;
            kept += amp * amp;
        }
    }
    let leakage = 1.0 - kept;
    if leakage > 0.5 {
        return Err(Error::NotConfined { leakage });
    }
    // Renormalize only; the global sign is inherited from the ground
    // vector's own convention, so confined inputs pass through unchanged.
    let norm = kept.sqrt();
    for a in &mut amplitudes {
        *a /= norm;
    }
    Ok(SpinProjection {
        amplitudes,
        leakage,
    })
}

/// Two-qubit reduced density matrix of qubits (i, j) of a pure spin-chain
/// state (plain qudit partial trace; no fermionic signs apply to spins).
pub fn qubit_pair_rdm(amplitudes: &[f64], qubits: usize, i: usize, j: usize) -> DMatrix<C64> {
    assert!(i >= 1 && j >= 1 && i < j && j <= qubits);
    let bit = |idx: usize, site: usize| idx >> (qubits - site) & 1;
    let rest_mask: usize = !((1 << (qubits - i)) | (1 << (qubits - j))) & ((1 << qubits) - 1);
    let mut rho = DMatrix::<C64>::zeros(4, 4);
    for (x, &ax) in amplitudes.iter().enumerate() {
        if ax == 0.0 {
            continue;
        }
        let row = 2 * bit(x, i) + bit(x, j);
        for (y, &ay) in amplitudes.iter().enumerate() {
            if ay == 0.0 || (x & rest_mask) != (y & rest_mask) {
                continue;
            }
            let col = 2 * bit(y, i) + bit(y, j);
            rho[(row, col)] += c(ax * ay);
        }
    }
    rho
}

/// Four-qubit tangle |<psi*| sigma_y^x4 |psi>|^2. With the basis flip
/// sigma_y^x4 |b> = (-1)^popcount(b) |~b>, this is
/// |sum_x (-1)^popcount(x) psi_x psi_(~x)|^2.
pub fn four_tangle(psi: &DVector<C64>) -> f64 {
    assert_eq!(psi.len(), 16);
    let mut acc = C64::new(0.0, 0.0);
    for x in 0..16usize {
        let sign = if x.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        acc += c(sign) * psi[x] * psi[15 - x];
    }
    acc.norm_sqr()
}

/// Coefficients of the generic four-qubit family
/// (z0+z3)/2 (|0000>+|1111>) + (z0-z3)/2 (|0011>+|1100>)
/// + (z1+z2)/2 (|0101>+|1010>) + (z1-z2)/2 (|0110>+|1001>).
#[derive(Clone, Debug)]
pub struct GenericFourQubitState {
    pub z: [C64; 4],
    /// Projection of the input onto the family pattern.
    pub amplitudes: DVector<C64>,
    /// Distance from the input to its pattern projection; above ~1e-6 the
    /// state is not a member (no local-unitary search is attempted).
    pub residual: f64,
}

impl GenericFourQubitState {
    /// |sum z_i^2|^2, the four-tangle of an exact family member.
    pub fn tangle_from_coefficients(&self) -> f64 {
        self.z.iter().map(|zi| zi * zi).sum::<C64>().norm_sqr()
    }
}

const FAMILY_PAIRS: [(usize, usize); 4] = [(0, 15), (3, 12), (5, 10), (6, 9)];

/// Read the family coefficients off the eight patterned amplitudes.
pub fn fit_generic_family(psi: &DVector<C64>) -> GenericFourQubitState {
    assert_eq!(psi.len(), 16);
    let mut coeffs = [C64::new(0.0, 0.0); 4];
    let mut amplitudes = DVector::zeros(16);
    let mut residual_sq = 0.0;
    let mut patterned = [false; 16];
    for (k, &(p, q)) in FAMILY_PAIRS.iter().enumerate() {
        let avg = (psi[p] + psi[q]) / c(2.0);
        coeffs[k] = avg;
        amplitudes[p] = avg;
        amplitudes[q] = avg;
        patterned[p] = true;
        patterned[q] = true;
        residual_sq += (psi[p] - psi[q]).norm_sqr() / 2.0;
    }
    for x in 0..16 {
        if !patterned[x] {
            residual_sq += psi[x].norm_sqr();
        }
    }
    let z = [
        coeffs[0] + coeffs[1],
        coeffs[2] + coeffs[3],
        coeffs[2] - coeffs[3],
        coeffs[0] - coeffs[1],
    ];
    GenericFourQubitState {
        z,
        amplitudes,
        residual: residual_sq.sqrt(),
    }
}

/// Total-spin operator S^2 of a site pair in the 16-dimensional ququart
/// basis; used to confirm block labels a posteriori.
pub fn pair_s_squared() -> DMatrix<f64> {
    let mut sz = DMatrix::zeros(4, 4);
    sz[(1, 1)] = 0.5;
    sz[(2, 2)] = -0.5;
    let mut sp = DMatrix::zeros(4, 4);
    sp[(1, 2)] = 1.0; // |up><down|
    let sm = sp.transpose();
    let mut s2_local = DMatrix::zeros(4, 4);
    s2_local[(1, 1)] = 0.75;
    s2_local[(2, 2)] = 0.75;
    let id = DMatrix::<f64>::identity(4, 4);

    s2_local.kronecker(&id)
        + id.kronecker(&s2_local)
        + 2.0 * sz.kronecker(&sz)
        + sp.kronecker(&sm)
        + sm.kronecker(&sp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::dense_ground_state;
    use crate::fock::{enumerate_sector, Sector};
    use crate::hamiltonian::{build_hamiltonian, HubbardParams};
    use crate::rdm::{pair_rdm, single_site_rdm};
    use crate::rng::SplitMix64;

    fn ground(l: usize, u: f64) -> (GroundState, SectorBasis) {
        let params = HubbardParams::new(l, 1.0, u).unwrap();
        let basis = enumerate_sector(Sector::half_filling(l).unwrap());
        let h = build_hamiltonian(&params, &basis).unwrap();
        (dense_ground_state(&h).unwrap(), basis)
    }

    fn random_pure(rng: &mut SplitMix64, dim: usize) -> DVector<C64> {
        let v = DVector::from_iterator(
            dim,
            (0..dim).map(|_| C64::new(rng.gaussian(), rng.gaussian())),
        );
        let n = v.norm();
        v / c(n)
    }

    fn random_density(rng: &mut SplitMix64, dim: usize) -> DMatrix<C64> {
        let g = DMatrix::from_fn(dim, dim, |_, _| C64::new(rng.gaussian(), rng.gaussian()));
        let rho = &g * g.adjoint();
        let tr = rho.trace().re;
        rho / c(tr)
    }

    /// Embed a two-qubit state into levels {1, 2} of each ququart.
    fn embed_two_qubit(rho: &DMatrix<C64>) -> DMatrix<C64> {
        let map = |q: usize| 1 + q;
        let mut out = DMatrix::zeros(16, 16);
        for r in 0..4 {
            for col in 0..4 {
                let (r1, r2) = (r / 2, r % 2);
                let (c1, c2) = (col / 2, col % 2);
                out[(4 * map(r1) + map(r2), 4 * map(c1) + map(c2))] = rho[(r, col)];
            }
        }
        out
    }

    fn bell_state() -> DMatrix<C64> {
        let mut psi = DVector::<C64>::zeros(4);
        psi[0] = c(1.0 / 2.0f64.sqrt());
        psi[3] = c(1.0 / 2.0f64.sqrt());
        &psi * psi.adjoint()
    }

    #[test]
    fn generators_are_hermitian_traceless_rank_two() {
        let gens = GeneratorSet::new(4);
        assert_eq!(gens.matrices().len(), 6);
        for g in gens.matrices() {
            assert!((g - g.adjoint()).norm() < 1e-15);
            assert!(g.trace().norm() < 1e-15);
            let evs = hermitian_eigenvalues_desc(g);
            assert!((evs[0] - 1.0).abs() < 1e-12);
            assert!((evs[3] + 1.0).abs() < 1e-12);
            assert!(evs[1].abs() < 1e-12 && evs[2].abs() < 1e-12);
            // G^2 projects onto span{|m>, |n>}.
            let g2 = g * g;
            let evs2 = hermitian_eigenvalues_desc(&g2);
            assert!((evs2[0] - 1.0).abs() < 1e-12 && (evs2[1] - 1.0).abs() < 1e-12);
            assert!(evs2[2].abs() < 1e-12 && evs2[3].abs() < 1e-12);
        }
    }

    #[test]
    fn both_generator_conventions_agree() {
        let mut rng = SplitMix64::new(21);
        let rho = random_density(&mut rng, 16);
        let a = lbc_with_generators(&rho, &GeneratorSet::new(4)).unwrap();
        let b = lbc_with_generators(&rho, &GeneratorSet::antisymmetric(4)).unwrap();
        assert!((a.0 - b.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_examples() {
        let mixed = DMatrix::<C64>::identity(4, 4) / c(4.0);
        assert!((von_neumann_entropy(&mixed).unwrap() - 2.0).abs() < 1e-12);

        let mut pure = DMatrix::<C64>::zeros(4, 4);
        pure[(2, 2)] = c(1.0);
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-12);

        let bad = DMatrix::<C64>::identity(4, 4);
        assert!(matches!(
            von_neumann_entropy(&bad),
            Err(Error::TraceNotOne { .. })
        ));
    }

    #[test]
    fn local_entropy_curve() {
        assert!((local_entropy_from_d(0.25).unwrap() - 2.0).abs() < 1e-12);
        assert!((local_entropy_from_d(0.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((local_entropy_from_d(0.5).unwrap() - 1.0).abs() < 1e-12);
        assert!(local_entropy_from_d(0.6).is_err());
        assert!(local_entropy_from_d(-0.1).is_err());
    }

    #[test]
    fn local_entropy_matches_site_rdm_at_half_filling() {
        let (gs, basis) = ground(4, 3.0);
        for site in 1..=4 {
            let r = single_site_rdm(&gs, &basis, site).unwrap();
            let direct = von_neumann_entropy(&r.to_matrix().map(c)).unwrap();
            let formula = local_entropy_from_d(r.double).unwrap();
            assert!((direct - formula).abs() < 1e-12, "site {site}");
        }
    }

    #[test]
    fn lbc_product_state_is_zero() {
        let mut rho = DMatrix::<C64>::zeros(16, 16);
        rho[(0, 0)] = c(1.0);
        let (tau2, root) = lbc(&rho).unwrap();
        assert!(tau2.abs() < 1e-14);
        assert!(root.abs() < 1e-14);
    }

    #[test]
    fn lbc_reduces_to_wootters_on_embedded_states() {
        // Pure Bell pair first: C = 1 so tau2 = 2/3.
        let embedded = embed_two_qubit(&bell_state());
        let (tau2, _) = lbc(&embedded).unwrap();
        assert!((tau2 - 2.0 / 3.0).abs() < 1e-10, "{tau2}");

        let mut rng = SplitMix64::new(33);
        for _ in 0..5 {
            let rho = random_density(&mut rng, 4);
            let cw = wootters_concurrence(&rho).unwrap();
            let (tau2, _) = lbc(&embed_two_qubit(&rho)).unwrap();
            assert!(
                (tau2 - 2.0 / 3.0 * cw * cw).abs() < 1e-10,
                "{tau2} vs {}",
                2.0 / 3.0 * cw * cw
            );
        }
    }

    #[test]
    fn lbc_bounded_by_pure_state_concurrence() {
        // Maximally entangled ququart pair: C^2 = 2 (1 - 1/4) = 3/2.
        let mut psi = DVector::<C64>::zeros(16);
        for k in 0..4 {
            psi[4 * k + k] = c(0.5);
        }
        let (tau2, _) = pure_state_lbc(&psi).unwrap();
        assert!(tau2 <= 1.5 + 1e-10);
        assert!(tau2 > 0.5);

        let mut rng = SplitMix64::new(55);
        for _ in 0..5 {
            let psi = random_pure(&mut rng, 16);
            let (tau2, _) = pure_state_lbc(&psi).unwrap();
            // C^2 = 2 (1 - Tr rho_A^2)
            let mut rho_a = DMatrix::<C64>::zeros(4, 4);
            for a in 0..4 {
                for a2 in 0..4 {
                    for b in 0..4 {
                        rho_a[(a, a2)] += psi[4 * a + b] * psi[4 * a2 + b].conj();
                    }
                }
            }
            let c_sq = 2.0 * (1.0 - (&rho_a * &rho_a).trace().re);
            assert!(tau2 <= c_sq + 1e-10, "{tau2} vs {c_sq}");
        }
    }

    #[test]
    fn lbc_invariant_under_symmetric_level_permutation() {
        let mut rng = SplitMix64::new(77);
        let rho = random_density(&mut rng, 16);
        let (tau2, _) = lbc(&rho).unwrap();
        // Permute ququart levels (0 1 2 3) -> (2 0 3 1) on both subsystems.
        let perm = [2usize, 0, 3, 1];
        let mut p = DMatrix::<C64>::zeros(4, 4);
        for (from, &to) in perm.iter().enumerate() {
            p[(to, from)] = c(1.0);
        }
        let pp = p.kronecker(&p);
        let permuted = &pp * &rho * pp.adjoint();
        let (tau2_perm, _) = lbc(&permuted).unwrap();
        assert!((tau2 - tau2_perm).abs() < 1e-10);
    }

    #[test]
    fn lbc_rejects_malformed_density() {
        // Trace stays 1 but one eigenvalue goes firmly negative.
        let mut rho = DMatrix::<C64>::identity(16, 16) / c(16.0);
        rho[(0, 0)] = c(1.0 / 16.0 - 0.3);
        rho[(1, 1)] = c(1.0 / 16.0 + 0.3);
        assert!(matches!(lbc(&rho), Err(Error::NegativeEigenvalue { .. })));
    }

    #[test]
    fn wootters_examples() {
        assert!((wootters_concurrence(&bell_state()).unwrap() - 1.0).abs() < 1e-12);
        let mut product = DMatrix::<C64>::zeros(4, 4);
        product[(0, 0)] = c(1.0);
        assert!(wootters_concurrence(&product).unwrap().abs() < 1e-12);
    }

    #[test]
    fn entropy_is_concave() {
        let mut rng = SplitMix64::new(91);
        for _ in 0..5 {
            let a = random_density(&mut rng, 4);
            let b = random_density(&mut rng, 4);
            let mix = (&a + &b) / c(2.0);
            let lhs = von_neumann_entropy(&mix).unwrap();
            let rhs =
                0.5 * von_neumann_entropy(&a).unwrap() + 0.5 * von_neumann_entropy(&b).unwrap();
            assert!(lhs >= rhs - 1e-10);
        }
    }

    #[test]
    fn spectral_decomposition_of_pure_state() {
        let (gs, basis) = ground(2, 1.0);
        let pr = pair_rdm(&gs, &basis, 1, 2).unwrap();
        let decomp = spectral_decomposition(&pr);
        assert!((decomp.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert_eq!(decomp.labels[0], (2, 0));
        assert!((decomp.eigenvalues.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let back = decomp.reconstruct();
        assert!((&back - pr.matrix()).abs().max() < 1e-12);
    }

    #[test]
    fn spectral_decomposition_ties_are_deterministic() {
        let pr = PairRDM::from_parts((1, 2), DMatrix::identity(16, 16) / 16.0);
        let a = spectral_decomposition(&pr);
        let b = spectral_decomposition(&pr);
        for k in 0..16 {
            assert_eq!(a.eigenvalues[k], b.eigenvalues[k]);
            assert_eq!(a.labels[k], b.labels[k]);
            assert_eq!(a.vectors[k], b.vectors[k]);
        }
        // Ties broken by ascending (N, 2 S_z).
        assert_eq!(a.labels[0], (0, 0));
        assert!((a.eigenvalues.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn l4_free_top_eigenvector_is_half_filled_block() {
        let (gs, basis) = ground(4, 0.0);
        let pr = pair_rdm(&gs, &basis, 1, 2).unwrap();
        let decomp = spectral_decomposition(&pr);
        assert!(decomp.eigenvalues[0] > 0.8);
        assert_eq!(decomp.labels[0], (2, 0));
    }

    #[test]
    fn dimer_lhfs_amplitudes() {
        let (gs, basis) = ground(2, 0.0);
        let pr = pair_rdm(&gs, &basis, 1, 2).unwrap();
        let decomp = spectral_decomposition(&pr);
        let records = track_lhfs(&[decomp], &[0.0]).unwrap();
        let r = records[0];
        assert!((r.probability - 1.0).abs() < 1e-12);
        // (1/2, -1/2, 1/2, 1/2) up to global sign.
        let expect = [0.5, -0.5, 0.5, 0.5];
        let sign = if r.alpha >= 0.0 { 1.0 } else { -1.0 };
        for (a, e) in r.amplitudes().iter().zip(expect) {
            assert!((a - sign * e).abs() < 1e-12, "{:?}", r.amplitudes());
        }
        let norm: f64 = r.amplitudes().iter().map(|a| a * a).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lhfs_probability_grows_with_coupling() {
        let us = [0.0, 1.0, 2.0, 4.0, 8.0];
        let mut decomps = Vec::new();
        for &u in &us {
            let (gs, basis) = ground(4, u);
            let pr = pair_rdm(&gs, &basis, 1, 2).unwrap();
            decomps.push(spectral_decomposition(&pr));
        }
        let records = track_lhfs(&decomps, &us).unwrap();
        for w in records.windows(2) {
            assert!(w[1].probability >= w[0].probability - 1e-12);
        }
    }

    #[test]
    fn lhfs_vector_is_spin_singlet() {
        let (gs, basis) = ground(4, 2.0);
        let pr = pair_rdm(&gs, &basis, 1, 2).unwrap();
        let decomp = spectral_decomposition(&pr);
        let records = track_lhfs(&[decomp.clone()], &[2.0]).unwrap();
        let k = records[0].eigen_index;
        let s2 = pair_s_squared();
        let v = &decomp.vectors[k];
        assert!((&s2 * v).norm() < 1e-10);
        // The (N = 2, 2 S_z = 2) basis states are triplets: S^2 = 2.
        let labels = pair_block_labels();
        for idx in 0..16 {
            if labels[idx] == (2, 2) {
                let mut e = DVector::zeros(16);
                e[idx] = 1.0;
                assert!(((&s2 * &e) - 2.0 * &e).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn frozen_state_identity_replacement_recovers_input() {
        let (gs, basis) = ground(4, 3.0);
        let pr = pair_rdm(&gs, &basis, 1, 2).unwrap();
        let decomp = spectral_decomposition(&pr);
        let records = track_lhfs(&[decomp.clone()], &[3.0]).unwrap();
        let k = records[0].eigen_index;
        let frozen = frozen_lhfs_state(&decomp, k, &decomp.vectors[k]);
        assert!((&frozen - pr.matrix()).abs().max() < 1e-12);
        assert!((frozen.trace() - 1.0).abs() < 1e-12);

        // At the reference coupling the bound is unchanged.
        let (t_orig, _) = lbc(&pr.to_complex()).unwrap();
        let (t_frozen, _) = lbc(&frozen.map(c)).unwrap();
        assert!((t_orig - t_frozen).abs() < 1e-12);
    }

    #[test]
    fn frozen_state_keeps_trace_with_foreign_vector() {
        let (gs, basis) = ground(4, 5.0);
        let pr = pair_rdm(&gs, &basis, 1, 2).unwrap();
        let decomp = spectral_decomposition(&pr);
        let records = track_lhfs(&[decomp.clone()], &[5.0]).unwrap();
        let mut frozen_vec = DVector::zeros(16);
        for &idx in &HALF_FILLED_BLOCK {
            frozen_vec[idx] = 0.5;
        }
        let frozen = frozen_lhfs_state(&decomp, records[0].eigen_index, &frozen_vec);
        assert!((frozen.trace() - 1.0).abs() < 1e-12);
        let evs = frozen.symmetric_eigen().eigenvalues;
        for &lam in evs.iter() {
            assert!(lam > -1e-12);
        }
    }

    #[test]
    fn pure_lbc_of_balanced_half_filled_state_is_maximal() {
        // |alpha| = |beta| = |gamma| = |delta| = 1/2.
        let mut psi = DVector::<C64>::zeros(16);
        for &idx in &HALF_FILLED_BLOCK {
            psi[idx] = c(0.5);
        }
        let (tau2_balanced, _) = pure_state_lbc(&psi).unwrap();

        // Any skewed member of the family has a smaller bound.
        let mut rng = SplitMix64::new(13);
        for _ in 0..5 {
            let mut skew = DVector::<C64>::zeros(16);
            let mut norm = 0.0;
            let raw: Vec<f64> = (0..4).map(|_| rng.gaussian()).collect();
            for (&idx, &r) in HALF_FILLED_BLOCK.iter().zip(&raw) {
                skew[idx] = c(r);
                norm += r * r;
            }
            skew /= c(norm.sqrt());
            let (tau2_skew, _) = pure_state_lbc(&skew).unwrap();
            assert!(tau2_skew <= tau2_balanced + 1e-10);
        }

        // The dimer ground state at U = 0 has the balanced amplitudes up to
        // local signs, which the bound ignores.
        let (gs, basis) = ground(2, 0.0);
        let pr = pair_rdm(&gs, &basis, 1, 2).unwrap();
        let (tau2_dimer, _) = lbc(&pr.to_complex()).unwrap();
        assert!((tau2_dimer - tau2_balanced).abs() < 1e-8);
    }

    #[test]
    fn projection_of_dimer_is_singlet() {
        let (gs, basis) = ground(2, 1e4);
        let p = project_to_spin_state(&gs, &basis).unwrap();
        assert!(p.leakage < 1e-3);
        // (|ud> - |du>)/sqrt(2) up to global sign; indices 0b10 and 0b01.
        let r = 1.0 / 2.0f64.sqrt();
        assert!((p.amplitudes[0b10].abs() - r).abs() < 1e-4);
        assert!((p.amplitudes[0b01].abs() - r).abs() < 1e-4);
        assert!(p.amplitudes[0b10] * p.amplitudes[0b01] < 0.0);
        assert!(p.amplitudes[0b00].abs() < 1e-12);
        assert!(p.amplitudes[0b11].abs() < 1e-12);
    }

    #[test]
    fn projection_is_identity_on_confined_states() {
        // A state already inside the singly occupied subspace loses no
        // weight and maps onto the intended spin amplitudes: the singlet
        // (|ud> - |du>)/sqrt(2) corresponds to Fock amplitudes +r, +r under
        // the mode ordering (the reordering parity carries the minus).
        let basis = enumerate_sector(Sector::new(2, 1, 1).unwrap());
        let r = 1.0 / 2.0f64.sqrt();
        let mut vector = vec![0.0; basis.len()];
        for (k, state) in basis.iter().enumerate() {
            if state.up == 0b01 && state.down == 0b10 {
                vector[k] = r;
            }
            if state.up == 0b10 && state.down == 0b01 {
                vector[k] = r;
            }
        }
        let gs = GroundState {
            energy: 0.0,
            vector,
            gap: 1.0,
            converged: true,
            residual: 0.0,
        };
        let p = project_to_spin_state(&gs, &basis).unwrap();
        assert!(p.leakage.abs() < 1e-15);
        assert!((p.amplitudes[0b10] - r).abs() < 1e-15);
        assert!((p.amplitudes[0b01] + r).abs() < 1e-15);
    }

    #[test]
    fn projection_rejects_wrong_sector() {
        let params = HubbardParams::new(3, 1.0, 1.0).unwrap();
        let basis = enumerate_sector(Sector::new(3, 2, 1).unwrap());
        let h = build_hamiltonian(&params, &basis).unwrap();
        let gs = dense_ground_state(&h).unwrap();
        assert!(matches!(
            project_to_spin_state(&gs, &basis),
            Err(Error::NotHalfFilling { .. })
        ));
    }

    #[test]
    fn projection_rejects_unconfined_state() {
        let (gs, basis) = ground(4, 0.0);
        assert!(matches!(
            project_to_spin_state(&gs, &basis),
            Err(Error::NotConfined { .. })
        ));
    }

    #[test]
    fn four_tangle_examples() {
        let r = 1.0 / 2.0f64.sqrt();
        let mut ghz = DVector::<C64>::zeros(16);
        ghz[0] = c(r);
        ghz[15] = c(r);
        let tau = four_tangle(&ghz);
        assert!((tau - 1.0).abs() < 1e-15);

        let mut product = DVector::<C64>::zeros(16);
        product[0] = c(1.0);
        assert_eq!(four_tangle(&product), 0.0);
    }

    #[test]
    fn four_tangle_invariant_under_sigma_z_layer() {
        let mut rng = SplitMix64::new(101);
        let psi = random_pure(&mut rng, 16);
        let mut flipped = psi.clone();
        for x in 0..16usize {
            if x.count_ones() % 2 == 1 {
                flipped[x] = -flipped[x];
            }
        }
        assert!((four_tangle(&psi) - four_tangle(&flipped)).abs() < 1e-12);
    }

    #[test]
    fn generic_family_fit_examples() {
        let r = 1.0 / 2.0f64.sqrt();
        let mut ghz = DVector::<C64>::zeros(16);
        ghz[0] = c(r);
        ghz[15] = c(r);
        let fit = fit_generic_family(&ghz);
        assert!(fit.residual < 1e-15);
        assert!((fit.z[0] - c(r)).norm() < 1e-12);
        assert!((fit.z[3] - c(r)).norm() < 1e-12);
        assert!(fit.z[1].norm() < 1e-12 && fit.z[2].norm() < 1e-12);
        assert!((fit.tangle_from_coefficients() - 1.0).abs() < 1e-12);

        let mut outside = DVector::<C64>::zeros(16);
        outside[1] = c(1.0); // |0001>
        let fit = fit_generic_family(&outside);
        assert!((fit.residual - 1.0).abs() < 1e-12);
    }

    #[test]
    fn qubit_pair_rdm_of_bell_chain() {
        // 2-qubit chain: (|01> - |10>)/sqrt(2); its (1,2) RDM has C = 1.
        let r = 1.0 / 2.0f64.sqrt();
        let amps = vec![0.0, r, -r, 0.0];
        let rho = qubit_pair_rdm(&amps, 2, 1, 2);
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
        assert!((wootters_concurrence(&rho).unwrap() - 1.0).abs() < 1e-12);
    }
}
