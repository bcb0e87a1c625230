//! Bit-packed fermionic Fock states on an L-site chain and enumeration of
//! fixed particle-number sectors.
//!
//! Mode convention used everywhere in this crate (Hamiltonian, reduced
//! density matrices, oracle): the 2L fermionic modes are ordered spin-up
//! block first, then spin-down block, i.e. mode `m = site - 1` for spin-up
//! and `m = L + site - 1` for spin-down. Sites are 1-indexed in the public
//! API, bit positions 0-indexed internally. Keeping each spin species
//! contiguous means nearest-neighbor hop signs never cross the opposite-spin
//! block.

use crate::{Error, Result};

/// Hard cap on chain length; sector dimensions beyond this are not
/// desk-scale.
pub const MAX_SITES: usize = 16;

/// Spin species of a fermionic mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

/// Occupation of the chain, one bit per site and spin.
///
/// Bit `i` of `up` is set iff site `i + 1` holds a spin-up electron, and
/// likewise for `down`. Bits at positions `>= L` are always zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockState {
    pub up: u32,
    pub down: u32,
}

impl FockState {
    pub fn new(up: u32, down: u32) -> Self {
        Self { up, down }
    }

    /// Occupation number of (site, spin); site is 1-indexed.
    pub fn occupied(self, site: usize, spin: Spin) -> bool {
        let mask = 1u32 << (site - 1);
        match spin {
            Spin::Up => self.up & mask != 0,
            Spin::Down => self.down & mask != 0,
        }
    }

    /// 1 iff both spin modes at `site` are occupied, else 0.
    pub fn double_occupancy(self, site: usize) -> u32 {
        let mask = 1u32 << (site - 1);
        u32::from(self.up & mask != 0 && self.down & mask != 0)
    }

    /// Number of doubly occupied sites.
    pub fn double_occupancy_count(self) -> u32 {
        (self.up & self.down).count_ones()
    }

    /// All 2L mode occupations packed into one word: spin-up block in bits
    /// `0..L`, spin-down block in bits `L..2L`.
    pub fn packed(self, sites: usize) -> u64 {
        self.up as u64 | (self.down as u64) << sites
    }

    /// Inverse of [`FockState::packed`].
    pub fn from_packed(packed: u64, sites: usize) -> Self {
        let mask = (1u64 << sites) - 1;
        Self {
            up: (packed & mask) as u32,
            down: (packed >> sites & mask) as u32,
        }
    }
}

/// Global mode index of (site, spin) under the spin-block ordering.
pub fn mode_index(site: usize, spin: Spin, sites: usize) -> u32 {
    match spin {
        Spin::Up => (site - 1) as u32,
        Spin::Down => (sites + site - 1) as u32,
    }
}

/// A fixed (N_up, N_down) particle-number sector of an L-site chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sector {
    sites: usize,
    n_up: usize,
    n_down: usize,
}

impl Sector {
    pub fn new(sites: usize, n_up: usize, n_down: usize) -> Result<Self> {
        if sites == 0 || sites > MAX_SITES || n_up > sites || n_down > sites {
            return Err(Error::InvalidSector {
                sites,
                n_up,
                n_down,
            });
        }
        Ok(Self {
            sites,
            n_up,
            n_down,
        })
    }

    /// The half-filling sector N_up = N_down = L/2 (even L).
    pub fn half_filling(sites: usize) -> Result<Self> {
        Self::new(sites, sites / 2, sites / 2)
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn n_up(&self) -> usize {
        self.n_up
    }

    pub fn n_down(&self) -> usize {
        self.n_down
    }

    /// C(L, N_up) * C(L, N_down).
    pub fn dimension(&self) -> usize {
        binomial(self.sites, self.n_up) * binomial(self.sites, self.n_down)
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// All L-bit masks with exactly k bits set, ascending as integers
/// (Gosper's hack).
fn combinations(sites: usize, k: usize) -> Vec<u32> {
    let count = binomial(sites, k);
    let mut out = Vec::with_capacity(count);
    if k == 0 {
        out.push(0);
        return out;
    }
    let limit = 1u32 << sites;
    let mut mask = (1u32 << k) - 1;
    while mask < limit {
        out.push(mask);
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
        if c == 0 {
            break;
        }
    }
    out
}

/// Ordered enumeration of every [`FockState`] in a sector, with index
/// lookup.
///
/// Ordering is strict lexicographic on `(up, down)` interpreted as
/// integers; since the sector factorizes into independent spin-up and
/// spin-down configurations the basis is their outer product, spin-up
/// major.
#[derive(Clone, Debug)]
pub struct SectorBasis {
    sector: Sector,
    ups: Vec<u32>,
    downs: Vec<u32>,
}

impl SectorBasis {
    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn len(&self) -> usize {
        self.ups.len() * self.downs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n_up_configs(&self) -> usize {
        self.ups.len()
    }

    pub fn n_down_configs(&self) -> usize {
        self.downs.len()
    }

    /// The k-th state in canonical order.
    pub fn state(&self, k: usize) -> FockState {
        let nd = self.downs.len();
        FockState {
            up: self.ups[k / nd],
            down: self.downs[k % nd],
        }
    }

    /// Position of `state` in canonical order, if it belongs to the sector.
    pub fn index_of(&self, state: FockState) -> Option<usize> {
        let iu = self.ups.binary_search(&state.up).ok()?;
        let id = self.downs.binary_search(&state.down).ok()?;
        Some(iu * self.downs.len() + id)
    }

    pub fn iter(&self) -> impl Iterator<Item = FockState> + '_ {
        (0..self.len()).map(move |k| self.state(k))
    }
}

/// Enumerate the basis of `sector` in canonical order.
pub fn enumerate_sector(sector: Sector) -> SectorBasis {
    SectorBasis {
        sector,
        ups: combinations(sector.sites(), sector.n_up()),
        downs: combinations(sector.sites(), sector.n_down()),
    }
}

/// Move one electron between modes of the packed occupation word.
///
/// Returns `None` when `from` is empty or `to` is occupied; otherwise the
/// new word and the fermionic sign `(-1)^k` with `k` the number of occupied
/// modes strictly between the two.
pub fn move_mode(packed: u64, from: u32, to: u32) -> Option<(u64, i8)> {
    if packed & (1 << from) == 0 || packed & (1 << to) != 0 {
        return None;
    }
    let (lo, hi) = if from < to { (from, to) } else { (to, from) };
    let between = ((1u64 << hi) - 1) & !((1u64 << (lo + 1)) - 1);
    let crossings = (packed & between).count_ones();
    let sign = if crossings % 2 == 0 { 1 } else { -1 };
    Some((packed ^ (1 << from) ^ (1 << to), sign))
}

/// Apply `c†_{i,spin} c_{j,spin}` to `state` on an L-site chain.
///
/// `None` iff mode (j, spin) is empty or mode (i, spin) is occupied;
/// otherwise the moved state together with its anticommutation sign.
pub fn apply_hop(
    state: FockState,
    sites: usize,
    i: usize,
    j: usize,
    spin: Spin,
) -> Result<Option<(FockState, i8)>> {
    for site in [i, j] {
        if site == 0 || site > sites {
            return Err(Error::SiteOutOfRange { site, sites });
        }
    }
    if i == j {
        return Err(Error::EqualSites { site: i });
    }
    let from = mode_index(j, spin, sites);
    let to = mode_index(i, spin, sites);
    Ok(move_mode(state.packed(sites), from, to)
        .map(|(packed, sign)| (FockState::from_packed(packed, sites), sign)))
}
