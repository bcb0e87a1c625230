//! Run configuration: defaults, an optional `key = value` config file, and
//! command-line flags, with flags taking precedence over the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use hubent::sweep::{
    default_u_grid, linear_grid, log_grid, MeasureSet, RdmConvention, SolverSettings,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairSpec {
    All,
    List(Vec<(usize, usize)>),
}

impl PairSpec {
    /// Pairs applicable to a chain of `sites` sites; out-of-range explicit
    /// pairs are skipped for that size.
    pub fn for_sites(&self, sites: usize) -> Vec<(usize, usize)> {
        match self {
            PairSpec::All => hubent::sweep::all_pairs(sites),
            PairSpec::List(pairs) => pairs.iter().copied().filter(|&(_, j)| j <= sites).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridScale {
    Log,
    Linear,
}

/// Fully resolved run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub sizes: Vec<usize>,
    pub u_min: f64,
    pub u_max: f64,
    pub u_count: usize,
    pub u_scale: GridScale,
    /// Whether any grid flag was given; without one the default grid
    /// (U = 0 plus 60 log points on [0.01, 100]) is used.
    pub explicit_grid: bool,
    pub pairs: PairSpec,
    pub measures: MeasureSet,
    pub out: PathBuf,
    pub threads: Option<usize>,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub frozen_ref_u: f64,
    /// Coupling for the confinement command.
    pub u_large: f64,
    /// Which two-site reduced density matrix the measures use.
    pub convention: RdmConvention,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            sizes: vec![4],
            u_min: hubent::sweep::DEFAULT_U_MIN,
            u_max: hubent::sweep::DEFAULT_U_MAX,
            u_count: hubent::sweep::DEFAULT_U_COUNT,
            u_scale: GridScale::Log,
            explicit_grid: false,
            pairs: PairSpec::All,
            measures: MeasureSet::standard(),
            out: PathBuf::from("out"),
            threads: None,
            tol: 1e-10,
            max_iter: 500,
            seed: 42,
            frozen_ref_u: 0.0,
            u_large: 1e4,
            convention: RdmConvention::FermionicModes,
        }
    }
}

impl RunConfig {
    pub fn u_grid(&self) -> Vec<f64> {
        if !self.explicit_grid {
            return default_u_grid();
        }
        match self.u_scale {
            GridScale::Log => log_grid(self.u_min, self.u_max, self.u_count),
            GridScale::Linear => linear_grid(self.u_min, self.u_max, self.u_count),
        }
    }

    pub fn solver_settings(&self) -> SolverSettings {
        SolverSettings {
            tol: self.tol,
            max_iter: self.max_iter,
            seed: self.seed,
            ..SolverSettings::default()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.sizes.is_empty() {
            return Err("no sizes given".into());
        }
        for &l in &self.sizes {
            if l % 2 != 0 || l < 2 || l > 16 {
                return Err(format!("size {l} must be even and within 2..=16"));
            }
        }
        if self.explicit_grid {
            if self.u_count < 2 {
                return Err("u-count must be at least 2".into());
            }
            if self.u_max <= self.u_min {
                return Err("u-max must exceed u-min".into());
            }
            if self.u_min < 0.0 {
                return Err("u-min must be >= 0".into());
            }
            if self.u_scale == GridScale::Log && self.u_min <= 0.0 {
                return Err("log grids need u-min > 0".into());
            }
        }
        if let PairSpec::List(pairs) = &self.pairs {
            if pairs.is_empty() {
                return Err("empty pair list".into());
            }
            let max_l = *self.sizes.iter().max().unwrap();
            for &(i, j) in pairs {
                if i == 0 || i >= j {
                    return Err(format!("bad pair {i}-{j}: need 1 <= i < j"));
                }
                if j > max_l {
                    return Err(format!("pair {i}-{j} exceeds every requested size"));
                }
            }
        }
        if self.tol <= 0.0 {
            return Err("tol must be positive".into());
        }
        if self.frozen_ref_u < 0.0 {
            return Err("frozen-ref-u must be >= 0".into());
        }
        if self.u_large < 0.0 {
            return Err("u must be >= 0".into());
        }
        Ok(())
    }
}

pub fn parse_sizes(text: &str) -> Result<Vec<usize>, String> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad size '{tok}'"))
        })
        .collect()
}

pub fn parse_pairs(text: &str) -> Result<PairSpec, String> {
    if text.trim() == "all" {
        return Ok(PairSpec::All);
    }
    let mut pairs = Vec::new();
    for tok in text.split(',') {
        let tok = tok.trim();
        let (a, b) = tok
            .split_once('-')
            .ok_or_else(|| format!("bad pair '{tok}' (expected i-j)"))?;
        let i = a
            .trim()
            .parse::<usize>()
            .map_err(|_| format!("bad pair '{tok}'"))?;
        let j = b
            .trim()
            .parse::<usize>()
            .map_err(|_| format!("bad pair '{tok}'"))?;
        pairs.push((i, j));
    }
    Ok(PairSpec::List(pairs))
}

pub fn parse_measures(text: &str) -> Result<MeasureSet, String> {
    if text.trim() == "all" {
        return Ok(MeasureSet::everything());
    }
    let mut set = MeasureSet::default();
    for tok in text.split(',') {
        match tok.trim() {
            "lbc" => set.lbc = true,
            "pair_entropy" => set.pair_entropy = true,
            "site_entropy" => set.site_entropy = true,
            "occupations" => set.occupations = true,
            "lhfs" => set.lhfs = true,
            "frozen_lhfs" => set.frozen_lhfs = true,
            other => return Err(format!("unknown measure '{other}'")),
        }
    }
    Ok(set)
}

pub fn parse_convention(text: &str) -> Result<RdmConvention, String> {
    match text.trim() {
        "fermionic" => Ok(RdmConvention::FermionicModes),
        "qudit" => Ok(RdmConvention::JordanWignerQudit),
        other => Err(format!("unknown convention '{other}' (fermionic or qudit)")),
    }
}

pub fn parse_scale(text: &str) -> Result<GridScale, String> {
    match text.trim() {
        "log" => Ok(GridScale::Log),
        "linear" => Ok(GridScale::Linear),
        other => Err(format!("unknown scale '{other}' (log or linear)")),
    }
}

/// Read a `key = value` file, one key per line; `#` starts a comment.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{}:{}: expected key = value", path.display(), lineno + 1))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Apply config-file entries onto defaults; flags are merged on top by the
/// caller.
pub fn apply_file(config: &mut RunConfig, map: &BTreeMap<String, String>) -> Result<(), String> {
    for (key, value) in map {
        match key.as_str() {
            "sizes" => config.sizes = parse_sizes(value)?,
            "u-min" => {
                config.u_min = value.parse().map_err(|_| format!("bad u-min '{value}'"))?;
                config.explicit_grid = true;
            }
            "u-max" => {
                config.u_max = value.parse().map_err(|_| format!("bad u-max '{value}'"))?;
                config.explicit_grid = true;
            }
            "u-count" => {
                config.u_count = value
                    .parse()
                    .map_err(|_| format!("bad u-count '{value}'"))?;
                config.explicit_grid = true;
            }
            "u-scale" => {
                config.u_scale = parse_scale(value)?;
                config.explicit_grid = true;
            }
            "pairs" => config.pairs = parse_pairs(value)?,
            "measures" => config.measures = parse_measures(value)?,
            "out" => config.out = PathBuf::from(value),
            "threads" => {
                config.threads = Some(
                    value
                        .parse()
                        .map_err(|_| format!("bad threads '{value}'"))?,
                )
            }
            "tol" => config.tol = value.parse().map_err(|_| format!("bad tol '{value}'"))?,
            "max-iter" => {
                config.max_iter = value
                    .parse()
                    .map_err(|_| format!("bad max-iter '{value}'"))?
            }
            "seed" => config.seed = value.parse().map_err(|_| format!("bad seed '{value}'"))?,
            "frozen-ref-u" => {
                config.frozen_ref_u = value
                    .parse()
                    .map_err(|_| format!("bad frozen-ref-u '{value}'"))?
            }
            "u" => config.u_large = value.parse().map_err(|_| format!("bad u '{value}'"))?,
            "convention" => config.convention = parse_convention(value)?,
            other => return Err(format!("unknown config key '{other}'")),
        }
    }
    Ok(())
}
