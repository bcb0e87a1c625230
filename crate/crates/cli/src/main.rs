//! Command-line driver: coupling sweeps, per-figure datasets, the
//! strong-coupling confinement analysis, and plain ground-state scans.
//!
//! Exit codes: 0 success, 2 configuration error, 3 non-convergence (or a
//! failed projection), 4 every requested point degenerate.

mod config;
mod figures;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hubent::entanglement::{
    fit_generic_family, four_tangle, project_to_spin_state, qubit_pair_rdm, wootters_concurrence,
};
use hubent::sweep::{
    sweep_chain_with_convention, ChainSolver, EntanglementReport, FrozenRecord, GroundPoint,
};

use config::{
    apply_file, parse_convention, parse_measures, parse_pairs, parse_scale, parse_sizes,
    read_config_file, RunConfig,
};

#[derive(Parser)]
#[command(
    name = "hubent",
    version,
    about = "Ground states and pairwise entanglement of open Fermi-Hubbard chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct CommonArgs {
    /// Plain `key = value` config file; flags override its entries.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Chain lengths, comma separated (even, 2..=16).
    #[arg(long, value_name = "L1,L2,...")]
    sizes: Option<String>,

    /// Grid lower bound (with any grid flag set, the grid becomes
    /// exactly min..max; the default grid is U = 0 plus 60 log points on
    /// [0.01, 100]).
    #[arg(long, value_name = "U")]
    u_min: Option<f64>,

    /// Grid upper bound.
    #[arg(long, value_name = "U")]
    u_max: Option<f64>,

    /// Number of grid points.
    #[arg(long, value_name = "N")]
    u_count: Option<usize>,

    /// Grid spacing: log or linear.
    #[arg(long, value_name = "SCALE")]
    u_scale: Option<String>,

    /// Site pairs: "all" or "i-j,i-j,...".
    #[arg(long, value_name = "SPEC")]
    pairs: Option<String>,

    /// Measures: "all" or a comma list of
    /// lbc,pair_entropy,site_entropy,occupations,lhfs,frozen_lhfs.
    #[arg(long, value_name = "LIST")]
    measures: Option<String>,

    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads (defaults to the machine's cores).
    #[arg(long, value_name = "N")]
    threads: Option<usize>,

    /// Iterative-solver residual tolerance.
    #[arg(long, value_name = "TOL")]
    tol: Option<f64>,

    /// Iterative-solver iteration budget.
    #[arg(long, value_name = "N")]
    max_iter: Option<usize>,

    /// Seed of the deterministic solver start vector.
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,

    /// Grid point whose tracked pair eigenstate is frozen into the
    /// mixtures (frozen_lhfs measure and fig7).
    #[arg(long, value_name = "U")]
    frozen_ref_u: Option<f64>,

    /// Coupling for the confinement command.
    #[arg(long, value_name = "U")]
    u: Option<f64>,

    /// Two-site density-matrix convention: fermionic (mode partial trace,
    /// default) or qudit (Jordan-Wigner chain partial trace). The two
    /// differ for non-contiguous pairs.
    #[arg(long, value_name = "NAME")]
    convention: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the coupling grid and write sweep.csv (and frozen.csv when the
    /// frozen_lhfs measure is on).
    Sweep(CommonArgs),
    /// Write the canned dataset for one figure (fig1a..fig1d, fig3a, fig3b,
    /// fig4, fig5a, fig5b, fig6b, fig7a..fig7c).
    Figure {
        name: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Strong-coupling confinement analysis: spin projection, pairwise
    /// concurrences, four-tangle and family fit (L = 4).
    Confinement(CommonArgs),
    /// Ground energies, gaps and residuals over the grid.
    GroundState(CommonArgs),
}

fn resolve(common: &CommonArgs) -> Result<RunConfig, String> {
    let mut config = RunConfig::default();
    if let Some(path) = &common.config {
        let map = read_config_file(path)?;
        apply_file(&mut config, &map)?;
    }
    if let Some(text) = &common.sizes {
        config.sizes = parse_sizes(text)?;
    }
    if let Some(v) = common.u_min {
        config.u_min = v;
        config.explicit_grid = true;
    }
    if let Some(v) = common.u_max {
        config.u_max = v;
        config.explicit_grid = true;
    }
    if let Some(v) = common.u_count {
        config.u_count = v;
        config.explicit_grid = true;
    }
    if let Some(text) = &common.u_scale {
        config.u_scale = parse_scale(text)?;
        config.explicit_grid = true;
    }
    if let Some(text) = &common.pairs {
        config.pairs = parse_pairs(text)?;
    }
    if let Some(text) = &common.measures {
        config.measures = parse_measures(text)?;
    }
    if let Some(path) = &common.out {
        config.out = path.clone();
    }
    if common.threads.is_some() {
        config.threads = common.threads;
    }
    if let Some(v) = common.tol {
        config.tol = v;
    }
    if let Some(v) = common.max_iter {
        config.max_iter = v;
    }
    if let Some(v) = common.seed {
        config.seed = v;
    }
    if let Some(v) = common.frozen_ref_u {
        config.frozen_ref_u = v;
    }
    if let Some(v) = common.u {
        config.u_large = v;
    }
    if let Some(text) = &common.convention {
        config.convention = parse_convention(text)?;
    }
    config.validate()?;
    if let Some(threads) = config.threads {
        // A pool may already exist when tests call main twice; that's fine.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    Ok(config)
}

const EXIT_CONFIG: u8 = 2;
const EXIT_UNCONVERGED: u8 = 3;
const EXIT_DEGENERATE: u8 = 4;

fn config_error(message: &str) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(EXIT_CONFIG)
}

fn status_code(any_unconverged: bool, all_degenerate: bool) -> ExitCode {
    if any_unconverged {
        ExitCode::from(EXIT_UNCONVERGED)
    } else if all_degenerate {
        ExitCode::from(EXIT_DEGENERATE)
    } else {
        ExitCode::SUCCESS
    }
}

fn run_sweep(config: &RunConfig) -> Result<ExitCode, String> {
    let us = config.u_grid();
    let settings = config.solver_settings();
    let mut reports: Vec<EntanglementReport> = Vec::new();
    let mut frozen: Vec<FrozenRecord> = Vec::new();
    for &l in &config.sizes {
        let pairs = config.pairs.for_sites(l);
        if pairs.is_empty() {
            continue;
        }
        let sweep = sweep_chain_with_convention(
            l,
            &us,
            &pairs,
            config.measures,
            &settings,
            config.frozen_ref_u,
            config.convention,
        )
        .map_err(|e| e.to_string())?;
        reports.extend(sweep.reports);
        frozen.extend(sweep.frozen);
    }
    if reports.is_empty() {
        return Err("no (size, pair) combinations to sweep".into());
    }
    reports.sort_by(|a, b| {
        a.l.cmp(&b.l)
            .then(a.u.partial_cmp(&b.u).unwrap())
            .then(a.i.cmp(&b.i))
            .then(a.j.cmp(&b.j))
    });
    frozen.sort_by(|a, b| {
        a.l.cmp(&b.l)
            .then(a.u.partial_cmp(&b.u).unwrap())
            .then(a.i.cmp(&b.i))
            .then(a.j.cmp(&b.j))
    });

    let sweep_path = config.out.join("sweep.csv");
    output::write_sweep_csv(&sweep_path, &reports).map_err(|e| e.to_string())?;
    println!("wrote {} rows to {}", reports.len(), sweep_path.display());
    if config.measures.frozen_lhfs {
        let frozen_path = config.out.join("frozen.csv");
        output::write_frozen_csv(&frozen_path, &frozen).map_err(|e| e.to_string())?;
        println!("wrote {} rows to {}", frozen.len(), frozen_path.display());
    }

    let any_unconverged = reports.iter().any(|r| !r.converged);
    let all_degenerate = reports.iter().all(|r| r.degenerate);
    Ok(status_code(any_unconverged, all_degenerate))
}

fn run_ground_state(config: &RunConfig) -> Result<ExitCode, String> {
    let us = config.u_grid();
    let settings = config.solver_settings();
    let mut points: Vec<GroundPoint> = Vec::new();
    for &l in &config.sizes {
        let solver = ChainSolver::new(l, settings).map_err(|e| e.to_string())?;
        for &u in &us {
            points.push(solver.ground_point(u).map_err(|e| e.to_string())?);
        }
    }
    let path = config.out.join("ground_state.csv");
    output::write_ground_csv(&path, &points).map_err(|e| e.to_string())?;
    println!("wrote {} rows to {}", points.len(), path.display());
    let any_unconverged = points.iter().any(|p| !p.converged);
    let all_degenerate = points.iter().all(|p| p.degenerate);
    Ok(status_code(any_unconverged, all_degenerate))
}

fn run_confinement(config: &RunConfig) -> Result<ExitCode, String> {
    let l = config.sizes[0];
    let u = config.u_large;
    if u < 100.0 {
        return Err(format!(
            "confinement needs a strong coupling (u >= 100, got {u})"
        ));
    }
    let settings = config.solver_settings();
    let solver = ChainSolver::new(l, settings).map_err(|e| e.to_string())?;
    let point = solver.solve(u).map_err(|e| e.to_string())?;
    if !point.gs.converged {
        eprintln!("solver did not converge (residual {})", point.gs.residual);
        return Ok(ExitCode::from(EXIT_UNCONVERGED));
    }
    if point.degenerate {
        eprintln!("ground state degenerate (gap {})", point.gs.gap);
        return Ok(ExitCode::from(EXIT_DEGENERATE));
    }
    let projection = match project_to_spin_state(&point.gs, solver.basis()) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("projection failed: {e}");
            return Ok(ExitCode::from(EXIT_UNCONVERGED));
        }
    };

    let mut rows: Vec<(String, f64)> = vec![
        ("L".into(), l as f64),
        ("U".into(), u),
        ("ground_energy".into(), point.gs.energy),
        ("leakage".into(), projection.leakage),
    ];
    println!("L = {l}, U = {u}");
    println!("leakage = {:.3e}", projection.leakage);

    if l == 4 {
        // Coefficient magnitudes of the three spin patterns.
        let outer = projection.amplitudes[0b0011].abs();
        let neel = projection.amplitudes[0b0101].abs();
        let inner = projection.amplitudes[0b0110].abs();
        println!("|c(dduu-type)| = {outer:.6}");
        println!("|c(dudu-type)| = {neel:.6}");
        println!("|c(duud-type)| = {inner:.6}");
        rows.push(("coeff_dduu".into(), outer));
        rows.push(("coeff_dudu".into(), neel));
        rows.push(("coeff_duud".into(), inner));
    }

    for i in 1..=l {
        for j in (i + 1)..=l {
            let rho = qubit_pair_rdm(&projection.amplitudes, l, i, j);
            let c = wootters_concurrence(&rho).map_err(|e| e.to_string())?;
            println!("C(rho_{i}{j}) = {c:.6}");
            rows.push((format!("wootters_{i}{j}"), c));
        }
    }

    if l == 4 {
        let psi = projection.to_complex();
        let tangle = four_tangle(&psi);
        let fit = fit_generic_family(&psi);
        println!("four_tangle = {tangle:.9}");
        println!("family_fit_residual = {:.3e}", fit.residual);
        rows.push(("four_tangle".into(), tangle));
        rows.push(("fit_residual".into(), fit.residual));
        for (k, z) in fit.z.iter().enumerate() {
            rows.push((format!("fit_z{k}_re"), z.re));
            rows.push((format!("fit_z{k}_im"), z.im));
        }
        rows.push(("tangle_from_fit".into(), fit.tangle_from_coefficients()));
    }

    let path = config.out.join("confinement.csv");
    figures::write_confinement_csv(&path, &rows).map_err(|e| e.to_string())?;
    println!("wrote {}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, action): (&CommonArgs, &str) = match &cli.command {
        Command::Sweep(common) => (common, "sweep"),
        Command::Figure { common, .. } => (common, "figure"),
        Command::Confinement(common) => (common, "confinement"),
        Command::GroundState(common) => (common, "ground-state"),
    };
    let config = match resolve(common) {
        Ok(config) => config,
        Err(message) => return config_error(&message),
    };

    let outcome = match &cli.command {
        Command::Sweep(_) => run_sweep(&config),
        Command::GroundState(_) => run_ground_state(&config),
        Command::Confinement(_) => run_confinement(&config),
        Command::Figure { name, .. } => {
            if !figures::FIGURE_NAMES.contains(&name.as_str()) {
                return config_error(&format!(
                    "unknown figure '{name}' (expected one of {})",
                    figures::FIGURE_NAMES.join(", ")
                ));
            }
            figures::run_figure(name, &config)
                .map(|status| status_code(status.any_unconverged, status.all_degenerate))
        }
    };
    match outcome {
        Ok(code) => code,
        Err(message) => {
            // Post-validation failures here are solver/config mismatches.
            eprintln!("error: {action} failed: {message}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
