//! Canned dataset generators: one CSV per plotted curve, grids and pair
//! selections matched to each figure's axes. Grid and size flags still
//! override the canned choices.

use std::io::Write;
use std::path::Path;

use hubent::entanglement::{spectral_decomposition, track_lhfs};
use hubent::rdm::occupation_spectrum;
use hubent::sweep::{sweep_chain_with_convention, ChainSolver, MeasureSet};

use crate::config::RunConfig;
use crate::output::{create, fmt};

pub const FIGURE_NAMES: [&str; 13] = [
    "fig1a", "fig1b", "fig1c", "fig1d", "fig3a", "fig3b", "fig4", "fig5a", "fig5b", "fig6b",
    "fig7a", "fig7b", "fig7c",
];

fn curve_sizes(config: &RunConfig, canned: &[usize]) -> Vec<usize> {
    if config.sizes == RunConfig::default().sizes {
        canned.to_vec()
    } else {
        config.sizes.clone()
    }
}

/// Exit-status summary of a figure run.
pub struct FigureStatus {
    pub any_unconverged: bool,
    pub all_degenerate: bool,
}

pub fn run_figure(name: &str, config: &RunConfig) -> Result<FigureStatus, String> {
    let us = config.u_grid();
    let settings = config.solver_settings();
    let out = config.out.as_path();
    let mut any_unconverged = false;
    let mut any_ok = false;
    let mut any_degenerate = false;

    let mut per_l_pair_curves = |pair: (usize, usize),
                                 sizes: &[usize],
                                 stem: &str,
                                 measures: MeasureSet,
                                 columns: &dyn Fn(&hubent::sweep::EntanglementReport) -> String,
                                 header: &str|
     -> Result<(), String> {
        for &l in sizes {
            if pair.1 > l {
                continue;
            }
            let sweep = sweep_chain_with_convention(
                l,
                &us,
                &[pair],
                measures,
                &settings,
                config.frozen_ref_u,
                config.convention,
            )
            .map_err(|e| e.to_string())?;
            let path = out.join(format!("{stem}_L{l}.csv"));
            let mut w = create(&path).map_err(|e| e.to_string())?;
            writeln!(w, "{header}").map_err(|e| e.to_string())?;
            for r in &sweep.reports {
                if !r.converged {
                    any_unconverged = true;
                }
                if r.degenerate {
                    any_degenerate = true;
                } else if r.converged {
                    any_ok = true;
                }
                writeln!(w, "{}", columns(r)).map_err(|e| e.to_string())?;
            }
            w.flush().map_err(|e| e.to_string())?;
        }
        Ok(())
    };

    match name {
        "fig1a" | "fig1b" | "fig1c" | "fig1d" => {
            let pair = match name {
                "fig1a" => (1, 2),
                "fig1b" => (2, 3),
                "fig1c" => (1, 3),
                _ => (1, 4),
            };
            let sizes = curve_sizes(config, &[4, 6, 8, 10, 12]);
            let measures = MeasureSet {
                lbc: true,
                ..Default::default()
            };
            per_l_pair_curves(
                pair,
                &sizes,
                name,
                measures,
                &|r| {
                    format!(
                        "{},{},{}",
                        fmt(r.u),
                        r.tau2.map(fmt).unwrap_or_default(),
                        r.sqrt_tau2.map(fmt).unwrap_or_default()
                    )
                },
                "U,tau2,sqrt_tau2",
            )?;
        }
        "fig3a" | "fig3b" => {
            let l = if name == "fig3a" { 4 } else { 12 };
            let measures = MeasureSet {
                site_entropy: true,
                occupations: true,
                ..Default::default()
            };
            // Pair (1,2) carries the end site as i and a middle site as j.
            let sweep = sweep_chain_with_convention(
                l,
                &us,
                &[(1, 2), (2, 3)],
                measures,
                &settings,
                0.0,
                config.convention,
            )
            .map_err(|e| e.to_string())?;
            let path = out.join(format!("{name}.csv"));
            let mut w = create(&path).map_err(|e| e.to_string())?;
            writeln!(
                w,
                "U,site_entropy_end,site_entropy_middle,s_up_end,d_end,s_up_middle,d_middle"
            )
            .map_err(|e| e.to_string())?;
            for &u in &us {
                let end = sweep
                    .reports
                    .iter()
                    .find(|r| r.u == u && (r.i, r.j) == (1, 2));
                let mid = sweep
                    .reports
                    .iter()
                    .find(|r| r.u == u && (r.i, r.j) == (2, 3));
                let (Some(end), Some(mid)) = (end, mid) else {
                    continue;
                };
                if !end.converged || !mid.converged {
                    any_unconverged = true;
                }
                if end.degenerate {
                    any_degenerate = true;
                    continue;
                }
                any_ok = true;
                writeln!(
                    w,
                    "{},{},{},{},{},{},{}",
                    fmt(u),
                    end.site_entropy_i.map(fmt).unwrap_or_default(),
                    end.site_entropy_j.map(fmt).unwrap_or_default(),
                    end.s_up_i.map(fmt).unwrap_or_default(),
                    end.d_i.map(fmt).unwrap_or_default(),
                    mid.s_up_i.map(fmt).unwrap_or_default(),
                    mid.d_i.map(fmt).unwrap_or_default(),
                )
                .map_err(|e| e.to_string())?;
            }
            w.flush().map_err(|e| e.to_string())?;
        }
        "fig4" => {
            // (a) occupation probabilities of the 16 pair basis states at
            // U = 0; (b)-(d) eigenvalue curves P_k(U) per pair.
            let l = 4;
            let solver = ChainSolver::new(l, settings).map_err(|e| e.to_string())?;
            let point = solver.solve(0.0).map_err(|e| e.to_string())?;
            if !point.gs.converged {
                any_unconverged = true;
            }
            let path = out.join("fig4a.csv");
            let mut w = create(&path).map_err(|e| e.to_string())?;
            writeln!(w, "i,j,basis_index,label,N,two_sz,probability").map_err(|e| e.to_string())?;
            for (i, j) in [(1, 2), (2, 3), (1, 3), (1, 4)] {
                let pr = config
                    .convention
                    .pair_rdm(&point.gs, solver.basis(), i, j)
                    .map_err(|e| e.to_string())?;
                for (idx, label, n, two_sz, p) in occupation_spectrum(&pr) {
                    writeln!(w, "{i},{j},{idx},{label},{n},{two_sz},{}", fmt(p))
                        .map_err(|e| e.to_string())?;
                }
            }
            w.flush().map_err(|e| e.to_string())?;
            any_ok = true;

            for (part, (i, j)) in [("b", (1, 2)), ("c", (2, 3)), ("d", (1, 3))] {
                let mut decomps = Vec::new();
                for &u in &us {
                    let point = solver.solve(u).map_err(|e| e.to_string())?;
                    if !point.gs.converged {
                        any_unconverged = true;
                    }
                    let pr = config
                        .convention
                        .pair_rdm(&point.gs, solver.basis(), i, j)
                        .map_err(|e| e.to_string())?;
                    decomps.push(spectral_decomposition(&pr));
                }
                let records = track_lhfs(&decomps, &us).map_err(|e| e.to_string())?;
                let path = out.join(format!("fig4{part}_rho{i}{j}.csv"));
                let mut w = create(&path).map_err(|e| e.to_string())?;
                writeln!(w, "U,k,P_k,N,two_sz,is_tracked_state").map_err(|e| e.to_string())?;
                for ((&u, decomp), record) in us.iter().zip(&decomps).zip(&records) {
                    for k in 0..16 {
                        writeln!(
                            w,
                            "{},{},{},{},{},{}",
                            fmt(u),
                            k,
                            fmt(decomp.eigenvalues[k]),
                            decomp.labels[k].0,
                            decomp.labels[k].1,
                            u8::from(k == record.eigen_index),
                        )
                        .map_err(|e| e.to_string())?;
                    }
                }
                w.flush().map_err(|e| e.to_string())?;
            }
        }
        "fig5a" | "fig5b" => {
            let pair = if name == "fig5a" { (1, 2) } else { (2, 3) };
            let sizes = curve_sizes(config, &[4, 6, 8, 10, 12]);
            let measures = MeasureSet {
                lhfs: true,
                ..Default::default()
            };
            per_l_pair_curves(
                pair,
                &sizes,
                name,
                measures,
                &|r| format!("{},{}", fmt(r.u), r.p_lhfs.map(fmt).unwrap_or_default()),
                "U,p_lhfs",
            )?;
        }
        "fig6b" => {
            let measures = MeasureSet {
                pair_entropy: true,
                ..Default::default()
            };
            for (i, j) in [(1, 2), (2, 3), (1, 3), (1, 4)] {
                per_l_pair_curves(
                    (i, j),
                    &[4],
                    &format!("fig6b_rho{i}{j}"),
                    measures,
                    &|r| {
                        format!(
                            "{},{}",
                            fmt(r.u),
                            r.pair_entropy.map(fmt).unwrap_or_default()
                        )
                    },
                    "U,pair_entropy",
                )?;
            }
        }
        "fig7a" | "fig7b" | "fig7c" => {
            let pairs: &[(usize, usize)] = match name {
                "fig7a" => &[(1, 2)],
                "fig7b" => &[(2, 3), (1, 4)],
                _ => &[(1, 3)],
            };
            let measures = MeasureSet {
                lbc: true,
                lhfs: true,
                frozen_lhfs: true,
                ..Default::default()
            };
            for &(i, j) in pairs {
                let sweep = sweep_chain_with_convention(
                    4,
                    &us,
                    &[(i, j)],
                    measures,
                    &settings,
                    config.frozen_ref_u,
                    config.convention,
                )
                .map_err(|e| e.to_string())?;
                let path = out.join(format!("{name}_rho{i}{j}.csv"));
                let mut w = create(&path).map_err(|e| e.to_string())?;
                writeln!(
                    w,
                    "U,tau2,sqrt_tau2,p_lhfs,lhfs_tau2,lhfs_sqrt_tau2,frozen_tau2,frozen_sqrt_tau2"
                )
                .map_err(|e| e.to_string())?;
                for r in &sweep.reports {
                    if !r.converged {
                        any_unconverged = true;
                    }
                    if r.degenerate {
                        any_degenerate = true;
                        continue;
                    }
                    any_ok = true;
                    let frozen = sweep
                        .frozen
                        .iter()
                        .find(|f| f.u == r.u && f.i == r.i && f.j == r.j);
                    let (ft, fs, lt, ls) = frozen
                        .map(|f| {
                            (
                                fmt(f.frozen_tau2),
                                fmt(f.frozen_sqrt_tau2),
                                fmt(f.lhfs_tau2),
                                fmt(f.lhfs_sqrt_tau2),
                            )
                        })
                        .unwrap_or_default();
                    writeln!(
                        w,
                        "{},{},{},{},{},{},{},{}",
                        fmt(r.u),
                        r.tau2.map(fmt).unwrap_or_default(),
                        r.sqrt_tau2.map(fmt).unwrap_or_default(),
                        r.p_lhfs.map(fmt).unwrap_or_default(),
                        lt,
                        ls,
                        ft,
                        fs,
                    )
                    .map_err(|e| e.to_string())?;
                }
                w.flush().map_err(|e| e.to_string())?;
            }
        }
        other => return Err(format!("unknown figure '{other}'")),
    }

    Ok(FigureStatus {
        any_unconverged,
        all_degenerate: any_degenerate && !any_ok,
    })
}

/// Report writer for the confinement analysis.
pub fn write_confinement_csv(path: &Path, rows: &[(String, f64)]) -> std::io::Result<()> {
    let mut w = create(path)?;
    writeln!(w, "quantity,value")?;
    for (name, value) in rows {
        writeln!(w, "{name},{}", fmt(*value))?;
    }
    w.flush()
}
