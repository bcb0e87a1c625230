//! CSV writers with locale-independent formatting: every float is printed
//! with 17 significant digits so reruns are byte-identical.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use hubent::sweep::{EntanglementReport, FrozenRecord, GroundPoint};

pub const SWEEP_HEADER: &str = "L,U,i,j,tau2,sqrt_tau2,pair_entropy,site_entropy_i,site_entropy_j,v_i,s_up_i,s_down_i,d_i,p_lhfs,ground_energy,gap,residual,degenerate";

pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

pub fn create(path: &Path) -> std::io::Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

pub fn write_sweep_csv(path: &Path, reports: &[EntanglementReport]) -> std::io::Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{SWEEP_HEADER}")?;
    for r in reports {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.l,
            fmt(r.u),
            r.i,
            r.j,
            fmt_opt(r.tau2),
            fmt_opt(r.sqrt_tau2),
            fmt_opt(r.pair_entropy),
            fmt_opt(r.site_entropy_i),
            fmt_opt(r.site_entropy_j),
            fmt_opt(r.v_i),
            fmt_opt(r.s_up_i),
            fmt_opt(r.s_down_i),
            fmt_opt(r.d_i),
            fmt_opt(r.p_lhfs),
            fmt(r.ground_energy),
            fmt(r.gap),
            fmt(r.residual),
            u8::from(r.degenerate),
        )?;
    }
    w.flush()
}

pub fn write_frozen_csv(path: &Path, records: &[FrozenRecord]) -> std::io::Result<()> {
    let mut w = create(path)?;
    writeln!(
        w,
        "L,U,i,j,frozen_tau2,frozen_sqrt_tau2,lhfs_tau2,lhfs_sqrt_tau2"
    )?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.l,
            fmt(r.u),
            r.i,
            r.j,
            fmt(r.frozen_tau2),
            fmt(r.frozen_sqrt_tau2),
            fmt(r.lhfs_tau2),
            fmt(r.lhfs_sqrt_tau2),
        )?;
    }
    w.flush()
}

pub fn write_ground_csv(path: &Path, points: &[GroundPoint]) -> std::io::Result<()> {
    let mut w = create(path)?;
    writeln!(w, "L,U,ground_energy,gap,residual,converged,degenerate")?;
    for p in points {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            p.l,
            fmt(p.u),
            fmt(p.energy),
            fmt(p.gap),
            fmt(p.residual),
            u8::from(p.converged),
            u8::from(p.degenerate),
        )?;
    }
    w.flush()
}
