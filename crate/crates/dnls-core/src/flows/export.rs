use std::path::Path;

use super::integrator::Trajectory;
use crate::error::Result;
use crate::io::{fmt_f64, CsvTable};
use crate::spectral::snapshot::write_snapshot;

pub const MONITOR_BASE_COLUMNS: [&str; 4] = ["t", "M", "H", "H2"];

/// One row per recorded time; probe columns follow the κ order of the run.
pub fn monitors_table(traj: &Trajectory) -> CsvTable {
    let mut header: Vec<String> = MONITOR_BASE_COLUMNS.iter().map(|s| s.to_string()).collect();
    if let Some(first) = traj.monitors.first() {
        for p in &first.probes {
            let k = fmt_f64(p.kappa);
            header.push(format!("re_a_{k}"));
            header.push(format!("im_a_{k}"));
            header.push(format!("beta2_{k}"));
        }
    }
    let mut table = CsvTable::new(&header);
    for (t, m) in traj.times.iter().zip(&traj.monitors) {
        let mut row = vec![*t, m.m, m.h, m.h2];
        for p in &m.probes {
            row.extend([p.a.re, p.a.im, p.beta2]);
        }
        table.push_numbers(&row);
    }
    table
}

/// Writes `snap_NNNNNN.bin` per recorded state and `monitors.csv` into `dir`.
pub fn export_trajectory(traj: &Trajectory, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (i, q) in traj.states.iter().enumerate() {
        write_snapshot(&dir.join(format!("snap_{i:06}.bin")), q)?;
    }
    monitors_table(traj).write(&dir.join("monitors.csv"))
}
