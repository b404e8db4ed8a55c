//! CSV emission of averaged series.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Result, SimError};
use crate::experiment::Series;

pub const HEADER: &str = "controller,t,att_err_rad,mom_err,ctrl_effort,cum_energy,lyapunov";

/// One row per (kind, sample), floats with 17 significant digits, LF endings.
pub fn render_csv(series: &[Series]) -> String {
    let rows: usize = series.iter().map(|s| s.records.len()).sum();
    let mut out = String::with_capacity(HEADER.len() + 1 + rows * 150);
    out.push_str(HEADER);
    out.push('\n');
    for s in series {
        let name = s.kind.name();
        for r in &s.records {
            writeln!(
                out,
                "{name},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.t, r.att_err, r.mom_err, r.ctrl_effort, r.cum_energy, r.lyapunov
            )
            .expect("writing to a String cannot fail");
        }
    }
    out
}

pub fn write_csv(series: &[Series], path: &Path) -> Result<()> {
    std::fs::write(path, render_csv(series)).map_err(|source| SimError::Write { path: path.into(), source })
}
