use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::dynamics::RunObserver;
use crate::error::{Result, SimError};
use crate::state::State;

use super::snapshot::write_snapshot;

/// First line of every diagnostics file; bump the version when columns change.
pub const DIAGNOSTICS_HEADER: &str = "# lc-emulsion diagnostics v1\nstep,t,e_mix,e_pol,e_anch,e_gamma,e_kin,e_total,energy_rate,mass,max_abs_d,newton_iters,residual_norm,dissipation_estimate";

/// One line of `diagnostics.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRow {
    pub step: usize,
    pub t: f64,
    pub e_mix: f64,
    pub e_pol: f64,
    pub e_anch: f64,
    pub e_gamma: f64,
    pub e_kin: f64,
    pub e_total: f64,
    pub energy_rate: f64,
    pub mass: f64,
    pub max_abs_d: f64,
    pub newton_iters: usize,
    pub residual_norm: f64,
    pub dissipation_estimate: f64,
}

impl DiagnosticsRow {
    /// CSV line without the trailing newline. Floats use the shortest
    /// representation that round-trips.
    pub fn to_csv(&self) -> String {
        format!(
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{},{:e},{:e}",
            self.step,
            self.t,
            self.e_mix,
            self.e_pol,
            self.e_anch,
            self.e_gamma,
            self.e_kin,
            self.e_total,
            self.energy_rate,
            self.mass,
            self.max_abs_d,
            self.newton_iters,
            self.residual_norm,
            self.dissipation_estimate
        )
    }
}

/// Appends one row to any writer.
pub fn append_diagnostics(row: &DiagnosticsRow, sink: &mut impl Write) -> std::io::Result<()> {
    writeln!(sink, "{}", row.to_csv())
}

/// Diagnostics file that rejects rows whose step does not increase.
pub struct DiagnosticsWriter {
    path: PathBuf,
    out: BufWriter<File>,
    last_step: Option<usize>,
}

impl DiagnosticsWriter {
    pub fn create(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let file = File::create(&path).map_err(|e| SimError::io(&path, e))?;
        let mut out = BufWriter::new(file);
        writeln!(out, "{DIAGNOSTICS_HEADER}").map_err(|e| SimError::io(&path, e))?;
        Ok(DiagnosticsWriter {
            path,
            out,
            last_step: None,
        })
    }

    pub fn append(&mut self, row: &DiagnosticsRow) -> Result<()> {
        if self.last_step.is_some_and(|s| row.step <= s) {
            return Err(SimError::Format {
                path: self.path.clone(),
                msg: format!(
                    "diagnostics step {} does not follow {}",
                    row.step,
                    self.last_step.unwrap_or(0)
                ),
            });
        }
        self.last_step = Some(row.step);
        append_diagnostics(row, &mut self.out).map_err(|e| SimError::io(&self.path, e))
    }

    pub fn flush(&mut self) -> Result<()> {
        self.out.flush().map_err(|e| SimError::io(&self.path, e))
    }
}

/// Observer writing `diagnostics.csv` and periodic snapshots
/// `snapshot_<step>.bin` into an output directory.
pub struct RunOutput {
    dir: PathBuf,
    diag: DiagnosticsWriter,
    snapshot_every: usize,
    /// Progress lines on stderr every this many steps (0 disables).
    pub progress_every: usize,
}

impl RunOutput {
    pub fn create(dir: impl AsRef<Path>, snapshot_every: usize) -> Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        std::fs::create_dir_all(&dir).map_err(|e| SimError::io(&dir, e))?;
        let diag = DiagnosticsWriter::create(dir.join("diagnostics.csv"))?;
        Ok(RunOutput {
            dir,
            diag,
            snapshot_every,
            progress_every: 0,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn snapshot_path(&self, step: usize) -> PathBuf {
        self.dir.join(format!("snapshot_{step:07}.bin"))
    }

    pub fn finish(&mut self, final_state: &State) -> Result<()> {
        self.diag.flush()?;
        write_snapshot(final_state, self.dir.join("final.bin"))
    }
}

impl RunObserver for RunOutput {
    fn on_start(&mut self, state: &State, row: &DiagnosticsRow) -> Result<()> {
        self.diag.append(row)?;
        if self.snapshot_every > 0 {
            write_snapshot(state, self.snapshot_path(0))?;
        }
        Ok(())
    }

    fn on_step(&mut self, state: &State, row: &DiagnosticsRow) -> Result<()> {
        self.diag.append(row)?;
        if self.snapshot_every > 0 && row.step % self.snapshot_every == 0 {
            self.diag.flush()?;
            write_snapshot(state, self.snapshot_path(row.step))?;
        }
        if self.progress_every > 0 && row.step % self.progress_every == 0 {
            eprintln!(
                "step {:>7}  t = {:.5}  E = {:.10e}  rate = {:+.3e}  newton = {}",
                row.step, row.t, row.e_total, row.energy_rate, row.newton_iters
            );
        }
        Ok(())
    }
}
