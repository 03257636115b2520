use std::path::PathBuf;

use nematic_core::diagnostics::concentration::concentration_scan;
use nematic_core::diagnostics::EnergyLedger;
use nematic_core::io::snapshot::{snapshot_name, write_snapshot};
use nematic_core::solver::RunHook;
use nematic_core::{FlowState, Result};

/// Writes a snapshot file at its cadence.
pub struct SnapshotWriter {
    pub dir: PathBuf,
    pub every: usize,
    pub mode_flag: u8,
    pub last_step: Option<usize>,
}

impl RunHook for SnapshotWriter {
    fn every(&self) -> usize {
        self.every
    }

    fn observe(&mut self, step: usize, state: &FlowState, _: &mut EnergyLedger) -> Result<()> {
        write_snapshot(state, self.mode_flag, self.dir.join(snapshot_name(step)))?;
        self.last_step = Some(step);
        Ok(())
    }
}

/// Runs the concentration scan for every configured radius and records
/// flagged points in the ledger.
pub struct Scanner {
    pub radii: Vec<f64>,
    pub threshold: f64,
    pub flag_tol: f64,
    pub every: usize,
}

impl RunHook for Scanner {
    fn every(&self) -> usize {
        self.every
    }

    fn observe(&mut self, _: usize, state: &FlowState, ledger: &mut EnergyLedger) -> Result<()> {
        for &r in &self.radii {
            for e in concentration_scan(state, r, self.threshold, self.flag_tol)? {
                ledger.record_event(e);
            }
        }
        Ok(())
    }
}

/// Keeps states in memory for the post-run audits.
pub struct Recorder {
    pub every: usize,
    pub states: Vec<FlowState>,
}

impl RunHook for Recorder {
    fn every(&self) -> usize {
        self.every
    }

    fn observe(&mut self, _: usize, state: &FlowState, _: &mut EnergyLedger) -> Result<()> {
        self.states.push(state.clone());
        Ok(())
    }
}
