use std::path::Path;

use crate::diagnostics::energy::EnergyLedger;
use crate::error::{Error, Result};

pub const LEDGER_HEADER: [&str; 9] = [
    "t",
    "E",
    "D_visc",
    "D_dir",
    "D_align1",
    "D_align2",
    "residual",
    "max_div_u",
    "max_unit_violation",
];

pub const EVENTS_HEADER: [&str; 6] = ["t", "cx", "cy", "r", "local_energy", "threshold"];

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Domain(format!("csv: {other:?}")),
    }
}

fn write_rows<const N: usize>(path: &Path, header: [&str; N], rows: impl Iterator<Item = [f64; N]>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.iter().map(|v| format!("{v:?}"))).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Ledger rows to `path`; concentration events, when present, to `events_path`.
pub fn write_ledger(ledger: &EnergyLedger, path: impl AsRef<Path>, events_path: impl AsRef<Path>) -> Result<()> {
    write_rows(
        path.as_ref(),
        LEDGER_HEADER,
        ledger.rows().iter().map(|r| {
            [
                r.t,
                r.energy,
                r.dissipation.visc,
                r.dissipation.dir,
                r.dissipation.align1,
                r.dissipation.align2,
                r.residual,
                r.max_div_u,
                r.max_unit_violation,
            ]
        }),
    )?;
    if !ledger.events().is_empty() {
        write_rows(
            events_path.as_ref(),
            EVENTS_HEADER,
            ledger
                .events()
                .iter()
                .map(|e| [e.t, e.center.0, e.center.1, e.radius, e.local_energy, e.threshold]),
        )?;
    }
    Ok(())
}
