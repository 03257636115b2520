//! Binary snapshot files.
//!
//! Layout (little-endian): 8-byte magic `NEM2DV01`, `u64` n, `f64` L,
//! `f64` t, `u8` director mode flag, then `2n²` velocity and `3n²` director
//! samples, component by component.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fields::{Field, TorusGrid};
use crate::solver::FlowState;

pub const MAGIC: &[u8; 8] = b"NEM2DV01";

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub state: FlowState,
    pub mode_flag: u8,
}

fn snap_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Snapshot {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

pub fn write_snapshot(state: &FlowState, mode_flag: u8, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let grid = state.grid();
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&(grid.n() as u64).to_le_bytes())?;
    w.write_all(&grid.length().to_le_bytes())?;
    w.write_all(&state.t.to_le_bytes())?;
    w.write_all(&[mode_flag])?;
    for v in state.u.values().iter().chain(state.d.values()) {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

struct Cursor<'a> {
    path: &'a Path,
    r: BufReader<File>,
}

impl Cursor<'_> {
    fn bytes<const N: usize>(&mut self, what: &str) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        self.r.read_exact(&mut buf).map_err(|e| match e.kind() {
            std::io::ErrorKind::UnexpectedEof => snap_err(self.path, format!("short read in {what}")),
            _ => Error::Io(e),
        })?;
        Ok(buf)
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes::<8>(what)?))
    }

    fn samples(&mut self, count: usize, what: &str) -> Result<Vec<f64>> {
        (0..count).map(|_| self.f64(what)).collect()
    }
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<Snapshot> {
    read_with(path.as_ref(), None)
}

/// Read a snapshot that must live on `grid` (same n and L).
pub fn read_snapshot_on(path: impl AsRef<Path>, grid: &Arc<TorusGrid>) -> Result<Snapshot> {
    read_with(path.as_ref(), Some(grid))
}

fn read_with(path: &Path, expected: Option<&Arc<TorusGrid>>) -> Result<Snapshot> {
    let mut c = Cursor {
        path,
        r: BufReader::new(File::open(path)?),
    };
    if &c.bytes::<8>("magic")? != MAGIC {
        return Err(snap_err(path, "magic mismatch (not a NEM2DV01 snapshot)"));
    }
    let n = u64::from_le_bytes(c.bytes::<8>("header")?) as usize;
    let length = c.f64("header")?;
    let t = c.f64("header")?;
    let [mode_flag] = c.bytes::<1>("header")?;
    let grid = match expected {
        Some(g) => {
            if g.n() != n {
                return Err(Error::Shape(format!(
                    "snapshot {} has n = {n}, expected n = {}",
                    path.display(),
                    g.n()
                )));
            }
            if g.length() != length {
                return Err(Error::Shape(format!(
                    "snapshot {} has L = {length}, expected L = {}",
                    path.display(),
                    g.length()
                )));
            }
            Arc::clone(g)
        }
        None => Arc::new(TorusGrid::new(n, length).map_err(|e| snap_err(path, e.to_string()))?),
    };
    let u = Field::from_values(&grid, 2, c.samples(2 * n * n, "velocity")?)?;
    let d = Field::from_values(&grid, 3, c.samples(3 * n * n, "director")?)?;
    let mut rest = Vec::new();
    c.r.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(snap_err(path, format!("{} trailing bytes", rest.len())));
    }
    Ok(Snapshot {
        state: FlowState::new(u, d, t)?,
        mode_flag,
    })
}

/// Sorted `*.snap` files of a directory.
pub fn list_snapshots(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "snap"))
        .collect();
    out.sort();
    Ok(out)
}

/// Conventional snapshot name for a step number.
pub fn snapshot_name(step: usize) -> String {
    format!("step_{step:08}.snap")
}
