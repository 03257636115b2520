//! Windowed energy `∫_{B_r(x)} (|u|² + |∇d|²)` at every grid centre.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::energy::{energy_density, ConcentrationEvent};
use crate::error::{Error, Result};
use crate::fields::{Field, TorusGrid};
use crate::solver::FlowState;

pub const DEFAULT_THRESHOLD: f64 = 8.0 * PI;
pub const DEFAULT_FLAG_TOL: f64 = 0.01;

/// Sub-samples per cell edge for partially covered cells.
const EDGE_SAMPLES: usize = 64;

/// Length of `[lo, hi] ∩ [-c, c]`.
fn overlap(lo: f64, hi: f64, c: f64) -> f64 {
    (hi.min(c) - lo.max(-c)).max(0.0)
}

/// Fraction of the cell centred at `(x, y)` (side `h`) inside the disc of
/// radius `r` about the origin: exact chord lengths in `y`, midpoint rule in `x`.
fn cell_fraction(x: f64, y: f64, h: f64, r: f64) -> f64 {
    let near = (x.abs() - 0.5 * h).max(0.0).hypot((y.abs() - 0.5 * h).max(0.0));
    let far = (x.abs() + 0.5 * h).hypot(y.abs() + 0.5 * h);
    if near >= r {
        return 0.0;
    }
    if far <= r {
        return 1.0;
    }
    let step = h / EDGE_SAMPLES as f64;
    let mut acc = 0.0;
    for s in 0..EDGE_SAMPLES {
        let xs = x - 0.5 * h + (s as f64 + 0.5) * step;
        if xs.abs() < r {
            let c = (r * r - xs * xs).sqrt();
            acc += overlap(y - 0.5 * h, y + 0.5 * h, c);
        }
    }
    acc * step / (h * h)
}

/// Disc indicator of radius `r` centred on grid point 0, with partially
/// covered cells weighted by their area fraction.
pub fn disc_weights(grid: &TorusGrid, r: f64) -> Result<Vec<f64>> {
    check_radius(grid, r)?;
    let h = grid.spacing();
    Ok((0..grid.len())
        .map(|idx| {
            let (dx, dy) = grid.displacement(idx, 0.0, 0.0);
            cell_fraction(dx, dy, h, r)
        })
        .collect())
}

/// Area-fraction weights of `B_r(center)` for an arbitrary centre.
pub fn disc_weights_at(grid: &TorusGrid, center: (f64, f64), r: f64) -> Result<Vec<f64>> {
    if !(r > 0.0 && r < 0.5 * grid.length()) {
        return Err(Error::Domain(format!(
            "ball radius {r} must lie in (0, L/2) with L = {}",
            grid.length()
        )));
    }
    let h = grid.spacing();
    Ok((0..grid.len())
        .map(|idx| {
            let (dx, dy) = grid.displacement(idx, center.0, center.1);
            cell_fraction(dx, dy, h, r)
        })
        .collect())
}

fn check_radius(grid: &TorusGrid, r: f64) -> Result<()> {
    let h = grid.spacing();
    if !(r >= 2.0 * h && r < 0.5 * grid.length()) {
        return Err(Error::Domain(format!(
            "scan radius {r} must lie in [2h, L/2) = [{}, {})",
            2.0 * h,
            0.5 * grid.length()
        )));
    }
    Ok(())
}

/// Windowed integral of a scalar density over `B_r(x)` for every grid point
/// `x`, by circular convolution with the disc weights.
pub fn windowed_integral(density: &Field, r: f64) -> Result<Field> {
    density.require_components(1, "windowed integral")?;
    let grid = density.grid();
    let w = disc_weights(grid, r)?;
    let wh = grid.forward(&w);
    let fh = grid.forward(density.component(0));
    let prod: Vec<Complex64> = fh.iter().zip(&wh).map(|(a, b)| a * b).collect();
    let area = grid.cell_area();
    let vals = grid.inverse(prod).into_iter().map(|v| v * area).collect();
    Field::from_values(grid, 1, vals)
}

/// Local energy in `B_r(x)` for every grid point.
pub fn local_energy_map(state: &FlowState, r: f64) -> Result<Field> {
    windowed_integral(&energy_density(state), r)
}

/// Every grid centre whose local energy reaches `threshold·(1 - flag_tol)`.
pub fn concentration_scan(state: &FlowState, r: f64, threshold: f64, flag_tol: f64) -> Result<Vec<ConcentrationEvent>> {
    let map = local_energy_map(state, r)?;
    let grid = state.grid();
    let cut = threshold * (1.0 - flag_tol);
    Ok(map
        .component(0)
        .iter()
        .enumerate()
        .filter(|(_, &e)| e >= cut)
        .map(|(idx, &e)| ConcentrationEvent {
            t: state.t,
            center: grid.coords(idx),
            radius: r,
            local_energy: e,
            threshold,
        })
        .collect())
}

/// Connected group of flagged grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    /// Member with the largest local energy.
    pub peak: ConcentrationEvent,
    pub members: Vec<ConcentrationEvent>,
}

/// Group events whose centres are grid neighbours (8-connectivity on the torus).
pub fn clusters(grid: &TorusGrid, events: &[ConcentrationEvent]) -> Vec<Cluster> {
    let h = grid.spacing();
    let near = |a: &ConcentrationEvent, b: &ConcentrationEvent| {
        let dx = grid.wrap(a.center.0 - b.center.0).abs();
        let dy = grid.wrap(a.center.1 - b.center.1).abs();
        dx.max(dy) <= 1.5 * h
    };
    let mut label = vec![usize::MAX; events.len()];
    let mut out = Vec::new();
    for start in 0..events.len() {
        if label[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        label[start] = id;
        let mut stack = vec![start];
        let mut members = Vec::new();
        while let Some(i) = stack.pop() {
            members.push(events[i]);
            for j in 0..events.len() {
                if label[j] == usize::MAX && near(&events[i], &events[j]) {
                    label[j] = id;
                    stack.push(j);
                }
            }
        }
        let peak = *members
            .iter()
            .max_by(|a, b| a.local_energy.total_cmp(&b.local_energy))
            .expect("cluster has at least one member");
        out.push(Cluster { peak, members });
    }
    out
}
