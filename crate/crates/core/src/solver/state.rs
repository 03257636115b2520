use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fields::{Field, TorusGrid};

/// Velocity, director and time of one instant of the flow.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub u: Field,
    pub d: Field,
    pub t: f64,
}

impl FlowState {
    pub fn new(u: Field, d: Field, t: f64) -> Result<Self> {
        u.require_components(2, "velocity")?;
        d.require_components(3, "director")?;
        u.require_same_grid(&d)?;
        if !t.is_finite() {
            return Err(Error::Domain(format!("time {t} is not finite")));
        }
        Ok(Self { u, d, t })
    }

    /// Fluid at rest with a uniform director.
    pub fn at_rest(grid: &Arc<TorusGrid>, director: [f64; 3]) -> Self {
        Self {
            u: Field::zeros(grid, 2),
            d: Field::from_fn(grid, 3, |c, _, _| director[c]),
            t: 0.0,
        }
    }

    pub fn grid(&self) -> &Arc<TorusGrid> {
        self.u.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.d.is_finite() && self.t.is_finite()
    }

    /// `max | |d| - 1 |` over the grid.
    pub fn max_unit_violation(&self) -> f64 {
        self.d
            .pointwise_norm()
            .into_iter()
            .fold(0.0, |m, n| m.max((n - 1.0).abs()))
    }

    /// Same samples on a grid of a different period (used by rescaling audits).
    pub fn on_grid(&self, grid: &Arc<TorusGrid>) -> Result<Self> {
        Ok(Self {
            u: self.u.on_grid(grid)?,
            d: self.d.on_grid(grid)?,
            t: self.t,
        })
    }
}
