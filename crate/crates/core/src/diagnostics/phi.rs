//! Scale-invariant monitor on parabolic cylinders `P_r(z0) = B_r(x0) × [t0 - r², t0]`:
//!
//! `Φ = (∫|u|⁴)^¼ + (∫|∇u|²)^½ + (∫|∇d|⁴)^¼ + (∫|Δd|²)^½ + (∫|P|²)^½`.

use std::sync::Arc;

use super::concentration::disc_weights_at;
use crate::error::{Error, Result};
use crate::fields::{self, spectral};
use crate::params::LeslieCoefficients;
use crate::solver::{recover_pressure, FlowState};

/// The five terms of `Φ`, each already raised to its root.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhiTerms {
    pub velocity: f64,
    pub velocity_gradient: f64,
    pub director_gradient: f64,
    pub director_laplacian: f64,
    pub pressure: f64,
}

impl PhiTerms {
    pub fn total(&self) -> f64 {
        self.velocity + self.velocity_gradient + self.director_gradient + self.director_laplacian + self.pressure
    }
}

/// Ball integrals `[|u|⁴, |∇u|², |∇d|⁴, |Δd|², |P|²]` of one state.
fn ball_integrals(state: &FlowState, coeffs: &LeslieCoefficients, center: (f64, f64), r: f64) -> Result<[f64; 5]> {
    let grid = state.grid();
    let w = disc_weights_at(grid, center, r)?;
    let p = recover_pressure(&state.u, &state.d, coeffs)?;
    let u_sq = state.u.pointwise_norm_sq();
    let gu_sq = fields::gradient(&state.u).pointwise_norm_sq();
    let gd_sq = fields::gradient(&state.d).pointwise_norm_sq();
    let lap_sq = fields::laplacian(&state.d).pointwise_norm_sq();
    let mut acc = [0.0; 5];
    for idx in 0..grid.len() {
        if w[idx] == 0.0 {
            continue;
        }
        let pv = p.component(0)[idx];
        let vals = [
            u_sq[idx] * u_sq[idx],
            gu_sq[idx],
            gd_sq[idx] * gd_sq[idx],
            lap_sq[idx],
            pv * pv,
        ];
        for (a, v) in acc.iter_mut().zip(vals) {
            *a += w[idx] * v;
        }
    }
    let area = grid.cell_area();
    Ok(acc.map(|a| a * area))
}

/// `Φ(u, d, P, (center, t0), r)` from a stored window. Pressure is recovered
/// for every state; the ball integrals are interpolated linearly in time and
/// integrated exactly over `[t0 - r², t0]`.
pub fn phi(window: &[FlowState], coeffs: &LeslieCoefficients, center: (f64, f64), t0: f64, r: f64) -> Result<PhiTerms> {
    let (a, b) = (t0 - r * r, t0);
    let slack = 1e-9 * r * r;
    let (first, last) = match (window.first(), window.last()) {
        (Some(f), Some(l)) if window.len() >= 2 => (f, l),
        _ => return Err(Error::Domain("phi needs at least two states".into())),
    };
    if first.t > a + slack || last.t < b - slack {
        return Err(Error::Domain(format!(
            "window [{}, {}] does not cover [t0 - r², t0] = [{a}, {b}]",
            first.t, last.t
        )));
    }
    let max_gap = r * r / 8.0;
    let mut total = [0.0; 5];
    let mut cache: Option<(usize, [f64; 5])> = None;
    for k in 0..window.len() - 1 {
        let (s0, s1) = (&window[k], &window[k + 1]);
        let (ta, tb) = (s0.t, s1.t);
        if tb <= ta {
            return Err(Error::Domain("window times must increase".into()));
        }
        let (lo, hi) = (ta.max(a), tb.min(b));
        if hi <= lo {
            continue;
        }
        if tb - ta > max_gap * (1.0 + 1e-9) {
            return Err(Error::Domain(format!(
                "snapshot spacing {} exceeds r²/8 = {max_gap}",
                tb - ta
            )));
        }
        let f0 = match cache {
            Some((i, v)) if i == k => v,
            _ => ball_integrals(s0, coeffs, center, r)?,
        };
        let f1 = ball_integrals(s1, coeffs, center, r)?;
        cache = Some((k + 1, f1));
        // exact integral of the linear interpolant over [lo, hi]
        let frac = |t: f64| (t - ta) / (tb - ta);
        let (p, q) = (frac(lo), frac(hi));
        for c in 0..5 {
            let at = |s: f64| f0[c] + s * (f1[c] - f0[c]);
            total[c] += 0.5 * (hi - lo) * (at(p) + at(q));
        }
    }
    Ok(PhiTerms {
        velocity: total[0].powf(0.25),
        velocity_gradient: total[1].sqrt(),
        director_gradient: total[2].powf(0.25),
        director_laplacian: total[3].sqrt(),
        pressure: total[4].sqrt(),
    })
}

/// Parabolic rescaling about the origin and `t0`: the same samples on a box
/// of side `L/r` with `u ↦ r·u`, `d ↦ d` and `t ↦ (t - t0)/r²`. A point
/// `x0` of the original box becomes `x0 / r`, and `t0` becomes `0`.
pub fn parabolic_rescale(trajectory: &[FlowState], r: f64, t0: f64) -> Result<Vec<FlowState>> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::Domain(format!("rescaling factor {r} must be positive")));
    }
    let Some(first) = trajectory.first() else {
        return Ok(Vec::new());
    };
    let grid = Arc::new(first.grid().with_length(first.grid().length() / r)?);
    trajectory
        .iter()
        .map(|s| {
            let mut out = s.on_grid(&grid)?;
            out.u.scale(r);
            out.t = (s.t - t0) / (r * r);
            Ok(out)
        })
        .collect()
}

/// `∫_{B_r(x0)} f` of a scalar sample vector, for tests and probes.
pub fn ball_integral(grid: &crate::fields::TorusGrid, values: &[f64], center: (f64, f64), r: f64) -> Result<f64> {
    let w = disc_weights_at(grid, center, r)?;
    let weighted: Vec<f64> = w.iter().zip(values).map(|(a, b)| a * b).collect();
    Ok(spectral::integrate_values(grid, &weighted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::TorusGrid;
    use crate::initial::{InitialCondition, RandomSeeded};
    use crate::solver::{Solver, SolverConfig};

    fn reference() -> LeslieCoefficients {
        LeslieCoefficients::new([0.0, -2.0, 1.0, 4.0, 1.0, 0.0]).unwrap()
    }

    fn trajectory(steps: usize) -> Vec<FlowState> {
        let g = Arc::new(TorusGrid::periodic(32).unwrap());
        let sv = Solver::new(
            reference(),
            SolverConfig {
                dt: 2e-3,
                ..Default::default()
            },
        )
        .unwrap();
        let mut s = RandomSeeded::default().build(&g).unwrap();
        let mut out = vec![s.clone()];
        for _ in 0..steps {
            s = sv.advance(&s).unwrap();
            out.push(s.clone());
        }
        out
    }

    #[test]
    fn zero_state_gives_zero() {
        let g = Arc::new(TorusGrid::periodic(16).unwrap());
        let window: Vec<_> = (0..=8)
            .map(|k| {
                let mut s = FlowState::at_rest(&g, [0.0, 0.0, 1.0]);
                s.t = k as f64 * 0.01 / 8.0;
                s
            })
            .collect();
        let p = phi(&window, &reference(), (1.0, 1.0), 0.01, 0.1).unwrap();
        assert_eq!(p.total(), 0.0);
    }

    #[test]
    fn rejects_short_window_and_coarse_cadence() {
        let tr = trajectory(10);
        assert!(phi(&tr, &reference(), (1.0, 1.0), 0.02, 0.5).is_err());
        assert!(phi(&tr[..2], &reference(), (1.0, 1.0), 0.002, 0.04).is_err());
        assert!(phi(&tr, &reference(), (1.0, 1.0), 0.02, 0.14).is_ok());
    }

    #[test]
    fn rescaling_identity() {
        let tr = trajectory(40);
        let (x0, t0, r) = ((2.0, 3.0), 0.08, 0.25);
        let direct = phi(&tr, &reference(), x0, t0, r).unwrap();
        let scaled = parabolic_rescale(&tr, r, t0).unwrap();
        let unit = phi(&scaled, &reference(), (x0.0 / r, x0.1 / r), 0.0, 1.0).unwrap();
        assert!((unit.total() / direct.total() - 1.0).abs() < 1e-10);
    }
}
