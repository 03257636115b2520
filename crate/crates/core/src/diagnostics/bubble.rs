//! Harmonic sphere-valued "bubbles" on the torus.
//!
//! A degree-`m` bubble of scale `λ` centred at `c` is the inverse
//! stereographic image of `w = ((z - c)/λ)^m`:
//! `d = (2 Re w, 2 Im w, 1 - |w|²) / (1 + |w|²)`, with Dirichlet energy
//! `8π m` on the plane. The plane map is not periodic, so far from the core
//! the reciprocal `v = 1/w` is multiplied by a smooth radial cutoff that
//! brings the director exactly to the south pole before the cell boundary.
//! Inside the inner taper radius the map is the exact rational one.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fields::{Field, TorusGrid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BubbleSpec {
    pub center: (f64, f64),
    pub scale: f64,
    pub degree: u32,
    /// `(inner, outer)` radii of the far-field taper; `None` uses
    /// `(0.25 L, 0.45 L)`.
    pub taper: Option<(f64, f64)>,
}

impl BubbleSpec {
    pub fn new(center: (f64, f64), scale: f64, degree: u32) -> Self {
        Self {
            center,
            scale,
            degree,
            taper: None,
        }
    }

    pub fn with_taper(mut self, inner: f64, outer: f64) -> Self {
        self.taper = Some((inner, outer));
        self
    }

    fn resolved_taper(&self, grid: &TorusGrid) -> (f64, f64) {
        self.taper.unwrap_or((0.25 * grid.length(), 0.45 * grid.length()))
    }

    fn check(&self, grid: &TorusGrid) -> Result<()> {
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::Domain(format!("bubble scale {} must be positive", self.scale)));
        }
        if self.degree == 0 {
            return Err(Error::Domain("bubble degree must be at least 1".into()));
        }
        let (inner, outer) = self.resolved_taper(grid);
        if !(inner > 0.0 && inner < outer && outer <= 0.5 * grid.length()) {
            return Err(Error::Domain(format!(
                "bubble taper ({inner}, {outer}) must satisfy 0 < inner < outer <= L/2"
            )));
        }
        Ok(())
    }
}

/// Smooth step: 1 for `r <= inner`, 0 for `r >= outer`, C∞ in between.
fn taper(r: f64, inner: f64, outer: f64) -> f64 {
    fn bump(t: f64) -> f64 {
        if t > 0.0 {
            (-1.0 / t).exp()
        } else {
            0.0
        }
    }
    if r <= inner {
        return 1.0;
    }
    if r >= outer {
        return 0.0;
    }
    let s = (r - inner) / (outer - inner);
    let a = bump(1.0 - s);
    a / (a + bump(s))
}

/// Complex multiply helpers on `(re, im)` pairs.
fn cmul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn cpow(z: (f64, f64), m: u32) -> (f64, f64) {
    (0..m).fold((1.0, 0.0), |acc, _| cmul(acc, z))
}

fn cinv(z: (f64, f64)) -> (f64, f64) {
    let s = z.0 * z.0 + z.1 * z.1;
    (z.0 / s, -z.1 / s)
}

/// Single bubble.
pub fn make_bubble(grid: &Arc<TorusGrid>, spec: &BubbleSpec) -> Result<Field> {
    make_bubbles(grid, std::slice::from_ref(spec))
}

/// Several bubbles combined through the sum of their tapered reciprocal
/// maps `v = Σ χ_i (λ_i / (z - c_i))^{m_i}`; well separated bubbles keep
/// their individual energies.
pub fn make_bubbles(grid: &Arc<TorusGrid>, specs: &[BubbleSpec]) -> Result<Field> {
    for s in specs {
        s.check(grid)?;
    }
    let tapers: Vec<_> = specs.iter().map(|s| s.resolved_taper(grid)).collect();
    let mut d = Field::zeros(grid, 3);
    for idx in 0..grid.len() {
        let mut v = (0.0, 0.0);
        let mut at_core = false;
        for (s, &(inner, outer)) in specs.iter().zip(&tapers) {
            let (dx, dy) = grid.displacement(idx, s.center.0, s.center.1);
            let r = dx.hypot(dy);
            if r == 0.0 {
                at_core = true;
                break;
            }
            let chi = taper(r, inner, outer);
            if chi == 0.0 {
                continue;
            }
            // (λ / ζ)^m
            let term = cpow(cinv((dx / s.scale, dy / s.scale)), s.degree);
            v.0 += chi * term.0;
            v.1 += chi * term.1;
        }
        let out = if at_core {
            [0.0, 0.0, 1.0]
        } else {
            let v_sq = v.0 * v.0 + v.1 * v.1;
            if v_sq <= 1.0 {
                let den = 1.0 + v_sq;
                [2.0 * v.0 / den, -2.0 * v.1 / den, (v_sq - 1.0) / den]
            } else {
                let w = cinv(v);
                let w_sq = w.0 * w.0 + w.1 * w.1;
                let den = 1.0 + w_sq;
                [2.0 * w.0 / den, 2.0 * w.1 / den, (1.0 - w_sq) / den]
            }
        };
        for (k, val) in out.into_iter().enumerate() {
            d.component_mut(k)[idx] = val;
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::kinetic_elastic_energy;
    use std::f64::consts::PI;

    #[test]
    fn unit_length_everywhere() {
        let g = Arc::new(TorusGrid::periodic(64).unwrap());
        for (scale, m) in [(0.3, 1), (0.05, 2), (1.0, 3)] {
            let d = make_bubble(&g, &BubbleSpec::new((PI, PI), scale, m)).unwrap();
            for n in d.pointwise_norm() {
                assert!((n - 1.0).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn exact_rational_map_inside_taper() {
        let g = Arc::new(TorusGrid::periodic(32).unwrap());
        let spec = BubbleSpec::new((PI, PI), 0.4, 1);
        let d = make_bubble(&g, &spec).unwrap();
        for idx in 0..g.len() {
            let (dx, dy) = g.displacement(idx, PI, PI);
            if dx.hypot(dy) > 0.25 * g.length() {
                continue;
            }
            let (wr, wi) = (dx / 0.4, dy / 0.4);
            let s = wr * wr + wi * wi;
            let want = [2.0 * wr / (1.0 + s), 2.0 * wi / (1.0 + s), (1.0 - s) / (1.0 + s)];
            for k in 0..3 {
                assert!((d.component(k)[idx] - want[k]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn energy_quantized_at_moderate_resolution() {
        let g = Arc::new(TorusGrid::periodic(128).unwrap());
        let d = make_bubble(&g, &BubbleSpec::new((PI, PI), 0.1, 1)).unwrap();
        let e = kinetic_elastic_energy(&Field::zeros(&g, 2), &d).unwrap();
        assert!((e / (8.0 * PI) - 1.0).abs() < 0.01, "{e}");
    }

    #[test]
    fn rejects_bad_specs() {
        let g = Arc::new(TorusGrid::periodic(16).unwrap());
        assert!(make_bubble(&g, &BubbleSpec::new((0.0, 0.0), 0.0, 1)).is_err());
        assert!(make_bubble(&g, &BubbleSpec::new((0.0, 0.0), 0.1, 0)).is_err());
        let wide = BubbleSpec::new((0.0, 0.0), 0.1, 1).with_taper(1.0, 4.0);
        assert!(make_bubble(&g, &wide).is_err());
    }
}
