//! Binary PPM (P6) heatmaps of scalar fields.
//!
//! The image is `n × n` with the top row at the largest `y`. The grayscale
//! palette maps `[min, max]` to black..white (a constant field is mid-gray);
//! the signed palette maps `[-m, m]`, `m = max|f|`, to blue..white..red.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::diagnostics::energy::energy_density;
use crate::error::{Error, Result};
use crate::fields::Field;
use crate::registry::Registry;
use crate::solver::FlowState;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Palette {
    Grayscale,
    Signed,
}

impl std::str::FromStr for Palette {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grayscale" => Ok(Palette::Grayscale),
            "signed" => Ok(Palette::Signed),
            other => Err(Error::Domain(format!("unknown palette `{other}` (grayscale, signed)"))),
        }
    }
}

fn to_byte(x: f64) -> u8 {
    (x.clamp(0.0, 1.0) * 255.0).round() as u8
}

fn colour(v: f64, lo: f64, hi: f64, palette: Palette) -> [u8; 3] {
    match palette {
        Palette::Grayscale => {
            let g = if hi > lo { to_byte((v - lo) / (hi - lo)) } else { 128 };
            [g, g, g]
        }
        Palette::Signed => {
            let m = lo.abs().max(hi.abs());
            let s = if m > 0.0 { (v / m).clamp(-1.0, 1.0) } else { 0.0 };
            if s >= 0.0 {
                let c = to_byte(1.0 - s);
                [255, c, c]
            } else {
                let c = to_byte(1.0 + s);
                [c, c, 255]
            }
        }
    }
}

/// RGB bytes of the image, top row first.
pub fn heatmap_pixels(field: &Field, palette: Palette) -> Result<Vec<u8>> {
    field.require_components(1, "heatmap")?;
    let vals = field.component(0);
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            field: "heatmap",
            t: f64::NAN,
        });
    }
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let n = field.grid().n();
    let mut out = Vec::with_capacity(3 * vals.len());
    for j in (0..n).rev() {
        for i in 0..n {
            out.extend(colour(vals[j * n + i], lo, hi, palette));
        }
    }
    Ok(out)
}

pub fn render_heatmap(field: &Field, path: impl AsRef<Path>, palette: Palette) -> Result<()> {
    let pixels = heatmap_pixels(field, palette)?;
    let n = field.grid().n();
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P6\n{n} {n}\n255\n")?;
    w.write_all(&pixels)?;
    w.flush()?;
    Ok(())
}

/// Scalar quantity derived from a state for rendering.
pub trait FieldExtractor: Send + Sync {
    fn extract(&self, state: &FlowState) -> Result<Field>;
    fn palette(&self) -> Palette {
        Palette::Grayscale
    }
}

struct Speed;
struct EnergyDensity;
struct UnitViolation;

impl FieldExtractor for Speed {
    fn extract(&self, s: &FlowState) -> Result<Field> {
        Field::from_values(s.grid(), 1, s.u.pointwise_norm())
    }
}

impl FieldExtractor for EnergyDensity {
    fn extract(&self, s: &FlowState) -> Result<Field> {
        Ok(energy_density(s))
    }
}

impl FieldExtractor for UnitViolation {
    fn extract(&self, s: &FlowState) -> Result<Field> {
        let v = s.d.pointwise_norm().into_iter().map(|n| n - 1.0).collect();
        Field::from_values(s.grid(), 1, v)
    }

    fn palette(&self) -> Palette {
        Palette::Signed
    }
}

pub type ExtractorRegistry = Registry<dyn FieldExtractor, ()>;

/// Renderable fields keyed by name: `speed`, `energy_density`, `unit_violation`.
pub fn extractor_registry() -> ExtractorRegistry {
    let mut reg = ExtractorRegistry::new("heatmap field");
    reg.register("speed", |_| Ok(Box::new(Speed)));
    reg.register("energy_density", |_| Ok(Box::new(EnergyDensity)));
    reg.register("unit_violation", |_| Ok(Box::new(UnitViolation)));
    reg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::bubble::{make_bubble, BubbleSpec};
    use crate::fields::TorusGrid;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn grid(n: usize) -> Arc<TorusGrid> {
        Arc::new(TorusGrid::periodic(n).unwrap())
    }

    #[test]
    fn constant_field_is_mid_gray() {
        let g = grid(8);
        let f = Field::from_fn(&g, 1, |_, _, _| 3.0);
        assert!(heatmap_pixels(&f, Palette::Grayscale)
            .unwrap()
            .iter()
            .all(|&b| b == 128));
    }

    #[test]
    fn one_hot_pixel() {
        let g = grid(8);
        let mut f = Field::zeros(&g, 1);
        f.component_mut(0)[g.index(2, 5)] = 1.0;
        let px = heatmap_pixels(&f, Palette::Grayscale).unwrap();
        let white: Vec<usize> = (0..64).filter(|&p| px[3 * p] == 255).collect();
        // row 5 from the bottom is image row 2
        assert_eq!(white, vec![2 * 8 + 2]);
        assert_eq!(px.iter().filter(|&&b| b == 0).count(), 63 * 3);
    }

    #[test]
    fn signed_palette_is_symmetric() {
        assert_eq!(colour(0.0, -1.0, 2.0, Palette::Signed), [255, 255, 255]);
        assert_eq!(colour(2.0, -1.0, 2.0, Palette::Signed), [255, 0, 0]);
        assert_eq!(colour(-2.0, -2.0, 1.0, Palette::Signed), [0, 0, 255]);
    }

    #[test]
    fn ppm_header_and_size() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.ppm");
        let g = grid(16);
        render_heatmap(&Field::zeros(&g, 1), &p, Palette::Signed).unwrap();
        let bytes = std::fs::read(&p).unwrap();
        assert!(bytes.starts_with(b"P6\n16 16\n255\n"));
        assert_eq!(bytes.len(), 13 + 3 * 256);
        assert!(render_heatmap(&Field::zeros(&g, 2), &p, Palette::Signed).is_err());
    }

    #[test]
    fn bubble_energy_peaks_at_center() {
        let g = grid(64);
        let mut s = FlowState::at_rest(&g, [0.0, 0.0, 1.0]);
        s.d = make_bubble(&g, &BubbleSpec::new((PI, PI), 0.3, 1)).unwrap();
        let f = extractor_registry()
            .create("energy_density", &())
            .unwrap()
            .extract(&s)
            .unwrap();
        let px = heatmap_pixels(&f, Palette::Grayscale).unwrap();
        let brightest = (0..g.len()).max_by_key(|&p| px[3 * p]).unwrap();
        let (row, col) = (brightest / 64, brightest % 64);
        assert_eq!((63 - row, col), (32, 32));
    }
}
