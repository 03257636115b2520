//! Named initial-condition presets and seeded random field generators.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::bubble::{make_bubble, BubbleSpec};
use crate::error::{Error, Result};
use crate::fields::{self, Field, TorusGrid};
use crate::io::snapshot;
use crate::registry::Registry;
use crate::solver::FlowState;

pub trait InitialCondition: fmt::Debug + Send + Sync {
    fn name(&self) -> &'static str;
    fn build(&self, grid: &Arc<TorusGrid>) -> Result<FlowState>;
}

/// Raw `key = value` parameters of a preset, as written in a config file.
pub type PresetParams = BTreeMap<String, String>;

struct ParamReader<'a> {
    preset: &'static str,
    params: &'a PresetParams,
}

impl<'a> ParamReader<'a> {
    fn new(preset: &'static str, params: &'a PresetParams, allowed: &[&str]) -> Result<Self> {
        if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::ConfigField {
                field: format!("initial.{k}"),
                message: format!("not a parameter of preset `{preset}` (allowed: {})", allowed.join(", ")),
            });
        }
        Ok(Self { preset, params })
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.params.get(key) {
            None => Ok(default),
            Some(raw) => raw
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| self.bad(key, raw, "a finite number")),
        }
    }

    fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        self.params.get(key).map(|_| self.f64_or(key, 0.0)).transpose()
    }

    fn int_or(&self, key: &str, default: i64) -> Result<i64> {
        match self.params.get(key) {
            None => Ok(default),
            Some(raw) => raw.trim().parse::<i64>().map_err(|_| self.bad(key, raw, "an integer")),
        }
    }

    fn string(&self, key: &str) -> Result<&'a str> {
        self.params
            .get(key)
            .map(|s| s.as_str())
            .ok_or_else(|| Error::ConfigField {
                field: format!("initial.{key}"),
                message: format!("required by preset `{}`", self.preset),
            })
    }

    fn bad(&self, key: &str, raw: &str, what: &str) -> Error {
        Error::ConfigField {
            field: format!("initial.{key}"),
            message: format!("`{raw}` is not {what}"),
        }
    }
}

/// `u = A (sin kx cos ky, -cos kx sin ky)` with `k = 2π/L`, director at the pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorGreen {
    pub amplitude: f64,
}

impl InitialCondition for TaylorGreen {
    fn name(&self) -> &'static str {
        "taylor_green"
    }

    fn build(&self, grid: &Arc<TorusGrid>) -> Result<FlowState> {
        let k = 2.0 * PI / grid.length();
        let a = self.amplitude;
        let u = Field::from_fn(grid, 2, |c, x, y| {
            if c == 0 {
                a * (k * x).sin() * (k * y).cos()
            } else {
                -a * (k * x).cos() * (k * y).sin()
            }
        });
        FlowState::new(
            u,
            Field::from_fn(grid, 3, |c, _, _| if c == 2 { 1.0 } else { 0.0 }),
            0.0,
        )
    }
}

/// In-plane geodesic director `(cos k·x, sin k·x, 0)`, fluid at rest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geodesic {
    pub kx: i64,
    pub ky: i64,
}

impl Geodesic {
    pub fn director(&self, grid: &Arc<TorusGrid>) -> Field {
        let s = 2.0 * PI / grid.length();
        let (kx, ky) = (self.kx as f64 * s, self.ky as f64 * s);
        Field::from_fn(grid, 3, |c, x, y| {
            let p = kx * x + ky * y;
            match c {
                0 => p.cos(),
                1 => p.sin(),
                _ => 0.0,
            }
        })
    }
}

impl InitialCondition for Geodesic {
    fn name(&self) -> &'static str {
        "geodesic"
    }

    fn build(&self, grid: &Arc<TorusGrid>) -> Result<FlowState> {
        FlowState::new(Field::zeros(grid, 2), self.director(grid), 0.0)
    }
}

/// Harmonic bubble director, fluid at rest. The centre defaults to the
/// middle of the box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bubble {
    pub scale: f64,
    pub degree: u32,
    pub center: Option<(f64, f64)>,
    pub taper: Option<(f64, f64)>,
}

impl InitialCondition for Bubble {
    fn name(&self) -> &'static str {
        "bubble"
    }

    fn build(&self, grid: &Arc<TorusGrid>) -> Result<FlowState> {
        let half = 0.5 * grid.length();
        let mut spec = BubbleSpec::new(self.center.unwrap_or((half, half)), self.scale, self.degree);
        spec.taper = self.taper;
        FlowState::new(Field::zeros(grid, 2), make_bubble(grid, &spec)?, 0.0)
    }
}

/// Seeded random smooth data: a solenoidal velocity from a random stream
/// function and a unit director obtained by normalizing a random smooth
/// 3-vector field around a fixed mean direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomSeeded {
    pub seed: u64,
    /// Mode amplitudes fall off as `|k|^-slope`.
    pub spectrum_slope: f64,
    /// Largest integer mode used.
    pub kmax: i64,
    pub velocity_rms: f64,
    /// RMS of the director perturbation before normalization.
    pub director_spread: f64,
}

impl Default for RandomSeeded {
    fn default() -> Self {
        Self {
            seed: 0,
            spectrum_slope: 2.0,
            kmax: 2,
            velocity_rms: 0.5,
            director_spread: 0.2,
        }
    }
}

/// Sum of `a_k cos(k·x + φ_k)` over `0 < |k|_∞ <= kmax` with uniform random
/// amplitudes scaled by `|k|^-slope`, normalized to unit RMS.
fn random_smooth_scalar(grid: &Arc<TorusGrid>, kmax: i64, slope: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let s = 2.0 * PI / grid.length();
    let mut modes = Vec::new();
    for mx in 0..=kmax {
        for my in -kmax..=kmax {
            if mx == 0 && my <= 0 {
                continue;
            }
            let k = ((mx * mx + my * my) as f64).sqrt();
            let amp: f64 = rng.gen_range(-1.0..1.0);
            let phase = rng.gen_range(0.0..2.0 * PI);
            modes.push((mx as f64 * s, my as f64 * s, amp * k.powf(-slope), phase));
        }
    }
    let mut out: Vec<f64> = (0..grid.len())
        .map(|idx| {
            let (x, y) = grid.coords(idx);
            modes.iter().map(|(kx, ky, a, p)| a * (kx * x + ky * y + p).cos()).sum()
        })
        .collect();
    let rms = (out.iter().map(|v| v * v).sum::<f64>() / out.len() as f64).sqrt();
    if rms > 0.0 {
        out.iter_mut().for_each(|v| *v /= rms);
    }
    out
}

impl RandomSeeded {
    pub fn velocity(&self, grid: &Arc<TorusGrid>) -> Result<Field> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let psi = Field::from_values(
            grid,
            1,
            random_smooth_scalar(grid, self.kmax, self.spectrum_slope + 1.0, &mut rng),
        )?;
        let grad = fields::gradient(&psi);
        let mut u = Field::from_components(grid, &[grad.component(1), grad.component(0)])?;
        u.component_mut(1).iter_mut().for_each(|v| *v = -*v);
        let u = fields::leray_project(&u)?;
        let rms = (u.pointwise_norm_sq().iter().sum::<f64>() / grid.len() as f64).sqrt();
        Ok(if rms > 0.0 {
            u.scaled(self.velocity_rms / rms)
        } else {
            u
        })
    }

    pub fn director(&self, grid: &Arc<TorusGrid>) -> Result<Field> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x9e37_79b9_7f4a_7c15);
        let mean = [1.0 / 3f64.sqrt(); 3];
        let mut values = Vec::with_capacity(3 * grid.len());
        for m in mean {
            let p = random_smooth_scalar(grid, self.kmax, self.spectrum_slope, &mut rng);
            values.extend(p.into_iter().map(|v| m + self.director_spread * v));
        }
        let mut d = Field::from_values(grid, 3, values)?;
        let norms = d.pointwise_norm();
        if norms.iter().any(|&n| n < 1e-3) {
            return Err(Error::Domain(
                "random director vanishes somewhere; lower director_spread".into(),
            ));
        }
        for k in 0..3 {
            for (v, n) in d.component_mut(k).iter_mut().zip(&norms) {
                *v /= n;
            }
        }
        Ok(d)
    }
}

impl InitialCondition for RandomSeeded {
    fn name(&self) -> &'static str {
        "random"
    }

    fn build(&self, grid: &Arc<TorusGrid>) -> Result<FlowState> {
        FlowState::new(self.velocity(grid)?, self.director(grid)?, 0.0)
    }
}

/// State read from a snapshot file; the file's grid must match.
#[derive(Debug, Clone, PartialEq)]
pub struct FromFile {
    pub path: PathBuf,
}

impl InitialCondition for FromFile {
    fn name(&self) -> &'static str {
        "file"
    }

    fn build(&self, grid: &Arc<TorusGrid>) -> Result<FlowState> {
        let snap = snapshot::read_snapshot_on(&self.path, grid)?;
        let mut state = snap.state;
        // velocity presets are always solenoidal
        state.u = fields::leray_project(&state.u)?;
        Ok(state)
    }
}

pub type InitialRegistry = Registry<dyn InitialCondition, PresetParams>;

/// Built-in presets keyed by name.
pub fn initial_registry() -> InitialRegistry {
    let mut reg = InitialRegistry::new("initial condition");
    reg.register("taylor_green", |p| {
        let r = ParamReader::new("taylor_green", p, &["amplitude"])?;
        Ok(Box::new(TaylorGreen {
            amplitude: r.f64_or("amplitude", 1.0)?,
        }))
    });
    reg.register("geodesic", |p| {
        let r = ParamReader::new("geodesic", p, &["kx", "ky"])?;
        Ok(Box::new(Geodesic {
            kx: r.int_or("kx", 1)?,
            ky: r.int_or("ky", 0)?,
        }))
    });
    reg.register("bubble", |p| {
        let r = ParamReader::new(
            "bubble",
            p,
            &["scale", "degree", "cx", "cy", "taper_inner", "taper_outer"],
        )?;
        let degree = r.int_or("degree", 1)?;
        if degree < 1 {
            return Err(r.bad("degree", &degree.to_string(), "a positive integer"));
        }
        let scale = r.f64_or("scale", 0.1)?;
        if scale <= 0.0 {
            return Err(r.bad("scale", &scale.to_string(), "positive"));
        }
        let center = match (r.opt_f64("cx")?, r.opt_f64("cy")?) {
            (Some(x), Some(y)) => Some((x, y)),
            (None, None) => None,
            _ => {
                return Err(Error::ConfigField {
                    field: "initial.cx".into(),
                    message: "cx and cy must be given together".into(),
                })
            }
        };
        let taper = match (r.opt_f64("taper_inner")?, r.opt_f64("taper_outer")?) {
            (Some(a), Some(b)) => Some((a, b)),
            (None, None) => None,
            _ => {
                return Err(Error::ConfigField {
                    field: "initial.taper_inner".into(),
                    message: "taper_inner and taper_outer must be given together".into(),
                })
            }
        };
        Ok(Box::new(Bubble {
            scale,
            degree: degree as u32,
            center,
            taper,
        }))
    });
    reg.register("random", |p| {
        let r = ParamReader::new(
            "random",
            p,
            &["seed", "spectrum_slope", "kmax", "velocity_rms", "director_spread"],
        )?;
        let def = RandomSeeded::default();
        let seed = r.int_or("seed", 0)?;
        let kmax = r.int_or("kmax", def.kmax)?;
        if seed < 0 || kmax < 1 {
            return Err(r.bad("kmax", &kmax.to_string(), "a positive integer (seed >= 0)"));
        }
        Ok(Box::new(RandomSeeded {
            seed: seed as u64,
            spectrum_slope: r.f64_or("spectrum_slope", def.spectrum_slope)?,
            kmax,
            velocity_rms: r.f64_or("velocity_rms", def.velocity_rms)?,
            director_spread: r.f64_or("director_spread", def.director_spread)?,
        }))
    });
    reg.register("file", |p| {
        let r = ParamReader::new("file", p, &["path"])?;
        Ok(Box::new(FromFile {
            path: PathBuf::from(r.string("path")?),
        }))
    });
    reg
}

/// Convenience for tests and examples: random solenoidal velocity with
/// modes up to `kmax` and the given RMS.
pub fn random_solenoidal(grid: &Arc<TorusGrid>, kmax: i64, rms: f64, seed: u64) -> Field {
    RandomSeeded {
        seed,
        kmax,
        velocity_rms: rms,
        ..RandomSeeded::default()
    }
    .velocity(grid)
    .expect("shapes are consistent")
}

/// Convenience for tests and examples: random smooth unit director.
pub fn random_unit_director(grid: &Arc<TorusGrid>, kmax: i64, seed: u64) -> Field {
    RandomSeeded {
        seed,
        kmax,
        ..RandomSeeded::default()
    }
    .director(grid)
    .expect("default spread keeps the director away from zero")
}
