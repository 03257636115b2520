//! Director constraint strategies.
//!
//! The director equation shares its frame and diffusion terms between the
//! unit-sphere model and its Ginzburg–Landau relaxation; what differs is the
//! bulk "reaction" term that holds `|d|` near one, how the constraint is
//! enforced after a step, and which energy is dissipated. Each variant lives
//! behind [`DirectorScheme`] and is selected by name through
//! [`scheme_registry`].

use std::fmt;

use crate::error::{Error, Result};
use crate::fields::{self, Field};
use crate::kernels::{self, DirectorGeometry, Dissipation};
use crate::params::LeslieCoefficients;
use crate::registry::Registry;

pub const PROJECTION: &str = "projection";
pub const GINZBURG_LANDAU: &str = "ginzburg_landau";

pub const DEFAULT_EPSILON: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeParams {
    pub epsilon: f64,
}

impl Default for SchemeParams {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
        }
    }
}

pub trait DirectorScheme: fmt::Debug + Send + Sync {
    fn name(&self) -> &'static str;

    /// Byte stored in snapshot headers.
    fn mode_flag(&self) -> u8;

    fn epsilon(&self) -> Option<f64> {
        None
    }

    /// Bulk term added to `Δd/|λ1|` and the frame terms in `∂t d`.
    fn reaction(&self, d: &Field, geom: &DirectorGeometry, dad: &[f64], coeffs: &LeslieCoefficients) -> Field;

    /// Enforce the constraint on a freshly stepped director.
    fn constrain(&self, _d: &mut Field) {}

    /// The Lyapunov energy of the model.
    fn energy(&self, u: &Field, d: &Field) -> Result<f64>;

    /// Dissipation rates whose sum is `-dE/dt`.
    fn dissipation(&self, u: &Field, d: &Field, coeffs: &LeslieCoefficients) -> Result<Dissipation>;

    /// Advisory message when `dt` is too large for the explicit reaction.
    fn stiffness_advisory(&self, _dt: f64, _coeffs: &LeslieCoefficients) -> Option<String> {
        None
    }
}

/// Kinetic plus elastic energy `∫(|u|² + |∇d|²)`.
pub fn kinetic_elastic_energy(u: &Field, d: &Field) -> Result<f64> {
    u.require_components(2, "velocity")?;
    d.require_components(3, "director")?;
    let grid = u.grid();
    let mut density = u.pointwise_norm_sq();
    for (e, g) in density.iter_mut().zip(fields::gradient(d).pointwise_norm_sq()) {
        *e += g;
    }
    Ok(fields::spectral::integrate_values(grid, &density))
}

/// Unit-length director; the `|∇d|² d` Lagrange term keeps the flow tangent
/// to the sphere and each step ends with pointwise renormalization.
#[derive(Debug, Clone, Copy, Default)]
pub struct SphereProjection;

impl DirectorScheme for SphereProjection {
    fn name(&self) -> &'static str {
        PROJECTION
    }

    fn mode_flag(&self) -> u8 {
        0
    }

    /// `|∇d|² d / |λ1| + (λ2/λ1)(d̂ᵀAd̂) d`
    fn reaction(&self, d: &Field, geom: &DirectorGeometry, dad: &[f64], coeffs: &LeslieCoefficients) -> Field {
        let rate = coeffs.relaxation_rate();
        let ratio = coeffs.tumbling_ratio();
        let mut out = Field::zeros(d.grid(), 3);
        for k in 0..3 {
            let dk = d.component(k);
            for (idx, v) in out.component_mut(k).iter_mut().enumerate() {
                *v = (rate * geom.grad_sq[idx] + ratio * dad[idx]) * dk[idx];
            }
        }
        out
    }

    fn constrain(&self, d: &mut Field) {
        let norms = d.pointwise_norm();
        for k in 0..3 {
            for (v, n) in d.component_mut(k).iter_mut().zip(&norms) {
                *v /= n;
            }
        }
    }

    fn energy(&self, u: &Field, d: &Field) -> Result<f64> {
        kinetic_elastic_energy(u, d)
    }

    fn dissipation(&self, u: &Field, d: &Field, coeffs: &LeslieCoefficients) -> Result<Dissipation> {
        kernels::dissipation_functionals(u, d, coeffs)
    }
}

/// Penalized director with `ε⁻²(1 - |d|²) d / |λ1|` in place of the
/// sphere constraint and no `(d̂ᵀAd̂) d` term. Never renormalized.
#[derive(Debug, Clone, Copy)]
pub struct GinzburgLandau {
    epsilon: f64,
}

impl GinzburgLandau {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::Domain(format!("epsilon = {epsilon} must be positive")));
        }
        Ok(Self { epsilon })
    }

    /// `h = Δd + ε⁻²(1 - |d|²) d`.
    pub fn molecular_field(&self, d: &Field) -> Result<Field> {
        d.require_components(3, "director")?;
        let mut h = fields::laplacian(d);
        let inv_eps2 = self.epsilon.powi(-2);
        let norm_sq = d.pointwise_norm_sq();
        for k in 0..3 {
            let dk = d.component(k);
            for (idx, v) in h.component_mut(k).iter_mut().enumerate() {
                *v += inv_eps2 * (1.0 - norm_sq[idx]) * dk[idx];
            }
        }
        Ok(h)
    }
}

impl DirectorScheme for GinzburgLandau {
    fn name(&self) -> &'static str {
        GINZBURG_LANDAU
    }

    fn mode_flag(&self) -> u8 {
        1
    }

    fn epsilon(&self) -> Option<f64> {
        Some(self.epsilon)
    }

    fn reaction(&self, d: &Field, _geom: &DirectorGeometry, _dad: &[f64], coeffs: &LeslieCoefficients) -> Field {
        let scale = coeffs.relaxation_rate() * self.epsilon.powi(-2);
        let norm_sq = d.pointwise_norm_sq();
        let mut out = Field::zeros(d.grid(), 3);
        for k in 0..3 {
            let dk = d.component(k);
            for (idx, v) in out.component_mut(k).iter_mut().enumerate() {
                *v = scale * (1.0 - norm_sq[idx]) * dk[idx];
            }
        }
        out
    }

    /// `∫(|u|² + |∇d|² + (1 - |d|²)² / (2ε²))`
    fn energy(&self, u: &Field, d: &Field) -> Result<f64> {
        let base = kinetic_elastic_energy(u, d)?;
        let penalty: Vec<f64> = d.pointwise_norm_sq().into_iter().map(|s| (1.0 - s).powi(2)).collect();
        let scale = 0.5 * self.epsilon.powi(-2);
        Ok(base + scale * fields::spectral::integrate_values(d.grid(), &penalty))
    }

    /// Same structure as the sphere case with `h` in place of the tension;
    /// without the `(d̂ᵀAd̂) d` term the first alignment weight is `μ1`.
    fn dissipation(&self, u: &Field, d: &Field, coeffs: &LeslieCoefficients) -> Result<Dissipation> {
        coeffs.require_dissipative_director()?;
        let h = self.molecular_field(d)?;
        kernels::dissipation_with(u, d, &h, coeffs, coeffs.mu1(), coeffs.alignment_weight_2())
    }

    fn stiffness_advisory(&self, dt: f64, _coeffs: &LeslieCoefficients) -> Option<String> {
        let limit = self.epsilon * self.epsilon / 10.0;
        (dt > limit).then(|| format!("dt = {dt:.3e} exceeds eps^2/10 = {limit:.3e}; the explicit penalty may be stiff"))
    }
}

pub type SchemeRegistry = Registry<dyn DirectorScheme, SchemeParams>;

/// Built-in director schemes keyed by name.
pub fn scheme_registry() -> SchemeRegistry {
    let mut reg = SchemeRegistry::new("director scheme");
    reg.register(PROJECTION, |_| Ok(Box::new(SphereProjection)));
    reg.register(GINZBURG_LANDAU, |p: &SchemeParams| {
        Ok(Box::new(GinzburgLandau::new(p.epsilon)?))
    });
    reg
}

/// Scheme named by a snapshot header flag.
pub fn scheme_from_flag(flag: u8, epsilon: f64) -> Result<Box<dyn DirectorScheme>> {
    match flag {
        0 => Ok(Box::new(SphereProjection)),
        1 => Ok(Box::new(GinzburgLandau::new(epsilon)?)),
        other => Err(Error::Domain(format!("unknown director mode flag {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_builds_both_schemes() {
        let reg = scheme_registry();
        let names: Vec<_> = reg.names().collect();
        assert_eq!(names, vec![GINZBURG_LANDAU, PROJECTION]);
        let gl = reg.create(GINZBURG_LANDAU, &SchemeParams { epsilon: 0.2 }).unwrap();
        assert_eq!(gl.epsilon(), Some(0.2));
        assert_eq!(gl.mode_flag(), 1);
        assert!(reg.create(GINZBURG_LANDAU, &SchemeParams { epsilon: 0.0 }).is_err());
        assert!(reg.create("lagrange", &SchemeParams::default()).is_err());
    }

    #[test]
    fn stiffness_advisory_threshold() {
        let c = LeslieCoefficients::newtonian(1.0).unwrap();
        let gl = GinzburgLandau::new(0.1).unwrap();
        assert!(gl.stiffness_advisory(5e-4, &c).is_none());
        assert!(gl.stiffness_advisory(2e-3, &c).is_some());
        assert!(SphereProjection.stiffness_advisory(1.0, &c).is_none());
    }
}
