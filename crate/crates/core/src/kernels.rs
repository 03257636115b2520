//! Pointwise tensor algebra of the two-dimensional Ericksen–Leslie system.
//!
//! Conventions: `(∇u)_ij = ∂_i u_j`, `A = sym(∇u)`, `Ω_ij = ½(∂_i u_j - ∂_j u_i)`,
//! 2x2 tensors are stored row-major in four components, and `d̂ = (d_1, d_2)`
//! is the in-plane part of the three-component director. In the plane the
//! frame terms act as `Ωd := (Ωd̂, 0)` and `Ad := (Ad̂, 0)`.
//!
//! The co-rotational rate `N` is never taken from a stored time derivative;
//! it is obtained by substituting the director equation, which keeps the
//! Leslie stress a local function of `(u, d)`.

use crate::error::Result;
use crate::fields::{self, Field};
use crate::params::LeslieCoefficients;
use crate::scheme::{DirectorScheme, SphereProjection};

/// Strain, vorticity and director-rate tensors of one state.
#[derive(Debug, Clone)]
pub struct KinematicTensors {
    /// `(∇u)_ij = ∂_i u_j`, row-major.
    pub grad_u: Field,
    pub a: Field,
    pub omega: Field,
    /// Co-rotational director rate, three components.
    pub n: Field,
    /// `A d̂`, two components.
    pub ad_hat: Field,
    /// `d̂ᵀ A d̂`, scalar.
    pub dad: Field,
}

/// Spatial derivatives of the director shared by several kernels.
#[derive(Debug, Clone)]
pub struct DirectorGeometry {
    /// Component `i * 3 + k` holds `∂_i d_k`.
    pub grad: Field,
    pub laplacian: Field,
    /// `|∇d|^2` at each point.
    pub grad_sq: Vec<f64>,
}

impl DirectorGeometry {
    pub fn new(d: &Field) -> Result<Self> {
        d.require_components(3, "director geometry")?;
        let grad = fields::gradient(d);
        let laplacian = fields::laplacian(d);
        let grad_sq = grad.pointwise_norm_sq();
        Ok(Self {
            grad,
            laplacian,
            grad_sq,
        })
    }
}

/// Energy dissipation rates of the global energy balance.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dissipation {
    pub visc: f64,
    pub dir: f64,
    pub align1: f64,
    pub align2: f64,
}

impl Dissipation {
    pub fn total(&self) -> f64 {
        self.visc + self.dir + self.align1 + self.align2
    }
}

fn split_gradient(grad_u: &Field) -> (Field, Field) {
    let grid = grad_u.grid();
    let mut a = Field::zeros(grid, 4);
    let mut omega = Field::zeros(grid, 4);
    for idx in 0..grid.len() {
        for i in 0..2 {
            for j in 0..2 {
                let gij = grad_u.component(2 * i + j)[idx];
                let gji = grad_u.component(2 * j + i)[idx];
                a.component_mut(2 * i + j)[idx] = 0.5 * (gij + gji);
                omega.component_mut(2 * i + j)[idx] = 0.5 * (gij - gji);
            }
        }
    }
    (a, omega)
}

/// Rate of strain `A` and vorticity tensor `Ω` of a planar velocity.
pub fn strain_vorticity(u: &Field) -> Result<(Field, Field)> {
    u.require_components(2, "strain/vorticity")?;
    Ok(split_gradient(&fields::gradient(u)))
}

/// Harmonic-map tension `Δd + |∇d|^2 d`.
pub fn tension(d: &Field) -> Result<Field> {
    let geom = DirectorGeometry::new(d)?;
    Ok(tension_from(d, &geom))
}

pub(crate) fn tension_from(d: &Field, geom: &DirectorGeometry) -> Field {
    let mut t = geom.laplacian.clone();
    for k in 0..3 {
        let dk = d.component(k);
        for (idx, v) in t.component_mut(k).iter_mut().enumerate() {
            *v += geom.grad_sq[idx] * dk[idx];
        }
    }
    t
}

fn ad_hat_and_dad(a: &Field, d: &Field) -> (Field, Field) {
    let grid = a.grid();
    let mut ad = Field::zeros(grid, 2);
    let mut dad = Field::zeros(grid, 1);
    let (d0, d1) = (d.component(0), d.component(1));
    for idx in 0..grid.len() {
        let a00 = a.component(0)[idx];
        let a01 = a.component(1)[idx];
        let a10 = a.component(2)[idx];
        let a11 = a.component(3)[idx];
        let x = a00 * d0[idx] + a01 * d1[idx];
        let y = a10 * d0[idx] + a11 * d1[idx];
        ad.component_mut(0)[idx] = x;
        ad.component_mut(1)[idx] = y;
        dad.component_mut(0)[idx] = d0[idx] * x + d1[idx] * y;
    }
    (ad, dad)
}

/// `(Ωd̂, 0)` as a three-component field.
fn omega_d(omega: &Field, d: &Field) -> Field {
    let grid = omega.grid();
    let mut out = Field::zeros(grid, 3);
    let (d0, d1) = (d.component(0), d.component(1));
    for idx in 0..grid.len() {
        for i in 0..2 {
            out.component_mut(i)[idx] =
                omega.component(2 * i)[idx] * d0[idx] + omega.component(2 * i + 1)[idx] * d1[idx];
        }
    }
    out
}

/// `N = -(λ2/λ1)(Ad̂, 0) + Δd/|λ1| + reaction`, where the reaction term is
/// supplied by the director scheme.
fn corotational_from(ad_hat: &Field, geom: &DirectorGeometry, reaction: &Field, coeffs: &LeslieCoefficients) -> Field {
    let ratio = coeffs.tumbling_ratio();
    let rate = coeffs.relaxation_rate();
    let mut n = geom.laplacian.scaled(rate);
    n.axpy(1.0, reaction);
    for i in 0..2 {
        let adi = ad_hat.component(i);
        for (idx, v) in n.component_mut(i).iter_mut().enumerate() {
            *v -= ratio * adi[idx];
        }
    }
    n
}

/// All kinematic tensors of `(u, d)`, with `N` from the given director scheme.
pub fn kinematics(
    u: &Field,
    d: &Field,
    coeffs: &LeslieCoefficients,
    scheme: &dyn DirectorScheme,
) -> Result<KinematicTensors> {
    let geom = DirectorGeometry::new(d)?;
    kinematics_with(u, d, &geom, coeffs, scheme)
}

pub(crate) fn kinematics_with(
    u: &Field,
    d: &Field,
    geom: &DirectorGeometry,
    coeffs: &LeslieCoefficients,
    scheme: &dyn DirectorScheme,
) -> Result<KinematicTensors> {
    coeffs.require_dissipative_director()?;
    u.require_components(2, "velocity")?;
    d.require_components(3, "director")?;
    u.require_same_grid(d)?;
    let grad_u = fields::gradient(u);
    let (a, omega) = split_gradient(&grad_u);
    let (ad_hat, dad) = ad_hat_and_dad(&a, d);
    let reaction = scheme.reaction(d, geom, dad.component(0), coeffs);
    let n = corotational_from(&ad_hat, geom, &reaction, coeffs);
    Ok(KinematicTensors {
        grad_u,
        a,
        omega,
        n,
        ad_hat,
        dad,
    })
}

/// Co-rotational rate of a unit director:
/// `N = -(λ2/λ1)(Ad̂,0) + (Δd + |∇d|²d)/|λ1| + (λ2/λ1)(d̂ᵀAd̂) d`.
pub fn corotational_n(u: &Field, d: &Field, coeffs: &LeslieCoefficients) -> Result<Field> {
    Ok(kinematics(u, d, coeffs, &SphereProjection)?.n)
}

/// Leslie stress without the Newtonian `μ4 A` part.
pub fn leslie_stress_remainder(t: &KinematicTensors, d: &Field, coeffs: &LeslieCoefficients) -> Field {
    let [mu1, mu2, mu3, _, mu5, mu6] = coeffs.mu();
    let grid = d.grid();
    let mut s = Field::zeros(grid, 4);
    for idx in 0..grid.len() {
        let dh = [d.component(0)[idx], d.component(1)[idx]];
        let nh = [t.n.component(0)[idx], t.n.component(1)[idx]];
        let ad = [t.ad_hat.component(0)[idx], t.ad_hat.component(1)[idx]];
        let dad = t.dad.component(0)[idx];
        for i in 0..2 {
            for j in 0..2 {
                s.component_mut(2 * i + j)[idx] = mu1 * dad * dh[i] * dh[j]
                    + mu2 * nh[i] * dh[j]
                    + mu3 * nh[j] * dh[i]
                    + mu5 * ad[i] * dh[j]
                    + mu6 * ad[j] * dh[i];
            }
        }
    }
    s
}

/// Full Leslie stress
/// `σ_ij = μ1 (d̂ᵀAd̂) d_i d_j + μ2 N_i d_j + μ3 N_j d_i + μ4 A_ij + μ5 (Ad̂)_i d_j + μ6 (Ad̂)_j d_i`.
pub fn leslie_stress(t: &KinematicTensors, d: &Field, coeffs: &LeslieCoefficients) -> Field {
    let mut s = leslie_stress_remainder(t, d, coeffs);
    s.axpy(coeffs.mu4(), &t.a);
    s
}

pub(crate) fn ericksen_from_grad(grad_d: &Field) -> Field {
    let grid = grad_d.grid();
    let mut e = Field::zeros(grid, 4);
    for i in 0..2 {
        for j in i..2 {
            let mut acc = vec![0.0; grid.len()];
            for k in 0..3 {
                let gi = grad_d.component(3 * i + k);
                let gj = grad_d.component(3 * j + k);
                for (a, (p, q)) in acc.iter_mut().zip(gi.iter().zip(gj)) {
                    *a += p * q;
                }
            }
            e.component_mut(2 * i + j).copy_from_slice(&acc);
            if i != j {
                e.component_mut(2 * j + i).copy_from_slice(&acc);
            }
        }
    }
    e
}

/// Ericksen stress `(∇d ⊙ ∇d)_ij = <∂_i d, ∂_j d>`.
pub fn ericksen_stress(d: &Field) -> Result<Field> {
    d.require_components(3, "Ericksen stress")?;
    Ok(ericksen_from_grad(&fields::gradient(d)))
}

/// Right-hand side of the director equation with `N` eliminated:
/// `∂t d = -u·∇d + (Ωd̂,0) - (λ2/λ1)(Ad̂,0) + Δd/|λ1| + reaction`.
pub fn director_rhs(u: &Field, d: &Field, coeffs: &LeslieCoefficients, scheme: &dyn DirectorScheme) -> Result<Field> {
    let geom = DirectorGeometry::new(d)?;
    let kin = kinematics_with(u, d, &geom, coeffs, scheme)?;
    let mut rhs = kin.n.clone();
    rhs.axpy(1.0, &omega_d(&kin.omega, d));
    rhs.axpy(-1.0, &advection(u, &geom.grad));
    Ok(rhs)
}

/// `(u·∇)d` from a precomputed director gradient.
pub(crate) fn advection(u: &Field, grad_d: &Field) -> Field {
    let grid = u.grid();
    let mut out = Field::zeros(grid, 3);
    let (ux, uy) = (u.component(0), u.component(1));
    for k in 0..3 {
        let (gx, gy) = (grad_d.component(k), grad_d.component(3 + k));
        for (idx, v) in out.component_mut(k).iter_mut().enumerate() {
            *v = ux[idx] * gx[idx] + uy[idx] * gy[idx];
        }
    }
    out
}

pub(crate) fn omega_d_field(omega: &Field, d: &Field) -> Field {
    omega_d(omega, d)
}

/// Both sides of the stress-power identity `∫η² σ^L:∇u`.
///
/// `lhs` contracts the Leslie stress with `∇u` directly; `rhs` is the
/// simplified form
/// `∫η²[μ1|A:d̂⊗d̂|² + μ4|A|² + (μ5+μ6)|Ad̂|² + λ1 N̂·(Ωd̂) - λ2 N̂·(Ad̂) + λ2 (Ad̂)·(Ωd̂)]`,
/// which relies on Parodi's relation.
pub fn stress_power_identity(u: &Field, d: &Field, coeffs: &LeslieCoefficients, eta: &Field) -> Result<(f64, f64)> {
    eta.require_components(1, "cutoff")?;
    let kin = kinematics(u, d, coeffs, &SphereProjection)?;
    let sigma = leslie_stress(&kin, d, coeffs);
    let grid = u.grid();
    let [mu1, _, _, mu4, mu5, mu6] = coeffs.mu();
    let (l1, l2) = (coeffs.lambda1(), coeffs.lambda2());
    let od = omega_d(&kin.omega, d);
    let mut lhs = vec![0.0; grid.len()];
    let mut rhs = vec![0.0; grid.len()];
    for idx in 0..grid.len() {
        let w = eta.component(0)[idx].powi(2);
        let mut power = 0.0;
        let mut a_sq = 0.0;
        for c in 0..4 {
            power += sigma.component(c)[idx] * kin.grad_u.component(c)[idx];
            a_sq += kin.a.component(c)[idx].powi(2);
        }
        let dad = kin.dad.component(0)[idx];
        let ad = [kin.ad_hat.component(0)[idx], kin.ad_hat.component(1)[idx]];
        let nh = [kin.n.component(0)[idx], kin.n.component(1)[idx]];
        let odh = [od.component(0)[idx], od.component(1)[idx]];
        let ad_sq = ad[0] * ad[0] + ad[1] * ad[1];
        let n_od = nh[0] * odh[0] + nh[1] * odh[1];
        let n_ad = nh[0] * ad[0] + nh[1] * ad[1];
        let ad_od = ad[0] * odh[0] + ad[1] * odh[1];
        lhs[idx] = w * power;
        rhs[idx] = w * (mu1 * dad * dad + mu4 * a_sq + (mu5 + mu6) * ad_sq + l1 * n_od - l2 * n_ad + l2 * ad_od);
    }
    Ok((
        fields::spectral::integrate_values(grid, &lhs),
        fields::spectral::integrate_values(grid, &rhs),
    ))
}

/// Dissipation rates with an arbitrary director "molecular field" `h`:
/// `D_visc = μ4∫|∇u|²`, `D_dir = (2/|λ1|)∫|h|²`, `D_align1 = 2 w1 ∫|d̂ᵀAd̂|²`,
/// `D_align2 = 2 w2 ∫|Ad̂|²`.
pub(crate) fn dissipation_with(
    u: &Field,
    d: &Field,
    h: &Field,
    coeffs: &LeslieCoefficients,
    w1: f64,
    w2: f64,
) -> Result<Dissipation> {
    u.require_components(2, "velocity")?;
    let grid = u.grid();
    let grad_u = fields::gradient(u);
    let (a, _) = split_gradient(&grad_u);
    let (ad, dad) = ad_hat_and_dad(&a, d);
    let grad_sq = grad_u.pointwise_norm_sq();
    let h_sq = h.pointwise_norm_sq();
    let ad_sq = ad.pointwise_norm_sq();
    let dad_sq: Vec<f64> = dad.component(0).iter().map(|v| v * v).collect();
    let int = |v: &[f64]| fields::spectral::integrate_values(grid, v);
    Ok(Dissipation {
        visc: coeffs.mu4() * int(&grad_sq),
        dir: 2.0 * coeffs.relaxation_rate() * int(&h_sq),
        align1: 2.0 * w1 * int(&dad_sq),
        align2: 2.0 * w2 * int(&ad_sq),
    })
}

/// Global dissipation rates for a unit director (sphere-constrained system).
pub fn dissipation_functionals(u: &Field, d: &Field, coeffs: &LeslieCoefficients) -> Result<Dissipation> {
    coeffs.require_dissipative_director()?;
    let tau = tension(d)?;
    dissipation_with(
        u,
        d,
        &tau,
        coeffs,
        coeffs.alignment_weight_1(),
        coeffs.alignment_weight_2(),
    )
}
