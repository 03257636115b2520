use num_complex::Complex64;

use crate::error::Result;
use crate::fields::Field;
use crate::kernels::{self, DirectorGeometry};
use crate::params::LeslieCoefficients;
use crate::scheme::{DirectorScheme, SphereProjection};

/// Pressure of a sphere-constrained state.
pub fn recover_pressure(u: &Field, d: &Field, coeffs: &LeslieCoefficients) -> Result<Field> {
    recover_pressure_with(u, d, coeffs, &SphereProjection)
}

/// Zero-mean `P` with `ΔP = -∂_i∂_j (u_i u_j + <∂_i d, ∂_j d> - σ^L_ij)`.
pub fn recover_pressure_with(
    u: &Field,
    d: &Field,
    coeffs: &LeslieCoefficients,
    scheme: &dyn DirectorScheme,
) -> Result<Field> {
    let geom = DirectorGeometry::new(d)?;
    let kin = kernels::kinematics_with(u, d, &geom, coeffs, scheme)?;
    let mut s = kernels::ericksen_from_grad(&geom.grad);
    s.axpy(-1.0, &kernels::leslie_stress(&kin, d, coeffs));
    for i in 0..2 {
        for j in 0..2 {
            let (ui, uj) = (u.component(i).to_vec(), u.component(j));
            for (v, (a, b)) in s.component_mut(2 * i + j).iter_mut().zip(ui.iter().zip(uj)) {
                *v += a * b;
            }
        }
    }
    let grid = u.grid();
    let n = grid.n();
    let spectra: Vec<Vec<Complex64>> = (0..4).map(|c| grid.forward(s.component(c))).collect();
    let mut p = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (idx, z) in p.iter_mut().enumerate() {
        let k2 = grid.k_squared(idx);
        if k2 == 0.0 {
            continue;
        }
        let k = [grid.derivative_wavenumber(idx % n), grid.derivative_wavenumber(idx / n)];
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                acc += spectra[2 * i + j][idx] * (k[i] * k[j]);
            }
        }
        *z = -acc / k2;
    }
    Field::from_values(grid, 1, grid.inverse(p))
}
