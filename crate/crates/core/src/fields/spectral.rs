//! Fourier-collocation calculus on the torus.
//!
//! Every operator transforms each component, acts diagonally on the
//! coefficients, and transforms back. All operators are exact on
//! band-limited input.

use num_complex::Complex64;

use crate::error::Result;
use crate::fields::Field;

fn map_component(f: &Field, c: usize, op: impl Fn(usize, Complex64) -> Complex64) -> Vec<f64> {
    let grid = f.grid();
    let mut spec = grid.forward(f.component(c));
    for (idx, z) in spec.iter_mut().enumerate() {
        *z = op(idx, *z);
    }
    grid.inverse(spec)
}

/// Spectral gradient. A field with `c` components yields `2c` components
/// where component `i * c + k` holds `∂_i f_k` (so for a velocity the output
/// is the row-major tensor `(∇u)_ij = ∂_i u_j`).
pub fn gradient(f: &Field) -> Field {
    let grid = f.grid();
    let n = grid.n();
    let c = f.components();
    let mut out = Field::zeros(grid, 2 * c);
    for k in 0..c {
        let spec = grid.forward(f.component(k));
        for axis in 0..2 {
            let deriv: Vec<Complex64> = spec
                .iter()
                .enumerate()
                .map(|(idx, z)| {
                    let bin = if axis == 0 { idx % n } else { idx / n };
                    z * Complex64::new(0.0, grid.derivative_wavenumber(bin))
                })
                .collect();
            out.component_mut(axis * c + k).copy_from_slice(&grid.inverse(deriv));
        }
    }
    out
}

/// Single partial derivative `∂_axis` of every component.
pub fn partial(f: &Field, axis: usize) -> Field {
    let grid = f.grid();
    let n = grid.n();
    let mut out = Field::zeros(grid, f.components());
    for k in 0..f.components() {
        let d = map_component(f, k, |idx, z| {
            let bin = if axis == 0 { idx % n } else { idx / n };
            z * Complex64::new(0.0, grid.derivative_wavenumber(bin))
        });
        out.component_mut(k).copy_from_slice(&d);
    }
    out
}

/// `∂_x v_0 + ∂_y v_1`.
pub fn divergence(v: &Field) -> Result<Field> {
    v.require_components(2, "divergence")?;
    let grid = v.grid();
    let n = grid.n();
    let sx = grid.forward(v.component(0));
    let sy = grid.forward(v.component(1));
    let spec = sx
        .iter()
        .zip(&sy)
        .enumerate()
        .map(|(idx, (a, b))| {
            let kx = grid.derivative_wavenumber(idx % n);
            let ky = grid.derivative_wavenumber(idx / n);
            Complex64::new(0.0, kx) * a + Complex64::new(0.0, ky) * b
        })
        .collect();
    Field::from_values(grid, 1, grid.inverse(spec))
}

/// Divergence over the first index of a row-major 2x2 tensor:
/// `(∇·T)_j = Σ_i ∂_i T_ij`.
pub fn tensor_divergence(t: &Field) -> Result<Field> {
    t.require_components(4, "tensor divergence")?;
    let grid = t.grid();
    let mut out = Field::zeros(grid, 2);
    for j in 0..2 {
        let v = Field::from_components(grid, &[t.component(j), t.component(2 + j)])?;
        out.component_mut(j).copy_from_slice(divergence(&v)?.component(0));
    }
    Ok(out)
}

pub fn laplacian(f: &Field) -> Field {
    let grid = f.grid();
    let mut out = Field::zeros(grid, f.components());
    for k in 0..f.components() {
        let d = map_component(f, k, |idx, z| z * -grid.k_squared(idx));
        out.component_mut(k).copy_from_slice(&d);
    }
    out
}

/// Solve `Δφ = f` for the zero-mean `φ`; the mean of `f` is discarded.
pub fn inverse_laplacian(f: &Field) -> Field {
    let grid = f.grid();
    let mut out = Field::zeros(grid, f.components());
    for k in 0..f.components() {
        let d = map_component(f, k, |idx, z| {
            let k2 = grid.k_squared(idx);
            if k2 == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                -z / k2
            }
        });
        out.component_mut(k).copy_from_slice(&d);
    }
    out
}

/// Leray projection of a velocity spectrum in place. Uses the derivative
/// wavenumbers, so Nyquist components are left untouched.
pub(crate) fn leray_in_spectrum(grid: &crate::fields::TorusGrid, sx: &mut [Complex64], sy: &mut [Complex64]) {
    let n = grid.n();
    for idx in 0..grid.len() {
        let kx = grid.derivative_wavenumber(idx % n);
        let ky = grid.derivative_wavenumber(idx / n);
        let k2 = kx * kx + ky * ky;
        if k2 == 0.0 {
            continue;
        }
        let kdotv = kx * sx[idx] + ky * sy[idx];
        sx[idx] -= kdotv * (kx / k2);
        sy[idx] -= kdotv * (ky / k2);
    }
}

/// Orthogonal projection onto divergence-free fields.
pub fn leray_project(v: &Field) -> Result<Field> {
    v.require_components(2, "Leray projection")?;
    let grid = v.grid();
    let mut sx = grid.forward(v.component(0));
    let mut sy = grid.forward(v.component(1));
    leray_in_spectrum(grid, &mut sx, &mut sy);
    let ux = grid.inverse(sx);
    let uy = grid.inverse(sy);
    Field::from_components(grid, &[&ux, &uy])
}

/// Torus integral of a scalar field: mean value times `L^2`.
pub fn integrate(f: &Field) -> Result<f64> {
    f.require_components(1, "integrate")?;
    Ok(integrate_values(f.grid(), f.component(0)))
}

/// Same as [`integrate`] on a raw sample slice.
pub fn integrate_values(grid: &crate::fields::TorusGrid, values: &[f64]) -> f64 {
    values.iter().sum::<f64>() * grid.cell_area()
}

/// 2/3-rule filter: zero every mode with `|m_x| > n/3` or `|m_y| > n/3`.
pub fn dealias(f: &Field) -> Field {
    let grid = f.grid();
    let mut out = Field::zeros(grid, f.components());
    for k in 0..f.components() {
        let d = map_component(f, k, |idx, z| {
            if grid.retained(idx) {
                z
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        out.component_mut(k).copy_from_slice(&d);
    }
    out
}
