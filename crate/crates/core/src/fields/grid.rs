use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Uniform `n x n` collocation grid on the flat torus `[0, L)^2`.
///
/// Point `(i, j)` sits at `x = i h`, `y = j h` and is stored at flat index
/// `j * n + i` (rows run along x).
#[derive(Clone)]
pub struct TorusGrid {
    n: usize,
    length: f64,
    /// Signed integer mode for each FFT bin, `-n/2..n/2-1` in FFT order.
    modes: Vec<i64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for TorusGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusGrid")
            .field("n", &self.n)
            .field("length", &self.length)
            .finish()
    }
}

impl PartialEq for TorusGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.length == other.length
    }
}

impl TorusGrid {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::Grid(format!("n = {n} must be even and at least 8")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Grid(format!("length = {length} must be positive")));
        }
        let half = (n / 2) as i64;
        let modes = (0..n as i64).map(|m| if m < half { m } else { m - n as i64 }).collect();
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            length,
            modes,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    /// `n` points per axis on the standard `2π` torus.
    pub fn periodic(n: usize) -> Result<Self> {
        Self::new(n, 2.0 * PI)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    pub fn area(&self) -> f64 {
        self.length * self.length
    }

    /// Same sample count on a torus of a different period.
    pub fn with_length(&self, length: f64) -> Result<Self> {
        Self::new(self.n, length)
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (f64, f64) {
        let h = self.spacing();
        ((idx % self.n) as f64 * h, (idx / self.n) as f64 * h)
    }

    /// Signed integer mode for an FFT bin.
    #[inline]
    pub fn mode(&self, bin: usize) -> i64 {
        self.modes[bin]
    }

    /// Physical wavenumber `2π m / L` of an FFT bin.
    #[inline]
    pub fn wavenumber(&self, bin: usize) -> f64 {
        2.0 * PI * self.modes[bin] as f64 / self.length
    }

    /// Wavenumber used for odd derivatives: the Nyquist bin is dropped so the
    /// derivative of a real field stays real.
    #[inline]
    pub fn derivative_wavenumber(&self, bin: usize) -> f64 {
        if bin == self.n / 2 {
            0.0
        } else {
            self.wavenumber(bin)
        }
    }

    /// `|k|^2` for the spectral coefficient at flat index `idx`.
    #[inline]
    pub fn k_squared(&self, idx: usize) -> f64 {
        let kx = self.wavenumber(idx % self.n);
        let ky = self.wavenumber(idx / self.n);
        kx * kx + ky * ky
    }

    /// True when both integer modes satisfy the 2/3 rule (`|m| <= n/3`).
    #[inline]
    pub fn retained(&self, idx: usize) -> bool {
        let cut = self.n as f64 / 3.0;
        (self.modes[idx % self.n].abs() as f64) <= cut && (self.modes[idx / self.n].abs() as f64) <= cut
    }

    /// Unnormalized forward 2D DFT of real samples.
    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        debug_assert_eq!(values.len(), self.len());
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut buf, &self.forward);
        buf
    }

    /// Inverse 2D DFT normalized by `1/n^2`, keeping the real part.
    pub fn inverse(&self, mut spectrum: Vec<Complex64>) -> Vec<f64> {
        debug_assert_eq!(spectrum.len(), self.len());
        self.transform(&mut spectrum, &self.inverse);
        let scale = 1.0 / self.len() as f64;
        spectrum.into_iter().map(|c| c.re * scale).collect()
    }

    fn transform(&self, buf: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        // rows (along x) are contiguous
        plan.process(buf);
        let mut column = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n {
                column[j] = buf[j * n + i];
            }
            plan.process(&mut column);
            for j in 0..n {
                buf[j * n + i] = column[j];
            }
        }
    }

    /// Minimum-image displacement from `(cx, cy)` to grid point `idx`.
    pub fn displacement(&self, idx: usize, cx: f64, cy: f64) -> (f64, f64) {
        let (x, y) = self.coords(idx);
        (self.wrap(x - cx), self.wrap(y - cy))
    }

    /// Reduce a coordinate difference into `[-L/2, L/2)`.
    pub fn wrap(&self, dx: f64) -> f64 {
        let l = self.length;
        dx - l * (dx / l + 0.5).floor()
    }
}
