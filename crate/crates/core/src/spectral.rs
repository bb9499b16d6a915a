//! Two-dimensional periodic FFTs and the Fourier symbols of the grid
//! difference operators.
//!
//! Used for the constant-coefficient solves (preconditioner, implicit viscous
//! step) and the Leray projection. Residuals never go through here.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::Grid2D;

#[derive(Clone)]
pub struct Spectral {
    grid: Grid2D,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
    /// Per-mode symbols, row-major like the grid.
    lap: Vec<f64>,
    sx: Vec<f64>,
    sy: Vec<f64>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral")
            .field("grid", &self.grid)
            .finish()
    }
}

impl Spectral {
    pub fn new(grid: Grid2D) -> Self {
        let mut planner = FftPlanner::new();
        let (nx, ny) = (grid.nx(), grid.ny());
        let (hx, hy) = (grid.hx(), grid.hy());
        let mut lap = Vec::with_capacity(grid.len());
        let mut sx = Vec::with_capacity(grid.len());
        let mut sy = Vec::with_capacity(grid.len());
        for q in 0..ny {
            let ty = 2.0 * PI * q as f64 / ny as f64;
            for p in 0..nx {
                let tx = 2.0 * PI * p as f64 / nx as f64;
                let lx = 4.0 / (hx * hx) * (0.5 * tx).sin().powi(2);
                let ly = 4.0 / (hy * hy) * (0.5 * ty).sin().powi(2);
                lap.push(lx + ly);
                sx.push(tx.sin() / hx);
                sy.push(ty.sin() / hy);
            }
        }
        Spectral {
            grid,
            row_fwd: planner.plan_fft_forward(nx),
            row_inv: planner.plan_fft_inverse(nx),
            col_fwd: planner.plan_fft_forward(ny),
            col_inv: planner.plan_fft_inverse(ny),
            lap,
            sx,
            sy,
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    /// `-symbol` of the compact Laplacian (nonnegative).
    pub fn neg_laplacian_symbol(&self) -> &[f64] {
        &self.lap
    }

    /// Real parts `sigma` of the centered-difference symbols `i*sigma`.
    pub fn centered_symbols(&self) -> (&[f64], &[f64]) {
        (&self.sx, &self.sy)
    }

    pub fn forward(&self, buf: &mut [Complex64]) {
        self.transform(buf, &self.row_fwd, &self.col_fwd);
    }

    /// Inverse transform including the `1/N` normalisation.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.transform(buf, &self.row_inv, &self.col_inv);
        let s = 1.0 / self.grid.len() as f64;
        for v in buf.iter_mut() {
            *v *= s;
        }
    }

    fn transform(&self, buf: &mut [Complex64], row: &Arc<dyn Fft<f64>>, col: &Arc<dyn Fft<f64>>) {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        debug_assert_eq!(buf.len(), nx * ny);
        row.process(buf);
        let mut t = vec![Complex64::new(0.0, 0.0); nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                t[i * ny + j] = buf[j * nx + i];
            }
        }
        col.process(&mut t);
        for i in 0..nx {
            for j in 0..ny {
                buf[j * nx + i] = t[i * ny + j];
            }
        }
    }

    /// Packs two real arrays as `a + i b`.
    pub fn pack(a: &[f64], b: Option<&[f64]>) -> Vec<Complex64> {
        match b {
            Some(b) => a
                .iter()
                .zip(b)
                .map(|(&x, &y)| Complex64::new(x, y))
                .collect(),
            None => a.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    /// Applies a real, even Fourier multiplier to one or two packed real
    /// arrays in place. Even real symbols keep real and imaginary parts
    /// decoupled, so both arrays are filtered by one complex transform.
    pub fn apply_even_multiplier(
        &self,
        a: &mut [f64],
        b: Option<&mut [f64]>,
        symbol: impl Fn(usize) -> f64,
    ) {
        let mut buf = Self::pack(a, b.as_deref());
        self.forward(&mut buf);
        for (k, v) in buf.iter_mut().enumerate() {
            *v *= symbol(k);
        }
        self.inverse(&mut buf);
        for (dst, v) in a.iter_mut().zip(&buf) {
            *dst = v.re;
        }
        if let Some(b) = b {
            for (dst, v) in b.iter_mut().zip(&buf) {
                *dst = v.im;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{laplacian, ScalarField};

    #[test]
    fn round_trip_is_identity() {
        let g = Grid2D::new(16, 12, 2.0, 1.0).unwrap();
        let sp = Spectral::new(g);
        let orig: Vec<Complex64> = (0..g.len())
            .map(|k| Complex64::new((k as f64).sin(), (k as f64 * 0.3).cos()))
            .collect();
        let mut buf = orig.clone();
        sp.forward(&mut buf);
        sp.inverse(&mut buf);
        for (a, b) in orig.iter().zip(&buf) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn laplacian_symbol_matches_stencil() {
        let g = Grid2D::new(16, 16, 2.0, 2.0).unwrap();
        let sp = Spectral::new(g);
        let f = ScalarField::from_fn(g, |x, y| (x * 3.0).sin() + (2.0 * y).cos() * x.cos());
        let direct = laplacian(&f);
        let mut a = f.values().to_vec();
        sp.apply_even_multiplier(&mut a, None, |k| -sp.neg_laplacian_symbol()[k]);
        for (p, q) in a.iter().zip(direct.values()) {
            assert!((p - q).abs() < 1e-10);
        }
    }
}
