//! Periodic structured grid, grid-attached fields and second-order difference
//! operators.
//!
//! Two operator pairs are provided. The centered pair (`gradient`,
//! `divergence`) is collocated at the nodes and is used wherever a gradient
//! must be combined pointwise with another field (anchoring, transport,
//! stresses). The staggered pair (`gradient_forward`, `divergence_backward`)
//! composes into the compact five-point `laplacian`. Both pairs are exact
//! negative adjoints of each other under the discrete inner product, which is
//! what makes the discrete energy law and mass conservation hold.

use std::ops::{Add, Mul, Sub};

use crate::error::{Result, SimError};

/// Uniform periodic rectangular grid. Node `(i, j)` sits at
/// `(x0 + i*hx, y0 + j*hy)`; indices wrap around in both directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
    x0: f64,
    y0: f64,
}

impl Grid2D {
    pub const MIN_POINTS: usize = 8;

    /// Grid on `[-lx/2, lx/2) x [-ly/2, ly/2)`.
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        Self::with_origin(nx, ny, lx, ly, -0.5 * lx, -0.5 * ly)
    }

    pub fn with_origin(nx: usize, ny: usize, lx: f64, ly: f64, x0: f64, y0: f64) -> Result<Self> {
        if nx < Self::MIN_POINTS || ny < Self::MIN_POINTS {
            return Err(SimError::InvalidGrid(format!(
                "need at least {} points per direction, got {nx}x{ny}",
                Self::MIN_POINTS
            )));
        }
        if !(lx.is_finite() && ly.is_finite() && lx > 0.0 && ly > 0.0) {
            return Err(SimError::InvalidGrid(format!(
                "extents must be positive, got {lx} x {ly}"
            )));
        }
        if !(x0.is_finite() && y0.is_finite()) {
            return Err(SimError::InvalidGrid("origin must be finite".into()));
        }
        Ok(Grid2D {
            nx,
            ny,
            lx,
            ly,
            x0,
            y0,
        })
    }

    /// The `[-1, 1]^2` square used by the drop benchmark.
    pub fn unit_square(n: usize) -> Result<Self> {
        Self::new(n, n, 2.0, 2.0)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn lx(&self) -> f64 {
        self.lx
    }
    pub fn ly(&self) -> f64 {
        self.ly
    }
    pub fn origin(&self) -> (f64, f64) {
        (self.x0, self.y0)
    }
    pub fn hx(&self) -> f64 {
        self.lx / self.nx as f64
    }
    pub fn hy(&self) -> f64 {
        self.ly / self.ny as f64
    }
    pub fn cell_area(&self) -> f64 {
        self.hx() * self.hy()
    }
    /// |Omega|.
    pub fn measure(&self) -> f64 {
        self.lx * self.ly
    }
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn min_spacing(&self) -> f64 {
        self.hx().min(self.hy())
    }

    /// Row-major index, x fastest. Out-of-range indices wrap.
    #[inline]
    pub fn idx(&self, i: isize, j: isize) -> usize {
        let i = i.rem_euclid(self.nx as isize) as usize;
        let j = j.rem_euclid(self.ny as isize) as usize;
        j * self.nx + i
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.hx()
    }
    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.hy()
    }

    pub(crate) fn stencil(&self) -> Stencil {
        Stencil {
            nx: self.nx,
            ny: self.ny,
            hx: self.hx(),
            hy: self.hy(),
        }
    }
}

/// Scalar field sampled at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid2D,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid2D) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid2D, c: f64) -> Self {
        ScalarField {
            grid,
            values: vec![c; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.ny() {
            let y = grid.y(j);
            for i in 0..grid.nx() {
                values.push(f(grid.x(i), y));
            }
        }
        ScalarField { grid, values }
    }

    pub fn from_vec(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(SimError::InvalidGrid(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(ScalarField { grid, values })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
    pub fn at(&self, i: isize, j: isize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        ScalarField {
            grid: self.grid,
            values,
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
    pub fn mean(&self) -> f64 {
        integrate(self) / self.grid.measure()
    }
    /// Discrete L2 norm, `sqrt(integrate(f^2))`.
    pub fn l2_norm(&self) -> f64 {
        inner_product(self, self).sqrt()
    }
}

impl Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: &ScalarField) -> ScalarField {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: &ScalarField) -> ScalarField {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for &ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: f64) -> ScalarField {
        self.scale(rhs)
    }
}

/// Two-component vector field sampled at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField2 {
    grid: Grid2D,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl VectorField2 {
    pub fn zeros(grid: Grid2D) -> Self {
        Self::constant(grid, 0.0, 0.0)
    }

    pub fn constant(grid: Grid2D, cx: f64, cy: f64) -> Self {
        VectorField2 {
            grid,
            x: vec![cx; grid.len()],
            y: vec![cy; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> (f64, f64)) -> Self {
        let mut x = Vec::with_capacity(grid.len());
        let mut y = Vec::with_capacity(grid.len());
        for j in 0..grid.ny() {
            let yy = grid.y(j);
            for i in 0..grid.nx() {
                let (a, b) = f(grid.x(i), yy);
                x.push(a);
                y.push(b);
            }
        }
        VectorField2 { grid, x, y }
    }

    pub fn from_components(x: ScalarField, y: ScalarField) -> Result<Self> {
        if x.grid != y.grid {
            return Err(SimError::GridMismatch);
        }
        Ok(VectorField2 {
            grid: x.grid,
            x: x.values,
            y: y.values,
        })
    }

    pub(crate) fn from_vecs(grid: Grid2D, x: Vec<f64>, y: Vec<f64>) -> Self {
        debug_assert!(x.len() == grid.len() && y.len() == grid.len());
        VectorField2 { grid, x, y }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }
    pub fn xs(&self) -> &[f64] {
        &self.x
    }
    pub fn ys(&self) -> &[f64] {
        &self.y
    }
    pub fn xs_mut(&mut self) -> &mut [f64] {
        &mut self.x
    }
    pub fn ys_mut(&mut self) -> &mut [f64] {
        &mut self.y
    }
    pub fn component_x(&self) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.x.clone(),
        }
    }
    pub fn component_y(&self) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.y.clone(),
        }
    }
    pub fn into_components(self) -> (ScalarField, ScalarField) {
        (
            ScalarField {
                grid: self.grid,
                values: self.x,
            },
            ScalarField {
                grid: self.grid,
                values: self.y,
            },
        )
    }

    /// Pointwise |v|.
    pub fn magnitude(&self) -> ScalarField {
        let values = self
            .x
            .iter()
            .zip(&self.y)
            .map(|(a, b)| a.hypot(*b))
            .collect();
        ScalarField {
            grid: self.grid,
            values,
        }
    }

    pub fn max_magnitude(&self) -> f64 {
        self.x
            .iter()
            .zip(&self.y)
            .fold(0.0, |m, (a, b)| m.max(a.hypot(*b)))
    }

    pub fn scale(&self, c: f64) -> Self {
        VectorField2 {
            grid: self.grid,
            x: self.x.iter().map(|v| c * v).collect(),
            y: self.y.iter().map(|v| c * v).collect(),
        }
    }

    pub fn axpy(&self, a: f64, other: &VectorField2) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        VectorField2 {
            grid: self.grid,
            x: self
                .x
                .iter()
                .zip(&other.x)
                .map(|(p, q)| p + a * q)
                .collect(),
            y: self
                .y
                .iter()
                .zip(&other.y)
                .map(|(p, q)| p + a * q)
                .collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(&self.y).all(|v| v.is_finite())
    }

    /// Spatial mean of each component.
    pub fn mean(&self) -> (f64, f64) {
        let n = self.grid.len() as f64;
        (
            self.x.iter().sum::<f64>() / n,
            self.y.iter().sum::<f64>() / n,
        )
    }

    pub fn l2_norm(&self) -> f64 {
        inner_product(self, self).sqrt()
    }
}

impl Sub for &VectorField2 {
    type Output = VectorField2;
    fn sub(self, rhs: &VectorField2) -> VectorField2 {
        self.axpy(-1.0, rhs)
    }
}

impl Add for &VectorField2 {
    type Output = VectorField2;
    fn add(self, rhs: &VectorField2) -> VectorField2 {
        self.axpy(1.0, rhs)
    }
}

/// Fields that admit the discrete L2 pairing.
pub trait InnerProduct {
    fn inner(&self, other: &Self) -> f64;
}

impl InnerProduct for ScalarField {
    fn inner(&self, other: &Self) -> f64 {
        assert_eq!(
            self.grid, other.grid,
            "inner product of fields on different grids"
        );
        self.grid.cell_area() * dot(&self.values, &other.values)
    }
}

impl InnerProduct for VectorField2 {
    fn inner(&self, other: &Self) -> f64 {
        assert_eq!(
            self.grid, other.grid,
            "inner product of fields on different grids"
        );
        self.grid.cell_area() * (dot(&self.x, &other.x) + dot(&self.y, &other.y))
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `(a, b) = hx*hy * sum a.b`.
pub fn inner_product<F: InnerProduct>(a: &F, b: &F) -> f64 {
    a.inner(b)
}

/// `hx*hy * sum f`; midpoint and trapezoidal rules coincide on a periodic grid.
pub fn integrate(f: &ScalarField) -> f64 {
    f.grid.cell_area() * f.values.iter().sum::<f64>()
}

/// Centered second-order gradient.
pub fn gradient(f: &ScalarField) -> VectorField2 {
    let st = f.grid.stencil();
    let mut gx = vec![0.0; f.grid.len()];
    let mut gy = vec![0.0; f.grid.len()];
    st.grad_c(&f.values, &mut gx, &mut gy);
    VectorField2::from_vecs(f.grid, gx, gy)
}

/// Centered divergence; the negative adjoint of [`gradient`].
pub fn divergence(v: &VectorField2) -> ScalarField {
    let st = v.grid.stencil();
    let mut out = vec![0.0; v.grid.len()];
    st.div_c(&v.x, &v.y, &mut out);
    ScalarField {
        grid: v.grid,
        values: out,
    }
}

/// One-sided forward differences; component `x` lives at `x_i + hx/2`,
/// component `y` at `y_j + hy/2`.
pub fn gradient_forward(f: &ScalarField) -> VectorField2 {
    let st = f.grid.stencil();
    let mut gx = vec![0.0; f.grid.len()];
    let mut gy = vec![0.0; f.grid.len()];
    st.grad_f(&f.values, &mut gx, &mut gy);
    VectorField2::from_vecs(f.grid, gx, gy)
}

/// Backward-difference divergence; the negative adjoint of [`gradient_forward`].
pub fn divergence_backward(v: &VectorField2) -> ScalarField {
    let st = v.grid.stencil();
    let mut out = vec![0.0; v.grid.len()];
    st.div_b(&v.x, &v.y, &mut out);
    ScalarField {
        grid: v.grid,
        values: out,
    }
}

/// Compact five-point Laplacian, `divergence_backward(gradient_forward(f))`.
pub fn laplacian(f: &ScalarField) -> ScalarField {
    let st = f.grid.stencil();
    let mut out = vec![0.0; f.grid.len()];
    st.lap(&f.values, &mut out);
    ScalarField {
        grid: f.grid,
        values: out,
    }
}

/// Componentwise [`laplacian`] of a vector field.
pub fn vector_laplacian(v: &VectorField2) -> VectorField2 {
    let st = v.grid.stencil();
    let mut ox = vec![0.0; v.grid.len()];
    let mut oy = vec![0.0; v.grid.len()];
    st.lap(&v.x, &mut ox);
    st.lap(&v.y, &mut oy);
    VectorField2::from_vecs(v.grid, ox, oy)
}

/// Slice-level kernels shared by the field API and the solver hot loops.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Stencil {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
}

impl Stencil {
    #[inline]
    fn rows(&self, j: usize) -> (usize, usize, usize) {
        let jm = if j == 0 { self.ny - 1 } else { j - 1 };
        let jp = if j + 1 == self.ny { 0 } else { j + 1 };
        (jm * self.nx, j * self.nx, jp * self.nx)
    }

    #[inline]
    fn cols(&self, i: usize) -> (usize, usize) {
        let im = if i == 0 { self.nx - 1 } else { i - 1 };
        let ip = if i + 1 == self.nx { 0 } else { i + 1 };
        (im, ip)
    }

    pub fn grad_c(&self, f: &[f64], gx: &mut [f64], gy: &mut [f64]) {
        let (cx, cy) = (0.5 / self.hx, 0.5 / self.hy);
        for j in 0..self.ny {
            let (rm, r, rp) = self.rows(j);
            for i in 0..self.nx {
                let (im, ip) = self.cols(i);
                gx[r + i] = cx * (f[r + ip] - f[r + im]);
                gy[r + i] = cy * (f[rp + i] - f[rm + i]);
            }
        }
    }

    pub fn div_c(&self, vx: &[f64], vy: &[f64], out: &mut [f64]) {
        let (cx, cy) = (0.5 / self.hx, 0.5 / self.hy);
        for j in 0..self.ny {
            let (rm, r, rp) = self.rows(j);
            for i in 0..self.nx {
                let (im, ip) = self.cols(i);
                out[r + i] = cx * (vx[r + ip] - vx[r + im]) + cy * (vy[rp + i] - vy[rm + i]);
            }
        }
    }

    pub fn grad_f(&self, f: &[f64], gx: &mut [f64], gy: &mut [f64]) {
        let (cx, cy) = (1.0 / self.hx, 1.0 / self.hy);
        for j in 0..self.ny {
            let (_, r, rp) = self.rows(j);
            for i in 0..self.nx {
                let (_, ip) = self.cols(i);
                gx[r + i] = cx * (f[r + ip] - f[r + i]);
                gy[r + i] = cy * (f[rp + i] - f[r + i]);
            }
        }
    }

    pub fn grad_b(&self, f: &[f64], gx: &mut [f64], gy: &mut [f64]) {
        let (cx, cy) = (1.0 / self.hx, 1.0 / self.hy);
        for j in 0..self.ny {
            let (rm, r, _) = self.rows(j);
            for i in 0..self.nx {
                let (im, _) = self.cols(i);
                gx[r + i] = cx * (f[r + i] - f[r + im]);
                gy[r + i] = cy * (f[r + i] - f[rm + i]);
            }
        }
    }

    pub fn div_f(&self, vx: &[f64], vy: &[f64], out: &mut [f64]) {
        let (cx, cy) = (1.0 / self.hx, 1.0 / self.hy);
        for j in 0..self.ny {
            let (_, r, rp) = self.rows(j);
            for i in 0..self.nx {
                let (_, ip) = self.cols(i);
                out[r + i] = cx * (vx[r + ip] - vx[r + i]) + cy * (vy[rp + i] - vy[r + i]);
            }
        }
    }

    pub fn div_b(&self, vx: &[f64], vy: &[f64], out: &mut [f64]) {
        let (cx, cy) = (1.0 / self.hx, 1.0 / self.hy);
        for j in 0..self.ny {
            let (rm, r, _) = self.rows(j);
            for i in 0..self.nx {
                let (im, _) = self.cols(i);
                out[r + i] = cx * (vx[r + i] - vx[r + im]) + cy * (vy[r + i] - vy[rm + i]);
            }
        }
    }

    pub fn lap(&self, f: &[f64], out: &mut [f64]) {
        let (cx, cy) = (1.0 / (self.hx * self.hx), 1.0 / (self.hy * self.hy));
        for j in 0..self.ny {
            let (rm, r, rp) = self.rows(j);
            for i in 0..self.nx {
                let (im, ip) = self.cols(i);
                let c = f[r + i];
                out[r + i] =
                    cx * (f[r + ip] - 2.0 * c + f[r + im]) + cy * (f[rp + i] - 2.0 * c + f[rm + i]);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(n: usize) -> Grid2D {
        Grid2D::unit_square(n).unwrap()
    }

    #[test]
    fn rejects_small_or_degenerate_grids() {
        assert!(Grid2D::new(4, 16, 1.0, 1.0).is_err());
        assert!(Grid2D::new(16, 16, 0.0, 1.0).is_err());
        assert!(Grid2D::new(16, 16, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn wrap_indices_are_total() {
        let g = Grid2D::new(8, 10, 1.0, 1.0).unwrap();
        assert_eq!(g.idx(-1, 0), 7);
        assert_eq!(g.idx(8, 0), 0);
        assert_eq!(g.idx(0, -1), 9 * 8);
        assert_eq!(g.idx(-17, 23), g.idx(7, 3));
    }

    #[test]
    fn constant_field_has_zero_derivatives() {
        let f = ScalarField::constant(grid(16), 3.5);
        assert!(gradient(&f).max_magnitude() == 0.0);
        assert!(laplacian(&f).max_abs() == 0.0);
        let v = VectorField2::constant(grid(16), 1.0, -2.0);
        assert!(divergence(&v).max_abs() == 0.0);
        assert!(divergence_backward(&v).max_abs() == 0.0);
    }

    #[test]
    fn integrate_constant_and_sine() {
        let g = grid(32);
        assert!((integrate(&ScalarField::constant(g, 1.5)) - 6.0).abs() < 1e-14);
        let s = ScalarField::from_fn(g, |x, _| (PI * x).sin());
        assert!(integrate(&s).abs() < 1e-14);
        assert!(
            (inner_product(
                &ScalarField::constant(g, 1.0),
                &ScalarField::constant(g, 1.0)
            ) - 4.0)
                .abs()
                < 1e-14
        );
    }

    #[test]
    fn centered_gradient_is_second_order() {
        let err = |n: usize| {
            let g = grid(n);
            let f = ScalarField::from_fn(g, |x, _| (PI * x).sin());
            let gf = gradient(&f);
            let exact = ScalarField::from_fn(g, |x, _| PI * (PI * x).cos());
            (&gf.component_x() - &exact).max_abs()
        };
        let ratio = err(32) / err(64);
        assert!((3.6..=4.4).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn laplacian_is_second_order() {
        let err = |n: usize| {
            let g = grid(n);
            let f = ScalarField::from_fn(g, |x, _| (PI * x).sin());
            let exact = f.scale(-PI * PI);
            (&laplacian(&f) - &exact).max_abs()
        };
        let ratio = err(32) / err(64);
        assert!((3.6..=4.4).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn staggered_pair_composes_to_laplacian() {
        let g = Grid2D::new(16, 12, 1.3, 0.7).unwrap();
        let f = ScalarField::from_fn(g, |x, y| (3.0 * x).sin() * (y * 2.0).cos() + x * x);
        let a = divergence_backward(&gradient_forward(&f));
        let b = laplacian(&f);
        assert!((&a - &b).max_abs() < 1e-10 * b.max_abs());
    }
}
