//! Incompressible velocity coupling: the phase/polarization force, a
//! semi-implicit momentum step and the discrete Leray projection.
//!
//! Divergence and projection use the centered difference operators, so
//! `divergence(project_divergence_free(v))` vanishes to round-off.

use rustfft::num_complex::Complex64;

use crate::dynamics::NumParams;
use crate::energy::PhysParams;
use crate::error::{Result, SimError};
use crate::grid::{Grid2D, ScalarField, VectorField2};
use crate::spectral::Spectral;

/// Velocity and the diagnostic generalized pressure.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub u: VectorField2,
    pub p_star: ScalarField,
}

impl FlowState {
    pub fn at_rest(grid: Grid2D) -> Self {
        FlowState {
            u: VectorField2::zeros(grid),
            p_star: ScalarField::zeros(grid),
        }
    }

    /// Starts from the divergence-free part of `u`.
    pub fn new(u: VectorField2) -> Self {
        let g = *u.grid();
        FlowState {
            u: project_divergence_free(&u),
            p_star: ScalarField::zeros(g),
        }
    }
}

/// `F = mu grad(phi) + (grad d)^T h`, with centered gradients.
pub fn coupling_force(
    phi: &ScalarField,
    mu: &ScalarField,
    d: &VectorField2,
    h: &VectorField2,
) -> VectorField2 {
    let g = *phi.grid();
    let n = g.len();
    let (mut fx, mut fy) = (vec![0.0; n], vec![0.0; n]);
    force_into(
        &g,
        phi.values(),
        mu.values(),
        d.xs(),
        d.ys(),
        h.xs(),
        h.ys(),
        &mut fx,
        &mut fy,
    );
    VectorField2::from_vecs(g, fx, fy)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn force_into(
    g: &Grid2D,
    phi: &[f64],
    mu: &[f64],
    dx: &[f64],
    dy: &[f64],
    hx: &[f64],
    hy: &[f64],
    fx: &mut [f64],
    fy: &mut [f64],
) {
    let st = g.stencil();
    let n = g.len();
    let (mut ax, mut ay) = (vec![0.0; n], vec![0.0; n]);
    st.grad_c(phi, fx, fy);
    for k in 0..n {
        fx[k] *= mu[k];
        fy[k] *= mu[k];
    }
    for (comp, hc) in [(dx, hx), (dy, hy)] {
        st.grad_c(comp, &mut ax, &mut ay);
        for k in 0..n {
            fx[k] += ax[k] * hc[k];
            fy[k] += ay[k] * hc[k];
        }
    }
}

/// Spectral helper owning the FFT plans for repeated projections.
#[derive(Debug, Clone)]
pub struct FlowSolver {
    sp: Spectral,
}

impl FlowSolver {
    pub fn new(grid: Grid2D) -> Self {
        FlowSolver {
            sp: Spectral::new(grid),
        }
    }

    pub fn grid(&self) -> &Grid2D {
        self.sp.grid()
    }

    fn to_modes(&self, x: &[f64], y: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut a = Spectral::pack(x, None);
        let mut b = Spectral::pack(y, None);
        self.sp.forward(&mut a);
        self.sp.forward(&mut b);
        (a, b)
    }

    fn from_modes(&self, mut a: Vec<Complex64>, mut b: Vec<Complex64>) -> VectorField2 {
        self.sp.inverse(&mut a);
        self.sp.inverse(&mut b);
        VectorField2::from_vecs(
            *self.grid(),
            a.iter().map(|c| c.re).collect(),
            b.iter().map(|c| c.re).collect(),
        )
    }

    /// Removes the centered-gradient part of each mode; modes invisible to
    /// the centered gradient (mean and Nyquist) are left alone.
    fn project_modes(&self, a: &mut [Complex64], b: &mut [Complex64]) {
        let (sx, sy) = self.sp.centered_symbols();
        for k in 0..a.len() {
            let s2 = sx[k] * sx[k] + sy[k] * sy[k];
            if s2 > 1e-12 * self.max_symbol2() {
                let dot = (a[k] * sx[k] + b[k] * sy[k]) / s2;
                a[k] -= dot * sx[k];
                b[k] -= dot * sy[k];
            }
        }
    }

    fn max_symbol2(&self) -> f64 {
        let g = self.grid();
        1.0 / (g.hx() * g.hx()) + 1.0 / (g.hy() * g.hy())
    }

    /// Leray projection onto centered-divergence-free fields.
    pub fn project(&self, v: &VectorField2) -> VectorField2 {
        let (mut a, mut b) = self.to_modes(v.xs(), v.ys());
        self.project_modes(&mut a, &mut b);
        self.from_modes(a, b)
    }

    /// Pressure whose centered gradient is the gradient part of `v`, with
    /// zero mean.
    pub fn gradient_potential(&self, v: &VectorField2) -> ScalarField {
        let (a, b) = self.to_modes(v.xs(), v.ys());
        let (sx, sy) = self.sp.centered_symbols();
        let mut p: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); a.len()];
        for k in 0..a.len() {
            let s2 = sx[k] * sx[k] + sy[k] * sy[k];
            if s2 > 1e-12 * self.max_symbol2() {
                // grad_c p has symbol i*sigma.
                p[k] = -Complex64::i() * (a[k] * sx[k] + b[k] * sy[k]) / s2;
            }
        }
        self.sp.inverse(&mut p);
        ScalarField::from_vec(*self.grid(), p.iter().map(|c| c.re).collect()).expect("grid sized")
    }

    /// Intermediate velocity `u_n + dt P(F - mean F)` that transports the
    /// phase field and polarization during a coupled step.
    pub fn transport_velocity(
        &self,
        u_n: &VectorField2,
        force: &VectorField2,
        dt: f64,
    ) -> VectorField2 {
        let (mut a, mut b) = self.to_modes(force.xs(), force.ys());
        self.project_modes(&mut a, &mut b);
        a[0] = Complex64::new(0.0, 0.0);
        b[0] = Complex64::new(0.0, 0.0);
        let pf = self.from_modes(a, b);
        u_n.axpy(dt, &pf)
    }

    /// One momentum step given the force already evaluated at the
    /// theta-averaged state: `u* = u_n + dt P F`, then
    /// `(I - dt nu_* Lap) u_{n+1} = u* - dt B(u*, u*) + dt div(2 (nu(phi) - nu_*) D u*)`
    /// followed by projection. Mean velocity is carried over exactly.
    pub fn momentum_step(
        &self,
        flow: &FlowState,
        phi: &ScalarField,
        force: &VectorField2,
        p: &PhysParams,
        np: &NumParams,
    ) -> Result<FlowState> {
        let g = *self.grid();
        let dt = np.dt;
        let ustar = self.transport_velocity(&flow.u, force, dt);
        let cfl = ustar.max_magnitude() * dt / g.min_spacing();
        if cfl > np.cfl_limit {
            return Err(SimError::Cfl {
                cfl,
                limit: np.cfl_limit,
            });
        }
        let n = g.len();
        let st = g.stencil();
        let (ux, uy) = (ustar.xs(), ustar.ys());

        // Skew-symmetric advection 1/2 [(u.grad)u + div(u (x) u)].
        let (mut gx, mut gy) = (vec![0.0; n], vec![0.0; n]);
        let (mut bx, mut by) = (vec![0.0; n], vec![0.0; n]);
        let mut tmp = vec![0.0; n];
        for (comp, out) in [(ux, &mut bx), (uy, &mut by)] {
            st.grad_c(comp, &mut gx, &mut gy);
            let (mut fxx, mut fxy) = (vec![0.0; n], vec![0.0; n]);
            for k in 0..n {
                fxx[k] = ux[k] * comp[k];
                fxy[k] = uy[k] * comp[k];
            }
            st.div_c(&fxx, &fxy, &mut tmp);
            for k in 0..n {
                out[k] = 0.5 * (ux[k] * gx[k] + uy[k] * gy[k] + tmp[k]);
            }
        }

        let mut rx: Vec<f64> = (0..n).map(|k| ux[k] - dt * bx[k]).collect();
        let mut ry: Vec<f64> = (0..n).map(|k| uy[k] - dt * by[k]).collect();

        // Variable-viscosity correction.
        if p.nu_star_upper != p.nu_star {
            let (mut axx, mut axy) = (vec![0.0; n], vec![0.0; n]);
            let (mut ayx, mut ayy) = (vec![0.0; n], vec![0.0; n]);
            st.grad_c(ux, &mut axx, &mut axy);
            st.grad_c(uy, &mut ayx, &mut ayy);
            let ph = phi.values();
            let (mut sxx, mut sxy, mut syy) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
            for k in 0..n {
                let c = p.viscosity(ph[k]) - p.nu_star;
                sxx[k] = 2.0 * c * axx[k];
                sxy[k] = c * (axy[k] + ayx[k]);
                syy[k] = 2.0 * c * ayy[k];
            }
            st.div_c(&sxx, &sxy, &mut tmp);
            for k in 0..n {
                rx[k] += dt * tmp[k];
            }
            st.div_c(&sxy, &syy, &mut tmp);
            for k in 0..n {
                ry[k] += dt * tmp[k];
            }
        }

        let w = VectorField2::from_vecs(g, rx, ry);
        let p_star = self.gradient_potential(&(&w - &ustar).scale(1.0 / dt));
        let (mut a, mut b) = self.to_modes(w.xs(), w.ys());
        let lap = self.sp.neg_laplacian_symbol();
        for k in 0..n {
            let f = 1.0 / (1.0 + dt * p.nu_star * lap[k]);
            a[k] *= f;
            b[k] *= f;
        }
        self.project_modes(&mut a, &mut b);
        let (mx, my) = flow.u.mean();
        a[0] = Complex64::new(mx * n as f64, 0.0);
        b[0] = Complex64::new(my * n as f64, 0.0);
        let u = self.from_modes(a, b);
        Ok(FlowState { u, p_star })
    }
}

/// Leray projection of `v` (see [`FlowSolver::project`]).
pub fn project_divergence_free(v: &VectorField2) -> VectorField2 {
    FlowSolver::new(*v.grid()).project(v)
}

/// One momentum step (see [`FlowSolver::momentum_step`]).
pub fn momentum_step(
    flow: &FlowState,
    phi: &ScalarField,
    force: &VectorField2,
    p: &PhysParams,
    np: &NumParams,
) -> Result<FlowState> {
    FlowSolver::new(*phi.grid()).momentum_step(flow, phi, force, p, np)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{divergence, gradient};
    use std::f64::consts::PI;

    fn grid() -> Grid2D {
        Grid2D::unit_square(32).unwrap()
    }

    fn np(dt: f64) -> NumParams {
        NumParams {
            dt,
            ..NumParams::default()
        }
    }

    #[test]
    fn gradients_project_to_zero() {
        let f = ScalarField::from_fn(grid(), |x, y| {
            (PI * x).sin() * (2.0 * PI * y).cos() + 0.3 * (3.0 * PI * y).sin()
        });
        let pv = project_divergence_free(&gradient(&f));
        assert!(pv.max_magnitude() < 1e-12);
    }

    #[test]
    fn projection_is_idempotent_and_solenoidal() {
        let v = VectorField2::from_fn(grid(), |x, y| {
            ((2.0 * PI * x).sin() + y.powi(2), (PI * x * y).cos())
        });
        let p1 = project_divergence_free(&v);
        let p2 = project_divergence_free(&p1);
        assert!((&p2 - &p1).max_magnitude() < 1e-12);
        assert!(divergence(&p1).max_abs() < 1e-11);
        let m0 = v.mean();
        let m1 = p1.mean();
        assert!((m0.0 - m1.0).abs() < 1e-14 && (m0.1 - m1.1).abs() < 1e-14);
    }

    #[test]
    fn force_vanishes_for_homogeneous_state() {
        let g = grid();
        let phi = ScalarField::constant(g, 0.7);
        let mu = ScalarField::constant(g, 2.0);
        let d = VectorField2::constant(g, 0.1, 0.5);
        let h = VectorField2::constant(g, 1.0, -1.0);
        assert_eq!(coupling_force(&phi, &mu, &d, &h).max_magnitude(), 0.0);
    }

    #[test]
    fn shear_mode_decays_by_implicit_factor() {
        let g = grid();
        let p = PhysParams::drop_benchmark();
        let dt = 1e-3;
        let u0 = VectorField2::from_fn(g, |_, y| ((2.0 * PI * y).sin(), 0.0));
        let mut flow = FlowState::new(u0.clone());
        let solver = FlowSolver::new(g);
        let phi = ScalarField::zeros(g);
        let zero = VectorField2::zeros(g);
        // Symbol of the compact Laplacian for k = 2 pi.
        let kh2 = 4.0 / (g.hy() * g.hy()) * (PI * g.hy()).sin().powi(2);
        let factor = 1.0 / (1.0 + p.nu_star * kh2 * dt);
        let mut amp = 1.0;
        for _ in 0..5 {
            flow = solver
                .momentum_step(&flow, &phi, &zero, &p, &np(dt))
                .unwrap();
            amp *= factor;
            let expect = u0.scale(amp);
            assert!((&flow.u - &expect).max_magnitude() < 1e-12);
        }
    }

    #[test]
    fn cfl_violation_is_reported() {
        let g = grid();
        let flow = FlowState::new(VectorField2::from_fn(g, |_, y| (1e3 * (PI * y).sin(), 0.0)));
        let err = momentum_step(
            &flow,
            &ScalarField::zeros(g),
            &VectorField2::zeros(g),
            &PhysParams::drop_benchmark(),
            &np(0.1),
        );
        assert!(matches!(err, Err(SimError::Cfl { .. })));
    }
}
