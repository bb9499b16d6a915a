//! Discrete free energy and its exact variational derivatives.
//!
//! The discrete energy is
//!
//! ```text
//! E = hx hy sum_i [ eps/2 |G|^2 + gamma/4 Q + bulk(phi)
//!                 + kappa/2 |G d|^2 + alpha/4 |d|^4 - alpha/2 (phi - phi_cr) |d|^2
//!                 + beta/2 (C phi . d)^2 ]
//! ```
//!
//! with `G` the forward-difference gradient and `C` the centered gradient.
//! `Q` averages `(A^2 + B^2)^2` over the four choices of forward or
//! backward differences `A` in `x` and `B` in `y`; a single one-sided choice
//! would pair values half a cell apart in different directions and make
//! the resulting `mu` only first-order accurate.
//! `mu` and `h` below are the gradients of this sum divided by the cell area,
//! so energy variations and the residual pairings agree to round-off.

use super::potential::{bulk, bulk_deriv};
use super::{AnchoringForm, PhysParams};
use crate::error::Result;
use crate::grid::{ScalarField, Stencil, VectorField2};
use crate::state::State;

/// Energy split into its named contributions.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EnergyBreakdown {
    /// `eps/2 |grad phi|^2 + bulk(phi)`.
    pub e_mix: f64,
    /// `kappa/2 |grad d|^2 + alpha/4 |d|^4 - alpha/2 (phi - phi_cr)|d|^2`.
    pub e_pol: f64,
    /// `beta/2 |grad phi . d|^2`.
    pub e_anch: f64,
    /// `gamma/4 |grad phi|^4`.
    pub e_gamma: f64,
    /// `1/2 |u|^2`.
    pub e_kin: f64,
    pub e_total: f64,
}

impl EnergyBreakdown {
    pub fn free(&self) -> f64 {
        self.e_total - self.e_kin
    }
}

/// Scratch buffers for the pointwise kernels.
#[derive(Debug, Clone)]
pub(crate) struct Scratch {
    gcx: Vec<f64>,
    gcy: Vec<f64>,
    gfx: Vec<f64>,
    gfy: Vec<f64>,
    a: Vec<f64>,
    t1: Vec<f64>,
    t2: Vec<f64>,
    gbx: Vec<f64>,
    gby: Vec<f64>,
    xf: Vec<f64>,
    yf: Vec<f64>,
    xb: Vec<f64>,
    yb: Vec<f64>,
}

impl Scratch {
    pub fn new(n: usize) -> Self {
        Scratch {
            gcx: vec![0.0; n],
            gcy: vec![0.0; n],
            gfx: vec![0.0; n],
            gfy: vec![0.0; n],
            a: vec![0.0; n],
            t1: vec![0.0; n],
            t2: vec![0.0; n],
            gbx: vec![0.0; n],
            gby: vec![0.0; n],
            xf: vec![0.0; n],
            yf: vec![0.0; n],
            xb: vec![0.0; n],
            yb: vec![0.0; n],
        }
    }
}

/// Symmetrised `|grad phi|^4` term. Fills `s.gfx`/`s.gfy` (forward) and
/// `s.gbx`/`s.gby` (backward differences) and, when `fluxes` is set, the
/// flux sums `s.xf, s.yf` (paired with forward) and `s.xb, s.yb` (paired
/// with backward differences). Returns `sum_i Q_i` when `density` is None,
/// otherwise writes `Q_i` there.
fn quartic_gradient(
    st: &Stencil,
    phi: &[f64],
    s: &mut Scratch,
    fluxes: bool,
    mut density: Option<&mut [f64]>,
) -> f64 {
    st.grad_f(phi, &mut s.gfx, &mut s.gfy);
    st.grad_b(phi, &mut s.gbx, &mut s.gby);
    let mut total = 0.0;
    for k in 0..phi.len() {
        let (fx, fy, bx, by) = (s.gfx[k], s.gfy[k], s.gbx[k], s.gby[k]);
        let q_ff = fx * fx + fy * fy;
        let q_fb = fx * fx + by * by;
        let q_bf = bx * bx + fy * fy;
        let q_bb = bx * bx + by * by;
        let qk = 0.25 * (q_ff * q_ff + q_fb * q_fb + q_bf * q_bf + q_bb * q_bb);
        match density.as_deref_mut() {
            Some(d) => d[k] = qk,
            None => total += qk,
        }
        if fluxes {
            s.xf[k] = (q_ff + q_fb) * fx;
            s.xb[k] = (q_bf + q_bb) * bx;
            s.yf[k] = (q_ff + q_bf) * fy;
            s.yb[k] = (q_fb + q_bb) * by;
        }
    }
    total
}

/// Evaluates the free-energy densities summed over the grid.
pub(crate) fn energy_sums(
    p: &PhysParams,
    st: &Stencil,
    phi: &[f64],
    dx: &[f64],
    dy: &[f64],
    s: &mut Scratch,
) -> Result<EnergyBreakdown> {
    let e_gamma = if p.gamma != 0.0 {
        0.25 * p.gamma * quartic_gradient(st, phi, s, false, None)
    } else {
        0.0
    };
    st.grad_f(phi, &mut s.gfx, &mut s.gfy);
    st.grad_c(phi, &mut s.gcx, &mut s.gcy);
    let (mut e_mix, mut e_anch, mut e_pol) = (0.0, 0.0, 0.0);
    for k in 0..phi.len() {
        let g2 = s.gfx[k] * s.gfx[k] + s.gfy[k] * s.gfy[k];
        e_mix += 0.5 * p.eps * g2 + bulk(phi[k], p)?;
        let d2 = dx[k] * dx[k] + dy[k] * dy[k];
        e_pol += 0.25 * p.alpha * d2 * d2 - 0.5 * p.alpha * (phi[k] - p.phi_cr) * d2;
        let a = s.gcx[k] * dx[k] + s.gcy[k] * dy[k];
        e_anch += 0.5 * p.beta * a * a;
    }
    for comp in [dx, dy] {
        st.grad_f(comp, &mut s.t1, &mut s.t2);
        e_pol += 0.5
            * p.kappa
            * s.t1
                .iter()
                .zip(&s.t2)
                .map(|(a, b)| a * a + b * b)
                .sum::<f64>();
    }
    let area = st.hx * st.hy;
    let mut e = EnergyBreakdown {
        e_mix: e_mix * area,
        e_pol: e_pol * area,
        e_anch: e_anch * area,
        e_gamma: e_gamma * area,
        e_kin: 0.0,
        e_total: 0.0,
    };
    e.e_total = e.e_mix + e.e_pol + e.e_anch + e.e_gamma;
    Ok(e)
}

/// Writes `mu` into `mu` and `h` into `(hx, hy)`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn variational_derivatives(
    p: &PhysParams,
    st: &Stencil,
    phi: &[f64],
    dx: &[f64],
    dy: &[f64],
    mu: &mut [f64],
    hx: &mut [f64],
    hy: &mut [f64],
    s: &mut Scratch,
) -> Result<()> {
    let n = phi.len();
    st.grad_c(phi, &mut s.gcx, &mut s.gcy);

    // mu: gradient part -eps Lap phi plus the quartic-gradient term.
    st.lap(phi, mu);
    for m in mu.iter_mut() {
        *m *= -p.eps;
    }
    if p.gamma != 0.0 {
        quartic_gradient(st, phi, s, true, None);
        st.div_b(&s.xf, &s.yf, &mut s.t1);
        st.div_f(&s.xb, &s.yb, &mut s.t2);
        let c = 0.25 * p.gamma;
        for k in 0..n {
            mu[k] -= c * (s.t1[k] + s.t2[k]);
        }
    }

    // Anchoring flux, then -beta div_c(flux).
    for k in 0..n {
        s.a[k] = s.gcx[k] * dx[k] + s.gcy[k] * dy[k];
        match p.anchoring_form {
            AnchoringForm::Tensorial => {
                s.t1[k] = s.a[k] * dx[k];
                s.t2[k] = s.a[k] * dy[k];
            }
            AnchoringForm::IsotropicDiscrete => {
                let d2 = dx[k] * dx[k] + dy[k] * dy[k];
                s.t1[k] = d2 * s.gcx[k];
                s.t2[k] = d2 * s.gcy[k];
            }
        }
    }
    st.div_c(&s.t1, &s.t2, &mut s.gfx);
    for k in 0..n {
        let d2 = dx[k] * dx[k] + dy[k] * dy[k];
        mu[k] += bulk_deriv(phi[k], p)? - 0.5 * p.alpha * d2 - p.beta * s.gfx[k];
    }

    // h.
    st.lap(dx, hx);
    st.lap(dy, hy);
    for k in 0..n {
        let d2 = dx[k] * dx[k] + dy[k] * dy[k];
        let w = p.alpha * (d2 - (phi[k] - p.phi_cr));
        let ab = p.beta * s.a[k];
        hx[k] = -p.kappa * hx[k] + w * dx[k] + ab * s.gcx[k];
        hy[k] = -p.kappa * hy[k] + w * dy[k] + ab * s.gcy[k];
    }
    Ok(())
}

/// Free-energy breakdown of a state, including kinetic energy when a flow
/// sub-state is present.
pub fn free_energy(state: &State, p: &PhysParams) -> Result<EnergyBreakdown> {
    let g = state.grid();
    let mut s = Scratch::new(g.len());
    let mut e = energy_sums(
        p,
        &g.stencil(),
        state.phi.values(),
        state.d.xs(),
        state.d.ys(),
        &mut s,
    )?;
    if let Some(flow) = &state.flow {
        e.e_kin = 0.5 * flow.u.l2_norm().powi(2);
        e.e_total += e.e_kin;
    }
    Ok(e)
}

/// Free energy of `(phi, d)` alone.
pub fn free_energy_fields(
    phi: &ScalarField,
    d: &VectorField2,
    p: &PhysParams,
) -> Result<EnergyBreakdown> {
    let g = phi.grid();
    let mut s = Scratch::new(g.len());
    energy_sums(p, &g.stencil(), phi.values(), d.xs(), d.ys(), &mut s)
}

/// Chemical potential `mu = delta E / delta phi`.
pub fn chemical_potential(
    phi: &ScalarField,
    d: &VectorField2,
    p: &PhysParams,
) -> Result<ScalarField> {
    Ok(derivatives(phi, d, p)?.0)
}

/// Molecular field `h = delta E / delta d`.
pub fn molecular_field(
    phi: &ScalarField,
    d: &VectorField2,
    p: &PhysParams,
) -> Result<VectorField2> {
    Ok(derivatives(phi, d, p)?.1)
}

/// `(mu, h)` computed together.
pub fn derivatives(
    phi: &ScalarField,
    d: &VectorField2,
    p: &PhysParams,
) -> Result<(ScalarField, VectorField2)> {
    let g = *phi.grid();
    let n = g.len();
    let (mut mu, mut hx, mut hy) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut s = Scratch::new(n);
    variational_derivatives(
        p,
        &g.stencil(),
        phi.values(),
        d.xs(),
        d.ys(),
        &mut mu,
        &mut hx,
        &mut hy,
        &mut s,
    )?;
    Ok((
        ScalarField::from_vec(g, mu)?,
        VectorField2::from_vecs(g, hx, hy),
    ))
}

/// Pointwise free-energy density (without kinetic part).
pub fn energy_density(phi: &ScalarField, d: &VectorField2, p: &PhysParams) -> Result<ScalarField> {
    let g = *phi.grid();
    let st = g.stencil();
    let n = g.len();
    let (mut gfx, mut gfy, mut gcx, mut gcy) =
        (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let (mut ax, mut ay, mut bx, mut by) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    st.grad_f(phi.values(), &mut gfx, &mut gfy);
    st.grad_c(phi.values(), &mut gcx, &mut gcy);
    st.grad_f(d.xs(), &mut ax, &mut ay);
    st.grad_f(d.ys(), &mut bx, &mut by);
    let (ph, dx, dy) = (phi.values(), d.xs(), d.ys());
    let mut quart = vec![0.0; n];
    if p.gamma != 0.0 {
        quartic_gradient(&st, ph, &mut Scratch::new(n), false, Some(&mut quart));
    }
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let g2 = gfx[k] * gfx[k] + gfy[k] * gfy[k];
        let d2 = dx[k] * dx[k] + dy[k] * dy[k];
        let a = gcx[k] * dx[k] + gcy[k] * dy[k];
        let gd2 = ax[k] * ax[k] + ay[k] * ay[k] + bx[k] * bx[k] + by[k] * by[k];
        out.push(
            0.5 * p.eps * g2
                + 0.25 * p.gamma * quart[k]
                + bulk(ph[k], p)?
                + 0.5 * p.kappa * gd2
                + 0.25 * p.alpha * d2 * d2
                - 0.5 * p.alpha * (ph[k] - p.phi_cr) * d2
                + 0.5 * p.beta * a * a,
        );
    }
    ScalarField::from_vec(g, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{integrate, Grid2D};

    fn g() -> Grid2D {
        Grid2D::unit_square(16).unwrap()
    }

    #[test]
    fn zero_state_has_zero_energy() {
        let p = PhysParams::drop_benchmark();
        let e =
            free_energy_fields(&ScalarField::zeros(g()), &VectorField2::zeros(g()), &p).unwrap();
        assert_eq!(e, EnergyBreakdown::default());
    }

    #[test]
    fn homogeneous_liquid_crystal_energy() {
        let p = PhysParams::drop_benchmark();
        let phi = ScalarField::constant(g(), 1.0);
        let d = VectorField2::constant(g(), 0.0, 0.5f64.sqrt());
        let e = free_energy_fields(&phi, &d, &p).unwrap();
        assert!((e.e_total / 4.0 + 0.625).abs() < 1e-13, "{e:?}");
    }

    #[test]
    fn constant_fields_give_potential_derivative() {
        let p = PhysParams::drop_benchmark();
        let phi = ScalarField::constant(g(), 0.3);
        let mu = chemical_potential(&phi, &VectorField2::zeros(g()), &p).unwrap();
        let expected = super::super::potential::quartic_deriv(0.3, p.eps);
        assert!(mu.values().iter().all(|m| (m - expected).abs() < 1e-13));
    }

    #[test]
    fn molecular_field_of_homogeneous_state() {
        let p = PhysParams::drop_benchmark();
        let phi = ScalarField::constant(g(), 1.0);
        let h = molecular_field(&phi, &VectorField2::constant(g(), 0.0, 0.95), &p).unwrap();
        assert!(h.xs().iter().all(|v| v.abs() < 1e-14));
        assert!(h.ys().iter().all(|v| (v - 3.82375).abs() < 1e-12));
        // |d|^2 = phi - phi_cr is stationary.
        let h0 =
            molecular_field(&phi, &VectorField2::constant(g(), 0.5f64.sqrt(), 0.0), &p).unwrap();
        assert!(h0.max_magnitude() < 1e-14);
    }

    #[test]
    fn density_integrates_to_total() {
        let p = PhysParams {
            gamma: 0.01,
            ..PhysParams::drop_benchmark()
        };
        let phi = ScalarField::from_fn(g(), |x, y| 0.5 + 0.4 * (3.0 * x).sin() * (2.0 * y).cos());
        let d = VectorField2::from_fn(g(), |x, y| (0.3 * x.cos(), 0.8 + 0.1 * y.sin()));
        let e = free_energy_fields(&phi, &d, &p).unwrap();
        let dens = energy_density(&phi, &d, &p).unwrap();
        assert!((integrate(&dens) - e.e_total).abs() < 1e-12 * e.e_total.abs().max(1.0));
    }

    #[test]
    fn flory_huggins_domain_error_propagates() {
        let p = PhysParams::fh_landscape_example();
        let phi = ScalarField::constant(g(), 1.0);
        assert!(free_energy_fields(&phi, &VectorField2::zeros(g()), &p).is_err());
        assert!(chemical_potential(&phi, &VectorField2::zeros(g()), &p).is_err());
    }
}
