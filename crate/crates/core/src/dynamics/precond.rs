//! Fourier-diagonal approximation of the step Jacobian.
//!
//! Coefficients are frozen at their domain means, so the inverse is a pair of
//! real even multipliers: one for the phase field (fourth order, with the
//! anisotropic anchoring stiffness) and one shared by both polarization
//! components (second order).

use crate::energy::potential::bulk_second;
use crate::energy::{AnchoringForm, PhysParams};
use crate::grid::Stencil;
use crate::spectral::Spectral;

#[derive(Debug, Clone)]
pub(crate) struct Preconditioner {
    sp: Spectral,
    inv_phi: Vec<f64>,
    inv_d: Vec<f64>,
    buf_a: Vec<f64>,
    buf_b: Vec<f64>,
}

impl Preconditioner {
    pub fn new(sp: Spectral) -> Self {
        let n = sp.grid().len();
        Preconditioner {
            sp,
            inv_phi: vec![1.0; n],
            inv_d: vec![1.0; n],
            buf_a: vec![0.0; n],
            buf_b: vec![0.0; n],
        }
    }

    /// Refreshes the mean coefficients at the linearisation point.
    #[allow(clippy::too_many_arguments)]
    pub fn update(
        &mut self,
        p: &PhysParams,
        st: &Stencil,
        dt: f64,
        theta: f64,
        phi: &[f64],
        dx: &[f64],
        dy: &[f64],
    ) {
        let n = phi.len() as f64;
        let (mut m11, mut m12, mut m22, mut sf, mut a, mut g2) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        let (mut gx, mut gy) = (vec![0.0; phi.len()], vec![0.0; phi.len()]);
        if p.gamma != 0.0 {
            st.grad_f(phi, &mut gx, &mut gy);
        }
        for k in 0..phi.len() {
            m11 += dx[k] * dx[k];
            m12 += dx[k] * dy[k];
            m22 += dy[k] * dy[k];
            sf += bulk_second(phi[k], p).unwrap_or(0.0);
            let d2 = dx[k] * dx[k] + dy[k] * dy[k];
            a += p.alpha * (2.0 * d2 - (phi[k] - p.phi_cr));
            g2 += gx[k] * gx[k] + gy[k] * gy[k];
        }
        let (m11, m12, m22) = (m11 / n, m12 / n, m22 / n);
        let sf = (sf / n).max(0.0);
        let a = (a / n).max(0.0);
        let eps_eff = p.eps + 3.0 * p.gamma * g2 / n;
        let lap = self.sp.neg_laplacian_symbol();
        let (sx, sy) = self.sp.centered_symbols();
        for k in 0..lap.len() {
            let l = lap[k];
            let anch = match p.anchoring_form {
                AnchoringForm::Tensorial => {
                    m11 * sx[k] * sx[k] + 2.0 * m12 * sx[k] * sy[k] + m22 * sy[k] * sy[k]
                }
                AnchoringForm::IsotropicDiscrete => (m11 + m22) * (sx[k] * sx[k] + sy[k] * sy[k]),
            };
            let phi_sym =
                1.0 + dt * theta * l * (eps_eff * l + sf + p.beta * anch) + theta * p.delta * l;
            self.inv_phi[k] = 1.0 / phi_sym;
            self.inv_d[k] = 1.0 / (1.0 + dt * theta * (p.kappa * l + a));
        }
    }

    /// `out = M^{-1} v` for `v = [phi; d_x; d_y]`.
    pub fn apply(&mut self, v: &[f64], out: &mut [f64]) {
        let n = self.inv_phi.len();
        out.copy_from_slice(v);
        let (o_phi, o_d) = out.split_at_mut(n);
        let inv_phi = &self.inv_phi;
        self.sp.apply_even_multiplier(o_phi, None, |k| inv_phi[k]);
        self.buf_a.copy_from_slice(&o_d[..n]);
        self.buf_b.copy_from_slice(&o_d[n..]);
        let inv_d = &self.inv_d;
        self.sp
            .apply_even_multiplier(&mut self.buf_a, Some(&mut self.buf_b), |k| inv_d[k]);
        o_d[..n].copy_from_slice(&self.buf_a);
        o_d[n..].copy_from_slice(&self.buf_b);
    }
}
