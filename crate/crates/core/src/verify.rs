//! Independent oracles: variational-gradient checks, the stress identity,
//! the homogeneous (spatially constant) reduction and convergence orders.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::lp_decay_envelope;
use crate::dynamics::{NumParams, Stepper};
use crate::energy::{derivatives, free_energy_fields, PhysParams, Potential};
use crate::error::{Result, SimError};
use crate::flow::{coupling_force, project_divergence_free};
use crate::grid::{inner_product, Grid2D, ScalarField, VectorField2};
use crate::state::State;

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub name: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub details: String,
}

impl OracleResult {
    pub const CSV_HEADER: &'static str = "name,measured,expected,tolerance,pass,details";

    /// Passes when `|measured - expected| <= tolerance`.
    pub fn absolute(
        name: impl Into<String>,
        measured: f64,
        expected: f64,
        tolerance: f64,
        details: impl Into<String>,
    ) -> Self {
        let pass = (measured - expected).abs() <= tolerance;
        OracleResult {
            name: name.into(),
            measured,
            expected,
            tolerance,
            pass,
            details: details.into(),
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:e},{:e},{:e},{},\"{}\"",
            self.name,
            self.measured,
            self.expected,
            self.tolerance,
            self.pass,
            self.details.replace('"', "'")
        )
    }
}

impl std::fmt::Display for OracleResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {}: measured {:.6e}, expected {:.6e} (tol {:.1e}) {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.expected,
            self.tolerance,
            self.details
        )
    }
}

/// Random trigonometric polynomial with modes up to `max_mode` in each
/// direction, coefficients decaying like `1/(1 + |m|^2)`, scaled to
/// `max|f - offset| = amplitude`.
pub fn random_trig_field(
    grid: Grid2D,
    seed: u64,
    max_mode: i64,
    offset: f64,
    amplitude: f64,
) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut modes = Vec::new();
    for q in 0..=max_mode {
        for p in -max_mode..=max_mode {
            if q == 0 && p <= 0 {
                continue;
            }
            let w = 1.0 / (1.0 + (p * p + q * q) as f64);
            let (a, b): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            modes.push((
                2.0 * PI * p as f64 / grid.lx(),
                2.0 * PI * q as f64 / grid.ly(),
                w * a,
                w * b,
            ));
        }
    }
    let raw = ScalarField::from_fn(grid, |x, y| {
        modes
            .iter()
            .map(|&(kx, ky, a, b)| a * (kx * x + ky * y).cos() + b * (kx * x + ky * y).sin())
            .sum()
    });
    let m = raw.max_abs();
    let s = if m > 0.0 { amplitude / m } else { 0.0 };
    raw.map(|v| offset + s * v)
}

/// Smooth random state inside the domain of the selected potential
/// (`|phi| <= 0.9` for Flory-Huggins).
pub fn random_smooth_state(grid: Grid2D, p: &PhysParams, seed: u64) -> Result<State> {
    let phi = match p.potential {
        Potential::Quartic => random_trig_field(grid, seed, 3, 0.5, 0.6),
        Potential::FloryHuggins => random_trig_field(grid, seed, 3, 0.0, 0.9),
    };
    let dx = random_trig_field(grid, seed.wrapping_add(1_000_003), 3, 0.2, 0.6);
    let dy = random_trig_field(grid, seed.wrapping_add(2_000_003), 3, -0.1, 0.7);
    State::new(0.0, phi, VectorField2::from_components(dx, dy)?)
}

fn relative_error(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

/// Compares `<mu, dphi>` and `<h, dd>` with central differences of the
/// discrete free energy along random band-limited directions. Pass when the
/// relative error is below 1e-6.
pub fn gradient_check(
    state: &State,
    p: &PhysParams,
    direction_seed: u64,
) -> Result<(OracleResult, OracleResult)> {
    let g = *state.grid();
    let dphi = random_trig_field(g, direction_seed, 3, 0.0, 1.0);
    let ddx = random_trig_field(g, direction_seed.wrapping_add(17), 3, 0.0, 1.0);
    let ddy = random_trig_field(g, direction_seed.wrapping_add(31), 3, 0.0, 1.0);
    let dd = VectorField2::from_components(ddx, ddy)?;
    gradient_check_along(state, p, &dphi, &dd)
}

/// [`gradient_check`] along given directions.
pub fn gradient_check_along(
    state: &State,
    p: &PhysParams,
    dphi: &ScalarField,
    dd: &VectorField2,
) -> Result<(OracleResult, OracleResult)> {
    let (mu, h) = derivatives(&state.phi, &state.d, p)?;
    let energy = |phi: &ScalarField, d: &VectorField2| -> Result<f64> {
        Ok(free_energy_fields(phi, d, p)?.e_total)
    };
    // Fourth-order central difference; the step balances truncation against
    // the round-off of an O(|E|) energy sum.
    let step = |field_scale: f64, dir_scale: f64| {
        if dir_scale == 0.0 {
            0.0
        } else {
            f64::EPSILON.powf(0.2) * field_scale.max(1.0) / dir_scale
        }
    };
    let five_point = |e: &dyn Fn(f64) -> Result<f64>, h: f64| -> Result<f64> {
        if h == 0.0 {
            return Ok(0.0);
        }
        Ok((8.0 * (e(h)? - e(-h)?) - (e(2.0 * h)? - e(-2.0 * h)?)) / (12.0 * h))
    };

    let hp = step(state.phi.max_abs(), dphi.max_abs());
    let fd_phi = five_point(&|t| energy(&(&state.phi + &dphi.scale(t)), &state.d), hp)?;
    let an_phi = inner_product(&mu, dphi);

    let hd = step(state.d.max_magnitude(), dd.max_magnitude());
    let fd_d = five_point(&|t| energy(&state.phi, &state.d.axpy(t, dd)), hd)?;
    let an_d = inner_product(&h, dd);

    let mk = |name: &str, an: f64, fd: f64, step: f64| {
        let rel = relative_error(an, fd);
        OracleResult {
            name: name.into(),
            measured: rel,
            expected: 0.0,
            tolerance: 1e-6,
            pass: rel < 1e-6,
            details: format!("analytic {an:.12e}, finite difference {fd:.12e}, step {step:.2e}"),
        }
    };
    Ok((
        mk("gradient_mu", an_phi, fd_phi, hp),
        mk("gradient_h", an_d, fd_d, hd),
    ))
}

/// Pointwise difference `L - R` between the stress divergence
/// `L = -eps div(grad phi (x) grad phi) - gamma div(|grad phi|^2 grad phi (x) grad phi)
///      - kappa div(grad d (.) grad d) - beta div((d . grad phi) d (x) grad phi)`
/// and `R = -grad e + mu grad phi + (grad d)^T h`, with `mu`, `h` the
/// discrete variational derivatives and centered differences elsewhere.
pub fn stress_defect(phi: &ScalarField, d: &VectorField2, p: &PhysParams) -> Result<VectorField2> {
    let g = *phi.grid();
    let n = g.len();
    let st = g.stencil();
    let (mu, h) = derivatives(phi, d, p)?;
    let (mut px, mut py) = (vec![0.0; n], vec![0.0; n]);
    let (mut ax, mut ay, mut bx, mut by) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    st.grad_c(phi.values(), &mut px, &mut py);
    st.grad_c(d.xs(), &mut ax, &mut ay);
    st.grad_c(d.ys(), &mut bx, &mut by);
    let (dx, dy) = (d.xs(), d.ys());

    // Stress tensor T with L_j = -d_i T_ij.
    let (mut txx, mut txy, mut tyx, mut tyy) =
        (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut e = vec![0.0; n];
    for k in 0..n {
        let g2 = px[k] * px[k] + py[k] * py[k];
        let c = p.eps + p.gamma * g2;
        let a = px[k] * dx[k] + py[k] * dy[k];
        txx[k] = c * px[k] * px[k]
            + p.kappa * (ax[k] * ax[k] + bx[k] * bx[k])
            + p.beta * a * dx[k] * px[k];
        txy[k] = c * px[k] * py[k]
            + p.kappa * (ax[k] * ay[k] + bx[k] * by[k])
            + p.beta * a * dx[k] * py[k];
        tyx[k] = c * py[k] * px[k]
            + p.kappa * (ay[k] * ax[k] + by[k] * bx[k])
            + p.beta * a * dy[k] * px[k];
        tyy[k] = c * py[k] * py[k]
            + p.kappa * (ay[k] * ay[k] + by[k] * by[k])
            + p.beta * a * dy[k] * py[k];
        let d2 = dx[k] * dx[k] + dy[k] * dy[k];
        let gd2 = ax[k] * ax[k] + ay[k] * ay[k] + bx[k] * bx[k] + by[k] * by[k];
        e[k] = 0.5 * p.eps * g2
            + 0.25 * p.gamma * g2 * g2
            + crate::energy::potential::bulk(phi.values()[k], p)?
            + 0.5 * p.kappa * gd2
            + 0.25 * p.alpha * d2 * d2
            - 0.5 * p.alpha * (phi.values()[k] - p.phi_cr) * d2
            + 0.5 * p.beta * a * a;
    }
    let (mut lx, mut ly) = (vec![0.0; n], vec![0.0; n]);
    st.div_c(&txx, &tyx, &mut lx);
    st.div_c(&txy, &tyy, &mut ly);
    let f = coupling_force(phi, &mu, d, &h);
    let (mut ex, mut ey) = (vec![0.0; n], vec![0.0; n]);
    st.grad_c(&e, &mut ex, &mut ey);
    let rx: Vec<f64> = (0..n).map(|k| -lx[k] - (-ex[k] + f.xs()[k])).collect();
    let ry: Vec<f64> = (0..n).map(|k| -ly[k] - (-ey[k] + f.ys()[k])).collect();
    Ok(VectorField2::from_vecs(g, rx, ry))
}

/// `|P(L - R)|` and `|L - R|` on one grid (discrete L2 norms). The check
/// passes when the projection does not increase the defect.
pub fn stress_identity_residual(
    phi: &ScalarField,
    d: &VectorField2,
    p: &PhysParams,
) -> Result<OracleResult> {
    let defect = stress_defect(phi, d, p)?;
    let raw = defect.l2_norm();
    let projected = project_divergence_free(&defect).l2_norm();
    Ok(OracleResult {
        name: "stress_identity".into(),
        measured: projected,
        expected: 0.0,
        tolerance: raw,
        pass: projected <= raw * (1.0 + 1e-12) + 1e-300,
        details: format!(
            "projected {projected:.6e}, unprojected {raw:.6e}, nx = {}",
            phi.grid().nx()
        ),
    })
}

/// Smooth trigonometric test fields on the periodic box of `grid`.
pub fn trig_test_fields(grid: Grid2D) -> (ScalarField, VectorField2) {
    let (kx, ky) = (2.0 * PI / grid.lx(), 2.0 * PI / grid.ly());
    let phi = ScalarField::from_fn(grid, |x, y| {
        0.5 + 0.3 * (kx * x).sin() * (ky * y).cos() + 0.1 * (2.0 * kx * x + ky * y).cos()
    });
    let d = VectorField2::from_fn(grid, |x, y| {
        (
            0.6 * (ky * y).cos() + 0.1 * (kx * x).sin(),
            0.5 + 0.3 * (kx * x + ky * y).sin(),
        )
    });
    (phi, d)
}

/// Refinement study of the projected stress defect over grids of the given
/// sizes on `[-1, 1]^2`; passes when every observed order is `2 +- 0.4`.
pub fn stress_convergence(p: &PhysParams, sizes: &[usize]) -> Result<OracleResult> {
    if sizes.len() < 2 {
        return Err(SimError::Config(
            "stress convergence needs at least two grids".into(),
        ));
    }
    let mut norms = Vec::new();
    for &n in sizes {
        let g = Grid2D::unit_square(n)?;
        let (phi, d) = trig_test_fields(g);
        let r = stress_identity_residual(&phi, &d, p)?;
        norms.push((n, r.measured, r.tolerance));
    }
    let mut orders = Vec::new();
    for w in norms.windows(2) {
        let ratio = (w[1].0 as f64 / w[0].0 as f64).ln();
        orders.push((w[0].1 / w[1].1).ln() / ratio);
    }
    let worst = orders.iter().copied().fold(2.0, |acc: f64, o| {
        if (o - 2.0).abs() > (acc - 2.0).abs() {
            o
        } else {
            acc
        }
    });
    let detail: Vec<String> = norms
        .iter()
        .map(|(n, pr, raw)| format!("n={n}: |P(L-R)|={pr:.3e} |L-R|={raw:.3e}"))
        .collect();
    Ok(OracleResult::absolute(
        if p.gamma != 0.0 {
            "stress_order_gamma"
        } else {
            "stress_order"
        },
        worst,
        2.0,
        0.4,
        format!(
            "orders {:?}; {}",
            orders.iter().map(|o| format!("{o:.3}")).collect::<Vec<_>>(),
            detail.join("; ")
        ),
    ))
}

/// Closed-form `|d|(t)` for spatially constant `phi` and `d` without flow:
/// the solution of `r' = lambda r - alpha r^3` with
/// `lambda = alpha (phi_const - phi_cr)`, written as
/// `1/r^2 = e^{-2 lambda t}/r0^2 + (alpha/lambda)(1 - e^{-2 lambda t})`,
/// valid for either sign of `lambda` (and `2 alpha t` in place of the
/// second term when `lambda = 0`).
pub fn homogeneous_oracle(r0: f64, phi_const: f64, p: &PhysParams, t: f64) -> f64 {
    if r0 == 0.0 {
        return 0.0;
    }
    let lambda = p.alpha * (phi_const - p.phi_cr);
    let z0 = 1.0 / (r0 * r0);
    let z = if lambda == 0.0 {
        z0 + 2.0 * p.alpha * t
    } else {
        z0 * (-2.0 * lambda * t).exp() - p.alpha / lambda * (-2.0 * lambda * t).exp_m1()
    };
    r0.signum() / z.sqrt()
}

/// Classical RK4 integration of `r' = lambda r - alpha r^3` (independent
/// check of [`homogeneous_oracle`]).
pub fn integrate_homogeneous_ode(r0: f64, lambda: f64, alpha: f64, t: f64, steps: usize) -> f64 {
    let f = |r: f64| lambda * r - alpha * r * r * r;
    let h = t / steps as f64;
    let mut r = r0;
    for _ in 0..steps {
        let k1 = f(r);
        let k2 = f(r + 0.5 * h * k1);
        let k3 = f(r + 0.5 * h * k2);
        let k4 = f(r + h * k3);
        r += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    r
}

/// Homogeneous relaxation problem solved with the full field stepper on a
/// small grid.
#[derive(Debug, Clone)]
pub struct HomogeneousProblem {
    pub r0: f64,
    pub phi_const: f64,
    pub params: PhysParams,
    pub theta: f64,
    pub t_final: f64,
    pub grid_size: usize,
}

impl HomogeneousProblem {
    /// `phi = 1`, `d_0 = (0, 0.95)` with the benchmark parameters up to `t = 0.1`.
    pub fn benchmark(theta: f64) -> Self {
        HomogeneousProblem {
            r0: 0.95,
            phi_const: 1.0,
            params: PhysParams::drop_benchmark(),
            theta,
            t_final: 0.1,
            grid_size: 8,
        }
    }

    pub fn exact(&self, t: f64) -> f64 {
        homogeneous_oracle(self.r0, self.phi_const, &self.params, t)
    }

    /// Simulated `(t, |d|)` trajectory including `t = 0`. The initial
    /// `(mu, h)` are the consistent derived values.
    pub fn simulate(&self, dt: f64) -> Result<Vec<(f64, f64)>> {
        let steps = (self.t_final / dt).round() as usize;
        if steps == 0 || ((steps as f64) * dt - self.t_final).abs() > 1e-9 * self.t_final {
            return Err(SimError::Config(format!(
                "dt = {dt} does not divide t = {}",
                self.t_final
            )));
        }
        let g = Grid2D::unit_square(self.grid_size)?;
        let np = NumParams {
            dt,
            theta: self.theta,
            newton_tol: 1e-14,
            linsolve_tol: 1e-15,
            ..NumParams::default()
        };
        let mut stepper = Stepper::new(g, &self.params, &np)?;
        let mut state = State::new(
            0.0,
            ScalarField::constant(g, self.phi_const),
            VectorField2::constant(g, 0.0, self.r0),
        )?
        .with_derived(&self.params)?;
        let mut out = vec![(0.0, self.r0)];
        for k in 1..=steps {
            state = stepper.step(&state, None)?.new_state;
            out.push((k as f64 * dt, state.d.ys()[0]));
        }
        Ok(out)
    }

    /// `|r_sim(t_final) - r_exact(t_final)|`.
    pub fn error(&self, dt: f64) -> Result<f64> {
        let traj = self.simulate(dt)?;
        let r = traj.last().expect("nonempty").1;
        Ok((r - self.exact(self.t_final)).abs())
    }

    /// Largest excess of `|d|_2^2` over the Lp envelope at `p = 2` along a
    /// simulated trajectory (negative when the trajectory stays below).
    pub fn envelope_excess(&self, dt: f64) -> Result<f64> {
        let area = Grid2D::unit_square(self.grid_size)?.measure();
        let p = &self.params;
        let traj = self.simulate(dt)?;
        Ok(traj
            .iter()
            .map(|&(t, r)| {
                r * r * area
                    - lp_decay_envelope(self.r0 * self.r0 * area, 2.0, p.alpha, p.phi_cr, area, t)
            })
            .fold(f64::NEG_INFINITY, f64::max))
    }
}

/// Least-squares slope of `log(error)` against `log(dt)`; passes when
/// within 0.2 of the theoretical order (2 for `theta = 1/2`, else 1).
pub fn convergence_order(problem: &HomogeneousProblem, dt_list: &[f64]) -> Result<OracleResult> {
    if dt_list.len() < 3 {
        return Err(SimError::Config(format!(
            "convergence_order needs at least 3 time steps, got {}",
            dt_list.len()
        )));
    }
    let mut pts = Vec::new();
    for &dt in dt_list {
        pts.push((dt.ln(), problem.error(dt)?.ln()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let expected = if (problem.theta - 0.5).abs() < 1e-12 {
        2.0
    } else {
        1.0
    };
    let errs: Vec<String> = dt_list
        .iter()
        .zip(&pts)
        .map(|(dt, p)| format!("dt={dt:e}: err={:.3e}", p.1.exp()))
        .collect();
    Ok(OracleResult::absolute(
        format!("order_theta_{}", problem.theta),
        slope,
        expected,
        0.2,
        errs.join("; "),
    ))
}

/// Named check groups of [`run_suite`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Gradient,
    Stress,
    Oracle,
    Order,
}

impl std::str::FromStr for Suite {
    type Err = SimError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gradient" => Ok(Suite::Gradient),
            "stress" => Ok(Suite::Stress),
            "oracle" => Ok(Suite::Oracle),
            "order" => Ok(Suite::Order),
            _ => Err(SimError::Config(format!(
                "unknown suite '{s}' (gradient, stress, oracle, order)"
            ))),
        }
    }
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Gradient, Suite::Stress, Suite::Oracle, Suite::Order];
}

/// Runs one group of checks with fixed seeds.
pub fn run_suite(suite: Suite) -> Result<Vec<OracleResult>> {
    let mut out = Vec::new();
    match suite {
        Suite::Gradient => {
            let g = Grid2D::unit_square(32)?;
            for base in [
                PhysParams {
                    gamma: 1e-3,
                    ..PhysParams::drop_benchmark()
                },
                PhysParams::fh_landscape_example(),
            ] {
                for seed in 0..20u64 {
                    let s = random_smooth_state(g, &base, seed)?;
                    let (a, b) = gradient_check(&s, &base, 1000 + seed)?;
                    let tag = match base.potential {
                        Potential::Quartic => "quartic",
                        Potential::FloryHuggins => "flory_huggins",
                    };
                    for mut r in [a, b] {
                        r.name = format!("{}_{tag}_seed{seed}", r.name);
                        out.push(r);
                    }
                }
            }
        }
        Suite::Stress => {
            out.push(stress_convergence(
                &PhysParams::drop_benchmark(),
                &[64, 128, 256],
            )?);
            out.push(stress_convergence(
                &PhysParams {
                    gamma: 0.05,
                    ..PhysParams::drop_benchmark()
                },
                &[64, 128, 256],
            )?);
        }
        Suite::Oracle => {
            let p = PhysParams::drop_benchmark();
            out.push(OracleResult::absolute(
                "homogeneous_closed_form",
                homogeneous_oracle(0.95, 1.0, &p, 0.1),
                0.77341,
                2e-4,
                "r(0.1) for r0 = 0.95, phi = 1",
            ));
            let lam = p.alpha * (0.2 - p.phi_cr);
            out.push(OracleResult::absolute(
                "homogeneous_decaying_branch",
                homogeneous_oracle(0.95, 0.2, &p, 0.3),
                integrate_homogeneous_ode(0.95, lam, p.alpha, 0.3, 100_000),
                1e-12,
                "phi = 0.2 < phi_cr against RK4",
            ));
            let prob = HomogeneousProblem::benchmark(0.5);
            let r = prob.simulate(1e-3)?.last().expect("nonempty").1;
            out.push(OracleResult::absolute(
                "homogeneous_simulated",
                r,
                prob.exact(0.1),
                2e-4,
                "dt = 1e-3, 100 steps",
            ));
            let excess = prob.envelope_excess(1e-3)?;
            out.push(OracleResult {
                name: "lp_envelope".into(),
                measured: excess,
                expected: 0.0,
                tolerance: 1e-8,
                pass: excess <= 1e-8,
                details: "max over the trajectory of |d|_2^2 minus the p = 2 envelope".into(),
            });
        }
        Suite::Order => {
            let dts = [4e-3, 2e-3, 1e-3, 5e-4];
            out.push(convergence_order(
                &HomogeneousProblem::benchmark(0.5),
                &dts,
            )?);
            out.push(convergence_order(
                &HomogeneousProblem::benchmark(1.0),
                &dts,
            )?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_fixed_point_and_limit() {
        let p = PhysParams::drop_benchmark();
        let rinf = 0.5f64.sqrt();
        assert!((homogeneous_oracle(rinf, 1.0, &p, 3.0) - rinf).abs() < 1e-15);
        assert!((homogeneous_oracle(0.95, 1.0, &p, 50.0) - rinf).abs() < 1e-14);
        assert!((homogeneous_oracle(0.95, 1.0, &p, 0.1) - 0.773_391_8).abs() < 1e-7);
    }

    #[test]
    fn decaying_branch_matches_ode() {
        let p = PhysParams::drop_benchmark();
        for phi in [0.5, 0.2, -0.7] {
            let lam = p.alpha * (phi - p.phi_cr);
            for t in [0.01, 0.2, 1.0] {
                let a = homogeneous_oracle(0.9, phi, &p, t);
                let b = integrate_homogeneous_ode(0.9, lam, p.alpha, t, 200_000);
                assert!((a - b).abs() < 1e-12, "phi {phi} t {t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn zero_direction_gives_zero_on_both_sides() {
        let g = Grid2D::unit_square(16).unwrap();
        let p = PhysParams::drop_benchmark();
        let s = random_smooth_state(g, &p, 3).unwrap();
        let (a, b) =
            gradient_check_along(&s, &p, &ScalarField::zeros(g), &VectorField2::zeros(g)).unwrap();
        assert!(a.pass && b.pass);
        assert_eq!(a.measured, 0.0);
    }

    #[test]
    fn constant_fields_have_no_stress_defect() {
        let g = Grid2D::unit_square(16).unwrap();
        let p = PhysParams::drop_benchmark();
        let def = stress_defect(
            &ScalarField::constant(g, 0.7),
            &VectorField2::constant(g, 0.3, 0.4),
            &p,
        )
        .unwrap();
        assert!(def.max_magnitude() < 1e-13);
    }

    #[test]
    fn order_needs_three_steps() {
        let prob = HomogeneousProblem::benchmark(0.5);
        assert!(convergence_order(&prob, &[1e-3]).is_err());
    }

    #[test]
    fn random_fields_are_reproducible() {
        let g = Grid2D::unit_square(16).unwrap();
        assert_eq!(
            random_trig_field(g, 5, 3, 0.0, 1.0),
            random_trig_field(g, 5, 3, 0.0, 1.0)
        );
        assert_ne!(
            random_trig_field(g, 5, 3, 0.0, 1.0),
            random_trig_field(g, 6, 3, 0.0, 1.0)
        );
    }
}
