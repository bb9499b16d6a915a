use super::krylov::gmres;
use super::precond::Preconditioner;
use super::{energy_rate, NumParams, StepOutcome, StopReason};
use crate::energy::{energy_sums, variational_derivatives, PhysParams, Scratch};
use crate::error::{Result, SimError};
use crate::flow::{force_into, FlowSolver, FlowState};
use crate::grid::{dot, integrate, Grid2D, ScalarField, Stencil, VectorField2};
use crate::io::DiagnosticsRow;
use crate::spectral::Spectral;
use crate::state::State;

/// How the phase field and polarization are transported during a step.
#[derive(Clone, Copy)]
enum Transport<'a> {
    None,
    /// Fixed velocity field.
    Prescribed(&'a VectorField2),
    /// Velocity from the coupled momentum equation, starting at `u_n`.
    Coupled(&'a VectorField2),
}

/// Quantities frozen during one step.
struct Frozen<'a> {
    phi: &'a [f64],
    dx: &'a [f64],
    dy: &'a [f64],
    mu: &'a [f64],
    hx: &'a [f64],
    hy: &'a [f64],
    transport: Transport<'a>,
    dt: f64,
    theta: f64,
}

/// Buffers filled by a residual evaluation; after the final evaluation they
/// hold the new-level `mu`, `h`, the averaged fields and the force.
struct Work {
    mu: Vec<f64>,
    hx: Vec<f64>,
    hy: Vec<f64>,
    phib: Vec<f64>,
    dxb: Vec<f64>,
    dyb: Vec<f64>,
    mub: Vec<f64>,
    hxb: Vec<f64>,
    hyb: Vec<f64>,
    lap: Vec<f64>,
    gx: Vec<f64>,
    gy: Vec<f64>,
    fx: Vec<f64>,
    fy: Vec<f64>,
    ustar: Option<VectorField2>,
    scratch: Scratch,
}

impl Work {
    fn new(n: usize) -> Self {
        let z = || vec![0.0; n];
        Work {
            mu: z(),
            hx: z(),
            hy: z(),
            phib: z(),
            dxb: z(),
            dyb: z(),
            mub: z(),
            hxb: z(),
            hyb: z(),
            lap: z(),
            gx: z(),
            gy: z(),
            fx: z(),
            fy: z(),
            ustar: None,
            scratch: Scratch::new(n),
        }
    }
}

/// Residual of the step equations multiplied by `dt`, for `x = [phi; d_x; d_y]`.
fn eval_residual(
    p: &PhysParams,
    g: &Grid2D,
    st: &Stencil,
    flow: Option<&FlowSolver>,
    fr: &Frozen,
    x: &[f64],
    out: &mut [f64],
    w: &mut Work,
) -> Result<()> {
    let n = g.len();
    let (phi, d) = x.split_at(n);
    let (dx, dy) = d.split_at(n);
    variational_derivatives(
        p,
        st,
        phi,
        dx,
        dy,
        &mut w.mu,
        &mut w.hx,
        &mut w.hy,
        &mut w.scratch,
    )?;
    let (dt, th) = (fr.dt, fr.theta);
    if p.delta != 0.0 {
        for k in 0..n {
            w.mu[k] += p.delta * (phi[k] - fr.phi[k]) / dt;
        }
    }
    for k in 0..n {
        w.mub[k] = (1.0 - th) * fr.mu[k] + th * w.mu[k];
        w.hxb[k] = (1.0 - th) * fr.hx[k] + th * w.hx[k];
        w.hyb[k] = (1.0 - th) * fr.hy[k] + th * w.hy[k];
    }
    st.lap(&w.mub, &mut w.lap);
    let (r_phi, r_d) = out.split_at_mut(n);
    let (r_dx, r_dy) = r_d.split_at_mut(n);
    for k in 0..n {
        r_phi[k] = phi[k] - fr.phi[k] - dt * w.lap[k];
        r_dx[k] = dx[k] - fr.dx[k] + dt * w.hxb[k];
        r_dy[k] = dy[k] - fr.dy[k] + dt * w.hyb[k];
    }

    let u = match fr.transport {
        Transport::None => {
            w.ustar = None;
            return Ok(());
        }
        Transport::Prescribed(u) => u.clone(),
        Transport::Coupled(u_n) => {
            for k in 0..n {
                w.phib[k] = (1.0 - th) * fr.phi[k] + th * phi[k];
                w.dxb[k] = (1.0 - th) * fr.dx[k] + th * dx[k];
                w.dyb[k] = (1.0 - th) * fr.dy[k] + th * dy[k];
            }
            force_into(
                g, &w.phib, &w.mub, &w.dxb, &w.dyb, &w.hxb, &w.hyb, &mut w.fx, &mut w.fy,
            );
            let force = VectorField2::from_vecs(*g, w.fx.clone(), w.fy.clone());
            flow.expect("flow solver for coupled transport")
                .transport_velocity(u_n, &force, dt)
        }
    };
    for k in 0..n {
        w.phib[k] = (1.0 - th) * fr.phi[k] + th * phi[k];
        w.dxb[k] = (1.0 - th) * fr.dx[k] + th * dx[k];
        w.dyb[k] = (1.0 - th) * fr.dy[k] + th * dy[k];
    }
    let (ux, uy) = (u.xs(), u.ys());
    for (bar, r) in [
        (&w.phib, &mut *r_phi),
        (&w.dxb, &mut *r_dx),
        (&w.dyb, &mut *r_dy),
    ] {
        st.grad_c(bar, &mut w.gx, &mut w.gy);
        for k in 0..n {
            r[k] += dt * (ux[k] * w.gx[k] + uy[k] * w.gy[k]);
        }
    }
    w.ustar = Some(u);
    Ok(())
}

fn rms(v: &[f64]) -> f64 {
    (dot(v, v) / v.len() as f64).sqrt()
}

struct Attempt {
    x: Vec<f64>,
    mu: Vec<f64>,
    hx: Vec<f64>,
    hy: Vec<f64>,
    flow: Option<FlowState>,
    iters: usize,
    residual: f64,
    dissipation: f64,
}

/// Reusable time stepper: owns FFT plans, the preconditioner, scratch space
/// and the history used for the predictor.
pub struct Stepper {
    p: PhysParams,
    np: NumParams,
    grid: Grid2D,
    st: Stencil,
    pre: Preconditioner,
    flow: Option<FlowSolver>,
    work: Work,
    /// Last accepted step: `(t_n, x_n, dt, x_{n-1})`.
    history: Option<(f64, Vec<f64>, f64, Vec<f64>)>,
}

impl std::fmt::Debug for Stepper {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Stepper")
            .field("grid", &self.grid)
            .field("np", &self.np)
            .finish()
    }
}

impl Stepper {
    pub fn new(grid: Grid2D, p: &PhysParams, np: &NumParams) -> Result<Self> {
        p.validate()?;
        np.validate()?;
        let sp = Spectral::new(grid);
        Ok(Stepper {
            p: p.clone(),
            np: np.clone(),
            grid,
            st: grid.stencil(),
            pre: Preconditioner::new(sp),
            flow: None,
            work: Work::new(grid.len()),
            history: None,
        })
    }

    pub fn params(&self) -> (&PhysParams, &NumParams) {
        (&self.p, &self.np)
    }

    /// Advances `state` by `np.dt`, retrying with 2, 4, ... substeps when the
    /// Newton iteration fails. A fixed velocity `u` transports the fields
    /// without being updated; otherwise a flow sub-state, if present, is
    /// advanced with the coupled momentum equation.
    pub fn step(&mut self, state: &State, u: Option<&VectorField2>) -> Result<StepOutcome> {
        if state.grid() != &self.grid || u.is_some_and(|u| u.grid() != &self.grid) {
            return Err(SimError::GridMismatch);
        }
        let energy_before = self.total_energy(state)?;
        let mut halvings = 0;
        loop {
            let sub = 1usize << halvings;
            let dt = self.np.dt / sub as f64;
            match self.substeps(state, u, dt, sub) {
                Ok((new_state, iters, residual, dissipation)) => {
                    let energy_after = self.total_energy(&new_state)?;
                    return Ok(StepOutcome {
                        new_state,
                        newton_iters: iters,
                        residual_norm: residual,
                        energy_before,
                        energy_after,
                        dissipation_estimate: dissipation,
                        halvings,
                    });
                }
                Err(SimError::NonConvergence { iters, residual }) => {
                    if halvings >= self.np.max_halvings {
                        return Err(SimError::NonConvergence { iters, residual });
                    }
                    halvings += 1;
                    self.history = None;
                }
                Err(e) => return Err(e),
            }
        }
    }

    fn substeps(
        &mut self,
        state: &State,
        u: Option<&VectorField2>,
        dt: f64,
        count: usize,
    ) -> Result<(State, usize, f64, f64)> {
        let mut cur = state.clone();
        let (mut iters, mut residual, mut diss) = (0, 0.0f64, 0.0);
        for _ in 0..count {
            let a = self.attempt(&cur, u, dt)?;
            iters += a.iters;
            residual = residual.max(a.residual);
            diss += a.dissipation;
            cur = self.assemble(&cur, a, dt)?;
        }
        Ok((cur, iters, residual, diss))
    }

    fn assemble(&mut self, prev: &State, a: Attempt, dt: f64) -> Result<State> {
        let g = self.grid;
        let n = g.len();
        let x_prev = pack(prev);
        self.history = Some((prev.t + dt, a.x.clone(), dt, x_prev));
        let phi = ScalarField::from_vec(g, a.x[..n].to_vec())?;
        let d = VectorField2::from_vecs(g, a.x[n..2 * n].to_vec(), a.x[2 * n..].to_vec());
        let s = State {
            t: prev.t + dt,
            phi,
            d,
            mu: ScalarField::from_vec(g, a.mu)?,
            h: VectorField2::from_vecs(g, a.hx, a.hy),
            flow: a.flow.or_else(|| prev.flow.clone()),
        };
        s.check_finite()?;
        Ok(s)
    }

    fn predictor(&self, state: &State, x_n: &[f64], dt: f64) -> Vec<f64> {
        if let Some((t, x_last, dt_last, x_before)) = &self.history {
            if *t == state.t && x_last.as_slice() == x_n {
                let r = dt / dt_last;
                return x_n
                    .iter()
                    .zip(x_before)
                    .map(|(a, b)| a + r * (a - b))
                    .collect();
            }
        }
        x_n.to_vec()
    }

    fn attempt(&mut self, state: &State, u: Option<&VectorField2>, dt: f64) -> Result<Attempt> {
        let g = self.grid;
        let n = g.len();
        let coupled = u.is_none() && state.flow.is_some();
        if coupled && self.flow.is_none() {
            self.flow = Some(FlowSolver::new(g));
        }
        let transport = match (u, &state.flow) {
            (Some(u), _) => Transport::Prescribed(u),
            (None, Some(f)) => Transport::Coupled(&f.u),
            (None, None) => Transport::None,
        };
        let fr = Frozen {
            phi: state.phi.values(),
            dx: state.d.xs(),
            dy: state.d.ys(),
            mu: state.mu.values(),
            hx: state.h.xs(),
            hy: state.h.ys(),
            transport,
            dt,
            theta: self.np.theta,
        };
        let x_n = pack(state);
        let mut x = self.predictor(state, &x_n, dt);
        // The predictor keeps the mass of phi_n up to round-off; restore it exactly.
        let shift = x[..n].iter().sum::<f64>() / n as f64 - x_n[..n].iter().sum::<f64>() / n as f64;
        x[..n].iter_mut().for_each(|v| *v -= shift);

        let (p, st, flow) = (&self.p, &self.st, self.flow.as_ref());
        let np = &self.np;
        let work = &mut self.work;
        let pre = &mut self.pre;
        let mut r = vec![0.0; 3 * n];
        let mut r_pert = vec![0.0; 3 * n];
        let mut xp = vec![0.0; 3 * n];
        let mut delta = vec![0.0; 3 * n];
        let mut pert_work = Work::new(n);
        let sqrt_eps = f64::EPSILON.sqrt();
        let mut iters = 0;
        loop {
            eval_residual(p, &g, st, flow, &fr, &x, &mut r, work)?;
            let rn = rms(&r);
            if !rn.is_finite() {
                return Err(SimError::NonConvergence {
                    iters,
                    residual: rn,
                });
            }
            if rn <= np.newton_tol {
                break;
            }
            if iters >= np.newton_max_iters {
                return Err(SimError::NonConvergence {
                    iters,
                    residual: rn,
                });
            }
            pre.update(p, st, dt, fr.theta, &x[..n], &x[n..2 * n], &x[2 * n..]);
            let target = (0.1 * rn).min((0.25 * np.newton_tol).max(1e-6 * rn).max(np.linsolve_tol));
            let tol = target * ((3 * n) as f64).sqrt();
            let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
            let xnorm = dot(&x, &x).sqrt();
            let jvp = |v: &[f64], out: &mut [f64]| -> Result<()> {
                let vn = dot(v, v).sqrt();
                if vn == 0.0 {
                    out.iter_mut().for_each(|o| *o = 0.0);
                    return Ok(());
                }
                let sigma = sqrt_eps * (1.0 + xnorm) / vn;
                for k in 0..x.len() {
                    xp[k] = x[k] + sigma * v[k];
                }
                eval_residual(p, &g, st, flow, &fr, &xp, &mut r_pert, &mut pert_work)?;
                for k in 0..out.len() {
                    out[k] = (r_pert[k] - r[k]) / sigma;
                }
                Ok(())
            };
            gmres(
                jvp,
                |v, z| pre.apply(v, z),
                &rhs,
                &mut delta,
                tol,
                np.gmres_restart,
                np.gmres_max_iters,
            )?;
            let mean = delta[..n].iter().sum::<f64>() / n as f64;
            for k in 0..3 * n {
                x[k] += delta[k] - if k < n { mean } else { 0.0 };
            }
            iters += 1;
        }
        let residual = rms(&r);

        // Dissipation predicted by the continuous law over the step.
        let area = g.cell_area();
        let mut diss =
            -dot(&work.mub, &work.lap) + dot(&work.hxb, &work.hxb) + dot(&work.hyb, &work.hyb);
        diss *= dt * area;

        let flow_state = match (&fr.transport, &state.flow) {
            (Transport::Coupled(_), Some(f)) => {
                let force = VectorField2::from_vecs(g, work.fx.clone(), work.fy.clone());
                let phib = ScalarField::from_vec(g, work.phib.clone())?;
                Some(self.flow.as_ref().expect("flow solver").momentum_step(
                    f,
                    &phib,
                    &force,
                    &self.p,
                    &NumParams {
                        dt,
                        ..self.np.clone()
                    },
                )?)
            }
            _ => None,
        };
        Ok(Attempt {
            mu: self.work.mu.clone(),
            hx: self.work.hx.clone(),
            hy: self.work.hy.clone(),
            x,
            flow: flow_state,
            iters,
            residual,
            dissipation: diss,
        })
    }

    fn total_energy(&mut self, s: &State) -> Result<f64> {
        let e = energy_sums(
            &self.p,
            &self.st,
            s.phi.values(),
            s.d.xs(),
            s.d.ys(),
            &mut self.work.scratch,
        )?;
        let kin = s.flow.as_ref().map_or(0.0, |f| 0.5 * f.u.l2_norm().powi(2));
        Ok(e.e_total + kin)
    }
}

fn pack(s: &State) -> Vec<f64> {
    let mut x = Vec::with_capacity(3 * s.phi.values().len());
    x.extend_from_slice(s.phi.values());
    x.extend_from_slice(s.d.xs());
    x.extend_from_slice(s.d.ys());
    x
}

/// One theta-step of `state_n` (see [`Stepper::step`]).
pub fn step_theta(
    state_n: &State,
    u: Option<&VectorField2>,
    p: &PhysParams,
    np: &NumParams,
) -> Result<StepOutcome> {
    Stepper::new(*state_n.grid(), p, np)?.step(state_n, u)
}

/// The four blocks of the step equations for a candidate new level
/// `(phi, mu, d, h)`, unscaled.
#[derive(Debug, Clone)]
pub struct ResidualBlocks {
    /// `(phi - phi_n)/dt + u.grad(phi~) - Lap mu~`.
    pub phi: ScalarField,
    /// `mu - delta E/delta phi - delta (phi - phi_n)/dt`.
    pub mu: ScalarField,
    /// `(d - d_n)/dt + (u.grad) d~ + h~`.
    pub d: VectorField2,
    /// `h - delta E/delta d`.
    pub h: VectorField2,
}

impl ResidualBlocks {
    /// RMS over all entries of the four blocks.
    pub fn norm(&self) -> f64 {
        let n = self.phi.values().len() as f64;
        let s = dot(self.phi.values(), self.phi.values())
            + dot(self.mu.values(), self.mu.values())
            + dot(self.d.xs(), self.d.xs())
            + dot(self.d.ys(), self.d.ys())
            + dot(self.h.xs(), self.h.xs())
            + dot(self.h.ys(), self.h.ys());
        (s / (6.0 * n)).sqrt()
    }
}

/// Residual of the discrete step equations with a prescribed velocity `u`.
pub fn residual(
    state_n: &State,
    candidate: &State,
    u: &VectorField2,
    p: &PhysParams,
    np: &NumParams,
) -> Result<ResidualBlocks> {
    let g = *state_n.grid();
    if candidate.grid() != &g || u.grid() != &g {
        return Err(SimError::GridMismatch);
    }
    let (dt, th) = (np.dt, np.theta);
    let n = g.len();
    let st = g.stencil();
    let (mut mu, mut hx, mut hy) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut scratch = Scratch::new(n);
    let c = candidate;
    variational_derivatives(
        p,
        &st,
        c.phi.values(),
        c.d.xs(),
        c.d.ys(),
        &mut mu,
        &mut hx,
        &mut hy,
        &mut scratch,
    )?;
    let avg = |a: &[f64], b: &[f64]| -> Vec<f64> {
        a.iter()
            .zip(b)
            .map(|(o, v)| (1.0 - th) * o + th * v)
            .collect()
    };
    let mub = avg(state_n.mu.values(), c.mu.values());
    let phib = avg(state_n.phi.values(), c.phi.values());
    let dxb = avg(state_n.d.xs(), c.d.xs());
    let dyb = avg(state_n.d.ys(), c.d.ys());
    let hxb = avg(state_n.h.xs(), c.h.xs());
    let hyb = avg(state_n.h.ys(), c.h.ys());
    let mut lap = vec![0.0; n];
    st.lap(&mub, &mut lap);
    let (mut gx, mut gy) = (vec![0.0; n], vec![0.0; n]);
    let advect = |f: &[f64], gx: &mut Vec<f64>, gy: &mut Vec<f64>| -> Vec<f64> {
        st.grad_c(f, gx, gy);
        (0..n)
            .map(|k| u.xs()[k] * gx[k] + u.ys()[k] * gy[k])
            .collect()
    };
    let a_phi = advect(&phib, &mut gx, &mut gy);
    let a_dx = advect(&dxb, &mut gx, &mut gy);
    let a_dy = advect(&dyb, &mut gx, &mut gy);
    let (pn, pc) = (state_n.phi.values(), c.phi.values());
    let r_phi: Vec<f64> = (0..n)
        .map(|k| (pc[k] - pn[k]) / dt + a_phi[k] - lap[k])
        .collect();
    let r_mu: Vec<f64> = (0..n)
        .map(|k| c.mu.values()[k] - mu[k] - p.delta * (pc[k] - pn[k]) / dt)
        .collect();
    let r_dx: Vec<f64> = (0..n)
        .map(|k| (c.d.xs()[k] - state_n.d.xs()[k]) / dt + a_dx[k] + hxb[k])
        .collect();
    let r_dy: Vec<f64> = (0..n)
        .map(|k| (c.d.ys()[k] - state_n.d.ys()[k]) / dt + a_dy[k] + hyb[k])
        .collect();
    let r_hx: Vec<f64> = (0..n).map(|k| c.h.xs()[k] - hx[k]).collect();
    let r_hy: Vec<f64> = (0..n).map(|k| c.h.ys()[k] - hy[k]).collect();
    Ok(ResidualBlocks {
        phi: ScalarField::from_vec(g, r_phi)?,
        mu: ScalarField::from_vec(g, r_mu)?,
        d: VectorField2::from_vecs(g, r_dx, r_dy),
        h: VectorField2::from_vecs(g, r_hx, r_hy),
    })
}

/// Receives the diagnostics of every accepted step.
pub trait RunObserver {
    /// Called once with the initial state (row with `step = 0`).
    fn on_start(&mut self, _state: &State, _row: &DiagnosticsRow) -> Result<()> {
        Ok(())
    }
    fn on_step(&mut self, state: &State, row: &DiagnosticsRow) -> Result<()>;
}

impl RunObserver for () {
    fn on_step(&mut self, _: &State, _: &DiagnosticsRow) -> Result<()> {
        Ok(())
    }
}

/// Collects every row, including the initial one.
impl RunObserver for Vec<DiagnosticsRow> {
    fn on_start(&mut self, _: &State, row: &DiagnosticsRow) -> Result<()> {
        self.push(row.clone());
        Ok(())
    }
    fn on_step(&mut self, _: &State, row: &DiagnosticsRow) -> Result<()> {
        self.push(row.clone());
        Ok(())
    }
}

/// Outcome of [`run_to_equilibrium`] with the run-wide monitors.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub final_state: State,
    pub steps: usize,
    pub stop_reason: StopReason,
    pub initial_energy: f64,
    pub final_energy: f64,
    /// Largest `(E_{n+1} - E_n) / |E_n|` over the run (negative when the
    /// energy decreased on every step).
    pub max_relative_energy_increase: f64,
    /// Largest `|mass_n - mass_0| / |mass_0|` (absolute when `mass_0 = 0`).
    pub max_mass_drift: f64,
    /// Largest `max|d|` seen, including the initial state.
    pub max_abs_d: f64,
    pub total_newton_iters: usize,
}

/// Diagnostics row for `state` without step information.
pub(crate) fn diagnostics_row(
    state: &State,
    p: &PhysParams,
    step: usize,
) -> Result<DiagnosticsRow> {
    let e = crate::energy::free_energy(state, p)?;
    Ok(DiagnosticsRow {
        step,
        t: state.t,
        e_mix: e.e_mix,
        e_pol: e.e_pol,
        e_anch: e.e_anch,
        e_gamma: e.e_gamma,
        e_kin: e.e_kin,
        e_total: e.e_total,
        energy_rate: 0.0,
        mass: integrate(&state.phi),
        max_abs_d: state.d.max_magnitude(),
        newton_iters: 0,
        residual_norm: 0.0,
        dissipation_estimate: 0.0,
    })
}

/// Steps until the relative energy change per step drops below
/// `np.energy_rate_tol` or `np.max_steps` steps have been taken.
pub fn run_to_equilibrium(
    initial: State,
    p: &PhysParams,
    np: &NumParams,
    observer: &mut dyn RunObserver,
) -> Result<RunSummary> {
    let mut stepper = Stepper::new(*initial.grid(), p, np)?;
    let row0 = diagnostics_row(&initial, p, 0)?;
    observer.on_start(&initial, &row0)?;
    let mass0 = row0.mass;
    let mut summary = RunSummary {
        final_state: initial,
        steps: 0,
        stop_reason: StopReason::MaxSteps,
        initial_energy: row0.e_total,
        final_energy: row0.e_total,
        max_relative_energy_increase: f64::NEG_INFINITY,
        max_mass_drift: 0.0,
        max_abs_d: row0.max_abs_d,
        total_newton_iters: 0,
    };
    for step in 1..=np.max_steps {
        let out = stepper.step(&summary.final_state, None)?;
        let mut row = diagnostics_row(&out.new_state, p, step)?;
        row.energy_rate = energy_rate(out.energy_before, out.energy_after);
        row.newton_iters = out.newton_iters;
        row.residual_norm = out.residual_norm;
        row.dissipation_estimate = out.dissipation_estimate;
        observer.on_step(&out.new_state, &row)?;

        let inc =
            (out.energy_after - out.energy_before) / out.energy_before.abs().max(f64::MIN_POSITIVE);
        summary.max_relative_energy_increase = summary.max_relative_energy_increase.max(inc);
        let drift = if mass0 == 0.0 {
            (row.mass - mass0).abs()
        } else {
            ((row.mass - mass0) / mass0).abs()
        };
        summary.max_mass_drift = summary.max_mass_drift.max(drift);
        summary.max_abs_d = summary.max_abs_d.max(row.max_abs_d);
        summary.total_newton_iters += out.newton_iters;
        summary.final_energy = out.energy_after;
        summary.final_state = out.new_state;
        summary.steps = step;
        if row.energy_rate.abs() < np.energy_rate_tol {
            summary.stop_reason = StopReason::EnergyRate;
            break;
        }
    }
    Ok(summary)
}
