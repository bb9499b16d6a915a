//! Theta-method time stepping of the phase-field / polarization system and
//! the equilibrium driver.
//!
//! Each step solves
//!
//! ```text
//! (phi - phi_n)/dt + u*.grad(phi~) = Lap mu~
//! (d - d_n)/dt + (u*.grad) d~     = -h~
//! ```
//!
//! where `~` denotes the theta-average of the old and new values and `mu`,
//! `h` at the new level are the exact variational derivatives of the
//! discrete energy. The auxiliary unknowns are eliminated, so Newton acts on
//! `(phi, d)` only. The Jacobian is applied by directional differences and
//! inverted with GMRES preconditioned by a Fourier-diagonal operator.

mod krylov;
mod precond;
mod stepper;

pub use stepper::{
    residual, run_to_equilibrium, step_theta, ResidualBlocks, RunObserver, RunSummary, Stepper,
};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::state::State;

/// Numerical parameters of the time stepper.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumParams {
    pub dt: f64,
    /// 0.5 is Crank-Nicolson, 1 backward Euler.
    pub theta: f64,
    /// Bound on the RMS of the dt-scaled step residual.
    pub newton_tol: f64,
    pub newton_max_iters: usize,
    /// Absolute RMS floor for the inner linear solves.
    pub linsolve_tol: f64,
    /// Stop once `|E_{n+1} - E_n| / |E_n|` falls below this.
    pub energy_rate_tol: f64,
    pub max_steps: usize,
    /// Write a snapshot every this many steps (0 disables).
    pub snapshot_every: usize,
    /// How often a failed step may be retried with half the time step.
    pub max_halvings: u32,
    /// Largest admissible `|u|_inf dt / h`.
    pub cfl_limit: f64,
    pub gmres_restart: usize,
    pub gmres_max_iters: usize,
}

impl Default for NumParams {
    fn default() -> Self {
        NumParams {
            dt: 1e-4,
            theta: 0.5,
            newton_tol: 1e-10,
            newton_max_iters: 50,
            linsolve_tol: 1e-12,
            energy_rate_tol: 1e-6,
            max_steps: 200_000,
            snapshot_every: 0,
            max_halvings: 5,
            cfl_limit: 0.5,
            gmres_restart: 40,
            gmres_max_iters: 400,
        }
    }
}

impl NumParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SimError::InvalidParameter(m));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be > 0, got {}", self.dt));
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return bad(format!("theta must lie in [0, 1], got {}", self.theta));
        }
        for (name, v) in [
            ("newton_tol", self.newton_tol),
            ("linsolve_tol", self.linsolve_tol),
            ("energy_rate_tol", self.energy_rate_tol),
            ("cfl_limit", self.cfl_limit),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be > 0, got {v}"));
            }
        }
        if self.newton_max_iters == 0 || self.gmres_restart == 0 || self.gmres_max_iters == 0 {
            return bad("iteration limits must be positive".into());
        }
        Ok(())
    }
}

/// Result of one accepted time step.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub new_state: State,
    pub newton_iters: usize,
    pub residual_norm: f64,
    /// Total energy (free plus kinetic) before and after the step.
    pub energy_before: f64,
    pub energy_after: f64,
    /// `dt (|grad mu~|^2 + |h~|^2)`, the decrease predicted by the
    /// continuous dissipation law over the step.
    pub dissipation_estimate: f64,
    /// Number of time-step halvings needed (0 when the first attempt
    /// converged).
    pub halvings: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    EnergyRate,
    MaxSteps,
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StopReason::EnergyRate => "energy_rate",
            StopReason::MaxSteps => "max_steps",
        })
    }
}

/// `(e_curr - e_prev) / |e_prev|` (negative when the energy decreases), or
/// the plain difference when `e_prev = 0`.
pub fn energy_rate(e_prev: f64, e_curr: f64) -> f64 {
    if e_prev == 0.0 {
        e_curr - e_prev
    } else {
        (e_curr - e_prev) / e_prev.abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energy_rate_examples() {
        assert_eq!(energy_rate(2.0, 2.0), 0.0);
        assert_eq!(energy_rate(2.0, 1.0), -0.5);
        assert!((energy_rate(-0.625, -0.624) - 0.0016).abs() < 1e-15);
        assert!(energy_rate(-0.625, -0.626) < 0.0);
        assert_eq!(energy_rate(0.0, 1e-3), 1e-3);
    }

    #[test]
    fn num_params_validation() {
        NumParams::default().validate().unwrap();
        assert!(NumParams {
            dt: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(NumParams {
            theta: 1.5,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(NumParams {
            newton_tol: -1.0,
            ..Default::default()
        }
        .validate()
        .is_err());
    }
}
