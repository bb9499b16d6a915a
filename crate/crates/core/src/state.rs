use crate::energy::{derivatives, PhysParams};
use crate::error::{Result, SimError};
use crate::flow::FlowState;
use crate::grid::{Grid2D, ScalarField, VectorField2};

/// Simulation state `(t, phi, d)` with the auxiliary fields `(mu, h)` carried
/// between time steps and an optional velocity sub-state.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub phi: ScalarField,
    pub d: VectorField2,
    /// Chemical potential at time `t` as used by the next theta-step.
    pub mu: ScalarField,
    /// Molecular field at time `t` as used by the next theta-step.
    pub h: VectorField2,
    pub flow: Option<FlowState>,
}

impl State {
    /// State with `mu = 0`, `h = 0`.
    pub fn new(t: f64, phi: ScalarField, d: VectorField2) -> Result<Self> {
        if phi.grid() != d.grid() {
            return Err(SimError::GridMismatch);
        }
        let g = *phi.grid();
        let s = State {
            t,
            phi,
            d,
            mu: ScalarField::zeros(g),
            h: VectorField2::zeros(g),
            flow: None,
        };
        s.check_finite()?;
        Ok(s)
    }

    /// Replaces `(mu, h)` by the variational derivatives of the current fields.
    pub fn with_derived(mut self, p: &PhysParams) -> Result<Self> {
        let (mu, h) = derivatives(&self.phi, &self.d, p)?;
        self.mu = mu;
        self.h = h;
        Ok(self)
    }

    pub fn with_flow(mut self, flow: FlowState) -> Result<Self> {
        if flow.u.grid() != self.phi.grid() {
            return Err(SimError::GridMismatch);
        }
        self.flow = Some(flow);
        Ok(self)
    }

    pub fn grid(&self) -> &Grid2D {
        self.phi.grid()
    }

    pub fn check_finite(&self) -> Result<()> {
        let ok = self.phi.is_finite()
            && self.d.is_finite()
            && self.mu.is_finite()
            && self.h.is_finite()
            && self.flow.as_ref().is_none_or(|f| f.u.is_finite());
        if ok {
            Ok(())
        } else {
            Err(SimError::InvalidParameter(
                "state contains non-finite values".into(),
            ))
        }
    }
}
