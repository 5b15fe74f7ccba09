//! Time-Taylor expansion of particle trajectories.
//!
//! Coefficients are normalized (`c_n = ∂ₜⁿX / n!`) and always expanded at
//! the state's current time.

mod fast;
mod holder;
mod oracle;
mod radius;
mod step;

pub use fast::time_jets_fast;
pub use holder::{holder_stats, paper_radius_bound, Constraint, HolderStats, RadiusBound};
pub use oracle::{time_jets_oracle, ORACLE_MAX_ORDER, ORACLE_MAX_PARTICLES};
pub use radius::{
    estimate_radius, fit_cauchy, fit_cauchy_form, write_coefficients_csv, CauchyFit, EnvelopeForm, RadiusEstimate,
    RadiusMethod,
};
pub use step::{ode1d_testbed, taylor_advance, taylor_step, StepReport};

use crate::dynamics::{DynamicsError, Mat3, Vec3};
use crate::jets::{horner, Jet, VectorJet};
use crate::kernelalg::{KernelError, Model};

pub const FAST_MAX_ORDER: usize = 25;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum TaylorError {
    #[error("model {0} is not supported by the Taylor machinery")]
    UnsupportedModel(Model),
    #[error("order {order} exceeds the limit {max}")]
    OrderTooLarge { order: usize, max: usize },
    #[error("order {order} is below the minimum {min}")]
    OrderTooSmall { order: usize, min: usize },
    #[error("{count} particles exceed the oracle limit {max}")]
    TooManyParticles { count: usize, max: usize },
    #[error("coincident particles without regularization")]
    SingularDisplacement,
    #[error("no finite radius estimate and no step cap")]
    NoFiniteRadius,
    #[error("all jet coefficients beyond order zero vanish")]
    ZeroJets,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-finite value in {0}")]
    NumericalFailure(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Position (and optionally gradient) jets of every particle.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryJets {
    pub t0: f64,
    pub order: usize,
    pub dim: usize,
    /// `x[i][n]` is coefficient `n` of particle `i`'s position.
    pub x: Vec<Vec<Vec3>>,
    /// `g[i][n]` is coefficient `n` of `∇_a X` at particle `i`.
    pub g: Option<Vec<Vec<Mat3>>>,
}

impl TrajectoryJets {
    /// A one-particle, one-component trajectory holding a scalar jet.
    pub fn from_scalar(jet: &Jet) -> Self {
        Self {
            t0: 0.0,
            order: jet.order(),
            dim: 1,
            x: vec![jet.coeffs().iter().map(|&c| [c, 0.0, 0.0]).collect()],
            g: None,
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn position_jet(&self, i: usize) -> VectorJet {
        let comps = (0..self.dim).map(|a| Jet::new(self.x[i].iter().map(|c| c[a]).collect())).collect();
        VectorJet::new(comps).expect("jets share one order")
    }

    /// Euclidean norm of coefficient `n` of particle `i`.
    pub fn coeff_norm(&self, i: usize, n: usize) -> f64 {
        self.x[i][n][..self.dim].iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Positions at `t0 + h`.
    pub fn eval_positions(&self, h: f64) -> Vec<Vec3> {
        self.x.iter().map(|c| eval_vec(c, h)).collect()
    }

    /// Gradients at `t0 + h`, if carried.
    pub fn eval_gradients(&self, h: f64) -> Option<Vec<Mat3>> {
        self.g.as_ref().map(|g| {
            g.iter()
                .map(|c| {
                    let mut m = [[0.0; 3]; 3];
                    for r in 0..3 {
                        for k in 0..3 {
                            let coeffs: Vec<f64> = c.iter().map(|mm| mm[r][k]).collect();
                            m[r][k] = horner(&coeffs, h);
                        }
                    }
                    m
                })
                .collect()
        })
    }
}

fn eval_vec(c: &[Vec3], h: f64) -> Vec3 {
    let mut v = [0.0; 3];
    for (a, slot) in v.iter_mut().enumerate() {
        *slot = c.iter().rev().fold(0.0, |acc, x| acc * h + x[a]);
    }
    v
}

fn check_model(model: Model) -> Result<(), TaylorError> {
    match model {
        Model::Euler2D | Model::Sqg | Model::Ipm => Ok(()),
        m => Err(TaylorError::UnsupportedModel(m)),
    }
}
