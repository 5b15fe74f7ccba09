//! Lagrangian particle systems for the five models.
//!
//! Vectors and matrices are stored in three components even in two
//! dimensions; 2D states keep the third coordinate at zero, the third
//! gradient row and column equal to the identity, and the scalar vorticity
//! in the third component of `omega0`.

mod csv;
mod diagnostics;
mod init;
mod rhs;
mod sum;

pub use csv::{write_diagnostics_csv, write_diagnostics_header, write_state_csv, write_state_header};
pub use diagnostics::{
    chord_arc, det, grad_u_sup, incompressibility_residual, invariants_euler2d, lambda_accumulate, operator_norm,
    ChordArc, DiagnosticsRecord, PointVortexInvariants,
};
pub use init::{init_grid, AnalyticField, GridSpec, ScalarField};
pub use rhs::{
    evaluate_rhs, grad_rhs, induced_velocity, poisson_bracket, rk4_step, velocity, velocity_gradient, Derivatives,
};
pub use sum::pairwise_sum;

use crate::kernelalg::Model;

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

pub const IDENTITY: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("non-finite value in {0}: coincident particles or blow-up")]
    NumericalFailure(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Uniform label grid the particles were built from.
#[derive(Clone, Debug, PartialEq)]
pub struct GridInfo {
    pub n_per_axis: usize,
    pub lo: f64,
    pub hi: f64,
}

impl GridInfo {
    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / self.n_per_axis as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParticleState {
    pub dim: usize,
    pub labels: Vec<Vec3>,
    pub positions: Vec<Vec3>,
    pub gradients: Vec<Mat3>,
    pub theta0: Vec<f64>,
    pub grad_theta0: Vec<Vec3>,
    pub omega0: Vec<Vec3>,
    pub weights: Vec<f64>,
    /// Boussinesq accumulator `W = ∫₀ᵗ {θ₀, X₂} dτ`.
    pub w_acc: Vec<f64>,
    pub t: f64,
    pub grid: Option<GridInfo>,
}

impl ParticleState {
    /// Particles at their labels with identity gradients and zero data.
    pub fn at_labels(dim: usize, labels: Vec<Vec3>, weights: Vec<f64>) -> Result<Self, DynamicsError> {
        if !(dim == 2 || dim == 3) {
            return Err(DynamicsError::InvalidArgument(format!("dimension {dim}")));
        }
        if labels.len() != weights.len() {
            return Err(DynamicsError::InvalidState("labels and weights differ in length".into()));
        }
        if weights.iter().any(|w| !(*w > 0.0)) {
            return Err(DynamicsError::InvalidState("weights must be positive".into()));
        }
        let n = labels.len();
        Ok(Self {
            dim,
            positions: labels.clone(),
            labels,
            gradients: vec![IDENTITY; n],
            theta0: vec![0.0; n],
            grad_theta0: vec![[0.0; 3]; n],
            omega0: vec![[0.0; 3]; n],
            weights,
            w_acc: vec![0.0; n],
            t: 0.0,
            grid: None,
        })
    }

    /// 2D point vortices with unit weights, so `Γᵢ = ω₀ᵢ`.
    pub fn point_vortices(positions: &[[f64; 2]], circulations: &[f64]) -> Result<Self, DynamicsError> {
        if positions.len() != circulations.len() {
            return Err(DynamicsError::InvalidState("positions and circulations differ in length".into()));
        }
        let labels = positions.iter().map(|p| [p[0], p[1], 0.0]).collect();
        let mut s = Self::at_labels(2, labels, vec![1.0; positions.len()])?;
        for (o, &g) in s.omega0.iter_mut().zip(circulations) {
            o[2] = g;
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn check(&self) -> Result<(), DynamicsError> {
        let n = self.labels.len();
        let lens = [
            self.positions.len(),
            self.gradients.len(),
            self.theta0.len(),
            self.grad_theta0.len(),
            self.omega0.len(),
            self.weights.len(),
            self.w_acc.len(),
        ];
        if lens.iter().any(|&l| l != n) {
            return Err(DynamicsError::InvalidState("per-particle arrays differ in length".into()));
        }
        Ok(())
    }

    /// The value written in the `theta0` column: `θ₀`, the 2D vorticity for
    /// Euler, or `|ω₀|` in 3D.
    pub fn scalar_datum(&self, model: Model, i: usize) -> f64 {
        match model {
            Model::Euler2D => self.omega0[i][2],
            Model::Euler3D => norm(&self.omega0[i]),
            _ => self.theta0[i],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelSpec {
    pub model: Model,
    /// Blob radius: kernels are multiplied by `1 − e^{−|y|²/δ²}`. Zero disables.
    pub delta: f64,
    /// Ignored (forced on) for models whose velocity needs the gradients.
    pub evolve_gradients: bool,
}

impl ModelSpec {
    pub fn new(model: Model, delta: f64) -> Self {
        Self { model, delta, evolve_gradients: true }
    }

    pub fn gradients_needed(&self) -> bool {
        self.evolve_gradients || matches!(self.model, Model::Ipm | Model::Boussinesq2D | Model::Euler3D)
    }

    pub fn validate(&self, state: &ParticleState) -> Result<(), DynamicsError> {
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(DynamicsError::InvalidArgument(format!("delta = {}", self.delta)));
        }
        if self.model.dim() != state.dim {
            return Err(DynamicsError::InvalidState(format!(
                "model {} needs dimension {}, state has {}",
                self.model,
                self.model.dim(),
                state.dim
            )));
        }
        state.check()
    }
}

#[inline]
pub(crate) fn norm(v: &Vec3) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[inline]
pub(crate) fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    c
}

#[inline]
pub(crate) fn mat_vec(a: &Mat3, v: &Vec3) -> Vec3 {
    [
        a[0][0] * v[0] + a[0][1] * v[1] + a[0][2] * v[2],
        a[1][0] * v[0] + a[1][1] * v[1] + a[1][2] * v[2],
        a[2][0] * v[0] + a[2][1] * v[1] + a[2][2] * v[2],
    ]
}
