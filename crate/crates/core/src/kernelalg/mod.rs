//! Closed symbolic algebra for the models' integral kernels.
//!
//! A kernel component is a sum of terms
//! `c·π^k · y^β · |y|^{−p} · e^{−q|y|²}` with rational `c` and `q`. The set is
//! closed under `∂/∂y_i`, so derivatives of any order are exact. Floating
//! point enters only at evaluation.

mod catalog;
mod compiled;
mod expr;
mod verify;

pub use catalog::{
    biot_savart_2d, biot_savart_3d, catalog, decompose_kin, gaussian, perp_gradient, regularize, split_gaussian,
    sqg_inner, sqg_kernel, strain_kernel_2d, strain_kernel_3d, KernelCatalogEntry, Model,
};
pub use compiled::CompiledKernel;
pub(crate) use expr::coeff_to_f64;
pub use expr::{KernelExpr, KernelTerm, Shape, TermKey, TermSum};
pub use verify::{
    circle_mean, gauss_legendre, log_uniform_samples, verify_derivative_bound, BoundKind, BoundReport, DerivativeTable, OrderReport,
};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("kernel evaluated at y = 0")]
    SingularEvaluation,
    #[error("expected a {expected}-vector, got length {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("kernel shapes do not match")]
    ShapeMismatch,
    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("unknown model tag '{0}'")]
    UnknownModel(String),
    #[error("operation not available for model {0}")]
    UnsupportedModel(Model),
    #[error("kernel already carries a Gaussian factor")]
    AlreadyGaussian,
    #[error("regularization length must be positive and finite, got {0}")]
    InvalidDelta(f64),
    #[error("derivative order {0} exceeds the limit of 6")]
    OrderTooLarge(u32),
    #[error("invalid quadrature: radius {radius}, {quad_points} points (need radius > 0, ≥ 8 points)")]
    InvalidQuadrature { radius: f64, quad_points: usize },
}
