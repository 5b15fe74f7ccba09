//! Exact rational combinatorics: multi-indices, partition sets, Faà di Bruno
//! sums, and the partition-sum identities used in the analyticity recursion.
//!
//! Everything here is computed in [`BigRational`]; no floating point is used
//! except when a caller asks for `f64` evaluation of a Faà di Bruno plan.

mod faa_di_bruno;
mod identities;
mod multi_index;
mod partitions;

pub use num_rational::BigRational;

pub use faa_di_bruno::{faa_di_bruno_1d, faa_di_bruno_multi, int_pow, FaaDiBrunoPlan, FdbScalar, PlanTerm};
pub use identities::{
    binomial_half, check_factorial_bound, convolution_identity, double_factorial, has_alternating_sign,
    magic_identity_1d, magic_identity_multi, s_n_identity, series_coefficients, IdentityCheck, MagicRatio,
    SnCheck,
};
pub use multi_index::{factorial, MultiIndex};
pub use partitions::{enumerate_partitions_1d, enumerate_partitions_multi, Partition1D, PartitionMulti};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum CombinatoricsError {
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("missing derivative: {0}")]
    MissingDerivative(String),
}
