//! Lagrangian particle laboratory for inviscid fluid models.
//!
//! * [`combinatorics`]: exact partition sums and Faà di Bruno formulas.
//! * [`kernelalg`]: symbolic kernel algebra with exact derivatives.
//! * [`jets`]: truncated Taylor series in time.
//! * [`dynamics`]: particle right-hand sides, RK4 and diagnostics.
//! * [`taylorstep`]: trajectory jets, radius estimates and Taylor stepping.

pub mod combinatorics;
pub mod kernelalg;
pub mod jets;
pub mod dynamics;
pub mod taylorstep;
