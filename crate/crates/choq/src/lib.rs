//! Certified numerics for Hausdorff contents and Choquet integrals on regular grids.
//!
//! Everything here is organised around *brackets*: a lower and an upper bound,
//! each backed by a machine-checkable certificate.  Upper bounds on the
//! `δ`-dimensional content of a cell set come from explicit ball covers; lower
//! bounds come from packing weights that are feasible for a ball-constraint
//! program, or from a volume bound at `δ = n`.  Choquet integrals are layer
//! cakes over those brackets, and the `verify` module evaluates both sides of
//! capacity-type Sobolev inequalities with the only comparison direction that
//! is sound under interval uncertainty: `lhs_lower ≤ cap · rhs_upper`.

pub mod choquet;
pub mod content;
pub mod error;
pub mod grid;
pub mod io;
pub mod report;
pub mod testbed;
pub mod verify;

pub use choquet::{choquet_integral, ChoquetBracket, ThresholdLadder};
pub use content::{content_bracket, Ball, ContentBracket, Cover};
pub use error::{Error, Result};
pub use grid::{DiscreteSet, GradientSource, Grid, ScalarField};
