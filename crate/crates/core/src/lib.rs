//! Exact solvers for redistributing docks and bikes across a station
//! network: each station i charges a multimodular cost c_i(d, b) for
//! holding d empty docks and b bikes, and the operator moves whole
//! docks between stations subject to a total-capacity level, a bike
//! budget, per-station bounds, and an L1 travel allowance around the
//! current configuration.
//!
//! The induced objective on dock totals x = d + b is M-convex, which is
//! what every solver here leans on: steepest descent over single-dock
//! exchanges finds global optima, step-scaled descent reaches them in
//! polynomially many moves, and the L1 allowance can be split away and
//! binary-searched.  `verify` holds brute-force oracles and structural
//! checkers used by the test suite to pin all of that down on small
//! instances.

pub mod cost;
pub mod dock;
pub mod gen;
pub mod instance;
pub mod mconvex;
pub mod sra;
pub mod station;
#[cfg(test)]
pub(crate) mod testutil;
pub mod vector;
pub mod verify;

pub use cost::{Cost, ExtendedCost, Finite, Infinite, LexCost};
pub use instance::{Allocation, Instance, Violation};
pub use station::{MultimodularCheck, StationCost};
pub use vector::IntVec;
