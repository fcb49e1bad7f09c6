//! Division-hull toolkit for elliptic surfaces over Q(t).
//!
//! The crate computes the exact invariants a surface y^2 = x^3 + A(t)x + B(t)
//! carries: its j-invariant and pole data, the special primes, per-place
//! reduction types, the ramification trees of l-division towers with their
//! genus lower bounds, the tower constants n0/epsilon/delta/N(B), and it
//! verifies these against brute-force fiber-level computations: division
//! hulls over Q via division polynomials, torsion subgroups, and finite-field
//! hull scans across primes.

pub mod budget;
pub mod error;
pub mod exactalg;
pub mod fiberlab;
pub mod ramtree;
pub mod surface;
pub mod tateoracle;
pub mod tower;

pub use budget::Budget;
pub use error::{Error, Result};
