//! Spread-out percolation on Cayley graphs of torsion-free nilpotent groups.

pub mod cayley;
pub mod coupling;
pub mod error;
pub mod group;
pub mod haar;
pub mod interval;
pub mod percolation;
pub mod poly;
pub mod rng;
pub mod union_find;
pub mod verify;

pub use error::{CouplingError, GroupError, HaarError, MetricError, PercolationError};
pub use group::{AlgebraVector, Group, GroupSpec, LatticePoint, Structure};
