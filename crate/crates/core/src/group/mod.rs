//! Nilpotent groups in Malcev coordinates.

mod law;
mod spec;

pub use law::{AlgebraVector, Group, Structure};
pub use spec::{builtin_spec, BchTerm, Bracket, Builtin, GroupSpec, LatticePoint, Rational, Step2Data};
