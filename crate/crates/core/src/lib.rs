//! Finite-horizon, exactly verifiable topological dynamics on finitely
//! presented systems: hitting and visit sets, Furstenberg family verdicts,
//! sensitivity and Lyapunov estimates, sequence entropy, and explicit
//! counterexample constructions.

pub mod constructions;
pub mod diagnostics;
pub mod entropy;
pub mod error;
pub mod exact;
pub mod families;
pub mod hitting;
pub mod hnat;
pub mod report;
pub mod systems;

pub use error::{Error, Result};
pub use exact::Rat;
pub use systems::{Bounds, Cell, Limits, PointSpec, System, SystemSpec};
