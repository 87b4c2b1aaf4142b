//! Contextuality of finite measurement scenarios.
//!
//! The crate decides where a behavior sits in the hierarchy
//! nondisturbing ⊃ noncontextual, and for its possibilistic collapse
//! whether it is logically or strongly contextual. On n-cycle and other
//! simple scenarios it finds possibilistic paradoxes (Hardy-type chains of
//! forbidden joint outcomes) by reachable-set propagation and emits
//! certificates that can be re-checked against the tables. The [`quantum`]
//! module builds qutrit and two-qubit models realizing those paradoxes on
//! every n-cycle with n ≥ 4 and optimizes the paradox probability.
//!
//! Probabilities are exact rationals throughout; only the quantum module
//! works in floating point and crosses over through an explicit zero
//! tolerance.

pub mod behavior;
pub mod bundle;
pub mod classical;
pub mod error;
pub mod fixtures;
pub mod inequality;
pub mod io;
pub mod lp;
pub mod paradox;
pub mod quantum;
pub mod rational;
pub mod sampling;
pub mod scenario;

pub use behavior::{Behavior, Disturbance, PossibilisticBehavior};
pub use classical::{GlobalAssignment, HierarchyReport, DEFAULT_ENUMERATION_CAP};
pub use error::{Error, Result};
pub use inequality::{NcycleInequality, ViolationReport};
pub use paradox::{CycleView, ParadoxCertificate, PrBoxForm};
pub use quantum::QuantumModel;
pub use rational::Rational;
pub use scenario::{CycleDecomposition, Scenario};
