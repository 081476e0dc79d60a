//! Measure-preserving systems and ratio averages.
//!
//! [`HopfSystem`] is `Z` acting on itself, where ratio averages over
//! intervals converge. [`TowerStage`] and the transition functions build,
//! stage by stage and in exact arithmetic, a partial action of the
//! Heisenberg group on the line whose ratio averages over balls keep
//! swinging between `≥ 1` and `≤ −1`.

mod hopf;
mod provider;
mod shape;
mod tower;
mod transition;

pub use hopf::{HopfSystem, ZFunction};
pub use provider::{verify_translates, Condition, HeisenbergProvider, IncrementalProvider, Translate};
pub use shape::{Component, Shape};
pub use tower::{
    stage_init, BallJson, Cell, EvalS, ExactJson, Norms, Observable, PieceJson, Placement, StageSnapshot, TowerStage, Window,
};
pub use transition::{
    apply_transition, build_tower, compatibility, plan_transition, verify_alternation, AlternationReport,
    AlternationViolation, CompatibilityFailure, StageAlternation, StageTransitionPlan,
};

#[cfg(test)]
mod tests;
