//! Adversarial bandits over structured reward classes.
//!
//! The crate computes the generalized maximin volume of a function class,
//! builds hitting sets and distribution covers from it, runs the Exp3-based
//! learners on top of those objects and measures their regret in seeded
//! simulations.

pub mod complexity;
pub mod counterexamples;
pub mod covers;
pub mod environments;
pub mod error;
pub mod harness;
pub mod learners;
pub mod model;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use model::{
    evaluate_mixture, regret, ArmDistribution, ArmSpace, FunctionClass, Mixture, Trace,
};
pub use scalar::Scalar;

pub type FunctionClass64 = model::FunctionClass<f64>;
pub type FunctionClass32 = model::FunctionClass<f32>;
pub type ArmDistribution64 = model::ArmDistribution<f64>;
pub type ArmDistribution32 = model::ArmDistribution<f32>;
pub type Trace64 = model::Trace<f64>;
pub type Trace32 = model::Trace<f32>;
pub type GameSolution64 = complexity::GameSolution<f64>;
pub type GameSolution32 = complexity::GameSolution<f32>;
pub type Exp3State64 = learners::Exp3State<f64>;
pub type Exp3State32 = learners::Exp3State<f32>;
pub type LearnerHandle64 = learners::LearnerHandle<f64>;
pub type LearnerHandle32 = learners::LearnerHandle<f32>;
