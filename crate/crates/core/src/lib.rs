//! Exact information-theoretic analysis and evolutionary optimization of
//! communication codes in structured populations of agents.
//!
//! Every agent observes a shared environment through its own sensor and emits
//! symbols through a stochastic code. Agents cannot tell who produced the
//! symbols they perceive, so the usable information depends on how universal
//! the codes are across the agents that interact. The crate provides:
//!
//! - [`infotheory`]: dense joint tables over named discrete variables and the
//!   entropy / mutual information / divergence measures used on them.
//! - [`model`]: the population model (environment, sensors, codes,
//!   interaction structure), its assembled joint and the objectives.
//! - [`optim`]: a softmax parameter codec and a CMA-ES maximizer.
//! - [`analysis`]: code distances, classical MDS, clustering, concept tables
//!   and structure graphs.
//!
//! With the default `parallel` feature, candidate evaluation and per-pair
//! analysis run on rayon. Disabling it (or selecting
//! [`Execution::Sequential`]) gives a plain sequential path with identical
//! results.

pub mod analysis;
mod error;
pub mod infotheory;
pub mod model;
pub mod optim;
mod parallel;

pub use error::{Error, Result};
pub use parallel::Execution;
