//! Split-player decision dilemmas as ordinal two-player games.
//!
//! A single decision maker is modelled as two players (for instance an
//! "emotion" and a "profession" module) whose payoffs are known only through
//! probabilistic dominance assertions. The crate enumerates pure equilibria
//! from those assertions, turns index scores into equilibrium-selection
//! probabilities, scores the professionalism questionnaire that feeds one of
//! the indices, and cross-checks the closed forms by simulation.

pub mod bayes;
pub mod constraints;
pub mod error;
pub mod game;
pub mod index_model;
pub mod mc_oracle;
pub mod scenario;
pub mod solver;
pub mod survey;

pub use error::{Error, Result};
