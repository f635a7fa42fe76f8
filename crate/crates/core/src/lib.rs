//! Strategic classification: a Jury publishes a classifier, a Contestant
//! pays a cost to move its features, and the Jury wants to stay accurate
//! after the move.
//!
//! The game, cost and learner code is generic over [`Scalar`]; use the
//! aliases below for the common instantiations.

pub mod costs;
pub mod error;
pub mod experiments;
pub mod game;
pub mod io;
pub mod learners;
pub mod oracle;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Ext, Scalar};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

pub type Population64 = game::Population<f64>;
pub type CostModel64 = costs::CostModel<f64>;
pub type Classifier64 = game::Classifier<f64>;
pub type RationalPopulation = game::Population<Rational>;
pub type RationalCostModel = costs::CostModel<Rational>;
pub type RationalClassifier = game::Classifier<Rational>;
