//! Statistical probability logic over finite structures.
//!
//! Sentences mix first-order formulas with probability terms `[a]{x}`
//! denoting the measure of the tuples satisfying `a`. The crate parses
//! them, evaluates them on finite models with product measures, bounds
//! probability terms by linear programming over possible worlds, compiles
//! Bayes nets into sentences, and derives degrees of belief by direct
//! inference.

pub mod bayes;
pub mod belief;
pub mod entail;
pub mod eval;
pub mod gen;
pub mod model;
pub mod par;
pub mod parser;
pub mod rational;
pub mod syntax;

pub use rational::Rational;
