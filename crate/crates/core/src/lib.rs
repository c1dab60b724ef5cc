//! Verification toolkit for two-player probabilistic game structures:
//! lifted simulation, probabilistic alternating simulation and a modal
//! fixpoint logic over distributions, all in exact rational arithmetic.

pub mod fixtures;
pub mod logic;
pub mod model;
pub mod oracle;
pub mod prob;
pub mod rational;
pub mod sim;

pub use model::{GameStructure, ModelError, Player, StateId, ActionId, PropId};
pub use rational::Rational;
