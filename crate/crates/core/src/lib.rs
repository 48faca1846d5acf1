//! Pure-exchange general equilibrium.
//!
//! Models exchange economies, evaluates the excess consumption correspondence,
//! searches the price simplex for certified equilibria and turns the existence
//! assumptions into executable checks.

pub mod cli;
pub mod demand;
pub mod diagnostics;
pub mod economy;
pub mod equilibrium;
pub mod excess;
pub mod geometry;
pub mod polytope;
pub mod sampling;
