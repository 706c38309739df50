//! Differential geometry of surfaces in R⁴ through the two components of
//! their Gauss map.
//!
//! The crate evaluates local invariants from chart parametrizations given as
//! expressions, traces the singular sets of the Gauss map components,
//! classifies fold and cusp points and checks the global identities that
//! relate singularities, curvature integrals and Euler characteristics.

pub mod atlas;
pub mod cli;
pub mod exprlang;
pub mod fixtures;
pub mod frames;
pub mod gaussmap;
pub mod integrate;
pub mod invariants;
pub mod jets;
pub mod singular;
pub mod topology;
