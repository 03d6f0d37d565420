//! Deterministic Boid-swarm simulator with a shepherding controller that
//! singles out one target agent while keeping the rest of the swarm connected.
//!
//! Module map:
//!
//! - [`swarm`]: sheep dynamics (sensing, force terms, saturation, synchronous step).
//! - [`separation`]: two-sheep feasibility sets for the shepherd line coefficient,
//!   the scalar separation oracles and projection onto the feasible line.
//! - [`controller`]: pinning-sheep controller, the singling main loop and the
//!   midpoint (bipartite) baseline.
//! - [`planner`]: grid A* used to route the shepherd around bystander sheep.
//! - [`metrics`]: interaction graph of the remaining swarm and its components.
//! - [`experiment`]: configuration, scenarios, seeded trial batches and artifacts.

pub mod controller;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod planner;
pub mod separation;
pub mod swarm;

pub use error::{Error, Result};

/// Planar vector / point type used throughout the crate.
pub type Vec2 = nalgebra::Vector2<f64>;
