//! Explicit finite-difference schemes for scalar conservation laws, read as
//! transition tables of Markov chains.
//!
//! * [`grid`]: cone of events and periodic grids
//! * [`schemes`]: flux coefficients, stencil weights, presets, one explicit step
//! * [`markov`]: transition tables, stability, chain moments, deterministic and
//!   Monte Carlo evolution
//! * [`limiters`]: closed-form stability-equality limiters
//! * [`problems`]: conservation laws, Riemann data, exact solutions, norms
//! * [`fnn`]: sigmoidal networks and their L1 distance to a target
//! * [`gds`]: two-scale slow/fast evolution

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fnn;
pub mod gds;
pub mod grid;
pub mod limiters;
pub mod markov;
pub mod problems;
pub mod rng;
pub mod schemes;

pub use error::{Error, Result};
pub use grid::{ConeGrid, PeriodicGrid};
pub use markov::{
    chain_moments, check_stability, evolve_deterministic, simulate_mc, transition_table,
    ChainMoments, StabilityReport, TransitionTable,
};
pub use problems::{ConservationLaw, InitialProfile, RiemannProblem};
pub use schemes::{
    Boundary, Coefficients, FluxCoefficients, LimiterSet, SchemeConfig, SchemeKind, SpeedModel,
    SpeedSampling, StencilWeights, Velocity,
};
