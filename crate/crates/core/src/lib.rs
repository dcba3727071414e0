//! Atomic congestion games with altruistic agents, in exact rational
//! arithmetic.
//!
//! Agent `i` with altruism level `beta_i` perceives
//! `c_i(S) = beta_i c(S) + (1 - beta_i) d_i(S)`, where `c` is the social cost
//! and `d_i` the agent's own delay. The crate provides
//!
//! * the model and equilibrium checks ([`model`]),
//! * response dynamics and potentials ([`dynamics`]),
//! * the equilibrium DP for symmetric singleton games ([`singleton`]),
//! * minimum altruist sets, stability costs and VCG payments
//!   ([`stabilization`], built on [`matching`]),
//! * an exhaustive oracle for small games ([`oracle`]),
//! * example games and reduction gadgets ([`generators`]).

pub mod dynamics;
pub mod error;
pub mod generators;
pub mod matching;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod singleton;
pub mod stabilization;

pub use error::{Error, Result};
pub use model::{
    agent_delay, altruistic_delay, congestions, individual_cost, is_nash, move_delta, nash_witness,
    social_cost, social_cost_of_load, AgentSpec, CongestionVector, DelayFunction, Game, GameSpec,
    MoveDelta, Resource, State,
};
pub use rational::{Bound, Rational};
