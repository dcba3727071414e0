//! Named example games and reduction gadgets.

pub mod canned;
pub mod cnf;
pub mod network;
pub mod partition;
pub mod sat;

pub use canned::{canned_games, example1, footnote_asymmetric, footnote_symmetric};
pub use cnf::CnfFormula;
pub use network::{affine_to_parallel, affine_to_parallel_game, expand_paths, NetworkGame};
pub use partition::{partition_to_network, PartitionInstance};
pub use sat::{sat_to_network, sat_to_singleton};
