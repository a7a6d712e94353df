//! Simulation of shifted-distance graph decomposition in the synchronous
//! LOCAL model, with two applications built on it: approximate maximum
//! matching and approximate minimum weighted vertex cover. Small instances
//! can be checked against exact solvers in [`oracles`].

pub mod decomposition;
pub mod graph;
pub mod matching;
pub mod oracles;
pub mod seed;
pub mod suite;
pub mod vertex_cover;

pub use seed::Seed;
