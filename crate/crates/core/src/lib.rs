//! QoS-aware service composition.
//!
//! Picks one concrete service per abstract task of a workflow so that a
//! weighted, normalized mix of aggregate response time, energy and cost is
//! minimal. The main optimizer is a hybrid of the shuffled frog leaping
//! algorithm and a genetic algorithm ([`sfga`]); GA, PSO, a cultural
//! algorithm, a GA/PSO hybrid and an exhaustive oracle live in [`baseline`].
//! [`io`] loads and generates service pools and instances, and [`bench`]
//! runs seeded multi-algorithm scenarios and summarizes them.
//!
//! Independent runs are spread over rayon workers when the default
//! `parallel` feature is on; see [`exec::Execution`].

pub mod baseline;
pub mod bench;
pub mod exec;
pub mod io;
pub mod operators;
pub mod qos;
pub mod record;
pub mod search;
pub mod sfga;
pub mod solver;

pub use exec::Execution;
pub use qos::{CompositionProblem, Genome, QosTriple, WorkflowNode};
pub use record::{Algorithm, RunRecord};
pub use solver::{solve, SolverConfig};
