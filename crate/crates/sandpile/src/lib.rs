//! Exact invariants of sandpile graphs.
//!
//! A sandpile graph is a finite directed multigraph with a designated
//! sink reachable from every vertex.  This crate computes its
//! chip-firing dynamics, critical (sandpile) group, toppling ideal
//! with Groebner and Hilbert data, divisor theory on the undirected
//! side, minimal free resolution degrees via simplicial homology, and
//! the complete-intersection / Gorenstein classification, all in exact
//! integer arithmetic.

pub mod divisor;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod group;
pub mod ideal;
pub mod matrix;
pub mod resolution;
pub mod structure;

/// Default exact scalar.
pub type Int = num_bigint::BigInt;
/// Default exact matrix.
pub type IntMatrix = matrix::Matrix<Int>;

pub use dynamics::{Config, Script};
pub use error::{Error, Result};
pub use graph::Graph;
