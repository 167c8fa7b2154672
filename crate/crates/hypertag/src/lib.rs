//! Embeddings for tagged networks.
//!
//! The pipeline: build a node-tag hybrid graph from an undirected tagged
//! network, sample parameterized random walks over it, and train Skip-gram
//! with negative sampling on the walk corpus, either in Euclidean space or in
//! the Poincare ball. Evaluation protocols (tag classification, community
//! similarity ranking, clustering purity, stability under partial retraining)
//! and synthetic dataset generators round out the toolkit.

pub mod cli;
pub mod corpus;
pub mod embed;
pub mod error;
pub mod eval;
pub mod graph;
pub mod io;
pub mod pipeline;
mod rng;
pub mod synth;
pub mod walk;

pub use error::{Error, Result};
