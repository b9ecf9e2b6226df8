//! Polarization analysis for multiplex directed social networks.
//!
//! A [`MultiplexNetwork`] holds one node registry shared by several named,
//! directed layers (for example `supports`, `likes` and `comments`). On top
//! of it the crate offers:
//!
//! * layer similarity: Jaccard overlap and link-level normalized mutual
//!   information ([`info`]), with leave-one-node-out error bars
//!   ([`jackknife`]);
//! * Q-modularity of a labelled partition and the directional
//!   demodularity between groups ([`modularity`]);
//! * modularity-maximizing community detection with extremal, spectral,
//!   agglomerative and repositioning heuristics chained by combo scripts
//!   ([`community`]);
//! * sliding-window time series of any layer metric ([`temporal`]);
//! * intra-group structure: in-degree centralization, average path length,
//!   k-core decomposition ([`structure`]);
//! * per-group characteristic words by PMI with a likelihood-ratio filter
//!   ([`topics`]);
//! * ideological distance between groups and its correlation with
//!   demodularity ([`ideology`]).
//!
//! Data-parallel loops (jackknife replicates, time windows, detection
//! restarts) run on rayon when the `parallel` feature is enabled and fall
//! back to plain iterators otherwise. Results are identical either way.

pub mod community;
pub mod error;
pub mod generate;
pub mod ideology;
pub mod info;
pub mod io;
pub mod jackknife;
pub mod modularity;
pub mod network;
pub mod par;
pub mod seed;
pub mod stats;
pub mod structure;
pub mod temporal;
pub mod topics;

pub use error::{Error, Result};
pub use network::{Layer, Link, MultiplexNetwork, NodeRegistry, Partition, PartyMergeConfig};
