//! Core library for graphs equipped with incompatibility systems.
//!
//! An *incompatibility system* `F` for a graph `G` is a family of forbidden
//! pairs of intersecting edges; a subgraph is *compatible* if no two of its
//! edges form a forbidden pair. Properly edge-coloured subgraphs are the
//! special case where `F` forbids equally-coloured intersecting edges.
//!
//! The crate provides
//! * the data model ([`graph`], [`system`]): graphs with stable edge ids,
//!   incompatibility systems, colourings, paths and linear forests;
//! * extremal instance generators ([`generators`]);
//! * bipartite matching machinery ([`matching`]): Hopcroft–Karp, balanced
//!   König decompositions and the almost-regular matching bound;
//! * spanning regular subgraph extraction and system regularization
//!   ([`regularize`]);
//! * the compatible linear forest construction ([`forest`]);
//! * the layered connecting procedure ([`connect`]);
//! * absorbing-path gadgets and the absorber ([`absorb`]);
//! * exact brute-force oracles for small instances ([`oracle`]);
//! * the end-to-end solver ([`pipeline`]).
//!
//! The crate is `no_std`-compatible (requires `alloc`); IO, file formats and
//! the CLI live in the companion `ihc-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod absorb;
pub mod bitset;
pub mod clock;
pub mod connect;
pub mod flow;
pub mod forest;
pub mod generators;
pub mod graph;
pub mod matching;
pub mod oracle;
pub mod pipeline;
pub mod regularize;
pub mod rng;
pub mod system;

mod math;

pub use bitset::VertexSet;
pub use clock::{Clock, NullClock};
pub use graph::{CycleSeq, EdgeColouring, Graph, LinearForest, PathSeq};
pub use system::{EmptySystem, IncompatibilitySystem, System};
