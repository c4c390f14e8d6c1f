//! Exact machinery for flexible list colorings of sparse plane graphs.
//!
//! The crate is organized around one pipeline: describe a configuration
//! (a small subgraph with boundary and degree data), certify it reducible
//! ([`reducibility`]), peel a host graph into a resolution certificate
//! ([`resolution`]), sample or exactly compute the induced coloring
//! distribution ([`sampler`]), and audit the counting side of the argument
//! with exact discharging ([`discharging`]). Everything arithmetic is an
//! exact `BigRational`; every enumeration has a documented deterministic
//! order so reports are byte-stable across runs.

pub mod builtins;
pub mod coloring;
pub mod discharging;
pub mod formats;
pub mod graph;
pub mod pattern;
pub mod planegen;
pub mod rational;
pub mod reducibility;
pub mod resolution;
pub mod rng;
pub mod sampler;

pub use graph::{Face, Graph, PlaneGraph, RotationSystem, VertexId};
pub use rational::Rat;
