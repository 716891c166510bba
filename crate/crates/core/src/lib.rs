//! Exact tropical geometry for piecewise-linear networks.

pub mod arith;
pub mod cli;
pub mod envelope;
pub mod equivalence;
pub mod error;
pub mod formula;
pub mod lp;
pub mod network;
pub mod pl;
pub mod sample;

pub use arith::{Matrix, Rat};
pub use error::{Error, Result};
pub use network::{Architecture, DecomposeOptions, Layer, Network, TropicalPair};
pub use pl::{Affine, PLFunc, PLVec};
