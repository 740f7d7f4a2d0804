//! Absorbing and weakly absorbing sets for the Chialvo neuron map.
//!
//! The crate is organised bottom-up:
//!
//! - [`map`]: parameters, the map itself, and outward-rounded interval
//!   evaluation over rectangles.
//! - [`bounds`]: the legacy bounds and the corrected constants
//!   `v̂, û₁, ŵ₁, û₂, ŵ₂` with the rectangles `D̂₁⁺` and `D̂₂⁺`.
//! - [`regions`]: phase-space classification, trajectory services, speed
//!   bounds, counterexample and lemma checks.
//! - [`setops`]: lattice cell sets, rigorous transition graphs, forward
//!   closure and the recurrent-set outer bound.
//! - [`cli`]: experiment runners behind the `chialvo` binary.

// `!(x > 0.0)` style tests deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod error;
pub mod map;
pub mod regions;
pub mod setops;

pub use bounds::{AbsorbingBounds, LegacyBounds, RegionKind, RegionRect};
pub use error::{Error, Result};
pub use map::{IRect, Interval, Params, Point};
