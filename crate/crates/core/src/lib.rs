//! Exactly computable fractal measures with certified ball masses, and
//! finite-scale estimators for the upper regularity dimension and related
//! quantities.
//!
//! Model families:
//! - [`selfsimilar`]: self-similar measures under strong separation,
//! - [`sponge`]: self-affine measures on Bedford–McMullen sponges,
//! - [`sequence`]: weighted point masses on a sequence converging to 0,
//! - [`tangent`]: similarity pushforwards and a planar restriction example.
//!
//! All families implement [`MeasureModel`]; the [`estimators`] module works
//! on any of them.

// `!(x > 0.0)` is the idiom for rejecting NaN along with the rest
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod estimators;
pub mod gallery;
pub mod geometry;
pub mod grid;
pub mod interval;
pub mod model;
pub mod rational;
pub mod selfsimilar;
pub mod sequence;
pub mod sponge;
pub mod tangent;

pub use error::{Error, Result};
pub use geometry::{apply_similarity, invert_similarity, Point, SimilarityMap};
pub use grid::{RadiusPair, ScaleGrid};
pub use interval::{End, LogMass, MassInterval};
pub use model::{MeasureModel, DEFAULT_TOL};
pub use rational::Number;
