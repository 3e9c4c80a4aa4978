//! Rescaled copies of measures, and a planar measure that is doubling but
//! whose restriction to the unit disc is not.

mod lens;
mod pushforward;

pub use lens::{build_lens_measure, nondoubling_ratios, LensMeasure};
pub use pushforward::{pushforward, PushforwardModel};
