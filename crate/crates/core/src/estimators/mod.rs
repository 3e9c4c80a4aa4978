//! Finite-scale estimators for the upper regularity dimension and the
//! quantities it is compared with.
//!
//! Every estimator replaces a limit by extremes or fits over an explicit
//! [`ScaleGrid`]. Work is spread over sites with rayon; results are
//! collected in input order and reduced sequentially, so outputs do not
//! depend on the number of threads.

mod assouad;
mod chain;
mod regularity;
mod spectrum;

use rayon::prelude::*;

use crate::error::Result;
use crate::interval::LogMass;
use crate::model::MeasureModel;

pub use assouad::{estimate_assouad_support, greedy_packing};
pub use chain::{verify_dimension_chain, ChainReport, ChainSettings, Violation, CHAIN_TOL, DIVERGENCE_CAP};
pub use regularity::{
    doubling_constant, estimate_local_dim_upper, estimate_upper_regularity, DimEstimate, DoublingEstimate, Witness,
};
pub use spectrum::{estimate_t, estimate_tau, packing_sum, LqSpectrumEstimate, PackingSum, TauEstimate};

/// Which ends of the mass enclosures enter a ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Ends {
    /// Lower end in the numerator, upper end in the denominator, so
    /// estimated ratios never exceed certified ones.
    #[default]
    Conservative,
    /// The model's nominal values on both sides.
    Nominal,
}

impl Ends {
    /// Log-mass used in the numerator of a ratio.
    pub fn numerator(self, m: &LogMass) -> f64 {
        match self {
            Ends::Conservative => m.lo,
            Ends::Nominal => m.mid,
        }
    }

    /// Log-mass used in the denominator of a ratio.
    pub fn denominator(self, m: &LogMass) -> f64 {
        match self {
            Ends::Conservative => m.hi,
            Ends::Nominal => m.mid,
        }
    }

    pub fn is_conservative(self) -> bool {
        self == Ends::Conservative
    }
}

/// Log-masses of every site at every radius, `table[site][k]`.
pub(crate) fn mass_table<M: MeasureModel>(model: &M, sites: &[M::Site], radii: &[f64], tol: f64) -> Result<Vec<Vec<LogMass>>> {
    let rows: Vec<Result<Vec<LogMass>>> =
        sites.par_iter().map(|s| radii.iter().map(|&r| model.log_ball_mass(s, r, tol)).collect()).collect();
    rows.into_iter().collect()
}

/// Least-squares line through `(x, y)`: `(slope, intercept, rms residual)`.
pub(crate) fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    (slope, intercept, (sse / n).sqrt())
}
