use std::fmt::Debug;

use crate::error::Result;
use crate::geometry::Point;
use crate::interval::{LogMass, MassInterval};

/// Relative tolerance used when a caller does not supply one.
pub const DEFAULT_TOL: f64 = 1e-6;

/// A measure whose open-ball masses can be enclosed to any requested
/// accuracy.
///
/// Query locations are model-specific *sites*: plain points for models that
/// live in coordinates, symbolic codes for models whose points are only
/// resolvable symbolically. [`MeasureModel::position`] maps a site to
/// ambient coordinates for geometric work (distances, nets, reporting).
///
/// Implementations are immutable; every method may be called concurrently.
pub trait MeasureModel: Sync {
    type Site: Clone + Debug + Send + Sync;

    fn ambient_dim(&self) -> usize;

    /// Encloses `mu(B(site, radius))` for the open ball.
    fn ball_mass(&self, site: &Self::Site, radius: f64, tol: f64) -> Result<MassInterval>;

    /// Logarithmic form of [`MeasureModel::ball_mass`]. Models whose masses
    /// leave the range of `f64` override this with a direct computation.
    fn log_ball_mass(&self, site: &Self::Site, radius: f64, tol: f64) -> Result<LogMass> {
        Ok(self.ball_mass(site, radius, tol)?.to_log())
    }

    /// Sites such that every support point is within `scale` of one of them.
    fn support_net(&self, scale: f64) -> Vec<Self::Site>;

    /// Support sites that are candidate extremal points for local scans.
    fn witnesses(&self) -> Vec<Self::Site>;

    fn position(&self, site: &Self::Site) -> Point;
}

impl<M: MeasureModel + ?Sized> MeasureModel for &M {
    type Site = M::Site;

    fn ambient_dim(&self) -> usize {
        (**self).ambient_dim()
    }

    fn ball_mass(&self, site: &Self::Site, radius: f64, tol: f64) -> Result<MassInterval> {
        (**self).ball_mass(site, radius, tol)
    }

    fn log_ball_mass(&self, site: &Self::Site, radius: f64, tol: f64) -> Result<LogMass> {
        (**self).log_ball_mass(site, radius, tol)
    }

    fn support_net(&self, scale: f64) -> Vec<Self::Site> {
        (**self).support_net(scale)
    }

    fn witnesses(&self) -> Vec<Self::Site> {
        (**self).witnesses()
    }

    fn position(&self, site: &Self::Site) -> Point {
        (**self).position(site)
    }
}
