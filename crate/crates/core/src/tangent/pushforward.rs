use crate::error::{invalid, Result};
use crate::geometry::{Point, SimilarityMap};
use crate::interval::{LogMass, MassInterval};
use crate::model::MeasureModel;

/// The measure `p * (mu ∘ T^{-1})` for a similarity `T`.
///
/// Sites are the base model's sites; a site `s` stands for the point
/// `T(position(s))`, and `B(T x, rho)` has mass `p * mu(B(x, rho / c))`
/// where `c` is the ratio of `T`.
#[derive(Debug, Clone)]
pub struct PushforwardModel<M> {
    base: M,
    map: SimilarityMap,
    inverse: SimilarityMap,
    factor: f64,
}

impl<M: MeasureModel> PushforwardModel<M> {
    pub fn new(base: M, map: SimilarityMap, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return invalid(format!("mass factor must be positive, got {factor}"));
        }
        if map.dim() != base.ambient_dim() {
            return invalid(format!("map acts on R^{} but the measure lives in R^{}", map.dim(), base.ambient_dim()));
        }
        let inverse = map.inverse();
        Ok(PushforwardModel { base, map, inverse, factor })
    }

    pub fn base(&self) -> &M {
        &self.base
    }

    pub fn map(&self) -> &SimilarityMap {
        &self.map
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }

    fn base_radius(&self, radius: f64) -> f64 {
        radius / self.map.ratio()
    }
}

impl<M: MeasureModel<Site = Point>> PushforwardModel<M> {
    /// Mass of `B(y, radius)` for an arbitrary point `y`.
    pub fn ball_mass_at(&self, y: &Point, radius: f64, tol: f64) -> Result<MassInterval> {
        let x = self.inverse.apply(y)?;
        Ok(self.base.ball_mass(&x, self.base_radius(radius), tol)?.scale(self.factor))
    }
}

pub fn pushforward<M: MeasureModel>(base: M, map: SimilarityMap, factor: f64) -> Result<PushforwardModel<M>> {
    PushforwardModel::new(base, map, factor)
}

impl<M: MeasureModel> MeasureModel for PushforwardModel<M> {
    type Site = M::Site;

    fn ambient_dim(&self) -> usize {
        self.base.ambient_dim()
    }

    fn ball_mass(&self, site: &M::Site, radius: f64, tol: f64) -> Result<MassInterval> {
        Ok(self.base.ball_mass(site, self.base_radius(radius), tol)?.scale(self.factor))
    }

    fn log_ball_mass(&self, site: &M::Site, radius: f64, tol: f64) -> Result<LogMass> {
        Ok(self.base.log_ball_mass(site, self.base_radius(radius), tol)?.shift(self.factor.ln()))
    }

    fn support_net(&self, scale: f64) -> Vec<M::Site> {
        self.base.support_net(self.base_radius(scale))
    }

    fn witnesses(&self) -> Vec<M::Site> {
        self.base.witnesses()
    }

    fn position(&self, site: &M::Site) -> Point {
        self.map.apply(&self.base.position(site)).expect("dimension checked at construction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selfsimilar::SelfSimilarSystem;
    use approx::assert_relative_eq;

    fn lebesgue() -> SelfSimilarSystem {
        let maps = vec![
            SimilarityMap::scaling(0.5, Point::scalar(0.0)).unwrap(),
            SimilarityMap::scaling(0.5, Point::scalar(0.5)).unwrap(),
        ];
        SelfSimilarSystem::new(maps, &[0.5, 0.5]).unwrap()
    }

    #[test]
    fn identity_pushforward_is_transparent() {
        let base = lebesgue();
        let pf = pushforward(&base, SimilarityMap::identity(1), 1.0).unwrap();
        for x in [0.1, 0.5, 0.9] {
            let p = Point::scalar(x);
            assert_eq!(pf.ball_mass(&p, 0.05, 1e-9).unwrap(), base.ball_mass(&p, 0.05, 1e-9).unwrap());
        }
    }

    #[test]
    fn halving_map_halves_lengths() {
        let base = lebesgue();
        let pf = pushforward(&base, SimilarityMap::scaling(0.5, Point::scalar(0.0)).unwrap(), 1.0).unwrap();
        let x = Point::scalar(0.4);
        let y = Point::scalar(0.2);
        let m = pf.ball_mass_at(&y, 0.05, 1e-9).unwrap();
        // B(0.2, 0.05) pulls back to B(0.4, 0.1), of length 0.2
        assert!(m.contains(0.2), "{m:?}");
        let direct = base.ball_mass(&x, 0.1, 1e-9).unwrap();
        assert_relative_eq!(m.midpoint(), direct.midpoint(), epsilon = 1e-12);
        assert!(pf.ball_mass_at(&y, 0.05, 1e-9).unwrap().contains(0.5 * base.ball_mass(&x, 0.2, 1e-9).unwrap().midpoint()));
    }

    #[test]
    fn factor_scales_masses() {
        let base = lebesgue();
        let pf = pushforward(&base, SimilarityMap::scaling(0.25, Point::scalar(3.0)).unwrap(), 8.0).unwrap();
        let site = Point::scalar(0.3);
        let a = pf.ball_mass(&site, 0.01, 1e-9).unwrap();
        let b = base.ball_mass(&site, 0.04, 1e-9).unwrap();
        assert_eq!(a, b.scale(8.0));
        assert_relative_eq!(pf.position(&site).coords()[0], 3.075, epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        let base = lebesgue();
        assert!(pushforward(&base, SimilarityMap::identity(1), 0.0).is_err());
        assert!(pushforward(&base, SimilarityMap::identity(2), 1.0).is_err());
    }
}
