use std::collections::HashMap;

use super::{mass_table, Ends};
use crate::error::{invalid, Error, Result};
use crate::geometry::Point;
use crate::grid::ScaleGrid;
use crate::interval::LogMass;
use crate::model::MeasureModel;

/// Site and radius pair attaining an estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub site_index: usize,
    pub position: Point,
    pub r: f64,
    pub big_r: f64,
    pub gap: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimEstimate {
    pub value: f64,
    pub witness: Witness,
    /// `(gap, sup of the ratio exponent over all pairs with that gap)`.
    pub gap_curve: Vec<(u32, f64)>,
    pub conservative: bool,
    /// Triples dropped because the inner ball had zero mass.
    pub skipped: usize,
}

/// Upper regularity dimension over the grid's radius pairs: for each gap
/// the sup over sites and pairs of `log(mu(B(x,R)) / mu(B(x,r))) / log(R/r)`,
/// then the max over gaps.
pub fn estimate_upper_regularity<M: MeasureModel>(
    model: &M,
    grid: &ScaleGrid,
    sites: &[M::Site],
    tol: f64,
    ends: Ends,
) -> Result<DimEstimate> {
    grid.validate()?;
    if sites.is_empty() {
        return invalid("no sample sites");
    }
    let radii = grid.radii();
    let table = mass_table(model, sites, &radii, tol)?;
    let mut skipped = 0;
    let mut gap_curve = Vec::new();
    let mut best: Option<(f64, Witness)> = None;
    for gap in grid.gaps() {
        let g = gap as usize;
        if g >= radii.len() {
            continue;
        }
        let log_ratio = grid.log_ratio(gap);
        let mut gap_best: Option<(f64, usize, usize)> = None;
        for (s, row) in table.iter().enumerate() {
            for k in 0..radii.len() - g {
                let den = ends.denominator(&row[k + g]);
                if den == f64::NEG_INFINITY {
                    skipped += 1;
                    continue;
                }
                let e = (ends.numerator(&row[k]) - den) / log_ratio;
                if gap_best.is_none_or(|(v, _, _)| e > v) {
                    gap_best = Some((e, s, k));
                }
            }
        }
        if let Some((e, s, k)) = gap_best {
            gap_curve.push((gap, e));
            if best.as_ref().is_none_or(|(v, _)| e > *v) {
                let witness =
                    Witness { site_index: s, position: model.position(&sites[s]), r: radii[k + g], big_r: radii[k], gap };
                best = Some((e, witness));
            }
        }
    }
    let (value, witness) = best.ok_or_else(|| Error::NoData("every ball in the sample had zero mass".into()))?;
    Ok(DimEstimate { value, witness, gap_curve, conservative: ends.is_conservative(), skipped })
}

/// Upper local dimension at a site: the max of `log mu(B(x,r)) / log r`
/// over the smallest quarter of the grid radii below 1.
pub fn estimate_local_dim_upper<M: MeasureModel>(
    model: &M,
    site: &M::Site,
    grid: &ScaleGrid,
    tol: f64,
    ends: Ends,
) -> Result<f64> {
    grid.validate()?;
    let radii: Vec<f64> = grid.radii().into_iter().filter(|&r| r < 1.0).collect();
    if radii.is_empty() {
        return invalid("grid has no radii below 1");
    }
    let quarter = radii.len().div_ceil(4);
    let small = &radii[radii.len() - quarter..];
    let mut best = f64::NEG_INFINITY;
    for &r in small {
        let m = model.log_ball_mass(site, r, tol)?;
        let lm = ends.denominator(&m);
        if lm == f64::NEG_INFINITY {
            return Err(Error::NoData(format!("zero mass at radius {r}: the site is not in the support")));
        }
        best = best.max(lm / r.ln());
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoublingEstimate {
    /// Observed `sup mu(B(x,R)) / mu(B(x,θR))`, a lower bound for `C(θ)`.
    pub value: f64,
    pub log_value: f64,
    pub site_index: usize,
    pub radius: f64,
    pub skipped: usize,
}

/// Radii `R θ^j` for every grid radius `R`, continued until the chain
/// passes below the smallest grid radius, together with their `θ`-images.
fn chain_radii(grid: &ScaleGrid, theta: f64) -> Vec<f64> {
    let radii = grid.radii();
    let r_min = *radii.last().expect("validated grid is nonempty");
    let mut outer = Vec::new();
    for &big in &radii {
        let mut rho = big;
        while rho > r_min {
            outer.push(rho);
            rho *= theta;
        }
    }
    outer
}

/// Empirical doubling constant `C(θ)` over the grid radii and the
/// `θ`-chains hanging from them, so that every grid pair `(R, r)` is
/// bridged by a chain of sampled ratios.
pub fn doubling_constant<M: MeasureModel>(
    model: &M,
    theta: f64,
    grid: &ScaleGrid,
    sites: &[M::Site],
    tol: f64,
    ends: Ends,
) -> Result<DoublingEstimate> {
    grid.validate()?;
    if !(theta > 0.0 && theta < 1.0) {
        return invalid(format!("theta must lie in (0,1), got {theta}"));
    }
    if sites.is_empty() {
        return invalid("no sample sites");
    }
    let outer = chain_radii(grid, theta);
    let mut all: Vec<f64> = Vec::new();
    let mut index: HashMap<u64, usize> = HashMap::new();
    let mut pairs = Vec::with_capacity(outer.len());
    for &rho in &outer {
        let mut slot = |x: f64| {
            *index.entry(x.to_bits()).or_insert_with(|| {
                all.push(x);
                all.len() - 1
            })
        };
        let a = slot(rho);
        let b = slot(rho * theta);
        pairs.push((a, b));
    }
    let table = mass_table(model, sites, &all, tol)?;
    // reversed roles: the certified constant needs the upper end on top
    let top = |m: &LogMass| if ends.is_conservative() { m.hi } else { m.mid };
    let bottom = |m: &LogMass| if ends.is_conservative() { m.lo } else { m.mid };
    let mut skipped = 0;
    let mut best: Option<(f64, usize, f64)> = None;
    for (s, row) in table.iter().enumerate() {
        for &(a, b) in &pairs {
            let den = bottom(&row[b]);
            if den == f64::NEG_INFINITY {
                skipped += 1;
                continue;
            }
            let v = top(&row[a]) - den;
            if best.is_none_or(|(w, _, _)| v > w) {
                best = Some((v, s, all[a]));
            }
        }
    }
    let (log_value, site_index, radius) = best.ok_or_else(|| Error::NoData("every ball in the sample had zero mass".into()))?;
    Ok(DoublingEstimate { value: log_value.exp(), log_value, site_index, radius, skipped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SimilarityMap;
    use crate::selfsimilar::SelfSimilarSystem;
    use approx::assert_relative_eq;

    fn cantor(p: f64) -> SelfSimilarSystem {
        let maps = vec![
            SimilarityMap::scaling(1.0 / 3.0, Point::scalar(0.0)).unwrap(),
            SimilarityMap::scaling(1.0 / 3.0, Point::scalar(2.0 / 3.0)).unwrap(),
        ];
        SelfSimilarSystem::new(maps, &[p, 1.0 - p]).unwrap().with_ssc_check(8)
    }

    fn lebesgue() -> SelfSimilarSystem {
        let maps = vec![
            SimilarityMap::scaling(0.5, Point::scalar(0.0)).unwrap(),
            SimilarityMap::scaling(0.5, Point::scalar(0.5)).unwrap(),
        ];
        SelfSimilarSystem::new(maps, &[0.5, 0.5]).unwrap()
    }

    #[test]
    fn witness_reproduces_value() {
        let m = cantor(0.7);
        let grid = ScaleGrid::new(3.0, 0, 10, 4, 8).unwrap();
        let sites = m.witnesses();
        let est = estimate_upper_regularity(&m, &grid, &sites, 1e-9, Ends::Conservative).unwrap();
        let w = &est.witness;
        let site = &sites[w.site_index];
        let num = m.ball_mass(site, w.big_r, 1e-9).unwrap().lo;
        let den = m.ball_mass(site, w.r, 1e-9).unwrap().hi;
        assert_relative_eq!((num / den).ln() / (w.big_r / w.r).ln(), est.value, epsilon = 1e-9);
        let max_curve = est.gap_curve.iter().map(|g| g.1).fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(max_curve, est.value);
    }

    #[test]
    fn more_sites_never_lower_the_estimate() {
        let m = cantor(0.7);
        let grid = ScaleGrid::new(3.0, 0, 9, 4, 6).unwrap();
        let all = m.witnesses();
        let a = estimate_upper_regularity(&m, &grid, &all[..2], 1e-9, Ends::Conservative).unwrap();
        let b = estimate_upper_regularity(&m, &grid, &all, 1e-9, Ends::Conservative).unwrap();
        assert!(b.value >= a.value);
    }

    #[test]
    fn empty_sample_is_rejected() {
        let m = lebesgue();
        assert!(estimate_upper_regularity(&m, &ScaleGrid::default(), &[], 1e-6, Ends::Conservative).is_err());
    }

    #[test]
    fn lebesgue_doubling_constant_is_two() {
        let m = lebesgue();
        let grid = ScaleGrid::new(2.0, 1, 12, 4, 8).unwrap();
        let c = doubling_constant(&m, 0.5, &grid, &m.witnesses(), 1e-9, Ends::Conservative).unwrap();
        assert!((c.value - 2.0).abs() < 0.05, "{c:?}");
        assert!(c.value >= 1.0);
    }

    #[test]
    fn cantor_local_dimension_at_rare_fixed_point() {
        let m = cantor(0.7);
        let grid = ScaleGrid::new(3.0, 0, 12, 4, 8).unwrap();
        let x = Point::scalar(1.0);
        let d = estimate_local_dim_upper(&m, &x, &grid, 1e-9, Ends::Conservative).unwrap();
        assert!((d - 0.3f64.ln() / (1.0f64 / 3.0).ln()).abs() < 0.05, "{d}");
    }
}
