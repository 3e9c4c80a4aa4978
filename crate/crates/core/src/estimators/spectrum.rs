use rayon::prelude::*;

use super::assouad::greedy_packing;
use super::{fit_line, Ends};
use crate::error::{invalid, Error, Result};
use crate::geometry::Point;
use crate::grid::ScaleGrid;
use crate::model::MeasureModel;

/// Value of the packing function `M_r^q` for one greedy packing.
#[derive(Debug, Clone, PartialEq)]
pub struct PackingSum {
    pub r: f64,
    pub q: f64,
    /// `ln sum_i mu(B(x_i, r))^q`.
    pub ln_value: f64,
    /// Number of balls in the packing.
    pub count: usize,
    /// Candidates dropped because their ball had zero mass.
    pub skipped: usize,
}

impl PackingSum {
    pub fn value(&self) -> f64 {
        self.ln_value.exp()
    }
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m.is_infinite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// `M_r^q` over a maximal `2r`-separated set of candidates drawn from
/// `support_net(r * net_factor)`. Candidates are taken in ascending mass
/// order for `q < 0` and descending for `q > 0`, so that each accepted
/// ball adds as much as possible, and also in coordinate sweeps; the best
/// packing bounds the sup from below.
pub fn packing_sum<M: MeasureModel>(model: &M, r: f64, q: f64, net_factor: f64, tol: f64, ends: Ends) -> Result<PackingSum> {
    if !(r > 0.0) {
        return invalid(format!("radius must be positive, got {r}"));
    }
    if !(net_factor > 0.0) {
        return invalid(format!("net factor must be positive, got {net_factor}"));
    }
    let candidates = model.support_net(r * net_factor);
    if candidates.is_empty() {
        return Err(Error::NoData(format!("empty support net at scale {}", r * net_factor)));
    }
    let masses: Vec<Result<f64>> = candidates
        .par_iter()
        .map(|s| {
            let m = model.log_ball_mass(s, r, tol)?;
            Ok(match ends {
                Ends::Nominal => m.mid,
                Ends::Conservative if q < 0.0 => m.hi,
                Ends::Conservative => m.lo,
            })
        })
        .collect();
    let masses = masses.into_iter().collect::<Result<Vec<f64>>>()?;
    let positions: Vec<Point> = candidates.par_iter().map(|s| model.position(s)).collect();

    let live: Vec<usize> = (0..candidates.len()).filter(|&i| masses[i] > f64::NEG_INFINITY).collect();
    let skipped = candidates.len() - live.len();
    let mut by_mass = live.clone();
    if q < 0.0 {
        by_mass.sort_by(|&a, &b| masses[a].total_cmp(&masses[b]));
    } else if q > 0.0 {
        by_mass.sort_by(|&a, &b| masses[b].total_cmp(&masses[a]));
    }
    // Mass order alone can waste room between neighbours; sweeps in
    // coordinate order pack tightly. Every order yields a valid packing,
    // so the best one is kept.
    let mut sweep = live;
    sweep.sort_by(|&a, &b| {
        positions[a]
            .coords()
            .iter()
            .zip(positions[b].coords())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let reverse: Vec<usize> = sweep.iter().rev().copied().collect();
    let mut best: Option<(f64, usize)> = None;
    for order in [&by_mass, &sweep, &reverse] {
        let chosen = greedy_packing(&positions, order, 2.0 * r);
        let terms: Vec<f64> = chosen.iter().map(|&i| if q == 0.0 { 0.0 } else { q * masses[i] }).collect();
        let v = log_sum_exp(&terms);
        if best.is_none_or(|(b, _)| v > b) {
            best = Some((v, chosen.len()));
        }
    }
    let (ln_value, count) = best.expect("three orders tried");
    Ok(PackingSum { r, q, ln_value, count, skipped })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TauEstimate {
    pub q: f64,
    pub tau: f64,
    /// RMS residual of the fit.
    pub residual: f64,
    /// `(r, ln M_r^q)` for every grid radius used.
    pub samples: Vec<(f64, f64)>,
}

/// `τ(q)` as the least-squares slope of `ln M_r^q` against `ln r` over the
/// grid radii below 1.
pub fn estimate_tau<M: MeasureModel>(
    model: &M,
    q: f64,
    grid: &ScaleGrid,
    net_factor: f64,
    tol: f64,
    ends: Ends,
) -> Result<TauEstimate> {
    grid.validate()?;
    let radii: Vec<f64> = grid.radii().into_iter().filter(|&r| r < 1.0).collect();
    if radii.len() < 3 {
        return invalid(format!("need at least 3 radii below 1 to fit τ, got {}", radii.len()));
    }
    let mut samples = Vec::with_capacity(radii.len());
    for &r in &radii {
        let p = packing_sum(model, r, q, net_factor, tol, ends)?;
        samples.push((r, p.ln_value));
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let (tau, _, residual) = fit_line(&xs, &ys);
    Ok(TauEstimate { q, tau, residual, samples })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LqSpectrumEstimate {
    /// `(q, τ̂(q), fit residual)`.
    pub points: Vec<(f64, f64, f64)>,
    /// `τ̂(q*) / q*` at the most negative `q*`.
    pub t_hat: f64,
}

/// Top of the spectrum `T(μ)` from `τ̂(q)/q` at the most negative `q`.
pub fn estimate_t<M: MeasureModel>(
    model: &M,
    q_list: &[f64],
    grid: &ScaleGrid,
    net_factor: f64,
    tol: f64,
    ends: Ends,
) -> Result<LqSpectrumEstimate> {
    if !q_list.iter().any(|&q| q <= -10.0) {
        return invalid("q list needs at least one q <= -10");
    }
    if let Some(q) = q_list.iter().find(|&&q| !(q < 0.0)) {
        return invalid(format!("q list must be negative, found {q}"));
    }
    let mut points = Vec::with_capacity(q_list.len());
    for &q in q_list {
        let t = estimate_tau(model, q, grid, net_factor, tol, ends)?;
        points.push((q, t.tau, t.residual));
    }
    let &(q_star, tau_star, _) = points.iter().min_by(|a, b| a.0.total_cmp(&b.0)).expect("nonempty");
    Ok(LqSpectrumEstimate { points, t_hat: tau_star / q_star })
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
    fn q_zero_counts_balls() {
        let m = lebesgue();
        let p = packing_sum(&m, 1.0 / 64.0, 0.0, 0.25, 1e-6, Ends::Conservative).unwrap();
        assert_relative_eq!(p.value(), p.count as f64, epsilon = 1e-9);
        assert!(p.count >= 30 && p.count <= 33, "{}", p.count);
    }

    #[test]
    fn q_one_is_at_most_one() {
        for m in [lebesgue(), cantor(0.7)] {
            for k in 2..8 {
                let p = packing_sum(&m, 2f64.powi(-k), 1.0, 0.25, 1e-6, Ends::Conservative).unwrap();
                assert!(p.value() <= 1.0 + 1e-6, "{}", p.value());
            }
        }
    }

    #[test]
    fn cantor_negative_moment_dominates_cylinders() {
        // oracle: sum over all 2^6 level-6 cylinders of mass^-1
        let m = cantor(0.7);
        let mut oracle = 0.0;
        for w in 0..64u32 {
            let ones = w.count_ones() as i32;
            oracle += 1.0 / (0.3f64.powi(ones) * 0.7f64.powi(6 - ones));
        }
        let r = 3f64.powi(-6);
        let p = packing_sum(&m, r, -1.0, 0.25, 1e-9, Ends::Conservative).unwrap();
        assert!(p.value() >= oracle * (1.0 - 1e-6), "{} vs {oracle}", p.value());
    }

    #[test]
    fn tau_values() {
        let grid = ScaleGrid::new(3.0, 2, 8, 1, 2).unwrap();
        let m = cantor(0.5);
        let t2 = estimate_tau(&m, 2.0, &grid, 0.25, 1e-9, Ends::Conservative).unwrap();
        // oracle: 2 (1/2)^2 3^τ = 1
        assert!((t2.tau - 2f64.ln() / 3f64.ln()).abs() < 0.1, "{t2:?}");
        let t1 = estimate_tau(&m, 1.0, &grid, 0.25, 1e-9, Ends::Conservative).unwrap();
        assert!(t1.tau.abs() < 0.1, "{t1:?}");
        let leb = lebesgue();
        let g2 = ScaleGrid::new(2.0, 2, 10, 1, 2).unwrap();
        let t0 = estimate_tau(&leb, 0.0, &g2, 0.25, 1e-9, Ends::Conservative).unwrap();
        assert!((t0.tau + 1.0).abs() < 0.1, "{t0:?}");
    }

    #[test]
    fn cantor_top_of_spectrum() {
        let grid = ScaleGrid::new(3.0, 2, 9, 1, 2).unwrap();
        let m = cantor(0.7);
        let t = estimate_t(&m, &[-2.0, -10.0], &grid, 0.25, 1e-9, Ends::Conservative).unwrap();
        assert!((t.t_hat - 0.3f64.ln() / (1.0f64 / 3.0).ln()).abs() < 0.1, "{t:?}");
        assert!(estimate_t(&m, &[-2.0], &grid, 0.25, 1e-9, Ends::Conservative).is_err());
    }
}
