use std::collections::HashMap;

use rayon::prelude::*;

use super::regularity::{DimEstimate, Witness};
use crate::error::{invalid, Error, Result};
use crate::geometry::Point;
use crate::grid::ScaleGrid;
use crate::model::MeasureModel;

fn cell_key(p: &Point, size: f64) -> Vec<i64> {
    p.coords().iter().map(|c| (c / size).floor() as i64).collect()
}

/// Greedily selects, in the given order, points pairwise more than `sep`
/// apart. Returns indices into `points`.
pub fn greedy_packing(points: &[Point], order: &[usize], sep: f64) -> Vec<usize> {
    let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    let mut chosen = Vec::new();
    let Some(&first) = order.first() else {
        return chosen;
    };
    let d = points[first].dim();
    // neighbor offsets in {-1, 0, 1}^d
    let offsets: Vec<Vec<i64>> = (0..3usize.pow(d as u32))
        .map(|mut n| {
            (0..d)
                .map(|_| {
                    let o = (n % 3) as i64 - 1;
                    n /= 3;
                    o
                })
                .collect()
        })
        .collect();
    for &i in order {
        let key = cell_key(&points[i], sep);
        let clash = offsets.iter().any(|off| {
            let k: Vec<i64> = key.iter().zip(off).map(|(a, b)| a.saturating_add(*b)).collect();
            buckets.get(&k).is_some_and(|v| v.iter().any(|&j| points[j].distance(&points[i]) <= sep))
        });
        if !clash {
            buckets.entry(key).or_default().push(i);
            chosen.push(i);
        }
    }
    chosen
}

/// Assouad dimension of the support: for sites `x` and grid pairs
/// `(R, r)`, the number `N` of points of a maximal `2r`-separated subset of
/// the support (taken from `support_net(r * net_factor)`) inside `B(x, R)`,
/// and the sup of `log N / log(R/r)`.
pub fn estimate_assouad_support<M: MeasureModel>(
    model: &M,
    grid: &ScaleGrid,
    sites: &[M::Site],
    net_factor: f64,
) -> Result<DimEstimate> {
    grid.validate()?;
    if sites.is_empty() {
        return invalid("no sample sites");
    }
    if !(net_factor > 0.0) {
        return invalid(format!("net factor must be positive, got {net_factor}"));
    }
    let radii = grid.radii();
    let centers: Vec<Point> = sites.iter().map(|s| model.position(s)).collect();
    // counts[k][s][j]: packing points at scale radii[k] within radii[j] of site s
    let counts: Vec<Vec<Vec<usize>>> = radii
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            let net: Vec<Point> = model.support_net(r * net_factor).iter().map(|s| model.position(s)).collect();
            let order: Vec<usize> = (0..net.len()).collect();
            let packing: Vec<Point> = greedy_packing(&net, &order, 2.0 * r).into_iter().map(|i| net[i].clone()).collect();
            centers
                .par_iter()
                .map(|x| {
                    let mut dist: Vec<f64> = packing.iter().map(|p| p.distance(x)).collect();
                    dist.sort_by(f64::total_cmp);
                    radii[..k].iter().map(|&big| dist.partition_point(|&t| t < big)).collect::<Vec<usize>>()
                })
                .collect()
        })
        .collect();
    let mut gap_curve = Vec::new();
    let mut best: Option<(f64, Witness)> = None;
    for gap in grid.gaps() {
        let g = gap as usize;
        let mut gap_best: Option<(f64, usize, usize)> = None;
        for k in g..radii.len() {
            let j = k - g;
            for (s, row) in counts[k].iter().enumerate() {
                let n = row[j];
                if n == 0 {
                    continue;
                }
                let e = (n as f64).ln() / grid.log_ratio(gap);
                if gap_best.is_none_or(|(v, _, _)| e > v) {
                    gap_best = Some((e, s, j));
                }
            }
        }
        if let Some((e, s, j)) = gap_best {
            gap_curve.push((gap, e));
            if best.as_ref().is_none_or(|(v, _)| e > *v) {
                let witness = Witness { site_index: s, position: centers[s].clone(), r: radii[j + g], big_r: radii[j], gap };
                best = Some((e, witness));
            }
        }
    }
    let (value, witness) = best.ok_or_else(|| Error::NoData("no packing point near any site".into()))?;
    Ok(DimEstimate { value, witness, gap_curve, conservative: false, skipped: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SimilarityMap;
    use crate::selfsimilar::SelfSimilarSystem;
    use crate::sequence::{Decay, SequenceMeasure};

    #[test]
    fn packing_is_separated_and_maximal() {
        let pts: Vec<Point> = (0..100).map(|i| Point::scalar(i as f64 * 0.01)).collect();
        let order: Vec<usize> = (0..pts.len()).collect();
        let chosen = greedy_packing(&pts, &order, 0.05);
        for (a, &i) in chosen.iter().enumerate() {
            for &j in &chosen[a + 1..] {
                assert!(pts[i].distance(&pts[j]) > 0.05);
            }
        }
        for p in &pts {
            assert!(chosen.iter().any(|&i| pts[i].distance(p) <= 0.05));
        }
    }

    #[test]
    fn interval_has_dimension_one() {
        let maps = vec![
            SimilarityMap::scaling(0.5, Point::scalar(0.0)).unwrap(),
            SimilarityMap::scaling(0.5, Point::scalar(0.5)).unwrap(),
        ];
        let m = SelfSimilarSystem::new(maps, &[0.5, 0.5]).unwrap();
        let grid = ScaleGrid::new(2.0, 1, 14, 8, 12).unwrap();
        let est = estimate_assouad_support(&m, &grid, &m.witnesses(), 0.25).unwrap();
        assert!((est.value - 1.0).abs() < 0.1, "{est:?}");
    }

    #[test]
    fn sequence_supports() {
        let grid = ScaleGrid::new(2.0, 1, 16, 8, 12).unwrap();
        let poly = SequenceMeasure::new(Decay::Poly(1.0), Decay::Poly(2.0), 10_000).unwrap();
        let mut sites = poly.witness_points();
        sites.extend(poly.grid_sites(&grid));
        let est = estimate_assouad_support(&poly, &grid, &sites, 0.25).unwrap();
        assert!((est.value - 1.0).abs() < 0.1, "{est:?}");
        let exp = SequenceMeasure::new(Decay::Exp(0.5), Decay::Exp(0.5), 10_000).unwrap();
        let mut sites = exp.witness_points();
        sites.extend(exp.grid_sites(&grid));

        // counts grow only like log(R/r), so wide gaps are needed
        let wide = ScaleGrid::new(2.0, 1, 100, 60, 80).unwrap();
        let est = estimate_assouad_support(&exp, &wide, &sites, 0.25).unwrap();
        assert!(est.value.abs() < 0.1, "{est:?}");
    }
}
