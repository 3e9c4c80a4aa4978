//! Self-similar measures `mu = sum_i p_i mu∘S_i^{-1}` with certified ball
//! masses obtained by cylinder subdivision.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::One;

use crate::error::{invalid, Error, Result};
use crate::geometry::{Point, SimilarityMap};
use crate::interval::MassInterval;
use crate::model::MeasureModel;
use crate::rational::{exact_sum, Number};

const PROB_SUM_TOL: f64 = 1e-12;
const HULL_INFLATION: f64 = 1e-9;
/// Upper bound on cylinder expansions per ball query.
const MAX_EXPANSIONS: usize = 2_000_000;
/// Cylinders smaller than this fraction of the hull are never expanded.
const MIN_RELATIVE_RADIUS: f64 = 1e-15;
/// Cap on the number of cylinders examined by the separation check.
const SSC_CYLINDER_BUDGET: usize = 4096;
/// Relative slack added to subdivision sums for floating-point rounding.
const SUM_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SscStatus {
    /// First-level pieces of the attractor are at least `delta` apart.
    Certified { delta: f64 },
    /// No separation was proved; `min_gap` is the best lower bound found
    /// (nonpositive).
    Unknown { min_gap: f64 },
    /// Two maps share a fixed point, so first-level pieces intersect.
    Violated,
}

#[derive(Debug, Clone)]
pub struct SelfSimilarSystem {
    maps: Vec<SimilarityMap>,
    probs: Vec<f64>,
    exact_probs: Option<Vec<BigRational>>,
    hull_center: Point,
    hull_radius: f64,
    fixed_points: Vec<Point>,
    ssc: SscStatus,
}

/// The symbolic cylinder `[word]` with its mass, contraction ratio and
/// bounding ball (the image of the hull).
#[derive(Debug, Clone, PartialEq)]
pub struct Cylinder {
    pub word: Vec<usize>,
    pub mass: f64,
    pub ratio: f64,
    pub center: Point,
    pub radius: f64,
}

fn fixed_point(map: &SimilarityMap) -> Result<Point> {
    let d = map.dim();
    let a = DMatrix::identity(d, d) - map.orthogonal() * map.ratio();
    let t = map.translation();
    let x = a
        .lu()
        .solve(&DVector::from_column_slice(t.coords()))
        .ok_or_else(|| Error::InvalidArgument("map has no unique fixed point".into()))?;
    Ok(Point::new(x.iter().copied().collect()))
}

impl SelfSimilarSystem {
    pub fn new(maps: Vec<SimilarityMap>, probs: &[f64]) -> Result<Self> {
        Self::build(maps, probs.to_vec(), None)
    }

    /// Builds a system whose probabilities are kept as exact rationals.
    pub fn from_numbers(maps: Vec<SimilarityMap>, probs: &[Number]) -> Result<Self> {
        let exact: Vec<BigRational> = probs.iter().map(|p| p.exact().clone()).collect();
        let sum = exact_sum(probs);
        let values = probs.iter().map(Number::value).collect();
        if !sum.is_one() {
            let s = crate::rational::ratio_to_f64(&sum);
            if (s - 1.0).abs() > PROB_SUM_TOL {
                return invalid(format!("probabilities sum to {s}, not 1"));
            }
        }
        Self::build(maps, values, Some(exact))
    }

    fn build(maps: Vec<SimilarityMap>, probs: Vec<f64>, exact_probs: Option<Vec<BigRational>>) -> Result<Self> {
        if maps.is_empty() {
            return invalid("an iterated function system needs at least one map");
        }
        if maps.len() != probs.len() {
            return invalid(format!("{} maps but {} probabilities", maps.len(), probs.len()));
        }
        let d = maps[0].dim();
        for (i, m) in maps.iter().enumerate() {
            if m.dim() != d {
                return invalid(format!("map {i} acts on R^{} but map 0 acts on R^{d}", m.dim()));
            }
            if !(m.ratio() > 0.0 && m.ratio() < 1.0) {
                return invalid(format!("map {i} has ratio {} outside (0,1)", m.ratio()));
            }
        }
        if let Some(i) = probs.iter().position(|&p| !(p > 0.0)) {
            return invalid(format!("probability {i} is {} (must be positive)", probs[i]));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return invalid(format!("probabilities sum to {total}, not 1"));
        }

        let fixed_points = maps.iter().map(fixed_point).collect::<Result<Vec<_>>>()?;
        let mut center = vec![0.0; d];
        for p in &fixed_points {
            for (c, x) in center.iter_mut().zip(p.coords()) {
                *c += x / fixed_points.len() as f64;
            }
        }
        let hull_center = Point::new(center);
        let c_max = maps.iter().map(SimilarityMap::ratio).fold(0.0, f64::max);
        let spread = maps
            .iter()
            .map(|m| m.apply(&hull_center).map(|y| y.distance(&hull_center)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let hull_radius = (spread / (1.0 - c_max)).max(f64::MIN_POSITIVE) * (1.0 + HULL_INFLATION) + HULL_INFLATION;

        Ok(SelfSimilarSystem {
            maps,
            probs,
            exact_probs,
            hull_center,
            hull_radius,
            fixed_points,
            ssc: SscStatus::Unknown { min_gap: f64::NEG_INFINITY },
        })
    }

    pub fn maps(&self) -> &[SimilarityMap] {
        &self.maps
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.maps.iter().map(SimilarityMap::ratio).collect()
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.hull_center.dim()
    }

    pub fn hull(&self) -> (&Point, f64) {
        (&self.hull_center, self.hull_radius)
    }

    pub fn ssc_status(&self) -> SscStatus {
        self.ssc
    }

    pub fn fixed_points(&self) -> &[Point] {
        &self.fixed_points
    }

    /// Runs the separation check and stores the result.
    pub fn with_ssc_check(mut self, max_depth: usize) -> Self {
        self.ssc = self.check_ssc(max_depth);
        self
    }

    /// Tries to prove the strong separation condition by refining each
    /// first-level branch into bounding balls of depth `k <= max_depth` and
    /// bounding the distance between branches from below.
    pub fn check_ssc(&self, max_depth: usize) -> SscStatus {
        let n = self.maps.len();
        if n == 1 {
            return SscStatus::Certified { delta: f64::INFINITY };
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if self.fixed_points[i].distance(&self.fixed_points[j]) == 0.0 {
                    return SscStatus::Violated;
                }
            }
        }
        let mut best = f64::NEG_INFINITY;
        // branches[i] holds the bounding balls of depth-k cylinders starting with i.
        let mut branches: Vec<Vec<(SimilarityMap, Point)>> =
            self.maps.iter().map(|m| vec![(m.clone(), m.apply(&self.hull_center).expect("dimension checked"))]).collect();
        for depth in 1..=max_depth.max(1) {
            let mut min_gap = f64::INFINITY;
            for i in 0..n {
                for j in (i + 1)..n {
                    for (mi, ci) in &branches[i] {
                        for (mj, cj) in &branches[j] {
                            let gap = ci.distance(cj) - (mi.ratio() + mj.ratio()) * self.hull_radius;
                            min_gap = min_gap.min(gap);
                        }
                    }
                }
            }
            best = best.max(min_gap);
            let total: usize = branches.iter().map(Vec::len).sum();
            if depth == max_depth || total * n > SSC_CYLINDER_BUDGET {
                break;
            }
            branches = branches
                .iter()
                .map(|balls| {
                    balls
                        .iter()
                        .flat_map(|(m, _)| {
                            self.maps.iter().map(move |s| {
                                let child = m.compose(s);
                                let c = child.apply(&self.hull_center).expect("dimension checked");
                                (child, c)
                            })
                        })
                        .collect()
                })
                .collect();
        }
        if best > 0.0 {
            SscStatus::Certified { delta: best }
        } else {
            SscStatus::Unknown { min_gap: best }
        }
    }

    fn check_word(&self, word: &[usize]) -> Result<()> {
        match word.iter().find(|&&i| i >= self.maps.len()) {
            Some(i) => invalid(format!("digit {i} out of range for {} maps", self.maps.len())),
            None => Ok(()),
        }
    }

    fn word_map(&self, word: &[usize]) -> SimilarityMap {
        word.iter().fold(SimilarityMap::identity(self.dim()), |acc, &i| acc.compose(&self.maps[i]))
    }

    pub fn cylinder(&self, word: &[usize]) -> Result<Cylinder> {
        self.check_word(word)?;
        let map = self.word_map(word);
        let mass = if word.len() > 40 {
            word.iter().map(|&i| self.probs[i].ln()).sum::<f64>().exp()
        } else {
            word.iter().map(|&i| self.probs[i]).product()
        };
        Ok(Cylinder {
            word: word.to_vec(),
            mass,
            ratio: map.ratio(),
            center: map.apply(&self.hull_center)?,
            radius: map.ratio() * self.hull_radius,
        })
    }

    /// Exact rational mass of a cylinder when the probabilities were given exactly.
    pub fn cylinder_mass_exact(&self, word: &[usize]) -> Result<Option<BigRational>> {
        self.check_word(word)?;
        Ok(self.exact_probs.as_ref().map(|ps| word.iter().fold(BigRational::one(), |acc, &i| acc * &ps[i])))
    }

    /// `pi(preperiod · period period ...)`, computed as the image of the
    /// fixed point of the period map under the preperiod maps.
    pub fn point_from_code(&self, preperiod: &[usize], period: &[usize]) -> Result<Point> {
        if period.is_empty() {
            return invalid("period must be nonempty");
        }
        self.check_word(preperiod)?;
        self.check_word(period)?;
        let periodic = fixed_point(&self.word_map(period))?;
        self.word_map(preperiod).apply(&periodic)
    }

    /// The digit maximizing `log p_i / log c_i` (first on ties).
    pub fn extremal_digit(&self) -> usize {
        let mut best = 0;
        for i in 1..self.maps.len() {
            if self.exponent(i) > self.exponent(best) {
                best = i;
            }
        }
        best
    }

    fn exponent(&self, i: usize) -> f64 {
        self.probs[i].ln() / self.maps[i].ratio().ln()
    }

    pub fn dim_reg_formula(&self) -> Result<f64> {
        match self.ssc {
            SscStatus::Certified { .. } => Ok(self.exponent(self.extremal_digit())),
            other => {
                Err(Error::Precondition(format!("closed form needs a certified strong separation condition (status: {other:?})")))
            }
        }
    }

    /// Encloses `mu(B(x, r))` by refining cylinders whose bounding balls
    /// straddle the sphere, largest mass first, until the undecided mass is
    /// at most `tol` times the upper bound.
    ///
    /// The subdivision identity holds for every system; separation only
    /// governs how quickly undecided mass vanishes. Systems with a proven
    /// overlap are refused.
    pub fn ball_mass(&self, x: &Point, r: f64, tol: f64) -> Result<MassInterval> {
        if self.ssc == SscStatus::Violated {
            return Err(Error::Precondition("first-level pieces overlap; ball masses are not certified".into()));
        }
        if x.dim() != self.dim() {
            return invalid(format!("point has dimension {} but system lives in R^{}", x.dim(), self.dim()));
        }
        if !(r > 0.0) {
            return invalid(format!("radius must be positive, got {r}"));
        }
        let d0 = x.distance(&self.hull_center);
        match classify(d0, self.hull_radius, r) {
            Side::Inside => return Ok(MassInterval::ONE),
            Side::Outside => return Ok(MassInterval::ZERO),
            Side::Straddle => {}
        }

        let min_radius = self.hull_radius * MIN_RELATIVE_RADIUS;
        let mut heap = BinaryHeap::new();
        heap.push(Node { map: SimilarityMap::identity(self.dim()), mass: 1.0 });
        let mut lo = 0.0;
        let mut pending = 1.0;
        let mut retired = 0.0;
        let mut expansions = 0;
        while let Some(node) = heap.pop() {
            if pending <= tol * (lo + pending + retired) || expansions >= MAX_EXPANSIONS {
                heap.push(node);
                break;
            }
            pending -= node.mass;
            if node.map.ratio() * self.hull_radius < min_radius {
                retired += node.mass;
                continue;
            }
            expansions += 1;
            for (s, &p) in self.maps.iter().zip(&self.probs) {
                let child = node.map.compose(s);
                let mass = node.mass * p;
                let c = Point::from_vector(&child.apply_vector(&self.hull_center.to_vector()));
                match classify(c.distance(x), child.ratio() * self.hull_radius, r) {
                    Side::Inside => lo += mass,
                    Side::Outside => {}
                    Side::Straddle => {
                        pending += mass;
                        heap.push(Node { map: child, mass });
                    }
                }
            }
        }
        let undecided: f64 = heap.iter().map(|n| n.mass).sum::<f64>() + retired;
        let hi = (lo + undecided) * (1.0 + SUM_SLACK);
        Ok(MassInterval::new(lo * (1.0 - SUM_SLACK), hi.min(1.0)))
    }
}

enum Side {
    Inside,
    Outside,
    Straddle,
}

/// Position of a closed bounding ball (distance `dist` from the query
/// center, radius `rho`) relative to the open query ball of radius `r`.
fn classify(dist: f64, rho: f64, r: f64) -> Side {
    if dist + rho < r {
        Side::Inside
    } else if dist - rho >= r {
        Side::Outside
    } else {
        Side::Straddle
    }
}

struct Node {
    map: SimilarityMap,
    mass: f64,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.mass.total_cmp(&other.mass) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.mass.total_cmp(&other.mass)
    }
}

pub fn build_selfsimilar(maps: Vec<SimilarityMap>, probs: &[f64]) -> Result<SelfSimilarSystem> {
    SelfSimilarSystem::new(maps, probs)
}

pub fn check_ssc(system: &SelfSimilarSystem, max_depth: usize) -> SscStatus {
    system.check_ssc(max_depth)
}

pub fn ball_mass_ss(system: &SelfSimilarSystem, x: &Point, r: f64, tol: f64) -> Result<MassInterval> {
    system.ball_mass(x, r, tol)
}

pub fn dim_reg_formula_ss(system: &SelfSimilarSystem) -> Result<f64> {
    system.dim_reg_formula()
}

pub fn point_from_code(system: &SelfSimilarSystem, preperiod: &[usize], period: &[usize]) -> Result<Point> {
    system.point_from_code(preperiod, period)
}

impl MeasureModel for SelfSimilarSystem {
    type Site = Point;

    fn ambient_dim(&self) -> usize {
        self.dim()
    }

    fn ball_mass(&self, site: &Point, radius: f64, tol: f64) -> Result<MassInterval> {
        SelfSimilarSystem::ball_mass(self, site, radius, tol)
    }

    /// One support point per cylinder of diameter at most `scale`.
    fn support_net(&self, scale: f64) -> Vec<Point> {
        let anchor = &self.fixed_points[0];
        let mut out = Vec::new();
        let mut stack = vec![SimilarityMap::identity(self.dim())];
        while let Some(m) = stack.pop() {
            if 2.0 * m.ratio() * self.hull_radius <= scale {
                out.push(m.apply(anchor).expect("dimension checked"));
            } else {
                // reverse so that the output follows lexicographic word order
                stack.extend(self.maps.iter().rev().map(|s| m.compose(s)));
            }
        }
        out
    }

    /// Fixed points of every map (the extremal one first) and the points
    /// `pi(i j j j ...)` for `i != j`.
    fn witnesses(&self) -> Vec<Point> {
        let e = self.extremal_digit();
        let mut out = vec![self.fixed_points[e].clone()];
        out.extend(self.fixed_points.iter().enumerate().filter(|(i, _)| *i != e).map(|(_, p)| p.clone()));
        for i in 0..self.len() {
            for j in 0..self.len() {
                if i != j {
                    out.push(self.maps[i].apply(&self.fixed_points[j]).expect("dimension checked"));
                }
            }
        }
        out
    }

    fn position(&self, site: &Point) -> Point {
        site.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cantor(p: f64) -> SelfSimilarSystem {
        let maps = vec![
            SimilarityMap::scaling(1.0 / 3.0, Point::scalar(0.0)).unwrap(),
            SimilarityMap::scaling(1.0 / 3.0, Point::scalar(2.0 / 3.0)).unwrap(),
        ];
        SelfSimilarSystem::new(maps, &[p, 1.0 - p]).unwrap().with_ssc_check(8)
    }

    fn halves() -> SelfSimilarSystem {
        let maps = vec![
            SimilarityMap::scaling(0.5, Point::scalar(0.0)).unwrap(),
            SimilarityMap::scaling(0.5, Point::scalar(0.5)).unwrap(),
        ];
        SelfSimilarSystem::new(maps, &[0.5, 0.5]).unwrap().with_ssc_check(8)
    }

    #[test]
    fn cantor_hull_covers_unit_interval() {
        let s = cantor(0.5);
        let (c, r) = s.hull();
        assert!(c.coords()[0] - r <= 0.0 && c.coords()[0] + r >= 1.0);
        for m in s.maps() {
            let img = m.apply(c).unwrap();
            assert!(img.distance(c) + m.ratio() * r <= r + 1e-12);
        }
    }

    #[test]
    fn probabilities_must_sum_to_one() {
        let maps = vec![
            SimilarityMap::scaling(0.5, Point::scalar(0.0)).unwrap(),
            SimilarityMap::scaling(0.5, Point::scalar(0.5)).unwrap(),
        ];
        assert!(matches!(SelfSimilarSystem::new(maps, &[0.7, 0.4]), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn ratios_must_contract() {
        let maps = vec![SimilarityMap::scaling(1.0, Point::scalar(0.0)).unwrap()];
        assert!(SelfSimilarSystem::new(maps, &[1.0]).is_err());
    }

    #[test]
    fn cantor_is_separated_by_a_third() {
        match cantor(0.5).ssc_status() {
            SscStatus::Certified { delta } => assert!((1.0 / 3.0 - 1e-6..=1.0 / 3.0).contains(&delta)),
            other => panic!("expected certification, got {other:?}"),
        }
    }

    #[test]
    fn touching_halves_stay_unknown() {
        match halves().ssc_status() {
            SscStatus::Unknown { min_gap } => assert!(min_gap <= 0.0 && min_gap > -1e-6),
            other => panic!("expected unknown, got {other:?}"),
        }
    }

    #[test]
    fn shared_fixed_point_is_violation() {
        let maps = vec![
            SimilarityMap::scaling(0.5, Point::scalar(0.0)).unwrap(),
            SimilarityMap::scaling(0.25, Point::scalar(0.0)).unwrap(),
        ];
        let s = SelfSimilarSystem::new(maps, &[0.5, 0.5]).unwrap();
        assert_eq!(s.check_ssc(4), SscStatus::Violated);
    }

    #[test]
    fn planar_triangle_separation() {
        let side = 1.0;
        let verts = [[0.0, 0.0], [side, 0.0], [0.5 * side, 0.75f64.sqrt() * side]];
        let maps = verts.iter().map(|v| SimilarityMap::planar(0.25, 0.0, [0.75 * v[0], 0.75 * v[1]]).unwrap()).collect();
        let s = SelfSimilarSystem::new(maps, &[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]).unwrap();
        match s.check_ssc(6) {
            SscStatus::Certified { delta } => assert!(delta >= side * (0.5 - 1e-2) && delta <= 0.5 * side + 1e-12),
            other => panic!("expected certification, got {other:?}"),
        }
    }

    #[test]
    fn codes_map_to_expected_points() {
        let s = cantor(0.5);
        let at = |pre: &[usize], per: &[usize]| s.point_from_code(pre, per).unwrap().coords()[0];
        assert!(at(&[], &[0]).abs() < 1e-15);
        assert!((at(&[], &[1]) - 1.0).abs() < 1e-15);
        assert!((at(&[0], &[1]) - 1.0 / 3.0).abs() < 1e-15);
        assert!(s.point_from_code(&[2], &[0]).is_err());
        assert!(s.point_from_code(&[0], &[]).is_err());
    }

    #[test]
    fn ball_captures_single_cylinder() {
        let s = cantor(0.5);
        for k in 1..8 {
            let r = 3f64.powi(-k) + 3f64.powi(-k - 2);
            let m = s.ball_mass(&Point::scalar(0.0), r, 1e-9).unwrap();
            let want = 0.5f64.powi(k);
            assert!(m.lo <= want && want <= m.hi, "k={k}: {m:?}");
            assert!(m.width() <= 1e-9 * m.hi + 1e-15);
        }
    }

    #[test]
    fn huge_ball_is_everything_and_far_ball_is_nothing() {
        let s = cantor(0.7);
        assert_eq!(s.ball_mass(&Point::scalar(0.5), 5.0, 1e-6).unwrap(), MassInterval::ONE);
        assert_eq!(s.ball_mass(&Point::scalar(3.0), 1.0, 1e-6).unwrap(), MassInterval::ZERO);
    }

    #[test]
    fn width_contract_holds() {
        let s = cantor(0.7);
        for &(x, r) in &[(0.2, 0.05), (1.0, 0.01), (0.5, 0.3), (0.7, 0.001)] {
            for tol in [1e-3, 1e-6, 1e-9] {
                let m = s.ball_mass(&Point::scalar(x), r, tol).unwrap();
                assert!(m.width() <= tol * m.hi + tol, "x={x} r={r} tol={tol}: {m:?}");
            }
        }
    }

    #[test]
    fn overlapping_halves_give_lebesgue() {
        let s = halves();
        let m = s.ball_mass(&Point::scalar(0.3), 0.1, 1e-8).unwrap();
        assert!(m.contains(0.2));
        assert!(m.width() <= 1e-8);
    }

    #[test]
    fn formula_values() {
        assert!((cantor(0.5).dim_reg_formula().unwrap() - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
        assert!((cantor(0.7).dim_reg_formula().unwrap() - 0.3f64.ln() / (1.0f64 / 3.0).ln()).abs() < 1e-12);
        assert!(matches!(halves().dim_reg_formula(), Err(Error::Precondition(_))));
    }

    #[test]
    fn exact_cylinder_masses() {
        let maps = vec![
            SimilarityMap::scaling(1.0 / 3.0, Point::scalar(0.0)).unwrap(),
            SimilarityMap::scaling(1.0 / 3.0, Point::scalar(2.0 / 3.0)).unwrap(),
        ];
        let probs: Vec<Number> = ["7/10", "3/10"].iter().map(|s| s.parse().unwrap()).collect();
        let s = SelfSimilarSystem::from_numbers(maps, &probs).unwrap();
        let q = s.cylinder_mass_exact(&[0, 1, 1]).unwrap().unwrap();
        assert_eq!(q, BigRational::new(63.into(), 1000.into()));
        assert!((s.cylinder(&[0, 1, 1]).unwrap().mass - 0.063).abs() < 1e-15);
    }

    #[test]
    fn net_covers_witnesses() {
        let s = cantor(0.7);
        let scale = 1.01 * 3f64.powi(-5);
        let net = s.support_net(scale);
        assert_eq!(net.len(), 32);
        for w in s.witnesses() {
            assert!(net.iter().any(|p| p.distance(&w) <= scale));
        }
    }
}
