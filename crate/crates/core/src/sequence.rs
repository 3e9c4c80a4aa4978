//! Weighted point masses `mu = (1 / sum p(n)) sum_n p(n) delta_{x_n}` on a
//! sequence `x_n` decreasing to 0.
//!
//! Ball masses are sums of weights over an index range. Index ranges come
//! from closed-form inverses of `x_n`, tails from exact geometric sums or
//! convexity bounds on the weight integral, so every mass is an honest
//! interval.

use std::fmt;

use crate::error::{invalid, Result};
use crate::geometry::Point;
use crate::grid::ScaleGrid;
use crate::interval::{LogMass, MassInterval};
use crate::model::MeasureModel;

/// Default number of weights summed explicitly.
pub const DEFAULT_N_MAX: u64 = 1_000_000;
/// Index ranges shorter than this are summed term by term.
const DIRECT_SUM_LIMIT: u64 = 4096;
/// Relative padding on floating-point sums.
const SUM_SLACK: f64 = 1e-12;
/// Indices beyond this are outside the exactly representable range.
const MAX_INDEX: f64 = 4.0e15;

/// Decay law of the points or of the weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    /// `n^(-a)`
    Poly(f64),
    /// `a^n`
    Exp(f64),
}

impl Decay {
    pub fn value(&self, n: u64) -> f64 {
        match *self {
            Decay::Poly(a) => (n as f64).powf(-a),
            Decay::Exp(a) => exp_pow(a, n),
        }
    }

    pub fn ln_value(&self, n: u64) -> f64 {
        match *self {
            Decay::Poly(a) => -a * (n as f64).ln(),
            Decay::Exp(a) => n as f64 * a.ln(),
        }
    }

    /// Real `t` with `value(t) = y`, for `y` in `(0, 1]`.
    fn inverse(&self, y: f64) -> f64 {
        match *self {
            Decay::Poly(a) => y.powf(-1.0 / a),
            Decay::Exp(a) => y.ln() / a.ln(),
        }
    }
}

fn exp_pow(a: f64, n: u64) -> f64 {
    if n <= i32::MAX as u64 {
        a.powi(n as i32)
    } else {
        (n as f64 * a.ln()).exp()
    }
}

impl fmt::Display for Decay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decay::Poly(a) => write!(f, "poly({a})"),
            Decay::Exp(a) => write!(f, "exp({a})"),
        }
    }
}

/// A dimension value that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dimension {
    Finite(f64),
    Infinite,
}

impl Dimension {
    pub fn is_finite(&self) -> bool {
        matches!(self, Dimension::Finite(_))
    }

    /// The value as `f64`, `f64::INFINITY` for the infinite case.
    pub fn as_f64(&self) -> f64 {
        match self {
            Dimension::Finite(v) => *v,
            Dimension::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dimension::Finite(v) => write!(f, "{v}"),
            Dimension::Infinite => f.write_str("inf"),
        }
    }
}

/// Upper end of an index range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpperIndex {
    Finite(u64),
    /// The ball reaches the accumulation point.
    Infinite,
}

/// `(k_over, k_under)`: the atoms in the open ball `B(x, r)` are exactly
/// `x_n` for `k_under <= n <= k_over`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexBounds {
    pub k_over: UpperIndex,
    pub k_under: u64,
}

impl IndexBounds {
    pub fn is_empty(&self) -> bool {
        matches!(self.k_over, UpperIndex::Finite(k) if k < self.k_under)
    }
}

/// Lower bound on the ratio at a doubling-violation witness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoublingWitness {
    pub radius: f64,
    pub center: f64,
    /// Certified lower bound on `ln(mu(B(center, R)) / mu(B(center, R/2)))`.
    pub log_ratio: f64,
}

impl DoublingWitness {
    pub fn ratio(&self) -> f64 {
        self.log_ratio.exp()
    }
}

#[derive(Debug, Clone)]
pub struct SequenceMeasure {
    points: Decay,
    weights: Decay,
    n_max: u64,
    /// `suffix[k] = sum_{n=k}^{n_max} p(n)` for `1 <= k <= n_max + 1`,
    /// only for polynomial weights.
    suffix: Vec<f64>,
    /// Bracket on `ln sum_{n>=1} p(n)`.
    ln_norm: (f64, f64),
}

impl SequenceMeasure {
    pub fn new(points: Decay, weights: Decay, n_max: u64) -> Result<Self> {
        match points {
            Decay::Poly(l) if !(l > 0.0 && l.is_finite()) => return invalid(format!("point exponent {l} must be positive")),
            Decay::Exp(l) if !(l > 0.0 && l < 1.0) => return invalid(format!("point ratio {l} must lie in (0,1)")),
            _ => {}
        }
        match weights {
            Decay::Poly(w) if !(w > 1.0 && w.is_finite()) => {
                return invalid(format!("weight exponent {w} must exceed 1 for a summable sequence"))
            }
            Decay::Exp(w) if !(w > 0.0 && w < 1.0) => return invalid(format!("weight ratio {w} must lie in (0,1)")),
            _ => {}
        }
        if n_max < 1000 {
            return invalid(format!("n_max = {n_max} is below the minimum 1000"));
        }
        let suffix = match weights {
            Decay::Poly(_) => {
                let mut suffix = vec![0.0; n_max as usize + 2];
                // compensated summation from the small end
                let (mut s, mut c) = (0.0f64, 0.0f64);
                for k in (1..=n_max).rev() {
                    let term = weights.value(k);
                    let t = s + term;
                    c += if s.abs() >= term.abs() { (s - t) + term } else { (term - t) + s };
                    s = t;
                    suffix[k as usize] = s + c;
                }
                suffix
            }
            Decay::Exp(_) => Vec::new(),
        };
        let mut m = SequenceMeasure { points, weights, n_max, suffix, ln_norm: (0.0, 0.0) };
        m.ln_norm = m.ln_range_sum(1, UpperIndex::Infinite);
        Ok(m)
    }

    pub fn points(&self) -> Decay {
        self.points
    }

    pub fn weights(&self) -> Decay {
        self.weights
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    pub fn x(&self, n: u64) -> f64 {
        self.points.value(n)
    }

    pub fn p(&self, n: u64) -> f64 {
        self.weights.value(n)
    }

    /// Interval for `sum_{n>=1} p(n)`.
    pub fn normalizer(&self) -> MassInterval {
        MassInterval::new(self.ln_norm.0.exp().next_down(), self.ln_norm.1.exp().next_up())
    }

    /// Finite bound on `p(n) / p(n+1)`.
    pub fn alpha(&self) -> f64 {
        match self.weights {
            Decay::Poly(w) => 2f64.powf(w),
            Decay::Exp(w) => 1.0 / w,
        }
    }

    fn in_ball(&self, n: u64, x: f64, r: f64) -> bool {
        (self.x(n) - x).abs() < r
    }

    pub fn index_bounds(&self, x: f64, r: f64) -> Result<IndexBounds> {
        match self.index_bounds_capped(x, r)? {
            (ib, false) => Ok(ib),
            (_, true) => invalid(format!("ball B({x}, {r}) reaches indices beyond the supported range")),
        }
    }

    /// As [`Self::index_bounds`], except that a ball reaching within a few
    /// ulps of 0 from above gets `k_over` replaced by a lower bound, flagged
    /// by the second component.
    fn index_bounds_capped(&self, x: f64, r: f64) -> Result<(IndexBounds, bool)> {
        if !(r > 0.0) {
            return invalid(format!("radius must be positive, got {r}"));
        }
        // smallest n with x_n < x + r, i.e. inside the ball or below x
        let below_top = |n: u64| self.x(n) < x || self.in_ball(n, x, r);
        let top = x + r;
        let mut k_under = if top >= 1.0 { 1 } else { self.index_estimate(top)?.max(1) };
        while k_under > 1 && below_top(k_under - 1) {
            k_under -= 1;
        }
        while !below_top(k_under) {
            k_under += 1;
        }
        if x - r <= 0.0 {
            return Ok((IndexBounds { k_over: UpperIndex::Infinite, k_under }, false));
        }
        // largest n with x_n > x - r, i.e. inside the ball or above x
        let above_bottom = |n: u64| self.x(n) > x || self.in_ball(n, x, r);
        let bottom = x - r;
        if !(self.points.inverse(bottom) < MAX_INDEX) {
            // every atom up to index MAX_INDEX / 2 is certainly inside
            let cap = (MAX_INDEX / 2.0) as u64;
            return Ok((IndexBounds { k_over: UpperIndex::Finite(cap.max(k_under)), k_under }, true));
        }
        let mut k_over = if bottom >= 1.0 { 0 } else { self.index_estimate(bottom)? };
        while k_over >= 1 && !above_bottom(k_over) {
            k_over -= 1;
        }
        while above_bottom(k_over + 1) {
            k_over += 1;
        }
        Ok((IndexBounds { k_over: UpperIndex::Finite(k_over), k_under }, false))
    }

    fn index_estimate(&self, y: f64) -> Result<u64> {
        let t = self.points.inverse(y);
        if !(t < MAX_INDEX) {
            return invalid(format!("radius too small: index {t:e} exceeds the supported range"));
        }
        Ok(t.floor().max(0.0) as u64)
    }

    /// Bracket on `ln sum_{n=a}^{b} p(n)` (`-inf` for an empty range).
    fn ln_range_sum(&self, a: u64, b: UpperIndex) -> (f64, f64) {
        let a = a.max(1);
        if let UpperIndex::Finite(b) = b {
            if b < a {
                return (f64::NEG_INFINITY, f64::NEG_INFINITY);
            }
        }
        match self.weights {
            Decay::Exp(w) => {
                // w^a (1 - w^(b-a+1)) / (1 - w)
                let mut ln = a as f64 * w.ln() - (-w).ln_1p();
                if let UpperIndex::Finite(b) = b {
                    let m = (b - a + 1) as f64;
                    ln += (-(m * w.ln()).exp()).ln_1p();
                }
                let pad = 8.0 * f64::EPSILON * (1.0 + ln.abs());
                (ln - pad, ln + pad)
            }
            Decay::Poly(w) => {
                let (lo, hi) = self.poly_range_sum(w, a, b);
                (lo.ln(), hi.ln())
            }
        }
    }

    fn poly_range_sum(&self, w: f64, a: u64, b: UpperIndex) -> (f64, f64) {
        let f = |n: f64| n.powf(-w);
        // integral of x^-w over [u, v] (v may be infinite), cancellation-free
        let integral = |u: f64, v: Option<f64>| -> f64 {
            let head = u.powf(1.0 - w) / (w - 1.0);
            match v {
                None => head,
                Some(v) => -head * ((1.0 - w) * ((v - u) / u).ln_1p()).exp_m1(),
            }
        };
        let mut lo = 0.0;
        let mut hi = 0.0;
        // explicit part inside the cached range
        if a <= self.n_max {
            let end = match b {
                UpperIndex::Finite(b) => b.min(self.n_max),
                UpperIndex::Infinite => self.n_max,
            };
            let s = if end - a < DIRECT_SUM_LIMIT {
                (a..=end).rev().map(|n| self.weights.value(n)).sum::<f64>()
            } else {
                self.suffix[a as usize] - self.suffix[end as usize + 1]
            };
            lo += s * (1.0 - SUM_SLACK);
            hi += s * (1.0 + SUM_SLACK);
        }
        // analytic part beyond the cache
        let start = a.max(self.n_max + 1);
        let beyond = match b {
            UpperIndex::Finite(b) => b >= start,
            UpperIndex::Infinite => true,
        };
        if beyond {
            let u = start as f64;
            let (l, h) = match b {
                UpperIndex::Finite(b) if b - start < DIRECT_SUM_LIMIT => {
                    let s: f64 = (start..=b).rev().map(|n| self.weights.value(n)).sum();
                    (s, s)
                }
                UpperIndex::Finite(b) => {
                    let v = b as f64;
                    // convexity: trapezoid below, midpoint above
                    (integral(u, Some(v)) + 0.5 * (f(u) + f(v)), integral(u - 0.5, Some(v + 0.5)))
                }
                UpperIndex::Infinite => (integral(u, None) + 0.5 * f(u), integral(u - 0.5, None)),
            };
            lo += l * (1.0 - SUM_SLACK);
            hi += h * (1.0 + SUM_SLACK);
        }
        (lo, hi)
    }

    /// Log-mass of the open ball `B(x, r)`. The nominal value is the
    /// geometric midpoint of the bracket.
    pub fn log_ball_mass(&self, x: f64, r: f64) -> Result<LogMass> {
        let (ib, capped) = self.index_bounds_capped(x, r)?;
        if ib.is_empty() {
            return Ok(LogMass::exact(f64::NEG_INFINITY));
        }
        let (slo, mut shi) = self.ln_range_sum(ib.k_under, ib.k_over);
        if capped {
            shi = self.ln_range_sum(ib.k_under, UpperIndex::Infinite).1;
        }
        let lo = slo - self.ln_norm.1;
        let hi = (shi - self.ln_norm.0).min(0.0);
        let lo = lo.min(hi);
        Ok(LogMass { lo, mid: 0.5 * (lo + hi), hi })
    }

    pub fn ball_mass(&self, x: f64, r: f64) -> Result<MassInterval> {
        let m = self.log_ball_mass(x, r)?;
        let lo = if m.lo == m.hi { m.lo.exp() } else { m.lo.exp().next_down() };
        let hi = if m.lo == m.hi { m.hi.exp() } else { m.hi.exp().next_up() };
        Ok(MassInterval::new(lo, hi).clamp_to_unit())
    }

    pub fn dim_reg_formula(&self) -> Dimension {
        match (self.points, self.weights) {
            (Decay::Poly(l), Decay::Poly(w)) => Dimension::Finite(f64::max(1.0, (w - 1.0) / l)),
            (Decay::Exp(l), Decay::Exp(w)) => Dimension::Finite(w.ln() / l.ln()),
            _ => Dimension::Infinite,
        }
    }

    /// Local dimension at the accumulation point 0 (atoms have local
    /// dimension 0).
    pub fn local_dim_at_zero(&self) -> f64 {
        match (self.points, self.weights) {
            (Decay::Poly(l), Decay::Poly(w)) => (w - 1.0) / l,
            (Decay::Exp(l), Decay::Exp(w)) => w.ln() / l.ln(),
            (Decay::Poly(_), Decay::Exp(_)) => f64::INFINITY,
            (Decay::Exp(_), Decay::Poly(_)) => 0.0,
        }
    }

    /// Certified lower bounds on `mu(B(x,R)) / mu(B(x,R/2))` at the
    /// non-doubling witnesses of the mixed regimes: `x = 0` for polynomial
    /// points with exponential weights, and `x` the atom nearest `R` for
    /// exponential points with polynomial weights.
    pub fn doubling_violation_witness(&self, radii: &[f64]) -> Result<Vec<DoublingWitness>> {
        let at_zero = match (self.points, self.weights) {
            (Decay::Poly(_), Decay::Exp(_)) => true,
            (Decay::Exp(_), Decay::Poly(_)) => false,
            _ => return invalid("doubling violation witnesses exist only for mixed decay regimes"),
        };
        radii
            .iter()
            .map(|&big_r| {
                let center = if at_zero { 0.0 } else { self.x(self.nearest_atom(big_r)?) };
                let outer = self.log_ball_mass(center, big_r)?;
                let inner = self.log_ball_mass(center, big_r / 2.0)?;
                Ok(DoublingWitness { radius: big_r, center, log_ratio: outer.lo - inner.hi })
            })
            .collect()
    }

    /// Index of the atom closest to `y` (ties to the larger atom).
    pub fn nearest_atom(&self, y: f64) -> Result<u64> {
        if y >= 1.0 {
            return Ok(1);
        }
        let mut n = self.index_estimate(y)?.max(1);
        while self.x(n) < y && n > 1 {
            n -= 1;
        }
        while self.x(n + 1) >= y {
            n += 1;
        }
        // x_{n+1} < y <= x_n
        Ok(if (self.x(n) - y) <= (y - self.x(n + 1)) { n } else { n + 1 })
    }

    /// Atoms next to each grid radius: centers `x ≈ R` where the ball
    /// `B(x, R)` reaches the accumulation point.
    pub fn grid_sites(&self, grid: &ScaleGrid) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for r in grid.radii() {
            if let Ok(n) = self.nearest_atom(r) {
                for m in [n.saturating_sub(1).max(1), n, n + 1] {
                    let x = self.x(m);
                    if !out.contains(&x) {
                        out.push(x);
                    }
                }
            }
        }
        out
    }

    /// `0, x_1, x_2, x_5, x_20, x_100`.
    pub fn witness_points(&self) -> Vec<f64> {
        let mut out = vec![0.0];
        out.extend([1, 2, 5, 20, 100].iter().map(|&n| self.x(n)));
        out
    }

    /// `{0}`, every atom down to where consecutive gaps drop below `scale`,
    /// then one atom per `scale`-bucket.
    pub fn net_points(&self, scale: f64) -> Vec<f64> {
        let mut out = vec![0.0];
        if !(scale > 0.0) {
            return out;
        }
        let mut n = 1;
        while self.x(n) >= scale && self.x(n) - self.x(n + 1) >= scale {
            out.push(self.x(n));
            n += 1;
        }
        if self.x(n) < scale {
            return out;
        }
        // below here gaps are smaller than `scale`: one atom per bucket
        let mut top = self.x(n);
        out.push(top);
        while top >= 2.0 * scale {
            let target = top - scale;
            match self.nearest_atom(target) {
                Ok(m) => {
                    let x = self.x(m);
                    if x < top {
                        out.push(x);
                        top = x;
                    } else {
                        top = target;
                    }
                }
                Err(_) => break,
            }
        }
        out
    }
}

pub fn build_sequence_measure(points: Decay, weights: Decay, n_max: u64) -> Result<SequenceMeasure> {
    SequenceMeasure::new(points, weights, n_max)
}

pub fn index_bounds(m: &SequenceMeasure, x: f64, r: f64) -> Result<IndexBounds> {
    m.index_bounds(x, r)
}

pub fn ball_mass_seq(m: &SequenceMeasure, x: f64, r: f64) -> Result<MassInterval> {
    m.ball_mass(x, r)
}

pub fn dim_reg_formula_seq(m: &SequenceMeasure) -> Dimension {
    m.dim_reg_formula()
}

pub fn doubling_violation_witness(m: &SequenceMeasure, radii: &[f64]) -> Result<Vec<DoublingWitness>> {
    m.doubling_violation_witness(radii)
}

impl MeasureModel for SequenceMeasure {
    type Site = f64;

    fn ambient_dim(&self) -> usize {
        1
    }

    fn ball_mass(&self, site: &f64, radius: f64, _tol: f64) -> Result<MassInterval> {
        SequenceMeasure::ball_mass(self, *site, radius)
    }

    fn log_ball_mass(&self, site: &f64, radius: f64, _tol: f64) -> Result<LogMass> {
        SequenceMeasure::log_ball_mass(self, *site, radius)
    }

    fn support_net(&self, scale: f64) -> Vec<f64> {
        self.net_points(scale)
    }

    fn witnesses(&self) -> Vec<f64> {
        self.witness_points()
    }

    fn position(&self, site: &f64) -> Point {
        Point::scalar(*site)
    }
}
