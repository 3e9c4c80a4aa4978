//! Self-affine measures on Bedford–McMullen sponges.
//!
//! A sponge in `[0,1]^d` is generated by the maps
//! `S_i(x) = ((x_1 + i_1)/n_1, ..., (x_d + i_d)/n_d)` for digits `i` in a
//! set `I`, with `n_1 < ... < n_d`. Points are handled as symbolic codes;
//! ball masses are sandwiched between masses of approximate cubes, which
//! are explicit products of conditional digit probabilities.

mod carpet;
mod code;
mod depth;

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{invalid, Error, Result};
use crate::geometry::Point;
use crate::grid::ScaleGrid;
use crate::interval::{LogMass, MassInterval};
use crate::model::MeasureModel;
use crate::rational::{exact_sum, ratio_to_f64, Number};

pub use carpet::{badcarpet_family, epsilon_carpet, epsilon_carpet_exact, local_phase_crossing, CarpetDimensions};
pub use code::SymbolicPoint;
pub use depth::{axis_depth, DepthVector};

const PROB_SUM_TOL: f64 = 1e-12;
/// Number of base-`n` digits summed when resolving a code to coordinates.
const POSITION_DIGITS: usize = 64;

#[derive(Debug, Clone)]
pub struct SpongeSystem {
    bases: Vec<u32>,
    /// Digits in lexicographic order; sites refer to them by index.
    digits: Vec<Vec<u32>>,
    probs: Vec<f64>,
    exact_probs: Option<Vec<BigRational>>,
    /// `cond[i][l]` is `p(i_l | i_1, ..., i_{l-1})`.
    cond: Vec<Vec<f64>>,
    ln_cond: Vec<Vec<f64>>,
    cond_exact: Option<Vec<Vec<BigRational>>>,
    vssc: bool,
}

impl SpongeSystem {
    pub fn new(bases: Vec<u32>, digits: Vec<Vec<u32>>, probs: &[f64]) -> Result<Self> {
        Self::build(bases, digits, probs.to_vec(), None)
    }

    /// Builds a system whose probabilities are kept as exact rationals.
    pub fn from_numbers(bases: Vec<u32>, digits: Vec<Vec<u32>>, probs: &[Number]) -> Result<Self> {
        let sum = exact_sum(probs);
        if !sum.is_one() {
            let s = ratio_to_f64(&sum);
            if (s - 1.0).abs() > PROB_SUM_TOL {
                return invalid(format!("probabilities sum to {s}, not 1"));
            }
        }
        let exact = probs.iter().map(|p| p.exact().clone()).collect();
        let values = probs.iter().map(Number::value).collect();
        Self::build(bases, digits, values, Some(exact))
    }

    fn build(bases: Vec<u32>, digits: Vec<Vec<u32>>, probs: Vec<f64>, exact_probs: Option<Vec<BigRational>>) -> Result<Self> {
        let d = bases.len();
        if d < 2 {
            return invalid(format!("a sponge needs at least 2 axes, got {d}"));
        }
        if let Some(&n) = bases.iter().find(|&&n| n < 2) {
            return invalid(format!("base {n} must exceed 1"));
        }
        if bases.windows(2).any(|w| w[0] >= w[1]) {
            return invalid(format!("bases {bases:?} must be strictly increasing"));
        }
        if digits.is_empty() {
            return invalid("digit set is empty");
        }
        if digits.len() != probs.len() {
            return invalid(format!("{} digits but {} probabilities", digits.len(), probs.len()));
        }
        for digit in &digits {
            if digit.len() != d {
                return invalid(format!("digit {digit:?} has {} coordinates, expected {d}", digit.len()));
            }
            if let Some((l, &v)) = digit.iter().enumerate().find(|(l, &v)| v >= bases[*l]) {
                return invalid(format!("digit {digit:?}: coordinate {} is {v}, base is {}", l + 1, bases[l]));
            }
        }
        if let Some(i) = probs.iter().position(|&p| !(p > 0.0)) {
            return invalid(format!("probability {i} is {} (must be positive)", probs[i]));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return invalid(format!("probabilities sum to {total}, not 1"));
        }

        // sort digits lexicographically, carrying probabilities along
        let mut order: Vec<usize> = (0..digits.len()).collect();
        order.sort_by(|&a, &b| digits[a].cmp(&digits[b]));
        if order.windows(2).any(|w| digits[w[0]] == digits[w[1]]) {
            return invalid("digit set contains duplicates");
        }
        let digits: Vec<Vec<u32>> = order.iter().map(|&i| digits[i].clone()).collect();
        let probs: Vec<f64> = order.iter().map(|&i| probs[i]).collect();
        let exact_probs = exact_probs.map(|e| order.iter().map(|&i| e[i].clone()).collect::<Vec<_>>());

        let cond = conditionals(&digits, &probs, 0.0, |a, b| a / b);
        let ln_cond = cond.iter().map(|row| row.iter().map(|p| p.ln()).collect()).collect();
        let cond_exact = exact_probs.as_ref().map(|e| conditionals(&digits, e, BigRational::zero(), |a, b| a / b));

        let mut system = SpongeSystem { bases, digits, probs, exact_probs, cond, ln_cond, cond_exact, vssc: false };
        system.vssc = system.check_vssc();
        Ok(system)
    }

    pub fn dim(&self) -> usize {
        self.bases.len()
    }

    pub fn bases(&self) -> &[u32] {
        &self.bases
    }

    pub fn digits(&self) -> &[Vec<u32>] {
        &self.digits
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn exact_probs(&self) -> Option<&[BigRational]> {
        self.exact_probs.as_deref()
    }

    /// Index of a digit in the (sorted) digit list.
    pub fn digit_index(&self, digit: &[u32]) -> Option<usize> {
        self.digits.binary_search_by(|d| d.as_slice().cmp(digit)).ok()
    }

    /// `p_l(i)`: the conditional probability of the `l`-th coordinate of
    /// digit `i` given its first `l - 1` coordinates (`l` counted from 0).
    pub fn conditional(&self, digit: usize, axis: usize) -> f64 {
        self.cond[digit][axis]
    }

    pub fn conditional_exact(&self, digit: usize, axis: usize) -> Option<&BigRational> {
        self.cond_exact.as_ref().map(|c| &c[digit][axis])
    }

    /// `p(value | prefix)` where the prefix fixes the first coordinates.
    /// `None` when the extended prefix is not realized by any digit.
    pub fn conditional_of(&self, prefix: &[u32], value: u32) -> Option<f64> {
        let l = prefix.len();
        self.digits.iter().position(|d| l < d.len() && &d[..l] == prefix && d[l] == value).map(|i| self.cond[i][l])
    }

    /// Very strong separation: two digits that agree on the first `l - 1`
    /// coordinates and differ at the `l`-th differ there by more than 1.
    pub fn check_vssc(&self) -> bool {
        for (a, da) in self.digits.iter().enumerate() {
            for db in &self.digits[a + 1..] {
                let l = da.iter().zip(db).position(|(x, y)| x != y);
                if let Some(l) = l {
                    if da[l].abs_diff(db[l]) <= 1 {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn vssc(&self) -> bool {
        self.vssc
    }

    fn require_vssc(&self) -> Result<()> {
        if self.vssc {
            Ok(())
        } else {
            Err(Error::Precondition("digit set does not satisfy the very strong separation condition".into()))
        }
    }

    pub fn depth_vector(&self, r: f64) -> Result<DepthVector> {
        depth::depth_vector_for(&self.bases, r)
    }

    fn check_code(&self, omega: &SymbolicPoint) -> Result<()> {
        if omega.max_digit() >= self.digits.len() {
            return invalid(format!("code uses digit index {} but there are {} digits", omega.max_digit(), self.digits.len()));
        }
        Ok(())
    }

    /// `sum_{t=1}^{k} ln p_l(omega_t)` using the eventual periodicity.
    fn axis_log_sum(&self, omega: &SymbolicPoint, axis: usize, k: usize) -> f64 {
        let pre = omega.preperiod();
        let head = k.min(pre.len());
        let mut sum: f64 = pre[..head].iter().map(|&i| self.ln_cond[i][axis]).sum();
        if k > pre.len() {
            let period = omega.period();
            let m = k - pre.len();
            let cycles = m / period.len();
            let rem = m % period.len();
            if cycles > 0 {
                let per: f64 = period.iter().map(|&i| self.ln_cond[i][axis]).sum();
                sum += cycles as f64 * per;
            }
            sum += period[..rem].iter().map(|&i| self.ln_cond[i][axis]).sum::<f64>();
        }
        sum
    }

    fn log_cube_mass_at_depth(&self, omega: &SymbolicPoint, depth: &DepthVector) -> f64 {
        (0..self.dim()).map(|l| self.axis_log_sum(omega, l, depth.get(l) as usize)).sum()
    }

    /// Natural log of the mass of the approximate cube `Q(omega, r)`.
    pub fn log_approx_cube_mass(&self, omega: &SymbolicPoint, r: f64) -> Result<f64> {
        self.check_code(omega)?;
        let depth = self.depth_vector(r)?;
        Ok(self.log_cube_mass_at_depth(omega, &depth))
    }

    /// Mass of the approximate cube `Q(omega, r)`; underflows to 0 for very
    /// deep cubes, see [`SpongeSystem::log_approx_cube_mass`].
    pub fn approx_cube_mass(&self, omega: &SymbolicPoint, r: f64) -> Result<f64> {
        Ok(self.log_approx_cube_mass(omega, r)?.exp())
    }

    /// Exact rational cube mass, available when probabilities were given
    /// exactly.
    pub fn approx_cube_mass_exact(&self, omega: &SymbolicPoint, r: f64) -> Result<Option<BigRational>> {
        self.check_code(omega)?;
        let depth = self.depth_vector(r)?;
        Ok(self.cube_mass_exact_at_depth(omega, &depth))
    }

    pub fn cube_mass_exact_at_depth(&self, omega: &SymbolicPoint, depth: &DepthVector) -> Option<BigRational> {
        let cond = self.cond_exact.as_ref()?;
        let mut mass = BigRational::one();
        for l in 0..self.dim() {
            for t in 1..=depth.get(l) as usize {
                mass *= &cond[omega.digit(t)][l];
            }
        }
        Some(mass)
    }

    /// Ball-mass sandwich between the approximate cube inside the ball
    /// (radius `r / (n_1 (n_1 + ... + n_d))`) and the one containing it
    /// (radius `2 n_1 r`). The nominal value is the cube of radius `r`.
    pub fn log_ball_mass(&self, omega: &SymbolicPoint, r: f64) -> Result<LogMass> {
        self.require_vssc()?;
        self.check_code(omega)?;
        if !(r > 0.0) {
            return invalid(format!("radius must be positive, got {r}"));
        }
        let n1 = self.bases[0] as f64;
        let total: f64 = self.bases.iter().map(|&n| n as f64).sum();
        let cube = |rho: f64| -> Result<f64> {
            let depth = self.depth_vector(rho.min(1.0))?;
            Ok(self.log_cube_mass_at_depth(omega, &depth))
        };
        let lo = cube(r / (n1 * total))?;
        let hi = cube(2.0 * n1 * r)?.min(0.0);
        let mid = cube(r)?.clamp(lo, hi);
        Ok(LogMass { lo, mid, hi })
    }

    pub fn ball_mass(&self, omega: &SymbolicPoint, r: f64) -> Result<MassInterval> {
        let m = self.log_ball_mass(omega, r)?;
        Ok(MassInterval::new(m.lo.exp(), m.hi.exp()).clamp_to_unit())
    }

    /// `min_i p_l(i)` for each axis.
    pub fn min_conditionals(&self) -> Vec<f64> {
        (0..self.dim()).map(|l| self.cond.iter().map(|row| row[l]).fold(f64::INFINITY, f64::min)).collect()
    }

    /// Digit achieving `min_i p_l(i)`, lowest index on ties.
    pub fn argmin_digit(&self, axis: usize) -> usize {
        let mut best = 0;
        for i in 1..self.digits.len() {
            if self.cond[i][axis] < self.cond[best][axis] {
                best = i;
            }
        }
        best
    }

    /// `sum_l (-ln p_l^min) / ln n_l`.
    pub fn dim_reg_formula(&self) -> Result<f64> {
        self.require_vssc()?;
        Ok(self.min_conditionals().iter().zip(&self.bases).map(|(p, &n)| -p.ln() / (n as f64).ln()).sum())
    }

    /// Checks the scale separation `r < R / n_d` and
    /// `(n_l R)^(ln n_{l+1} / ln n_l) < r` for every `l < d`.
    pub fn check_extremal_pair(&self, r: f64, big_r: f64) -> Result<()> {
        if !(r > 0.0 && r < big_r && big_r <= 1.0) {
            return invalid(format!("need 0 < r < R <= 1, got r = {r}, R = {big_r}"));
        }
        let d = self.dim();
        let nd = self.bases[d - 1] as f64;
        if !(r < big_r / nd) {
            return invalid(format!("r < R/n_d fails: r = {r}, R/n_d = {}", big_r / nd));
        }
        for l in 0..d - 1 {
            let nl = self.bases[l] as f64;
            let next = self.bases[l + 1] as f64;
            // compare in logs to stay accurate at tiny radii
            let lhs = next.ln() / nl.ln() * (nl.ln() + big_r.ln());
            if !(lhs < r.ln()) {
                return invalid(format!(
                    "(n_{} R)^(log n_{} / log n_{}) < r fails: lhs = {}, r = {r}",
                    l + 1,
                    l + 2,
                    l + 1,
                    lhs.exp()
                ));
            }
        }
        Ok(())
    }

    /// Code that uses the rarest digit for axis `l` on positions
    /// `k_l(R)+1 ..= k_l(r)` and the smallest digit elsewhere, so that the
    /// cube-mass ratio between `R` and `r` is as large as possible.
    pub fn extremal_code(&self, r: f64, big_r: f64) -> Result<SymbolicPoint> {
        self.check_extremal_pair(r, big_r)?;
        let kr = self.depth_vector(r)?;
        let kbig = self.depth_vector(big_r)?;
        let len = kr.get(0) as usize;
        let mut prefix = vec![0usize; len];
        for l in 0..self.dim() {
            let i = self.argmin_digit(l);
            for t in kbig.get(l) as usize + 1..=kr.get(l) as usize {
                prefix[t - 1] = i;
            }
        }
        SymbolicPoint::new(prefix, vec![0])
    }

    /// Valid `(r, R)` pairs of `grid`, at most `per_gap` per gap spread
    /// across the admissible outer exponents.
    pub fn extremal_pairs(&self, grid: &ScaleGrid, per_gap: usize) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for g in grid.gaps() {
            let valid: Vec<(f64, f64)> = grid
                .exponents()
                .filter(|&j| j + g as i32 <= grid.exp_max)
                .map(|j| (grid.radius(j + g as i32), grid.radius(j)))
                .filter(|&(r, big)| self.check_extremal_pair(r, big).is_ok())
                .collect();
            if valid.is_empty() || per_gap == 0 {
                continue;
            }
            let take = per_gap.min(valid.len());
            for s in 0..take {
                let idx = if take == 1 { valid.len() - 1 } else { s * (valid.len() - 1) / (take - 1) };
                out.push(valid[idx]);
            }
        }
        out.dedup();
        out
    }

    /// Extremal codes for admissible pairs of `grid`: sample sites that
    /// realize the largest cube-mass ratios.
    pub fn extremal_sites(&self, grid: &ScaleGrid, per_gap: usize) -> Vec<SymbolicPoint> {
        let mut out: Vec<SymbolicPoint> = Vec::new();
        for (r, big) in self.extremal_pairs(grid, per_gap) {
            if let Ok(c) = self.extremal_code(r, big) {
                if !out.contains(&c) {
                    out.push(c);
                }
            }
        }
        out
    }

    /// Coordinates of `pi(omega)`.
    pub fn point_of(&self, omega: &SymbolicPoint) -> Point {
        let coords = self
            .bases
            .iter()
            .enumerate()
            .map(|(l, &n)| {
                let n = n as f64;
                let mut x = 0.0;
                let mut scale = 1.0;
                for t in 1..=POSITION_DIGITS {
                    scale /= n;
                    x += self.digits[omega.digit(t)][l] as f64 * scale;
                }
                x
            })
            .collect();
        Point::new(coords)
    }

    /// One representative code per approximate cube at the given depth
    /// vector, in lexicographic order.
    pub fn cube_representatives(&self, depth: &DepthVector) -> Vec<SymbolicPoint> {
        let k1 = depth.get(0) as usize;
        // number of coordinates fixed at position t
        let fixed: Vec<usize> = (1..=k1).map(|t| (0..self.dim()).filter(|&l| depth.get(l) as usize >= t).count()).collect();
        // for each prefix length, distinct prefixes with a representative digit
        let mut reps_by_len: Vec<Vec<usize>> = vec![Vec::new(); self.dim() + 1];
        for (m, reps) in reps_by_len.iter_mut().enumerate() {
            let mut seen: BTreeMap<&[u32], usize> = BTreeMap::new();
            for (i, d) in self.digits.iter().enumerate() {
                seen.entry(&d[..m]).or_insert(i);
            }
            *reps = seen.into_values().collect();
        }
        let mut out = Vec::new();
        let mut word = Vec::with_capacity(k1);
        fn recurse(t: usize, fixed: &[usize], reps: &[Vec<usize>], word: &mut Vec<usize>, out: &mut Vec<SymbolicPoint>) {
            if t == fixed.len() {
                out.push(SymbolicPoint::new(word.clone(), vec![0]).expect("nonempty period"));
                return;
            }
            for &i in &reps[fixed[t]] {
                word.push(i);
                recurse(t + 1, fixed, reps, word, out);
                word.pop();
            }
        }
        recurse(0, &fixed, &reps_by_len, &mut word, &mut out);
        out
    }

    /// `i i i ...` for every digit, then `i j j j ...` for `i != j`.
    pub fn witness_codes(&self) -> Vec<SymbolicPoint> {
        let n = self.digits.len();
        let mut out: Vec<SymbolicPoint> = (0..n).map(SymbolicPoint::fixed).collect();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    out.push(SymbolicPoint::new(vec![i], vec![j]).expect("nonempty period"));
                }
            }
        }
        out
    }
}

/// Conditional tables from joint digit probabilities: for digit `i` and
/// axis `l`, the mass of digits sharing `i`'s first `l + 1` coordinates over
/// the mass of those sharing its first `l`.
fn conditionals<T: Clone + for<'a> std::ops::AddAssign<&'a T>>(
    digits: &[Vec<u32>],
    probs: &[T],
    zero: T,
    div: impl Fn(&T, &T) -> T,
) -> Vec<Vec<T>> {
    let d = digits[0].len();
    let mut prefix_mass: BTreeMap<&[u32], T> = BTreeMap::new();
    for (digit, p) in digits.iter().zip(probs) {
        for m in 0..=d {
            *prefix_mass.entry(&digit[..m]).or_insert_with(|| zero.clone()) += p;
        }
    }
    digits.iter().map(|digit| (0..d).map(|l| div(&prefix_mass[&digit[..l + 1]], &prefix_mass[&digit[..l]])).collect()).collect()
}

pub fn build_sponge(d: usize, bases: Vec<u32>, digits: Vec<Vec<u32>>, probs: &[f64]) -> Result<SpongeSystem> {
    if d != bases.len() {
        return invalid(format!("dimension {d} but {} bases", bases.len()));
    }
    SpongeSystem::new(bases, digits, probs)
}

pub fn check_vssc(system: &SpongeSystem) -> bool {
    system.check_vssc()
}

pub fn depth_vector(system: &SpongeSystem, r: f64) -> Result<DepthVector> {
    system.depth_vector(r)
}

pub fn approx_cube_mass(system: &SpongeSystem, omega: &SymbolicPoint, r: f64) -> Result<f64> {
    system.approx_cube_mass(omega, r)
}

pub fn ball_mass_sponge(system: &SpongeSystem, omega: &SymbolicPoint, r: f64) -> Result<MassInterval> {
    system.ball_mass(omega, r)
}

pub fn dim_reg_formula_sponge(system: &SpongeSystem) -> Result<f64> {
    system.dim_reg_formula()
}

pub fn extremal_code(system: &SpongeSystem, r: f64, big_r: f64) -> Result<SymbolicPoint> {
    system.extremal_code(r, big_r)
}

impl MeasureModel for SpongeSystem {
    type Site = SymbolicPoint;

    fn ambient_dim(&self) -> usize {
        self.dim()
    }

    fn ball_mass(&self, site: &SymbolicPoint, radius: f64, _tol: f64) -> Result<MassInterval> {
        SpongeSystem::ball_mass(self, site, radius)
    }

    fn log_ball_mass(&self, site: &SymbolicPoint, radius: f64, _tol: f64) -> Result<LogMass> {
        SpongeSystem::log_ball_mass(self, site, radius)
    }

    /// One representative per approximate cube small enough that the cube
    /// lies within `scale` of its representative.
    fn support_net(&self, scale: f64) -> Vec<SymbolicPoint> {
        let nd = *self.bases.last().expect("d >= 2") as f64;
        let side = (scale / ((self.dim() as f64).sqrt() * nd)).min(1.0);
        match self.depth_vector(side) {
            Ok(depth) => self.cube_representatives(&depth),
            Err(_) => Vec::new(),
        }
    }

    fn witnesses(&self) -> Vec<SymbolicPoint> {
        self.witness_codes()
    }

    fn position(&self, site: &SymbolicPoint) -> Point {
        self.point_of(site)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fig2() -> SpongeSystem {
        let digits = vec![vec![0, 0, 0], vec![0, 2, 0], vec![2, 1, 1], vec![2, 3, 4], vec![0, 0, 4]];
        SpongeSystem::new(vec![3, 4, 5], digits, &[0.2; 5]).unwrap()
    }

    fn half_carpet() -> SpongeSystem {
        epsilon_carpet(0.5).unwrap()
    }

    #[test]
    fn carpet_conditionals_at_half() {
        let s = half_carpet();
        assert_relative_eq!(s.conditional_of(&[], 0).unwrap(), 0.5);
        assert_relative_eq!(s.conditional_of(&[], 2).unwrap(), 0.5);
        assert_relative_eq!(s.conditional_of(&[0], 2).unwrap(), 1.0);
        assert_relative_eq!(s.conditional_of(&[2], 1).unwrap(), 0.5);
        assert_relative_eq!(s.conditional_of(&[2], 3).unwrap(), 0.5);
        assert!(s.conditional_of(&[1], 0).is_none());
    }

    #[test]
    fn conditionals_normalize_per_prefix() {
        let s = fig2();
        for l in 0..s.dim() {
            let mut by_prefix: BTreeMap<Vec<u32>, BTreeMap<u32, f64>> = BTreeMap::new();
            for (i, d) in s.digits().iter().enumerate() {
                by_prefix.entry(d[..l].to_vec()).or_default().insert(d[l], s.conditional(i, l));
            }
            for values in by_prefix.values() {
                assert_relative_eq!(values.values().sum::<f64>(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn invalid_inputs() {
        let digits = vec![vec![0, 2], vec![2, 1], vec![2, 3]];
        assert!(SpongeSystem::new(vec![3, 4], digits.clone(), &[0.3, 0.3, 0.3]).is_err());
        assert!(SpongeSystem::new(vec![4, 3], vec![vec![0, 0]], &[1.0]).is_err());
        assert!(SpongeSystem::new(vec![3], vec![vec![0]], &[1.0]).is_err());
        assert!(SpongeSystem::new(vec![3, 4], vec![vec![3, 0]], &[1.0]).is_err());
        assert!(SpongeSystem::new(vec![3, 4], vec![vec![0, 0], vec![0, 0]], &[0.5, 0.5]).is_err());
        assert!(SpongeSystem::new(vec![3, 4], digits, &[0.5, 0.5, 0.0]).is_err());
        assert!(build_sponge(3, vec![3, 4], vec![vec![0, 0]], &[1.0]).is_err());
    }

    #[test]
    fn fig2_sponge_is_valid_and_separated() {
        let s = fig2();
        assert!(s.vssc());
        assert_eq!(s.dim(), 3);
    }

    #[test]
    fn vssc_examples() {
        assert!(half_carpet().vssc());
        let close = SpongeSystem::new(vec![3, 4], vec![vec![0, 0], vec![1, 0]], &[0.5, 0.5]).unwrap();
        assert!(!close.check_vssc());
        assert!(close.dim_reg_formula().is_err());
        assert!(close.ball_mass(&SymbolicPoint::fixed(0), 0.1).is_err());
    }

    #[test]
    fn cube_mass_at_twelfth() {
        let s = half_carpet();
        let w = SymbolicPoint::fixed(s.digit_index(&[2, 1]).unwrap());
        assert_relative_eq!(s.approx_cube_mass(&w, 1.0 / 12.0).unwrap(), 0.125, epsilon = 1e-15);
        assert_relative_eq!(s.approx_cube_mass(&w, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn cube_mass_matches_cylinder_enumeration() {
        // Q(omega, 1/12) fixes the full digit at position 1 and the first
        // coordinate at position 2: sum the level-2 cylinders that match.
        let s = half_carpet();
        let w = SymbolicPoint::fixed(s.digit_index(&[2, 1]).unwrap());
        let first = &s.digits()[w.digit(1)];
        let second = &s.digits()[w.digit(2)];
        let mut total = 0.0;
        for (a, da) in s.digits().iter().enumerate() {
            for (b, db) in s.digits().iter().enumerate() {
                if da == first && db[0] == second[0] {
                    total += s.probs()[a] * s.probs()[b];
                }
            }
        }
        assert_relative_eq!(total, s.approx_cube_mass(&w, 1.0 / 12.0).unwrap(), epsilon = 1e-15);
    }

    #[test]
    fn cubes_partition_the_code_space() {
        for s in [fig2(), epsilon_carpet(0.2).unwrap()] {
            for r in [0.5, 0.2, 1.0 / 12.0, 0.03] {
                let depth = s.depth_vector(r).unwrap();
                let total: f64 = s.cube_representatives(&depth).iter().map(|w| s.log_cube_mass_at_depth(w, &depth).exp()).sum();
                assert_relative_eq!(total, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn telescoping_is_exact() {
        let s = epsilon_carpet_exact(&"1/4".parse().unwrap()).unwrap();
        let w = SymbolicPoint::new(vec![0, 1, 2, 0], vec![1, 2]).unwrap();
        let (big, small) = (1.0 / 9.0, 3f64.powi(-7));
        let m_big = s.approx_cube_mass_exact(&w, big).unwrap().unwrap();
        let m_small = s.approx_cube_mass_exact(&w, small).unwrap().unwrap();
        let kb = s.depth_vector(big).unwrap();
        let ks = s.depth_vector(small).unwrap();
        let mut product = BigRational::one();
        for l in 0..2 {
            for t in kb.get(l) as usize + 1..=ks.get(l) as usize {
                product *= s.conditional_exact(w.digit(t), l).unwrap();
            }
        }
        assert_eq!(&m_big / &m_small, BigRational::one() / product);
    }

    #[test]
    fn sandwich_is_ordered_and_clamped() {
        let s = epsilon_carpet(0.25).unwrap();
        for w in s.witness_codes() {
            for r in [2.0, 1.0, 0.3, 1e-3, 1e-9, 1e-60] {
                let m = s.log_ball_mass(&w, r).unwrap();
                assert!(m.lo <= m.mid && m.mid <= m.hi && m.hi <= 0.0);
            }
            assert_eq!(s.ball_mass(&w, 1.0).unwrap().hi, 1.0);
        }
    }

    #[test]
    fn formula_values() {
        let ln = f64::ln;
        assert_relative_eq!(half_carpet().dim_reg_formula().unwrap(), ln(2.0) / ln(3.0) + ln(2.0) / ln(4.0), epsilon = 1e-12);
        assert_relative_eq!(epsilon_carpet(0.25).unwrap().dim_reg_formula().unwrap(), 2.55434, epsilon = 1e-5);
        // uniform product digit set: conditionals are 1/m_l
        let mut digits = Vec::new();
        for a in [0, 2] {
            for b in [0, 2, 4] {
                digits.push(vec![a, b]);
            }
        }
        let s = SpongeSystem::new(vec![3, 5], digits, &[1.0 / 6.0; 6]).unwrap();
        assert_relative_eq!(s.dim_reg_formula().unwrap(), ln(2.0) / ln(3.0) + ln(3.0) / ln(5.0), epsilon = 1e-12);
    }

    #[test]
    fn extremal_code_blocks() {
        let s = epsilon_carpet(0.25).unwrap();
        let big = 3f64.powi(-12);
        // admissible r: (3R)^(ln4/ln3) < r < R/4
        let lower = (3.0 * big).powf(4f64.ln() / 3f64.ln());
        let r = (lower * big / 4.0).sqrt();
        let w = s.extremal_code(r, big).unwrap();
        let kr = s.depth_vector(r).unwrap();
        let kb = s.depth_vector(big).unwrap();
        assert!(kb.get(1) < kr.get(1) && kr.get(1) < kb.get(0) && kb.get(0) < kr.get(0));
        let eps_digit = s.digit_index(&[0, 2]).unwrap();
        assert_eq!(s.argmin_digit(0), eps_digit);
        let rare2 = s.argmin_digit(1);
        assert_eq!(s.digits()[rare2], vec![2, 3]);
        for t in kb.get(0) as usize + 1..=kr.get(0) as usize {
            assert_eq!(w.digit(t), eps_digit);
        }
        for t in kb.get(1) as usize + 1..=kr.get(1) as usize {
            assert_eq!(w.digit(t), rare2);
        }
        // ratio at the pair reaches p^d (R/r)^t
        let t = s.dim_reg_formula().unwrap();
        let p = s.min_conditionals().into_iter().fold(1.0, f64::min);
        let log_ratio = s.log_approx_cube_mass(&w, big).unwrap() - s.log_approx_cube_mass(&w, r).unwrap();
        assert!(log_ratio >= 2.0 * p.ln() + t * (big / r).ln() - 1e-9);
    }

    #[test]
    fn extremal_constraints_are_reported() {
        let s = epsilon_carpet(0.25).unwrap();
        let big = 3f64.powi(-4);
        let err = s.extremal_code(big / 5.0, big).unwrap_err();
        assert!(format!("{err}").contains("log n_2"));
        let err = s.extremal_code(big / 2.0, big).unwrap_err();
        assert!(format!("{err}").contains("R/n_d"));
    }

    #[test]
    fn net_and_positions() {
        let s = half_carpet();
        let net = s.support_net(0.05);
        assert!(!net.is_empty());
        for w in s.witness_codes() {
            let x = s.point_of(&w);
            let nearest = net.iter().map(|v| s.point_of(v).distance(&x)).fold(f64::INFINITY, f64::min);
            assert!(nearest <= 0.05);
        }
        let p = s.point_of(&SymbolicPoint::fixed(s.digit_index(&[2, 3]).unwrap()));
        assert_relative_eq!(p.coords()[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(p.coords()[1], 1.0, epsilon = 1e-12);
    }
}
