use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::geometry::Point;
use crate::interval::MassInterval;
use crate::model::MeasureModel;

const HALF_SIDE: f64 = 1.5;
/// Largest index whose radius `2^-i` is supported.
pub const MAX_LENSES: usize = 20;
/// Cells per refinement level beyond which refinement stops.
const MAX_CELLS: usize = 1 << 22;
/// Relative safety margin for disc containment tests.
const MARGIN: f64 = 1e-12;
/// Relative tolerance used by [`LensMeasure::nondoubling_ratios`].
const RATIO_TOL: f64 = 1e-2;

/// Lebesgue measure on the square `[-3/2, 3/2]^2` with lens-shaped holes
/// `B(x_i, r_i) ∩ B(0, 1 - r_i^2)` cut out next to the unit circle, where
/// `r_i = 2^-i` and `x_i = (cos θ_i, sin θ_i)` with `θ_i = π(1 - i^(-1/2))`.
///
/// The measure is doubling. Restricted to the unit disc it is not: near
/// `x_i` only a strip of width `r_i^2` survives inside the disc.
#[derive(Debug, Clone)]
pub struct LensMeasure {
    centers: Vec<[f64; 2]>,
    radii: Vec<f64>,
    h: f64,
    restricted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Inside,
    Outside,
    Boundary,
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    x0: f64,
    y0: f64,
    side: f64,
}

impl Cell {
    fn area(&self) -> f64 {
        self.side * self.side
    }

    fn children(&self) -> [Cell; 4] {
        let s = 0.5 * self.side;
        [
            Cell { x0: self.x0, y0: self.y0, side: s },
            Cell { x0: self.x0 + s, y0: self.y0, side: s },
            Cell { x0: self.x0, y0: self.y0 + s, side: s },
            Cell { x0: self.x0 + s, y0: self.y0 + s, side: s },
        ]
    }

    fn min_dist(&self, c: [f64; 2]) -> f64 {
        let dx = (self.x0 - c[0]).max(0.0).max(c[0] - (self.x0 + self.side));
        let dy = (self.y0 - c[1]).max(0.0).max(c[1] - (self.y0 + self.side));
        dx.hypot(dy)
    }

    fn max_dist(&self, c: [f64; 2]) -> f64 {
        let dx = (c[0] - self.x0).abs().max((self.x0 + self.side - c[0]).abs());
        let dy = (c[1] - self.y0).abs().max((self.y0 + self.side - c[1]).abs());
        dx.hypot(dy)
    }

    /// Position relative to the open disc `B(c, rho)`.
    fn vs_disc(&self, c: [f64; 2], rho: f64) -> Status {
        if self.max_dist(c) < rho * (1.0 - MARGIN) {
            Status::Inside
        } else if self.min_dist(c) >= rho * (1.0 + MARGIN) {
            Status::Outside
        } else {
            Status::Boundary
        }
    }

    fn vs_square(&self) -> Status {
        let (x1, y1) = (self.x0 + self.side, self.y0 + self.side);
        if self.x0 >= -HALF_SIDE && x1 <= HALF_SIDE && self.y0 >= -HALF_SIDE && y1 <= HALF_SIDE {
            Status::Inside
        } else if x1 <= -HALF_SIDE || self.x0 >= HALF_SIDE || y1 <= -HALF_SIDE || self.y0 >= HALF_SIDE {
            Status::Outside
        } else {
            Status::Boundary
        }
    }
}

/// Meet of containment statuses.
fn meet(a: Status, b: Status) -> Status {
    match (a, b) {
        (Status::Outside, _) | (_, Status::Outside) => Status::Outside,
        (Status::Inside, Status::Inside) => Status::Inside,
        _ => Status::Boundary,
    }
}

fn complement(a: Status) -> Status {
    match a {
        Status::Inside => Status::Outside,
        Status::Outside => Status::Inside,
        Status::Boundary => Status::Boundary,
    }
}

impl LensMeasure {
    pub fn new(i_max: usize, h: f64, restricted: bool) -> Result<Self> {
        if i_max == 0 || i_max > MAX_LENSES {
            return invalid(format!("number of lenses must lie in 1..={MAX_LENSES}, got {i_max}"));
        }
        let r_last = 2f64.powi(-(i_max as i32));
        if !(h > 0.0 && h <= r_last * r_last / 4.0) {
            return invalid(format!("cell size {h} is too coarse; need h <= r_{i_max}^2 / 4 = {}", r_last * r_last / 4.0));
        }
        let (centers, radii) = (1..=i_max)
            .map(|i| {
                let theta = PI * (1.0 - (i as f64).powf(-0.5));
                ([theta.cos(), theta.sin()], 2f64.powi(-(i as i32)))
            })
            .unzip();
        Ok(LensMeasure { centers, radii, h, restricted })
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn is_restricted(&self) -> bool {
        self.restricted
    }

    pub fn cell_size(&self) -> f64 {
        self.h
    }

    /// Center `x_i` of lens `i` (1-based).
    pub fn center(&self, i: usize) -> Point {
        let c = self.centers[i - 1];
        Point::new(vec![c[0], c[1]])
    }

    /// Radius `r_i` of lens `i` (1-based).
    pub fn radius(&self, i: usize) -> f64 {
        self.radii[i - 1]
    }

    fn vs_lens(&self, cell: &Cell, k: usize) -> Status {
        let r = self.radii[k];
        meet(cell.vs_disc(self.centers[k], r), cell.vs_disc([0.0, 0.0], 1.0 - r * r))
    }

    /// Status of a cell against the support intersected with `ball`.
    fn classify(&self, cell: &Cell, ball: ([f64; 2], f64), lenses: &[usize]) -> Status {
        let mut s = meet(cell.vs_disc(ball.0, ball.1), cell.vs_square());
        if s == Status::Outside {
            return s;
        }
        if self.restricted {
            s = meet(s, cell.vs_disc([0.0, 0.0], 1.0));
        }
        for &k in lenses {
            if s == Status::Outside {
                break;
            }
            s = meet(s, complement(self.vs_lens(cell, k)));
        }
        s
    }

    /// Encloses the mass of the open ball `B(x, r)` by quadtree
    /// quadrature: cells are split until the undecided area is at most
    /// `tol` times the total, or cells reach side `h`.
    pub fn ball_mass_at(&self, x: &Point, r: f64, tol: f64) -> Result<MassInterval> {
        if x.dim() != 2 {
            return Err(Error::InvalidArgument(format!("lens measure lives in R^2, got a point in R^{}", x.dim())));
        }
        if !(r > 0.0) {
            return invalid(format!("radius must be positive, got {r}"));
        }
        let c = [x.coords()[0], x.coords()[1]];
        let lenses: Vec<usize> = (0..self.len())
            .filter(|&k| (c[0] - self.centers[k][0]).hypot(c[1] - self.centers[k][1]) < r + self.radii[k] * (1.0 + 1e-9))
            .collect();
        let mut cells = vec![Cell { x0: c[0] - r, y0: c[1] - r, side: 2.0 * r }];
        let mut inside = 0.0;
        loop {
            let status: Vec<Status> = cells.par_iter().map(|cell| self.classify(cell, (c, r), &lenses)).collect();
            let mut boundary = Vec::new();
            for (cell, s) in cells.iter().zip(&status) {
                match s {
                    Status::Inside => inside += cell.area(),
                    Status::Boundary => boundary.push(*cell),
                    Status::Outside => {}
                }
            }
            let pending: f64 = boundary.iter().map(Cell::area).sum();
            let side = boundary.first().map_or(0.0, |c| c.side);
            if pending <= tol * (inside + pending) || side <= self.h || boundary.len() * 4 > MAX_CELLS {
                let lo = inside * (1.0 - 1e-12);
                let hi = (inside + pending) * (1.0 + 1e-12);
                return Ok(MassInterval::new(lo, hi));
            }
            cells = boundary.iter().flat_map(Cell::children).collect();
        }
    }

    /// `(i, lower bound on ν(B(x_i, 2 r_i)) / ν(B(x_i, r_i)))` for the
    /// restricted measure.
    pub fn nondoubling_ratios(&self, indices: &[usize]) -> Result<Vec<(usize, f64)>> {
        if !self.restricted {
            return Err(Error::Precondition("non-doubling ratios are defined for the restricted measure".into()));
        }
        indices
            .iter()
            .map(|&i| {
                if i == 0 || i > self.len() {
                    return invalid(format!("lens index {i} outside 1..={}", self.len()));
                }
                let x = self.center(i);
                let r = self.radius(i);
                let big = self.ball_mass_at(&x, 2.0 * r, RATIO_TOL)?;
                let small = self.ball_mass_at(&x, r, RATIO_TOL)?;
                Ok((i, big.lo / small.hi))
            })
            .collect()
    }

    /// Ratios `mu(B(x, 2r)) / mu(B(x, r))` (lower end over upper end) at the
    /// given sample points and radii.
    pub fn doubling_ratios(&self, samples: &[(Point, f64)], tol: f64) -> Result<Vec<f64>> {
        samples
            .iter()
            .map(|(x, r)| {
                let big = self.ball_mass_at(x, 2.0 * r, tol)?;
                let small = self.ball_mass_at(x, *r, tol)?;
                Ok(big.hi / small.lo)
            })
            .collect()
    }

    fn in_support(&self, p: [f64; 2]) -> bool {
        let n = p[0].hypot(p[1]);
        if p[0].abs() > HALF_SIDE || p[1].abs() > HALF_SIDE || (self.restricted && n > 1.0) {
            return false;
        }
        !(0..self.len()).any(|k| {
            let r = self.radii[k];
            (p[0] - self.centers[k][0]).hypot(p[1] - self.centers[k][1]) < r && n < 1.0 - r * r
        })
    }
}

pub fn build_lens_measure(i_max: usize, h: f64, restricted: bool) -> Result<LensMeasure> {
    LensMeasure::new(i_max, h, restricted)
}

pub fn nondoubling_ratios(lens: &LensMeasure, indices: &[usize]) -> Result<Vec<(usize, f64)>> {
    lens.nondoubling_ratios(indices)
}

impl MeasureModel for LensMeasure {
    type Site = Point;

    fn ambient_dim(&self) -> usize {
        2
    }

    fn ball_mass(&self, site: &Point, radius: f64, tol: f64) -> Result<MassInterval> {
        self.ball_mass_at(site, radius, tol)
    }

    /// Lattice points of spacing `scale` lying in the support.
    fn support_net(&self, scale: f64) -> Vec<Point> {
        let a = scale.min(1.0);
        let n = (2.0 * HALF_SIDE / a).ceil() as i64;
        let mut out = Vec::new();
        for iy in 0..=n {
            for ix in 0..=n {
                let p = [-HALF_SIDE + ix as f64 * a, -HALF_SIDE + iy as f64 * a];
                if self.in_support(p) {
                    out.push(Point::new(vec![p[0], p[1]]));
                }
            }
        }
        out
    }

    fn witnesses(&self) -> Vec<Point> {
        let mut out: Vec<Point> = (1..=self.len()).map(|i| self.center(i)).collect();
        out.push(Point::new(vec![0.0, 0.0]));
        out.push(Point::new(vec![-1.0, 0.0]));
        if !self.restricted {
            out.push(Point::new(vec![1.4, 0.0]));
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

    #[test]
    fn free_disc_has_full_area() {
        let lens = LensMeasure::new(8, 2f64.powi(-20), false).unwrap();
        let r = 0.05;
        let m = lens.ball_mass_at(&Point::new(vec![1.4, 0.0]), r, 1e-4).unwrap();
        assert!(m.contains(PI * r * r), "{m:?}");
        assert!(m.width() <= 1e-4 * PI * r * r * 1.01);
    }

    #[test]
    fn restricted_small_ball_is_thin() {
        let lens = LensMeasure::new(8, 2f64.powi(-20), true).unwrap();
        for i in [4, 6, 8] {
            let r = lens.radius(i);
            let small = lens.ball_mass_at(&lens.center(i), r, 1e-3).unwrap();
            assert!(small.lo <= 4.0 * r * r * r, "i = {i}: {small:?}");
            let big = lens.ball_mass_at(&lens.center(i), 2.0 * r, 1e-3).unwrap();
            assert!(big.hi >= PI * r * r, "i = {i}: {big:?}");
        }
    }

    #[test]
    fn ratios_grow() {
        let lens = LensMeasure::new(8, 2f64.powi(-20), true).unwrap();
        let ratios = lens.nondoubling_ratios(&[4, 5, 6, 7, 8]).unwrap();
        assert!(ratios.windows(2).all(|w| w[1].1 > w[0].1), "{ratios:?}");
        for (i, q) in ratios {
            assert!(q >= 0.8 * PI / (4.0 * 2f64.powi(-(i as i32))), "i = {i}: {q}");
        }
    }

    #[test]
    fn preconditions() {
        assert!(LensMeasure::new(21, 1e-20, true).is_err());
        assert!(LensMeasure::new(6, 1e-3, true).is_err());
        let free = LensMeasure::new(6, 2f64.powi(-16), false).unwrap();
        assert!(free.nondoubling_ratios(&[3]).is_err());
    }

    #[test]
    fn net_lies_in_support() {
        let lens = LensMeasure::new(5, 2f64.powi(-14), true).unwrap();
        let net = lens.support_net(0.1);
        assert!(!net.is_empty());
        assert!(net.iter().all(|p| p.norm() <= 1.0));
    }
}
