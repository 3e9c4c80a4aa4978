use crate::error::{invalid, Result};

/// Discrete scales `scale * base^(-j)` for `j` in `exp_min..=exp_max`, and
/// the radius pairs `(R, r)` whose separation is between `gap_min` and
/// `gap_max` steps.
///
/// The largest radius is `scale * base^(-exp_min)`; there is no larger
/// outer radius, which is harmless for compactly supported measures once it
/// exceeds the support diameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleGrid {
    pub base: f64,
    pub exp_min: i32,
    pub exp_max: i32,
    pub gap_min: u32,
    pub gap_max: u32,
    /// Multiplier applied to every radius (1 unless the grid is rescaled).
    pub scale: f64,
}

/// A pair of grid radii `r < R` with `R = radius(outer)`, `r = radius(outer + gap)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusPair {
    pub outer: i32,
    pub gap: u32,
    pub big: f64,
    pub small: f64,
}

impl Default for ScaleGrid {
    fn default() -> Self {
        ScaleGrid { base: 2.0, exp_min: 0, exp_max: 32, gap_min: 8, gap_max: 24, scale: 1.0 }
    }
}

impl ScaleGrid {
    pub fn new(base: f64, exp_min: i32, exp_max: i32, gap_min: u32, gap_max: u32) -> Result<Self> {
        let grid = ScaleGrid { base, exp_min, exp_max, gap_min, gap_max, scale: 1.0 };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.base > 1.0) || !self.base.is_finite() {
            return invalid(format!("grid base must exceed 1, got {}", self.base));
        }
        if self.exp_min >= self.exp_max {
            return invalid(format!("exp_min ({}) must be below exp_max ({})", self.exp_min, self.exp_max));
        }
        if self.gap_min == 0 || self.gap_min > self.gap_max {
            return invalid(format!("need 0 < gap_min <= gap_max, got {}..{}", self.gap_min, self.gap_max));
        }
        if !(self.scale > 0.0) || !self.scale.is_finite() {
            return invalid(format!("grid scale must be positive, got {}", self.scale));
        }
        Ok(())
    }

    /// Same exponents and gaps with every radius multiplied by `factor`.
    pub fn rescaled(&self, factor: f64) -> ScaleGrid {
        ScaleGrid { scale: self.scale * factor, ..self.clone() }
    }

    pub fn with_exponents(&self, exp_min: i32, exp_max: i32) -> ScaleGrid {
        ScaleGrid { exp_min, exp_max, ..self.clone() }
    }

    pub fn radius(&self, j: i32) -> f64 {
        self.scale * self.base.powi(-j)
    }

    /// Radii in strictly decreasing order.
    pub fn radii(&self) -> Vec<f64> {
        (self.exp_min..=self.exp_max).map(|j| self.radius(j)).collect()
    }

    pub fn exponents(&self) -> impl Iterator<Item = i32> {
        self.exp_min..=self.exp_max
    }

    pub fn gaps(&self) -> impl Iterator<Item = u32> {
        self.gap_min..=self.gap_max
    }

    /// All admissible pairs, ordered by gap then by outer exponent.
    pub fn pairs(&self) -> Vec<RadiusPair> {
        let mut out = Vec::new();
        for gap in self.gaps() {
            let g = gap as i32;
            for outer in self.exp_min..=(self.exp_max - g) {
                out.push(RadiusPair { outer, gap, big: self.radius(outer), small: self.radius(outer + g) });
            }
        }
        out
    }

    /// `log(R/r)` for a pair with the given gap.
    pub fn log_ratio(&self, gap: u32) -> f64 {
        gap as f64 * self.base.ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(ScaleGrid::new(1.0, 0, 4, 1, 2).is_err());
        assert!(ScaleGrid::new(2.0, 4, 4, 1, 2).is_err());
        assert!(ScaleGrid::new(2.0, 0, 4, 3, 2).is_err());
        assert!(ScaleGrid::new(2.0, 0, 4, 0, 2).is_err());
    }

    #[test]
    fn dyadic_radii_are_exact() {
        let g = ScaleGrid::new(2.0, 0, 10, 1, 3).unwrap();
        assert_eq!(g.radii()[10], 1.0 / 1024.0);
    }

    #[test]
    fn no_pairs_when_gap_exceeds_range() {
        let g = ScaleGrid::new(2.0, 0, 4, 5, 6).unwrap();
        assert!(g.pairs().is_empty());
    }

    proptest! {
        #[test]
        fn radii_decrease_and_pairs_respect_gaps(
            base in 1.5f64..4.0, lo in -3i32..3, span in 2i32..20, gmin in 1u32..4, extra in 0u32..4,
        ) {
            let g = ScaleGrid::new(base, lo, lo + span, gmin, gmin + extra).unwrap();
            let radii = g.radii();
            prop_assert!(radii.windows(2).all(|w| w[0] > w[1]));
            for p in g.pairs() {
                prop_assert!(p.small < p.big);
                let steps = (p.big / p.small).ln() / base.ln();
                prop_assert!((steps - p.gap as f64).abs() < 1e-9);
                prop_assert!(p.gap >= g.gap_min && p.gap <= g.gap_max);
            }
        }
    }
}
