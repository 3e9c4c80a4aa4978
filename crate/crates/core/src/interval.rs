//! Certified enclosures of measure values.
//!
//! Every ball-mass query returns a [`MassInterval`]. Models that evaluate a
//! mass exactly return a degenerate interval. Estimators work on the
//! logarithmic form [`LogMass`], which also carries the model's preferred
//! point value so that scale-ratio estimates can be taken without the
//! pessimism of the interval ends.

use std::ops::{Add, Mul};

/// Lower and upper bounds on a nonnegative measure value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassInterval {
    pub lo: f64,
    pub hi: f64,
}

impl MassInterval {
    pub const ZERO: MassInterval = MassInterval { lo: 0.0, hi: 0.0 };
    pub const ONE: MassInterval = MassInterval { lo: 1.0, hi: 1.0 };

    /// Builds an interval, clamping the lower end at zero and ordering the ends.
    pub fn new(lo: f64, hi: f64) -> Self {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        MassInterval { lo: lo.max(0.0), hi: hi.max(0.0) }
    }

    pub fn exact(value: f64) -> Self {
        MassInterval::new(value, value)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lo <= value && value <= self.hi
    }

    pub fn overlaps(&self, other: &MassInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Widens both ends outward by a relative amount.
    pub fn widen_relative(&self, rel: f64) -> Self {
        MassInterval::new(self.lo * (1.0 - rel), self.hi * (1.0 + rel))
    }

    pub fn clamp_to_unit(&self) -> Self {
        MassInterval::new(self.lo.min(1.0), self.hi.min(1.0))
    }

    /// Interval quotient with outward rounding. The divisor must be
    /// strictly positive.
    pub fn div(&self, denom: &MassInterval) -> Self {
        debug_assert!(denom.lo > 0.0);
        MassInterval::new((self.lo / denom.hi).next_down(), (self.hi / denom.lo).next_up())
    }

    pub fn scale(&self, factor: f64) -> Self {
        MassInterval::new(self.lo * factor, self.hi * factor)
    }

    pub fn to_log(&self) -> LogMass {
        let lo = self.lo.ln();
        let hi = self.hi.ln();
        LogMass { lo, mid: 0.5 * (lo + hi), hi }
    }
}

impl Add for MassInterval {
    type Output = MassInterval;

    fn add(self, rhs: MassInterval) -> MassInterval {
        MassInterval::new((self.lo + rhs.lo).next_down(), (self.hi + rhs.hi).next_up())
    }
}

impl Mul<f64> for MassInterval {
    type Output = MassInterval;

    fn mul(self, rhs: f64) -> MassInterval {
        self.scale(rhs)
    }
}

/// Natural logarithms of a mass enclosure plus a point value.
///
/// `lo <= mid <= hi`; any of them may be `-inf` for a zero mass. For models
/// with exact masses all three coincide. The default `mid` is the geometric
/// midpoint of the interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMass {
    pub lo: f64,
    pub mid: f64,
    pub hi: f64,
}

impl LogMass {
    pub fn exact(ln_mass: f64) -> Self {
        LogMass { lo: ln_mass, mid: ln_mass, hi: ln_mass }
    }

    /// Log-mass shifted by `ln factor`, i.e. the mass multiplied by `factor`.
    pub fn shift(&self, ln_factor: f64) -> Self {
        LogMass { lo: self.lo + ln_factor, mid: self.mid + ln_factor, hi: self.hi + ln_factor }
    }

    pub fn to_interval(&self) -> MassInterval {
        MassInterval::new(self.lo.exp(), self.hi.exp())
    }

    /// Selected end for a ratio estimate.
    pub fn end(&self, end: End) -> f64 {
        match end {
            End::Lower => self.lo,
            End::Nominal => self.mid,
            End::Upper => self.hi,
        }
    }
}

/// Which end of an enclosure an estimator reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    Lower,
    Nominal,
    Upper,
}
