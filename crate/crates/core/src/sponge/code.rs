use crate::error::{invalid, Result};

/// An eventually periodic infinite word `preperiod · period period ...`
/// over the digit set of a sponge. Digits are indices into the system's
/// digit list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolicPoint {
    preperiod: Vec<usize>,
    period: Vec<usize>,
}

impl SymbolicPoint {
    pub fn new(preperiod: Vec<usize>, period: Vec<usize>) -> Result<Self> {
        if period.is_empty() {
            return invalid("period of a symbolic point must be nonempty");
        }
        Ok(SymbolicPoint { preperiod, period })
    }

    /// The constant word `i i i ...`.
    pub fn fixed(i: usize) -> Self {
        SymbolicPoint { preperiod: Vec::new(), period: vec![i] }
    }

    pub fn preperiod(&self) -> &[usize] {
        &self.preperiod
    }

    pub fn period(&self) -> &[usize] {
        &self.period
    }

    /// Digit at position `t >= 1`.
    pub fn digit(&self, t: usize) -> usize {
        debug_assert!(t >= 1);
        let i = t - 1;
        if i < self.preperiod.len() {
            self.preperiod[i]
        } else {
            self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }

    /// Digits at positions `1..=n`.
    pub fn prefix(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        (1..=n).map(move |t| self.digit(t))
    }

    pub(crate) fn max_digit(&self) -> usize {
        self.preperiod.iter().chain(&self.period).copied().max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits_follow_eventual_period() {
        let w = SymbolicPoint::new(vec![4, 5], vec![1, 2, 3]).unwrap();
        let got: Vec<usize> = w.prefix(9).collect();
        assert_eq!(got, vec![4, 5, 1, 2, 3, 1, 2, 3, 1]);
    }

    #[test]
    fn empty_period_is_rejected() {
        assert!(SymbolicPoint::new(vec![1], vec![]).is_err());
    }
}
