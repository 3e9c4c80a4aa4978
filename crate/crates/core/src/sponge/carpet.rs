//! The one-parameter carpet family with `n = (3, 4)`,
//! `I = {(0,2), (2,1), (2,3)}` and probabilities `(ε, 1 − 3ε/2, ε/2)`,
//! whose four dimension curves are pairwise distinct for `ε < 1/2`.

use num_rational::BigRational;
use num_traits::One;

use super::SpongeSystem;
use crate::error::{invalid, Result};
use crate::rational::Number;

fn digits() -> Vec<Vec<u32>> {
    vec![vec![0, 2], vec![2, 1], vec![2, 3]]
}

fn check_epsilon(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 0.5) {
        return invalid(format!("epsilon must lie in (0, 1/2], got {eps}"));
    }
    Ok(())
}

pub fn epsilon_carpet(eps: f64) -> Result<SpongeSystem> {
    check_epsilon(eps)?;
    SpongeSystem::new(vec![3, 4], digits(), &[eps, 1.0 - 1.5 * eps, 0.5 * eps])
}

/// The same carpet with exact rational probabilities.
pub fn epsilon_carpet_exact(eps: &Number) -> Result<SpongeSystem> {
    check_epsilon(eps.value())?;
    let e = eps.exact().clone();
    let half = BigRational::new(1.into(), 2.into());
    let probs = [
        Number::from_exact(e.clone()),
        Number::from_exact(BigRational::one() - &e * BigRational::new(3.into(), 2.into())),
        Number::from_exact(&e * &half),
    ];
    SpongeSystem::from_numbers(vec![3, 4], digits(), &probs)
}

/// The four curves of the family at one `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarpetDimensions {
    pub dim_reg: f64,
    pub assouad: f64,
    pub sup_local: f64,
    /// Top of the L^q spectrum.
    pub top: f64,
}

fn local_branches(eps: f64) -> (f64, f64) {
    let (l3, l4) = (3f64.ln(), 4f64.ln());
    let a = -eps.ln() / l3;
    let b = -(1.0 - eps).ln() / l3 - (0.5 * eps / (1.0 - eps)).ln() / l4;
    (a, b)
}

pub fn badcarpet_family(eps: f64) -> Result<CarpetDimensions> {
    check_epsilon(eps)?;
    let (l2, l3, l4) = (2f64.ln(), 3f64.ln(), 4f64.ln());
    let (a, b) = local_branches(eps);
    Ok(CarpetDimensions {
        dim_reg: -eps.ln() / l3 - (0.5 * eps / (1.0 - eps)).ln() / l4,
        assouad: l2 / l3 + l2 / l4,
        sup_local: a.max(b),
        top: -eps.ln() / l3 + l2 / l4,
    })
}

/// The `ε` where the two branches of the local-dimension supremum cross,
/// located by bisection.
pub fn local_phase_crossing() -> f64 {
    let f = |e: f64| {
        let (a, b) = local_branches(e);
        a - b
    };
    let (mut lo, mut hi) = (1e-6, 0.5);
    debug_assert!(f(lo) > 0.0 && f(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
