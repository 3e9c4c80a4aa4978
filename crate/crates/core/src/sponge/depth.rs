use num_bigint::BigUint;
use num_traits::One;

use crate::error::{invalid, Result};

/// Per-axis depths `k_l(r)` with `n_l^-(k_l+1) < r <= n_l^-k_l`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DepthVector(pub Vec<u32>);

impl DepthVector {
    pub fn get(&self, l: usize) -> u32 {
        self.0[l]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }
}

/// Radii within this many ulps of an exact power `n^-k` count as equal to it.
const TIE_ULPS: f64 = 4.0;

/// Largest `k >= 0` with `r <= n^-k`, for `r` in `(0, 1]`.
///
/// Uses a logarithm for the estimate and settles near-integer cases by an
/// exact big-integer comparison of `r * n^k` against 1.
pub fn axis_depth(n: u32, r: f64) -> Result<u32> {
    if !(r > 0.0 && r <= 1.0) {
        return invalid(format!("radius must lie in (0, 1], got {r}"));
    }
    let x = -r.ln() / (n as f64).ln();
    let k0 = x.floor();
    if (x - k0) > 1e-9 && (k0 + 1.0 - x) > 1e-9 {
        return Ok(k0 as u32);
    }
    // Near a boundary: the answer is k0 or one of its neighbours.
    let mut k = (x.round() as i64 + 1).max(0) as u32;
    while k > 0 && !at_most_power(r, n, k) {
        k -= 1;
    }
    Ok(k)
}

/// Exact test of `r <= n^-k` (with the tie tolerance above).
fn at_most_power(r: f64, n: u32, k: u32) -> bool {
    let (mantissa, exponent, _) = integer_decode(r);
    // r = mantissa * 2^exponent; compare mantissa * n^k with 2^-exponent.
    let lhs = BigUint::from(mantissa) * BigUint::from(n).pow(k);
    if exponent >= 0 {
        return lhs.is_one() && exponent == 0;
    }
    let rhs = BigUint::one() << ((-exponent) as usize);
    if lhs <= rhs {
        return true;
    }
    // lhs > rhs: accept when the excess is within the tie tolerance.
    let excess = &lhs - &rhs;
    let slack = (&rhs * BigUint::from((TIE_ULPS * 1024.0) as u64)) >> (52 + 10);
    excess <= slack
}

fn integer_decode(x: f64) -> (u64, i16, i8) {
    let bits = x.to_bits();
    let sign: i8 = if bits >> 63 == 0 { 1 } else { -1 };
    let mut exponent: i16 = ((bits >> 52) & 0x7ff) as i16;
    let mantissa = if exponent == 0 { (bits & 0xfffffffffffff) << 1 } else { (bits & 0xfffffffffffff) | 0x10000000000000 };
    exponent -= 1023 + 52;
    (mantissa, exponent, sign)
}

pub fn depth_vector_for(bases: &[u32], r: f64) -> Result<DepthVector> {
    bases.iter().map(|&n| axis_depth(n, r)).collect::<Result<Vec<_>>>().map(DepthVector)
}
