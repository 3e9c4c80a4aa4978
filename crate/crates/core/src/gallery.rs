//! Standard models with known closed-form values, and the grids they are
//! estimated on.

use crate::error::Result;
use crate::geometry::{Point, SimilarityMap};
use crate::grid::ScaleGrid;
use crate::rational::Number;
use crate::selfsimilar::SelfSimilarSystem;
use crate::sequence::{Decay, SequenceMeasure, DEFAULT_N_MAX};
use crate::sponge::{epsilon_carpet, SpongeSystem};

/// Depth of the separation check run on gallery systems.
const SSC_DEPTH: usize = 8;

fn interval_system(maps: &[(f64, f64)], probs: &[f64]) -> Result<SelfSimilarSystem> {
    let maps = maps.iter().map(|&(c, t)| SimilarityMap::scaling(c, Point::scalar(t))).collect::<Result<Vec<_>>>()?;
    Ok(SelfSimilarSystem::new(maps, probs)?.with_ssc_check(SSC_DEPTH))
}

/// Lebesgue measure on `[0, 1]` as the attractor of `x/2`, `x/2 + 1/2`.
pub fn lebesgue() -> Result<SelfSimilarSystem> {
    interval_system(&[(0.5, 0.0), (0.5, 0.5)], &[0.5, 0.5])
}

/// Middle-third Cantor measure giving weight `p` to the left half.
pub fn cantor(p: f64) -> Result<SelfSimilarSystem> {
    interval_system(&[(1.0 / 3.0, 0.0), (1.0 / 3.0, 2.0 / 3.0)], &[p, 1.0 - p])
}

/// The same with exact weights.
pub fn cantor_exact(p: &Number) -> Result<SelfSimilarSystem> {
    let maps = vec![
        SimilarityMap::scaling(1.0 / 3.0, Point::scalar(0.0))?,
        SimilarityMap::scaling(1.0 / 3.0, Point::scalar(2.0 / 3.0))?,
    ];
    let q = Number::from_exact(num_rational::BigRational::from_integer(1.into()) - p.exact());
    Ok(SelfSimilarSystem::from_numbers(maps, &[p.clone(), q])?.with_ssc_check(SSC_DEPTH))
}

/// Similarity dimension of ratios `1/2, 1/4`: `2^-s` is the golden section.
pub fn golden_exponent() -> f64 {
    let phi = 0.5 * (1.0 + 5f64.sqrt());
    phi.log2()
}

/// Ratios `1/2` and `1/4` with the natural weights `c_i^s`.
pub fn uneven_natural() -> Result<SelfSimilarSystem> {
    let s = golden_exponent();
    let p0 = 0.5f64.powf(s);
    interval_system(&[(0.5, 0.0), (0.25, 0.75)], &[p0, 1.0 - p0])
}

/// The carpet family at `ε`.
pub fn carpet(eps: f64) -> Result<SpongeSystem> {
    epsilon_carpet(eps)
}

/// `x_n = n^-λ` with weights `n^-ω`.
pub fn poly_poly(lambda: f64, omega: f64) -> Result<SequenceMeasure> {
    SequenceMeasure::new(Decay::Poly(lambda), Decay::Poly(omega), DEFAULT_N_MAX)
}

/// `x_n = λ^n` with weights `ω^n`.
pub fn exp_exp(lambda: f64, omega: f64) -> Result<SequenceMeasure> {
    SequenceMeasure::new(Decay::Exp(lambda), Decay::Exp(omega), DEFAULT_N_MAX)
}

/// The self-similar systems paired with a name.
pub fn selfsimilar_models() -> Result<Vec<(&'static str, SelfSimilarSystem)>> {
    Ok(vec![
        ("lebesgue", lebesgue()?),
        ("cantor-uniform", cantor(0.5)?),
        ("cantor-0.7", cantor(0.7)?),
        ("uneven-natural", uneven_natural()?),
    ])
}

pub const CARPET_EPSILONS: [f64; 3] = [0.1, 0.25, 0.5];

/// Point and weight laws of the sequence cases: three polynomial pairs, two
/// geometric pairs and the two mixed regimes.
pub fn sequence_cases() -> Vec<(Decay, Decay)> {
    vec![
        (Decay::Poly(1.0), Decay::Poly(2.0)),
        (Decay::Poly(1.0), Decay::Poly(3.0)),
        (Decay::Poly(2.0), Decay::Poly(2.0)),
        (Decay::Exp(0.5), Decay::Exp(1.0 / 3.0)),
        (Decay::Exp(0.5), Decay::Exp(0.25)),
        (Decay::Poly(1.0), Decay::Exp(0.5)),
        (Decay::Exp(0.5), Decay::Poly(1.01)),
    ]
}

/// Triadic grid down to `3^-12`. Only gaps of 10 or more steps are used:
/// below that the bounded distortion of ball masses still shows.
pub fn selfsimilar_grid() -> ScaleGrid {
    ScaleGrid::new(3.0, 0, 12, 10, 12).expect("valid grid")
}

/// Grid for `τ(q)` fits on self-similar models and carpets.
pub fn spectrum_grid() -> ScaleGrid {
    ScaleGrid::new(3.0, 1, 7, 1, 2).expect("valid grid")
}

/// Grid for Assouad counts on self-similar models and carpets.
pub fn assouad_grid() -> ScaleGrid {
    ScaleGrid::new(3.0, 0, 7, 3, 7).expect("valid grid")
}

/// Deep triadic grid for carpets. The extremal codes only exist when
/// `r > (n_1 R)^(log n_2 / log n_1)`, so large gaps need very small `R`;
/// masses are periodic in the code and cost nothing extra at depth.
pub fn carpet_grid() -> ScaleGrid {
    ScaleGrid::new(3.0, 0, 200, 40, 50).expect("valid grid")
}

/// Dyadic grid for sequence measures, as deep as the index range allows:
/// balls of radius `r` at 0 reach index about `r^(-1/λ)`, which must stay
/// below `2^50` for polynomial points.
pub fn sequence_grid(points: Decay) -> ScaleGrid {
    let exp_max = match points {
        Decay::Poly(l) => ((50.0 * l).floor() as i32).min(64),
        Decay::Exp(_) => 64,
    };
    ScaleGrid::new(2.0, 1, exp_max, 24, 48).expect("valid grid")
}

/// Dyadic grids for `τ(q)` and Assouad counts on sequence measures.
pub fn sequence_spectrum_grid() -> ScaleGrid {
    ScaleGrid::new(2.0, 1, 16, 1, 2).expect("valid grid")
}

pub fn sequence_assouad_grid() -> ScaleGrid {
    ScaleGrid::new(2.0, 0, 24, 8, 24).expect("valid grid")
}
