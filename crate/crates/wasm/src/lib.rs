//! Browser bindings for three demo views. Every binding returns a flat
//! `Float64Array` of fixed-width records; the page reshapes them.
//!
//! The computations live in plain functions so they can be tested natively.

use wasm_bindgen::prelude::*;

use regdim::estimators::{estimate_upper_regularity, Ends};
use regdim::selfsimilar::SelfSimilarSystem;
use regdim::sequence::{Decay, SequenceMeasure, DEFAULT_N_MAX};
use regdim::sponge::{badcarpet_family, local_phase_crossing};
use regdim::{MeasureModel, Point, ScaleGrid, SimilarityMap};

/// Fields per record of [`sweep`].
pub const SWEEP_WIDTH: usize = 5;
/// Fields per record of [`ball_masses`].
pub const BALL_WIDTH: usize = 4;
/// Fields per record of [`sequence_rows`].
pub const SEQUENCE_WIDTH: usize = 5;

const SSC_DEPTH: usize = 8;

/// `[ε, dimreg, T, sup_local, assouad]` at `steps` equally spaced `ε`.
pub fn sweep(eps_min: f64, eps_max: f64, steps: usize) -> Result<Vec<f64>, String> {
    if !(eps_min > 0.0 && eps_min < eps_max && eps_max <= 0.5) || steps < 2 {
        return Err(format!("need 0 < min < max <= 1/2 and at least 2 steps, got {eps_min}..{eps_max} in {steps}"));
    }
    let mut out = Vec::with_capacity(steps * SWEEP_WIDTH);
    for i in 0..steps {
        let eps = if i + 1 == steps { eps_max } else { eps_min + (eps_max - eps_min) * i as f64 / (steps - 1) as f64 };
        let d = badcarpet_family(eps).map_err(|e| e.to_string())?;
        out.extend([eps, d.dim_reg, d.top, d.sup_local, d.assouad]);
    }
    Ok(out)
}

/// An interval system from parallel slices of ratios, left endpoints and
/// weights.
pub fn interval_system(ratios: &[f64], offsets: &[f64], probs: &[f64]) -> Result<SelfSimilarSystem, String> {
    if ratios.len() != offsets.len() || ratios.len() != probs.len() {
        return Err("ratios, offsets and weights must have the same length".into());
    }
    let maps = ratios
        .iter()
        .zip(offsets)
        .map(|(&c, &t)| SimilarityMap::scaling(c, Point::scalar(t)))
        .collect::<regdim::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    Ok(SelfSimilarSystem::new(maps, probs).map_err(|e| e.to_string())?.with_ssc_check(SSC_DEPTH))
}

/// `[r, lo, hi, log(mid)/log(r)]` for `r = 2^-k`, `k = 1..=depth`, at `x`.
pub fn ball_masses(system: &SelfSimilarSystem, x: f64, depth: u32) -> Result<Vec<f64>, String> {
    let at = Point::scalar(x);
    let mut out = Vec::with_capacity(depth as usize * BALL_WIDTH);
    for k in 1..=depth as i32 {
        let r = 2f64.powi(-k);
        let m = system.ball_mass(&at, r, 1e-9).map_err(|e| e.to_string())?;
        out.extend([r, m.lo, m.hi, m.midpoint().ln() / r.ln()]);
    }
    Ok(out)
}

/// Closed form and a small-grid estimate, `NaN` where unavailable. Both
/// need certified separation: without it ball masses converge too slowly
/// for an interactive page.
pub fn selfsimilar_summary(system: &SelfSimilarSystem) -> [f64; 2] {
    let Ok(formula) = system.dim_reg_formula() else {
        return [f64::NAN, f64::NAN];
    };
    let estimate = ScaleGrid::new(2.0, 0, 14, 8, 10)
        .and_then(|g| estimate_upper_regularity(system, &g, &system.witnesses(), 1e-9, Ends::Conservative))
        .map(|e| e.value)
        .unwrap_or(f64::NAN);
    [formula, estimate]
}

pub fn decay(law: &str, rate: f64) -> Result<Decay, String> {
    match law {
        "poly" => Ok(Decay::Poly(rate)),
        "exp" => Ok(Decay::Exp(rate)),
        other => Err(format!("unknown decay law {other:?}; use \"poly\" or \"exp\"")),
    }
}

/// `[R, lo, hi, log(mid)/log(R), doubling]` at the origin for `R = 2^-k`,
/// where `doubling` bounds `mu(B(0,R)) / mu(B(0,R/2))` from below.
pub fn sequence_rows(m: &SequenceMeasure, rows: u32) -> Result<Vec<f64>, String> {
    let mut out = Vec::with_capacity(rows as usize * SEQUENCE_WIDTH);
    for k in 1..=rows as i32 {
        let r = 2f64.powi(-k);
        let big = m.log_ball_mass(0.0, r).map_err(|e| e.to_string())?;
        let small = m.log_ball_mass(0.0, r / 2.0).map_err(|e| e.to_string())?;
        out.extend([r, big.lo.exp(), big.hi.exp(), big.mid / r.ln(), (big.lo - small.hi).exp()]);
    }
    Ok(out)
}

fn js(e: String) -> JsError {
    JsError::new(&e)
}

/// Carpet curves over `[eps_min, eps_max]`.
#[wasm_bindgen(js_name = sweepCurves)]
pub fn sweep_curves(eps_min: f64, eps_max: f64, steps: usize) -> Result<Vec<f64>, JsError> {
    sweep(eps_min, eps_max, steps).map_err(js)
}

/// Where the local-dimension supremum changes branch.
#[wasm_bindgen(js_name = phaseCrossing)]
pub fn phase_crossing() -> f64 {
    local_phase_crossing()
}

/// Ball masses of an interval system at `x`, followed by the closed form
/// and the estimate (two trailing values).
#[wasm_bindgen(js_name = ballMassExplorer)]
pub fn ball_mass_explorer(ratios: Vec<f64>, offsets: Vec<f64>, probs: Vec<f64>, x: f64, depth: u32) -> Result<Vec<f64>, JsError> {
    let s = interval_system(&ratios, &offsets, &probs).map_err(js)?;
    let mut out = ball_masses(&s, x, depth).map_err(js)?;
    out.extend(selfsimilar_summary(&s));
    Ok(out)
}

/// Support points of an interval system at resolution `scale`, for plotting.
#[wasm_bindgen(js_name = supportPoints)]
pub fn support_points(ratios: Vec<f64>, offsets: Vec<f64>, probs: Vec<f64>, scale: f64) -> Result<Vec<f64>, JsError> {
    let s = interval_system(&ratios, &offsets, &probs).map_err(js)?;
    Ok(s.support_net(scale.max(1e-4)).iter().map(|p| p.coords()[0]).collect())
}

/// Sequence table followed by the closed-form regularity dimension
/// (`Infinity` in the mixed regimes).
#[wasm_bindgen(js_name = sequenceTable)]
pub fn sequence_table(
    point_law: &str,
    point_rate: f64,
    weight_law: &str,
    weight_rate: f64,
    rows: u32,
) -> Result<Vec<f64>, JsError> {
    let m = SequenceMeasure::new(
        decay(point_law, point_rate).map_err(js)?,
        decay(weight_law, weight_rate).map_err(js)?,
        DEFAULT_N_MAX,
    )
    .map_err(|e| js(e.to_string()))?;
    let mut out = sequence_rows(&m, rows).map_err(js)?;
    out.push(m.dim_reg_formula().as_f64());
    Ok(out)
}
