use super::{
    estimate_assouad_support, estimate_local_dim_upper, estimate_t, estimate_tau, estimate_upper_regularity, DimEstimate, Ends,
    LqSpectrumEstimate,
};
use crate::error::Result;
use crate::grid::ScaleGrid;
use crate::model::{MeasureModel, DEFAULT_TOL};

/// Absolute slack allowed in each inequality of the chain.
pub const CHAIN_TOL: f64 = 0.1;
/// Estimates above this are read as divergent.
pub const DIVERGENCE_CAP: f64 = 1e3;

/// Grids and knobs for [`verify_dimension_chain`].
#[derive(Debug, Clone)]
pub struct ChainSettings<S> {
    /// Grid for the regularity dimension and local dimensions.
    pub regularity_grid: ScaleGrid,
    /// Grid for `τ(q)` fits (including the box dimension from `τ(0)`).
    pub spectrum_grid: ScaleGrid,
    /// Grid for the Assouad dimension of the support.
    pub assouad_grid: ScaleGrid,
    /// Negative moments for `T(μ)`; the most negative one is used.
    pub q_list: Vec<f64>,
    pub net_factor: f64,
    pub tol: f64,
    pub ends: Ends,
    /// Sites added to the witnesses for the regularity and Assouad scans.
    pub extra_sites: Vec<S>,
    pub chain_tol: f64,
    /// Estimates beyond this count as `+∞` in the comparisons: where the
    /// true values are infinite, finite-scale estimates diverge at
    /// unrelated rates and their order carries no information.
    pub divergence_cap: f64,
}

impl<S> ChainSettings<S> {
    pub fn new(regularity_grid: ScaleGrid, spectrum_grid: ScaleGrid) -> Self {
        ChainSettings {
            regularity_grid,
            assouad_grid: spectrum_grid.clone(),
            spectrum_grid,
            q_list: vec![-10.0],
            net_factor: 0.25,
            tol: DEFAULT_TOL,
            ends: Ends::Conservative,
            extra_sites: Vec::new(),
            chain_tol: CHAIN_TOL,
            divergence_cap: DIVERGENCE_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs - rhs`; recorded only when it exceeds the chain tolerance.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub sup_local_hat: f64,
    pub t_hat: f64,
    pub dimreg_hat: f64,
    pub box_support_hat: f64,
    pub assouad_support_hat: f64,
    pub violations: Vec<Violation>,
    pub dimreg: DimEstimate,
    pub assouad: DimEstimate,
    pub spectrum: LqSpectrumEstimate,
}

impl ChainReport {
    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Estimates the five quantities of the chain
/// `sup local ≤ T ≤ dim_reg` and `box ≤ Assouad ≤ dim_reg`, and records
/// every inequality that fails by more than `chain_tol`.
pub fn verify_dimension_chain<M: MeasureModel>(model: &M, settings: &ChainSettings<M::Site>) -> Result<ChainReport> {
    let witnesses = model.witnesses();
    let mut sites = witnesses.clone();
    sites.extend(settings.extra_sites.iter().cloned());

    let mut sup_local = f64::NEG_INFINITY;
    for w in &witnesses {
        let d = estimate_local_dim_upper(model, w, &settings.regularity_grid, settings.tol, settings.ends)?;
        sup_local = sup_local.max(d);
    }
    let spectrum =
        estimate_t(model, &settings.q_list, &settings.spectrum_grid, settings.net_factor, settings.tol, settings.ends)?;
    let dimreg = estimate_upper_regularity(model, &settings.regularity_grid, &sites, settings.tol, settings.ends)?;
    let tau0 = estimate_tau(model, 0.0, &settings.spectrum_grid, settings.net_factor, settings.tol, settings.ends)?;
    let assouad = estimate_assouad_support(model, &settings.assouad_grid, &sites, settings.net_factor)?;

    let box_dim = -tau0.tau;
    let checks = [
        ("sup_local <= T", sup_local, spectrum.t_hat),
        ("T <= dim_reg", spectrum.t_hat, dimreg.value),
        ("box <= assouad", box_dim, assouad.value),
        ("assouad <= dim_reg", assouad.value, dimreg.value),
    ];
    let cap = |v: f64| if v > settings.divergence_cap { f64::INFINITY } else { v };
    let violations = checks
        .iter()
        .map(|&(name, lhs, rhs)| (name, cap(lhs), cap(rhs)))
        .filter(|(_, lhs, rhs)| lhs > &(rhs + settings.chain_tol))
        .map(|(name, lhs, rhs)| Violation { name: name.to_string(), lhs, rhs, slack: lhs - rhs })
        .collect();
    Ok(ChainReport {
        sup_local_hat: sup_local,
        t_hat: spectrum.t_hat,
        dimreg_hat: dimreg.value,
        box_support_hat: box_dim,
        assouad_support_hat: assouad.value,
        violations,
        dimreg,
        assouad,
        spectrum,
    })
}
