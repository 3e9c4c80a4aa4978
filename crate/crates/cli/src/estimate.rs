use std::time::Instant;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use regdim::estimators::{
    doubling_constant, estimate_assouad_support, estimate_local_dim_upper, estimate_t, estimate_tau, estimate_upper_regularity,
    verify_dimension_chain, ChainSettings, DimEstimate,
};
use regdim::tangent::LensMeasure;
use regdim::{MeasureModel, Point};

use crate::config::{EstimatorName, Model, Plan};
use crate::output::{fmt_f64, Table};

pub const HEADER: [&str; 8] = ["estimator", "value", "witness_x", "witness_r", "witness_R", "gap", "runtime_ms", "error"];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Row {
    pub estimator: String,
    pub value: Option<f64>,
    pub witness_x: Option<Point>,
    pub witness_r: Option<f64>,
    pub witness_big_r: Option<f64>,
    pub gap: Option<u32>,
    pub runtime_ms: u128,
    pub error: Option<String>,
}

impl Row {
    fn value(name: impl Into<String>, v: f64) -> Self {
        Row { estimator: name.into(), value: Some(v), ..Row::default() }
    }

    fn failed(name: impl Into<String>, e: impl ToString) -> Self {
        Row { estimator: name.into(), error: Some(e.to_string()), ..Row::default() }
    }

    fn from_estimate(name: &str, e: &DimEstimate) -> Self {
        Row {
            estimator: name.into(),
            value: Some(e.value),
            witness_x: Some(e.witness.position.clone()),
            witness_r: Some(e.witness.r),
            witness_big_r: Some(e.witness.big_r),
            gap: Some(e.witness.gap),
            ..Row::default()
        }
    }
}

fn fmt_point(p: &Point) -> String {
    p.coords().iter().map(|&c| fmt_f64(c)).collect::<Vec<_>>().join(" ")
}

/// Runs every configured estimator. Failures become rows with the error
/// column set; the run carries on.
pub fn run_estimators(plan: &Plan) -> Vec<Row> {
    match &plan.model {
        Model::SelfSimilar(m) => run_generic(m, plan, m.witnesses(), Vec::new()),
        Model::Sponge(m) => run_generic(m, plan, m.witness_codes(), m.extremal_sites(&plan.grid, 3)),
        Model::Sequence(m) => run_generic(m, plan, m.witness_points(), m.grid_sites(&plan.grid)),
        Model::Lens(m) => {
            let mut rows = run_generic(m, plan, m.witnesses(), Vec::new());
            rows.extend(run_lens(m, plan));
            rows
        }
    }
}

fn timed(f: impl FnOnce() -> Vec<Row>) -> Vec<Row> {
    let start = Instant::now();
    let mut rows = f();
    let ms = start.elapsed().as_millis();
    for r in &mut rows {
        r.runtime_ms = ms;
    }
    rows
}

fn run_generic<M: MeasureModel>(m: &M, plan: &Plan, witnesses: Vec<M::Site>, extra: Vec<M::Site>) -> Vec<Row> {
    let mut sites = witnesses.clone();
    sites.extend(extra.iter().cloned());
    let mut rows = Vec::new();
    for name in &plan.estimators {
        let out = timed(|| match name {
            EstimatorName::Dimreg => match estimate_upper_regularity(m, &plan.grid, &sites, plan.tol, plan.ends) {
                Ok(e) => vec![Row::from_estimate("dimreg", &e)],
                Err(e) => vec![Row::failed("dimreg", e)],
            },
            EstimatorName::Local => {
                let mut best: Option<(f64, usize)> = None;
                for (i, w) in witnesses.iter().enumerate() {
                    match estimate_local_dim_upper(m, w, &plan.grid, plan.tol, plan.ends) {
                        Ok(d) if best.is_none_or(|(b, _)| d > b) => best = Some((d, i)),
                        Ok(_) => {}
                        Err(e) => return vec![Row::failed("local", e)],
                    }
                }
                match best {
                    Some((d, i)) => vec![Row { witness_x: Some(m.position(&witnesses[i])), ..Row::value("local", d) }],
                    None => vec![Row::failed("local", "no witnesses")],
                }
            }
            EstimatorName::Doubling => plan
                .thetas
                .iter()
                .flat_map(|&theta| match doubling_constant(m, theta, &plan.grid, &sites, plan.tol, plan.ends) {
                    Ok(c) => {
                        let at = m.position(&sites[c.site_index]);
                        vec![
                            Row {
                                witness_x: Some(at.clone()),
                                witness_big_r: Some(c.radius),
                                ..Row::value(format!("doubling(theta={theta})"), c.value)
                            },
                            Row {
                                witness_x: Some(at),
                                witness_big_r: Some(c.radius),
                                ..Row::value(format!("doubling_bound(theta={theta})"), c.log_value / -theta.ln())
                            },
                        ]
                    }
                    Err(e) => vec![Row::failed(format!("doubling(theta={theta})"), e)],
                })
                .collect(),
            EstimatorName::Tau => plan
                .qs
                .iter()
                .map(|&q| {
                    let name = format!("tau(q={q})");
                    match estimate_tau(m, q, &plan.spectrum_grid, 0.25, plan.tol, plan.ends) {
                        Ok(t) => Row::value(name, t.tau),
                        Err(e) => Row::failed(name, e),
                    }
                })
                .collect(),
            EstimatorName::T => match estimate_t(m, &plan.qs, &plan.spectrum_grid, 0.25, plan.tol, plan.ends) {
                Ok(s) => vec![Row::value("T", s.t_hat)],
                Err(e) => vec![Row::failed("T", e)],
            },
            EstimatorName::Assouad => match estimate_assouad_support(m, &plan.assouad_grid, &sites, 0.25) {
                Ok(e) => vec![Row::from_estimate("assouad", &e)],
                Err(e) => vec![Row::failed("assouad", e)],
            },
            EstimatorName::Chain => {
                let mut s = ChainSettings::new(plan.grid.clone(), plan.spectrum_grid.clone());
                s.assouad_grid = plan.assouad_grid.clone();
                s.q_list = plan.qs.clone();
                s.tol = plan.tol;
                s.ends = plan.ends;
                s.extra_sites = extra.clone();
                match verify_dimension_chain(m, &s) {
                    Ok(r) => {
                        let mut out = vec![
                            Row::value("chain:sup_local", r.sup_local_hat),
                            Row::value("chain:T", r.t_hat),
                            Row::from_estimate("chain:dimreg", &r.dimreg),
                            Row::value("chain:box", r.box_support_hat),
                            Row::from_estimate("chain:assouad", &r.assouad),
                        ];
                        out.extend(r.violations.iter().map(|v| Row::value(format!("violation:{}", v.name), v.slack)));
                        out
                    }
                    Err(e) => vec![Row::failed("chain", e)],
                }
            }
            EstimatorName::Nondoubling | EstimatorName::DoublingSampled => Vec::new(),
        });
        rows.extend(out);
    }
    rows
}

/// Random `(x, r)` pairs: support points from a fine net and radii
/// log-uniform in `[2^-8, 2^-2]`.
pub fn lens_samples(lens: &LensMeasure, count: usize, seed: u64) -> Vec<(Point, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let net = lens.support_net(1.0 / 64.0);
    (0..count)
        .filter_map(|_| {
            let x = net.choose(&mut rng)?.clone();
            let r = 2f64.powf(-rng.random_range(2.0..8.0));
            Some((x, r))
        })
        .collect()
}

fn run_lens(lens: &LensMeasure, plan: &Plan) -> Vec<Row> {
    let mut rows = Vec::new();
    for name in &plan.estimators {
        let out = timed(|| match name {
            EstimatorName::Nondoubling => match lens.nondoubling_ratios(&plan.indices) {
                Ok(v) => v
                    .into_iter()
                    .map(|(i, q)| Row {
                        witness_x: Some(lens.center(i)),
                        witness_r: Some(lens.radius(i)),
                        witness_big_r: Some(2.0 * lens.radius(i)),
                        ..Row::value(format!("nondoubling(i={i})"), q)
                    })
                    .collect(),
                Err(e) => vec![Row::failed("nondoubling", e)],
            },
            EstimatorName::DoublingSampled => {
                let samples = lens_samples(lens, plan.samples, plan.seed);
                match lens.doubling_ratios(&samples, 1e-3) {
                    Ok(v) => match v.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)) {
                        Some((i, &q)) => vec![Row {
                            witness_x: Some(samples[i].0.clone()),
                            witness_r: Some(samples[i].1),
                            witness_big_r: Some(2.0 * samples[i].1),
                            ..Row::value("doubling-sampled", q)
                        }],
                        None => vec![Row::failed("doubling-sampled", "no samples")],
                    },
                    Err(e) => vec![Row::failed("doubling-sampled", e)],
                }
            }
            _ => Vec::new(),
        });
        rows.extend(out);
    }
    rows
}

/// Rows as CSV. Runtimes are left blank unless `timing` is set, so that
/// output is byte-identical across runs.
pub fn estimate_table(rows: &[Row], hash: String, timing: bool) -> Table {
    let mut t = Table::new(hash, &HEADER);
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    for r in rows {
        t.push(vec![
            r.estimator.clone(),
            opt(r.value),
            r.witness_x.as_ref().map(fmt_point).unwrap_or_default(),
            opt(r.witness_r),
            opt(r.witness_big_r),
            r.gap.map(|g| g.to_string()).unwrap_or_default(),
            if timing { r.runtime_ms.to_string() } else { String::new() },
            r.error.clone().unwrap_or_default(),
        ]);
    }
    t
}
