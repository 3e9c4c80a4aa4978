//! Run configuration, read from TOML.
//!
//! ```toml
//! seed = 7
//! tol = 1e-9
//!
//! [model]
//! family = "self-similar"
//! maps = [{ ratio = "1/3", translation = [0] }, { ratio = "1/3", translation = ["2/3"] }]
//! probs = ["7/10", "3/10"]
//!
//! [grid]
//! base = 3
//! exp_min = 0
//! exp_max = 12
//! gap_min = 10
//! gap_max = 12
//!
//! [estimators]
//! run = ["dimreg", "local", "chain"]
//! ```
//!
//! Numbers may be written as TOML numbers or as strings holding a decimal
//! or an exact fraction `"a/b"`; fractions reach the exact-arithmetic
//! paths unchanged.

use std::path::PathBuf;

use serde::Deserialize;

use regdim::estimators::Ends;
use regdim::gallery;
use regdim::selfsimilar::SelfSimilarSystem;
use regdim::sequence::{Decay, SequenceMeasure, DEFAULT_N_MAX};
use regdim::sponge::{epsilon_carpet_exact, SpongeSystem};
use regdim::tangent::LensMeasure;
use regdim::{Number, Point, ScaleGrid, SimilarityMap};

use crate::CliError;

/// A number as written in the file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Num {
    pub fn to_number(&self, key: &str) -> Result<Number, CliError> {
        let bad = |e: regdim::Error| CliError::Config { key: key.to_string(), message: e.to_string() };
        match self {
            Num::Int(i) => Number::from_ratio(*i, 1).map_err(bad),
            Num::Float(x) => Number::from_f64(*x).map_err(bad),
            Num::Text(s) => s.trim().parse::<Number>().map_err(bad),
        }
    }

    pub fn value(&self, key: &str) -> Result<f64, CliError> {
        Ok(self.to_number(key)?.value())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub ratio: Num,
    pub translation: Vec<Num>,
    /// Rotation angle in radians, planar maps only.
    #[serde(default)]
    pub angle: Option<Num>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Law {
    Poly,
    Exp,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecaySpec {
    pub law: Law,
    pub rate: Num,
}

impl DecaySpec {
    fn decay(&self, key: &str) -> Result<Decay, CliError> {
        let a = self.rate.value(&format!("{key}.rate"))?;
        Ok(match self.law {
            Law::Poly => Decay::Poly(a),
            Law::Exp => Decay::Exp(a),
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    SelfSimilar {
        maps: Vec<MapSpec>,
        probs: Vec<Num>,
    },
    Sponge {
        bases: Vec<u32>,
        digits: Vec<Vec<u32>>,
        probs: Vec<Num>,
    },
    /// The one-parameter carpet family.
    Carpet {
        epsilon: Num,
    },
    Sequence {
        points: DecaySpec,
        weights: DecaySpec,
        #[serde(default)]
        n_max: Option<u64>,
    },
    Lens {
        lenses: usize,
        /// Quadrature cells stop at side `2^-cell_exponent`.
        cell_exponent: i32,
        #[serde(default = "yes")]
        restricted: bool,
    },
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub base: Num,
    pub exp_min: i32,
    pub exp_max: i32,
    pub gap_min: u32,
    pub gap_max: u32,
}

impl GridSpec {
    fn grid(&self, key: &str) -> Result<ScaleGrid, CliError> {
        let base = self.base.value(&format!("{key}.base"))?;
        ScaleGrid::new(base, self.exp_min, self.exp_max, self.gap_min, self.gap_max)
            .map_err(|e| CliError::Config { key: key.to_string(), message: e.to_string() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorName {
    Dimreg,
    Local,
    Doubling,
    Tau,
    #[serde(rename = "T", alias = "t")]
    T,
    Assouad,
    Chain,
    Nondoubling,
    DoublingSampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndsSpec {
    Conservative,
    Nominal,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSpec {
    pub run: Vec<EstimatorName>,
    #[serde(default)]
    pub theta: Option<Vec<Num>>,
    #[serde(default)]
    pub q: Option<Vec<Num>>,
    #[serde(default)]
    pub ends: Option<EndsSpec>,
    /// Lens indices for `nondoubling`.
    #[serde(default)]
    pub indices: Option<Vec<usize>>,
    /// Random `(x, r)` samples for `doubling-sampled`.
    #[serde(default)]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub tol: Option<Num>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    pub model: ModelSpec,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub spectrum_grid: Option<GridSpec>,
    #[serde(default)]
    pub assouad_grid: Option<GridSpec>,
    #[serde(default)]
    pub estimators: Option<EstimatorSpec>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config { key: key_of(&e), message: e.message().to_string() })
    }
}

fn key_of(e: &toml::de::Error) -> String {
    // the parser names unknown and missing keys in its message; the span
    // locates everything else
    match e.span() {
        Some(s) => format!("input[{}..{}]", s.start, s.end),
        None => "input".to_string(),
    }
}

/// A constructed model.
#[derive(Debug)]
pub enum Model {
    SelfSimilar(SelfSimilarSystem),
    Sponge(SpongeSystem),
    Sequence(SequenceMeasure),
    Lens(LensMeasure),
}

impl Model {
    pub fn family(&self) -> &'static str {
        match self {
            Model::SelfSimilar(_) => "self-similar",
            Model::Sponge(_) => "sponge",
            Model::Sequence(_) => "sequence",
            Model::Lens(_) => "lens",
        }
    }
}

/// Everything a run needs, validated.
#[derive(Debug)]
pub struct Plan {
    pub model: Model,
    /// Set for the carpet family.
    pub epsilon: Option<f64>,
    pub grid: ScaleGrid,
    pub spectrum_grid: ScaleGrid,
    pub assouad_grid: ScaleGrid,
    pub estimators: Vec<EstimatorName>,
    pub thetas: Vec<f64>,
    pub qs: Vec<f64>,
    pub ends: Ends,
    pub indices: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

fn config_err(key: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Config { key: key.to_string(), message: e.to_string() }
}

fn numbers(xs: &[Num], key: &str) -> Result<Vec<Number>, CliError> {
    xs.iter().enumerate().map(|(i, x)| x.to_number(&format!("{key}[{i}]"))).collect()
}

fn build_model(spec: &ModelSpec) -> Result<(Model, Option<f64>), CliError> {
    Ok(match spec {
        ModelSpec::SelfSimilar { maps, probs } => {
            let mut built = Vec::with_capacity(maps.len());
            for (i, m) in maps.iter().enumerate() {
                let key = format!("model.maps[{i}]");
                let ratio = m.ratio.value(&format!("{key}.ratio"))?;
                let t: Vec<f64> = m
                    .translation
                    .iter()
                    .enumerate()
                    .map(|(j, x)| x.value(&format!("{key}.translation[{j}]")))
                    .collect::<Result<_, _>>()?;
                let map = match &m.angle {
                    Some(a) if t.len() == 2 => SimilarityMap::planar(ratio, a.value(&format!("{key}.angle"))?, [t[0], t[1]]),
                    Some(_) => return Err(config_err(&format!("{key}.angle"), "rotation angles need planar maps")),
                    None => SimilarityMap::scaling(ratio, Point::new(t)),
                };
                built.push(map.map_err(|e| config_err(&key, e))?);
            }
            let probs = numbers(probs, "model.probs")?;
            let sys = SelfSimilarSystem::from_numbers(built, &probs).map_err(|e| config_err("model", e))?;
            (Model::SelfSimilar(sys.with_ssc_check(8)), None)
        }
        ModelSpec::Sponge { bases, digits, probs } => {
            let probs = numbers(probs, "model.probs")?;
            let s = SpongeSystem::from_numbers(bases.clone(), digits.clone(), &probs).map_err(|e| config_err("model", e))?;
            (Model::Sponge(s), None)
        }
        ModelSpec::Carpet { epsilon } => {
            let e = epsilon.to_number("model.epsilon")?;
            let s = epsilon_carpet_exact(&e).map_err(|e| config_err("model.epsilon", e))?;
            (Model::Sponge(s), Some(e.value()))
        }
        ModelSpec::Sequence { points, weights, n_max } => {
            let m = SequenceMeasure::new(
                points.decay("model.points")?,
                weights.decay("model.weights")?,
                n_max.unwrap_or(DEFAULT_N_MAX),
            )
            .map_err(|e| config_err("model", e))?;
            (Model::Sequence(m), None)
        }
        ModelSpec::Lens { lenses, cell_exponent, restricted } => {
            let h = 2f64.powi(-cell_exponent);
            let l = LensMeasure::new(*lenses, h, *restricted).map_err(|e| config_err("model", e))?;
            (Model::Lens(l), None)
        }
    })
}

fn default_grids(model: &Model) -> (ScaleGrid, ScaleGrid, ScaleGrid) {
    match model {
        Model::SelfSimilar(_) => (gallery::selfsimilar_grid(), gallery::spectrum_grid(), gallery::assouad_grid()),
        Model::Sponge(_) => (gallery::carpet_grid(), gallery::spectrum_grid(), gallery::assouad_grid()),
        Model::Sequence(m) => {
            (gallery::sequence_grid(m.points()), gallery::sequence_spectrum_grid(), gallery::sequence_assouad_grid())
        }
        Model::Lens(_) => {
            let g = ScaleGrid::new(2.0, 2, 12, 4, 8).expect("valid grid");
            (g.clone(), g.clone(), g)
        }
    }
}

impl Plan {
    /// Validates the whole configuration; `seed` and `tol` override the file.
    pub fn from_config(cfg: &RunConfig, seed: Option<u64>, tol: Option<f64>) -> Result<Self, CliError> {
        let (model, epsilon) = build_model(&cfg.model)?;
        let (g, sg, ag) = default_grids(&model);
        let grid = cfg.grid.as_ref().map(|s| s.grid("grid")).transpose()?.unwrap_or(g);
        let spectrum_grid = cfg.spectrum_grid.as_ref().map(|s| s.grid("spectrum_grid")).transpose()?.unwrap_or(sg);
        let assouad_grid = cfg.assouad_grid.as_ref().map(|s| s.grid("assouad_grid")).transpose()?.unwrap_or(ag);
        let est = cfg.estimators.clone().unwrap_or(EstimatorSpec {
            run: vec![EstimatorName::Dimreg],
            theta: None,
            q: None,
            ends: None,
            indices: None,
            samples: None,
        });
        let thetas = match &est.theta {
            Some(t) => t.iter().enumerate().map(|(i, x)| x.value(&format!("estimators.theta[{i}]"))).collect::<Result<_, _>>()?,
            None => vec![0.5, 0.25],
        };
        if let Some((i, t)) = thetas.iter().enumerate().find(|(_, t)| !(**t > 0.0 && **t < 1.0)) {
            return Err(config_err(&format!("estimators.theta[{i}]"), format!("theta must lie in (0,1), got {t}")));
        }
        let qs = match &est.q {
            Some(q) => q.iter().enumerate().map(|(i, x)| x.value(&format!("estimators.q[{i}]"))).collect::<Result<_, _>>()?,
            None => vec![-10.0],
        };
        let needs_t = est.run.iter().any(|e| matches!(e, EstimatorName::T | EstimatorName::Chain));
        if needs_t && (!qs.iter().any(|&q| q <= -10.0) || qs.iter().any(|&q| q.is_nan() || q >= 0.0)) {
            return Err(config_err("estimators.q", "T needs negative moments including one q <= -10"));
        }
        let ends = match est.ends {
            Some(EndsSpec::Conservative) => Ends::Conservative,
            Some(EndsSpec::Nominal) => Ends::Nominal,
            // sponge balls are only known up to a bounded factor
            None if matches!(model, Model::Sponge(_)) => Ends::Nominal,
            None => Ends::Conservative,
        };
        let lens_only = est.run.iter().any(|e| matches!(e, EstimatorName::Nondoubling | EstimatorName::DoublingSampled));
        if lens_only && !matches!(model, Model::Lens(_)) {
            return Err(config_err("estimators.run", "nondoubling and doubling-sampled need the lens family"));
        }
        let indices = est.indices.clone().unwrap_or_else(|| match &model {
            Model::Lens(l) => (1..=l.len()).collect(),
            _ => Vec::new(),
        });
        if let Model::Lens(l) = &model {
            if let Some(&i) = indices.iter().find(|&&i| i == 0 || i > l.len()) {
                return Err(config_err("estimators.indices", format!("lens index {i} outside 1..={}", l.len())));
            }
        }
        let tol = match tol {
            Some(t) => t,
            None => cfg.tol.as_ref().map(|t| t.value("tol")).transpose()?.unwrap_or(regdim::DEFAULT_TOL),
        };
        if !(tol > 0.0 && tol < 1.0) {
            return Err(config_err("tol", format!("tolerance must lie in (0,1), got {tol}")));
        }
        Ok(Plan {
            model,
            epsilon,
            grid,
            spectrum_grid,
            assouad_grid,
            estimators: est.run,
            thetas,
            qs,
            ends,
            indices,
            samples: est.samples.unwrap_or(32),
            seed: seed.or(cfg.seed).unwrap_or(0),
            tol,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CANTOR: &str = r#"
        [model]
        family = "self-similar"
        maps = [{ ratio = "1/3", translation = [0] }, { ratio = "1/3", translation = ["2/3"] }]
        probs = ["7/10", "3/10"]
    "#;

    #[test]
    fn fractions_stay_exact() {
        let cfg = RunConfig::parse(CANTOR).unwrap();
        let plan = Plan::from_config(&cfg, None, None).unwrap();
        let Model::SelfSimilar(s) = plan.model else { panic!() };
        assert_eq!(s.probs(), &[0.7, 0.3]);
        assert!(s.cylinder_mass_exact(&[1, 1]).unwrap().is_some());
    }

    #[test]
    fn unknown_keys_are_named() {
        let err = RunConfig::parse(&format!("{CANTOR}\nbogus = 1\n")).unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
        let err = RunConfig::parse("[model]\nfamily = \"carpet\"\nepsilon = 0.25\nextra = 2\n").unwrap_err();
        assert!(err.to_string().contains("extra"), "{err}");
    }

    #[test]
    fn semantic_errors_name_the_key() {
        let cfg = RunConfig::parse("[model]\nfamily = \"carpet\"\nepsilon = \"3/4\"\n").unwrap();
        let err = Plan::from_config(&cfg, None, None).unwrap_err();
        assert!(matches!(&err, CliError::Config { key, .. } if key == "model.epsilon"), "{err}");
        let cfg = RunConfig::parse(&format!("{CANTOR}\n[estimators]\nrun = [\"doubling\"]\ntheta = [2]\n")).unwrap();
        let err = Plan::from_config(&cfg, None, None).unwrap_err();
        assert!(err.to_string().contains("estimators.theta[0]"), "{err}");
        let cfg = RunConfig::parse(&format!("{CANTOR}\n[grid]\nbase = 1\nexp_min = 0\nexp_max = 3\ngap_min = 1\ngap_max = 2\n"))
            .unwrap();
        assert!(Plan::from_config(&cfg, None, None).unwrap_err().to_string().contains("grid"));
    }

    #[test]
    fn overrides_win() {
        let cfg = RunConfig::parse(&format!("seed = 3\ntol = 1e-3\n{CANTOR}")).unwrap();
        let plan = Plan::from_config(&cfg, Some(9), Some(1e-8)).unwrap();
        assert_eq!((plan.seed, plan.tol), (9, 1e-8));
        let plan = Plan::from_config(&cfg, None, None).unwrap();
        assert_eq!((plan.seed, plan.tol), (3, 1e-3));
    }

    #[test]
    fn carpet_defaults_to_nominal_ends() {
        let cfg = RunConfig::parse("[model]\nfamily = \"carpet\"\nepsilon = \"1/4\"\n").unwrap();
        let plan = Plan::from_config(&cfg, None, None).unwrap();
        assert_eq!(plan.ends, Ends::Nominal);
        assert_eq!(plan.epsilon, Some(0.25));
    }
}
