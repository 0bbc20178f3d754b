//! Experiment configuration: a strict, versioned JSON schema.

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dictionary::{self, Activation, Dictionary, FiniteAtomData, SubspaceUnionData};
use crate::energy::{self, EnergyModel, Mode, SmoothnessParams, SpdOperator};
use crate::error::{Error, Result};
use crate::greedy::{GreedyConfig, StepMode};
use crate::sampling;
use crate::vectorspace::{Space, SpaceVector};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub name: String,
    pub space: SpaceConfig,
    pub energy: EnergyConfig,
    /// Overrides the energy's own smoothness metadata.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared: Option<DeclaredConfig>,
    pub dictionary: DictionaryConfig,
    #[serde(default)]
    pub greedy: GreedySection,
    #[serde(default)]
    pub analysis: AnalysisSection,
    pub output: OutputSection,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub n: usize,
    pub q: f64,
    #[serde(default)]
    pub weights: Weights,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum Weights {
    /// All weights one.
    #[default]
    Uniform,
    /// `h = 1/(n+1)` at every interior node.
    DirichletGrid,
    Explicit(Vec<f64>),
}

/// A vector given explicitly, as a constant, or drawn from the energy seed.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum VectorSpec {
    Values(Vec<f64>),
    Constant(f64),
    /// Standard Gaussian coefficients times this scale.
    Random(f64),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum OperatorSpec {
    Identity,
    DirichletLaplacian,
    Matrix(Vec<Vec<f64>>),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnergyConfig {
    Power {
        p: f64,
        target: VectorSpec,
        #[serde(default)]
        seed: u64,
    },
    Quadratic {
        operator: OperatorSpec,
        source: VectorSpec,
        #[serde(default)]
        seed: u64,
    },
    Plaplacian {
        q_exp: f64,
        source: VectorSpec,
        #[serde(default)]
        seed: u64,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DeclaredConfig {
    pub p: f64,
    pub s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lip: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default = "default_mode")]
    pub mode: String,
}

fn default_mode() -> String {
    "bounded".into()
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NeuralParam {
    pub w: Vec<f64>,
    pub b: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DictionaryConfig {
    FullSpace,
    Axes,
    FiniteAtoms {
        atoms: Vec<Vec<f64>>,
    },
    NeuralAtoms {
        points: Vec<Vec<f64>>,
        params: Vec<NeuralParam>,
        activation: String,
    },
    Cone {
        c: f64,
    },
    SubspaceUnion {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        blocks: Option<Vec<Vec<usize>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bases: Option<Vec<Vec<Vec<f64>>>>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct GreedySection {
    pub mode: String,
    pub max_iter: usize,
    pub sigma_stop: f64,
    pub line_tol: f64,
    pub bracket_growth: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ball_radius_r: Option<f64>,
}

impl Default for GreedySection {
    fn default() -> Self {
        let d = GreedyConfig::default();
        Self {
            mode: d.mode.as_str().into(),
            max_iter: d.max_iter,
            sigma_stop: d.sigma_stop,
            line_tol: d.line_tol,
            bracket_growth: d.bracket_growth,
            ball_radius_r: d.ball_radius_r,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisSection {
    pub burn_in: usize,
    /// Absolute gap floor for rate fitting; `1e-13 gap_0` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub floor: Option<f64>,
    /// Monte Carlo trials for norming verification.
    pub trials: usize,
    pub seed: u64,
    /// Dimension of the brute-force slice cross-check.
    pub n_small: usize,
    /// Sample pairs for the smoothness and ellipticity estimates.
    pub samples: usize,
    /// Estimation radius; `2‖u*‖ + 1` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region_radius: Option<f64>,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        Self {
            burn_in: crate::analysis::DEFAULT_BURN_IN,
            floor: None,
            trials: 10_000,
            seed: 0,
            n_small: 4,
            samples: 500,
            region_radius: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub trace_path: PathBuf,
    pub report_path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot_path: Option<PathBuf>,
}

fn field_err(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{field}: {msg}"))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Checks that need no numerical work.
    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(field_err(
                "version",
                format!("unsupported version {}, expected {CONFIG_VERSION}", self.version),
            ));
        }
        if self.space.n == 0 {
            return Err(field_err("space.n", "must be at least 1"));
        }
        let q = self.space.q;
        match &self.energy {
            EnergyConfig::Power { p, .. } => {
                if !(*p > 0.0 && *p <= 1.0) {
                    return Err(field_err("energy.p", format!("{p} outside (0, 1]")));
                }
                if (q - (p + 1.0)).abs() > 1e-12 {
                    return Err(field_err(
                        "space.q",
                        format!("the power energy with p = {p} lives in L^(p+1): need q = {}, got {q}", p + 1.0),
                    ));
                }
            }
            EnergyConfig::Quadratic { .. } => {
                if q != 2.0 {
                    return Err(field_err("space.q", format!("quadratic energies need q = 2, got {q}")));
                }
            }
            EnergyConfig::Plaplacian { q_exp, .. } => {
                if q != *q_exp {
                    return Err(field_err(
                        "space.q",
                        format!("must equal energy.q_exp = {q_exp}, got {q}"),
                    ));
                }
                if self.space.weights != Weights::DirichletGrid {
                    return Err(field_err("space.weights", "the p-Laplacian needs \"dirichlet_grid\""));
                }
            }
        }
        if let Some(d) = &self.declared {
            d.to_params()?.validate().map_err(|e| field_err("declared", e))?;
        }
        self.greedy_config()?.validate().map_err(|e| field_err("greedy", e))?;
        if self.analysis.trials < 100 {
            return Err(field_err("analysis.trials", "need at least 100"));
        }
        if self.analysis.samples < 100 {
            return Err(field_err("analysis.samples", "need at least 100"));
        }
        if !(1..=6).contains(&self.analysis.n_small) {
            return Err(field_err("analysis.n_small", "must lie in 1..=6"));
        }
        Ok(())
    }

    pub fn greedy_config(&self) -> Result<GreedyConfig> {
        let g = &self.greedy;
        let mode = match g.mode.as_str() {
            "sigma-line" => StepMode::SigmaLine,
            "exact-union" => StepMode::ExactUnion,
            other => {
                return Err(field_err(
                    "greedy.mode",
                    format!("unknown mode {other:?}, expected \"sigma-line\" or \"exact-union\""),
                ))
            }
        };
        Ok(GreedyConfig {
            mode,
            max_iter: g.max_iter,
            sigma_stop: g.sigma_stop,
            line_tol: g.line_tol,
            bracket_growth: g.bracket_growth,
            ball_radius_r: g.ball_radius_r,
        })
    }

    pub fn build_space(&self) -> Result<Space> {
        let (n, q) = (self.space.n, self.space.q);
        match &self.space.weights {
            Weights::Uniform => Space::unit(n, q),
            Weights::DirichletGrid => Space::dirichlet_grid(n, q),
            Weights::Explicit(w) => {
                if w.len() != n {
                    return Err(field_err("space.weights", format!("{} weights for n = {n}", w.len())));
                }
                Space::new(w.clone(), q)
            }
        }
        .map_err(|e| field_err("space", e))
    }

    fn build_vector(&self, space: &Space, spec: &VectorSpec, seed: u64, field: &str) -> Result<SpaceVector> {
        match spec {
            VectorSpec::Values(v) => space.vector(v.clone()),
            VectorSpec::Constant(c) => space.vector(vec![*c; space.dim()]),
            VectorSpec::Random(scale) => {
                let mut rng = sampling::rng(seed);
                Ok(sampling::gaussian(space, &mut rng).scale(*scale))
            }
        }
        .map_err(|e| field_err(field, e))
    }

    pub fn build_energy(&self, space: &Space) -> Result<EnergyModel> {
        let model = match &self.energy {
            EnergyConfig::Power { p, target, seed } => {
                let t = self.build_vector(space, target, *seed, "energy.target")?;
                energy::power_energy(&t, *p)
            }
            EnergyConfig::Quadratic { operator, source, seed } => {
                let b = self.build_vector(space, source, *seed, "energy.source")?;
                let op = match operator {
                    OperatorSpec::Identity => Ok(SpdOperator::identity(space)),
                    OperatorSpec::DirichletLaplacian => SpdOperator::dirichlet_laplacian(space),
                    OperatorSpec::Matrix(rows) => {
                        let n = space.dim();
                        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                            return Err(field_err("energy.operator", format!("matrix must be {n}x{n}")));
                        }
                        SpdOperator::new(space, DMatrix::from_fn(n, n, |i, j| rows[i][j]))
                    }
                }
                .map_err(|e| field_err("energy.operator", e))?;
                energy::quadratic_energy(op, &b)
            }
            EnergyConfig::Plaplacian { q_exp, source, seed } => {
                let f = self.build_vector(space, source, *seed, "energy.source")?;
                energy::plaplacian_energy(space.dim(), *q_exp, &f)
            }
        }
        .map_err(|e| field_err("energy", e))?;
        match &self.declared {
            Some(d) => model.with_declared_params(d.to_params()?).map_err(|e| field_err("declared", e)),
            None => Ok(model),
        }
    }

    pub fn build_dictionary(&self, space: &Space) -> Result<Dictionary> {
        let err = |e| field_err("dictionary", e);
        match &self.dictionary {
            DictionaryConfig::FullSpace => Ok(Dictionary::full_space(space)),
            DictionaryConfig::Axes => Dictionary::axes(space).map_err(err),
            DictionaryConfig::FiniteAtoms { atoms } => {
                let vs = atoms
                    .iter()
                    .map(|a| space.vector(a.clone()))
                    .collect::<Result<Vec<_>>>()
                    .map_err(err)?;
                Dictionary::finite(FiniteAtomData::new(vs).map_err(err)?).map_err(err)
            }
            DictionaryConfig::NeuralAtoms { points, params, activation } => {
                let act = match activation.as_str() {
                    "tanh" => Activation::Tanh,
                    "sigmoid" => Activation::Sigmoid,
                    other => {
                        return Err(field_err(
                            "dictionary.activation",
                            format!("unknown activation {other:?}, expected \"tanh\" or \"sigmoid\""),
                        ))
                    }
                };
                let ps: Vec<(Vec<f64>, f64)> = params.iter().map(|p| (p.w.clone(), p.b)).collect();
                let data = dictionary::build_neural_atoms(space, points, &ps, act).map_err(err)?;
                Dictionary::finite(data).map_err(err)
            }
            DictionaryConfig::Cone { c } => Dictionary::cone(space, *c).map_err(err),
            DictionaryConfig::SubspaceUnion { blocks, bases } => {
                let data = match (blocks, bases) {
                    (Some(b), None) => SubspaceUnionData::coordinate_blocks(space, b.clone()),
                    (None, Some(b)) => SubspaceUnionData::from_bases(space, b.clone()),
                    _ => {
                        return Err(field_err(
                            "dictionary",
                            "subspace_union needs exactly one of \"blocks\" or \"bases\"",
                        ))
                    }
                }
                .map_err(err)?;
                Dictionary::subspace_union(data).map_err(err)
            }
        }
    }
}

impl DeclaredConfig {
    pub fn to_params(&self) -> Result<SmoothnessParams> {
        let mode = match self.mode.as_str() {
            "global" => Mode::Global,
            "bounded" => Mode::Bounded,
            other => {
                return Err(field_err(
                    "declared.mode",
                    format!("unknown mode {other:?}, expected \"global\" or \"bounded\""),
                ))
            }
        };
        Ok(SmoothnessParams { p: self.p, s: self.s, lip: self.lip, alpha: self.alpha, mode })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "version": 1,
        "name": "t",
        "space": {"n": 2, "q": 2.0},
        "energy": {"kind": "quadratic", "operator": "identity", "source": {"values": [3.0, 4.0]}},
        "dictionary": {"kind": "axes"},
        "output": {"trace_path": "t.csv", "report_path": "t.json"}
    }"#;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = ExperimentConfig::from_json(MINIMAL).unwrap();
        assert_eq!(cfg.greedy, GreedySection::default());
        assert_eq!(cfg.space.weights, Weights::Uniform);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = MINIMAL.replace("\"name\": \"t\",", "\"name\": \"t\", \"colour\": 1,");
        assert!(matches!(ExperimentConfig::from_json(&text), Err(Error::Config(_))));
    }

    #[test]
    fn power_exponent_mismatch_names_field() {
        let text = MINIMAL.replace(
            r#"{"kind": "quadratic", "operator": "identity", "source": {"values": [3.0, 4.0]}}"#,
            r#"{"kind": "power", "p": 0.5, "target": {"constant": 1.0}}"#,
        );
        let err = ExperimentConfig::from_json(&text).unwrap_err().to_string();
        assert!(err.contains("space.q"), "{err}");
    }

    #[test]
    fn round_trip() {
        let cfg = ExperimentConfig::from_json(MINIMAL).unwrap();
        let back = ExperimentConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, back);
    }
}
