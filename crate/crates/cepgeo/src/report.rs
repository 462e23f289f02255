//! Serialized command outputs. Every report re-parses into its own type.

use serde::{Deserialize, Serialize};

use crate::number::{Cx, Num};
use crate::schema::TensorDocument;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Problem {
    pub code: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    /// Every violated constraint of an input filter.
    #[serde(default)]
    pub violations: Vec<Problem>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorReport {
    pub error: ErrorBody,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateReport {
    pub valid: bool,
    pub dimension: usize,
    pub labels: Vec<String>,
    pub gain: Num,
    pub gain_term: Num,
    pub z_power: i32,
    pub max_root_modulus: Num,
    /// Pairs of coordinates with identical values.
    pub common_roots: Vec<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CepstrumReport {
    pub truncation: usize,
    pub phi0: Cx,
    pub coeffs: Vec<Cx>,
    pub blaschke_coeffs: Vec<Cx>,
    pub hardy_norm_squared: Num,
    pub tail_bound: Num,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialReport {
    pub value: Num,
    pub tail_bound: Num,
    pub truncation: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorsReport {
    pub alpha: Num,
    pub labels: Vec<String>,
    pub potential: PotentialReport,
    pub det_g: Num,
    pub scalar: Num,
    pub warnings: Vec<Problem>,
    pub tensors: Vec<TensorDocument>,
}

impl TensorsReport {
    pub fn tensor(&self, name: &str) -> Option<&TensorDocument> {
        self.tensors.iter().find(|t| t.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivergenceReport {
    pub alpha: Num,
    pub value: Num,
    pub nodes: usize,
    pub change: Num,
    pub tol: Num,
    pub unconverged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleResiduals {
    pub metric: Num,
    pub gamma: Num,
    pub gamma_pure: Num,
    pub gamma_split: Num,
    pub gamma_split_bar: Num,
    pub t: Num,
    pub t_pure: Num,
    pub ricci: Num,
    pub scalar: Num,
}

impl OracleResiduals {
    pub fn max(&self) -> f64 {
        [
            self.metric,
            self.gamma,
            self.gamma_pure,
            self.gamma_split,
            self.gamma_split_bar,
            self.t,
            self.t_pure,
            self.ricci,
            self.scalar,
        ]
        .iter()
        .map(|n| n.0)
        .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleReport {
    pub alpha: Num,
    pub nodes: usize,
    /// Max-norm relative residual per tensor family.
    pub residuals: OracleResiduals,
    pub max_residual: Num,
    pub threshold: Num,
    pub pass: bool,
    /// Largest change seen when doubling the nodes.
    pub change: Num,
    pub unconverged: bool,
    pub warnings: Vec<Problem>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualityCheckReport {
    pub alpha: Num,
    pub nodes: usize,
    pub max_residual: Num,
    pub reciprocal_residual: Num,
    pub threshold: Num,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvarianceCheckReport {
    pub nodes: usize,
    pub identity: Num,
    pub z_power: Num,
    pub blaschke: Num,
    /// `null` when the filter has no zeros.
    pub reflection: Option<Num>,
    pub max_residual: Num,
    pub threshold: Num,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelReport {
    pub p: usize,
    pub q: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarginReport {
    pub min: Num,
    pub max: Num,
    pub mean: Num,
    pub p05: Num,
    pub p50: Num,
    pub p95: Num,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorReport {
    pub prior: String,
    pub model: ModelReport,
    pub seed: u64,
    pub samples: usize,
    pub violations: usize,
    pub nonpositive: usize,
    pub worst_value: Num,
    pub margin: MarginReport,
    pub rejected: usize,
    pub pass: bool,
}
