//! Laplace–Beltrami operator and superharmonic prior candidates.
//!
//! `Δψ = 2 g^{ij̄} ∂_i ∂_j̄ ψ`. The built-in priors are built from the
//! factors `f_{ab} = 1 − ξ^a ξ̄^b`:
//!
//! * `psi1 = Σ_k f_{kk}`, any dimension,
//! * `psi2 = Π_k f_{kk}`, any dimension,
//! * `psi3 = f_{12} f_{21} f_{11} f_{22}`, two dimensions only.
//!
//! For the products the Hessian is formed divided by `ψ`, which keeps
//! `Δψ/ψ` accurate where `ψ` itself is tiny.
//!
//! [`jeffreys_density`] is the unnormalized volume density `det g`.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::kahler::{inverse_metric, metric_determinant, KahlerError, ModelPoint};
use crate::linalg::CMatrix;
use crate::sampling::{draw, ModelShape, SamplingRegion};
use crate::wirtinger;
use crate::C;

/// Step for the differenced Hessian of custom priors.
pub const CUSTOM_HESSIAN_STEP: f64 = 1e-4;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum PriorError {
    #[error("prior {name} needs {expected} coordinates, got {got}")]
    DimensionMismatch {
        name: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("at least one sample is required")]
    NoSamples,
    #[error(transparent)]
    Kahler(#[from] KahlerError),
}

impl PriorError {
    pub fn code(&self) -> &'static str {
        match self {
            Self::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
            Self::NoSamples => "NO_SAMPLES",
            Self::Kahler(KahlerError::SingularMetric { .. }) => "COINCIDENT_ROOTS",
            Self::Kahler(_) => "INVALID_MODEL_POINT",
        }
    }
}

type ValueFn = dyn Fn(&[C]) -> f64 + Send + Sync;
type HessianFn = dyn Fn(&[C]) -> CMatrix + Send + Sync;

/// A real function on the model manifold.
pub enum PriorFunction {
    Psi1,
    Psi2,
    Psi3,
    Custom {
        name: String,
        value: Box<ValueFn>,
        /// `H[(i, j)] = ∂_i ∂_j̄ ψ`; differenced when absent.
        hessian: Option<Box<HessianFn>>,
    },
}

impl fmt::Debug for PriorFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Custom { name, hessian, .. } => f
                .debug_struct("Custom")
                .field("name", name)
                .field("analytic_hessian", &hessian.is_some())
                .finish(),
            other => f.write_str(other.name()),
        }
    }
}

/// Index pairs `(a, b)` of the factors `1 − ξ^a ξ̄^b` in a product prior.
fn product_factors(prior: &PriorFunction, n: usize) -> Option<Vec<(usize, usize)>> {
    match prior {
        PriorFunction::Psi2 => Some((0..n).map(|k| (k, k)).collect()),
        PriorFunction::Psi3 => Some(alloc::vec![(0, 1), (1, 0), (0, 0), (1, 1)]),
        _ => None,
    }
}

fn factor(x: &[C], (a, b): (usize, usize)) -> C {
    C::new(1.0, 0.0) - x[a] * x[b].conj()
}

impl PriorFunction {
    pub fn custom<F>(name: impl Into<String>, value: F) -> Self
    where
        F: Fn(&[C]) -> f64 + Send + Sync + 'static,
    {
        Self::Custom {
            name: name.into(),
            value: Box::new(value),
            hessian: None,
        }
    }

    pub fn custom_with_hessian<F, H>(name: impl Into<String>, value: F, hessian: H) -> Self
    where
        F: Fn(&[C]) -> f64 + Send + Sync + 'static,
        H: Fn(&[C]) -> CMatrix + Send + Sync + 'static,
    {
        Self::Custom {
            name: name.into(),
            value: Box::new(value),
            hessian: Some(Box::new(hessian)),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Self::Psi1 => "psi1",
            Self::Psi2 => "psi2",
            Self::Psi3 => "psi3",
            Self::Custom { name, .. } => name,
        }
    }

    /// Fails unless the prior is defined in dimension `n`.
    pub fn check_dimension(&self, n: usize) -> Result<(), PriorError> {
        let (name, ok, expected) = match self {
            Self::Psi3 => ("psi3", n == 2, 2),
            Self::Psi1 => ("psi1", n >= 1, 1),
            Self::Psi2 => ("psi2", n >= 1, 1),
            Self::Custom { .. } => return Ok(()),
        };
        if ok {
            Ok(())
        } else {
            Err(PriorError::DimensionMismatch { name, expected, got: n })
        }
    }

    /// `ψ(ξ)`.
    pub fn value(&self, m: &ModelPoint) -> Result<f64, PriorError> {
        let x = m.params();
        self.check_dimension(x.len())?;
        Ok(match self {
            Self::Psi1 => x.iter().map(|v| 1.0 - v.norm_sqr()).sum(),
            Self::Custom { value, .. } => value(x),
            _ => {
                let fs = product_factors(self, x.len()).expect("product prior");
                fs.into_iter().fold(C::new(1.0, 0.0), |acc, ab| acc * factor(x, ab)).re
            }
        })
    }

    /// `∂_i ∂_j̄ ψ / ψ` for product priors.
    fn normalized_hessian(x: &[C], fs: &[(usize, usize)]) -> CMatrix {
        let n = x.len();
        let vals: Vec<C> = fs.iter().map(|&ab| factor(x, ab)).collect();
        // ∂_i f_ab = −δ_ia ξ̄^b, ∂_j̄ f_ab = −δ_jb ξ^a, ∂_i ∂_j̄ f_ab = −δ_ia δ_jb
        CMatrix::from_fn(n, |i, j| {
            let mut acc = C::new(0.0, 0.0);
            for (m, &(a, b)) in fs.iter().enumerate() {
                if a == i && b == j {
                    acc -= C::new(1.0, 0.0) / vals[m];
                }
            }
            for (m, &(a, _)) in fs.iter().enumerate() {
                if a != i {
                    continue;
                }
                let di = -x[fs[m].1].conj() / vals[m];
                for (mm, &(aa, bb)) in fs.iter().enumerate() {
                    if mm == m || bb != j {
                        continue;
                    }
                    acc += di * (-x[aa] / vals[mm]);
                }
            }
            acc
        })
    }

    /// `H[(i, j)] = ∂_i ∂_j̄ ψ`.
    pub fn hessian(&self, m: &ModelPoint) -> Result<CMatrix, PriorError> {
        let x = m.params();
        let n = x.len();
        self.check_dimension(n)?;
        Ok(match self {
            Self::Psi1 => CMatrix::identity(n).scale(C::new(-1.0, 0.0)),
            Self::Custom { value, hessian, .. } => match hessian {
                Some(h) => h(x),
                None => {
                    let f = |p: &[C]| C::new(value(p), 0.0);
                    wirtinger::mixed_hessian(&f, x, CUSTOM_HESSIAN_STEP)
                }
            },
            _ => {
                let fs = product_factors(self, n).expect("product prior");
                let psi = self.value(m)?;
                Self::normalized_hessian(x, &fs).scale(C::new(psi, 0.0))
            }
        })
    }
}

/// `Δψ = 2 g^{ij̄} ∂_i ∂_j̄ ψ`.
pub fn laplace_beltrami(psi: &PriorFunction, m: &ModelPoint) -> Result<f64, PriorError> {
    let h = psi.hessian(m)?;
    let inv = inverse_metric(m)?;
    Ok(2.0 * inv.contract(&h).re)
}

/// `Δψ/ψ`. Product priors never form `Δψ` itself.
pub fn laplace_beltrami_ratio(psi: &PriorFunction, m: &ModelPoint) -> Result<f64, PriorError> {
    let x = m.params();
    psi.check_dimension(x.len())?;
    match product_factors(psi, x.len()) {
        Some(fs) => {
            let inv = inverse_metric(m)?;
            let h = PriorFunction::normalized_hessian(x, &fs);
            Ok(2.0 * inv.contract(&h).re)
        }
        None => Ok(laplace_beltrami(psi, m)? / psi.value(m)?),
    }
}

/// Unnormalized Jeffreys density `det g_{ij̄}`.
pub fn jeffreys_density(m: &ModelPoint) -> f64 {
    metric_determinant(m)
}

/// Result of evaluating one sampled point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleOutcome {
    pub laplacian: f64,
    pub psi: f64,
    pub rejected: usize,
}

/// Draws sample `index` and evaluates `ψ` and `Δψ` there.
pub fn evaluate_sample(
    psi: &PriorFunction,
    shape: ModelShape,
    seed: u64,
    index: u64,
) -> Result<SampleOutcome, PriorError> {
    let d = draw(shape, SamplingRegion::default(), seed, index);
    Ok(SampleOutcome {
        laplacian: laplace_beltrami(psi, &d.point)?,
        psi: psi.value(&d.point)?,
        rejected: d.rejected,
    })
}

/// Order statistics of the sampled `Δψ` values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MarginSummary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub p05: f64,
    pub p50: f64,
    pub p95: f64,
}

/// Sampled evidence of superharmonicity. `violations == 0` says nothing
/// about points that were not drawn.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperharmonicReport {
    pub prior: String,
    pub shape: ModelShape,
    pub seed: u64,
    pub samples: usize,
    /// Points with `Δψ > 0`.
    pub violations: usize,
    /// Points with `ψ ≤ 0`.
    pub nonpositive: usize,
    /// Largest `Δψ` seen.
    pub worst_value: f64,
    pub margin: MarginSummary,
    /// Tuples redrawn for near-coincident roots.
    pub rejected: usize,
}

impl SuperharmonicReport {
    /// Summarizes outcomes given in sample order.
    pub fn from_outcomes(
        prior: &str,
        shape: ModelShape,
        seed: u64,
        outcomes: &[SampleOutcome],
    ) -> Result<Self, PriorError> {
        if outcomes.is_empty() {
            return Err(PriorError::NoSamples);
        }
        let mut values: Vec<f64> = outcomes.iter().map(|o| o.laplacian).collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        values.sort_by(f64::total_cmp);
        let pct = |q: f64| values[libm::round(q * (values.len() - 1) as f64) as usize];
        Ok(Self {
            prior: prior.into(),
            shape,
            seed,
            samples: outcomes.len(),
            violations: outcomes.iter().filter(|o| o.laplacian > 0.0).count(),
            nonpositive: outcomes.iter().filter(|o| o.psi <= 0.0).count(),
            worst_value: values[values.len() - 1],
            margin: MarginSummary {
                min: values[0],
                max: values[values.len() - 1],
                mean,
                p05: pct(0.05),
                p50: pct(0.5),
                p95: pct(0.95),
            },
            rejected: outcomes.iter().map(|o| o.rejected).sum(),
        })
    }
}

/// Evaluates `Δψ` at `samples` seeded points of the stability region.
pub fn check_superharmonic(
    psi: &PriorFunction,
    shape: ModelShape,
    samples: usize,
    seed: u64,
) -> Result<SuperharmonicReport, PriorError> {
    if samples == 0 {
        return Err(PriorError::NoSamples);
    }
    psi.check_dimension(shape.dimension())?;
    let outcomes = (0..samples as u64)
        .map(|i| evaluate_sample(psi, shape, seed, i))
        .collect::<Result<Vec<_>, _>>()?;
    SuperharmonicReport::from_outcomes(psi.name(), shape, seed, &outcomes)
}
