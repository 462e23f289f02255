//! Kähler information geometry of minimum-phase linear filters.
//!
//! The crate covers rational transfer functions (AR, MA and ARMA filters with
//! optional Blaschke and `z^R` factors) and computes, in pole/zero
//! coordinates:
//!
//! * the complex cepstrum and its squared Hardy norm, which is the Kähler
//!   potential of the filter manifold,
//! * the Hermitian metric, its inverse and determinant,
//! * α-connections, the symmetric tensor `T`, the Ricci tensor and scalar
//!   curvature, including the α-linear curvature corrections,
//! * α-divergences between spectral densities,
//! * Laplace–Beltrami values of candidate prior functions.
//!
//! Two independent routes are provided. [`kahler`] holds the closed forms;
//! [`numeric`] evaluates the defining contour integrals on the unit circle
//! with the trapezoid rule, using only analytic derivatives of `log h`. The
//! test suites compare the two.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod filter;
pub mod kahler;
pub mod linalg;
pub mod numeric;
pub mod priors;
pub mod quadrature;
pub mod sampling;
pub mod tensors;
pub mod wirtinger;

pub use filter::{
    outer_factor, CepstrumSeries, FilterError, FilterSpec, RootKind, ValidatedFilter, DEFAULT_STABILITY_MARGIN,
    DEFAULT_TRUNCATION,
};
pub use kahler::{CoincidentRoots, InverseMetric, KahlerError, ModelPoint, PotentialValue};
pub use linalg::{CMatrix, Tensor3};
pub use numeric::{DivergenceValue, Estimate, NumericError, QuadratureConfig};
pub use priors::{PriorError, PriorFunction, SuperharmonicReport};
pub use sampling::ModelShape;
pub use tensors::{ConnectionTensors, CurvatureReport, HermitianMetric};

/// Complex scalar used for every complexified coordinate.
pub type ComplexScalar = num_complex::Complex64;

/// Shorthand used throughout the crate.
pub(crate) type C = ComplexScalar;
