//! Quadrature oracle for the geometry of a filter.
//!
//! Every object is a circle mean of products of
//! `D_i = ∂_i log h = −c_i/(z − ξ^i)` and `S_i = ∂_i² log h = −c_i/(z − ξ^i)²`,
//! evaluated in closed form at the nodes. Antiholomorphic indices use
//! `D_ī = conj(D_i)`; mixed second derivatives vanish.
//!
//! ```text
//! g_{μν}        = ⟨D_μ D_ν⟩
//! Γ^{(α)}_{μν,ρ} = ⟨(D_{μν} + α D_μ D_ν) D_ρ⟩
//! T_{μνρ}        = −2 ⟨D_μ D_ν D_ρ⟩
//! ```
//!
//! Nothing here calls into [`crate::kahler`].

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use thiserror::Error;

use crate::filter::{outer_factor, FilterError, FilterSpec, RootKind, ValidatedFilter};
use crate::linalg::{CMatrix, Tensor3};
use crate::quadrature::{circle_mean, nodes};
use crate::tensors::{coordinate_labels, ConnectionTensors, CurvatureReport, HermitianMetric, GAIN_LABEL};
use crate::wirtinger;
use crate::C;

pub const DEFAULT_NODES: usize = 4096;
pub const DEFAULT_DERIV_STEP: f64 = 1e-5;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const MIN_NODES: usize = 64;
pub const DERIV_STEP_RANGE: (f64, f64) = (1e-7, 1e-3);

/// Points on each Cauchy contour in [`metric_via_transfer`].
const CONTOUR_POINTS: usize = 16;
/// Contour radius as a fraction of the distance to the unit circle.
const CONTOUR_FRACTION: f64 = 0.1;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum NumericError {
    #[error("node count must be a power of two and at least {MIN_NODES}, got {nodes}")]
    InvalidNodes { nodes: usize },
    #[error("derivative step must lie in [1e-7, 1e-3], got {step}")]
    InvalidDerivStep { step: f64 },
    #[error("tolerance must be positive, got {tol}")]
    InvalidTolerance { tol: f64 },
    #[error("quadrature metric is singular")]
    SingularMetric,
    #[error(transparent)]
    Filter(#[from] FilterError),
}

impl NumericError {
    pub fn code(&self) -> &'static str {
        match self {
            Self::InvalidNodes { .. } => "INVALID_NODES",
            Self::InvalidDerivStep { .. } => "INVALID_DERIV_STEP",
            Self::InvalidTolerance { .. } => "INVALID_TOLERANCE",
            Self::SingularMetric => "SINGULAR_METRIC",
            Self::Filter(e) => e.code(),
        }
    }
}

/// Grid size, differencing step and convergence tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureConfig {
    pub nodes: usize,
    pub deriv_step: f64,
    /// Maximum entrywise change between `M` and `2M` nodes.
    pub tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            nodes: DEFAULT_NODES,
            deriv_step: DEFAULT_DERIV_STEP,
            tol: DEFAULT_TOLERANCE,
        }
    }
}

impl QuadratureConfig {
    pub fn new(nodes: usize, deriv_step: f64, tol: f64) -> Result<Self, NumericError> {
        let cfg = Self { nodes, deriv_step, tol };
        cfg.check()?;
        Ok(cfg)
    }

    pub fn with_nodes(nodes: usize) -> Result<Self, NumericError> {
        Self::new(nodes, DEFAULT_DERIV_STEP, DEFAULT_TOLERANCE)
    }

    pub fn check(&self) -> Result<(), NumericError> {
        if self.nodes < MIN_NODES || !self.nodes.is_power_of_two() {
            return Err(NumericError::InvalidNodes { nodes: self.nodes });
        }
        let (lo, hi) = DERIV_STEP_RANGE;
        if !(self.deriv_step >= lo && self.deriv_step <= hi) {
            return Err(NumericError::InvalidDerivStep { step: self.deriv_step });
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(NumericError::InvalidTolerance { tol: self.tol });
        }
        Ok(())
    }
}

/// A quadrature result at `nodes`, with the change seen at `2 * nodes`.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub nodes: usize,
    pub change: f64,
    /// `change > tol`. A warning, not a failure.
    pub unconverged: bool,
}

fn estimate<T>(
    cfg: &QuadratureConfig,
    compute: impl Fn(usize) -> T,
    diff: impl Fn(&T, &T) -> f64,
) -> Result<Estimate<T>, NumericError> {
    cfg.check()?;
    let value = compute(cfg.nodes);
    let refined = compute(2 * cfg.nodes);
    let change = diff(&value, &refined);
    Ok(Estimate {
        value,
        nodes: cfg.nodes,
        change,
        unconverged: change.is_nan() || change > cfg.tol,
    })
}

/// `max |a − b| / max |b|`, or the absolute difference when `b` vanishes.
pub fn relative_residual(a: &[C], b: &[C]) -> f64 {
    assert_eq!(a.len(), b.len());
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let scale = b.iter().map(|y| y.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// `∂ log h` and `∂² log h` at the circle nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct LogDerivatives {
    pub nodes: Vec<C>,
    /// `first[i][k] = ∂_i log h(z_k)`.
    pub first: Vec<Vec<C>>,
    /// `second[i][k] = ∂_i² log h(z_k)`; cross derivatives vanish.
    pub second: Vec<Vec<C>>,
    pub labels: Vec<alloc::string::String>,
}

impl LogDerivatives {
    pub fn dimension(&self) -> usize {
        self.first.len()
    }

    fn len(&self) -> usize {
        self.nodes.len()
    }
}

fn derivatives_at(params: &[C], sig: &[f64], gain: Option<f64>, m: usize) -> LogDerivatives {
    let z = nodes(m);
    let mut first = Vec::with_capacity(params.len() + 1);
    let mut second = Vec::with_capacity(params.len() + 1);
    if let Some(sigma) = gain {
        first.push(vec![C::new(2.0 / sigma, 0.0); m]);
        second.push(vec![C::new(-2.0 / (sigma * sigma), 0.0); m]);
    }
    for (x, c) in params.iter().zip(sig) {
        let d: Vec<C> = z.iter().map(|zk| -c / (zk - x)).collect();
        let s: Vec<C> = z.iter().map(|zk| -c / ((zk - x) * (zk - x))).collect();
        first.push(d);
        second.push(s);
    }
    LogDerivatives {
        nodes: z,
        first,
        second,
        labels: vec![],
    }
}

/// Analytic `∂_i log h` at the `cfg.nodes` circle nodes.
pub fn log_derivatives(f: &ValidatedFilter, cfg: &QuadratureConfig) -> Result<LogDerivatives, NumericError> {
    cfg.check()?;
    let mut out = derivatives_at(&f.params(), &f.signature(), None, cfg.nodes);
    out.labels = coordinate_labels(&f.kinds());
    Ok(out)
}

/// As [`log_derivatives`], with the gain σ prepended as coordinate 0:
/// `∂_σ log h = 2/σ`.
pub fn log_derivatives_with_gain(f: &ValidatedFilter, cfg: &QuadratureConfig) -> Result<LogDerivatives, NumericError> {
    cfg.check()?;
    let mut out = derivatives_at(&f.params(), &f.signature(), Some(f.gain()), cfg.nodes);
    out.labels = core::iter::once(GAIN_LABEL.into())
        .chain(coordinate_labels(&f.kinds()))
        .collect();
    Ok(out)
}

fn metric_from(d: &LogDerivatives) -> HermitianMetric {
    let n = d.dimension();
    let m = d.len();
    let mut mixed = CMatrix::zeros(n);
    let mut pure = CMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let (a, b) = (&d.first[i], &d.first[j]);
            let g = circle_mean(m, |k| a[k] * b[k].conj());
            let p = circle_mean(m, |k| a[k] * b[k]);
            if i == j {
                mixed[(i, i)] = C::new(g.re, 0.0);
            } else {
                mixed[(i, j)] = g;
                mixed[(j, i)] = g.conj();
            }
            pure[(i, j)] = p;
            pure[(j, i)] = p;
        }
    }
    HermitianMetric {
        mixed,
        pure,
        labels: d.labels.clone(),
    }
}

fn metric_diff(a: &HermitianMetric, b: &HermitianMetric) -> f64 {
    a.mixed.max_abs_diff(&b.mixed).max(a.pure.max_abs_diff(&b.pure))
}

/// `g_{ij̄} = ⟨D_i conj D_j⟩`, `g_{ij} = ⟨D_i D_j⟩`. The mixed block is
/// Hermitian by construction.
pub fn metric_numeric(f: &ValidatedFilter, cfg: &QuadratureConfig) -> Result<Estimate<HermitianMetric>, NumericError> {
    let labels = coordinate_labels(&f.kinds());
    let (params, sig) = (f.params(), f.signature());
    estimate(
        cfg,
        |m| {
            let mut d = derivatives_at(&params, &sig, None, m);
            d.labels = labels.clone();
            metric_from(&d)
        },
        metric_diff,
    )
}

/// Metric on the full manifold, gain first.
pub fn metric_numeric_with_gain(
    f: &ValidatedFilter,
    cfg: &QuadratureConfig,
) -> Result<Estimate<HermitianMetric>, NumericError> {
    let (params, sig, gain) = (f.params(), f.signature(), f.gain());
    let labels: Vec<_> = core::iter::once(GAIN_LABEL.into())
        .chain(coordinate_labels(&f.kinds()))
        .collect();
    estimate(
        cfg,
        |m| {
            let mut d = derivatives_at(&params, &sig, Some(gain), m);
            d.labels = labels.clone();
            metric_from(&d)
        },
        metric_diff,
    )
}

fn connection_from(d: &LogDerivatives, alpha: f64) -> ConnectionTensors {
    let n = d.dimension();
    let m = d.len();
    let dd = &d.first;
    let ss = &d.second;
    let second = |i: usize, j: usize, k: usize| if i == j { ss[i][k] } else { C::new(0.0, 0.0) };
    ConnectionTensors {
        alpha,
        gamma_mixed: Tensor3::from_fn(n, |i, j, l| {
            circle_mean(m, |k| (second(i, j, k) + dd[i][k] * dd[j][k] * alpha) * dd[l][k].conj())
        }),
        gamma_pure: Tensor3::from_fn(n, |i, j, l| {
            circle_mean(m, |k| (second(i, j, k) + dd[i][k] * dd[j][k] * alpha) * dd[l][k])
        }),
        gamma_split: Tensor3::from_fn(n, |i, j, l| {
            circle_mean(m, |k| dd[i][k] * dd[j][k].conj() * dd[l][k] * alpha)
        }),
        gamma_split_bar: Tensor3::from_fn(n, |i, j, l| {
            circle_mean(m, |k| dd[i][k] * (dd[j][k] * dd[l][k]).conj() * alpha)
        }),
        t_mixed: Tensor3::from_fn(n, |i, j, l| {
            circle_mean(m, |k| dd[i][k] * dd[j][k] * dd[l][k].conj()) * -2.0
        }),
        t_pure: Tensor3::from_fn(n, |i, j, l| circle_mean(m, |k| dd[i][k] * dd[j][k] * dd[l][k]) * -2.0),
    }
}

/// All four `Γ^{(α)}` families and both `T` families by quadrature.
pub fn connection_numeric(
    f: &ValidatedFilter,
    alpha: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate<ConnectionTensors>, NumericError> {
    let (params, sig) = (f.params(), f.signature());
    estimate(
        cfg,
        |m| connection_from(&derivatives_at(&params, &sig, None, m), alpha),
        ConnectionTensors::max_abs_diff,
    )
}

/// `T` by quadrature; the connection fields hold `Γ⁰`.
pub fn t_tensor_numeric(
    f: &ValidatedFilter,
    cfg: &QuadratureConfig,
) -> Result<Estimate<ConnectionTensors>, NumericError> {
    connection_numeric(f, 0.0, cfg)
}

/// `R⁰_{ij̄} = −∂_i ∂_j̄ log det g` with every derivative of `g` itself
/// taken analytically under the integral:
///
/// `∂_i ∂_j̄ log det g = tr(g⁻¹ C_{ij}) − tr(g⁻¹ B_j g⁻¹ A_i)` where
/// `A_i = ∂_i g` (row `i` is `⟨S_i conj D_l⟩`), `B_j = ∂_j̄ g` (column `j` is
/// `⟨D_k conj S_j⟩`) and `C_{ij} = ∂_i ∂_j̄ g` (single entry `⟨S_i conj S_j⟩`).
fn ricci_from(d: &LogDerivatives) -> Option<CurvatureReport> {
    let n = d.dimension();
    let m = d.len();
    let g = metric_from(d).mixed;
    let lu = g.lu()?;
    let gi = lu.inverse();
    let a = CMatrix::from_fn(n, |i, l| circle_mean(m, |k| d.second[i][k] * d.first[l][k].conj()));
    let b = CMatrix::from_fn(n, |kk, j| circle_mean(m, |k| d.first[kk][k] * d.second[j][k].conj()));
    let cc = CMatrix::from_fn(n, |i, j| circle_mean(m, |k| d.second[i][k] * d.second[j][k].conj()));
    let ricci = CMatrix::from_fn(n, |i, j| {
        // tr(g⁻¹ C_ij) = g⁻¹[j][i] C[i][j]
        let t1 = gi[(j, i)] * cc[(i, j)];
        // tr(g⁻¹ B_j g⁻¹ A_i) = Σ_{k,l} g⁻¹[l][k] B[k][j] g⁻¹[j][i] A[i][l]
        let mut t2 = C::new(0.0, 0.0);
        for k in 0..n {
            for l in 0..n {
                t2 += gi[(l, k)] * b[(k, j)] * gi[(j, i)] * a[(i, l)];
            }
        }
        -(t1 - t2)
    });
    let mut scalar = C::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            scalar += gi[(j, i)] * ricci[(i, j)];
        }
    }
    Some(CurvatureReport {
        alpha: 0.0,
        ricci,
        scalar: scalar.re,
        det_g: lu.determinant().re,
        coincident: None,
    })
}

/// Ricci tensor, scalar curvature and determinant from the quadrature metric.
pub fn ricci_numeric(f: &ValidatedFilter, cfg: &QuadratureConfig) -> Result<Estimate<CurvatureReport>, NumericError> {
    let (params, sig) = (f.params(), f.signature());
    let est = estimate(
        cfg,
        |m| ricci_from(&derivatives_at(&params, &sig, None, m)),
        |a, b| match (a, b) {
            (Some(a), Some(b)) => a.ricci.max_abs_diff(&b.ricci),
            _ => f64::INFINITY,
        },
    )?;
    match est.value {
        Some(value) => Ok(Estimate {
            value,
            nodes: est.nodes,
            change: est.change,
            unconverged: est.unconverged,
        }),
        None => Err(NumericError::SingularMetric),
    }
}

/// `D^{(α)}(S_1 ‖ S_2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DivergenceValue {
    pub alpha: f64,
    pub value: f64,
}

/// `(e^{x} − 1 − x) / α²` with `x = αL`, by series when `x` is small.
fn alpha_integrand(alpha: f64, l: f64) -> f64 {
    if alpha == 0.0 {
        return 0.5 * l * l;
    }
    let x = alpha * l;
    if x.abs() < 0.5 {
        // Σ_{k≥2} x^k/k! divided by α², i.e. L² Σ_{k≥2} x^{k−2}/k!
        let mut term: f64 = 0.5;
        let mut sum: f64 = 0.0;
        let mut k = 2.0;
        while term.abs() > 1e-18 * sum.abs().max(f64::MIN_POSITIVE) {
            sum += term;
            k += 1.0;
            term *= x / k;
        }
        l * l * sum
    } else {
        (libm::expm1(x) - x) / (alpha * alpha)
    }
}

/// `D^{(α)}(S_1‖S_2) = ⟨((S_2/S_1)^α − 1 − α log(S_2/S_1))/α²⟩` for
/// `α ≠ 0` and `⟨(log S_2 − log S_1)²⟩/2` for `α = 0`, evaluated from log
/// densities.
pub fn divergence(
    f1: &ValidatedFilter,
    f2: &ValidatedFilter,
    alpha: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate<DivergenceValue>, NumericError> {
    estimate(
        cfg,
        |m| {
            let value = circle_mean(m, |k| {
                let w = 2.0 * PI * k as f64 / m as f64;
                let l = f2.log_spectral_density(w) - f1.log_spectral_density(w);
                C::new(alpha_integrand(alpha, l), 0.0)
            })
            .re;
            DivergenceValue { alpha, value }
        },
        |a, b| (a.value - b.value).abs(),
    )
}

/// Metric from `h` alone: each `∂_i log h(z)` is a Cauchy contour integral of
/// `log(h(ξ + t e_i; z) / h(ξ; z))` around `t = 0`, with `h` evaluated by
/// [`FilterSpec::transfer`]. Works for any spec whose roots avoid the circle,
/// and sees the `z^R` and Blaschke factors.
pub fn metric_via_transfer(spec: &FilterSpec, cfg: &QuadratureConfig) -> Result<HermitianMetric, NumericError> {
    cfg.check()?;
    let m = cfg.nodes;
    let z = nodes(m);
    let params: Vec<C> = spec.poles.iter().chain(&spec.zeros).copied().collect();
    let n = params.len();
    let omega: Vec<C> = (0..CONTOUR_POINTS)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / CONTOUR_POINTS as f64;
            C::new(libm::cos(t), libm::sin(t))
        })
        .collect();
    let base: Vec<C> = z.iter().map(|zk| spec.transfer(*zk)).collect::<Result<_, _>>()?;
    let mut first = Vec::with_capacity(n);
    for i in 0..n {
        let dist = (params[i].norm() - 1.0).abs();
        let r = CONTOUR_FRACTION * dist;
        let mut d = vec![C::new(0.0, 0.0); m];
        for w in &omega {
            let mut shifted = params.clone();
            shifted[i] += w * r;
            let s = spec.with_params(&shifted);
            for (k, zk) in z.iter().enumerate() {
                let ratio = s.transfer(*zk)? / base[k];
                d[k] += ratio.ln() * w.conj();
            }
        }
        for v in &mut d {
            *v /= CONTOUR_POINTS as f64 * r;
        }
        first.push(d);
    }
    let kinds: Vec<RootKind> = spec
        .poles
        .iter()
        .map(|_| RootKind::Pole)
        .chain(spec.zeros.iter().map(|_| RootKind::Zero))
        .collect();
    let d = LogDerivatives {
        nodes: z,
        second: vec![],
        first,
        labels: coordinate_labels(&kinds),
    };
    Ok(metric_from(&d))
}

/// Metric residuals under transformations that should leave it unchanged,
/// all computed by [`metric_via_transfer`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InvarianceReport {
    pub identity: f64,
    /// `z^R` with `R` raised by 5.
    pub z_power: f64,
    /// Blaschke point 0.4 appended.
    pub blaschke: f64,
    /// Every zero reflected out of the disk, gain compensated, then mapped
    /// back by [`outer_factor`]. `None` without zeros.
    pub reflection: Option<f64>,
}

impl InvarianceReport {
    pub fn max_residual(&self) -> f64 {
        [
            self.identity,
            self.z_power,
            self.blaschke,
            self.reflection.unwrap_or(0.0),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn invariance_suite(f: &ValidatedFilter, cfg: &QuadratureConfig) -> Result<InvarianceReport, NumericError> {
    let spec = f.spec();
    let base = metric_via_transfer(spec, cfg)?;
    let residual = |other: &FilterSpec| -> Result<f64, NumericError> {
        Ok(metric_via_transfer(other, cfg)?.mixed.max_abs_diff(&base.mixed))
    };

    let identity = residual(&spec.clone())?;

    let mut powered = spec.clone();
    powered.z_power += 5;
    let z_power = residual(&powered)?;

    let mut with_b = spec.clone();
    with_b.blaschke_points.push(C::new(0.4, 0.0));
    let blaschke = residual(&with_b)?;

    let reflection = if spec.zeros.is_empty() {
        None
    } else {
        let mut reflected = spec.clone();
        let mut gain_term = spec.gain_term();
        for zero in &mut reflected.zeros {
            gain_term *= zero.norm();
            *zero = C::new(1.0, 0.0) / zero.conj();
        }
        reflected.gain = libm::sqrt(2.0 * PI * gain_term);
        let back = outer_factor(&reflected, f.margin())?;
        Some(residual(back.spec())?)
    };

    Ok(InvarianceReport {
        identity,
        z_power,
        blaschke,
        reflection,
    })
}

/// Full `2n`-index objects: index `μ < n` is `ξ^μ`, `μ ≥ n` is `ξ̄^{μ−n}`.
struct FullIndex<'a> {
    d: &'a LogDerivatives,
}

impl FullIndex<'_> {
    fn n(&self) -> usize {
        self.d.dimension()
    }

    fn first(&self, mu: usize, k: usize) -> C {
        let n = self.n();
        if mu < n {
            self.d.first[mu][k]
        } else {
            self.d.first[mu - n][k].conj()
        }
    }

    fn second(&self, mu: usize, nu: usize, k: usize) -> C {
        let n = self.n();
        if mu != nu {
            return C::new(0.0, 0.0);
        }
        if mu < n {
            self.d.second[mu][k]
        } else {
            self.d.second[mu - n][k].conj()
        }
    }

    fn metric(&self) -> CMatrix {
        let m = self.d.len();
        CMatrix::from_fn(2 * self.n(), |a, b| {
            circle_mean(m, |k| self.first(a, k) * self.first(b, k))
        })
    }

    fn gamma(&self, alpha: f64) -> Tensor3 {
        let m = self.d.len();
        Tensor3::from_fn(2 * self.n(), |a, b, c| {
            circle_mean(m, |k| {
                (self.second(a, b, k) + self.first(a, k) * self.first(b, k) * alpha) * self.first(c, k)
            })
        })
    }
}

/// Residuals of the α-duality relation and of the reciprocal-filter swap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualityReport {
    pub alpha: f64,
    /// `max |∂_μ g_{νρ} − Γ^{(α)}_{μν,ρ} − Γ^{(−α)}_{μρ,ν}|` over all `2n`
    /// indices, `∂_μ` by Wirtinger differences.
    pub max_residual: f64,
    /// `max |Γ^{(α)}[1/h] − Γ^{(−α)}[h]|` after matching coordinates.
    pub reciprocal_residual: f64,
}

pub fn duality_check(f: &ValidatedFilter, alpha: f64, cfg: &QuadratureConfig) -> Result<DualityReport, NumericError> {
    cfg.check()?;
    let m = cfg.nodes;
    let params = f.params();
    let sig = f.signature();
    let n = params.len();

    let d = derivatives_at(&params, &sig, None, m);
    let full = FullIndex { d: &d };
    let gp = full.gamma(alpha);
    let gm = full.gamma(-alpha);

    let full_metric = |p: &[C]| -> Vec<C> {
        let dp = derivatives_at(p, &sig, None, m);
        FullIndex { d: &dp }.metric().as_slice().to_vec()
    };
    let two_n = 2 * n;
    let mut dg = Vec::with_capacity(two_n);
    for mu in 0..two_n {
        let (index, conj) = if mu < n { (mu, false) } else { (mu - n, true) };
        dg.push(wirtinger::partial(&full_metric, &params, index, conj, cfg.deriv_step));
    }
    let mut max_residual: f64 = 0.0;
    for mu in 0..two_n {
        for nu in 0..two_n {
            for rho in 0..two_n {
                let lhs = dg[mu][nu * two_n + rho];
                let rhs = gp[(mu, nu, rho)] + gm[(mu, rho, nu)];
                max_residual = max_residual.max((lhs - rhs).norm());
            }
        }
    }

    // Reciprocal coordinates are zeros then poles.
    let r = f.reciprocal();
    let d_r = derivatives_at(&r.params(), &r.signature(), None, m);
    let g_r = FullIndex { d: &d_r }.gamma(alpha);
    let p = f.poles().len();
    let q = f.zeros().len();
    let perm = |i: usize| if i < p { q + i } else { i - p };
    let full_perm = |mu: usize| if mu < n { perm(mu) } else { n + perm(mu - n) };
    let mut reciprocal_residual: f64 = 0.0;
    for a in 0..two_n {
        for b in 0..two_n {
            for c in 0..two_n {
                let lhs = g_r[(full_perm(a), full_perm(b), full_perm(c))];
                reciprocal_residual = reciprocal_residual.max((lhs - gm[(a, b, c)]).norm());
            }
        }
    }

    Ok(DualityReport {
        alpha,
        max_residual,
        reciprocal_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::DEFAULT_STABILITY_MARGIN as EPS;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn unit(poles: &[C], zeros: &[C]) -> ValidatedFilter {
        FilterSpec::with_gain_term(1.0)
            .poles(poles.iter().copied())
            .zeros(zeros.iter().copied())
            .validate(EPS)
            .unwrap()
    }

    #[test]
    fn config_bounds() {
        assert!(QuadratureConfig::new(32, 1e-5, 1e-9).is_err());
        assert!(QuadratureConfig::new(100, 1e-5, 1e-9).is_err());
        assert!(QuadratureConfig::new(64, 1e-2, 1e-9).is_err());
        assert!(QuadratureConfig::new(64, 1e-5, 0.0).is_err());
        assert!(QuadratureConfig::new(64, 1e-7, 1e-9).is_ok());
    }

    #[test]
    fn log_derivative_examples() {
        let cfg = QuadratureConfig::with_nodes(64).unwrap();
        let d = log_derivatives(&unit(&[c(0.5, 0.0)], &[]), &cfg).unwrap();
        assert!((d.first[0][0] - c(2.0, 0.0)).norm() < 1e-15);
        let d = log_derivatives(&unit(&[], &[c(0.3, 0.0)]), &cfg).unwrap();
        assert!((d.first[0][0] - c(-1.0 / 0.7, 0.0)).norm() < 1e-15);

        let f = unit(&[c(0.6, 0.2), c(-0.1, 0.5)], &[c(0.3, -0.3)]);
        let d = log_derivatives(&f, &cfg).unwrap();
        for row in &d.first {
            assert!(circle_mean(row.len(), |k| row[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn metric_examples() {
        let g = metric_numeric(&unit(&[c(0.5, 0.0)], &[]), &cfg()).unwrap();
        assert!(!g.unconverged);
        assert!((g.value.mixed[(0, 0)] - c(4.0 / 3.0, 0.0)).norm() < 1e-12);
        let g = metric_numeric(&unit(&[c(0.0, 0.0)], &[]), &cfg()).unwrap();
        assert!((g.value.mixed[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        let g = metric_numeric(&unit(&[c(0.5, 0.0)], &[c(0.3, 0.0)]), &cfg())
            .unwrap()
            .value;
        assert!((g.mixed[(0, 1)] - c(-1.176_470_588_235, 0.0)).norm() < 1e-11);
        assert!((g.mixed[(1, 1)] - c(1.098_901_098_901, 0.0)).norm() < 1e-11);
        assert!(g.pure.max_abs() < 1e-14);
        assert_eq!(g.labels, ["p1", "z1"]);
    }

    #[test]
    fn metric_is_hermitian_and_converged() {
        let f = unit(&[c(0.9, 0.0), c(-0.4, 0.7)], &[c(0.2, -0.85)]);
        let est = metric_numeric(&f, &cfg()).unwrap();
        assert_eq!(est.value.mixed.hermiticity_defect(), 0.0);
        assert!(est.change < 1e-9, "change {}", est.change);
        // Entry (j, i) recomputed independently.
        let d = log_derivatives(&f, &cfg()).unwrap();
        let m = cfg().nodes;
        for i in 0..3 {
            for j in 0..3 {
                let direct = circle_mean(m, |k| d.first[j][k] * d.first[i][k].conj());
                assert!((direct.conj() - est.value.mixed[(i, j)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn gain_coordinate_is_orthogonal() {
        let f = FilterSpec::new(1.7)
            .poles([c(0.5, 0.2)])
            .zeros([c(-0.3, 0.4)])
            .validate(EPS)
            .unwrap();
        let g = metric_numeric_with_gain(&f, &cfg()).unwrap().value;
        assert_eq!(g.labels[0], "sigma");
        for j in 1..3 {
            assert!(g.mixed[(0, j)].norm() < 1e-10);
            assert!(g.pure[(0, j)].norm() < 1e-10);
        }
        assert!((g.mixed[(0, 0)] - c(4.0 / (1.7 * 1.7), 0.0)).norm() < 1e-12);
        assert!((g.pure[(0, 0)] - c(4.0 / (1.7 * 1.7), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn connection_examples() {
        let g = connection_numeric(&unit(&[c(0.5, 0.0)], &[]), 0.0, &cfg())
            .unwrap()
            .value;
        assert!((g.gamma_mixed[(0, 0, 0)] - c(8.0 / 9.0, 0.0)).norm() < 1e-12);
        assert!((g.t_mixed[(0, 0, 0)] - c(-16.0 / 9.0, 0.0)).norm() < 1e-12);
        let g1 = connection_numeric(&unit(&[c(0.5, 0.0)], &[]), 1.0, &cfg())
            .unwrap()
            .value;
        assert!((g1.gamma_mixed[(0, 0, 0)] - c(16.0 / 9.0, 0.0)).norm() < 1e-12);

        let g = connection_numeric(&unit(&[c(0.0, 0.0)], &[]), 0.0, &cfg())
            .unwrap()
            .value;
        assert!(g.gamma_mixed.max_abs() < 1e-15);

        let f = unit(&[c(0.4, 0.3), c(-0.5, 0.0)], &[c(0.1, 0.6)]);
        let g = connection_numeric(&f, 0.0, &cfg()).unwrap().value;
        assert!(g.gamma_split.max_abs() == 0.0);
        assert!(g.gamma_split_bar.max_abs() == 0.0);
        assert!(g.gamma_pure.max_abs() < 1e-14);
        assert!(g.t_pure.max_abs() < 1e-14);
        assert!(g.t_mixed.symmetry_defect() < 1e-12);
    }

    #[test]
    fn ricci_of_ar1() {
        let r = ricci_numeric(&unit(&[c(0.5, 0.0)], &[]), &cfg()).unwrap().value;
        assert!((r.ricci[(0, 0)] - c(-16.0 / 9.0, 0.0)).norm() < 1e-10);
        assert!((r.scalar + 4.0 / 3.0).abs() < 1e-10);
        assert!((r.det_g - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn divergence_examples() {
        let allpass = unit(&[], &[]);
        let ar = unit(&[c(0.5, 0.0)], &[]);
        for alpha in [-2.0, -1.0, 0.0, 0.5, 2.0] {
            let d = divergence(&ar, &ar, alpha, &cfg()).unwrap().value;
            assert_eq!(d.value, 0.0);
        }
        let d = divergence(&allpass, &ar, 0.0, &cfg()).unwrap().value;
        let oracle: f64 = (1..=200).map(|r| 0.25f64.powi(r) / (r * r) as f64).sum();
        assert!((d.value - oracle).abs() < 1e-12);
        assert!((d.value - 0.267_653).abs() < 1e-6);
    }

    #[test]
    fn reciprocal_divergence_identity() {
        let f1 = FilterSpec::new(0.8)
            .poles([c(0.3, 0.4)])
            .zeros([c(-0.5, 0.1)])
            .validate(EPS)
            .unwrap();
        let f2 = FilterSpec::new(1.3)
            .poles([c(-0.6, -0.2), c(0.1, 0.0)])
            .validate(EPS)
            .unwrap();
        let lhs = divergence(&f1.reciprocal(), &f2.reciprocal(), 0.5, &cfg())
            .unwrap()
            .value
            .value;
        let rhs = divergence(&f1, &f2, -0.5, &cfg()).unwrap().value.value;
        assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn small_exponent_series_matches_direct_form() {
        for (alpha, l) in [(1e-3, 2.0), (0.3, 1.2), (-0.4, -1.0), (2.0, 0.1)] {
            let x: f64 = alpha * l;
            let direct = (x.exp() - 1.0 - x) / (alpha * alpha);
            assert!((alpha_integrand(alpha, l) - direct).abs() < 1e-10 * direct.abs());
        }
        assert!(alpha_integrand(1e-9, 0.5) > 0.0);
    }

    #[test]
    fn transfer_route_matches_analytic_route() {
        let f = FilterSpec::new(0.9)
            .poles([c(0.6, 0.3), c(-0.7, 0.0)])
            .zeros([c(0.2, -0.5)])
            .validate(EPS)
            .unwrap();
        let a = metric_via_transfer(f.spec(), &cfg()).unwrap().mixed;
        let b = metric_numeric(&f, &cfg()).unwrap().value.mixed;
        assert!(a.max_abs_diff(&b) < 1e-10 * b.max_abs());
    }

    #[test]
    fn invariance_examples() {
        let f = FilterSpec::new(1.2)
            .poles([c(0.5, 0.1)])
            .zeros([c(-0.4, 0.3)])
            .validate(EPS)
            .unwrap();
        let r = invariance_suite(&f, &cfg()).unwrap();
        assert_eq!(r.identity, 0.0);
        assert!(r.z_power < 1e-12, "{r:?}");
        assert!(r.blaschke < 1e-10, "{r:?}");
        assert!(r.reflection.unwrap() < 1e-10, "{r:?}");
        let ar = unit(&[c(0.3, 0.0)], &[]);
        assert!(invariance_suite(&ar, &cfg()).unwrap().reflection.is_none());
    }

    #[test]
    fn duality_examples() {
        let ar = unit(&[c(0.5, 0.0)], &[]);
        let r = duality_check(&ar, 0.0, &cfg()).unwrap();
        assert!(r.max_residual < 1e-6, "{r:?}");
        assert!(r.reciprocal_residual < 1e-6, "{r:?}");
        let f = unit(&[c(0.4, 0.2), c(-0.3, 0.5)], &[c(0.6, -0.1)]);
        for alpha in [1.0, -1.0] {
            let r = duality_check(&f, alpha, &QuadratureConfig::with_nodes(1024).unwrap()).unwrap();
            assert!(r.max_residual < 1e-6, "{r:?}");
            assert!(r.reciprocal_residual < 1e-6, "{r:?}");
        }
    }
}
