//! Rational transfer functions in gain/pole/zero form.
//!
//! A filter is
//!
//! ```text
//! h(z) = (σ²/2π) · z^R · Π_j (1 − ζ_j z⁻¹) / Π_i (1 − p_i z⁻¹) · Π_s b(z, z_s)
//! b(z, z_s) = (|z_s|/z_s) (z_s − z)/(1 − z̄_s z),   b(z, 0) = z
//! ```
//!
//! Coordinates are ordered poles first, then zeros. Poles carry signature
//! `c = −1`, zeros `c = +1`, so `log h = log(σ²/2π) + Σ c_i log(1 − ξ^i z⁻¹)`
//! plus the parameter-free `z^R` and Blaschke terms.

use alloc::vec::Vec;
use core::f64::consts::PI;

use thiserror::Error;

use crate::C;

/// Roots closer than this to the unit circle are rejected.
pub const DEFAULT_STABILITY_MARGIN: f64 = 1e-6;

/// Default number of cepstrum coefficients.
pub const DEFAULT_TRUNCATION: usize = 256;

/// `log|z|` beyond which `z⁻ʳ` is treated as overflowing.
const LOG_OVERFLOW: f64 = 700.0;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum FilterError {
    #[error("pole {index} has modulus {modulus}, outside the stability margin")]
    PoleOutsideDisk { index: usize, modulus: f64 },
    #[error("zero {index} has modulus {modulus}; the filter is not minimum phase")]
    ZeroOutsideDisk { index: usize, modulus: f64 },
    #[error("zero {index} has modulus {modulus}, on the unit circle")]
    ZeroOnCircle { index: usize, modulus: f64 },
    #[error("Blaschke point {index} has modulus {modulus}, not inside the unit disk")]
    BlaschkeOutsideDisk { index: usize, modulus: f64 },
    #[error("gain must be positive, got {gain}")]
    NonPositiveGain { gain: f64 },
    #[error("non-finite value in {field}")]
    NonFinite { field: &'static str },
    #[error("stability margin must lie in (0, 1), got {margin}")]
    InvalidMargin { margin: f64 },
    #[error("transfer function evaluated at pole {index}")]
    EvalAtPole { index: usize },
    #[error("transfer function evaluated at the singularity of Blaschke factor {index}")]
    EvalAtBlaschkePole { index: usize },
    #[error("transfer function evaluated at z = 0")]
    EvalAtOrigin,
    #[error("cepstrum truncation must be at least 1")]
    InvalidTruncation,
}

impl FilterError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Self::PoleOutsideDisk { .. } => "POLE_OUTSIDE_DISK",
            Self::ZeroOutsideDisk { .. } => "ZERO_OUTSIDE_DISK",
            Self::ZeroOnCircle { .. } => "ZERO_ON_CIRCLE",
            Self::BlaschkeOutsideDisk { .. } => "BLASCHKE_OUTSIDE_DISK",
            Self::NonPositiveGain { .. } => "NON_POSITIVE_GAIN",
            Self::NonFinite { .. } => "NON_FINITE",
            Self::InvalidMargin { .. } => "INVALID_MARGIN",
            Self::EvalAtPole { .. } => "EVAL_AT_POLE",
            Self::EvalAtBlaschkePole { .. } => "EVAL_AT_BLASCHKE_POLE",
            Self::EvalAtOrigin => "EVAL_AT_ORIGIN",
            Self::InvalidTruncation => "INVALID_TRUNCATION",
        }
    }
}

/// Whether a coordinate is an AR pole or an MA zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RootKind {
    Pole,
    Zero,
}

impl RootKind {
    /// `−1` for poles, `+1` for zeros.
    pub fn signature(self) -> f64 {
        match self {
            Self::Pole => -1.0,
            Self::Zero => 1.0,
        }
    }
}

/// Unchecked filter description, as read from input.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterSpec {
    /// σ; the transfer function carries the constant `σ²/2π`.
    pub gain: f64,
    pub poles: Vec<C>,
    pub zeros: Vec<C>,
    pub blaschke_points: Vec<C>,
    pub z_power: i32,
}

impl FilterSpec {
    pub fn new(gain: f64) -> Self {
        Self {
            gain,
            poles: Vec::new(),
            zeros: Vec::new(),
            blaschke_points: Vec::new(),
            z_power: 0,
        }
    }

    /// Filter whose constant factor `σ²/2π` equals `gain_term`.
    pub fn with_gain_term(gain_term: f64) -> Self {
        Self::new(libm::sqrt(2.0 * PI * gain_term))
    }

    pub fn poles(mut self, poles: impl IntoIterator<Item = C>) -> Self {
        self.poles = poles.into_iter().collect();
        self
    }

    pub fn zeros(mut self, zeros: impl IntoIterator<Item = C>) -> Self {
        self.zeros = zeros.into_iter().collect();
        self
    }

    pub fn blaschke(mut self, points: impl IntoIterator<Item = C>) -> Self {
        self.blaschke_points = points.into_iter().collect();
        self
    }

    pub fn z_power(mut self, r: i32) -> Self {
        self.z_power = r;
        self
    }

    /// `σ²/2π`.
    pub fn gain_term(&self) -> f64 {
        self.gain * self.gain / (2.0 * PI)
    }

    pub fn dimension(&self) -> usize {
        self.poles.len() + self.zeros.len()
    }

    /// Every constraint violated under stability margin `eps`, in input order.
    pub fn violations(&self, eps: f64) -> Vec<FilterError> {
        let mut out = Vec::new();
        if !(eps > 0.0 && eps < 1.0) {
            out.push(FilterError::InvalidMargin { margin: eps });
            return out;
        }
        if !self.gain.is_finite() {
            out.push(FilterError::NonFinite { field: "gain" });
        } else if self.gain <= 0.0 {
            out.push(FilterError::NonPositiveGain { gain: self.gain });
        }
        let finite = |z: &C| z.re.is_finite() && z.im.is_finite();
        for (index, p) in self.poles.iter().enumerate() {
            if !finite(p) {
                out.push(FilterError::NonFinite { field: "poles" });
                continue;
            }
            let modulus = p.norm();
            if modulus > 1.0 - eps {
                out.push(FilterError::PoleOutsideDisk { index, modulus });
            }
        }
        for (index, z) in self.zeros.iter().enumerate() {
            if !finite(z) {
                out.push(FilterError::NonFinite { field: "zeros" });
                continue;
            }
            let modulus = z.norm();
            if (modulus - 1.0).abs() <= eps {
                out.push(FilterError::ZeroOnCircle { index, modulus });
            } else if modulus > 1.0 {
                out.push(FilterError::ZeroOutsideDisk { index, modulus });
            }
        }
        for (index, s) in self.blaschke_points.iter().enumerate() {
            if !finite(s) {
                out.push(FilterError::NonFinite { field: "blaschke" });
                continue;
            }
            let modulus = s.norm();
            if modulus >= 1.0 {
                out.push(FilterError::BlaschkeOutsideDisk { index, modulus });
            }
        }
        out
    }

    /// Checks stability and minimum phase with margin `eps`; the first
    /// violation is returned as the error. Use [`Self::violations`] for all.
    pub fn validate(self, eps: f64) -> Result<ValidatedFilter, FilterError> {
        if let Some(err) = self.violations(eps).into_iter().next() {
            return Err(err);
        }
        Ok(ValidatedFilter { spec: self, eps })
    }

    /// Evaluates `h(z)`. Works for any spec, including non-minimum-phase ones.
    pub fn transfer(&self, z: C) -> Result<C, FilterError> {
        let needs_inverse = !self.poles.is_empty() || !self.zeros.is_empty() || self.z_power < 0;
        if z == C::new(0.0, 0.0) && needs_inverse {
            return Err(FilterError::EvalAtOrigin);
        }
        let one = C::new(1.0, 0.0);
        let mut h = C::new(self.gain_term(), 0.0) * z.powi(self.z_power);
        for zero in &self.zeros {
            h *= one - zero / z;
        }
        for (index, pole) in self.poles.iter().enumerate() {
            let d = one - pole / z;
            if d == C::new(0.0, 0.0) {
                return Err(FilterError::EvalAtPole { index });
            }
            h /= d;
        }
        for (index, s) in self.blaschke_points.iter().enumerate() {
            h *= blaschke_factor(z, *s).ok_or(FilterError::EvalAtBlaschkePole { index })?;
        }
        Ok(h)
    }

    /// `S(w) = |h(e^{iw})|²`.
    pub fn spectral_density(&self, w: f64) -> Result<f64, FilterError> {
        self.transfer(C::new(libm::cos(w), libm::sin(w))).map(|h| h.norm_sqr())
    }

    /// Same as `self`, with the roots replaced by `params` (poles then zeros).
    pub fn with_params(&self, params: &[C]) -> FilterSpec {
        assert_eq!(params.len(), self.dimension(), "parameter count mismatch");
        let (p, z) = params.split_at(self.poles.len());
        FilterSpec {
            poles: p.to_vec(),
            zeros: z.to_vec(),
            ..self.clone()
        }
    }
}

/// `b(z, z_s)`, or `None` at its pole `z = 1/z̄_s`.
pub fn blaschke_factor(z: C, zs: C) -> Option<C> {
    let m = zs.norm();
    if m == 0.0 {
        return Some(z);
    }
    let den = C::new(1.0, 0.0) - zs.conj() * z;
    if den == C::new(0.0, 0.0) {
        return None;
    }
    Some((zs - z) / den * (m / zs))
}

/// Stable, minimum-phase filter.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidatedFilter {
    spec: FilterSpec,
    eps: f64,
}

impl ValidatedFilter {
    pub fn spec(&self) -> &FilterSpec {
        &self.spec
    }

    pub fn into_spec(self) -> FilterSpec {
        self.spec
    }

    pub fn margin(&self) -> f64 {
        self.eps
    }

    pub fn gain(&self) -> f64 {
        self.spec.gain
    }

    pub fn gain_term(&self) -> f64 {
        self.spec.gain_term()
    }

    pub fn poles(&self) -> &[C] {
        &self.spec.poles
    }

    pub fn zeros(&self) -> &[C] {
        &self.spec.zeros
    }

    pub fn blaschke_points(&self) -> &[C] {
        &self.spec.blaschke_points
    }

    pub fn z_power(&self) -> i32 {
        self.spec.z_power
    }

    /// `n = #poles + #zeros`.
    pub fn dimension(&self) -> usize {
        self.spec.dimension()
    }

    /// Coordinates `ξ`, poles then zeros.
    pub fn params(&self) -> Vec<C> {
        self.spec.poles.iter().chain(&self.spec.zeros).copied().collect()
    }

    pub fn kinds(&self) -> Vec<RootKind> {
        let p = core::iter::repeat_n(RootKind::Pole, self.spec.poles.len());
        let z = core::iter::repeat_n(RootKind::Zero, self.spec.zeros.len());
        p.chain(z).collect()
    }

    /// `c_i` for every coordinate.
    pub fn signature(&self) -> Vec<f64> {
        self.kinds().into_iter().map(RootKind::signature).collect()
    }

    /// Pairs `(pole index, zero index)` that coincide exactly. These cancel in
    /// `h` and make the coordinates degenerate; nothing is removed here.
    pub fn common_roots(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, p) in self.spec.poles.iter().enumerate() {
            for (j, z) in self.spec.zeros.iter().enumerate() {
                if p == z {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Largest root modulus, 0 for a filter without roots.
    pub fn max_root_modulus(&self) -> f64 {
        self.params().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn eval_transfer(&self, z: C) -> Result<C, FilterError> {
        self.spec.transfer(z)
    }

    pub fn spectral_density(&self, w: f64) -> Result<f64, FilterError> {
        self.spec.spectral_density(w)
    }

    /// `log S(w)` accumulated factor by factor, so it stays finite where
    /// `S` itself would under- or overflow.
    pub fn log_spectral_density(&self, w: f64) -> f64 {
        let z = C::new(libm::cos(w), libm::sin(w));
        let zinv = z.conj();
        let one = C::new(1.0, 0.0);
        let mut acc = 2.0 * libm::log(self.gain_term());
        for zero in &self.spec.zeros {
            acc += libm::log((one - zero * zinv).norm_sqr());
        }
        for pole in &self.spec.poles {
            acc -= libm::log((one - pole * zinv).norm_sqr());
        }
        for s in &self.spec.blaschke_points {
            if let Some(b) = blaschke_factor(z, *s) {
                acc += libm::log(b.norm_sqr());
            }
        }
        acc
    }

    /// Cepstrum of `log h` from root power sums.
    ///
    /// `φ_r = (Σ_poles p^r − Σ_zeros ζ^r)/r`. Blaschke points at the origin are
    /// pure `z` factors and contribute nothing to `β_r`; the `β_r` list stops
    /// early if `z_s^{−r}` would overflow, since that series only converges
    /// inside `|z| < min |z_s|`.
    pub fn cepstrum(&self, truncation: usize) -> Result<CepstrumSeries, FilterError> {
        if truncation == 0 {
            return Err(FilterError::InvalidTruncation);
        }
        let mut coeffs = Vec::with_capacity(truncation);
        let mut pole_pows: Vec<C> = self.spec.poles.clone();
        let mut zero_pows: Vec<C> = self.spec.zeros.clone();
        for r in 1..=truncation {
            let sp: C = pole_pows.iter().sum();
            let sz: C = zero_pows.iter().sum();
            coeffs.push((sp - sz) / r as f64);
            for (p, base) in pole_pows.iter_mut().zip(&self.spec.poles) {
                *p *= base;
            }
            for (z, base) in zero_pows.iter_mut().zip(&self.spec.zeros) {
                *z *= base;
            }
        }

        let nonzero: Vec<C> = self
            .spec
            .blaschke_points
            .iter()
            .copied()
            .filter(|s| s.norm() > 0.0)
            .collect();
        let min_mod = nonzero.iter().map(|s| s.norm()).fold(1.0, f64::min);
        let max_r = if nonzero.is_empty() {
            truncation
        } else {
            let per_step = -libm::log(min_mod);
            if per_step <= 0.0 {
                truncation
            } else {
                truncation.min((LOG_OVERFLOW / per_step) as usize)
            }
        };
        // (|z_s|^{2r} − 1)/z_s^r = z̄_s^r − z_s^{−r}
        let blaschke_coeffs = (1..=max_r)
            .map(|r| {
                let sum: C = nonzero
                    .iter()
                    .map(|s| s.conj().powi(r as i32) - s.inv().powi(r as i32))
                    .sum();
                sum / r as f64
            })
            .collect();

        let n = self.dimension() as f64;
        let rho = self.max_root_modulus();
        let tail_bound = if n == 0.0 || rho == 0.0 {
            0.0
        } else {
            let next = (truncation + 1) as f64;
            n * n * libm::pow(rho, 2.0 * next) / (next * next * (1.0 - rho * rho))
        };

        Ok(CepstrumSeries {
            phi0: C::new(libm::log(self.gain_term()), 0.0),
            coeffs,
            blaschke_coeffs,
            truncation,
            tail_bound,
        })
    }

    /// The inverse system `1/h`: poles and zeros swap, the constant becomes
    /// `2π/σ²` and `z^R` becomes `z^{−R}`. Blaschke factors are dropped; they
    /// have unit modulus on the circle and no parameter dependence.
    pub fn reciprocal(&self) -> ValidatedFilter {
        ValidatedFilter {
            spec: FilterSpec {
                gain: 2.0 * PI / self.spec.gain,
                poles: self.spec.zeros.clone(),
                zeros: self.spec.poles.clone(),
                blaschke_points: Vec::new(),
                z_power: -self.spec.z_power,
            },
            eps: self.eps,
        }
    }
}

/// Truncated complex cepstrum of a validated filter.
#[derive(Clone, Debug, PartialEq)]
pub struct CepstrumSeries {
    /// `φ_0 = log(σ²/2π)`.
    pub phi0: C,
    /// `φ_1 .. φ_N`.
    pub coeffs: Vec<C>,
    /// `β_1 ..` of the Blaschke product; constant in the coordinates.
    pub blaschke_coeffs: Vec<C>,
    pub truncation: usize,
    /// Upper bound on `Σ_{r>N} |φ_r|²`.
    pub tail_bound: f64,
}

impl CepstrumSeries {
    /// `Σ_{r=1}^{N} |φ_r|²`, the truncated squared Hardy norm without `φ_0`.
    pub fn hardy_norm_squared(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Splits off `z^R`: returns `R` and a copy of `spec` with `z_power = 0`.
pub fn factor_z_power(spec: &FilterSpec) -> (i32, FilterSpec) {
    let reduced = FilterSpec {
        z_power: 0,
        ..spec.clone()
    };
    (spec.z_power, reduced)
}

/// Minimum-phase filter with the same spectral density.
///
/// Each zero `|ζ| > 1` is reflected to `1/ζ̄` and the constant `σ²/2π` is
/// multiplied by `|ζ|`, using `|1 − ζ e^{−iw}| = |ζ| |1 − ζ̄⁻¹ e^{−iw}|`.
pub fn outer_factor(spec: &FilterSpec, eps: f64) -> Result<ValidatedFilter, FilterError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(FilterError::InvalidMargin { margin: eps });
    }
    let mut out = spec.clone();
    let mut gain_term = spec.gain_term();
    let mut reflected = false;
    for (index, zero) in out.zeros.iter_mut().enumerate() {
        let modulus = zero.norm();
        if !modulus.is_finite() {
            return Err(FilterError::NonFinite { field: "zeros" });
        }
        if (modulus - 1.0).abs() <= eps {
            return Err(FilterError::ZeroOnCircle { index, modulus });
        }
        if modulus > 1.0 {
            *zero = C::new(1.0, 0.0) / zero.conj();
            gain_term *= modulus;
            reflected = true;
        }
    }
    if reflected {
        out.gain = libm::sqrt(2.0 * PI * gain_term);
    }
    out.validate(eps)
}
