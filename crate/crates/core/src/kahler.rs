//! Closed-form Kähler geometry of ARMA models in pole/zero coordinates.
//!
//! With coordinates `ξ^i` and signatures `c_i` (−1 pole, +1 zero), on the
//! constant-gain submanifold:
//!
//! ```text
//! K            = Σ_{r≥1} |Σ_i c_i (ξ^i)^r|² / r²
//! g_{ij̄}       = c_i c_j / (1 − ξ^i ξ̄^j)
//! det g        = Π_{j<k} |ξ^k − ξ^j|² / Π_{j,k} (1 − ξ^j ξ̄^k)
//! Γ⁰_{ij,k̄}    = δ_ij c_i c_k ξ̄^k / (1 − ξ^i ξ̄^k)²
//! T_{ij,k̄}     = 2 c_i c_j c_k ξ̄^k / ((1 − ξ^i ξ̄^k)(1 − ξ^j ξ̄^k))
//! Γ^{(α)}      = Γ⁰ − (α/2) T
//! R⁰_{ij̄}      = −1 / (1 − ξ^i ξ̄^j)²
//! R^{(α)}_{ij̄} = R⁰_{ij̄} + (α/2) ∂_j̄ (g^{kl̄} T_{ik,l̄})
//! ```
//!
//! The only finite difference in this module is the `∂_j̄` in the last line.

use alloc::vec::Vec;

use thiserror::Error;

use crate::filter::{FilterError, FilterSpec, RootKind, ValidatedFilter};
use crate::linalg::{CMatrix, Tensor3};
use crate::tensors::{coordinate_labels, ConnectionTensors, CurvatureReport, HermitianMetric};
use crate::wirtinger;
use crate::C;

/// Below this pairwise distance the inverse metric is obtained by a pivoted
/// solve instead of the product formula.
pub const COINCIDENCE_THRESHOLD: f64 = 1e-8;

/// Step of the Wirtinger difference in [`alpha_ricci`].
pub const DERIVATIVE_STEP: f64 = 1e-5;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum KahlerError {
    #[error("parameter {index} has modulus {modulus}, not inside the unit disk")]
    ParamOutsideDisk { index: usize, modulus: f64 },
    #[error("parameter {index} is not finite")]
    NonFinite { index: usize },
    #[error("{params} parameters but {kinds} root kinds")]
    LengthMismatch { params: usize, kinds: usize },
    #[error("metric is singular; parameters {first} and {second} coincide")]
    SingularMetric { first: usize, second: usize },
    #[error("truncation must be at least 1")]
    InvalidTruncation,
    #[error("derivative step must be positive and finite, got {step}")]
    InvalidStep { step: f64 },
}

impl KahlerError {
    pub fn code(&self) -> &'static str {
        match self {
            Self::ParamOutsideDisk { .. } => "PARAM_OUTSIDE_DISK",
            Self::NonFinite { .. } => "NON_FINITE",
            Self::LengthMismatch { .. } => "LENGTH_MISMATCH",
            Self::SingularMetric { .. } => "COINCIDENT_ROOTS",
            Self::InvalidTruncation => "INVALID_TRUNCATION",
            Self::InvalidStep { .. } => "INVALID_DERIV_STEP",
        }
    }
}

/// Warning attached when two parameters are closer than
/// [`COINCIDENCE_THRESHOLD`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoincidentRoots {
    pub first: usize,
    pub second: usize,
    pub distance: f64,
}

/// A point of the ARMA manifold: roots and their kinds.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelPoint {
    params: Vec<C>,
    kinds: Vec<RootKind>,
}

impl ModelPoint {
    pub fn new(params: Vec<C>, kinds: Vec<RootKind>) -> Result<Self, KahlerError> {
        if params.len() != kinds.len() {
            return Err(KahlerError::LengthMismatch {
                params: params.len(),
                kinds: kinds.len(),
            });
        }
        for (index, p) in params.iter().enumerate() {
            if !(p.re.is_finite() && p.im.is_finite()) {
                return Err(KahlerError::NonFinite { index });
            }
            let modulus = p.norm();
            if modulus >= 1.0 {
                return Err(KahlerError::ParamOutsideDisk { index, modulus });
            }
        }
        Ok(Self { params, kinds })
    }

    pub fn arma(poles: &[C], zeros: &[C]) -> Result<Self, KahlerError> {
        let params = poles.iter().chain(zeros).copied().collect();
        let kinds = core::iter::repeat_n(RootKind::Pole, poles.len())
            .chain(core::iter::repeat_n(RootKind::Zero, zeros.len()))
            .collect();
        Self::new(params, kinds)
    }

    pub fn ar(poles: &[C]) -> Result<Self, KahlerError> {
        Self::arma(poles, &[])
    }

    pub fn ma(zeros: &[C]) -> Result<Self, KahlerError> {
        Self::arma(&[], zeros)
    }

    pub fn from_filter(f: &ValidatedFilter) -> Self {
        Self {
            params: f.params(),
            kinds: f.kinds(),
        }
    }

    /// Unit-gain-term filter with these roots.
    pub fn to_filter(&self, eps: f64) -> Result<ValidatedFilter, FilterError> {
        let mut spec = FilterSpec::with_gain_term(1.0);
        for (p, k) in self.params.iter().zip(&self.kinds) {
            match k {
                RootKind::Pole => spec.poles.push(*p),
                RootKind::Zero => spec.zeros.push(*p),
            }
        }
        spec.validate(eps)
    }

    pub fn params(&self) -> &[C] {
        &self.params
    }

    pub fn kinds(&self) -> &[RootKind] {
        &self.kinds
    }

    pub fn signature(&self) -> Vec<f64> {
        self.kinds.iter().map(|k| k.signature()).collect()
    }

    pub fn dimension(&self) -> usize {
        self.params.len()
    }

    pub fn labels(&self) -> Vec<alloc::string::String> {
        coordinate_labels(&self.kinds)
    }

    /// Closest pair `(i, j, |ξ^i − ξ^j|)`, or `None` for fewer than two
    /// parameters.
    pub fn closest_pair(&self) -> Option<(usize, usize, f64)> {
        let n = self.params.len();
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..n {
            for j in (i + 1)..n {
                let d = (self.params[i] - self.params[j]).norm();
                if best.is_none_or(|b| d < b.2) {
                    best = Some((i, j, d));
                }
            }
        }
        best
    }

    /// `min_{i≠j} |ξ^i − ξ^j|`; infinite for fewer than two parameters.
    pub fn min_pairwise_distance(&self) -> f64 {
        self.closest_pair().map_or(f64::INFINITY, |b| b.2)
    }

    /// Same kinds, new parameters. No disk check; used for differencing.
    pub(crate) fn with_params_unchecked(&self, params: Vec<C>) -> Self {
        debug_assert_eq!(params.len(), self.kinds.len());
        Self {
            params,
            kinds: self.kinds.clone(),
        }
    }
}

/// Truncated Kähler potential.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialValue {
    /// Partial sum up to `truncation`.
    pub value: f64,
    /// Upper bound on the omitted terms.
    pub tail_bound: f64,
    pub truncation: usize,
}

/// `K` summed to `truncation` terms, with a bound on the rest.
pub fn kahler_potential(m: &ModelPoint, truncation: usize) -> Result<PotentialValue, KahlerError> {
    if truncation == 0 {
        return Err(KahlerError::InvalidTruncation);
    }
    let c = m.signature();
    let mut pows: Vec<C> = m.params.clone();
    let mut value = 0.0;
    for r in 1..=truncation {
        let s: C = pows.iter().zip(&c).map(|(p, ci)| p * ci).sum();
        value += s.norm_sqr() / (r * r) as f64;
        for (p, base) in pows.iter_mut().zip(&m.params) {
            *p *= base;
        }
    }
    let n = m.dimension() as f64;
    let rho = m.params.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let tail_bound = if rho == 0.0 {
        0.0
    } else {
        let next = (truncation + 1) as f64;
        n * n * libm::pow(rho, 2.0 * next) / (next * next * (1.0 - rho * rho))
    };
    Ok(PotentialValue {
        value,
        tail_bound,
        truncation,
    })
}

fn one_minus(a: C, b: C) -> C {
    C::new(1.0, 0.0) - a * b.conj()
}

/// Closed-form `g_{ij̄}`; the pure block is zero.
pub fn metric(m: &ModelPoint) -> HermitianMetric {
    let n = m.dimension();
    HermitianMetric {
        mixed: metric_matrix(m),
        pure: CMatrix::zeros(n),
        labels: m.labels(),
    }
}

fn metric_matrix(m: &ModelPoint) -> CMatrix {
    let c = m.signature();
    let x = &m.params;
    CMatrix::from_fn(m.dimension(), |i, j| C::new(c[i] * c[j], 0.0) / one_minus(x[i], x[j]))
}

/// `g^{ij̄}`, stored so that `raised[(i, j)] = g^{ij̄}` and
/// `Σ_j g^{ij̄} g_{kj̄} = δ^i_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct InverseMetric {
    pub raised: CMatrix,
    /// Set when the pivoted solve was used.
    pub coincident: Option<CoincidentRoots>,
}

impl InverseMetric {
    /// The ordinary matrix inverse of `g_{ij̄}`, i.e. the transpose of
    /// `raised`.
    pub fn matrix_inverse(&self) -> CMatrix {
        self.raised.transpose()
    }

    /// `g^{ij̄} A_{ij̄}`.
    pub fn contract(&self, a: &CMatrix) -> C {
        let n = a.dim();
        let mut acc = C::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.raised[(i, j)] * a[(i, j)];
            }
        }
        acc
    }
}

/// Inverse metric by the Cauchy-type product formula, or by a pivoted solve
/// on the closed-form metric when two parameters nearly coincide.
pub fn inverse_metric(m: &ModelPoint) -> Result<InverseMetric, KahlerError> {
    match m.closest_pair() {
        Some((first, second, distance)) if distance < COINCIDENCE_THRESHOLD => {
            if distance == 0.0 {
                return Err(KahlerError::SingularMetric { first, second });
            }
            let inv = metric_matrix(m)
                .inverse()
                .ok_or(KahlerError::SingularMetric { first, second })?;
            Ok(InverseMetric {
                raised: inv.transpose(),
                coincident: Some(CoincidentRoots {
                    first,
                    second,
                    distance,
                }),
            })
        }
        _ => Ok(InverseMetric {
            raised: inverse_product_formula(m),
            coincident: None,
        }),
    }
}

fn inverse_product_formula(m: &ModelPoint) -> CMatrix {
    let c = m.signature();
    let x = &m.params;
    let n = x.len();
    CMatrix::from_fn(n, |i, j| {
        let mut num = one_minus(x[i], x[j]) * (c[i] * c[j]);
        let mut den = C::new(1.0, 0.0);
        for k in 0..n {
            if k != i {
                num *= one_minus(x[k], x[j]);
                den *= x[k] - x[i];
            }
            if k != j {
                num *= one_minus(x[i], x[k]);
                den *= x[k].conj() - x[j].conj();
            }
        }
        num / den
    })
}

/// `det g_{ij̄}` by the product formula. Zero exactly at coincidences.
pub fn metric_determinant(m: &ModelPoint) -> f64 {
    let x = &m.params;
    let n = x.len();
    let mut num = 1.0;
    for j in 0..n {
        for k in (j + 1)..n {
            num *= (x[k] - x[j]).norm_sqr();
        }
    }
    let mut den = C::new(1.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            den *= one_minus(x[j], x[k]);
        }
    }
    num / den.re
}

/// `Γ⁰` and `T` share a layout; only the mixed families are non-zero.
fn connection_from(alpha: f64, gamma0: &Tensor3, t: &Tensor3) -> ConnectionTensors {
    let n = t.dim();
    let half = 0.5 * alpha;
    ConnectionTensors {
        alpha,
        gamma_mixed: gamma0.affine(1.0, t, -half),
        gamma_pure: Tensor3::zeros(n),
        gamma_split: Tensor3::from_fn(n, |i, j, k| t[(i, k, j)] * -half),
        gamma_split_bar: Tensor3::from_fn(n, |i, j, k| t[(j, k, i)].conj() * -half),
        t_mixed: t.clone(),
        t_pure: Tensor3::zeros(n),
    }
}

fn gamma0_tensor(m: &ModelPoint) -> Tensor3 {
    let c = m.signature();
    let x = &m.params;
    Tensor3::from_fn(m.dimension(), |i, j, k| {
        if i != j {
            return C::new(0.0, 0.0);
        }
        let d = one_minus(x[i], x[k]);
        x[k].conj() * (c[i] * c[k]) / (d * d)
    })
}

fn t_tensor_raw(m: &ModelPoint) -> Tensor3 {
    let c = m.signature();
    let x = &m.params;
    Tensor3::from_fn(m.dimension(), |i, j, k| {
        x[k].conj() * (2.0 * c[i] * c[j] * c[k]) / (one_minus(x[i], x[k]) * one_minus(x[j], x[k]))
    })
}

/// Levi-Civita part; `t_mixed` is filled as well since it costs nothing.
pub fn connection0(m: &ModelPoint) -> ConnectionTensors {
    connection_from(0.0, &gamma0_tensor(m), &t_tensor_raw(m))
}

/// `T_{ij,k̄}`; the connection fields hold `Γ⁰`.
pub fn t_tensor(m: &ModelPoint) -> ConnectionTensors {
    connection0(m)
}

/// `Γ^{(α)} = Γ⁰ − (α/2) T` for every index family.
pub fn alpha_connection(m: &ModelPoint, alpha: f64) -> ConnectionTensors {
    connection_from(alpha, &gamma0_tensor(m), &t_tensor_raw(m))
}

fn ricci0_matrix(m: &ModelPoint) -> CMatrix {
    let x = &m.params;
    CMatrix::from_fn(m.dimension(), |i, j| {
        let d = one_minus(x[i], x[j]);
        -C::new(1.0, 0.0) / (d * d)
    })
}

/// `R⁰_{ij̄}`, its contraction and `det g`.
pub fn ricci0(m: &ModelPoint) -> Result<CurvatureReport, KahlerError> {
    let inv = inverse_metric(m)?;
    let ricci = ricci0_matrix(m);
    Ok(CurvatureReport {
        alpha: 0.0,
        scalar: inv.contract(&ricci).re,
        ricci,
        det_g: metric_determinant(m),
        coincident: inv.coincident,
    })
}

/// `V_i = g^{kl̄} T_{ik,l̄}`.
pub fn contracted_t(m: &ModelPoint) -> Result<Vec<C>, KahlerError> {
    let inv = inverse_metric(m)?;
    let t = t_tensor_raw(m);
    let n = m.dimension();
    Ok((0..n)
        .map(|i| {
            let mut acc = C::new(0.0, 0.0);
            for k in 0..n {
                for l in 0..n {
                    acc += inv.raised[(k, l)] * t[(i, k, l)];
                }
            }
            acc
        })
        .collect())
}

/// `R^{(α)}` with the default derivative step.
pub fn alpha_ricci(m: &ModelPoint, alpha: f64) -> Result<CurvatureReport, KahlerError> {
    alpha_ricci_with_step(m, alpha, DERIVATIVE_STEP)
}

/// `R^{(α)}_{ij̄} = R⁰_{ij̄} + (α/2) ∂_j̄ V_i`, the derivative by central
/// Wirtinger differences. The correction is computed independently of α, so
/// the result is affine in α up to one rounding.
pub fn alpha_ricci_with_step(m: &ModelPoint, alpha: f64, step: f64) -> Result<CurvatureReport, KahlerError> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(KahlerError::InvalidStep { step });
    }
    let inv = inverse_metric(m)?;
    // Coincidence at the centre is reported above; shifted points inherit it.
    let v = |p: &[C]| {
        contracted_t(&m.with_params_unchecked(p.to_vec()))
            .unwrap_or_else(|_| alloc::vec![C::new(f64::NAN, 0.0); p.len()])
    };
    let dv = wirtinger::jacobian(&v, &m.params, true, step);
    let r0 = ricci0_matrix(m);
    let half = 0.5 * alpha;
    let ricci = CMatrix::from_fn(m.dimension(), |i, j| r0[(i, j)] + dv[(i, j)] * half);
    Ok(CurvatureReport {
        alpha,
        scalar: inv.contract(&ricci).re,
        ricci,
        det_g: metric_determinant(m),
        coincident: inv.coincident,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn ar1(x: f64) -> ModelPoint {
        ModelPoint::ar(&[c(x, 0.0)]).unwrap()
    }

    fn arma11() -> ModelPoint {
        ModelPoint::arma(&[c(0.5, 0.0)], &[c(0.3, 0.0)]).unwrap()
    }

    fn close(a: C, b: f64, tol: f64) -> bool {
        (a - c(b, 0.0)).norm() < tol
    }

    #[test]
    fn model_point_rejects_outside_disk() {
        assert_eq!(
            ModelPoint::ar(&[c(1.0, 0.0)]).unwrap_err(),
            KahlerError::ParamOutsideDisk { index: 0, modulus: 1.0 }
        );
        assert!(matches!(
            ModelPoint::new(alloc::vec![c(0.1, 0.0)], alloc::vec![]),
            Err(KahlerError::LengthMismatch { .. })
        ));
    }

    // Oracle: K for AR(1) at 0.5 is Li₂(1/4) = Σ 0.25^r / r², summed to 200
    // terms independently.
    #[test]
    fn potential_examples() {
        assert_eq!(kahler_potential(&ar1(0.0), 10).unwrap().value, 0.0);
        let oracle: f64 = (1..=200).map(|r| 0.25f64.powi(r) / (r * r) as f64).sum();
        let k = kahler_potential(&ar1(0.5), 256).unwrap();
        assert!((k.value - oracle).abs() < 1e-15);
        assert!((k.value - 0.267_652_639).abs() < 1e-9);
        let cancel = ModelPoint::arma(&[c(0.4, 0.0)], &[c(0.4, 0.0)]).unwrap();
        assert!(kahler_potential(&cancel, 256).unwrap().value.abs() < 1e-15);
        assert_eq!(
            kahler_potential(&ar1(0.5), 0).unwrap_err(),
            KahlerError::InvalidTruncation
        );
    }

    #[test]
    fn metric_examples() {
        assert!(close(metric(&ar1(0.5)).mixed[(0, 0)], 4.0 / 3.0, 1e-15));
        let g = metric(&arma11()).mixed;
        assert!(close(g[(0, 0)], 1.333_333_333_333, 1e-12));
        assert!(close(g[(0, 1)], -1.176_470_588_235, 1e-12));
        assert!(close(g[(1, 0)], -1.176_470_588_235, 1e-12));
        assert!(close(g[(1, 1)], 1.098_901_098_901, 1e-12));
        let ar2 = ModelPoint::ar(&[c(0.5, 0.0), c(0.3, 0.0)]).unwrap();
        assert!(close(metric(&ar2).mixed[(0, 1)], 1.176_470_588_235, 1e-12));
    }

    #[test]
    fn inverse_metric_examples() {
        let inv = inverse_metric(&ar1(0.5)).unwrap();
        assert!(close(inv.raised[(0, 0)], 0.75, 1e-15));
        assert!(inv.coincident.is_none());

        let m = arma11();
        let prod = &metric(&m).mixed * &inverse_metric(&m).unwrap().matrix_inverse();
        assert!(prod.max_abs_diff(&CMatrix::identity(2)) < 1e-12);

        let near = ModelPoint::ar(&[c(0.5, 0.0), c(0.5 + 1e-12, 0.0)]).unwrap();
        let inv = inverse_metric(&near).unwrap();
        let w = inv.coincident.unwrap();
        assert_eq!((w.first, w.second), (0, 1));

        let same = ModelPoint::ar(&[c(0.5, 0.0), c(0.5, 0.0)]).unwrap();
        assert!(matches!(inverse_metric(&same), Err(KahlerError::SingularMetric { .. })));
    }

    #[test]
    fn product_formula_matches_solve_for_complex_points() {
        let m = ModelPoint::arma(&[c(0.3, 0.4), c(-0.6, 0.1)], &[c(0.2, -0.7), c(0.0, 0.5)]).unwrap();
        let closed = inverse_metric(&m).unwrap().matrix_inverse();
        let solved = metric(&m).mixed.inverse().unwrap();
        assert!(closed.max_abs_diff(&solved) < 1e-10 * solved.max_abs());
    }

    #[test]
    fn determinant_examples() {
        let d = metric_determinant(&arma11());
        let g = metric(&arma11()).mixed;
        assert!((d - g.determinant().re).abs() < 1e-14);
        assert!((d - 0.081_118_5).abs() < 1e-7);
        assert_eq!(metric_determinant(&ar1(0.0)), 1.0);
        let same = ModelPoint::ar(&[c(0.5, 0.0), c(0.5, 0.0)]).unwrap();
        assert_eq!(metric_determinant(&same), 0.0);
    }

    #[test]
    fn connection_examples() {
        let g = connection0(&ar1(0.5));
        assert!(close(g.gamma_mixed[(0, 0, 0)], 8.0 / 9.0, 1e-15));
        assert!(close(g.t_mixed[(0, 0, 0)], -16.0 / 9.0, 1e-15));

        let m = ModelPoint::arma(&[c(0.3, 0.1), c(-0.2, 0.4)], &[c(0.5, -0.3)]).unwrap();
        let g = connection0(&m);
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    if i != j {
                        assert_eq!(g.gamma_mixed[(i, j, k)], c(0.0, 0.0));
                    }
                    assert_eq!(g.t_mixed[(i, j, k)], g.t_mixed[(j, i, k)]);
                    assert_eq!(g.gamma_split[(i, j, k)], c(0.0, 0.0));
                }
            }
        }
        assert_eq!(connection0(&ar1(0.0)).gamma_mixed.max_abs(), 0.0);
        assert_eq!(t_tensor(&ar1(0.0)).t_mixed.max_abs(), 0.0);
    }

    #[test]
    fn alpha_connection_examples() {
        let m = ar1(0.5);
        assert_eq!(alpha_connection(&m, 0.0), connection0(&m));
        let g1 = alpha_connection(&m, 1.0);
        assert!(close(g1.gamma_mixed[(0, 0, 0)], 16.0 / 9.0, 1e-15));
        let gm = alpha_connection(&m, -0.7).gamma_mixed;
        let gp = alpha_connection(&m, 0.7).gamma_mixed;
        let avg = gm.affine(0.5, &gp, 0.5);
        assert!(avg.max_abs_diff(&connection0(&m).gamma_mixed) < 1e-15);
    }

    #[test]
    fn ricci_examples() {
        assert!(close(ricci0(&ar1(0.0)).unwrap().ricci[(0, 0)], -1.0, 1e-15));
        let r = ricci0(&ar1(0.5)).unwrap();
        assert!(close(r.ricci[(0, 0)], -16.0 / 9.0, 1e-15));
        assert!((r.scalar + 4.0 / 3.0).abs() < 1e-15);
        let r = ricci0(&arma11()).unwrap();
        assert!(close(r.ricci[(0, 1)], -1.0 / (0.85 * 0.85), 1e-12));
        assert!(r.ricci.hermiticity_defect() == 0.0);
    }

    #[test]
    fn alpha_ricci_examples() {
        let m = ar1(0.5);
        let r0 = alpha_ricci(&m, 0.0).unwrap();
        assert_eq!(r0.ricci, ricci0(&m).unwrap().ricci);
        let r1 = alpha_ricci(&m, 1.0).unwrap();
        assert!(close(r1.ricci[(0, 0)], -32.0 / 9.0, 1e-9));
        let rm1 = alpha_ricci(&m, -1.0).unwrap();
        assert!(rm1.ricci[(0, 0)].norm() < 1e-9);
        assert!(matches!(
            alpha_ricci_with_step(&m, 1.0, 0.0),
            Err(KahlerError::InvalidStep { .. })
        ));
    }

    #[test]
    fn contracted_t_of_ar1() {
        let x = c(0.3, -0.4);
        let v = contracted_t(&ModelPoint::ar(&[x]).unwrap()).unwrap();
        let want = x.conj() * -2.0 / (1.0 - x.norm_sqr());
        assert!((v[0] - want).norm() < 1e-15);
    }

    // The printed double sum equals the contraction g^{ij̄} R⁰_{ij̄}.
    #[test]
    fn scalar_double_sum_agrees_with_contraction() {
        let points = [
            ModelPoint::ar(&[c(0.5, 0.1), c(-0.3, 0.4), c(0.1, -0.6)]).unwrap(),
            ModelPoint::arma(&[c(0.2, 0.2)], &[c(-0.5, 0.1)]).unwrap(),
        ];
        for m in points {
            let x = m.params();
            let cs = m.signature();
            let n = x.len();
            let mut sum = c(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    let mut num = c(cs[i] * cs[j], 0.0);
                    let mut den = one_minus(x[i], x[j]);
                    for k in 0..n {
                        if k != i {
                            num *= one_minus(x[k], x[j]);
                            den *= x[k] - x[i];
                        }
                        if k != j {
                            num *= one_minus(x[i], x[k]);
                            den *= x[k].conj() - x[j].conj();
                        }
                    }
                    sum -= num / den;
                }
            }
            let r = ricci0(&m).unwrap();
            assert!((sum.re - r.scalar).abs() < 1e-10 * r.scalar.abs());
            assert!(sum.im.abs() < 1e-10 * r.scalar.abs());
        }
    }
}
