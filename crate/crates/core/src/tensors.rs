//! Geometric objects shared by the closed-form and quadrature routes.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::filter::RootKind;
use crate::kahler::CoincidentRoots;
use crate::linalg::{CMatrix, Tensor3};

/// Coordinate labels `p1, p2, .., z1, ..` in pole-then-zero order.
pub fn coordinate_labels(kinds: &[RootKind]) -> Vec<String> {
    let mut poles = 0;
    let mut zeros = 0;
    kinds
        .iter()
        .map(|k| match k {
            RootKind::Pole => {
                poles += 1;
                format!("p{poles}")
            }
            RootKind::Zero => {
                zeros += 1;
                format!("z{zeros}")
            }
        })
        .collect()
}

/// Label of the gain coordinate when it is included.
pub const GAIN_LABEL: &str = "sigma";

/// `g_{ij̄}` and `g_{ij}` in complexified coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMetric {
    pub mixed: CMatrix,
    /// Zero on the constant-gain submanifold.
    pub pure: CMatrix,
    pub labels: Vec<String>,
}

/// α-connection and `T` components. Index layout is `(i, j, k)` for
/// `Γ_{ij,k̄}` and friends; the barred slot is named in each field.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionTensors {
    pub alpha: f64,
    /// `Γ^{(α)}_{ij,k̄}`.
    pub gamma_mixed: Tensor3,
    /// `Γ^{(α)}_{ij,k}`.
    pub gamma_pure: Tensor3,
    /// `Γ^{(α)}_{ij̄,k}`.
    pub gamma_split: Tensor3,
    /// `Γ^{(α)}_{ij̄,k̄}`.
    pub gamma_split_bar: Tensor3,
    /// `T_{ij,k̄}`.
    pub t_mixed: Tensor3,
    /// `T_{ij,k}`.
    pub t_pure: Tensor3,
}

impl ConnectionTensors {
    /// Largest entrywise difference over every family.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            self.gamma_mixed.max_abs_diff(&other.gamma_mixed),
            self.gamma_pure.max_abs_diff(&other.gamma_pure),
            self.gamma_split.max_abs_diff(&other.gamma_split),
            self.gamma_split_bar.max_abs_diff(&other.gamma_split_bar),
            self.t_mixed.max_abs_diff(&other.t_mixed),
            self.t_pure.max_abs_diff(&other.t_pure),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Ricci tensor, scalar curvature and metric determinant at one α.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureReport {
    pub alpha: f64,
    /// `R^{(α)}_{ij̄}`.
    pub ricci: CMatrix,
    /// `g^{ij̄} R^{(α)}_{ij̄}`.
    pub scalar: f64,
    /// `det g_{ij̄}`.
    pub det_g: f64,
    /// Set when the inverse metric came from the pivoted solve.
    pub coincident: Option<CoincidentRoots>,
}
