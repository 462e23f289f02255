//! Uniform trapezoid rule on the unit circle.
//!
//! `(1/2πi) ∮ G(z) dz/z` over `|z| = 1` is the mean of `G` over the circle,
//! which the trapezoid rule on `M` equispaced nodes approximates with error
//! `O(ρ^M)` for integrands analytic in an annulus `ρ < |z| < 1/ρ`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::C;

/// Below this length a block is summed left to right.
const PAIRWISE_BLOCK: usize = 16;

/// Sum `f(lo) + ... + f(hi - 1)` by recursive halving.
///
/// The summation tree depends only on `hi - lo`, so results are bitwise
/// reproducible for a fixed node count.
pub fn pairwise_sum(lo: usize, hi: usize, f: &impl Fn(usize) -> C) -> C {
    let len = hi - lo;
    if len <= PAIRWISE_BLOCK {
        let mut acc = C::new(0.0, 0.0);
        for k in lo..hi {
            acc += f(k);
        }
        acc
    } else {
        let mid = lo + len / 2;
        pairwise_sum(lo, mid, f) + pairwise_sum(mid, hi, f)
    }
}

/// Mean of `f(k)` for `k in 0..m`.
pub fn circle_mean(m: usize, f: impl Fn(usize) -> C) -> C {
    pairwise_sum(0, m, &f) / m as f64
}

/// Angles `w_k = 2πk/M`.
pub fn angles(m: usize) -> Vec<f64> {
    (0..m).map(|k| 2.0 * PI * k as f64 / m as f64).collect()
}

/// Nodes `z_k = e^{i w_k}`.
pub fn nodes(m: usize) -> Vec<C> {
    angles(m)
        .into_iter()
        .map(|w| C::new(libm::cos(w), libm::sin(w)))
        .collect()
}
