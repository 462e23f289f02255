//! Central finite differences in Wirtinger form.
//!
//! With `ξ = x + iy`,
//! `∂/∂ξ = (∂/∂x − i ∂/∂y)/2` and `∂/∂ξ̄ = (∂/∂x + i ∂/∂y)/2`.

use alloc::vec::Vec;

use crate::linalg::CMatrix;
use crate::C;

fn shifted(point: &[C], index: usize, delta: C) -> Vec<C> {
    let mut p = point.to_vec();
    p[index] += delta;
    p
}

/// Wirtinger derivative of a vector-valued function with respect to one
/// coordinate, by central differences. Returns `∂f/∂ξ^index` (or
/// `∂f/∂ξ̄^index` when `conjugate`).
pub fn partial<F>(f: &F, point: &[C], index: usize, conjugate: bool, step: f64) -> Vec<C>
where
    F: Fn(&[C]) -> Vec<C>,
{
    let dx = C::new(step, 0.0);
    let dy = C::new(0.0, step);
    let fxp = f(&shifted(point, index, dx));
    let fxm = f(&shifted(point, index, -dx));
    let fyp = f(&shifted(point, index, dy));
    let fym = f(&shifted(point, index, -dy));
    let i = C::new(0.0, 1.0);
    let sgn = if conjugate { 1.0 } else { -1.0 };
    fxp.iter()
        .zip(&fxm)
        .zip(fyp.iter().zip(&fym))
        .map(|((a, b), (c, d))| {
            let ddx = (a - b) / (2.0 * step);
            let ddy = (c - d) / (2.0 * step);
            (ddx + i * ddy * sgn) * 0.5
        })
        .collect()
}

/// Scalar convenience wrapper around [`partial`].
pub fn partial_scalar<F>(f: &F, point: &[C], index: usize, conjugate: bool, step: f64) -> C
where
    F: Fn(&[C]) -> C,
{
    partial(&|p: &[C]| alloc::vec![f(p)], point, index, conjugate, step)[0]
}

/// Jacobian `out[(a, j)] = ∂f_a/∂ξ^j` (or `∂f_a/∂ξ̄^j`). `f` must return
/// exactly `point.len()` components.
pub fn jacobian<F>(f: &F, point: &[C], conjugate: bool, step: f64) -> CMatrix
where
    F: Fn(&[C]) -> Vec<C>,
{
    let n = point.len();
    let cols: Vec<Vec<C>> = (0..n).map(|j| partial(f, point, j, conjugate, step)).collect();
    CMatrix::from_fn(n, |a, j| cols[j][a])
}

/// Mixed Hessian `H[(i, j)] = ∂_i ∂_j̄ f` from real second differences:
/// `¼ [f_{x_i x_j} + f_{y_i y_j} + i (f_{x_i y_j} − f_{y_i x_j})]`.
pub fn mixed_hessian<F>(f: &F, point: &[C], step: f64) -> CMatrix
where
    F: Fn(&[C]) -> C,
{
    let n = point.len();
    let h = step;
    let re = C::new(h, 0.0);
    let im = C::new(0.0, h);
    let second = |a: usize, da: C, b: usize, db: C| -> C {
        let eval = |sa: f64, sb: f64| {
            let mut p = point.to_vec();
            p[a] += da * sa;
            p[b] += db * sb;
            f(&p)
        };
        (eval(1.0, 1.0) - eval(1.0, -1.0) - eval(-1.0, 1.0) + eval(-1.0, -1.0)) / (4.0 * h * h)
    };
    CMatrix::from_fn(n, |i, j| {
        let xx = second(i, re, j, re);
        let yy = second(i, im, j, im);
        let xy = second(i, re, j, im);
        let yx = second(i, im, j, re);
        (xx + yy + C::new(0.0, 1.0) * (xy - yx)) * 0.25
    })
}
