//! Small dense complex matrices and rank-3 tensors.
//!
//! Dimensions here are the number of filter roots, so everything is tiny and
//! stored row-major in a flat `Vec`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut, Mul};

use num_complex::Complex64 as C;

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<C>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![C::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    /// Builds a matrix from row slices. Panics if the rows are not square.
    pub fn from_rows(rows: &[&[C]]) -> Self {
        let n = rows.len();
        Self::from_fn(n, |i, j| {
            assert_eq!(rows[i].len(), n, "row {i} has wrong length");
            rows[i][j]
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[C] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(i, j)].conj())
    }

    pub fn scale(&self, s: C) -> Self {
        Self::from_fn(self.n, |i, j| self[(i, j)] * s)
    }

    pub fn trace(&self) -> C {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |self - self^H|`; zero for an exactly Hermitian matrix.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.conj_transpose())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// LU factorisation with partial pivoting. `None` when a pivot is exactly
    /// zero.
    pub fn lu(&self) -> Option<Lu> {
        let n = self.n;
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for col in 0..n {
            let (pivot_row, pivot_mag) = (col..n)
                .map(|r| (r, a[(r, col)].norm()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_mag == 0.0 || !pivot_mag.is_finite() {
                return None;
            }
            if pivot_row != col {
                for j in 0..n {
                    a.data.swap(pivot_row * n + j, col * n + j);
                }
                perm.swap(pivot_row, col);
                sign = -sign;
            }
            let pivot = a[(col, col)];
            for r in (col + 1)..n {
                let factor = a[(r, col)] / pivot;
                a[(r, col)] = factor;
                for j in (col + 1)..n {
                    let upd = factor * a[(col, j)];
                    a[(r, j)] -= upd;
                }
            }
        }
        Some(Lu { factors: a, perm, sign })
    }

    pub fn inverse(&self) -> Option<Self> {
        self.lu().map(|lu| lu.inverse())
    }

    pub fn determinant(&self) -> C {
        match self.lu() {
            Some(lu) => lu.determinant(),
            None => C::new(0.0, 0.0),
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C;
    fn index(&self, (i, j): (usize, usize)) -> &C {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n);
        CMatrix::from_fn(self.n, |i, j| (0..self.n).map(|k| self[(i, k)] * rhs[(k, j)]).sum())
    }
}

/// Packed LU factors produced by [`CMatrix::lu`].
#[derive(Clone, Debug)]
pub struct Lu {
    factors: CMatrix,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    pub fn solve(&self, rhs: &[C]) -> Vec<C> {
        let n = self.factors.n;
        assert_eq!(rhs.len(), n);
        let mut x: Vec<C> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let upd = self.factors[(i, k)] * x[k];
                x[i] -= upd;
            }
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let upd = self.factors[(i, k)] * x[k];
                x[i] -= upd;
            }
            x[i] /= self.factors[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> CMatrix {
        let n = self.factors.n;
        let mut inv = CMatrix::zeros(n);
        let mut e = vec![C::new(0.0, 0.0); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = C::new(0.0, 0.0));
            e[j] = C::new(1.0, 0.0);
            for (i, v) in self.solve(&e).into_iter().enumerate() {
                inv[(i, j)] = v;
            }
        }
        inv
    }

    pub fn determinant(&self) -> C {
        let n = self.factors.n;
        (0..n).fold(C::new(self.sign, 0.0), |acc, i| acc * self.factors[(i, i)])
    }
}

/// Rank-3 complex tensor `t[(i, j, k)]`, all dimensions equal.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    n: usize,
    data: Vec<C>,
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![C::new(0.0, 0.0); n * n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> C) -> Self {
        let mut data = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    data.push(f(i, j, k));
                }
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[C] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `a * self + b * other`, entrywise.
    pub fn affine(&self, a: f64, other: &Self, b: f64) -> Self {
        assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(x, y)| x * a + y * b).collect(),
        }
    }

    /// Largest `|t[(i, j, k)] - t[(j, i, k)]|`.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max((self[(i, j, k)] - self[(j, i, k)]).norm());
                }
            }
        }
        worst
    }
}

impl Index<(usize, usize, usize)> for Tensor3 {
    type Output = C;
    fn index(&self, (i, j, k): (usize, usize, usize)) -> &C {
        &self.data[(i * self.n + j) * self.n + k]
    }
}

impl IndexMut<(usize, usize, usize)> for Tensor3 {
    fn index_mut(&mut self, (i, j, k): (usize, usize, usize)) -> &mut C {
        &mut self.data[(i * self.n + j) * self.n + k]
    }
}
