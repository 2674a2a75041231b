//! Integer matrices and the Smith normal form.
//!
//! [`IntMatrix`] is generic over the integer type so the same elimination
//! runs on `i64` in tests and on `BigInt` in production, where pivot growth
//! can never overflow.

use std::fmt::Debug;

use num_integer::Integer;
use num_traits::Signed;

/// Integer types the elimination routines accept.
pub trait Int: Integer + Signed + Clone + Debug {}
impl<I: Integer + Signed + Clone + Debug> Int for I {}

/// Row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix<I> {
    rows: usize,
    cols: usize,
    data: Vec<I>,
}

impl<I: Int> IntMatrix<I> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![I::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = I::one();
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, entries: Vec<I>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count");
        IntMatrix { rows, cols, data: entries }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> I) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        IntMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[I] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &IntMatrix<I>) -> IntMatrix<I> {
        assert_eq!(self.cols, other.rows, "shape mismatch in integer product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a.clone() * other[(k, j)].clone();
                    out[(i, j)] = out[(i, j)].clone() + prod;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[I]) -> Vec<I> {
        assert_eq!(self.cols, v.len(), "shape mismatch in integer matrix-vector product");
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(I::zero(), |acc, j| acc + self[(i, j)].clone() * v[j].clone())
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// `row[dst] += q * row[src]`.
    fn add_row(&mut self, src: usize, dst: usize, q: &I) {
        for j in 0..self.cols {
            let x = self[(src, j)].clone() * q.clone();
            self[(dst, j)] = self[(dst, j)].clone() + x;
        }
    }

    /// `col[dst] += q * col[src]`.
    fn add_col(&mut self, src: usize, dst: usize, q: &I) {
        for i in 0..self.rows {
            let x = self[(i, src)].clone() * q.clone();
            self[(i, dst)] = self[(i, dst)].clone() + x;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            self[(r, j)] = -self[(r, j)].clone();
        }
    }

    fn negate_col(&mut self, c: usize) {
        for i in 0..self.rows {
            self[(i, c)] = -self[(i, c)].clone();
        }
    }
}

impl<I> std::ops::Index<(usize, usize)> for IntMatrix<I> {
    type Output = I;
    fn index(&self, (i, j): (usize, usize)) -> &I {
        &self.data[i * self.cols + j]
    }
}

impl<I> std::ops::IndexMut<(usize, usize)> for IntMatrix<I> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut I {
        &mut self.data[i * self.cols + j]
    }
}

/// `u · a · v = d` with `u`, `v` unimodular and `d` diagonal, `d_i | d_{i+1}`.
#[derive(Clone, Debug)]
pub struct SmithForm<I> {
    pub u: IntMatrix<I>,
    pub u_inv: IntMatrix<I>,
    pub d: IntMatrix<I>,
    pub v: IntMatrix<I>,
    pub rank: usize,
}

impl<I: Int> SmithForm<I> {
    /// Nonzero diagonal entries, in order.
    pub fn invariant_factors(&self) -> Vec<I> {
        (0..self.rank).map(|i| self.d[(i, i)].clone()).collect()
    }

    /// Basis of the integer kernel lattice: trailing columns of `v`.
    pub fn kernel_basis(&self) -> Vec<Vec<I>> {
        (self.rank..self.d.cols())
            .map(|j| (0..self.v.rows()).map(|i| self.v[(i, j)].clone()).collect())
            .collect()
    }

    /// Integral `x` with `a x = b`, if one exists.
    pub fn solve(&self, b: &[I]) -> Option<Vec<I>> {
        let ub = self.u.mul_vec(b);
        let mut y = vec![I::zero(); self.d.cols()];
        for (i, ubi) in ub.iter().enumerate() {
            if i < self.rank {
                let (q, r) = ubi.div_rem(&self.d[(i, i)]);
                if !r.is_zero() {
                    return None;
                }
                y[i] = q;
            } else if !ubi.is_zero() {
                return None;
            }
        }
        Some(self.v.mul_vec(&y))
    }
}

fn smallest_nonzero<I: Int>(m: &IntMatrix<I>, from: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in from..m.rows() {
        for j in from..m.cols() {
            let x = &m[(i, j)];
            if x.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if m[(bi, bj)].abs() <= x.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

/// Smith normal form with smallest-absolute-value pivoting.
pub fn smith_normal_form<I: Int>(a: &IntMatrix<I>) -> SmithForm<I> {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut u_inv = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let mut t = 0;

    while t < m.min(n) {
        let Some((pi, pj)) = smallest_nonzero(&d, t) else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        u_inv.swap_cols(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            let mut clean = true;
            for i in (t + 1)..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = d[(i, t)].div_floor(&d[(t, t)]);
                let neg_q = -q.clone();
                d.add_row(t, i, &neg_q);
                u.add_row(t, i, &neg_q);
                u_inv.add_col(i, t, &q);
                if !d[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in (t + 1)..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = d[(t, j)].div_floor(&d[(t, t)]);
                let neg_q = -q;
                d.add_col(t, j, &neg_q);
                v.add_col(t, j, &neg_q);
                if !d[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                // a remainder smaller than the pivot survived; move it to the pivot
                let mut best = (t, t);
                for i in (t + 1)..m {
                    if !d[(i, t)].is_zero() && d[(i, t)].abs() < d[best].abs() {
                        best = (i, t);
                    }
                }
                for j in (t + 1)..n {
                    if !d[(t, j)].is_zero() && d[(t, j)].abs() < d[best].abs() {
                        best = (t, j);
                    }
                }
                if best.0 != t {
                    d.swap_rows(t, best.0);
                    u.swap_rows(t, best.0);
                    u_inv.swap_cols(t, best.0);
                } else if best.1 != t {
                    d.swap_cols(t, best.1);
                    v.swap_cols(t, best.1);
                }
                continue;
            }
            // divisibility of the remaining block by the pivot
            let offender = ((t + 1)..m).find(|&i| {
                ((t + 1)..n).any(|j| !d[(i, j)].mod_floor(&d[(t, t)]).is_zero())
            });
            match offender {
                Some(i) => {
                    let one = I::one();
                    d.add_row(i, t, &one);
                    u.add_row(i, t, &one);
                    u_inv.add_col(t, i, &-one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
        t += 1;
    }

    SmithForm { u, u_inv, d, v, rank: t }
}
