//! Banded LU, tridiagonal solves and a small coordinate/CSR sparse matrix.

use std::io::{self, Write};

use thiserror::Error;

use num_traits::Zero;

use crate::scalar::{lit, to_f64, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("matrix is singular to working precision (pivot {pivot} at row {row})")]
    Singular { row: usize, pivot: f64 },
    #[error("entry ({row}, {col}) lies outside the declared band")]
    OutsideBand { row: usize, col: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

/// LU factors of a band matrix with partial pivoting.
///
/// Row `i` keeps columns `i−kl ..= i+ku+kl`; the extra `kl` upper diagonals
/// absorb fill from row interchanges.
#[derive(Debug, Clone)]
pub struct BandLu<S> {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<S>,
    piv: Vec<usize>,
}

impl<S: Scalar> BandLu<S> {
    /// Creates an all-zero band matrix ready for [`add`](Self::add).
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self { n, kl, ku, width, data: vec![S::zero(); n * width], piv: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, row: usize, col: usize) -> usize {
        row * self.width + (col + self.kl - row)
    }

    /// Adds `v` to entry `(row, col)` before factorization.
    pub fn add(&mut self, row: usize, col: usize, v: S) -> Result<(), SolveError> {
        if col + self.kl < row || col > row + self.ku {
            return Err(SolveError::OutsideBand { row, col });
        }
        let k = self.idx(row, col);
        self.data[k] += v;
        Ok(())
    }

    /// Clears row `row` inside the band.
    pub fn clear_row(&mut self, row: usize) {
        let a = row * self.width;
        self.data[a..a + self.width].iter_mut().for_each(|x| *x = S::zero());
    }

    pub fn factor(mut self) -> Result<Self, SolveError> {
        let (n, kl) = (self.n, self.kl);
        let reach = self.ku + kl;
        let scale = self.data.iter().fold(S::Real::zero(), |m, x| {
            let a = x.modulus();
            if a > m {
                a
            } else {
                m
            }
        });
        let tiny = scale * lit::<S::Real>(1e-20);
        self.piv = Vec::with_capacity(n);
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.data[self.idx(k, k)].modulus();
            for i in k + 1..=last {
                let v = self.data[self.idx(i, k)].modulus();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > tiny) {
                return Err(SolveError::Singular {
                    row: k,
                    pivot: to_f64(best),
                });
            }
            self.piv.push(p);
            let cmax = (k + reach).min(n - 1);
            if p != k {
                for c in k..=cmax {
                    let (a, b) = (self.idx(k, c), self.idx(p, c));
                    self.data.swap(a, b);
                }
            }
            let inv = S::one() / self.data[self.idx(k, k)];
            for i in k + 1..=last {
                let li = self.idx(i, k);
                let l = self.data[li] * inv;
                if l == S::zero() {
                    continue;
                }
                self.data[li] = l;
                for c in k + 1..=cmax {
                    let u = self.data[self.idx(k, c)];
                    let t = self.idx(i, c);
                    self.data[t] -= l * u;
                }
            }
        }
        Ok(self)
    }

    /// Solves in place after [`factor`](Self::factor).
    pub fn solve(&self, b: &mut [S]) -> Result<(), SolveError> {
        let n = self.n;
        if b.len() != n {
            return Err(SolveError::Dimension { expected: n, got: b.len() });
        }
        let reach = self.ku + self.kl;
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk == S::zero() {
                continue;
            }
            for i in k + 1..=(k + self.kl).min(n - 1) {
                b[i] -= self.data[self.idx(i, k)] * bk;
            }
        }
        for k in (0..n).rev() {
            let mut s = b[k];
            for c in k + 1..=(k + reach).min(n - 1) {
                s -= self.data[self.idx(k, c)] * b[c];
            }
            b[k] = s / self.data[self.idx(k, k)];
        }
        Ok(())
    }
}

/// Thomas algorithm for `lower[i] x[i−1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`
/// (no pivoting; intended for diagonally dominant or SPD systems).
pub fn solve_tridiagonal<S: Scalar>(lower: &[S], diag: &[S], upper: &[S], rhs: &mut [S]) {
    let n = diag.len();
    let mut c = vec![S::zero(); n];
    let mut beta = diag[0];
    rhs[0] /= beta;
    for i in 1..n {
        c[i - 1] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * c[i - 1];
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        let t = c[i] * rhs[i + 1];
        rhs[i] -= t;
    }
}

/// Compressed sparse row matrix assembled from triplets.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<S> {
    pub nrows: usize,
    pub ncols: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<S>,
}

impl<S: Scalar> SparseMatrix<S> {
    /// Duplicates are summed; explicit zeros are dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, mut trip: Vec<(usize, usize, S)>) -> Self {
        trip.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut cols = Vec::with_capacity(trip.len());
        let mut vals: Vec<S> = Vec::with_capacity(trip.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in trip {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        let mut m = Self { nrows, ncols, row_ptr, cols, vals };
        m.prune();
        m
    }

    fn prune(&mut self) {
        let mut row_ptr = vec![0usize; self.nrows + 1];
        let mut cols = Vec::with_capacity(self.cols.len());
        let mut vals = Vec::with_capacity(self.vals.len());
        for r in 0..self.nrows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.vals[k] != S::zero() {
                    cols.push(self.cols[k]);
                    vals.push(self.vals[k]);
                }
            }
            row_ptr[r + 1] = cols.len();
        }
        self.row_ptr = row_ptr;
        self.cols = cols;
        self.vals = vals;
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, S)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (self.cols[k], self.vals[k]))
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, S)> + '_ {
        (0..self.nrows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> S {
        self.row(r).find(|(cc, _)| *cc == c).map_or(S::zero(), |(_, v)| v)
    }

    pub fn matvec(&self, x: &[S], y: &mut [S]) {
        for r in 0..self.nrows {
            y[r] = self.row(r).map(|(c, v)| v * x[c]).sum();
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.ncols, self.nrows, self.triplets().map(|(r, c, v)| (c, r, v)).collect())
    }

    /// Lower and upper bandwidth.
    pub fn bandwidth(&self) -> (usize, usize) {
        self.triplets().fold((0, 0), |(l, u), (r, c, _)| {
            (l.max(r.saturating_sub(c)), u.max(c.saturating_sub(r)))
        })
    }

    /// Writes `row col re im` lines (zero-based), preceded by a size line.
    pub fn write_coordinate<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "% {} {} {}", self.nrows, self.ncols, self.nnz())?;
        for (r, c, v) in self.triplets() {
            writeln!(out, "{} {} {:e} {:e}", r, c, v.re(), v.im())?;
        }
        Ok(())
    }
}
