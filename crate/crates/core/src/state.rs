//! First-order state vector and its flat layout.

use num_complex::Complex;
use num_traits::{Float, Zero};

use crate::grid::{GridError, SpatialGrid};
use crate::history::{HistoryField, Location};
use crate::scalar::{Real, Scalar};

/// `U = (v, z, u¹, u², u³, w, κ)` on the staggered grid.
///
/// `v`, `z` live on nodes `1..=N+1` (pinned to zero at `x=0`), `u¹`, `u²` on
/// interior nodes `1..=N`, `u³`, `w` and every history column on the `N+1`
/// cells.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstOrderState<S> {
    pub v: Vec<S>,
    pub z: Vec<S>,
    pub u1: Vec<S>,
    pub u2: Vec<S>,
    pub u3: Vec<S>,
    pub w: Vec<S>,
    pub kappa: HistoryField<S>,
}

/// Offsets of each block in the flattened vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub n: usize,
    pub n_ages: usize,
}

impl Layout {
    pub fn new(n: usize, n_ages: usize) -> Self {
        Self { n, n_ages }
    }
    pub fn v(&self) -> usize {
        0
    }
    pub fn z(&self) -> usize {
        self.n + 1
    }
    pub fn u1(&self) -> usize {
        2 * (self.n + 1)
    }
    pub fn u2(&self) -> usize {
        2 * (self.n + 1) + self.n
    }
    pub fn u3(&self) -> usize {
        2 * (self.n + 1) + 2 * self.n
    }
    pub fn w(&self) -> usize {
        3 * (self.n + 1) + 2 * self.n
    }
    pub fn kappa(&self) -> usize {
        4 * (self.n + 1) + 2 * self.n
    }
    /// Length of the field part (everything but κ).
    pub fn field_len(&self) -> usize {
        self.kappa()
    }
    pub fn len(&self) -> usize {
        self.kappa() + (self.n + 1) * self.n_ages
    }
    pub fn is_empty(&self) -> bool {
        false
    }
}

impl<S: Scalar> FirstOrderState<S> {
    pub fn zeros(grid: &SpatialGrid<S::Real>, n_ages: usize) -> Self {
        let n = grid.n;
        Self {
            v: vec![S::zero(); n + 1],
            z: vec![S::zero(); n + 1],
            u1: vec![S::zero(); n],
            u2: vec![S::zero(); n],
            u3: vec![S::zero(); n + 1],
            w: vec![S::zero(); n + 1],
            kappa: HistoryField::zeros(Location::Cells, n + 1, n_ages),
        }
    }

    pub fn layout(&self) -> Layout {
        Layout::new(self.u1.len(), self.kappa.n_ages())
    }

    pub fn check_conforms(&self, grid: &SpatialGrid<S::Real>) -> Result<(), GridError> {
        let n = grid.n;
        let sizes = [
            (self.v.len(), n + 1),
            (self.z.len(), n + 1),
            (self.u1.len(), n),
            (self.u2.len(), n),
            (self.u3.len(), n + 1),
            (self.w.len(), n + 1),
            (self.kappa.n_space(), n + 1),
        ];
        for (got, expected) in sizes {
            if got != expected {
                return Err(GridError::SizeMismatch { expected, got });
            }
        }
        Ok(())
    }

    pub fn flatten(&self) -> Vec<S> {
        let mut out = Vec::with_capacity(self.layout().len());
        for f in [&self.v, &self.z, &self.u1, &self.u2, &self.u3, &self.w] {
            out.extend_from_slice(f);
        }
        out.extend_from_slice(self.kappa.values());
        out
    }

    pub fn from_flat(layout: Layout, flat: &[S]) -> Result<Self, GridError> {
        if flat.len() != layout.len() {
            return Err(GridError::SizeMismatch { expected: layout.len(), got: flat.len() });
        }
        let n = layout.n;
        let cut = |a: usize, len: usize| flat[a..a + len].to_vec();
        Ok(Self {
            v: cut(layout.v(), n + 1),
            z: cut(layout.z(), n + 1),
            u1: cut(layout.u1(), n),
            u2: cut(layout.u2(), n),
            u3: cut(layout.u3(), n + 1),
            w: cut(layout.w(), n + 1),
            kappa: HistoryField::from_values(
                Location::Cells,
                n + 1,
                layout.n_ages,
                flat[layout.kappa()..].to_vec(),
            ),
        })
    }

    fn fields_mut(&mut self) -> [&mut Vec<S>; 6] {
        [&mut self.v, &mut self.z, &mut self.u1, &mut self.u2, &mut self.u3, &mut self.w]
    }

    /// `self += a · other`.
    pub fn axpy(&mut self, a: S, other: &Self) {
        let others = [&other.v, &other.z, &other.u1, &other.u2, &other.u3, &other.w];
        for (dst, src) in self.fields_mut().into_iter().zip(others) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += a * *s;
            }
        }
        for (d, s) in self.kappa.values_mut().iter_mut().zip(other.kappa.values()) {
            *d += a * *s;
        }
    }

    pub fn scale(&mut self, a: S) {
        for f in self.fields_mut() {
            f.iter_mut().for_each(|x| *x *= a);
        }
        self.kappa.values_mut().iter_mut().for_each(|x| *x *= a);
    }

    /// Largest entry modulus, for quick finiteness checks.
    pub fn max_abs(&self) -> S::Real {
        self.flatten().iter().fold(S::Real::zero(), |m, x| {
            let a = x.modulus();
            if a > m || a.is_nan() {
                a
            } else {
                m
            }
        })
    }
}

impl<T: Real> FirstOrderState<T> {
    pub fn to_complex(&self) -> FirstOrderState<Complex<T>> {
        let c = |f: &Vec<T>| f.iter().map(|&x| Complex::new(x, T::zero())).collect();
        FirstOrderState {
            v: c(&self.v),
            z: c(&self.z),
            u1: c(&self.u1),
            u2: c(&self.u2),
            u3: c(&self.u3),
            w: c(&self.w),
            kappa: HistoryField::from_values(
                Location::Cells,
                self.kappa.n_space(),
                self.kappa.n_ages(),
                self.kappa.values().iter().map(|&x| Complex::new(x, T::zero())).collect(),
            ),
        }
    }
}
