//! The history field `κ(x, s)` and its transport `κ_t + κ_s = w`.
//!
//! Values are stored age-major: column `j` holds `κ(·, s_{j+1})` over the
//! spatial points, and the inflow value `κ(·, 0) = 0` is implicit.

use std::io::{self, Write};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::grid::{BcTag, SpatialGrid};
use crate::kernel::MemoryQuadrature;
use crate::params::PhysicalParams;
use crate::scalar::{lit, Real, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HistoryError {
    #[error("time step must be positive")]
    NonPositiveDt,
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
}

/// Where the spatial samples of a history column live.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    /// Cell midpoints, `N+1` values; used by the first-order generator.
    Cells,
    /// Interior nodes, `N` values; used by the collocated primal system.
    Nodes,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistoryField<S> {
    location: Location,
    n_space: usize,
    n_ages: usize,
    values: Vec<S>,
}

impl<S: Scalar> HistoryField<S> {
    pub fn zeros(location: Location, n_space: usize, n_ages: usize) -> Self {
        Self { location, n_space, n_ages, values: vec![S::zero(); n_space * n_ages] }
    }

    pub fn from_values(location: Location, n_space: usize, n_ages: usize, values: Vec<S>) -> Self {
        assert_eq!(values.len(), n_space * n_ages, "history values do not match the shape");
        Self { location, n_space, n_ages, values }
    }

    /// Samples `f(x, s)` at the field's points and positive ages.
    pub fn from_fn(
        location: Location,
        grid: &SpatialGrid<S::Real>,
        quad: &MemoryQuadrature<S::Real>,
        f: impl Fn(S::Real, S::Real) -> S,
    ) -> Self {
        let xs = match location {
            Location::Cells => grid.cells(),
            Location::Nodes => (1..=grid.n).map(|i| grid.node(i)).collect(),
        };
        let mut out = Self::zeros(location, xs.len(), quad.n_ages());
        for j in 0..quad.n_ages() {
            let s = quad.age(j);
            for (k, &x) in xs.iter().enumerate() {
                out.values[j * xs.len() + k] = f(x, s);
            }
        }
        out
    }

    pub fn location(&self) -> Location {
        self.location
    }
    pub fn n_space(&self) -> usize {
        self.n_space
    }
    pub fn n_ages(&self) -> usize {
        self.n_ages
    }
    pub fn values(&self) -> &[S] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [S] {
        &mut self.values
    }
    pub fn column(&self, j: usize) -> &[S] {
        &self.values[j * self.n_space..(j + 1) * self.n_space]
    }
    pub fn column_mut(&mut self, j: usize) -> &mut [S] {
        &mut self.values[j * self.n_space..(j + 1) * self.n_space]
    }
    pub fn get(&self, k: usize, j: usize) -> S {
        self.values[j * self.n_space + k]
    }

    fn check_quad(&self, quad: &MemoryQuadrature<S::Real>) -> Result<(), HistoryError> {
        if quad.n_ages() != self.n_ages {
            return Err(HistoryError::SizeMismatch { expected: quad.n_ages(), got: self.n_ages });
        }
        Ok(())
    }

    /// Spatial derivative of column `j`, with the zero boundary values.
    /// Cells map to the `N+2` nodes; nodes map to the `N+1` cells.
    fn gradient(&self, grid: &SpatialGrid<S::Real>, j: usize, out: &mut [S]) {
        let c = self.column(j);
        match self.location {
            Location::Cells => grid.cell_to_node(S::zero(), c, S::zero(), out),
            Location::Nodes => grid.node_to_cell(S::zero(), c, S::zero(), out),
        }
    }

    fn gradient_len(&self) -> usize {
        match self.location {
            Location::Cells => self.n_space + 1,
            Location::Nodes => self.n_space + 1,
        }
    }

    fn gradient_norm2(&self, grid: &SpatialGrid<S::Real>, g: &[S]) -> S::Real {
        match self.location {
            Location::Cells => grid.dot_nodes_full(g, g).re(),
            Location::Nodes => grid.dot_uniform(g, g).re(),
        }
    }

    /// `‖∂_x κ(·, s_j)‖²` for every slot.
    pub fn gradient_norms(&self, grid: &SpatialGrid<S::Real>) -> Vec<S::Real> {
        let mut g = vec![S::zero(); self.gradient_len()];
        (0..self.n_ages)
            .map(|j| {
                self.gradient(grid, j, &mut g);
                self.gradient_norm2(grid, &g)
            })
            .collect()
    }

    /// Writes `x,s,re,im` rows.
    pub fn write_csv<W: Write>(
        &self,
        mut out: W,
        grid: &SpatialGrid<S::Real>,
        quad: &MemoryQuadrature<S::Real>,
    ) -> io::Result<()> {
        let xs = match self.location {
            Location::Cells => grid.cells(),
            Location::Nodes => (1..=grid.n).map(|i| grid.node(i)).collect(),
        };
        writeln!(out, "x,s,re,im")?;
        for j in 0..self.n_ages {
            for (k, x) in xs.iter().enumerate() {
                let v = self.get(k, j);
                writeln!(out, "{:e},{:e},{:e},{:e}", x, quad.age(j), v.re(), v.im())?;
            }
        }
        Ok(())
    }
}

/// One backward-Euler step of `κ_t + κ_s = w`, upwind in `s` with inflow
/// `κ(·,0) = 0`; `w` is held at its new-time value.
pub fn transport_step<S: Scalar>(
    kappa: &HistoryField<S>,
    w: &[S],
    dt: S::Real,
    quad: &MemoryQuadrature<S::Real>,
) -> Result<HistoryField<S>, HistoryError> {
    if !(dt > S::Real::zero()) {
        return Err(HistoryError::NonPositiveDt);
    }
    kappa.check_quad(quad)?;
    if w.len() != kappa.n_space {
        return Err(HistoryError::SizeMismatch { expected: kappa.n_space, got: w.len() });
    }
    let mut next = kappa.clone();
    let n = kappa.n_space;
    for j in 0..kappa.n_ages {
        let r = dt / quad.spacing(j);
        let denom = S::Real::one() + r;
        for k in 0..n {
            let upstream = if j == 0 { S::zero() } else { next.values[(j - 1) * n + k] };
            let idx = j * n + k;
            next.values[idx] = (kappa.values[idx] + w[k].scale(dt) + upstream.scale(r)).scale(S::Real::one() / denom);
        }
    }
    Ok(next)
}

/// `Σ_j W_j ∂_xx κ(·, s_j)` with homogeneous Dirichlet data per age.
pub fn memory_flux<S: Scalar>(
    kappa: &HistoryField<S>,
    quad: &MemoryQuadrature<S::Real>,
    grid: &SpatialGrid<S::Real>,
) -> Result<Vec<S>, HistoryError> {
    kappa.check_quad(quad)?;
    let n = kappa.n_space;
    let mut acc = vec![S::zero(); n];
    match kappa.location {
        Location::Cells => {
            let mut scratch = vec![S::zero(); n + 1];
            let mut lap = vec![S::zero(); n];
            for j in 0..kappa.n_ages {
                grid.cell_laplacian(kappa.column(j), &mut scratch, &mut lap);
                let wj = quad.w(j);
                acc.iter_mut().zip(&lap).for_each(|(a, l)| *a += l.scale(wj));
            }
        }
        Location::Nodes => {
            // collocated three-point Laplacian with zero ends
            let inv = S::Real::one() / (grid.h * grid.h);
            let two: S::Real = lit(2.0);
            for j in 0..kappa.n_ages {
                let c = kappa.column(j);
                let wj = quad.w(j) * inv;
                for i in 0..n {
                    let left = if i == 0 { S::zero() } else { c[i - 1] };
                    let right = if i + 1 == n { S::zero() } else { c[i + 1] };
                    acc[i] += (left - c[i].scale(two) + right).scale(wj);
                }
            }
        }
    }
    Ok(acc)
}

/// Collocated flux through [`SpatialGrid::d2`]; equals [`memory_flux`] on
/// node-located fields.
pub fn memory_flux_collocated<T: Real>(
    kappa: &HistoryField<T>,
    quad: &MemoryQuadrature<T>,
    grid: &SpatialGrid<T>,
) -> Result<Vec<T>, HistoryError> {
    kappa.check_quad(quad)?;
    let mut acc = vec![T::zero(); kappa.n_space];
    for j in 0..kappa.n_ages {
        let d2 = grid
            .d2(kappa.column(j), BcTag::DirichletBothPerAge)
            .map_err(|_| HistoryError::SizeMismatch { expected: grid.n, got: kappa.n_space })?;
        acc.iter_mut().zip(d2).for_each(|(a, v)| *a += v * quad.w(j));
    }
    Ok(acc)
}

/// `∬ σ |κ_x|²` in the discrete form `Σ_j W_j ‖∂_x κ_j‖²`.
pub fn sigma_seminorm<S: Scalar>(
    kappa: &HistoryField<S>,
    quad: &MemoryQuadrature<S::Real>,
    grid: &SpatialGrid<S::Real>,
) -> S::Real {
    kappa.gradient_norms(grid).iter().enumerate().map(|(j, g)| quad.w(j) * *g).sum()
}

/// `(md/2) ∬ σ |κ_x|²`.
pub fn history_energy<S: Scalar>(
    kappa: &HistoryField<S>,
    quad: &MemoryQuadrature<S::Real>,
    grid: &SpatialGrid<S::Real>,
    params: &PhysicalParams<S::Real>,
) -> S::Real {
    params.m * params.d * lit(0.5) * sigma_seminorm(kappa, quad, grid)
}

/// `(md/2) ∬ σ′ |κ_x|²`, the rate at which the history energy is lost to
/// the kernel's decay.
pub fn history_dissipation<S: Scalar>(
    kappa: &HistoryField<S>,
    quad: &MemoryQuadrature<S::Real>,
    grid: &SpatialGrid<S::Real>,
    params: &PhysicalParams<S::Real>,
) -> S::Real {
    let s: S::Real = kappa.gradient_norms(grid).iter().enumerate().map(|(j, g)| quad.dw(j) * *g).sum();
    params.m * params.d * lit(0.5) * s
}

/// Exact power of the discrete age transport in the energy norm,
/// `md Σ_j W_j Re⟨∂_xκ_j, −(∂_xκ_j − ∂_xκ_{j−1})/Δ_j⟩`. Never positive when
/// `W_j/Δ_j` is nonincreasing.
pub fn transport_power<S: Scalar>(
    kappa: &HistoryField<S>,
    quad: &MemoryQuadrature<S::Real>,
    grid: &SpatialGrid<S::Real>,
    params: &PhysicalParams<S::Real>,
) -> S::Real {
    let len = kappa.gradient_len();
    let mut prev = vec![S::zero(); len];
    let mut cur = vec![S::zero(); len];
    let mut diff = vec![S::zero(); len];
    let mut acc = S::Real::zero();
    for j in 0..kappa.n_ages {
        kappa.gradient(grid, j, &mut cur);
        let inv = S::Real::one() / quad.spacing(j);
        for i in 0..len {
            diff[i] = (cur[i] - prev[i]).scale(inv);
        }
        let ip = match kappa.location {
            Location::Cells => grid.dot_nodes_full(&cur, &diff),
            Location::Nodes => grid.dot_uniform(&cur, &diff),
        };
        acc -= quad.w(j) * ip.re();
        std::mem::swap(&mut prev, &mut cur);
    }
    params.m * params.d * acc
}
