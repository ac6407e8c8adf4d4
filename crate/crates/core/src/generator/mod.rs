//! The discrete first-order generator `A_h` and everything solved with it.
//!
//! Rows, with `k = μ/(ξε₃)` and `Λ = (1−m)w + m Σ_j W_j κ_j`:
//!
//! ```text
//! v_t  = z
//! z_t  = (1/ρ) G₀(α Dv + γ u³ − a w)
//! u¹_t = u² − G u³
//! u²_t = −k u¹ − b u²
//! u³_t = −(μ/ε₃) D u¹ + (γ/ε₃) D z − c u³
//! w_t  = d L Λ − a D z
//! κ_t  = −(κ_j − κ_{j−1})/Δ_j + w
//! ```
//!
//! `D` maps nodes to cells, `G`/`G₀` map cells to nodes (with `G₀` closing
//! the stress at `x = L` to zero, which is the Robin row), and `L = D G` is
//! the Dirichlet Laplacian on cells. With these pairs `Re⟨A_h U, U⟩_H` is
//! exactly the discrete dissipation.

mod bounds;
mod dense;
mod oracle;
mod resolvent;
mod shifted;
mod stationary;

pub use bounds::{lemma_constants, verify_lemma_bounds, BoundCheck, LemmaConstants};
pub use dense::{dense_generator, dense_resolvent_norm, expm_propagate, gram_matrix};
pub use oracle::{oracle_case, DampingCase, SmoothLoad};
pub use resolvent::{resolvent_norm, resolvent_solve, ResolventEstimate, ResolventOptions};
pub use shifted::ShiftedSolver;
pub use stationary::{effective_diffusivity, stationary_solve, StationarySolution};

use std::io::{self, Write};

use num_traits::Float;
use thiserror::Error;

use crate::grid::{inner_product_h, GridError, SpatialGrid};
use crate::history::transport_power;
use crate::kernel::MemoryQuadrature;
use crate::linalg::{SolveError, SparseMatrix};
use crate::params::{PhysicalParams, RegimeTag};
use crate::scalar::{lit, Real, Scalar};
use crate::state::{FirstOrderState, Layout};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneratorError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("shifted operator is singular at lambda = {lambda}")]
    SingularAt { lambda: f64 },
    #[error("parameters (b = {b}, c = {c}) do not match the requested damping case {case}")]
    CaseMismatch { case: u8, b: f64, c: f64 },
    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),
    #[error("history quadrature does not match the state ({expected} ages expected, got {got})")]
    AgeMismatch { expected: usize, got: usize },
}

/// Sparse discrete generator with the data it was built from.
#[derive(Debug, Clone)]
pub struct GeneratorMatrix<T: Real> {
    pub params: PhysicalParams<T>,
    pub grid: SpatialGrid<T>,
    /// Age quadrature; `None` for the Fourier law (`m = 0`), which carries no history.
    pub quad: Option<MemoryQuadrature<T>>,
    pub regime: RegimeTag,
    pub layout: Layout,
    field: SparseMatrix<T>,
    full: SparseMatrix<T>,
}

/// Builds `A_h`. The `(1−m)` diffusion block vanishes exactly for `m = 1`.
pub fn assemble<T: Real>(
    params: &PhysicalParams<T>,
    grid: &SpatialGrid<T>,
    quad: &MemoryQuadrature<T>,
) -> GeneratorMatrix<T> {
    let quad = if params.m == T::zero() { None } else { Some(quad.clone()) };
    let n_ages = quad.as_ref().map_or(0, |q| q.n_ages());
    let layout = Layout::new(grid.n, n_ages);
    let trip = field_triplets(params, grid, &layout);
    let field = SparseMatrix::from_triplets(layout.field_len(), layout.field_len(), trip.clone());
    let mut all = trip;
    if let Some(q) = &quad {
        history_triplets(params, grid, &layout, q, &mut all);
    }
    let full = SparseMatrix::from_triplets(layout.len(), layout.len(), all);
    GeneratorMatrix { params: *params, grid: *grid, quad, regime: params.classify(), layout, field, full }
}

/// Entries of the cell Laplacian row `k` as `(cell, coefficient)`.
pub(crate) fn laplacian_row<T: Real>(grid: &SpatialGrid<T>, k: usize) -> Vec<(usize, T)> {
    let n = grid.n;
    let inv = T::one() / (grid.h * grid.h);
    let three: T = lit(3.0);
    let two: T = lit(2.0);
    if k == 0 {
        vec![(0, -three * inv), (1, inv)]
    } else if k == n {
        vec![(n - 1, inv), (n, -three * inv)]
    } else {
        vec![(k - 1, inv), (k, -two * inv), (k + 1, inv)]
    }
}

fn field_triplets<T: Real>(p: &PhysicalParams<T>, grid: &SpatialGrid<T>, lay: &Layout) -> Vec<(usize, usize, T)> {
    let n = grid.n;
    let h = grid.h;
    let inv_h = T::one() / h;
    let mut t = Vec::with_capacity(40 * (n + 1));
    let iv = |i: usize| lay.v() + i - 1; // node i in 1..=N+1
    let iz = |i: usize| lay.z() + i - 1;
    let iu1 = |i: usize| lay.u1() + i - 1; // node i in 1..=N
    let iu2 = |i: usize| lay.u2() + i - 1;
    let iu3 = |k: usize| lay.u3() + k; // cell k in 0..=N
    let iw = |k: usize| lay.w() + k;

    for i in 1..=n + 1 {
        t.push((iv(i), iz(i), T::one()));
    }
    // z rows: (1/ρ) G₀ s with s_k = α(Dv)_k + γ u³_k − a w_k
    let push_s = |t: &mut Vec<(usize, usize, T)>, row: usize, k: usize, coef: T| {
        t.push((row, iv(k + 1), coef * p.alpha * inv_h));
        if k >= 1 {
            t.push((row, iv(k), -coef * p.alpha * inv_h));
        }
        t.push((row, iu3(k), coef * p.gamma));
        t.push((row, iw(k), -coef * p.a));
    };
    for i in 1..=n {
        let c = inv_h / p.rho;
        push_s(&mut t, iz(i), i, c);
        push_s(&mut t, iz(i), i - 1, -c);
    }
    push_s(&mut t, iz(n + 1), n, -lit::<T>(2.0) * inv_h / p.rho);

    for i in 1..=n {
        t.push((iu1(i), iu2(i), T::one()));
        t.push((iu1(i), iu3(i), -inv_h));
        t.push((iu1(i), iu3(i - 1), inv_h));
        t.push((iu2(i), iu1(i), -p.k_mag()));
        t.push((iu2(i), iu2(i), -p.b));
    }
    let mu_e = p.mu / p.eps3 * inv_h;
    let ga_e = p.gamma / p.eps3 * inv_h;
    for k in 0..=n {
        let row = iu3(k);
        if k + 1 <= n {
            t.push((row, iu1(k + 1), -mu_e));
        }
        if k >= 1 {
            t.push((row, iu1(k), mu_e));
        }
        t.push((row, iz(k + 1), ga_e));
        if k >= 1 {
            t.push((row, iz(k), -ga_e));
        }
        t.push((row, row, -p.c));

        let row = iw(k);
        let diff = (T::one() - p.m) * p.d;
        if diff != T::zero() {
            for (c, v) in laplacian_row(grid, k) {
                t.push((row, iw(c), diff * v));
            }
        }
        t.push((row, iz(k + 1), -p.a * inv_h));
        if k >= 1 {
            t.push((row, iz(k), p.a * inv_h));
        }
    }
    t
}

fn history_triplets<T: Real>(
    p: &PhysicalParams<T>,
    grid: &SpatialGrid<T>,
    lay: &Layout,
    q: &MemoryQuadrature<T>,
    t: &mut Vec<(usize, usize, T)>,
) {
    let n = grid.n;
    let dm = p.d * p.m;
    let ik = |j: usize, k: usize| lay.kappa() + j * (n + 1) + k;
    for j in 0..q.n_ages() {
        let inv = T::one() / q.spacing(j);
        let wj = dm * q.w(j);
        for k in 0..=n {
            for (c, v) in laplacian_row(grid, k) {
                t.push((lay.w() + k, ik(j, c), wj * v));
            }
            t.push((ik(j, k), ik(j, k), -inv));
            if j >= 1 {
                t.push((ik(j, k), ik(j - 1, k), inv));
            }
            t.push((ik(j, k), lay.w() + k, T::one()));
        }
    }
}

impl<T: Real> GeneratorMatrix<T> {
    pub fn n_ages(&self) -> usize {
        self.layout.n_ages
    }

    pub fn dim(&self) -> usize {
        self.layout.len()
    }

    /// The assembled operator over the flattened state.
    pub fn matrix(&self) -> &SparseMatrix<T> {
        &self.full
    }

    /// The block acting on the non-history fields.
    pub(crate) fn field_matrix(&self) -> &SparseMatrix<T> {
        &self.field
    }

    pub fn zero_state<S: Scalar<Real = T>>(&self) -> FirstOrderState<S> {
        FirstOrderState::zeros(&self.grid, self.n_ages())
    }

    fn check<S: Scalar<Real = T>>(&self, u: &FirstOrderState<S>) -> Result<(), GeneratorError> {
        u.check_conforms(&self.grid)?;
        if u.kappa.n_ages() != self.n_ages() {
            return Err(GeneratorError::AgeMismatch { expected: self.n_ages(), got: u.kappa.n_ages() });
        }
        Ok(())
    }

    /// Matrix-free `A_h U`, computed field by field from the grid operators.
    pub fn apply<S: Scalar<Real = T>>(&self, u: &FirstOrderState<S>) -> Result<FirstOrderState<S>, GeneratorError> {
        self.check(u)?;
        let p = &self.params;
        let g = &self.grid;
        let n = g.n;
        let zero = S::zero();
        let mut out = self.zero_state::<S>();

        let mut dv = vec![zero; n + 1];
        g.node_to_cell(zero, &u.v, u.v[n], &mut dv);
        let stress: Vec<S> = (0..=n)
            .map(|k| dv[k].scale(p.alpha) + u.u3[k].scale(p.gamma) - u.w[k].scale(p.a))
            .collect();
        let mut nodes = vec![zero; n + 2];
        g.cell_to_node(zero, &stress, zero, &mut nodes);
        for i in 0..=n {
            out.v[i] = u.z[i];
            out.z[i] = nodes[i + 1].scale(T::one() / p.rho);
        }

        g.cell_to_node(zero, &u.u3, zero, &mut nodes);
        for i in 0..n {
            out.u1[i] = u.u2[i] - nodes[i + 1];
            out.u2[i] = -u.u1[i].scale(p.k_mag()) - u.u2[i].scale(p.b);
        }

        let mut du1 = vec![zero; n + 1];
        let mut dz = vec![zero; n + 1];
        g.node_to_cell(zero, &u.u1, zero, &mut du1);
        g.node_to_cell(zero, &u.z, u.z[n], &mut dz);
        for k in 0..=n {
            out.u3[k] = -du1[k].scale(p.mu / p.eps3) + dz[k].scale(p.gamma / p.eps3) - u.u3[k].scale(p.c);
        }

        // Λ = (1−m)w + m Σ W_j κ_j
        let mut lam: Vec<S> = u.w.iter().map(|w| w.scale(T::one() - p.m)).collect();
        if let Some(q) = &self.quad {
            for j in 0..q.n_ages() {
                let wj = p.m * q.w(j);
                for (l, kv) in lam.iter_mut().zip(u.kappa.column(j)) {
                    *l += kv.scale(wj);
                }
            }
            for j in 0..q.n_ages() {
                let inv = T::one() / q.spacing(j);
                let (cur, prev) = (u.kappa.column(j).to_vec(), if j > 0 { Some(u.kappa.column(j - 1)) } else { None });
                let dst = out.kappa.column_mut(j);
                for k in 0..=n {
                    let up = prev.map_or(zero, |c| c[k]);
                    dst[k] = -(cur[k] - up).scale(inv) + u.w[k];
                }
            }
        }
        let mut lap = vec![zero; n + 1];
        g.cell_laplacian(&lam, &mut nodes, &mut lap);
        for k in 0..=n {
            out.w[k] = lap[k].scale(p.d) - dz[k].scale(p.a);
        }
        Ok(out)
    }

    /// `A_h U` through the assembled sparse matrix.
    pub fn apply_assembled<S: Scalar<Real = T>>(
        &self,
        u: &FirstOrderState<S>,
    ) -> Result<FirstOrderState<S>, GeneratorError> {
        self.check(u)?;
        let x = u.flatten();
        let y = self.matvec(&x);
        Ok(FirstOrderState::from_flat(self.layout, &y)?)
    }

    pub(crate) fn matvec<S: Scalar<Real = T>>(&self, x: &[S]) -> Vec<S> {
        (0..self.full.nrows).map(|r| self.full.row(r).map(|(c, v)| x[c].scale(v)).sum()).collect()
    }

    /// Exact discrete dissipation `Re⟨A_h U, U⟩_H`:
    /// `−bξε₃‖u²‖² − cε₃‖u³‖² − (1−m)d‖Gw‖² + (transport power of κ)`.
    pub fn dissipation<S: Scalar<Real = T>>(&self, u: &FirstOrderState<S>) -> T {
        let p = &self.params;
        let g = &self.grid;
        let n = g.n;
        let mut gw = vec![S::zero(); n + 2];
        g.cell_to_node(S::zero(), &u.w, S::zero(), &mut gw);
        let mut d = -p.b * p.xi * p.eps3 * g.dot_uniform(&u.u2, &u.u2).re()
            - p.c * p.eps3 * g.dot_uniform(&u.u3, &u.u3).re()
            - (T::one() - p.m) * p.d * g.dot_nodes_full(&gw, &gw).re();
        if let Some(q) = &self.quad {
            d += transport_power(&u.kappa, q, g, p);
        }
        d
    }

    pub fn inner<S: Scalar<Real = T>>(&self, u: &FirstOrderState<S>, w: &FirstOrderState<S>) -> Result<S, GeneratorError> {
        Ok(inner_product_h(u, w, &self.params, self.quad.as_ref(), &self.grid)?)
    }

    pub fn norm<S: Scalar<Real = T>>(&self, u: &FirstOrderState<S>) -> Result<T, GeneratorError> {
        Ok(self.inner(u, u)?.re().max(T::zero()).sqrt())
    }

    /// Writes the assembled matrix as `row col re im` lines.
    pub fn export_coordinate<W: Write>(&self, out: W) -> io::Result<()> {
        self.full.write_coordinate(out)
    }
}

/// `‖ξ D u² − u³ + (γ/ε₃) D v‖` over cells.
pub fn compatibility_residual<S: Scalar>(
    u: &FirstOrderState<S>,
    params: &PhysicalParams<S::Real>,
    grid: &SpatialGrid<S::Real>,
) -> S::Real {
    let r = compatibility_defect(u, params, grid);
    grid.dot_uniform(&r, &r).re().sqrt()
}

pub(crate) fn compatibility_defect<S: Scalar>(
    u: &FirstOrderState<S>,
    params: &PhysicalParams<S::Real>,
    grid: &SpatialGrid<S::Real>,
) -> Vec<S> {
    let n = grid.n;
    let mut du2 = vec![S::zero(); n + 1];
    let mut dv = vec![S::zero(); n + 1];
    grid.node_to_cell(S::zero(), &u.u2, S::zero(), &mut du2);
    grid.node_to_cell(S::zero(), &u.v, u.v[n], &mut dv);
    (0..=n)
        .map(|k| du2[k].scale(params.xi) - u.u3[k] + dv[k].scale(params.gamma / params.eps3))
        .collect()
}

/// A state with entries uniform in `[−1, 1)`, reproducible from `seed`.
pub fn random_state(gen: &GeneratorMatrix<f64>, seed: u64) -> FirstOrderState<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let flat: Vec<f64> = (0..gen.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
    FirstOrderState::from_flat(gen.layout, &flat).expect("layout matches the generator")
}
