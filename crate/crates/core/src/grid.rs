//! Uniform grid on `[0, L]` and its difference operators.
//!
//! Two families live here. The collocated operators [`SpatialGrid::d1`] and
//! [`SpatialGrid::d2`] act on node samples and close the boundary through
//! ghost values chosen by a [`BcTag`]. The staggered pair (`node_to_cell`,
//! `cell_to_node`) maps between nodes `x_i = ih` and cell midpoints
//! `x_{k+1/2}`; it satisfies summation by parts exactly and is what the
//! first-order generator is built from.

use thiserror::Error;

use crate::kernel::MemoryQuadrature;
use crate::params::PhysicalParams;
use crate::scalar::{from_usize, lit, Real, Scalar};
use crate::state::FirstOrderState;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("size mismatch: expected {expected} samples, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("grid needs at least one interior node and L > 0")]
    Degenerate,
}

/// Boundary behaviour of a collocated field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcTag {
    /// Zero at both ends; only interior nodes are stored.
    DirichletBoth,
    /// Zero slope at both ends; all `N+2` nodes stored.
    NeumannBoth,
    /// Zero at `x=0`, prescribed slope at `x=L`; all `N+2` nodes stored.
    DirichletLeftRobinRight,
    /// One Dirichlet column per memory age.
    DirichletBothPerAge,
}

impl BcTag {
    pub fn stored_len(self, n: usize) -> usize {
        match self {
            BcTag::DirichletBoth | BcTag::DirichletBothPerAge => n,
            _ => n + 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid<T> {
    pub length: T,
    /// Interior node count.
    pub n: usize,
    pub h: T,
}

impl<T: Real> SpatialGrid<T> {
    pub fn new(length: T, n: usize) -> Result<Self, GridError> {
        if n == 0 || !(length > T::zero()) {
            return Err(GridError::Degenerate);
        }
        Ok(Self { length, n, h: length / from_usize(n + 1) })
    }

    /// Node `i ∈ 0..=N+1`.
    pub fn node(&self, i: usize) -> T {
        if i == self.n + 1 {
            self.length
        } else {
            self.h * from_usize(i)
        }
    }

    pub fn nodes(&self) -> Vec<T> {
        (0..self.n + 2).map(|i| self.node(i)).collect()
    }

    /// Midpoint of cell `k ∈ 0..=N`.
    pub fn cell(&self, k: usize) -> T {
        self.h * (from_usize::<T>(k) + lit(0.5))
    }

    pub fn cells(&self) -> Vec<T> {
        (0..=self.n).map(|k| self.cell(k)).collect()
    }

    pub fn n_cells(&self) -> usize {
        self.n + 1
    }

    fn check(&self, f: &[T], tag: BcTag) -> Result<(), GridError> {
        let expected = tag.stored_len(self.n);
        if f.len() != expected {
            return Err(GridError::SizeMismatch { expected, got: f.len() });
        }
        Ok(())
    }

    /// Value at node `i ∈ −1..=N+2` including ghosts; `slope` is the
    /// prescribed `f_x(L)` for the Robin tag.
    fn extended(&self, f: &[T], tag: BcTag, slope: T, i: isize) -> T {
        let n = self.n as isize;
        match tag {
            BcTag::DirichletBoth | BcTag::DirichletBothPerAge => {
                if i == 0 || i == n + 1 {
                    T::zero()
                } else if i < 0 {
                    -f[0]
                } else if i > n + 1 {
                    -f[(n - 1) as usize]
                } else {
                    f[(i - 1) as usize]
                }
            }
            BcTag::NeumannBoth => {
                let j = if i < 0 { -i } else if i > n + 1 { 2 * (n + 1) - i } else { i };
                f[j as usize]
            }
            BcTag::DirichletLeftRobinRight => {
                if i < 0 {
                    -f[(-i) as usize]
                } else if i > n + 1 {
                    f[n as usize] + lit::<T>(2.0) * self.h * slope
                } else {
                    f[i as usize]
                }
            }
        }
    }

    fn stored_range(&self, tag: BcTag) -> std::ops::Range<isize> {
        match tag {
            BcTag::DirichletBoth | BcTag::DirichletBothPerAge => 1..self.n as isize + 1,
            _ => 0..self.n as isize + 2,
        }
    }

    /// Centered first derivative on the stored nodes; boundary rows use the
    /// ghost values of `tag`.
    pub fn d1(&self, f: &[T], tag: BcTag) -> Result<Vec<T>, GridError> {
        self.d1_with_slope(f, tag, T::zero())
    }

    /// [`d1`](Self::d1) with a prescribed right-end slope for the Robin tag.
    pub fn d1_with_slope(&self, f: &[T], tag: BcTag, slope: T) -> Result<Vec<T>, GridError> {
        self.check(f, tag)?;
        let inv = T::one() / (lit::<T>(2.0) * self.h);
        Ok(self
            .stored_range(tag)
            .map(|i| {
                (self.extended(f, tag, slope, i + 1) - self.extended(f, tag, slope, i - 1)) * inv
            })
            .collect())
    }

    pub fn d2(&self, f: &[T], tag: BcTag) -> Result<Vec<T>, GridError> {
        self.d2_with_slope(f, tag, T::zero())
    }

    pub fn d2_with_slope(&self, f: &[T], tag: BcTag, slope: T) -> Result<Vec<T>, GridError> {
        self.check(f, tag)?;
        let inv = T::one() / (self.h * self.h);
        let two: T = lit(2.0);
        Ok(self
            .stored_range(tag)
            .map(|i| {
                (self.extended(f, tag, slope, i + 1) - two * self.extended(f, tag, slope, i)
                    + self.extended(f, tag, slope, i - 1))
                    * inv
            })
            .collect())
    }

    /// Ghost value `v_{N+2}` enforcing `α v_x(L) + γ g = 0` with the centered
    /// stencil, where `g = (φ + η_t)(L)` (or `u³(L)`). `v` holds all nodes.
    pub fn robin_ghost(&self, v: &[T], g: T, params: &PhysicalParams<T>) -> T {
        v[self.n] - lit::<T>(2.0) * self.h * params.gamma / params.alpha * g
    }

    /// Trapezoid `∫ f g` over node samples `0..=N+1`.
    pub fn trapezoid(&self, f: &[T], g: &[T]) -> T {
        let n = f.len();
        let half: T = lit(0.5);
        let s: T = f.iter().zip(g).map(|(a, b)| *a * *b).sum();
        (s - half * (f[0] * g[0] + f[n - 1] * g[n - 1])) * self.h
    }

    // ---- staggered operators -------------------------------------------------

    /// `(f_{k+1} − f_k)/h` for `k = 0..=N`, from node values with
    /// `f_0 = left`, `f_{N+1} = right` and `interior` the nodes `1..=N`.
    pub fn node_to_cell<S: Scalar<Real = T>>(&self, left: S, interior: &[S], right: S, out: &mut [S]) {
        let n = self.n;
        let inv = T::one() / self.h;
        debug_assert!(interior.len() >= n && out.len() == n + 1);
        out[0] = (interior[0] - left).scale(inv);
        for k in 1..n {
            out[k] = (interior[k] - interior[k - 1]).scale(inv);
        }
        out[n] = (right - interior[n - 1]).scale(inv);
    }

    /// Difference of cell values at nodes `0..=N+1`, with boundary values
    /// `left`/`right` reached over a half cell.
    pub fn cell_to_node<S: Scalar<Real = T>>(&self, left: S, cells: &[S], right: S, out: &mut [S]) {
        let n = self.n;
        let inv = T::one() / self.h;
        let inv_half = inv * lit(2.0);
        debug_assert!(cells.len() == n + 1 && out.len() == n + 2);
        out[0] = (cells[0] - left).scale(inv_half);
        for i in 1..=n {
            out[i] = (cells[i] - cells[i - 1]).scale(inv);
        }
        out[n + 1] = (right - cells[n]).scale(inv_half);
    }

    /// Dirichlet Laplacian on cells, `D G c` with zero boundary values.
    pub fn cell_laplacian<S: Scalar<Real = T>>(&self, cells: &[S], scratch: &mut [S], out: &mut [S]) {
        let n = self.n;
        self.cell_to_node(S::zero(), cells, S::zero(), scratch);
        let inv = T::one() / self.h;
        for k in 0..=n {
            out[k] = (scratch[k + 1] - scratch[k]).scale(inv);
        }
    }

    /// `h Σ a b̄` over cells (or interior nodes).
    pub fn dot_uniform<S: Scalar<Real = T>>(&self, a: &[S], b: &[S]) -> S {
        let s: S = a.iter().zip(b).map(|(x, y)| *x * y.conj()).sum();
        s.scale(self.h)
    }

    /// Trapezoid `h Σ' a b̄` over nodes `0..=N+1` (half weights at both ends).
    pub fn dot_nodes_full<S: Scalar<Real = T>>(&self, a: &[S], b: &[S]) -> S {
        let n = a.len() - 1;
        let half: T = lit(0.5);
        let s: S = a.iter().zip(b).map(|(x, y)| *x * y.conj()).sum();
        (s - (a[0] * b[0].conj() + a[n] * b[n].conj()).scale(half)).scale(self.h)
    }

    /// Trapezoid over nodes `1..=N+1` with the left value pinned to zero.
    pub fn dot_nodes_right<S: Scalar<Real = T>>(&self, a: &[S], b: &[S]) -> S {
        let n = a.len() - 1;
        let half: T = lit(0.5);
        let s: S = a.iter().zip(b).map(|(x, y)| *x * y.conj()).sum();
        (s - (a[n] * b[n].conj()).scale(half)).scale(self.h)
    }
}

/// Discrete energy inner product `⟨U, W⟩_H`.
///
/// Every term is a trapezoid sum on the node or cell set where the field
/// lives; the history term is `md Σ_j W_j ⟨Gκ_j, Gκ̃_j⟩`.
pub fn inner_product_h<S: Scalar>(
    u: &FirstOrderState<S>,
    w: &FirstOrderState<S>,
    params: &PhysicalParams<S::Real>,
    quad: Option<&MemoryQuadrature<S::Real>>,
    grid: &SpatialGrid<S::Real>,
) -> Result<S, GridError> {
    u.check_conforms(grid)?;
    w.check_conforms(grid)?;
    if u.kappa.n_ages() != w.kappa.n_ages() {
        return Err(GridError::SizeMismatch { expected: u.kappa.n_ages(), got: w.kappa.n_ages() });
    }
    let n = grid.n;
    let mut du = vec![S::zero(); n + 1];
    let mut dw = vec![S::zero(); n + 1];
    grid.node_to_cell(S::zero(), &u.v, u.v[n], &mut du);
    grid.node_to_cell(S::zero(), &w.v, w.v[n], &mut dw);
    let p = params;
    let mut acc = grid.dot_uniform(&du, &dw).scale(p.alpha)
        + grid.dot_nodes_right(&u.z, &w.z).scale(p.rho)
        + grid.dot_uniform(&u.u1, &w.u1).scale(p.mu)
        + grid.dot_uniform(&u.u2, &w.u2).scale(p.xi * p.eps3)
        + grid.dot_uniform(&u.u3, &w.u3).scale(p.eps3)
        + grid.dot_uniform(&u.w, &w.w);
    if let Some(q) = quad {
        let md = p.m * p.d;
        let mut gu = vec![S::zero(); n + 2];
        let mut gw = vec![S::zero(); n + 2];
        for j in 0..u.kappa.n_ages() {
            grid.cell_to_node(S::zero(), u.kappa.column(j), S::zero(), &mut gu);
            grid.cell_to_node(S::zero(), w.kappa.column(j), S::zero(), &mut gw);
            acc += grid.dot_nodes_full(&gu, &gw).scale(md * q.w(j));
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn sample(g: &SpatialGrid<f64>, tag: BcTag, f: impl Fn(f64) -> f64) -> Vec<f64> {
        match tag {
            BcTag::DirichletBoth | BcTag::DirichletBothPerAge => (1..=g.n).map(|i| f(g.node(i))).collect(),
            _ => g.nodes().into_iter().map(f).collect(),
        }
    }

    #[test]
    fn constants_and_linears() {
        let g = SpatialGrid::new(1.0, 20).unwrap();
        let c = sample(&g, BcTag::NeumannBoth, |_| 3.0);
        assert!(g.d1(&c, BcTag::NeumannBoth).unwrap().iter().all(|v| v.abs() < 1e-12));
        let x = sample(&g, BcTag::NeumannBoth, |x| x);
        let d = g.d1(&x, BcTag::NeumannBoth).unwrap();
        assert!(d[1..=g.n].iter().all(|v| (v - 1.0).abs() < 1e-12));
        let x2 = sample(&g, BcTag::NeumannBoth, |x| x * x);
        let d2 = g.d2(&x2, BcTag::NeumannBoth).unwrap();
        assert!(d2[1..=g.n].iter().all(|v| (v - 2.0).abs() < 1e-9));
        let z = vec![0.0; g.n];
        assert!(g.d2(&z, BcTag::DirichletBoth).unwrap().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn size_mismatch() {
        let g = SpatialGrid::new(1.0, 10).unwrap();
        assert_eq!(
            g.d1(&[0.0; 10], BcTag::NeumannBoth).unwrap_err(),
            GridError::SizeMismatch { expected: 12, got: 10 }
        );
    }

    fn sup_err(n: usize, op: impl Fn(&SpatialGrid<f64>) -> f64) -> f64 {
        op(&SpatialGrid::new(1.0, n).unwrap())
    }

    #[test]
    fn d1_second_order() {
        let err = |g: &SpatialGrid<f64>| {
            let f = sample(g, BcTag::DirichletBoth, |x| (PI * x).sin());
            let d = g.d1(&f, BcTag::DirichletBoth).unwrap();
            (1..=g.n).map(|i| (d[i - 1] - PI * (PI * g.node(i)).cos()).abs()).fold(0.0, f64::max)
        };
        let r = sup_err(39, err) / sup_err(79, err);
        assert!((3.5..4.5).contains(&r), "ratio {r}");
    }

    #[test]
    fn d2_eigen_relation() {
        let err = |g: &SpatialGrid<f64>| {
            let f = sample(g, BcTag::DirichletBoth, |x| (PI * x).sin());
            let d = g.d2(&f, BcTag::DirichletBoth).unwrap();
            d.iter().zip(&f).map(|(a, b)| (a + PI * PI * b).abs()).fold(0.0, f64::max)
        };
        let r = sup_err(39, err) / sup_err(79, err);
        assert!((3.5..4.5).contains(&r), "ratio {r}");
    }

    #[test]
    fn robin_ghost_cases() {
        let g = SpatialGrid::new(1.0, 16).unwrap();
        let p = PhysicalParams::<f64>::unit();
        let v = sample(&g, BcTag::DirichletLeftRobinRight, |x| x * (2.0 - x));
        // homogeneous data: mirror ghost
        assert_eq!(g.robin_ghost(&v, 0.0, &p), v[g.n]);
        // α = γ = 1, boundary data 2: slope −2
        let ghost = g.robin_ghost(&v, 2.0, &p);
        let slope = (ghost - v[g.n]) / (2.0 * g.h);
        assert!((slope + 2.0).abs() < 1e-12);
        let dv = g.d1_with_slope(&v, BcTag::DirichletLeftRobinRight, -2.0).unwrap();
        assert!((dv[g.n + 1] + 2.0).abs() < 1e-12);
        let p0 = PhysicalParams { gamma: 0.0, ..p };
        assert_eq!(g.robin_ghost(&v, 5.0, &p0), v[g.n]);
    }

    #[test]
    fn staggered_summation_by_parts() {
        // ⟨Df, g⟩_cells = −⟨f, Gg⟩_nodes + boundary terms, exactly
        let g = SpatialGrid::new(2.0, 13).unwrap();
        let n = g.n;
        let f: Vec<f64> = (0..n + 2).map(|i| (0.3 * i as f64).cos()).collect();
        let c: Vec<f64> = (0..=n).map(|k| (0.7 * k as f64).sin() + 0.2).collect();
        let (gl, gr) = (0.4, -1.1);
        let mut df = vec![0.0; n + 1];
        g.node_to_cell(f[0], &f[1..=n], f[n + 1], &mut df);
        let mut gc = vec![0.0; n + 2];
        g.cell_to_node(gl, &c, gr, &mut gc);
        let lhs = g.dot_uniform(&df, &c);
        let rhs = -g.dot_nodes_full(&f, &gc) + f[n + 1] * gr - f[0] * gl;
        assert!((lhs - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
    }

    #[test]
    fn energy_of_linear_displacement() {
        use crate::state::FirstOrderState;
        let p = PhysicalParams::<f64>::unit();
        for n in [10usize, 100] {
            let g = SpatialGrid::new(1.0, n).unwrap();
            let mut u = FirstOrderState::<f64>::zeros(&g, 0);
            for i in 0..=n {
                u.v[i] = g.node(i + 1);
            }
            let e = inner_product_h(&u, &u, &p, None, &g).unwrap();
            assert!((e - 1.0).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn operators_are_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, seed in 0u64..1000) {
            let g = SpatialGrid::new(1.0, 12).unwrap();
            let f: Vec<f64> = (0..14).map(|i| ((i as u64 * 31 + seed) % 17) as f64 / 17.0).collect();
            let h: Vec<f64> = (0..14).map(|i| ((i as u64 * 7 + seed) % 13) as f64 / 13.0).collect();
            let comb: Vec<f64> = f.iter().zip(&h).map(|(x, y)| a * x + b * y).collect();
            for tag in [BcTag::NeumannBoth, BcTag::DirichletLeftRobinRight] {
                let lf = g.d2(&f, tag).unwrap();
                let lh = g.d2(&h, tag).unwrap();
                let lc = g.d2(&comb, tag).unwrap();
                for i in 0..lc.len() {
                    prop_assert!((lc[i] - a * lf[i] - b * lh[i]).abs() < 1e-9);
                }
            }
        }

        #[test]
        fn collocated_sbp_residual_small(k in 1usize..4) {
            // ⟨d1 f, g⟩ + ⟨f, d1 g⟩ − [f g]_0^L → 0 as h → 0
            let resid = |n: usize| {
                let g = SpatialGrid::new(1.0, n).unwrap();
                let kf = k as f64;
                let f: Vec<f64> = g.nodes().iter().map(|x| (kf * x).sin()).collect();
                let h: Vec<f64> = g.nodes().iter().map(|x| x * x + x).collect();
                let df = g.d1_with_slope(&f, BcTag::DirichletLeftRobinRight, kf * kf.cos()).unwrap();
                let dh = g.d1_with_slope(&h, BcTag::DirichletLeftRobinRight, 3.0).unwrap();
                let bd = f[n + 1] * h[n + 1] - f[0] * h[0];
                (g.trapezoid(&df, &h) + g.trapezoid(&f, &dh) - bd).abs()
            };
            let (r1, r2) = (resid(40), resid(80));
            prop_assert!(r2 < r1 * 0.5 + 1e-12);
        }
    }
}
