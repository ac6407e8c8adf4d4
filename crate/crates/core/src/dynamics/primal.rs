//! The gauged second-order system in its physical fields, on the
//! collocated grid with ghost-point closures.
//!
//! ```text
//! ρ v_tt = α v_xx + γ(φ + η_t)_x − a w_x
//! φ_tt   = (μ/ε₃) φ_xx − k φ + (γμ/(ξε₃²)) v_x
//! θ_tt   = (μ/ε₃) θ_xx − k θ − b(θ_t + φ_x)
//! η_tt   = (μ/ε₃) η_xx − k η + (γ/ε₃) v_tx − c(η_t + φ)
//! w_t    = d(1−m) w_xx + dm Σ_j W_j κ_xx(s_j) − a v_xt
//! ```
//!
//! with `k = μ/(ξε₃)`, `v(0) = 0`, `α v_x(L) + γ(φ + η_t)(L) = 0`, `θ` and
//! `w` Dirichlet, `φ` and `η` Neumann.

use crate::grid::{BcTag, GridError, SpatialGrid};
use crate::history::{memory_flux, HistoryField, Location};
use crate::kernel::MemoryQuadrature;
use crate::params::PhysicalParams;
use crate::scalar::{lit, Real};
use crate::state::FirstOrderState;

#[derive(Debug, Clone, PartialEq)]
pub struct PrimalState<T> {
    /// `v`, `v_t` on all nodes `0..=N+1`.
    pub v: Vec<T>,
    pub vt: Vec<T>,
    /// `φ`, `φ_t`, `η`, `η_t` on all nodes (Neumann).
    pub phi: Vec<T>,
    pub phit: Vec<T>,
    /// `θ`, `θ_t` on interior nodes (Dirichlet).
    pub theta: Vec<T>,
    pub thetat: Vec<T>,
    pub eta: Vec<T>,
    pub etat: Vec<T>,
    /// `w` on interior nodes (Dirichlet).
    pub w: Vec<T>,
    pub t: T,
}

impl<T: Real> PrimalState<T> {
    pub fn zeros(grid: &SpatialGrid<T>) -> Self {
        let all = vec![T::zero(); grid.n + 2];
        let inner = vec![T::zero(); grid.n];
        Self {
            v: all.clone(),
            vt: all.clone(),
            phi: all.clone(),
            phit: all.clone(),
            theta: inner.clone(),
            thetat: inner.clone(),
            eta: all.clone(),
            etat: all,
            w: inner,
            t: T::zero(),
        }
    }

    pub fn check_conforms(&self, grid: &SpatialGrid<T>) -> Result<(), GridError> {
        let all = grid.n + 2;
        let inner = grid.n;
        for (f, e) in [
            (&self.v, all),
            (&self.vt, all),
            (&self.phi, all),
            (&self.phit, all),
            (&self.theta, inner),
            (&self.thetat, inner),
            (&self.eta, all),
            (&self.etat, all),
            (&self.w, inner),
        ] {
            if f.len() != e {
                return Err(GridError::SizeMismatch { expected: e, got: f.len() });
            }
        }
        Ok(())
    }

    /// Prescribed `v_x(L)` from the Robin row.
    pub fn robin_slope(&self, params: &PhysicalParams<T>) -> T {
        let last = self.phi.len() - 1;
        -params.gamma / params.alpha * (self.phi[last] + self.etat[last])
    }

    /// Energy-space variables: `z = v_t`, `u¹ = θ − η_x`, `u² = θ_t + φ_x`,
    /// `u³ = η_t + φ` and `w`, with cell values taken as node averages.
    pub fn lift(&self, grid: &SpatialGrid<T>, n_ages: usize) -> Result<FirstOrderState<T>, GridError> {
        self.check_conforms(grid)?;
        let n = grid.n;
        let half: T = lit(0.5);
        let mut u = FirstOrderState::zeros(grid, n_ages);
        u.v.copy_from_slice(&self.v[1..]);
        u.z.copy_from_slice(&self.vt[1..]);
        let eta_x = grid.d1(&self.eta, BcTag::NeumannBoth)?;
        let phi_x = grid.d1(&self.phi, BcTag::NeumannBoth)?;
        for i in 0..n {
            u.u1[i] = self.theta[i] - eta_x[i + 1];
            u.u2[i] = self.thetat[i] + phi_x[i + 1];
        }
        let w_at = |i: usize| if i == 0 || i == n + 1 { T::zero() } else { self.w[i - 1] };
        for k in 0..=n {
            let g = |i: usize| self.etat[i] + self.phi[i];
            u.u3[k] = half * (g(k) + g(k + 1));
            u.w[k] = half * (w_at(k) + w_at(k + 1));
        }
        Ok(u)
    }
}

/// Time derivative of the primal fields and of `w`.
pub fn rhs<T: Real>(
    s: &PrimalState<T>,
    kappa: &HistoryField<T>,
    params: &PhysicalParams<T>,
    quad: &MemoryQuadrature<T>,
    grid: &SpatialGrid<T>,
) -> Result<PrimalState<T>, GridError> {
    s.check_conforms(grid)?;
    if kappa.location() != Location::Nodes || kappa.n_space() != grid.n || kappa.n_ages() != quad.n_ages() {
        return Err(GridError::SizeMismatch { expected: grid.n * quad.n_ages(), got: kappa.values().len() });
    }
    let p = params;
    let n = grid.n;
    let k = p.k_mag();
    let me = p.mu / p.eps3;
    let slope = s.robin_slope(p);
    let robin = BcTag::DirichletLeftRobinRight;
    let neu = BcTag::NeumannBoth;
    let dir = BcTag::DirichletBoth;

    let v_xx = grid.d2_with_slope(&s.v, robin, slope)?;
    let v_x = grid.d1_with_slope(&s.v, robin, slope)?;
    let vt_x = one_sided_right(grid, &s.vt, grid.d1(&s.vt, robin)?);
    let g: Vec<T> = s.phi.iter().zip(&s.etat).map(|(a, b)| *a + *b).collect();
    let g_x = grid.d1(&g, neu)?;
    let phi_x = grid.d1(&s.phi, neu)?;
    let phi_xx = grid.d2(&s.phi, neu)?;
    let eta_xx = grid.d2(&s.eta, neu)?;
    let theta_xx = grid.d2(&s.theta, dir)?;
    let w_xx = grid.d2(&s.w, dir)?;
    let w_x = grid.d1(&s.w, dir)?;
    let flux = memory_flux(kappa, quad, grid).map_err(|_| GridError::SizeMismatch {
        expected: grid.n,
        got: kappa.n_space(),
    })?;

    let mut out = PrimalState::zeros(grid);
    out.t = T::one();
    let w_x_at = |i: usize| if i == 0 || i == n + 1 { boundary_w_x(grid, &s.w, i) } else { w_x[i - 1] };
    for i in 1..=n + 1 {
        out.v[i] = s.vt[i];
        out.vt[i] = (p.alpha * v_xx[i] + p.gamma * g_x[i] - p.a * w_x_at(i)) / p.rho;
    }
    for i in 0..=n + 1 {
        out.phi[i] = s.phit[i];
        out.phit[i] = me * phi_xx[i] - k * s.phi[i] + p.gamma * p.mu / (p.xi * p.eps3 * p.eps3) * v_x[i];
        out.eta[i] = s.etat[i];
        out.etat[i] = me * eta_xx[i] - k * s.eta[i] + p.gamma / p.eps3 * vt_x[i] - p.c * (s.etat[i] + s.phi[i]);
    }
    for i in 0..n {
        out.theta[i] = s.thetat[i];
        out.thetat[i] = me * theta_xx[i] - k * s.theta[i] - p.b * (s.thetat[i] + phi_x[i + 1]);
        out.w[i] = (T::one() - p.m) * p.d * w_xx[i] + p.d * p.m * flux[i] - p.a * vt_x[i + 1];
    }
    Ok(out)
}

/// Replaces the last entry of a centered derivative with the second-order
/// one-sided difference, for fields whose slope at `L` is not prescribed.
fn one_sided_right<T: Real>(grid: &SpatialGrid<T>, f: &[T], mut d: Vec<T>) -> Vec<T> {
    let m = f.len() - 1;
    d[m] = (lit::<T>(3.0) * f[m] - lit::<T>(4.0) * f[m - 1] + f[m - 2]) / (lit::<T>(2.0) * grid.h);
    d
}

/// One-sided `w_x` at the boundary nodes, where `w = 0`.
fn boundary_w_x<T: Real>(grid: &SpatialGrid<T>, w: &[T], i: usize) -> T {
    let n = w.len();
    let two_h = lit::<T>(2.0) * grid.h;
    if i == 0 {
        (lit::<T>(4.0) * w[0] - w[1]) / two_h
    } else {
        -(lit::<T>(4.0) * w[n - 1] - w[n - 2]) / two_h
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{build_quadrature, MemoryKernel};
    use std::f64::consts::PI;

    fn quad() -> MemoryQuadrature<f64> {
        build_quadrature(&MemoryKernel::exponential(1.0, 2.0).unwrap(), 32, 5.0).unwrap()
    }

    #[test]
    fn zero_state_zero_rhs() {
        let g = SpatialGrid::new(1.0, 20).unwrap();
        let q = quad();
        let s = PrimalState::zeros(&g);
        let k = HistoryField::zeros(Location::Nodes, g.n, q.n_ages());
        let r = rhs(&s, &k, &PhysicalParams::unit(), &q, &g).unwrap();
        assert!(r.v.iter().chain(&r.vt).chain(&r.phit).chain(&r.w).all(|v| *v == 0.0));
    }

    #[test]
    fn constant_potential_row() {
        let g = SpatialGrid::new(1.0, 20).unwrap();
        let q = quad();
        let p = PhysicalParams::unit().with_memory(0.3);
        let mut s = PrimalState::zeros(&g);
        let c0 = 0.7;
        s.phi.iter_mut().for_each(|v| *v = c0);
        let k = HistoryField::zeros(Location::Nodes, g.n, q.n_ages());
        let r = rhs(&s, &k, &p, &q, &g).unwrap();
        // Away from x = L, where the Robin row turns φ(L) into a slope of v,
        // φ only enters through −kφ, −cφ and φ_x = 0.
        let last = g.n + 1;
        for v in &r.phit[..last] {
            assert!((v + p.k_mag() * c0).abs() < 1e-12);
        }
        for v in &r.etat[..last] {
            assert!((v + p.c * c0).abs() < 1e-12);
        }
        assert!(r.vt[..last].iter().all(|v| v.abs() < 1e-12));
        let slope = -p.gamma / p.alpha * c0;
        assert!((r.vt[last] - p.alpha * 2.0 * slope / g.h / p.rho).abs() < 1e-9);
        assert!(r.thetat.iter().all(|v| v.abs() < 1e-12));
    }

    /// Smooth fields obeying every boundary row, the exact continuous
    /// right-hand side, and the max error over interior nodes.
    fn manufactured_error(n: usize) -> f64 {
        let g = SpatialGrid::new(1.0, n).unwrap();
        let q = quad();
        let p = PhysicalParams::unit().with_memory(0.5);
        let (al, ga) = (p.alpha, p.gamma);
        let bq = 0.75 * ga / al;
        let v = |x: f64| (0.5 * PI * x).sin() + bq * x * x;
        let v_x = |x: f64| 0.5 * PI * (0.5 * PI * x).cos() + 2.0 * bq * x;
        let v_xx = |x: f64| -0.25 * PI * PI * (0.5 * PI * x).sin() + 2.0 * bq;
        let vt = |x: f64| (0.5 * PI * x).sin();
        let vt_x = |x: f64| 0.5 * PI * (0.5 * PI * x).cos();
        let phi = |x: f64| (PI * x).cos();
        let etat = |x: f64| 0.5 * (PI * x).cos();
        let eta = |x: f64| (2.0 * PI * x).cos();
        let theta = |x: f64| (PI * x).sin();
        let thetat = |x: f64| (2.0 * PI * x).sin();
        let w = |x: f64| (PI * x).sin() * x;
        let psi = |s: f64| s * (-s).exp();
        let mem: f64 = (0..q.n_ages()).map(|j| q.w(j) * psi(q.age(j))).sum();

        let mut s = PrimalState::zeros(&g);
        for i in 0..n + 2 {
            let x = g.node(i);
            s.v[i] = v(x);
            s.vt[i] = vt(x);
            s.phi[i] = phi(x);
            s.eta[i] = eta(x);
            s.etat[i] = etat(x);
        }
        for i in 0..n {
            let x = g.node(i + 1);
            s.theta[i] = theta(x);
            s.thetat[i] = thetat(x);
            s.w[i] = w(x);
        }
        let kappa = HistoryField::<f64>::from_fn(Location::Nodes, &g, &q, |x, sa| (PI * x).sin() * psi(sa));
        let r = rhs(&s, &kappa, &p, &q, &g).unwrap();
        let me = p.mu / p.eps3;
        let k = p.k_mag();
        let mut err = 0.0f64;
        for i in 1..=n {
            let x = g.node(i);
            let g_x = -PI * (PI * x).sin() - 0.5 * PI * (PI * x).sin();
            let w_x = (PI * x).sin() + PI * x * (PI * x).cos();
            let w_xx = 2.0 * PI * (PI * x).cos() - PI * PI * x * (PI * x).sin();
            let e_vtt = (al * v_xx(x) + ga * g_x - p.a * w_x) / p.rho;
            let e_phitt = -me * PI * PI * phi(x) - k * phi(x) + ga * p.mu / (p.xi * p.eps3 * p.eps3) * v_x(x);
            let e_etatt = -me * 4.0 * PI * PI * eta(x) - k * eta(x) + ga / p.eps3 * vt_x(x) - p.c * (etat(x) + phi(x));
            let e_thetatt = -me * PI * PI * theta(x) - k * theta(x) - p.b * (thetat(x) - PI * (PI * x).sin());
            let e_wt = (1.0 - p.m) * p.d * w_xx + p.d * p.m * (-PI * PI * (PI * x).sin()) * mem - p.a * vt_x(x);
            err = err
                .max((r.vt[i] - e_vtt).abs())
                .max((r.phit[i] - e_phitt).abs())
                .max((r.etat[i] - e_etatt).abs())
                .max((r.thetat[i - 1] - e_thetatt).abs())
                .max((r.w[i - 1] - e_wt).abs());
        }
        err
    }

    #[test]
    fn manufactured_solution_second_order() {
        let e1 = manufactured_error(40);
        let e2 = manufactured_error(80);
        let order = (e1 / e2).log2();
        assert!(order > 1.8 && order < 2.3, "order {order} ({e1:e}, {e2:e})");
    }

    #[test]
    fn lift_sizes_and_values() {
        let g = SpatialGrid::new(1.0, 10).unwrap();
        let mut s = PrimalState::<f64>::zeros(&g);
        s.theta.iter_mut().for_each(|v| *v = 2.0);
        s.phi.iter_mut().for_each(|v| *v = 1.0);
        let u = s.lift(&g, 4).unwrap();
        assert!(u.check_conforms(&g).is_ok());
        assert!(u.u1.iter().all(|v| (*v - 2.0).abs() < 1e-14));
        assert!(u.u3.iter().all(|v| (*v - 1.0).abs() < 1e-14));
        assert!(s.lift(&SpatialGrid::new(1.0, 11).unwrap(), 4).is_err());
    }
}
