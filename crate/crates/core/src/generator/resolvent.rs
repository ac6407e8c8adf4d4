//! Resolvent solves `(iλ − A_h) U = F` and the energy-norm `‖(iλ − A_h)⁻¹‖`.
//!
//! The norm is the largest singular value of `R = (iλ − A_h)⁻¹` in the
//! `H_h` geometry, found by power iteration on `R*R` with the adjoint
//! `R* = M⁻¹ (−iλ − A_hᵀ)⁻¹ M`, `M` the Gram matrix of `⟨·,·⟩_H`. Each step
//! costs two banded solves.

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::linalg::solve_tridiagonal;
use crate::scalar::{lit, to_f64, Real};
use crate::state::FirstOrderState;

use super::{stationary_solve, GeneratorError, GeneratorMatrix, ShiftedSolver};

type C<T> = Complex<T>;

/// `(iλ − A_h)⁻¹ F`; `λ = 0` is the stationary solve.
pub fn resolvent_solve<T: Real>(
    gen: &GeneratorMatrix<T>,
    lambda: T,
    f: &FirstOrderState<C<T>>,
) -> Result<FirstOrderState<C<T>>, GeneratorError> {
    if lambda == T::zero() {
        return Ok(stationary_solve(gen, f)?.state);
    }
    ShiftedSolver::new(gen, C::new(T::zero(), lambda), false)?.solve(f)
}

#[derive(Debug, Clone, Copy)]
pub struct ResolventOptions {
    pub max_iter: usize,
    pub rel_tol: f64,
    pub seed: u64,
}

impl Default for ResolventOptions {
    fn default() -> Self {
        Self { max_iter: 2000, rel_tol: 1e-9, seed: 0x5eed }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ResolventEstimate {
    pub lambda: f64,
    pub norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Applies the Gram matrix `M` of the energy inner product.
pub(crate) fn gram_apply<T: Real>(gen: &GeneratorMatrix<T>, x: &FirstOrderState<C<T>>) -> FirstOrderState<C<T>> {
    let p = &gen.params;
    let g = &gen.grid;
    let n = g.n;
    let h = g.h;
    let zero = C::zero();
    let mut out = x.clone();
    // v: α h DᵀD
    let mut dv = vec![zero; n + 1];
    g.node_to_cell(zero, &x.v, x.v[n], &mut dv);
    let inv = T::one() / h;
    for i in 0..=n {
        let next = if i < n { dv[i + 1] } else { zero };
        out.v[i] = (dv[i] - next) * (p.alpha * h * inv);
    }
    let last = n;
    for (i, z) in out.z.iter_mut().enumerate() {
        let w = if i == last { p.rho * h * lit(0.5) } else { p.rho * h };
        *z = *z * w;
    }
    out.u1.iter_mut().for_each(|v| *v = *v * (p.mu * h));
    out.u2.iter_mut().for_each(|v| *v = *v * (p.xi * p.eps3 * h));
    out.u3.iter_mut().for_each(|v| *v = *v * (p.eps3 * h));
    out.w.iter_mut().for_each(|v| *v = *v * h);
    if let Some(q) = &gen.quad {
        let mut scratch = vec![zero; n + 2];
        let mut lap = vec![zero; n + 1];
        for j in 0..q.n_ages() {
            let c = -p.m * p.d * q.w(j) * h;
            g.cell_laplacian(x.kappa.column(j), &mut scratch, &mut lap);
            for (o, l) in out.kappa.column_mut(j).iter_mut().zip(&lap) {
                *o = *l * c;
            }
        }
    }
    out
}

/// Applies `M⁻¹`.
pub(crate) fn gram_solve<T: Real>(gen: &GeneratorMatrix<T>, y: &FirstOrderState<C<T>>) -> FirstOrderState<C<T>> {
    let p = &gen.params;
    let g = &gen.grid;
    let n = g.n;
    let h = g.h;
    let mut out = y.clone();
    // αh DᵀD v = y: Dᵀ t = y/(αh) backwards, then D v = t forwards.
    let mut t = vec![C::zero(); n + 1];
    let s = T::one() / (p.alpha * h);
    for i in (0..=n).rev() {
        let next = if i < n { t[i + 1] } else { C::zero() };
        t[i] = y.v[i] * (s * h) + next;
    }
    let mut prev = C::zero();
    for i in 0..=n {
        out.v[i] = prev + t[i] * h;
        prev = out.v[i];
    }
    for (i, z) in out.z.iter_mut().enumerate() {
        let w = if i == n { p.rho * h * lit(0.5) } else { p.rho * h };
        *z = *z / w;
    }
    out.u1.iter_mut().for_each(|v| *v = *v / (p.mu * h));
    out.u2.iter_mut().for_each(|v| *v = *v / (p.xi * p.eps3 * h));
    out.u3.iter_mut().for_each(|v| *v = *v / (p.eps3 * h));
    out.w.iter_mut().for_each(|v| *v = *v / h);
    if let Some(q) = &gen.quad {
        let inv_h2 = T::one() / (h * h);
        let three: T = lit(3.0);
        let two: T = lit(2.0);
        for j in 0..q.n_ages() {
            let c = p.m * p.d * q.w(j) * h;
            let mut diag = vec![C::new(two * inv_h2 * c, T::zero()); n + 1];
            diag[0] = C::new(three * inv_h2 * c, T::zero());
            diag[n] = diag[0];
            let off = vec![C::new(-inv_h2 * c, T::zero()); n + 1];
            let mut rhs = y.kappa.column(j).to_vec();
            solve_tridiagonal(&off, &diag, &off, &mut rhs);
            out.kappa.column_mut(j).copy_from_slice(&rhs);
        }
    }
    out
}

fn h_norm<T: Real>(gen: &GeneratorMatrix<T>, x: &FirstOrderState<C<T>>) -> Result<T, GeneratorError> {
    gen.norm(x)
}

/// Power iteration for `‖(iλ − A_h)⁻¹‖_H`.
pub fn resolvent_norm<T: Real>(
    gen: &GeneratorMatrix<T>,
    lambda: T,
    opts: &ResolventOptions,
) -> Result<ResolventEstimate, GeneratorError> {
    let forward = ShiftedSolver::new(gen, C::new(T::zero(), lambda), false)?;
    let adjoint = ShiftedSolver::new(gen, C::new(T::zero(), -lambda), true)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let flat: Vec<C<T>> = (0..gen.dim())
        .map(|_| C::new(lit(rng.random_range(-1.0..1.0)), lit(rng.random_range(-1.0..1.0))))
        .collect();
    let mut x = FirstOrderState::from_flat(gen.layout, &flat)?;
    let nx = h_norm(gen, &x)?;
    x.scale(C::new(T::one() / nx, T::zero()));
    let mut est = T::zero();
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=opts.max_iter {
        iterations = it;
        let y = forward.solve(&x)?;
        let ny = h_norm(gen, &y)?;
        let my = gram_apply(gen, &y);
        let mut next = gram_solve(gen, &adjoint.solve(&my)?);
        let nn = h_norm(gen, &next)?;
        if !(nn > T::zero()) || !ny.is_finite() {
            break;
        }
        next.scale(C::new(T::one() / nn, T::zero()));
        x = next;
        let change = (ny - est).abs() / ny;
        est = ny;
        if to_f64(change) < opts.rel_tol {
            converged = true;
            break;
        }
    }
    Ok(ResolventEstimate { lambda: to_f64(lambda), norm: to_f64(est), iterations, converged })
}
