//! Dense reference computations for small grids.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::state::FirstOrderState;

use super::resolvent::gram_apply;
use super::{GeneratorError, GeneratorMatrix};

pub fn dense_generator(gen: &GeneratorMatrix<f64>) -> DMatrix<f64> {
    let n = gen.dim();
    let mut a = DMatrix::zeros(n, n);
    for (r, c, v) in gen.matrix().triplets() {
        a[(r, c)] = v;
    }
    a
}

/// Gram matrix `M` with `⟨x, y⟩_H = y* M x`.
pub fn gram_matrix(gen: &GeneratorMatrix<f64>) -> DMatrix<f64> {
    let n = gen.dim();
    let mut m = DMatrix::zeros(n, n);
    let mut e = vec![Complex64::new(0.0, 0.0); n];
    for c in 0..n {
        e[c] = Complex64::new(1.0, 0.0);
        let x = FirstOrderState::from_flat(gen.layout, &e).expect("layout");
        for (r, v) in gram_apply(gen, &x).flatten().iter().enumerate() {
            m[(r, c)] = v.re;
        }
        e[c] = Complex64::new(0.0, 0.0);
    }
    m
}

/// `‖(iλ − A_h)⁻¹‖_H = 1/σ_min(Lᵀ (iλ − A_h) L⁻ᵀ)` with `M = L Lᵀ`.
pub fn dense_resolvent_norm(gen: &GeneratorMatrix<f64>, lambda: f64) -> Result<f64, GeneratorError> {
    let n = gen.dim();
    let chol = gram_matrix(gen)
        .cholesky()
        .ok_or_else(|| GeneratorError::RegimeMismatch("energy Gram matrix is not positive definite".into()))?;
    let l = chol.l();
    let l_inv_t = l.clone().try_inverse().expect("triangular factor is invertible").transpose();
    let a = dense_generator(gen);
    let shifted = DMatrix::<Complex64>::from_fn(n, n, |r, c| {
        let d = if r == c { Complex64::new(0.0, lambda) } else { Complex64::new(0.0, 0.0) };
        d - a[(r, c)]
    });
    let lt = l.transpose().map(|v| Complex64::new(v, 0.0));
    let lit = l_inv_t.map(|v| Complex64::new(v, 0.0));
    let b = lt * shifted * lit;
    let sv = b.singular_values();
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if smin <= 0.0 {
        return Err(GeneratorError::SingularAt { lambda });
    }
    Ok(1.0 / smin)
}

/// `exp(t A_h) U₀` through a dense matrix exponential.
pub fn expm_propagate(
    gen: &GeneratorMatrix<f64>,
    u0: &FirstOrderState<f64>,
    t: f64,
) -> Result<FirstOrderState<f64>, GeneratorError> {
    u0.check_conforms(&gen.grid)?;
    let e = (dense_generator(gen) * t).exp();
    let x = e * DVector::from_vec(u0.flatten());
    Ok(FirstOrderState::from_flat(gen.layout, x.as_slice())?)
}
