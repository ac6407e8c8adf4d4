//! Closed-form resolvent estimates and their check on discrete data.
//!
//! Each bound reads `LHS ≤ S_i ‖U‖_H ‖F‖_H` for `(iλ − A)U = F`.
//! Left-hand sides:
//! `S₁: ‖w_x‖²`, `S₂: ‖w‖²`, `S₃: ‖u²‖²`, `S₄: ‖u³‖²`, `S₅: ∬σ|κ_x|²`,
//! `S₆: ‖Λ_x‖²`, `S₇: α‖v_x‖²`.

use num_complex::Complex;
use serde::Serialize;

use crate::history::sigma_seminorm;
use crate::kernel::MemoryKernel;
use crate::params::{PhysicalParams, RegimeTag};
use crate::scalar::{to_f64, Real, Scalar};
use crate::state::FirstOrderState;

use super::{GeneratorError, GeneratorMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaConstants {
    pub s1: f64,
    pub s2: f64,
    /// Needs `b > 0`.
    pub s3: Option<f64>,
    /// Needs `c > 0`.
    pub s4: Option<f64>,
    pub s5: f64,
    pub s6: f64,
    /// Needs `b > 0` and `c > 0`.
    pub s7: Option<f64>,
    /// Dirichlet Poincaré constant `(L/π)²` used by `S₂`.
    pub c_p: f64,
    pub regime: RegimeTag,
}

pub fn lemma_constants<T: Real>(
    params: &PhysicalParams<T>,
    kernel: &MemoryKernel<T>,
) -> Result<LemmaConstants, GeneratorError> {
    let f = |x: T| to_f64(x);
    let (m, d, b, c) = (f(params.m), f(params.d), f(params.b), f(params.c));
    let regime = params.classify();
    if !(m > 0.0 && m < 1.0) {
        return Err(GeneratorError::RegimeMismatch(format!(
            "S1, S2, S5 and S6 need 0 < m < 1 (got m = {m})"
        )));
    }
    let d_sigma = kernel
        .d_sigma
        .map(f)
        .filter(|v| *v > 0.0)
        .ok_or_else(|| GeneratorError::RegimeMismatch("kernel has no positive Dafermos rate".into()))?;
    let g0 = f(kernel.g0);
    let (xi, eps3, gamma, alpha) = (f(params.xi), f(params.eps3), f(params.gamma), f(params.alpha));
    let c_p = (f(params.length) / std::f64::consts::PI).powi(2);
    let s1 = 1.0 / ((1.0 - m) * d);
    let s4 = (c > 0.0).then(|| 1.0 / (c * eps3));
    let s7 = match s4 {
        Some(s4) if b > 0.0 => Some(alpha * (b - c).powi(2) * eps3 * eps3 / (b * b * gamma * gamma) * s4),
        _ => None,
    };
    Ok(LemmaConstants {
        s1,
        s2: c_p * s1,
        s3: (b > 0.0).then(|| 1.0 / (b * xi * eps3)),
        s4,
        s5: 2.0 / (m * d * d_sigma),
        s6: 2.0 * (1.0 - m) / d + 4.0 * g0 / (m * d * d_sigma),
        s7,
        c_p,
        regime,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; zero when both vanish.
    pub margin: f64,
    pub holds: bool,
}

/// Evaluates every bound defined for `constants` on a resolvent pair `(U, F)`.
pub fn verify_lemma_bounds<T: Real>(
    gen: &GeneratorMatrix<T>,
    u: &FirstOrderState<Complex<T>>,
    f: &FirstOrderState<Complex<T>>,
    constants: &LemmaConstants,
    tol: f64,
) -> Result<Vec<BoundCheck>, GeneratorError> {
    let g = &gen.grid;
    let p = &gen.params;
    let n = g.n;
    let un = to_f64(gen.norm(u)?);
    let fnorm = to_f64(gen.norm(f)?);
    let product = un * fnorm;
    let zero = Complex::new(T::zero(), T::zero());

    let grad_sq = |cells: &[Complex<T>]| {
        let mut out = vec![zero; n + 2];
        g.cell_to_node(zero, cells, zero, &mut out);
        to_f64(g.dot_nodes_full(&out, &out).re())
    };
    let l2 = |a: &[Complex<T>]| to_f64(g.dot_uniform(a, a).re());

    let mut lambda_field: Vec<Complex<T>> = u.w.iter().map(|w| w.scale(T::one() - p.m)).collect();
    let mut history = 0.0;
    if let Some(q) = &gen.quad {
        for j in 0..q.n_ages() {
            let wj = p.m * q.w(j);
            for (l, k) in lambda_field.iter_mut().zip(u.kappa.column(j)) {
                *l += k.scale(wj);
            }
        }
        history = to_f64(sigma_seminorm(&u.kappa, q, g));
    }
    let mut dv = vec![zero; n + 1];
    g.node_to_cell(zero, &u.v, u.v[n], &mut dv);

    let entries: [(&'static str, Option<f64>, f64); 7] = [
        ("S1", Some(constants.s1), grad_sq(&u.w)),
        ("S2", Some(constants.s2), l2(&u.w)),
        ("S3", constants.s3, l2(&u.u2)),
        ("S4", constants.s4, l2(&u.u3)),
        ("S5", Some(constants.s5), history),
        ("S6", Some(constants.s6), grad_sq(&lambda_field)),
        ("S7", constants.s7, to_f64(p.alpha) * l2(&dv)),
    ];
    Ok(entries
        .into_iter()
        .filter_map(|(name, c, lhs)| {
            c.map(|c| {
                let rhs = c * product;
                let margin = if lhs == 0.0 { 0.0 } else if rhs > 0.0 { lhs / rhs } else { f64::INFINITY };
                BoundCheck { name, lhs, rhs, margin, holds: margin <= 1.0 + tol }
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::super::testutil::*;
    use super::super::resolvent_solve;
    use super::*;
    use num_complex::Complex64;

    fn kernel() -> MemoryKernel<f64> {
        MemoryKernel::exponential(1.0, 2.0).unwrap()
    }

    #[test]
    fn closed_forms() {
        let p = PhysicalParams::<f64>::unit().with_memory(0.5);
        let c = lemma_constants(&p, &kernel()).unwrap();
        assert_eq!(c.s1, 2.0);
        assert_eq!(c.s3, Some(1.0));
        assert_eq!(c.s7, Some(0.0));
        assert!((c.s2 - 2.0 / std::f64::consts::PI.powi(2)).abs() < 1e-15);
        assert_eq!(c.s5, 2.0);
        assert_eq!(c.s6, 1.0 + 4.0);
        let c = lemma_constants(&p.with_damping(2.0, 1.0), &kernel()).unwrap();
        assert_eq!(c.s7, Some(0.25));
    }

    #[test]
    fn regime_applicability() {
        let k = kernel();
        assert!(lemma_constants(&PhysicalParams::<f64>::unit().with_memory(1.0), &k).is_err());
        assert!(lemma_constants(&PhysicalParams::<f64>::unit().with_memory(0.0), &k).is_err());
        let c = lemma_constants(&PhysicalParams::<f64>::unit().with_damping(0.0, 1.0), &k).unwrap();
        assert!(c.s3.is_none() && c.s4.is_some() && c.s7.is_none());
        let c = lemma_constants(&PhysicalParams::<f64>::unit().with_damping(1.0, 0.0), &k).unwrap();
        assert!(c.s3.is_some() && c.s4.is_none() && c.s7.is_none());
    }

    #[test]
    fn zero_load_is_trivially_bounded() {
        let gen = generator(10, 6, PhysicalParams::unit());
        let f = gen.zero_state::<Complex64>();
        let u = resolvent_solve(&gen, 3.0, &f).unwrap();
        let c = lemma_constants(&gen.params, &kernel()).unwrap();
        let report = verify_lemma_bounds(&gen, &u, &f, &c, 1e-2).unwrap();
        assert_eq!(report.len(), 7);
        assert!(report.iter().all(|b| b.holds && b.margin == 0.0));
    }

    #[test]
    fn dissipation_bounds_hold_on_random_loads() {
        let gen = generator(40, 24, PhysicalParams::unit());
        let c = lemma_constants(&gen.params, &kernel()).unwrap();
        for seed in 0..5 {
            let f = random_state(&gen, seed).to_complex();
            let u = resolvent_solve(&gen, 10.0, &f).unwrap();
            let report = verify_lemma_bounds(&gen, &u, &f, &c, 1e-2).unwrap();
            for b in report.iter().filter(|b| ["S1", "S3", "S4"].contains(&b.name)) {
                assert!(b.margin <= 1.0 + 1e-10, "{b:?}");
            }
        }
    }
}
