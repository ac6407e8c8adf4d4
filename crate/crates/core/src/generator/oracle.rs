//! Closed-form solution of the stationary problem for smooth loads.
//!
//! With the compatibility condition closing the electric block, `−AU = F`
//! reduces to explicit formulas:
//!
//! ```text
//! z  = −f¹
//! Λ  = ∫ G_D(x,y) (f⁶ + a f¹_x)(y)/d dy                 (Dirichlet Green's function)
//! w  = (d Λ − md Σ_j W_j K_j) / m̃,   K_j = ∫₀^{s_j} f⁷
//! κ_j = s_j w + K_j
//! P  = ρ ∫_x^L f²                                          (the stress)
//! u³'' − r² u³ = f³_x − γ/(ε₃ξα) (P + a w),  u³' = f³ at both ends,  r² = α₁/(ξα)
//! u² = u³_x − f³,   u¹ = (ξε₃/μ)(f⁴ − b u²)
//! v  = ∫₀^x (P − γ u³ + a w)/α
//! ```
//!
//! Every integral in `x` is evaluated by Gauss-Legendre quadrature split at
//! the kink of the Green's function, so the result is exact to round-off in
//! space. The age integrals reuse the solver's age grid, which isolates the
//! spatial discretization error.

use std::sync::Arc;

use crate::quadrature::GaussRule;
use crate::state::FirstOrderState;

use super::{GeneratorError, GeneratorMatrix};

type F1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type F2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// The four `(b, c)` cases of the stationary problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DampingCase {
    /// `b = c = 0`.
    Undamped = 1,
    /// `b = 0`, `c > 0`.
    OnlyZ = 2,
    /// `b > 0`, `c = 0`.
    OnlyX = 3,
    /// `b > 0`, `c > 0`.
    BothDamped = 4,
}

impl DampingCase {
    pub fn from_index(i: u8) -> Option<Self> {
        match i {
            1 => Some(Self::Undamped),
            2 => Some(Self::OnlyZ),
            3 => Some(Self::OnlyX),
            4 => Some(Self::BothDamped),
            _ => None,
        }
    }

    pub fn index(self) -> u8 {
        self as u8
    }

    /// Representative `(b, c)` for the case.
    pub fn damping(self) -> (f64, f64) {
        match self {
            Self::Undamped => (0.0, 0.0),
            Self::OnlyZ => (0.0, 1.0),
            Self::OnlyX => (1.0, 0.0),
            Self::BothDamped => (1.0, 1.0),
        }
    }

    fn accepts(self, b: f64, c: f64) -> bool {
        let (eb, ec) = self.damping();
        (b > 0.0) == (eb > 0.0) && (c > 0.0) == (ec > 0.0)
    }
}

/// Load `F = (f¹, …, f⁷)` as closed-form functions, with the two
/// derivatives the formulas need.
#[derive(Clone)]
pub struct SmoothLoad {
    pub f1: F1,
    pub f1_x: F1,
    pub f2: F1,
    pub f3: F1,
    pub f3_x: F1,
    pub f4: F1,
    pub f5: F1,
    pub f6: F1,
    /// `f⁷(x, s)`.
    pub f7: F2,
}

impl std::fmt::Debug for SmoothLoad {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("SmoothLoad")
    }
}

impl SmoothLoad {
    pub fn zero() -> Self {
        let z: F1 = Arc::new(|_| 0.0);
        Self {
            f1: z.clone(),
            f1_x: z.clone(),
            f2: z.clone(),
            f3: z.clone(),
            f3_x: z.clone(),
            f4: z.clone(),
            f5: z.clone(),
            f6: z,
            f7: Arc::new(|_, _| 0.0),
        }
    }

    /// A smooth load compatible with the boundary rows: `f¹(0) = 0`,
    /// `f⁴` and `f⁷` vanish at both ends, and `f³` has nonzero end values
    /// so the Neumann data of `u³` is exercised.
    pub fn manufactured(length: f64) -> Self {
        use std::f64::consts::PI;
        let l = length;
        Self {
            f1: Arc::new(move |x| (0.5 * PI * x / l).sin()),
            f1_x: Arc::new(move |x| 0.5 * PI / l * (0.5 * PI * x / l).cos()),
            f2: Arc::new(move |x| 1.0 + x / l),
            f3: Arc::new(move |x| 0.5 * (2.0 * PI * x / l).cos() + x / l),
            f3_x: Arc::new(move |x| -PI / l * (2.0 * PI * x / l).sin() + 1.0 / l),
            f4: Arc::new(move |x| (PI * x / l).sin() * (1.0 + x / l)),
            f5: Arc::new(move |x| x / l),
            f6: Arc::new(move |x| (x / l).exp()),
            f7: Arc::new(move |x, s| (PI * x / l).sin() * (-s).exp()),
        }
    }

    /// Samples the load at the grid locations of each component.
    pub fn sample(&self, gen: &GeneratorMatrix<f64>) -> FirstOrderState<f64> {
        let g = &gen.grid;
        let n = g.n;
        let mut f = gen.zero_state::<f64>();
        for i in 0..=n {
            let x = g.node(i + 1);
            f.v[i] = (self.f1)(x);
            f.z[i] = (self.f2)(x);
        }
        for i in 0..n {
            let x = g.node(i + 1);
            f.u1[i] = (self.f3)(x);
            f.u2[i] = (self.f4)(x);
        }
        for k in 0..=n {
            let x = g.cell(k);
            f.u3[k] = (self.f5)(x);
            f.w[k] = (self.f6)(x);
        }
        if let Some(q) = &gen.quad {
            for j in 0..q.n_ages() {
                let s = q.age(j);
                for (k, v) in f.kappa.column_mut(j).iter_mut().enumerate() {
                    *v = (self.f7)(g.cell(k), s);
                }
            }
        }
        f
    }
}

struct Solver<'a> {
    load: &'a SmoothLoad,
    gen: &'a GeneratorMatrix<f64>,
    rule: GaussRule<f64>,
    length: f64,
    r: f64,
    m_tilde: f64,
}

impl Solver<'_> {
    fn integrate(&self, a: f64, b: f64, f: impl FnMut(f64) -> f64) -> f64 {
        if b > a {
            self.rule.integrate(a, b, f)
        } else {
            0.0
        }
    }

    fn stress(&self, x: f64) -> f64 {
        self.gen.params.rho * self.integrate(x, self.length, |t| (self.load.f2)(t))
    }

    fn lambda(&self, x: f64) -> f64 {
        let p = &self.gen.params;
        let l = self.length;
        let q = |y: f64| ((self.load.f6)(y) + p.a * (self.load.f1_x)(y)) / p.d;
        let left = self.integrate(0.0, x, |y| y * (l - x) / l * q(y));
        let right = self.integrate(x, l, |y| x * (l - y) / l * q(y));
        left + right
    }

    /// `(Σ_j W_j K_j(x), K_j(x))` on the age grid.
    fn history_load(&self, x: f64) -> (f64, Vec<f64>) {
        let Some(q) = &self.gen.quad else { return (0.0, Vec::new()) };
        let mut acc = 0.0;
        let mut sum = 0.0;
        let mut ks = Vec::with_capacity(q.n_ages());
        for j in 0..q.n_ages() {
            acc += q.spacing(j) * (self.load.f7)(x, q.age(j));
            ks.push(acc);
            sum += q.w(j) * acc;
        }
        (sum, ks)
    }

    fn w(&self, x: f64) -> f64 {
        let p = &self.gen.params;
        let (hist, _) = self.history_load(x);
        (p.d * self.lambda(x) - p.m * p.d * hist) / self.m_tilde
    }

    fn source(&self, t: f64) -> f64 {
        let p = &self.gen.params;
        (self.load.f3_x)(t) - p.gamma / (p.eps3 * p.xi * p.alpha) * (self.stress(t) + p.a * self.w(t))
    }

    /// `(u³(x), u³_x(x))` from the Neumann Green's function of `∂² − r²`.
    fn u3(&self, x: f64) -> (f64, f64) {
        let (r, l) = (self.r, self.length);
        let wr = -r * (r * l).sinh();
        let y1 = |t: f64| (r * t).cosh();
        let y2 = |t: f64| (r * (l - t)).cosh();
        let left = |t: f64| y1(t) * self.source(t);
        let right = |t: f64| y2(t) * self.source(t);
        let il = self.integrate(0.0, x, left);
        let ir = self.integrate(x, l, right);
        let (a0, al) = ((self.load.f3)(0.0), (self.load.f3)(l));
        let val = (y2(x) * il + y1(x) * ir - y1(x) * al + y2(x) * a0) / wr;
        let dy1 = r * (r * x).sinh();
        let dy2 = -r * (r * (l - x)).sinh();
        let der = (dy2 * il + dy1 * ir - dy1 * al + dy2 * a0) / wr;
        (val, der)
    }

    fn strain_rate(&self, t: f64) -> f64 {
        let p = &self.gen.params;
        (self.stress(t) - p.gamma * self.u3(t).0 + p.a * self.w(t)) / p.alpha
    }
}

/// Closed-form stationary solution sampled on the generator's grid.
pub fn oracle_case(
    case: DampingCase,
    load: &SmoothLoad,
    gen: &GeneratorMatrix<f64>,
) -> Result<FirstOrderState<f64>, GeneratorError> {
    let p = &gen.params;
    if !case.accepts(p.b, p.c) {
        return Err(GeneratorError::CaseMismatch { case: case.index(), b: p.b, c: p.c });
    }
    let g = &gen.grid;
    let n = g.n;
    let solver = Solver {
        load,
        gen,
        rule: GaussRule::new(24),
        length: p.length,
        r: (p.alpha1() / (p.xi * p.alpha)).sqrt(),
        m_tilde: super::stationary::effective_diffusivity(gen),
    };
    let mut u = gen.zero_state::<f64>();
    let mut v = 0.0;
    let mut prev = 0.0;
    for i in 0..=n {
        let x = g.node(i + 1);
        v += solver.integrate(prev, x, |t| solver.strain_rate(t));
        prev = x;
        u.v[i] = v;
        u.z[i] = -(load.f1)(x);
    }
    for i in 0..n {
        let x = g.node(i + 1);
        let u2 = solver.u3(x).1 - (load.f3)(x);
        u.u2[i] = u2;
        u.u1[i] = p.xi * p.eps3 / p.mu * ((load.f4)(x) - p.b * u2);
    }
    for k in 0..=n {
        let x = g.cell(k);
        u.u3[k] = solver.u3(x).0;
        let w = solver.w(x);
        u.w[k] = w;
        if let Some(q) = &gen.quad {
            let (_, ks) = solver.history_load(x);
            for j in 0..q.n_ages() {
                u.kappa.column_mut(j)[k] = q.age(j) * w + ks[j];
            }
        }
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::super::testutil::*;
    use super::super::stationary_solve;
    use super::*;
    use crate::params::PhysicalParams;

    #[test]
    fn zero_load_any_case() {
        for case in [DampingCase::Undamped, DampingCase::OnlyZ, DampingCase::OnlyX, DampingCase::BothDamped] {
            let (b, c) = case.damping();
            let gen = generator(10, 6, PhysicalParams::unit().with_damping(b, c));
            let u = oracle_case(case, &SmoothLoad::zero(), &gen).unwrap();
            assert_eq!(u.max_abs(), 0.0);
        }
    }

    #[test]
    fn case_mismatch_is_reported() {
        let gen = generator(10, 6, PhysicalParams::unit());
        assert!(matches!(
            oracle_case(DampingCase::Undamped, &SmoothLoad::zero(), &gen),
            Err(GeneratorError::CaseMismatch { case: 1, .. })
        ));
        assert_eq!(DampingCase::from_index(3), Some(DampingCase::OnlyX));
        assert_eq!(DampingCase::from_index(5), None);
    }

    #[test]
    fn only_z_load_on_f4_gives_u1_directly() {
        let gen = generator(20, 6, PhysicalParams::unit().with_damping(0.0, 1.0));
        let mut load = SmoothLoad::zero();
        let psi = |x: f64| (std::f64::consts::PI * x).sin() * x;
        load.f4 = Arc::new(psi);
        let u = oracle_case(DampingCase::OnlyZ, &load, &gen).unwrap();
        for i in 0..gen.grid.n {
            assert!((u.u1[i] - psi(gen.grid.node(i + 1))).abs() < 1e-14);
        }
    }

    #[test]
    fn oracle_satisfies_continuous_relations() {
        // u³ from the Green's function solves the constraint pointwise:
        // u³ = ξ u²_x + (γ/ε₃) v_x, checked by finite differences on a fine grid.
        let gen = generator(400, 8, PhysicalParams::unit().with_damping(1.0, 1.0));
        let load = SmoothLoad::manufactured(1.0);
        let u = oracle_case(DampingCase::BothDamped, &load, &gen).unwrap();
        let h = gen.grid.h;
        let k = 200;
        let u2x = (u.u2[k] - u.u2[k - 1]) / h;
        let vx = (u.v[k] - u.v[k - 1]) / h;
        assert!((u.u3[k] - (u2x + vx)).abs() < 1e-4);
    }

    #[test]
    fn discrete_solve_approaches_oracle() {
        let p = PhysicalParams::unit().with_damping(1.0, 1.0);
        let load = SmoothLoad::manufactured(1.0);
        let mut errs = Vec::new();
        for n in [25, 50] {
            let gen = generator(n, 12, p);
            let f = load.sample(&gen);
            let s = stationary_solve(&gen, &f).unwrap();
            let o = oracle_case(DampingCase::BothDamped, &load, &gen).unwrap();
            let mut d = s.state.clone();
            d.axpy(-1.0, &o);
            errs.push(d.max_abs());
        }
        assert!(errs[1] < errs[0] / 3.0, "{errs:?}");
    }
}
