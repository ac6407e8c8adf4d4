//! Memory kernels and the truncated quadrature of the age axis.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::quadrature::GaussRule;
use crate::scalar::{from_usize, lit, to_f64, Real};

/// Per-cell stretch of the age grid at the reference resolution of 64 nodes.
pub const DEFAULT_GRADING: f64 = 1.15;
const REFERENCE_NODES: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("kernel parameter `{0}` must be strictly positive")]
    NonPositive(&'static str),
    #[error("invalid kernel samples: {0}")]
    BadSamples(String),
    #[error("quadrature needs at least two nodes and S_max > 0")]
    BadQuadrature,
}

type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

#[derive(Clone)]
enum Shape<T> {
    Exponential { delta: T },
    /// Piecewise-linear interpolant of samples; zero beyond the last one.
    Sampled { s: Vec<T>, sigma: Vec<T>, slope: Vec<T> },
    Closure { sigma: ScalarFn<T>, dsigma: Option<ScalarFn<T>> },
}

/// A kernel `σ` with primitive `g(s) = ∫_s^∞ σ`.
#[derive(Clone)]
pub struct MemoryKernel<T> {
    shape: Shape<T>,
    pub g0: T,
    pub sigma0: T,
    /// Declared Dafermos rate, if known in closed form.
    pub d_sigma: Option<T>,
    pub label: String,
}

impl<T: Real> fmt::Debug for MemoryKernel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MemoryKernel")
            .field("label", &self.label)
            .field("g0", &self.g0)
            .field("sigma0", &self.sigma0)
            .field("d_sigma", &self.d_sigma)
            .finish()
    }
}

impl<T: Real> MemoryKernel<T> {
    /// `σ(s) = g0·δ·e^{−δs}`.
    pub fn exponential(g0: T, delta: T) -> Result<Self, KernelError> {
        if !(g0 > T::zero()) {
            return Err(KernelError::NonPositive("g0"));
        }
        if !(delta > T::zero()) {
            return Err(KernelError::NonPositive("delta"));
        }
        Ok(Self {
            shape: Shape::Exponential { delta },
            g0,
            sigma0: g0 * delta,
            d_sigma: Some(delta),
            label: format!("exponential(g0={g0}, delta={delta})"),
        })
    }

    /// `σ(s) = 1/(1+s)²`: unit mass, algebraic tail, no Dafermos rate.
    pub fn algebraic() -> Self {
        let one = T::one();
        Self::from_fn(
            "algebraic 1/(1+s)^2",
            move |s: T| one / ((one + s) * (one + s)),
            Some(move |s: T| -lit::<T>(2.0) / ((one + s) * (one + s) * (one + s))),
            one,
        )
    }

    /// Kernel from a closure. `g0` is the declared total mass; the tail is
    /// `g(s) = g0 − ∫₀^s σ`. Without `dsigma`, `σ′` is a centered difference.
    pub fn from_fn<F, D>(label: &str, sigma: F, dsigma: Option<D>, g0: T) -> Self
    where
        F: Fn(T) -> T + Send + Sync + 'static,
        D: Fn(T) -> T + Send + Sync + 'static,
    {
        let sigma0 = sigma(T::zero());
        Self {
            shape: Shape::Closure {
                sigma: Arc::new(sigma),
                dsigma: dsigma.map(|d| Arc::new(d) as ScalarFn<T>),
            },
            g0,
            sigma0,
            d_sigma: None,
            label: label.to_string(),
        }
    }

    /// Kernel from `(s, σ(s))` samples; `s` strictly increasing from 0.
    pub fn sampled(s: Vec<T>, sigma: Vec<T>) -> Result<Self, KernelError> {
        if s.len() < 2 || s.len() != sigma.len() {
            return Err(KernelError::BadSamples("need at least two (s, sigma) pairs".into()));
        }
        if s[0] != T::zero() {
            return Err(KernelError::BadSamples("first sample must be at s = 0".into()));
        }
        if s.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(KernelError::BadSamples("ages must be strictly increasing".into()));
        }
        if sigma.iter().any(|v| !v.is_finite()) {
            return Err(KernelError::BadSamples("non-finite sigma value".into()));
        }
        let n = s.len();
        // derivative of the quadratic through three neighbouring samples
        let slope = (0..n)
            .map(|i| {
                if n == 2 {
                    return (sigma[1] - sigma[0]) / (s[1] - s[0]);
                }
                let c = i.clamp(1, n - 2);
                let (x0, x1, x2) = (s[c - 1], s[c], s[c + 1]);
                let (y0, y1, y2) = (sigma[c - 1], sigma[c], sigma[c + 1]);
                let x = s[i];
                y0 * ((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2))
                    + y1 * ((x - x0) + (x - x2)) / ((x1 - x0) * (x1 - x2))
                    + y2 * ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1))
            })
            .collect();
        let half: T = lit(0.5);
        let g0 = s
            .windows(2)
            .zip(sigma.windows(2))
            .map(|(a, b)| (a[1] - a[0]) * (b[0] + b[1]) * half)
            .sum();
        Ok(Self {
            sigma0: sigma[0],
            shape: Shape::Sampled { s, sigma, slope },
            g0,
            d_sigma: None,
            label: "sampled".into(),
        })
    }

    /// Parses a two-column text table of `(s, σ)`; `#` starts a comment,
    /// columns may be separated by whitespace or commas.
    pub fn from_samples_text(text: &str) -> Result<Self, KernelError> {
        let mut s = Vec::new();
        let mut sig = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> =
                line.split(|c: char| c == ',' || c.is_whitespace()).filter(|c| !c.is_empty()).collect();
            if cols.len() != 2 {
                return Err(KernelError::BadSamples(format!("line {}: expected two columns", lineno + 1)));
            }
            let parse = |c: &str| {
                c.parse::<f64>()
                    .map_err(|e| KernelError::BadSamples(format!("line {}: {e}", lineno + 1)))
            };
            s.push(lit(parse(cols[0])?));
            sig.push(lit(parse(cols[1])?));
        }
        Self::sampled(s, sig)
    }

    pub fn sigma(&self, s: T) -> T {
        match &self.shape {
            Shape::Exponential { delta } => self.g0 * *delta * (-*delta * s).exp(),
            Shape::Sampled { s: ss, sigma, .. } => interp(ss, sigma, s),
            Shape::Closure { sigma, .. } => sigma(s),
        }
    }

    /// `σ′(s)`: analytic when available, finite differences otherwise.
    pub fn dsigma(&self, s: T) -> T {
        match &self.shape {
            Shape::Exponential { delta } => -*delta * self.sigma(s),
            Shape::Sampled { s: ss, slope, .. } => {
                if s > *ss.last().unwrap() {
                    T::zero()
                } else {
                    interp(ss, slope, s)
                }
            }
            Shape::Closure { dsigma: Some(d), .. } => d(s),
            Shape::Closure { sigma, dsigma: None } => {
                let eps = lit::<T>(1e-5) * (T::one() + s);
                let lo = (s - eps).max(T::zero());
                (sigma(s + eps) - sigma(lo)) / (s + eps - lo)
            }
        }
    }

    /// `g(s) = ∫_s^∞ σ`.
    pub fn tail(&self, s: T) -> T {
        match &self.shape {
            Shape::Exponential { delta } => self.g0 * (-*delta * s).exp(),
            Shape::Sampled { s: ss, sigma, .. } => {
                let half: T = lit(0.5);
                let mut acc = T::zero();
                for k in 0..ss.len() - 1 {
                    let (a, b) = (ss[k], ss[k + 1]);
                    if b <= s {
                        continue;
                    }
                    let lo = a.max(s);
                    acc += (b - lo) * (interp(ss, sigma, lo) + sigma[k + 1]) * half;
                }
                acc
            }
            Shape::Closure { .. } => {
                if s <= T::zero() {
                    return self.g0;
                }
                let rule = GaussRule::new(8);
                let panels = (to_f64(s) * 8.0).ceil().clamp(1.0, 4096.0) as usize;
                self.g0 - rule.integrate_composite(T::zero(), s, panels, |r| self.sigma(r))
            }
        }
    }
}

fn interp<T: Real>(xs: &[T], ys: &[T], x: T) -> T {
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x > xs[n - 1] {
        return T::zero();
    }
    let k = xs.partition_point(|&v| v <= x).clamp(1, n - 1);
    let t = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
    ys[k - 1] + t * (ys[k] - ys[k - 1])
}

/// Graded nodes on the truncated age axis with the weights used by the
/// history integrals.
#[derive(Debug, Clone)]
pub struct MemoryQuadrature<T> {
    pub s_max: T,
    /// `s_0 = 0 < s_1 < … < s_{n−1} = S_max`.
    pub nodes: Vec<T>,
    /// Composite trapezoid weights for a generic `∫₀^{S_max} f`.
    pub weights: Vec<T>,
    /// `∫ σ φ_j` against the piecewise-linear hat of node `j`.
    pub sigma_weights: Vec<T>,
    /// `∫ σ′ φ_j`.
    pub dsigma_weights: Vec<T>,
    /// `g(S_max)`, the mass beyond the truncation age.
    pub tail_bound: T,
}

/// Default truncation age `10/d_σ` (falls back to 10 when no rate is known).
pub fn default_s_max<T: Real>(kernel: &MemoryKernel<T>) -> T {
    match kernel.d_sigma {
        Some(d) => lit::<T>(10.0) / d,
        None => lit(10.0),
    }
}

pub fn build_quadrature<T: Real>(
    kernel: &MemoryKernel<T>,
    n_nodes: usize,
    s_max: T,
) -> Result<MemoryQuadrature<T>, KernelError> {
    let cells = n_nodes.saturating_sub(1).max(1);
    let ratio = DEFAULT_GRADING.powf((REFERENCE_NODES - 1) as f64 / cells as f64);
    build_quadrature_graded(kernel, n_nodes, s_max, lit(ratio))
}

/// Like [`build_quadrature`] with an explicit cell-to-cell ratio.
pub fn build_quadrature_graded<T: Real>(
    kernel: &MemoryKernel<T>,
    n_nodes: usize,
    s_max: T,
    ratio: T,
) -> Result<MemoryQuadrature<T>, KernelError> {
    if n_nodes < 2 || !(s_max > T::zero()) || !(ratio >= T::one()) {
        return Err(KernelError::BadQuadrature);
    }
    let cells = n_nodes - 1;
    let widths: Vec<T> = if ratio == T::one() {
        vec![s_max / from_usize(cells); cells]
    } else {
        let first = s_max * (ratio - T::one()) / (ratio.powi(cells as i32) - T::one());
        (0..cells).map(|k| first * ratio.powi(k as i32)).collect()
    };
    let mut nodes = Vec::with_capacity(n_nodes);
    nodes.push(T::zero());
    for w in &widths {
        let last = *nodes.last().unwrap();
        nodes.push(last + *w);
    }
    nodes[cells] = s_max;

    let half: T = lit(0.5);
    let mut weights = vec![T::zero(); n_nodes];
    let mut sigma_weights = vec![T::zero(); n_nodes];
    let mut dsigma_weights = vec![T::zero(); n_nodes];
    let rule = GaussRule::new(8);
    for k in 0..cells {
        let (a, b) = (nodes[k], nodes[k + 1]);
        let h = b - a;
        weights[k] += h * half;
        weights[k + 1] += h * half;
        for (s, w) in rule.mapped(a, b) {
            let right = (s - a) / h;
            let left = T::one() - right;
            let sg = kernel.sigma(s) * w;
            let ds = kernel.dsigma(s) * w;
            sigma_weights[k] += sg * left;
            sigma_weights[k + 1] += sg * right;
            dsigma_weights[k] += ds * left;
            dsigma_weights[k + 1] += ds * right;
        }
    }
    Ok(MemoryQuadrature {
        s_max,
        nodes,
        weights,
        sigma_weights,
        dsigma_weights,
        tail_bound: kernel.tail(s_max),
    })
}

impl<T: Real> MemoryQuadrature<T> {
    /// Number of history unknowns per spatial point (ages `s_1 … s_{n−1}`).
    pub fn n_ages(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Age of history slot `j` (zero-based over the positive ages).
    pub fn age(&self, j: usize) -> T {
        self.nodes[j + 1]
    }

    /// Width of the upwind cell feeding slot `j`.
    pub fn spacing(&self, j: usize) -> T {
        self.nodes[j + 1] - self.nodes[j]
    }

    /// σ-weight of slot `j`.
    pub fn w(&self, j: usize) -> T {
        self.sigma_weights[j + 1]
    }

    /// σ′-weight of slot `j`.
    pub fn dw(&self, j: usize) -> T {
        self.dsigma_weights[j + 1]
    }

    /// `Σ_j ∫σφ_j`, i.e. `∫₀^{S_max} σ`.
    pub fn sigma_mass(&self) -> T {
        self.sigma_weights.iter().copied().sum()
    }

    /// `Σ q_j σ(s_j)` with the plain trapezoid weights.
    pub fn trapezoid_mass(&self, kernel: &MemoryKernel<T>) -> T {
        self.nodes.iter().zip(&self.weights).map(|(&s, &q)| q * kernel.sigma(s)).sum()
    }

    /// `Σ_j W_j s_j`, the discrete `∫σ(s) s ds`.
    pub fn first_moment(&self) -> T {
        (0..self.n_ages()).map(|j| self.w(j) * self.age(j)).sum()
    }
}

/// Outcome of the admissibility checks on a kernel.
#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    pub mass_ok: bool,
    pub monotone_ok: bool,
    pub dafermos_ok: bool,
    /// Declared `g(0)`.
    pub g0: f64,
    /// `|∫₀^{S_max}σ + g(S_max) − g0|`.
    pub mass_defect: f64,
    /// Smallest `σ(s_j)` over the probe.
    pub min_sigma: f64,
    /// Largest increase `σ(s_{j+1}) − σ(s_j)`; positive means not monotone.
    pub max_increase: f64,
    /// Rate the Dafermos check was run with (declared or inferred).
    pub d_sigma: f64,
    pub d_sigma_declared: bool,
    /// `min_j (−σ′(s_j) − d_σ σ(s_j))`; negative means violated.
    pub dafermos_margin: f64,
    /// For inferred rates: far-half minimum of `−σ′/σ` over near-half minimum.
    pub uniformity: Option<f64>,
}

impl AdmissibilityReport {
    pub fn passed(&self) -> bool {
        self.mass_ok && self.monotone_ok && self.dafermos_ok
    }
}

const UNIFORMITY_FLOOR: f64 = 0.9;

/// Evaluates positivity of mass, monotonicity and the Dafermos inequality
/// at the probe nodes.
pub fn check_admissibility<T: Real>(
    kernel: &MemoryKernel<T>,
    probe: &MemoryQuadrature<T>,
) -> AdmissibilityReport {
    let sig: Vec<f64> = probe.nodes.iter().map(|&s| to_f64(kernel.sigma(s))).collect();
    let dsig: Vec<f64> = probe.nodes.iter().map(|&s| to_f64(kernel.dsigma(s))).collect();
    let g0 = to_f64(kernel.g0);
    let mass_defect = (to_f64(probe.sigma_mass() + probe.tail_bound) - g0).abs();
    let mass_ok = g0 > 0.0
        && g0.is_finite()
        && to_f64(kernel.sigma0).is_finite()
        && mass_defect <= 1e-3 * g0;

    let scale = sig.iter().fold(0.0f64, |a, b| a.max(b.abs())).max(f64::MIN_POSITIVE);
    let min_sigma = sig.iter().copied().fold(f64::INFINITY, f64::min);
    let max_increase = sig.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    let monotone_ok = min_sigma >= -1e-12 * scale && max_increase <= 1e-12 * scale;

    // rates -σ'/σ where σ is not negligible
    let rates: Vec<(usize, f64)> = sig
        .iter()
        .zip(&dsig)
        .enumerate()
        .filter(|(_, (s, _))| **s > 1e-12 * scale)
        .map(|(i, (s, d))| (i, -d / s))
        .collect();
    let (d_sigma, declared, uniformity) = match kernel.d_sigma {
        Some(d) => (to_f64(d), true, None),
        None => {
            let d = rates.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
            let mid = to_f64(probe.s_max) * 0.5;
            let near = rates
                .iter()
                .filter(|(i, _)| to_f64(probe.nodes[*i]) <= mid)
                .map(|r| r.1)
                .fold(f64::INFINITY, f64::min);
            let far = rates
                .iter()
                .filter(|(i, _)| to_f64(probe.nodes[*i]) > mid)
                .map(|r| r.1)
                .fold(f64::INFINITY, f64::min);
            let u = if near.is_finite() && far.is_finite() && near > 0.0 { far / near } else { 0.0 };
            (if d.is_finite() { d } else { 0.0 }, false, Some(u))
        }
    };
    let dafermos_margin = sig
        .iter()
        .zip(&dsig)
        .map(|(s, d)| -d - d_sigma * s)
        .fold(f64::INFINITY, f64::min);
    let tol = 1e-9 * scale * (1.0 + d_sigma);
    let dafermos_ok = !rates.is_empty()
        && d_sigma > 0.0
        && dafermos_margin >= -tol
        && uniformity.map_or(true, |u| u >= UNIFORMITY_FLOOR);

    AdmissibilityReport {
        mass_ok,
        monotone_ok,
        dafermos_ok,
        g0,
        mass_defect,
        min_sigma,
        max_increase,
        d_sigma,
        d_sigma_declared: declared,
        dafermos_margin,
        uniformity,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exponential_closed_forms() {
        let k = MemoryKernel::exponential(1.0, 2.0).unwrap();
        assert_eq!(k.tail(0.0), 1.0);
        assert_eq!(k.d_sigma, Some(2.0));
        assert_eq!(k.dsigma(0.7), -2.0 * k.sigma(0.7));
        let k = MemoryKernel::exponential(3.0, 1.0).unwrap();
        assert_eq!(k.sigma(0.0), 3.0);
        assert!((k.tail(1.0) - 3.0 * (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(
            MemoryKernel::<f64>::exponential(0.0, 1.0).unwrap_err(),
            KernelError::NonPositive("g0")
        );
        assert!(MemoryKernel::<f64>::exponential(1.0, -1.0).is_err());
    }

    #[test]
    fn exponential_passes_all_checks() {
        let k = MemoryKernel::exponential(1.0, 2.0).unwrap();
        let q = build_quadrature(&k, 64, 5.0).unwrap();
        let r = check_admissibility(&k, &q);
        assert!(r.passed(), "{r:?}");
        assert!(r.dafermos_margin.abs() < 1e-12);
    }

    #[test]
    fn algebraic_tail_fails_only_dafermos() {
        let k = MemoryKernel::<f64>::algebraic();
        let q = build_quadrature(&k, 64, 10.0).unwrap();
        let r = check_admissibility(&k, &q);
        assert!(r.mass_ok && r.monotone_ok, "{r:?}");
        assert!(!r.dafermos_ok);
        // closed-form ratio −σ′/σ = 2/(1+s): minimum at S_max, near-half minimum at S_max/2
        assert!((r.d_sigma - 2.0 / 11.0).abs() < 1e-9);
        assert!((r.uniformity.unwrap() - (2.0 / 11.0) / (2.0 / 6.0)).abs() < 0.05);
        assert!((k.tail(3.0) - 0.25).abs() < 1e-10);
    }

    #[test]
    fn zero_kernel_fails_mass() {
        let k = MemoryKernel::from_fn("zero", |_| 0.0f64, Some(|_| 0.0f64), 0.0);
        let q = build_quadrature(&k, 16, 5.0).unwrap();
        let r = check_admissibility(&k, &q);
        assert!(!r.mass_ok);
    }

    #[test]
    fn mass_within_tolerance_at_reference_resolution() {
        let k = MemoryKernel::exponential(1.0, 2.0).unwrap();
        let q = build_quadrature(&k, 64, 10.0).unwrap();
        assert!((q.tail_bound - (-20.0f64).exp()).abs() < 1e-20);
        let m = q.sigma_mass() + q.tail_bound;
        assert!((m - 1.0).abs() <= 1e-4, "mass {m}");
        assert!((q.first_moment() - 0.5).abs() < 1e-4);
    }

    #[test]
    fn two_node_grid_is_valid() {
        let k = MemoryKernel::exponential(1.0, 2.0).unwrap();
        let q = build_quadrature(&k, 2, 10.0).unwrap();
        assert_eq!(q.nodes, vec![0.0, 10.0]);
        assert!(q.weights.iter().all(|&w| w > 0.0));
        assert!(q.sigma_weights.iter().all(|&w| w > 0.0));
        assert!(build_quadrature(&k, 1, 10.0).is_err());
    }

    #[test]
    fn trapezoid_mass_error_halves_under_doubling() {
        let k = MemoryKernel::<f64>::exponential(1.0, 2.0).unwrap();
        let mut prev = f64::INFINITY;
        for n in [8, 16, 32, 64, 128, 256] {
            let q = build_quadrature(&k, n, 10.0).unwrap();
            let err = (q.trapezoid_mass(&k) + q.tail_bound - 1.0).abs();
            assert!(err <= 0.5 * prev, "n={n}: {err} vs {prev}");
            prev = err;
        }
    }

    #[test]
    fn upwind_weight_ratio_nonincreasing() {
        let k = MemoryKernel::exponential(1.0, 2.0).unwrap();
        for n in [2, 8, 64, 256] {
            let q = build_quadrature(&k, n, 5.0).unwrap();
            for j in 1..q.n_ages() {
                assert!(q.w(j) / q.spacing(j) <= q.w(j - 1) / q.spacing(j - 1) * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn sampled_kernel_matches_exponential() {
        let s: Vec<f64> = (0..=2000).map(|i| i as f64 * 0.005).collect();
        let sig: Vec<f64> = s.iter().map(|s| 2.0 * (-2.0 * s).exp()).collect();
        let k = MemoryKernel::sampled(s, sig).unwrap();
        assert!((k.g0 - 1.0).abs() < 1e-4);
        assert!((k.dsigma(1.0) + 2.0 * k.sigma(1.0)).abs() < 1e-4);
        let q = build_quadrature(&k, 64, 10.0).unwrap();
        let r = check_admissibility(&k, &q);
        assert!(r.passed(), "{r:?}");
        assert!((r.d_sigma - 2.0).abs() < 1e-3);
    }

    #[test]
    fn samples_text_parsing() {
        let k = MemoryKernel::<f64>::from_samples_text("# s sigma\n0 2\n0.5, 1\n1 0.5\n").unwrap();
        assert_eq!(k.sigma(0.25), 1.5);
        assert_eq!(k.g0, 1.5 * 0.5 + 0.75 * 0.5);
        assert!(MemoryKernel::<f64>::from_samples_text("0 1 2\n").is_err());
        assert!(MemoryKernel::<f64>::from_samples_text("0 1\n0 1\n").is_err());
    }

    #[test]
    fn single_precision_quadrature() {
        let k = MemoryKernel::<f32>::exponential(1.0, 2.0).unwrap();
        let q = build_quadrature(&k, 64, 5.0).unwrap();
        assert!((q.sigma_mass() + q.tail_bound - 1.0).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn mass_error_plus_tail_nonincreasing(n in 16usize..200, smax in 1.0f64..12.0, delta in 0.5f64..4.0) {
            let k = MemoryKernel::exponential(1.0, delta).unwrap();
            let total = |n: usize, s: f64| {
                let q = build_quadrature(&k, n, s).unwrap();
                (q.sigma_mass() + q.tail_bound - 1.0).abs() + q.tail_bound
            };
            let base = total(n, smax);
            prop_assert!(total(2 * n, smax) <= base + 1e-13);
            prop_assert!(total(n, smax * 1.5) <= base + 1e-13);
        }
    }
}
