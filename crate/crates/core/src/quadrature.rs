//! Gauss-Legendre rules on arbitrary intervals.

use gauss_quad::GaussLegendre;

use crate::scalar::{lit, Real};

#[derive(Debug, Clone)]
pub struct GaussRule<T> {
    x: Vec<T>,
    w: Vec<T>,
}

impl<T: Real> GaussRule<T> {
    pub fn new(points: usize) -> Self {
        let rule = GaussLegendre::new(points.try_into().expect("at least two points"));
        let (x, w) = rule.iter().map(|(x, w)| (lit::<T>(*x), lit::<T>(*w))).unzip();
        Self { x, w }
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: T, b: T) -> impl Iterator<Item = (T, T)> + '_ {
        let half = (b - a) * lit(0.5);
        let mid = (a + b) * lit(0.5);
        self.x.iter().zip(&self.w).map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: T, b: T, mut f: impl FnMut(T) -> T) -> T {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Composite rule over `panels` equal sub-intervals.
    pub fn integrate_composite(&self, a: T, b: T, panels: usize, mut f: impl FnMut(T) -> T) -> T {
        let step = (b - a) / crate::scalar::from_usize(panels);
        (0..panels)
            .map(|k| {
                let lo = a + step * crate::scalar::from_usize(k);
                self.integrate(lo, lo + step, &mut f)
            })
            .sum()
    }
}
