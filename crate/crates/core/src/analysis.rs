//! Decay fits of energy series, resolvent sweeps and the stability verdict.
//!
//! Exponential stability is read off as a straight line in `(t, ln E)`,
//! polynomial stability as a straight line in `(ln t, ln E)`. Uniform
//! resolvent bounds are finite-frequency proxies: the norm must stop growing
//! over the top decade of the sweep, and for the Gurtin-Pipkin law
//! `‖(iλ − A_h)⁻¹‖/λ²` must not increase there.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generator::{resolvent_norm, GeneratorMatrix, ResolventOptions};
use crate::params::{Damping, PhysicalParams, RegimeTag, ThermalLaw};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("energy is not positive at t = {t}")]
    NonPositiveEnergy { t: f64 },
    #[error("fit window [{t0}, {t1}] holds fewer than two samples")]
    EmptyWindow { t0: f64, t1: f64 },
    #[error("invalid frequency list: {0}")]
    InvalidLambda(String),
    #[error("inconsistent inputs: {0}")]
    InconsistentInputs(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecayKind {
    Exponential,
    Polynomial,
}

/// A least-squares line through the log energy.
///
/// Exponential: `E ≈ M e^{−rate·t}`, and the state norm decays at
/// `state_rate = rate/2`. Polynomial: `E ≈ M t^{rate}` (so `rate ≈ −1` is the
/// expected energy exponent) and the state norm decays like `t^{rate/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub kind: DecayKind,
    pub rate: f64,
    pub state_rate: f64,
    pub prefactor: f64,
    pub window: (f64, f64),
    pub r_squared: f64,
    pub samples: usize,
    /// Slope of `ln E` in the fitted variable.
    pub slope: f64,
}

struct Line {
    slope: f64,
    intercept: f64,
    r_squared: f64,
    n: usize,
}

fn least_squares(xs: &[f64], ys: &[f64]) -> Line {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    // A flat series has no explained variance to speak of.
    let r_squared = if sxx > 0.0 && syy > 0.0 { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) } else { 0.0 };
    Line { slope, intercept: my - slope * mx, r_squared, n: xs.len() }
}

fn window_samples(
    times: &[f64],
    energies: &[f64],
    window: (f64, f64),
) -> Result<(Vec<f64>, Vec<f64>), AnalysisError> {
    let (t0, t1) = window;
    let scale = t1.abs().max(1.0) * 1e-12;
    let mut ts = Vec::new();
    let mut logs = Vec::new();
    for (&t, &e) in times.iter().zip(energies) {
        if t < t0 - scale || t > t1 + scale {
            continue;
        }
        if !(e > 0.0) || !e.is_finite() {
            return Err(AnalysisError::NonPositiveEnergy { t });
        }
        ts.push(t);
        logs.push(e.ln());
    }
    if ts.len() < 2 {
        return Err(AnalysisError::EmptyWindow { t0, t1 });
    }
    Ok((ts, logs))
}

/// The final half `[t_end/2, t_end]` of a series starting at `times[0]`.
pub fn default_window(times: &[f64]) -> (f64, f64) {
    let t0 = times.first().copied().unwrap_or(0.0);
    let t1 = times.last().copied().unwrap_or(0.0);
    (t0 + 0.5 * (t1 - t0), t1)
}

/// Window used for polynomial fits: `[t_end/4, t_end]`.
pub fn polynomial_window(times: &[f64]) -> (f64, f64) {
    let t1 = times.last().copied().unwrap_or(0.0);
    (0.25 * t1, t1)
}

pub fn fit_exponential(times: &[f64], energies: &[f64], window: (f64, f64)) -> Result<DecayFit, AnalysisError> {
    let (ts, logs) = window_samples(times, energies, window)?;
    let line = least_squares(&ts, &logs);
    Ok(DecayFit {
        kind: DecayKind::Exponential,
        rate: -line.slope,
        state_rate: -0.5 * line.slope,
        prefactor: line.intercept.exp(),
        window,
        r_squared: line.r_squared,
        samples: line.n,
        slope: line.slope,
    })
}

pub fn fit_polynomial(times: &[f64], energies: &[f64], window: (f64, f64)) -> Result<DecayFit, AnalysisError> {
    if !(window.0 > 0.0) {
        return Err(AnalysisError::EmptyWindow { t0: window.0, t1: window.1 });
    }
    let (ts, logs) = window_samples(times, energies, window)?;
    let log_t: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let line = least_squares(&log_t, &logs);
    Ok(DecayFit {
        kind: DecayKind::Polynomial,
        rate: line.slope,
        state_rate: 0.5 * line.slope,
        prefactor: line.intercept.exp(),
        window,
        r_squared: line.r_squared,
        samples: line.n,
        slope: line.slope,
    })
}

/// Local log-log slope `t·d(ln E)/dt` at the end of an exponential fit's
/// window, using the fitted `d(ln E)/dt`.
pub fn effective_loglog_slope(fit: &DecayFit) -> f64 {
    match fit.kind {
        DecayKind::Exponential => fit.slope * fit.window.1,
        DecayKind::Polynomial => fit.slope,
    }
}

/// A frequency list `kind:min:max:count` with `kind` `log` or `lin`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaRange {
    pub spacing: Spacing,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Spacing {
    Log,
    Lin,
}

impl LambdaRange {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let k = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let f = i as f64 / k;
                match self.spacing {
                    Spacing::Log => (self.min.ln() + f * (self.max.ln() - self.min.ln())).exp(),
                    Spacing::Lin => self.min + f * (self.max - self.min),
                }
            })
            .collect()
    }
}

impl FromStr for LambdaRange {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |msg: &str| AnalysisError::InvalidLambda(format!("`{s}`: {msg}"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        if parts.len() != 4 {
            return Err(bad("expected log:min:max:count or lin:min:max:count"));
        }
        let spacing = match parts[0] {
            "log" => Spacing::Log,
            "lin" => Spacing::Lin,
            other => return Err(bad(&format!("unknown spacing `{other}`"))),
        };
        let min: f64 = parts[1].parse().map_err(|_| bad("min is not a number"))?;
        let max: f64 = parts[2].parse().map_err(|_| bad("max is not a number"))?;
        let count: usize = parts[3].parse().map_err(|_| bad("count is not a positive integer"))?;
        if !min.is_finite() || !max.is_finite() {
            return Err(bad("bounds must be finite"));
        }
        if count == 0 {
            return Err(bad("count must be at least 1"));
        }
        if max < min {
            return Err(bad("range is reversed"));
        }
        if count == 1 && max != min {
            return Err(bad("a single sample needs min = max"));
        }
        if spacing == Spacing::Log && !(min > 0.0) {
            return Err(bad("log spacing needs min > 0"));
        }
        let range = Self { spacing, min, max, count };
        if range.values().iter().any(|&l| l == 0.0) {
            return Err(bad("lambda = 0 is not an admissible frequency"));
        }
        Ok(range)
    }
}

impl fmt::Display for LambdaRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.spacing {
            Spacing::Log => "log",
            Spacing::Lin => "lin",
        };
        write!(f, "{kind}:{}:{}:{}", self.min, self.max, self.count)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolventSample {
    pub lambda: f64,
    /// `NaN` when the sample failed.
    pub norm: f64,
    pub scaled: f64,
    pub iterations: usize,
    pub converged: bool,
    pub error: Option<String>,
}

/// Norm estimates at every `λ`, in parallel, sorted by `λ`. A failing sample
/// is flagged and the sweep continues.
pub fn resolvent_sweep<T: Real>(
    gen: &GeneratorMatrix<T>,
    lambdas: &[f64],
    opts: &ResolventOptions,
) -> Result<Vec<ResolventSample>, AnalysisError> {
    if let Some(l) = lambdas.iter().find(|l| !l.is_finite() || **l == 0.0) {
        return Err(AnalysisError::InvalidLambda(format!("{l} is not a finite nonzero frequency")));
    }
    let mut out: Vec<ResolventSample> = lambdas
        .par_iter()
        .map(|&lambda| match resolvent_norm(gen, T::from(lambda).expect("finite"), opts) {
            Ok(e) => ResolventSample {
                lambda,
                norm: e.norm,
                scaled: e.norm / (lambda * lambda),
                iterations: e.iterations,
                converged: e.converged,
                error: None,
            },
            Err(err) => ResolventSample {
                lambda,
                norm: f64::NAN,
                scaled: f64::NAN,
                iterations: 0,
                converged: false,
                error: Some(err.to_string()),
            },
        })
        .collect();
    out.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    Ok(out)
}

/// Boundedness proxy: the top decade `[λ_max/10, λ_max]` against the one
/// below it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundednessProxy {
    pub top_decade_max: f64,
    pub previous_decade_max: f64,
    pub ratio: f64,
    pub max_over_min: f64,
    /// `min 1/‖R(iλ)‖`, a lower bound for the distance of the sampled
    /// axis points to the spectrum.
    pub axis_distance_bound: f64,
    pub bounded: bool,
}

pub const BOUNDED_RATIO: f64 = 1.1;

fn decade_split(samples: &[ResolventSample]) -> Option<(f64, Vec<&ResolventSample>, Vec<&ResolventSample>)> {
    let good: Vec<&ResolventSample> = samples.iter().filter(|s| s.norm.is_finite()).collect();
    let top = good.iter().map(|s| s.lambda.abs()).fold(0.0, f64::max);
    if top == 0.0 {
        return None;
    }
    let cut = top / 10.0;
    let upper: Vec<_> = good.iter().copied().filter(|s| s.lambda.abs() >= cut).collect();
    let lower: Vec<_> = good.iter().copied().filter(|s| s.lambda.abs() < cut && s.lambda.abs() >= cut / 10.0).collect();
    Some((top, upper, lower))
}

pub fn boundedness_proxy(samples: &[ResolventSample]) -> Option<BoundednessProxy> {
    let (_, upper, lower) = decade_split(samples)?;
    if upper.is_empty() || lower.is_empty() {
        return None;
    }
    let max_of = |v: &[&ResolventSample]| v.iter().map(|s| s.norm).fold(f64::NEG_INFINITY, f64::max);
    let top_decade_max = max_of(&upper);
    let previous_decade_max = max_of(&lower);
    let finite = samples.iter().filter(|s| s.norm.is_finite());
    let max = finite.clone().map(|s| s.norm).fold(f64::NEG_INFINITY, f64::max);
    let min = finite.map(|s| s.norm).fold(f64::INFINITY, f64::min);
    let ratio = top_decade_max / previous_decade_max;
    Some(BoundednessProxy {
        top_decade_max,
        previous_decade_max,
        ratio,
        max_over_min: max / min,
        axis_distance_bound: 1.0 / max,
        bounded: ratio <= BOUNDED_RATIO,
    })
}

/// Scaled-norm proxy: `norm/λ²` over the top decade, in increasing `|λ|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledProxy {
    /// Largest relative step-up `scaled_{k+1}/scaled_k − 1` (≤ 0 when
    /// nonincreasing).
    pub worst_increase: f64,
    pub top_decade_max: f64,
    pub nonincreasing: bool,
}

pub fn scaled_proxy(samples: &[ResolventSample]) -> Option<ScaledProxy> {
    let (_, mut upper, _) = decade_split(samples)?;
    if upper.len() < 2 {
        return None;
    }
    upper.sort_by(|a, b| a.lambda.abs().total_cmp(&b.lambda.abs()));
    let worst_increase =
        upper.windows(2).map(|w| w[1].scaled / w[0].scaled - 1.0).fold(f64::NEG_INFINITY, f64::max);
    Some(ScaledProxy {
        worst_increase,
        top_decade_max: upper.iter().map(|s| s.scaled).fold(f64::NEG_INFINITY, f64::max),
        nonincreasing: worst_increase <= 0.0,
    })
}

/// A sweep tagged with the configuration it came from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepReport {
    pub config_hash: String,
    pub samples: Vec<ResolventSample>,
}

/// Decay fits of one trajectory, tagged with its configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitReport {
    pub config_hash: String,
    pub exponential: DecayFit,
    pub polynomial: Option<DecayFit>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictKind {
    Exponential,
    Polynomial,
    OutsideProvenRegimes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub name: String,
    pub expected: String,
    pub measured: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub kind: VerdictKind,
    pub regime: RegimeTag,
    pub claim: String,
    pub config_hash: String,
    pub fits: FitReport,
    pub boundedness: Option<BoundednessProxy>,
    pub scaled: Option<ScaledProxy>,
    pub failed_samples: usize,
    pub expectations: Vec<Expectation>,
    pub passed: bool,
}

/// Minimum `R²` for an exponential fit to count as evidence.
pub const MIN_R_SQUARED: f64 = 0.99;
/// Loosest energy exponent accepted as polynomial decay at desk scale.
pub const MAX_POLY_EXPONENT: f64 = -0.8;

fn claim_for(regime: RegimeTag) -> (VerdictKind, &'static str) {
    use Damping::*;
    use ThermalLaw::*;
    match (regime.thermal, regime.damping) {
        (Fourier, BothDamped) => (VerdictKind::Exponential, "exponential stability under Fourier conduction"),
        (Fourier, _) => (
            VerdictKind::Exponential,
            "exponential stability under Fourier conduction with partially or fully undamped electric fields",
        ),
        (ColemanGurtin, BothDamped) => (VerdictKind::Exponential, "exponential stability under Coleman-Gurtin conduction"),
        (ColemanGurtin, OnlyZ) | (ColemanGurtin, OnlyX) => (
            VerdictKind::Exponential,
            "exponential stability under Coleman-Gurtin conduction with one electric damping",
        ),
        (ColemanGurtin, Undamped) => (
            VerdictKind::Exponential,
            "exponential stability under Coleman-Gurtin conduction without electric damping",
        ),
        (GurtinPipkin, BothDamped) => {
            (VerdictKind::Polynomial, "polynomial stability of type 1/t under Gurtin-Pipkin conduction")
        }
        (GurtinPipkin, _) => (
            VerdictKind::OutsideProvenRegimes,
            "no decay result is proven for Gurtin-Pipkin conduction unless both electric fields are damped",
        ),
    }
}

/// Matches the measured evidence against the result proven for the regime
/// of `params`. A pure function of its inputs.
pub fn certify(
    params: &PhysicalParams<f64>,
    sweep: &SweepReport,
    fits: &FitReport,
) -> Result<StabilityVerdict, AnalysisError> {
    if sweep.config_hash != fits.config_hash {
        return Err(AnalysisError::InconsistentInputs(format!(
            "sweep from config {} but fits from config {}",
            sweep.config_hash, fits.config_hash
        )));
    }
    if sweep.samples.is_empty() {
        return Err(AnalysisError::InconsistentInputs("empty sweep".into()));
    }
    let regime = params.classify();
    let (kind, claim) = claim_for(regime);
    let boundedness = boundedness_proxy(&sweep.samples);
    let scaled = scaled_proxy(&sweep.samples);
    let failed_samples = sweep.samples.iter().filter(|s| s.error.is_some()).count();
    let mut expectations = vec![Expectation {
        name: "all sweep samples solved".into(),
        expected: "0 failures".into(),
        measured: failed_samples as f64,
        holds: failed_samples == 0,
    }];
    match kind {
        VerdictKind::Exponential => {
            let fit = &fits.exponential;
            expectations.push(Expectation {
                name: "bounded resolvent (top decade vs previous decade)".into(),
                expected: format!("ratio <= {BOUNDED_RATIO}"),
                measured: boundedness.map_or(f64::NAN, |b| b.ratio),
                holds: boundedness.is_some_and(|b| b.bounded),
            });
            expectations.push(Expectation {
                name: "positive exponential energy rate".into(),
                expected: "> 0".into(),
                measured: fit.rate,
                holds: fit.rate > 0.0,
            });
            expectations.push(Expectation {
                name: "log-linear fit quality".into(),
                expected: format!("R^2 >= {MIN_R_SQUARED}"),
                measured: fit.r_squared,
                holds: fit.r_squared >= MIN_R_SQUARED,
            });
        }
        VerdictKind::Polynomial => {
            expectations.push(Expectation {
                name: "norm/lambda^2 nonincreasing over the top decade".into(),
                expected: "worst increase <= 0".into(),
                measured: scaled.map_or(f64::NAN, |s| s.worst_increase),
                holds: scaled.is_some_and(|s| s.nonincreasing),
            });
            let exponent = fits.polynomial.as_ref().map_or(f64::NAN, |f| f.rate);
            expectations.push(Expectation {
                name: "polynomial energy exponent (expected -1)".into(),
                expected: format!("<= {MAX_POLY_EXPONENT}"),
                measured: exponent,
                holds: exponent <= MAX_POLY_EXPONENT,
            });
        }
        VerdictKind::OutsideProvenRegimes => {}
    }
    let passed = expectations.iter().all(|e| e.holds);
    Ok(StabilityVerdict {
        kind,
        regime,
        claim: claim.into(),
        config_hash: sweep.config_hash.clone(),
        fits: fits.clone(),
        boundedness,
        scaled,
        failed_samples,
        expectations,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn series(f: impl Fn(f64) -> f64, t1: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
        let ts: Vec<f64> = (0..=n).map(|i| t1 * i as f64 / n as f64).collect();
        let es = ts.iter().map(|&t| f(t)).collect();
        (ts, es)
    }

    #[test]
    fn exponential_exact() {
        let (t, e) = series(|t| (-2.0 * t).exp(), 10.0, 1000);
        let fit = fit_exponential(&t, &e, default_window(&t)).unwrap();
        assert!((fit.rate - 2.0).abs() < 1e-6);
        assert!((fit.state_rate - 1.0).abs() < 1e-6);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!((fit.prefactor - 1.0).abs() < 1e-6);
    }

    #[test]
    fn exponential_with_tiny_noise() {
        let (t, e) = series(|t| 5.0 * (-3.0 * t).exp() + 1e-15 * (37.0 * t).sin(), 6.0, 600);
        let fit = fit_exponential(&t, &e, default_window(&t)).unwrap();
        assert!((fit.rate - 3.0).abs() < 1e-3, "{}", fit.rate);
    }

    #[test]
    fn constant_energy_degenerate() {
        let (t, e) = series(|_| 2.0, 4.0, 40);
        let fit = fit_exponential(&t, &e, default_window(&t)).unwrap();
        assert_eq!(fit.rate, 0.0);
        assert_eq!(fit.r_squared, 0.0);
    }

    #[test]
    fn polynomial_exponents() {
        let (t, e) = series(|t| 1.0 / t, 20.0, 2000);
        let fit = fit_polynomial(&t, &e, (5.0, 20.0)).unwrap();
        assert!((fit.rate + 1.0).abs() < 1e-6);
        let (t, e) = series(|t| 3.0 / (t * t), 20.0, 2000);
        let fit = fit_polynomial(&t, &e, (5.0, 20.0)).unwrap();
        assert!((fit.rate + 2.0).abs() < 1e-6);
        assert!((fit.prefactor - 3.0).abs() < 1e-6);
    }

    #[test]
    fn fit_errors() {
        let (t, mut e) = series(|t| (-t).exp(), 4.0, 40);
        assert!(matches!(fit_exponential(&t, &e, (10.0, 12.0)), Err(AnalysisError::EmptyWindow { .. })));
        assert!(matches!(fit_polynomial(&t, &e, (0.0, 4.0)), Err(AnalysisError::EmptyWindow { .. })));
        e[30] = 0.0;
        assert!(matches!(fit_exponential(&t, &e, (2.0, 4.0)), Err(AnalysisError::NonPositiveEnergy { .. })));
    }

    #[test]
    fn effective_slope_of_exponential() {
        let (t, e) = series(|t| (-0.5 * t).exp(), 20.0, 200);
        let fit = fit_exponential(&t, &e, default_window(&t)).unwrap();
        assert!((effective_loglog_slope(&fit) + 10.0).abs() < 1e-9);
    }

    #[test]
    fn lambda_ranges() {
        let r: LambdaRange = "log:1:1000:30".parse().unwrap();
        let v = r.values();
        assert_eq!(v.len(), 30);
        assert!((v[0] - 1.0).abs() < 1e-12 && (v[29] - 1000.0).abs() < 1e-9);
        assert_eq!("lin:1:10:10".parse::<LambdaRange>().unwrap().values()[4], 5.0);
        assert_eq!(r.to_string().parse::<LambdaRange>().unwrap(), r);
        for bad in ["lin:0:10:5", "log:0:10:5", "log:10:1:5", "lin:-1:1:3", "lin:1:2", "cubic:1:2:3", "lin:1:2:0"] {
            assert!(bad.parse::<LambdaRange>().is_err(), "{bad}");
        }
        assert!("lin:-2:-1:3".parse::<LambdaRange>().is_ok());
    }

    fn sample(lambda: f64, norm: f64) -> ResolventSample {
        ResolventSample { lambda, norm, scaled: norm / (lambda * lambda), iterations: 1, converged: true, error: None }
    }

    #[test]
    fn proxies_on_synthetic_sweeps() {
        let r: LambdaRange = "log:1:1000:30".parse().unwrap();
        let flat: Vec<_> = r.values().into_iter().map(|l| sample(l, 2.0 + 1.0 / l)).collect();
        let b = boundedness_proxy(&flat).unwrap();
        assert!(b.bounded && b.ratio < 1.0);
        assert!(scaled_proxy(&flat).unwrap().nonincreasing);
        let growing: Vec<_> = r.values().into_iter().map(|l| sample(l, l)).collect();
        assert!(!boundedness_proxy(&growing).unwrap().bounded);
        let cubic: Vec<_> = r.values().into_iter().map(|l| sample(l, l * l * l)).collect();
        assert!(!scaled_proxy(&cubic).unwrap().nonincreasing);
    }

    #[test]
    fn sweep_symmetry_and_order() {
        use crate::generator::testutil::generator;
        let gen = generator(16, 8, PhysicalParams::unit().with_memory(0.5));
        let s = resolvent_sweep(&gen, &[3.0, -3.0, 0.5], &ResolventOptions::default()).unwrap();
        assert_eq!(s.iter().map(|x| x.lambda).collect::<Vec<_>>(), vec![-3.0, 0.5, 3.0]);
        assert!((s[0].norm - s[2].norm).abs() < 1e-6 * s[2].norm);
        assert!(resolvent_sweep(&gen, &[1.0, 0.0], &ResolventOptions::default()).is_err());
    }

    fn fits(hash: &str, rate: f64, r2: f64, exponent: Option<f64>) -> FitReport {
        let exponential = DecayFit {
            kind: DecayKind::Exponential,
            rate,
            state_rate: rate / 2.0,
            prefactor: 1.0,
            window: (10.0, 20.0),
            r_squared: r2,
            samples: 100,
            slope: -rate,
        };
        let polynomial = exponent.map(|p| DecayFit {
            kind: DecayKind::Polynomial,
            rate: p,
            state_rate: p / 2.0,
            prefactor: 1.0,
            window: (5.0, 20.0),
            r_squared: 1.0,
            samples: 100,
            slope: p,
        });
        FitReport { config_hash: hash.into(), exponential, polynomial }
    }

    fn sweep(hash: &str, f: impl Fn(f64) -> f64) -> SweepReport {
        let r: LambdaRange = "log:1:1000:30".parse().unwrap();
        SweepReport { config_hash: hash.into(), samples: r.values().into_iter().map(|l| sample(l, f(l))).collect() }
    }

    #[test]
    fn certify_regimes() {
        let half = PhysicalParams::unit().with_memory(0.5).with_damping(0.0, 0.0);
        let v = certify(&half, &sweep("h", |l| 1.0 + 1.0 / l), &fits("h", 0.4, 0.999, None)).unwrap();
        assert_eq!(v.kind, VerdictKind::Exponential);
        assert!(v.passed);
        assert!(v.claim.contains("without electric damping"));

        let gp = PhysicalParams::unit().with_memory(1.0);
        let v = certify(&gp, &sweep("h", |l| l), &fits("h", 0.4, 0.999, Some(-1.2))).unwrap();
        assert_eq!(v.kind, VerdictKind::Polynomial);
        assert!(v.passed);

        let gp_undamped = gp.with_damping(0.0, 0.0);
        let v = certify(&gp_undamped, &sweep("h", |l| l), &fits("h", 0.4, 0.999, Some(-1.2))).unwrap();
        assert_eq!(v.kind, VerdictKind::OutsideProvenRegimes);

        let v = certify(&half, &sweep("h", |l| l), &fits("h", 0.4, 0.9, None)).unwrap();
        assert!(!v.passed);
        assert_eq!(v.expectations.iter().filter(|e| !e.holds).count(), 2);
    }

    #[test]
    fn certify_rejects_mixed_configs() {
        let gp = PhysicalParams::unit().with_memory(1.0);
        let err = certify(&gp, &sweep("a", |l| l), &fits("b", 0.4, 0.999, Some(-1.0))).unwrap_err();
        assert!(matches!(err, AnalysisError::InconsistentInputs(_)));
    }

    #[test]
    fn certify_is_pure() {
        let p = PhysicalParams::unit().with_memory(0.5);
        let s = sweep("h", |l| 1.0 + 1.0 / l);
        let f = fits("h", 0.4, 0.995, None);
        let a = serde_json::to_string(&certify(&p, &s, &f).unwrap()).unwrap();
        let b = serde_json::to_string(&certify(&p, &s, &f).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn time_rescaling_scales_rate(rate in 0.05f64..5.0, c in 0.1f64..10.0, amp in 0.1f64..10.0) {
            let (t, e) = series(|t| amp * (-rate * t).exp() * (1.0 + 0.01 * (3.0 * t).sin()), 10.0, 400);
            let ts: Vec<f64> = t.iter().map(|x| x * c).collect();
            let a = fit_exponential(&t, &e, default_window(&t)).unwrap();
            let b = fit_exponential(&ts, &e, default_window(&ts)).unwrap();
            prop_assert!((b.rate - a.rate / c).abs() <= 1e-9 * a.rate.abs().max(1.0));
            prop_assert!((0.0..=1.0).contains(&a.r_squared));
        }
    }
}
