//! Material constants, validation and the regime taxonomy.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{lit, to_f64, Real};

/// Keys accepted in a raw parameter map, in canonical order.
pub const PARAM_KEYS: [&str; 12] = [
    "rho", "alpha", "gamma", "mu", "xi", "eps3", "a", "b", "c", "d", "m", "L",
];

const POSITIVE: [&str; 9] = ["rho", "alpha", "gamma", "mu", "xi", "eps3", "a", "d", "L"];
const NONNEGATIVE: [&str; 2] = ["b", "c"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamError {
    #[error("parameter `{0}` must be strictly positive")]
    NonPositive(String),
    #[error("parameter `{0}` must be nonnegative")]
    Negative(String),
    #[error("parameter `{0}` is out of range")]
    OutOfRange(String),
    #[error("missing parameter `{0}`")]
    MissingKey(String),
    #[error("unknown parameter `{0}`")]
    UnknownKey(String),
}

/// All violations found in one raw parameter map.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParamErrors(pub Vec<ParamError>);

impl fmt::Display for ParamErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

impl ParamErrors {
    pub fn contains(&self, e: &ParamError) -> bool {
        self.0.contains(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams<T> {
    pub rho: T,
    pub alpha: T,
    pub gamma: T,
    pub mu: T,
    pub xi: T,
    pub eps3: T,
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
    pub m: T,
    pub length: T,
}

impl<T: Real> PhysicalParams<T> {
    /// The desk-scale scenario: every constant 1, `m = 1/2`, `L = 1`.
    pub fn unit() -> Self {
        let one = T::one();
        Self {
            rho: one,
            alpha: one,
            gamma: one,
            mu: one,
            xi: one,
            eps3: one,
            a: one,
            b: one,
            c: one,
            d: one,
            m: lit(0.5),
            length: one,
        }
    }

    pub fn with_damping(mut self, b: T, c: T) -> Self {
        self.b = b;
        self.c = c;
        self
    }

    pub fn with_memory(mut self, m: T) -> Self {
        self.m = m;
        self
    }

    /// Validates a raw map. Every violation is reported, not just the first.
    pub fn validate(raw: &BTreeMap<String, f64>) -> Result<Self, ParamErrors> {
        let mut errs = Vec::new();
        for k in raw.keys() {
            if !PARAM_KEYS.contains(&k.as_str()) {
                errs.push(ParamError::UnknownKey(k.clone()));
            }
        }
        let mut get = |k: &str| -> f64 {
            match raw.get(k) {
                Some(v) => *v,
                None => {
                    errs.push(ParamError::MissingKey(k.to_string()));
                    f64::NAN
                }
            }
        };
        let vals: Vec<f64> = PARAM_KEYS.iter().map(|k| get(k)).collect();
        for (k, v) in PARAM_KEYS.iter().zip(&vals) {
            if !raw.contains_key(*k) {
                continue;
            }
            if POSITIVE.contains(k) && !(*v > 0.0 && v.is_finite()) {
                errs.push(ParamError::NonPositive(k.to_string()));
            }
            if NONNEGATIVE.contains(k) && !(*v >= 0.0 && v.is_finite()) {
                errs.push(ParamError::Negative(k.to_string()));
            }
            if *k == "m" && !(0.0..=1.0).contains(v) {
                errs.push(ParamError::OutOfRange("m".into()));
            }
        }
        if !errs.is_empty() {
            return Err(ParamErrors(errs));
        }
        let p = |i: usize| lit::<T>(vals[i]);
        Ok(Self {
            rho: p(0),
            alpha: p(1),
            gamma: p(2),
            mu: p(3),
            xi: p(4),
            eps3: p(5),
            a: p(6),
            b: p(7),
            c: p(8),
            d: p(9),
            m: p(10),
            length: p(11),
        })
    }

    pub fn to_map(&self) -> BTreeMap<String, f64> {
        let v = [
            self.rho, self.alpha, self.gamma, self.mu, self.xi, self.eps3, self.a, self.b,
            self.c, self.d, self.m, self.length,
        ];
        PARAM_KEYS
            .iter()
            .zip(v)
            .map(|(k, x)| (k.to_string(), to_f64(x)))
            .collect()
    }

    /// `α + γ²/ε₃`
    pub fn alpha1(&self) -> T {
        self.alpha + self.gamma * self.gamma / self.eps3
    }

    /// `α + γ/ε₃`
    pub fn alpha2(&self) -> T {
        self.alpha + self.gamma / self.eps3
    }

    /// Coefficient `μ/(ξε₃)` of the restoring term in the `u²` equation.
    pub fn k_mag(&self) -> T {
        self.mu / (self.xi * self.eps3)
    }

    pub fn classify(&self) -> RegimeTag {
        RegimeTag::from_values(to_f64(self.m), to_f64(self.b), to_f64(self.c))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ThermalLaw {
    Fourier,
    ColemanGurtin,
    GurtinPipkin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Damping {
    BothDamped,
    OnlyZ,
    OnlyX,
    Undamped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RegimeTag {
    pub thermal: ThermalLaw,
    pub damping: Damping,
}

impl RegimeTag {
    pub fn from_values(m: f64, b: f64, c: f64) -> Self {
        let thermal = if m == 0.0 {
            ThermalLaw::Fourier
        } else if m == 1.0 {
            ThermalLaw::GurtinPipkin
        } else {
            ThermalLaw::ColemanGurtin
        };
        let damping = match (b > 0.0, c > 0.0) {
            (true, true) => Damping::BothDamped,
            (false, true) => Damping::OnlyZ,
            (true, false) => Damping::OnlyX,
            (false, false) => Damping::Undamped,
        };
        Self { thermal, damping }
    }

    /// Whether `(m, b, c)` lies in this cell.
    pub fn matches(&self, m: f64, b: f64, c: f64) -> bool {
        Self::from_values(m, b, c) == *self
    }
}

impl fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}/{:?}", self.thermal, self.damping)
    }
}
