//! Named analytic initial profiles.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::generator::GeneratorMatrix;
use crate::scalar::{lit, to_f64, Real};
use crate::state::FirstOrderState;

/// A scalar profile on `[0, L]` with its derivative.
///
/// Text forms: `zero`, `sin:k:amp` (`amp·sin(kπx/L)`), `cos:k:amp`,
/// `bump:center:width:amp` (`amp·exp(−((x−c)/w)²)`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Profile {
    Zero,
    Sin { mode: f64, amp: f64 },
    Cos { mode: f64, amp: f64 },
    Bump { center: f64, width: f64, amp: f64 },
}

impl Profile {
    pub fn eval(&self, x: f64, length: f64) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Sin { mode, amp } => amp * (mode * PI * x / length).sin(),
            Profile::Cos { mode, amp } => amp * (mode * PI * x / length).cos(),
            Profile::Bump { center, width, amp } => amp * (-((x - center) / width).powi(2)).exp(),
        }
    }

    pub fn derivative(&self, x: f64, length: f64) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Sin { mode, amp } => amp * mode * PI / length * (mode * PI * x / length).cos(),
            Profile::Cos { mode, amp } => -amp * mode * PI / length * (mode * PI * x / length).sin(),
            Profile::Bump { center, width, amp } => {
                let r = (x - center) / width;
                -2.0 * r / width * amp * (-r * r).exp()
            }
        }
    }
}

impl FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let nums: Result<Vec<f64>, _> = parts[1..].iter().map(|p| p.trim().parse::<f64>()).collect();
        let nums = nums.map_err(|e| format!("profile `{s}`: {e}"))?;
        if nums.iter().any(|v| !v.is_finite()) {
            return Err(format!("profile `{s}`: non-finite value"));
        }
        match (parts[0], nums.as_slice()) {
            ("zero", []) => Ok(Profile::Zero),
            ("sin", [mode, amp]) => Ok(Profile::Sin { mode: *mode, amp: *amp }),
            ("cos", [mode, amp]) => Ok(Profile::Cos { mode: *mode, amp: *amp }),
            ("bump", [center, width, amp]) if *width > 0.0 => {
                Ok(Profile::Bump { center: *center, width: *width, amp: *amp })
            }
            _ => Err(format!("unrecognised profile `{s}` (expected zero, sin:k:amp, cos:k:amp or bump:c:w:amp)")),
        }
    }
}

impl TryFrom<String> for Profile {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<Profile> for String {
    fn from(p: Profile) -> String {
        p.to_string()
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Zero => write!(f, "zero"),
            Profile::Sin { mode, amp } => write!(f, "sin:{mode}:{amp}"),
            Profile::Cos { mode, amp } => write!(f, "cos:{mode}:{amp}"),
            Profile::Bump { center, width, amp } => write!(f, "bump:{center}:{width}:{amp}"),
        }
    }
}

/// Initial data `(v⁰, v¹, φ⁰, θ⁰, θ¹, η⁰, w⁰)`; the history starts at zero.
///
/// `φ¹` and `η¹` do not appear: `u³ = η¹ + φ⁰` is fixed by the discrete
/// compatibility condition so that the initial state lies in the energy
/// space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialData {
    pub v0: Profile,
    pub v1: Profile,
    pub phi0: Profile,
    pub theta0: Profile,
    pub theta1: Profile,
    pub eta0: Profile,
    pub w0: Profile,
}

impl Default for InitialData {
    fn default() -> Self {
        Self {
            v0: Profile::Sin { mode: 1.0, amp: 1.0 },
            v1: Profile::Zero,
            phi0: Profile::Cos { mode: 1.0, amp: 0.5 },
            theta0: Profile::Sin { mode: 1.0, amp: 0.5 },
            theta1: Profile::Zero,
            eta0: Profile::Cos { mode: 2.0, amp: 0.2 },
            w0: Profile::Sin { mode: 1.0, amp: 1.0 },
        }
    }
}

impl InitialData {
    /// Samples the profiles into a first-order state:
    /// `v = v⁰`, `z = v¹`, `u¹ = θ⁰ − η⁰_x`, `u² = θ¹ + φ⁰_x`,
    /// `u³ = ξ Du² + (γ/ε₃) Dv`, `w = w⁰`, `κ = 0`.
    pub fn to_state<T: Real>(&self, gen: &GeneratorMatrix<T>) -> FirstOrderState<T> {
        let g = &gen.grid;
        let p = &gen.params;
        let n = g.n;
        let l = to_f64(g.length);
        let mut u = gen.zero_state::<T>();
        for i in 0..=n {
            let x = to_f64(g.node(i + 1));
            u.v[i] = lit(self.v0.eval(x, l));
            u.z[i] = lit(self.v1.eval(x, l));
        }
        for i in 0..n {
            let x = to_f64(g.node(i + 1));
            u.u1[i] = lit(self.theta0.eval(x, l) - self.eta0.derivative(x, l));
            u.u2[i] = lit(self.theta1.eval(x, l) + self.phi0.derivative(x, l));
        }
        let mut du2 = vec![T::zero(); n + 1];
        let mut dv = vec![T::zero(); n + 1];
        g.node_to_cell(T::zero(), &u.u2, T::zero(), &mut du2);
        g.node_to_cell(T::zero(), &u.v, u.v[n], &mut dv);
        for k in 0..=n {
            u.u3[k] = p.xi * du2[k] + p.gamma / p.eps3 * dv[k];
            u.w[k] = lit(self.w0.eval(to_f64(g.cell(k)), l));
        }
        u
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for s in ["zero", "sin:1:0.5", "cos:2:1", "bump:0.5:0.1:2"] {
            let p: Profile = s.parse().unwrap();
            assert_eq!(p.to_string().parse::<Profile>().unwrap(), p);
        }
        assert!("sin:1".parse::<Profile>().is_err());
        assert!("bump:0.5:0:1".parse::<Profile>().is_err());
        assert!("tri:1:1".parse::<Profile>().is_err());
    }

    #[test]
    fn derivatives_match_differences() {
        let h = 1e-6;
        for p in [
            Profile::Sin { mode: 2.0, amp: 0.7 },
            Profile::Cos { mode: 1.0, amp: 1.3 },
            Profile::Bump { center: 0.4, width: 0.2, amp: 1.0 },
        ] {
            for x in [0.1, 0.5, 0.77] {
                let fd = (p.eval(x + h, 2.0) - p.eval(x - h, 2.0)) / (2.0 * h);
                assert!((fd - p.derivative(x, 2.0)).abs() < 1e-7);
            }
        }
    }
}
