//! Radial profiles f with K(x, y) = f(|x - y|^2).

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A scalar function of the squared distance.
///
/// Implementations must be safe to evaluate from several threads at once.
pub trait ProfileFn: Send + Sync {
    fn eval(&self, u: f64) -> f64;

    /// Analytic continuation, if the profile has one. Needed for ellipse
    /// bound estimation only.
    fn eval_complex(&self, _u: Complex64) -> Option<Complex64> {
        None
    }

    /// Open real interval on which `eval` is finite and smooth.
    fn real_domain(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }

    fn name(&self) -> String;
}

/// `exp(-u / h^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian {
    pub h: f64,
}

impl ProfileFn for Gaussian {
    fn eval(&self, u: f64) -> f64 {
        (-u / (self.h * self.h)).exp()
    }
    fn eval_complex(&self, u: Complex64) -> Option<Complex64> {
        Some((-u / (self.h * self.h)).exp())
    }
    fn name(&self) -> String {
        "gaussian".into()
    }
}

/// `1 / (1 + u / h^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cauchy {
    pub h: f64,
}

impl ProfileFn for Cauchy {
    fn eval(&self, u: f64) -> f64 {
        1.0 / (1.0 + u / (self.h * self.h))
    }
    fn eval_complex(&self, u: Complex64) -> Option<Complex64> {
        let den = Complex64::new(1.0, 0.0) + u / (self.h * self.h);
        Some(den.inv())
    }
    fn real_domain(&self) -> (f64, f64) {
        (-self.h * self.h, f64::INFINITY)
    }
    fn name(&self) -> String {
        "cauchy".into()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant(pub f64);

impl ProfileFn for Constant {
    fn eval(&self, _u: f64) -> f64 {
        self.0
    }
    fn eval_complex(&self, _u: Complex64) -> Option<Complex64> {
        Some(Complex64::new(self.0, 0.0))
    }
    fn name(&self) -> String {
        "constant".into()
    }
}

/// Wraps a real closure and an optional complex continuation.
pub struct ClosureProfile<F, G = fn(Complex64) -> Complex64> {
    name: String,
    real: F,
    complex: Option<G>,
}

impl<F> ClosureProfile<F>
where
    F: Fn(f64) -> f64 + Send + Sync,
{
    pub fn real(name: impl Into<String>, real: F) -> Self {
        ClosureProfile { name: name.into(), real, complex: None }
    }
}

impl<F, G> ClosureProfile<F, G>
where
    F: Fn(f64) -> f64 + Send + Sync,
    G: Fn(Complex64) -> Complex64 + Send + Sync,
{
    pub fn analytic(name: impl Into<String>, real: F, complex: G) -> Self {
        ClosureProfile { name: name.into(), real, complex: Some(complex) }
    }
}

impl<F, G> ProfileFn for ClosureProfile<F, G>
where
    F: Fn(f64) -> f64 + Send + Sync,
    G: Fn(Complex64) -> Complex64 + Send + Sync,
{
    fn eval(&self, u: f64) -> f64 {
        (self.real)(u)
    }
    fn eval_complex(&self, u: Complex64) -> Option<Complex64> {
        self.complex.as_ref().map(|g| g(u))
    }
    fn name(&self) -> String {
        self.name.clone()
    }
}

/// Smoothness data that selects which error bound applies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Smoothness {
    /// Analytic inside the transformed Bernstein ellipse with parameter
    /// `rho_sq`, bounded there by `c`.
    Analytic { rho_sq: f64, c: f64 },
    /// Analytic everywhere; the ellipse is chosen per order by grid search.
    AutoAnalytic,
    /// q-th derivative of bounded variation `v_q` on [0, D^2].
    FiniteSmooth { q: usize, v_q: f64 },
}

/// Built-in named kernel families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Gaussian,
    Cauchy,
}

impl Family {
    pub fn with_bandwidth(self, h: f64) -> Arc<dyn ProfileFn> {
        match self {
            Family::Gaussian => Arc::new(Gaussian { h }),
            Family::Cauchy => Arc::new(Cauchy { h }),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Family::Gaussian),
            "cauchy" => Ok(Family::Cauchy),
            other => Err(Error::Contract(format!("unknown profile `{other}`"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Gaussian => "gaussian",
            Family::Cauchy => "cauchy",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A profile together with its domain bound D (so that |x - y|^2 <= D^2)
/// and the smoothness data used for error bounds.
#[derive(Clone)]
pub struct RadialProfile {
    pub f: Arc<dyn ProfileFn>,
    pub diameter: f64,
    pub smoothness: Smoothness,
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProfile")
            .field("f", &self.f.name())
            .field("diameter", &self.diameter)
            .field("smoothness", &self.smoothness)
            .finish()
    }
}

impl RadialProfile {
    pub fn new(f: Arc<dyn ProfileFn>, diameter: f64, smoothness: Smoothness) -> Result<Self> {
        if !(diameter > 0.0 && diameter.is_finite()) {
            return Err(Error::Contract(format!("domain diameter must be positive, got {diameter}")));
        }
        match smoothness {
            Smoothness::Analytic { rho_sq, c } => {
                if !(rho_sq > 1.0) {
                    return Err(Error::InvalidEllipse(rho_sq));
                }
                if !(c > 0.0) {
                    return Err(Error::Contract(format!("ellipse bound C must be positive, got {c}")));
                }
            }
            Smoothness::FiniteSmooth { q, v_q } => {
                if q == 0 || !(v_q >= 0.0) {
                    return Err(Error::Contract(format!("need q >= 1 and V_q >= 0, got q={q}, V_q={v_q}")));
                }
            }
            Smoothness::AutoAnalytic => {
                if f.eval_complex(num_complex::Complex64::new(0.0, 0.0)).is_none() {
                    return Err(Error::Contract(format!(
                        "profile `{}` has no complex continuation for automatic ellipse selection",
                        f.name()
                    )));
                }
            }
        }
        Ok(RadialProfile { f, diameter, smoothness })
    }

    /// The interval [0, D^2] of squared distances.
    pub fn interval(&self) -> (f64, f64) {
        (0.0, self.diameter * self.diameter)
    }

    pub fn name(&self) -> String {
        self.f.name()
    }
}
