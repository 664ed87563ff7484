//! One-dimensional Chebyshev approximation of a radial profile on [0, D^2]
//! and the closed-form truncation error bounds.
//!
//! The interval [lo, hi] is mapped affinely onto the reference interval
//! [-1, 1]. Coefficients are those of the interpolant at the n+1 Chebyshev
//! points of the second kind; its error is at most twice the truncation
//! bound, and every empirical bound check in this crate carries that factor.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{ProfileFn, RadialProfile};

/// Largest order accepted by [`monomialize`]. The Chebyshev to power basis
/// change amplifies rounding roughly like 3^n.
pub const MONOMIAL_CAP: usize = 30;

const DOMAIN_SLACK: f64 = 1e-12;

/// Truncated Chebyshev series `sum a_k T_k(t)` with `t` the image of
/// `u in [lo, hi]` in [-1, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebApprox {
    pub coeffs: Vec<f64>,
    pub lo: f64,
    pub hi: f64,
}

impl ChebApprox {
    pub fn new(coeffs: Vec<f64>, lo: f64, hi: f64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Contract("a Chebyshev series needs at least one coefficient".into()));
        }
        if !(hi > lo) {
            return Err(Error::Contract(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(ChebApprox { coeffs, lo, hi })
    }

    /// Truncation order n (coefficient count minus one).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn to_reference(&self, u: f64) -> f64 {
        (2.0 * u - (self.lo + self.hi)) / (self.hi - self.lo)
    }

    /// Clenshaw evaluation at `u`, rejecting points outside the interval.
    pub fn eval(&self, u: f64) -> Result<f64> {
        let slack = DOMAIN_SLACK * (self.hi - self.lo).max(self.lo.abs()).max(self.hi.abs());
        if !(u >= self.lo - slack && u <= self.hi + slack) {
            return Err(Error::Domain { value: u, lo: self.lo, hi: self.hi });
        }
        Ok(clenshaw(&self.coeffs, self.to_reference(u).clamp(-1.0, 1.0)))
    }
}

/// Evaluates `sum c_k T_k(t)` by the Clenshaw recurrence.
pub fn clenshaw(coeffs: &[f64], t: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = c + 2.0 * t * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    coeffs[0] + t * b1 - b2
}

/// Degree-n interpolant of `profile.f` on [0, D^2].
pub fn cheb_fit(profile: &RadialProfile, n: usize) -> Result<ChebApprox> {
    let (lo, hi) = profile.interval();
    cheb_fit_fn(profile.f.as_ref(), lo, hi, n)
}

/// Degree-n interpolant of `f` on [lo, hi] through the Chebyshev points
/// `cos(pi j / n)`; coefficients by the type-I cosine transform.
pub fn cheb_fit_fn(f: &dyn ProfileFn, lo: f64, hi: f64, n: usize) -> Result<ChebApprox> {
    if !(hi > lo) {
        return Err(Error::Contract(format!("empty interval [{lo}, {hi}]")));
    }
    let from_ref = |t: f64| lo + 0.5 * (t + 1.0) * (hi - lo);
    let sample = |u: f64| {
        let v = f.eval(u);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation { at: u })
        }
    };
    if n == 0 {
        let mid = 0.5 * (lo + hi);
        return ChebApprox::new(vec![sample(mid)?], lo, hi);
    }
    let values: Vec<f64> = (0..=n)
        .map(|j| {
            // Endpoints are placed exactly so that f(lo) and f(hi) are sampled.
            let u = match j {
                0 => hi,
                j if j == n => lo,
                _ => from_ref((PI * j as f64 / n as f64).cos()),
            };
            sample(u)
        })
        .collect::<Result<_>>()?;
    let nf = n as f64;
    let mut coeffs = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut s = 0.0;
        for (j, &v) in values.iter().enumerate() {
            let w = if j == 0 || j == n { 0.5 } else { 1.0 };
            // cos(pi j k / n) with the angle reduced modulo 2n for accuracy.
            let m = (j * k) % (2 * n);
            s += w * v * (PI * m as f64 / nf).cos();
        }
        let mut a = 2.0 * s / nf;
        if k == 0 || k == n {
            a *= 0.5;
        }
        coeffs.push(a);
    }
    ChebApprox::new(coeffs, lo, hi)
}

/// Power-basis coefficients `b_0..b_n` of the series as a polynomial in `u`
/// itself, i.e. `sum b_k u^k = sum a_k T_k(2u/(hi-lo) - (hi+lo)/(hi-lo))`.
pub fn monomialize(approx: &ChebApprox) -> Result<Vec<f64>> {
    let n = approx.order();
    if n > MONOMIAL_CAP {
        return Err(Error::Conditioning { n, cap: MONOMIAL_CAP });
    }
    let scale = 2.0 / (approx.hi - approx.lo);
    let shift = -(approx.hi + approx.lo) / (approx.hi - approx.lo);
    // P_k(u) = T_k(scale u + shift) via the three-term recurrence.
    let mut out = vec![0.0; n + 1];
    let mut prev = vec![1.0];
    out[0] += approx.coeffs[0];
    if n == 0 {
        return Ok(out);
    }
    let mut cur = vec![shift, scale];
    for (i, c) in cur.iter().enumerate() {
        out[i] += approx.coeffs[1] * c;
    }
    for k in 2..=n {
        let mut next = vec![0.0; k + 1];
        for (i, &c) in cur.iter().enumerate() {
            next[i] += 2.0 * shift * c;
            next[i + 1] += 2.0 * scale * c;
        }
        for (i, &c) in prev.iter().enumerate() {
            next[i] -= c;
        }
        for (i, &c) in next.iter().enumerate() {
            out[i] += approx.coeffs[k] * c;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(out)
}

/// Horner evaluation of a power series.
pub fn eval_power(b: &[f64], u: f64) -> f64 {
    b.iter().rev().fold(0.0, |acc, &c| acc * u + c)
}

/// `2 C rho_sq^{-n} / (rho_sq - 1)`.
pub fn bound_analytic(rho_sq: f64, c: f64, n: usize) -> Result<f64> {
    if !(rho_sq > 1.0) {
        return Err(Error::InvalidEllipse(rho_sq));
    }
    Ok(2.0 * c * rho_sq.powi(-(n as i32)) / (rho_sq - 1.0))
}

/// `2 V_q D^{2q} / (pi q [2(n - q)]^q)` for n > q.
pub fn bound_finite_smooth(v_q: f64, diameter: f64, q: usize, n: usize) -> Result<f64> {
    if n <= q {
        return Err(Error::OrderTooLow { n, q });
    }
    let qf = q as f64;
    Ok(2.0 * v_q * diameter.powi(2 * q as i32) / (PI * qf * (2.0 * (n - q) as f64).powi(q as i32)))
}

/// Boundary point of the transformed Bernstein ellipse with parameter
/// `rho_sq` (the ellipse `(rho_sq e^{i theta} + rho_sq^{-1} e^{-i theta})/2`
/// in reference coordinates) mapped to [lo, hi].
pub fn ellipse_point(lo: f64, hi: f64, rho_sq: f64, theta: f64) -> Complex64 {
    let e = Complex64::from_polar(1.0, theta);
    let z = 0.5 * (rho_sq * e + e.inv() / rho_sq);
    lo + 0.5 * (z + 1.0) * (hi - lo)
}

/// Largest |f| over `samples` equispaced points on the ellipse boundary.
///
/// By the maximum principle this approximates the supremum over the closed
/// ellipse from below. It is an estimate, not a certificate.
///
/// A singularity strictly inside the ellipse leaves the boundary values
/// finite, so two interior checks run as well: the real span of the ellipse
/// must lie in the profile's real domain, and the Cauchy integral over the
/// boundary must reproduce f at the interval midpoint and endpoints.
pub fn estimate_ellipse_bound(
    f: &dyn ProfileFn,
    interval: (f64, f64),
    rho_sq: f64,
    samples: usize,
) -> Result<f64> {
    if !(rho_sq > 1.0) {
        return Err(Error::InvalidEllipse(rho_sq));
    }
    if samples == 0 {
        return Err(Error::Contract("ellipse sampling needs at least one point".into()));
    }
    let (lo, hi) = interval;
    let semi_major = 0.5 * (rho_sq + 1.0 / rho_sq);
    let (span_lo, span_hi) = (
        lo + 0.5 * (1.0 - semi_major) * (hi - lo),
        lo + 0.5 * (1.0 + semi_major) * (hi - lo),
    );
    let (dom_lo, dom_hi) = f.real_domain();
    if span_lo <= dom_lo || span_hi >= dom_hi {
        return Err(Error::SingularityInsideEllipse { rho_sq });
    }

    let eval = |w: Complex64| {
        f.eval_complex(w)
            .ok_or_else(|| Error::Contract(format!("profile `{}` has no complex continuation", f.name())))
    };
    let mut best: f64 = 0.0;
    let mut boundary = Vec::with_capacity(samples);
    for s in 0..samples {
        let theta = 2.0 * PI * s as f64 / samples as f64;
        let w = ellipse_point(lo, hi, rho_sq, theta);
        let v = eval(w)?;
        let m = v.norm();
        if !m.is_finite() {
            return Err(Error::SingularityInsideEllipse { rho_sq });
        }
        best = best.max(m);
        boundary.push((theta, w, v));
    }

    if samples >= 16 {
        let half_width = 0.5 * (hi - lo);
        for z0 in [lo, 0.5 * (lo + hi), hi] {
            // (1 / 2 pi i) \oint f(w) / (w - z0) dw by the periodic trapezoid rule.
            let mut acc = Complex64::new(0.0, 0.0);
            for &(theta, w, v) in &boundary {
                let e = Complex64::from_polar(1.0, theta);
                let dz = Complex64::i() * 0.5 * (rho_sq * e - e.inv() / rho_sq);
                acc += v / (w - z0) * dz * half_width;
            }
            let integral = acc / (samples as f64 * Complex64::i());
            let direct = eval(Complex64::new(z0, 0.0))?;
            if !((integral - direct).norm() <= 1e-6 * best.max(f64::MIN_POSITIVE)) {
                return Err(Error::SingularityInsideEllipse { rho_sq });
            }
        }
    }
    Ok(best)
}

/// Result of the automatic ellipse search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseChoice {
    pub rho_sq: f64,
    pub c: f64,
    pub bound: f64,
}

/// Grid bounds and resolution of [`auto_ellipse`].
pub const AUTO_RHO_MIN: f64 = 1.0 + 1e-3;
pub const AUTO_RHO_MAX: f64 = 1e4;
pub const AUTO_RHO_GRID: usize = 400;
pub const ELLIPSE_SAMPLES: usize = 512;

/// Minimises `bound_analytic(rho_sq, C_est(rho_sq), n)` over a logarithmic
/// grid of `rho_sq`. Grid points whose ellipse meets a singularity are
/// skipped.
pub fn auto_ellipse(f: &dyn ProfileFn, interval: (f64, f64), n: usize) -> Result<EllipseChoice> {
    let (a, b) = (AUTO_RHO_MIN.ln(), AUTO_RHO_MAX.ln());
    let mut best: Option<EllipseChoice> = None;
    for i in 0..AUTO_RHO_GRID {
        let rho_sq = (a + (b - a) * i as f64 / (AUTO_RHO_GRID - 1) as f64).exp();
        let c = match estimate_ellipse_bound(f, interval, rho_sq, ELLIPSE_SAMPLES) {
            Ok(c) => c,
            Err(Error::SingularityInsideEllipse { .. }) => continue,
            Err(e) => return Err(e),
        };
        let bound = bound_analytic(rho_sq, c, n)?;
        if bound.is_finite() && best.is_none_or(|b| bound < b.bound) {
            best = Some(EllipseChoice { rho_sq, c, bound });
        }
    }
    best.ok_or_else(|| Error::Numerical("no admissible Bernstein ellipse on the search grid".into()))
}

/// Error bound of the degree-n approximation of `profile`, chosen by its
/// smoothness case. Returns the bound and, for analytic profiles, the
/// ellipse it came from.
pub fn profile_bound(profile: &RadialProfile, n: usize) -> Result<(f64, Option<EllipseChoice>)> {
    use crate::profile::Smoothness::*;
    match profile.smoothness {
        Analytic { rho_sq, c } => {
            let bound = bound_analytic(rho_sq, c, n)?;
            Ok((bound, Some(EllipseChoice { rho_sq, c, bound })))
        }
        AutoAnalytic => {
            let choice = auto_ellipse(profile.f.as_ref(), profile.interval(), n)?;
            Ok((choice.bound, Some(choice)))
        }
        FiniteSmooth { q, v_q } => Ok((bound_finite_smooth(v_q, profile.diameter, q, n)?, None)),
    }
}
