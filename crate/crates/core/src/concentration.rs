//! Distance concentration for i.i.d. coordinates and the probabilistic
//! error bounds built on it.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pointgen::PointCloud;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationParams {
    #[serde(rename = "D")]
    pub diameter: f64,
    /// `E_d^2 = sum_i E[(x_i - y_i)^2]`.
    pub e_d_sq: f64,
    /// `sigma_d^2 = sum_i Var[(x_i - y_i)^2]`.
    pub sigma_d_sq: f64,
    pub d: usize,
}

impl ConcentrationParams {
    pub fn e_d(&self) -> f64 {
        self.e_d_sq.sqrt()
    }
}

/// Closed-form parameters for coordinates i.i.d. uniform on an interval of
/// length `side`: `E[(x-y)^2] = side^2/6`, `Var[(x-y)^2] = 7 side^4/180`.
pub fn uniform_params(d: usize, side: f64) -> ConcentrationParams {
    let s2 = side * side;
    ConcentrationParams {
        diameter: side * (d as f64).sqrt(),
        e_d_sq: d as f64 * s2 / 6.0,
        sigma_d_sq: d as f64 * 7.0 * s2 * s2 / 180.0,
        d,
    }
}

fn check_pairs(x: &PointCloud, y: &PointCloud) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::InvalidDimension(format!("paired clouds have dimensions {} and {}", x.dim(), y.dim())));
    }
    if x.len() != y.len() {
        return Err(Error::Contract(format!("paired clouds have {} and {} points", x.len(), y.len())));
    }
    Ok(())
}

/// Unbiased sample moments of the coordinatewise squared gaps of paired
/// points `(x_i, y_i)`.
pub fn params_from_samples(x: &PointCloud, y: &PointCloud, diameter: f64) -> Result<ConcentrationParams> {
    check_pairs(x, y)?;
    let (n, d) = (x.len(), x.dim());
    if n < 2 {
        return Err(Error::InsufficientData(format!("need at least 2 sample pairs, got {n}")));
    }
    let mut e_d_sq = 0.0;
    let mut sigma_d_sq = 0.0;
    for k in 0..d {
        let gaps: Vec<f64> = (0..n)
            .map(|i| {
                let g = x.point(i)[k] - y.point(i)[k];
                g * g
            })
            .collect();
        let mean = gaps.iter().sum::<f64>() / n as f64;
        let var = gaps.iter().map(|g| (g - mean) * (g - mean)).sum::<f64>() / (n - 1) as f64;
        e_d_sq += mean;
        sigma_d_sq += var;
    }
    Ok(ConcentrationParams { diameter, e_d_sq, sigma_d_sq, d })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probability {
    pub value: f64,
    /// True when `value <= 0`, i.e. the inequality says nothing.
    pub vacuous: bool,
}

/// `1 - 2 exp(-delta^4 d / (2 sigma_d^2 d + 8 D^2 delta^2 / 3))`, returned
/// unclamped.
pub fn bernstein_probability(delta: f64, params: &ConcentrationParams) -> Result<Probability> {
    let dia = params.diameter;
    if !(delta > 0.0 && delta < dia) {
        return Err(Error::Domain { value: delta, lo: 0.0, hi: dia });
    }
    let d = params.d as f64;
    let expo = delta.powi(4) * d / (2.0 * params.sigma_d_sq * d + 8.0 * dia * dia * delta * delta / 3.0);
    let value = 1.0 - 2.0 * (-expo).exp();
    Ok(Probability { value, vacuous: value <= 0.0 })
}

/// The root t > 1 of `t - 1/t = c` with `c = (D^2/delta^2)(rho~^2 - rho~^{-2})`.
pub fn rho_delta(rho_tilde_sq: f64, diameter: f64, delta: f64) -> Result<f64> {
    if !(rho_tilde_sq > 1.0) {
        return Err(Error::InvalidEllipse(rho_tilde_sq));
    }
    if !(delta > 0.0 && delta <= diameter) {
        return Err(Error::Domain { value: delta, lo: 0.0, hi: diameter });
    }
    if delta == diameter {
        return Ok(rho_tilde_sq);
    }
    let c = (diameter * diameter) / (delta * delta) * (rho_tilde_sq - 1.0 / rho_tilde_sq);
    Ok(c / 2.0 + (c * c / 4.0 + 1.0).sqrt())
}

/// `2 C delta^2 / (c' - delta^2) (c'/delta^2)^{-n}` with
/// `c' = D^2 (rho~^2 - rho~^{-2})`.
pub fn prob_bound_analytic(c_d: f64, diameter: f64, delta: f64, rho_tilde_sq: f64, n: usize) -> Result<f64> {
    if !(rho_tilde_sq > 1.0) {
        return Err(Error::InvalidEllipse(rho_tilde_sq));
    }
    let cp = diameter * diameter * (rho_tilde_sq - 1.0 / rho_tilde_sq);
    let d2 = delta * delta;
    if !(cp > d2) {
        return Err(Error::Constraint(format!(
            "delta = {delta} too large for this ellipse: need D^2 (rho^2 - rho^-2) = {cp} > delta^2"
        )));
    }
    Ok(2.0 * c_d * d2 / (cp - d2) * (cp / d2).powi(-(n as i32)))
}

/// `2 V_q delta^{2q} / (pi q [2(n - q)]^q)`.
pub fn prob_bound_finite(v_q: f64, delta: f64, q: usize, n: usize) -> Result<f64> {
    if n <= q {
        return Err(Error::OrderTooLow { n, q });
    }
    let qf = q as f64;
    Ok(2.0 * v_q * delta.powi(2 * q as i32) / (PI * qf * (2.0 * (n - q) as f64).powi(q as i32)))
}

/// Fraction of pairs with `| |x_i - y_i|^2 - E_d^2 | <= delta^2`.
pub fn empirical_concentration(x: &PointCloud, y: &PointCloud, delta: f64, params: &ConcentrationParams) -> Result<f64> {
    check_pairs(x, y)?;
    if x.is_empty() {
        return Err(Error::InsufficientData("no sample pairs".into()));
    }
    let d2 = delta * delta;
    let hits = (0..x.len())
        .filter(|&i| {
            let z: f64 = x.point(i).iter().zip(y.point(i)).map(|(a, b)| (a - b) * (a - b)).sum();
            (z - params.e_d_sq).abs() <= d2
        })
        .count();
    Ok(hits as f64 / x.len() as f64)
}

/// Three binomial standard errors of a proportion `p` over `n` trials.
pub fn binomial_slack(p: f64, n: usize) -> f64 {
    let p = p.clamp(0.0, 1.0);
    3.0 * (p * (1.0 - p) / n as f64).sqrt()
}
