//! Chebyshev-route separable factorization.
//!
//! The degree-n Chebyshev interpolant of f on [0, D^2] is rewritten in the
//! power basis, `sum_l b_l z^l`, and each `|x - y|^{2l}` is expanded as
//!
//! ```text
//! |x-y|^{2l} = sum_{k<=l} sum_{j<=k} sum_{|a|=l-k}
//!              (-2)^{l-k} C(l,k) C(k,j) multinomial(l-k, a) (|x|^{2j} x^a)(|y|^{2(k-j)} y^a)
//! ```
//!
//! Every tuple (l, k, j, alpha) becomes one column of the factors G and H,
//! with the whole coefficient carried by G.

use serde::{Deserialize, Serialize};

use crate::cheb1d::{cheb_fit, monomialize, ChebApprox, EllipseChoice};
use crate::error::{Error, Result};
use crate::fourier_taylor::FtPlan;
use crate::indexcomb::{binomial, enumerate_multiindices, multinomial, rank_chebyshev, MultiIndex};
use crate::linalg::{dense_bytes, DenseMatrix, MemoryCap};
use crate::pointgen::PointCloud;
use crate::profile::{RadialProfile, Smoothness};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebTerm {
    pub l: u32,
    pub k: u32,
    pub j: u32,
    pub alpha: MultiIndex,
    pub coeff: f64,
}

impl ChebTerm {
    /// `coeff |x|^{2j} x^alpha`.
    pub fn eval_g(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.alpha.dim(), x.len())?;
        Ok(self.coeff * norm_sq(x).powi(self.j as i32) * self.alpha.monomial(x))
    }

    /// `|y|^{2(k-j)} y^alpha`.
    pub fn eval_h(&self, y: &[f64]) -> Result<f64> {
        check_dim(self.alpha.dim(), y.len())?;
        Ok(norm_sq(y).powi((self.k - self.j) as i32) * self.alpha.monomial(y))
    }
}

/// Which error bound was attached to a Chebyshev plan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChebBound {
    Analytic { rho_sq: f64, c: f64, auto: bool },
    FiniteSmooth { q: usize, v_q: f64 },
}

/// Record of an optional magnitude-based pruning pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pruning {
    pub tolerance: f64,
    pub radius: f64,
    pub dropped: usize,
    /// Sum of the per-term magnitude bounds that were dropped; add it to the
    /// error bound for a valid bound on the pruned plan.
    pub dropped_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebPlan {
    pub d: usize,
    pub n: usize,
    #[serde(rename = "D")]
    pub diameter: f64,
    pub profile: String,
    pub declared_rank: u64,
    pub error_bound: f64,
    pub bound: ChebBound,
    pub approx: ChebApprox,
    pub power_coeffs: Vec<f64>,
    pub pruning: Option<Pruning>,
    pub terms: Vec<ChebTerm>,
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::InvalidDimension(format!("point has dimension {got}, plan expects {expected}")));
    }
    Ok(())
}

fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Enumerates the tuples in plan order: l, then k, then j ascending, then
/// alpha lexicographically descending. Distinct tuples give distinct
/// products because (j, k - j, alpha) already determines l = k + |alpha|.
fn expand_terms(power_coeffs: &[f64], d: usize) -> Result<Vec<ChebTerm>> {
    let n = power_coeffs.len() - 1;
    let mut terms = Vec::new();
    for l in 0..=n as u32 {
        let b = power_coeffs[l as usize];
        for k in 0..=l {
            let alphas = enumerate_multiindices(d, l - k)?;
            let base = b * (-2.0f64).powi((l - k) as i32) * binomial(l as u64, k as u64)? as f64;
            for j in 0..=k {
                let ckj = binomial(k as u64, j as u64)? as f64;
                for alpha in &alphas {
                    let coeff = base * ckj * multinomial(l - k, alpha)? as f64;
                    if !coeff.is_finite() {
                        return Err(Error::Numerical(format!("non-finite coefficient for l={l}, k={k}, j={j}")));
                    }
                    terms.push(ChebTerm { l, k, j, alpha: alpha.clone(), coeff });
                }
            }
        }
    }
    Ok(terms)
}

pub fn build_cheb_plan(profile: &RadialProfile, n: usize, d: usize) -> Result<ChebPlan> {
    if d == 0 {
        return Err(Error::InvalidDimension("d must be positive".into()));
    }
    let approx = cheb_fit(profile, n)?;
    let power_coeffs = monomialize(&approx)?;
    let (error_bound, ellipse) = crate::cheb1d::profile_bound(profile, n)?;
    let bound = match (profile.smoothness, ellipse) {
        (Smoothness::FiniteSmooth { q, v_q }, _) => ChebBound::FiniteSmooth { q, v_q },
        (s, Some(EllipseChoice { rho_sq, c, .. })) => {
            ChebBound::Analytic { rho_sq, c, auto: matches!(s, Smoothness::AutoAnalytic) }
        }
        (_, None) => return Err(Error::Numerical("analytic profile produced no ellipse".into())),
    };
    let terms = expand_terms(&power_coeffs, d)?;
    let declared = rank_chebyshev(n as u64, d as u64)?;
    debug_assert_eq!(declared, terms.len() as u128);
    Ok(ChebPlan {
        d,
        n,
        diameter: profile.diameter,
        profile: profile.name(),
        declared_rank: u64::try_from(declared).map_err(|_| Error::Overflow("declared rank"))?,
        error_bound,
        bound,
        approx,
        power_coeffs,
        pruning: None,
        terms,
    })
}

impl ChebPlan {
    /// The interpolant evaluated directly in the Chebyshev basis.
    pub fn eval_cheb(&self, z: f64) -> Result<f64> {
        self.approx.eval(z)
    }

    /// Drops terms whose magnitude bound `|coeff| r^{2k + 2|alpha|}` over the
    /// ball of radius `radius` falls below `tolerance`.
    pub fn prune(&mut self, tolerance: f64, radius: f64) -> Result<()> {
        if !(tolerance >= 0.0) || !(radius >= 0.0) {
            return Err(Error::Contract("pruning tolerance and radius must be non-negative".into()));
        }
        let before = self.terms.len();
        let mut mass = 0.0;
        self.terms.retain(|t| {
            let m = t.coeff.abs() * radius.powi(2 * (t.k + t.alpha.order()) as i32);
            let keep = m >= tolerance;
            if !keep {
                mass += m;
            }
            keep
        });
        let prev = self.pruning.map_or((0, 0.0), |p| (p.dropped, p.dropped_mass));
        self.pruning = Some(Pruning {
            tolerance,
            radius,
            dropped: prev.0 + before - self.terms.len(),
            dropped_mass: prev.1 + mass,
        });
        Ok(())
    }

    fn fill_g(&self, x: &[f64], out: &mut [f64]) {
        let r2 = norm_sq(x);
        for (o, t) in out.iter_mut().zip(&self.terms) {
            *o = t.coeff * r2.powi(t.j as i32) * t.alpha.monomial(x);
        }
    }

    fn fill_h(&self, y: &[f64], out: &mut [f64]) {
        let r2 = norm_sq(y);
        for (o, t) in out.iter_mut().zip(&self.terms) {
            *o = r2.powi((t.k - t.j) as i32) * t.alpha.monomial(y);
        }
    }
}

/// A separable expansion from either construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "construction", rename_all = "snake_case")]
pub enum SeparablePlan {
    Chebyshev(ChebPlan),
    FourierTaylor(FtPlan),
}

impl SeparablePlan {
    pub fn d(&self) -> usize {
        match self {
            SeparablePlan::Chebyshev(p) => p.d,
            SeparablePlan::FourierTaylor(p) => p.d,
        }
    }

    /// Closed-form term count of the construction.
    pub fn declared_rank(&self) -> u64 {
        match self {
            SeparablePlan::Chebyshev(p) => p.declared_rank,
            SeparablePlan::FourierTaylor(p) => p.declared_rank,
        }
    }

    /// Number of real columns actually produced by [`factor_matrices`].
    pub fn retained_rank(&self) -> usize {
        match self {
            SeparablePlan::Chebyshev(p) => p.terms.len(),
            SeparablePlan::FourierTaylor(p) => p.retained_rank(),
        }
    }

    /// Attached error bound, or `None` for heuristic plans.
    pub fn error_bound(&self) -> Option<f64> {
        match self {
            SeparablePlan::Chebyshev(p) => {
                Some(p.error_bound + p.pruning.map_or(0.0, |pr| pr.dropped_mass))
            }
            SeparablePlan::FourierTaylor(p) => p.bound.map(|b| b.total),
        }
    }

    pub fn construction(&self) -> &'static str {
        match self {
            SeparablePlan::Chebyshev(_) => "chebyshev",
            SeparablePlan::FourierTaylor(_) => "fourier_taylor",
        }
    }

    pub fn fill_g(&self, x: &[f64], out: &mut [f64]) {
        match self {
            SeparablePlan::Chebyshev(p) => p.fill_g(x, out),
            SeparablePlan::FourierTaylor(p) => p.fill_g(x, out),
        }
    }

    pub fn fill_h(&self, y: &[f64], out: &mut [f64]) {
        match self {
            SeparablePlan::Chebyshev(p) => p.fill_h(y, out),
            SeparablePlan::FourierTaylor(p) => p.fill_h(y, out),
        }
    }

    /// `sum_r g_r(x) h_r(y)`.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        check_dim(self.d(), x.len())?;
        check_dim(self.d(), y.len())?;
        let r = self.retained_rank();
        let (mut g, mut h) = (vec![0.0; r], vec![0.0; r]);
        self.fill_g(x, &mut g);
        self.fill_h(y, &mut h);
        Ok(g.iter().zip(&h).map(|(a, b)| a * b).sum())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

pub fn eval_separable(plan: &SeparablePlan, x: &[f64], y: &[f64]) -> Result<f64> {
    plan.eval(x, y)
}

/// Factor matrices with `G[i, r] = g_r(x_i)` and `H[i, r] = h_r(y_i)`.
pub fn factor_matrices(
    plan: &SeparablePlan,
    x: &PointCloud,
    y: &PointCloud,
    cap: MemoryCap,
) -> Result<(DenseMatrix, DenseMatrix)> {
    check_dim(plan.d(), x.dim())?;
    check_dim(plan.d(), y.dim())?;
    let r = plan.retained_rank();
    cap.check("factor matrices G and H", dense_bytes(x.len() + y.len(), r))?;
    let g = DenseMatrix::par_from_rows(x.len(), r, |i, row| plan.fill_g(x.point(i), row));
    let h = DenseMatrix::par_from_rows(y.len(), r, |i, row| plan.fill_h(y.point(i), row));
    Ok((g, h))
}
