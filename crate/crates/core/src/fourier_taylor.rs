//! Fourier-Taylor separable factorization.
//!
//! The profile is windowed and extended to a 4D^2-periodic function f_p,
//! expanded in Fourier modes `a_j exp(i w j z)`, and in each mode the cross
//! factor `exp(-2 i w j rho_x . rho_y)` is Taylor-expanded. Modes j and -j
//! are complex conjugates of each other and are folded into two real
//! columns each.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indexcomb::{binomial, enumerate_graded, multinomial, rank_fourier_taylor, MultiIndex};
use crate::profile::{RadialProfile, Smoothness};

pub const DEFAULT_WINDOW_ORDER: usize = 7;

/// Order-`s` smoothstep `S_s(t)` on [0, 1]: 0 at 0, 1 at 1, with `s`
/// vanishing derivatives at both ends.
pub fn smoothstep(s: usize, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    if t > 0.5 {
        return 1.0 - smoothstep(s, 1.0 - t);
    }
    let s64 = s as u64;
    let mut sum = 0.0;
    for k in 0..=s64 {
        let w = binomial(s64 + k, k).unwrap() as f64 * binomial(2 * s64 + 1, s64 - k).unwrap() as f64;
        sum += w * (-t).powi(k as i32);
    }
    t.powi(s as i32 + 1) * sum
}

/// Windowed 4D^2-periodic extension of a profile.
#[derive(Debug, Clone)]
pub struct PeriodizedProfile {
    pub base: RadialProfile,
    pub window_order: usize,
}

pub fn periodize(base: &RadialProfile, window_order: usize) -> Result<PeriodizedProfile> {
    if window_order == 0 {
        return Err(Error::Contract("window order must be positive".into()));
    }
    if let Smoothness::FiniteSmooth { q, .. } = base.smoothness {
        if window_order < q + 1 {
            return Err(Error::Constraint(format!(
                "window order {window_order} would degrade a profile of smoothness q = {q}; need at least {}",
                q + 1
            )));
        }
    }
    let d2 = base.diameter * base.diameter;
    let (lo, hi) = base.f.real_domain();
    if !(lo < -2.0 * d2 && hi > 2.0 * d2) {
        return Err(Error::Constraint(format!(
            "profile `{}` must be finite on [-2D^2, 2D^2] = [{}, {}] for periodization, its real domain is ({lo}, {hi})",
            base.name(),
            -2.0 * d2,
            2.0 * d2
        )));
    }
    Ok(PeriodizedProfile { base: base.clone(), window_order })
}

impl PeriodizedProfile {
    pub fn d2(&self) -> f64 {
        self.base.diameter * self.base.diameter
    }

    pub fn period(&self) -> f64 {
        4.0 * self.d2()
    }

    pub fn omega(&self) -> f64 {
        2.0 * PI / self.period()
    }

    /// Cutoff T: 1 on [-D^2, D^2], 0 outside (-2D^2, 2D^2).
    pub fn window(&self, z: f64) -> f64 {
        let d2 = self.d2();
        1.0 - smoothstep(self.window_order, (z.abs() - d2) / d2)
    }

    pub fn eval(&self, z: f64) -> f64 {
        let p = self.period();
        let r = z - p * (z / p).round();
        let w = self.window(r);
        if w == 0.0 {
            0.0
        } else if w == 1.0 {
            self.base.f.eval(r)
        } else {
            w * self.base.f.eval(r)
        }
    }

    /// `max |f_p|` over one period, sampled on `grid` points.
    pub fn sup_norm(&self, grid: usize) -> f64 {
        let (a, p) = (-2.0 * self.d2(), self.period());
        (0..=grid).map(|i| self.eval(a + p * i as f64 / grid as f64).abs()).fold(0.0, f64::max)
    }

    /// Total variation over one period of the q-th derivative, estimated by
    /// central differences on `grid` points. A diagnostic, not a certificate.
    pub fn total_variation(&self, q: usize, grid: usize) -> f64 {
        let (a, p) = (-2.0 * self.d2(), self.period());
        let step = self.d2() / 32.0;
        let weights: Vec<f64> = (0..=q)
            .map(|i| {
                let c = binomial(q as u64, i as u64).unwrap() as f64;
                if i % 2 == 0 {
                    c
                } else {
                    -c
                }
            })
            .collect();
        let deriv = |z: f64| {
            let s: f64 = weights
                .iter()
                .enumerate()
                .map(|(i, w)| w * self.eval(z + (q as f64 / 2.0 - i as f64) * step))
                .sum();
            s / step.powi(q as i32)
        };
        let vals: Vec<f64> = (0..grid).map(|i| deriv(a + p * i as f64 / grid as f64)).collect();
        (0..grid).map(|i| (vals[(i + 1) % grid] - vals[i]).abs()).sum()
    }
}

pub fn default_quad_points(m_f: usize) -> usize {
    16 * m_f + 64
}

/// Trapezoid-rule Fourier coefficients `a_{-M_f}..a_{M_f}` of f_p over one
/// period, made exactly Hermitian.
pub fn fourier_coeffs(pp: &PeriodizedProfile, m_f: usize, quad_points: usize) -> Result<Vec<Complex64>> {
    fourier_coeffs_fn(|z| pp.eval(z), pp.d2(), m_f, quad_points)
}

/// As [`fourier_coeffs`], for any function sampled on [-2D^2, 2D^2).
pub fn fourier_coeffs_fn(f: impl Fn(f64) -> f64, d2: f64, m_f: usize, quad_points: usize) -> Result<Vec<Complex64>> {
    if quad_points < 8 * m_f.max(1) {
        return Err(Error::Constraint(format!(
            "{quad_points} quadrature points undersample {m_f} Fourier modes (need at least {})",
            8 * m_f.max(1)
        )));
    }
    let period = 4.0 * d2;
    let omega = 2.0 * PI / period;
    let samples: Vec<(f64, f64)> = (0..quad_points)
        .map(|m| {
            let z = -2.0 * d2 + period * m as f64 / quad_points as f64;
            (z, f(z))
        })
        .collect();
    if let Some(&(z, _)) = samples.iter().find(|(_, v)| !v.is_finite()) {
        return Err(Error::Evaluation { at: z });
    }
    let raw = |j: i64| -> Complex64 {
        let s: Complex64 = samples.iter().map(|&(z, v)| v * Complex64::from_polar(1.0, -omega * j as f64 * z)).sum();
        s / quad_points as f64
    };
    let mf = m_f as i64;
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * m_f + 1];
    for j in 0..=mf {
        let (p, m) = (raw(j), raw(-j));
        let a = 0.5 * (p + m.conj());
        let a = if j == 0 { Complex64::new(a.re, 0.0) } else { a };
        out[(mf + j) as usize] = a;
        out[(mf - j) as usize] = a.conj();
    }
    Ok(out)
}

/// The two parts of the Fourier-Taylor error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FtBound {
    pub taylor: f64,
    pub fourier: f64,
    pub total: f64,
    pub q: usize,
    pub v_q: f64,
    pub norm_f_inf: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn ft_error_bound(
    norm_f_inf: f64,
    d_x: f64,
    d_y: f64,
    diameter: f64,
    m_t: usize,
    v_q: f64,
    q: usize,
    m_f: usize,
) -> Result<FtBound> {
    if !(d_x >= 0.0 && d_y >= 0.0 && d_x <= diameter && d_y <= diameter) {
        return Err(Error::Constraint(format!(
            "box radii D_x = {d_x}, D_y = {d_y} must lie in [0, D] with D = {diameter}"
        )));
    }
    if 9 * m_f > m_t {
        return Err(Error::Constraint(format!("need 9 M_f <= M_t, got M_f = {m_f}, M_t = {m_t}")));
    }
    if q == 0 || m_f == 0 {
        return Err(Error::Contract("q and M_f must be positive".into()));
    }
    let d2 = diameter * diameter;
    let taylor = norm_f_inf * (d_x * d_y / d2).powi(m_t as i32 + 1);
    let fourier = v_q / (PI * q as f64) * (2.0 * d2 / (PI * m_f as f64)).powi(q as i32);
    Ok(FtBound { taylor, fourier, total: taylor + fourier, q, v_q, norm_f_inf })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FtComplexTerm {
    pub j: i64,
    pub alpha: MultiIndex,
    /// `a_j (-2 i j w)^k / k! multinomial(k, alpha)` with k = |alpha|.
    pub coeff: Complex64,
}

/// Options for [`build_ft_plan`].
#[derive(Debug, Clone, PartialEq)]
pub struct FtOptions {
    pub m_f: usize,
    pub m_t: usize,
    pub x_center: Vec<f64>,
    pub y_center: Vec<f64>,
    /// Radii of the source and target regions around their centers.
    pub d_x: f64,
    pub d_y: f64,
    pub enforce_ratio: bool,
    pub quad_points: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FtPlan {
    pub d: usize,
    pub m_f: usize,
    pub m_t: usize,
    #[serde(rename = "D")]
    pub diameter: f64,
    pub profile: String,
    pub omega: f64,
    pub window_order: usize,
    pub quad_points: usize,
    pub x_center: Vec<f64>,
    pub y_center: Vec<f64>,
    pub d_x: f64,
    pub d_y: f64,
    /// Closed form `4 M_f C(M_t + d, d)`.
    pub declared_rank: u64,
    /// Complex terms over the nonzero modes, `2 M_f C(M_t + d, d)`.
    pub oscillatory_term_count: u64,
    /// Present only when `9 M_f <= M_t`; otherwise the plan is heuristic.
    pub bound: Option<FtBound>,
    pub heuristic: bool,
    /// `a_{-M_f}..a_{M_f}` as `[re, im]` pairs.
    pub fourier_coeffs: Vec<Complex64>,
    /// Ordered by |j| ascending with -|j| before +|j|, then alpha
    /// graded-lexicographically.
    pub complex_terms: Vec<FtComplexTerm>,
}

fn check_center(c: &[f64], d: usize) -> Result<()> {
    if c.len() != d {
        return Err(Error::InvalidDimension(format!("center has dimension {}, expected {d}", c.len())));
    }
    Ok(())
}

/// Numerically estimated (q, V_q) minimizing the Fourier part of the bound.
pub fn best_fourier_part(pp: &PeriodizedProfile, m_f: usize) -> (usize, f64, f64) {
    let d2 = pp.d2();
    let grid = 4096;
    (1..=pp.window_order)
        .map(|q| {
            let v = pp.total_variation(q, grid);
            (q, v, v / (PI * q as f64) * (2.0 * d2 / (PI * m_f as f64)).powi(q as i32))
        })
        .fold((1, f64::INFINITY, f64::INFINITY), |best, c| if c.2 < best.2 { c } else { best })
}

pub fn build_ft_plan(pp: &PeriodizedProfile, d: usize, opts: &FtOptions) -> Result<FtPlan> {
    if d == 0 {
        return Err(Error::InvalidDimension("d must be positive".into()));
    }
    if opts.m_f == 0 {
        return Err(Error::Contract("M_f must be positive".into()));
    }
    check_center(&opts.x_center, d)?;
    check_center(&opts.y_center, d)?;
    let ratio_ok = 9 * opts.m_f <= opts.m_t;
    if opts.enforce_ratio && !ratio_ok {
        return Err(Error::Constraint(format!(
            "9 M_f <= M_t is required, got M_f = {}, M_t = {}",
            opts.m_f, opts.m_t
        )));
    }
    let diameter = pp.base.diameter;
    let gap: f64 = opts.x_center.iter().zip(&opts.y_center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    if opts.d_x + opts.d_y + gap > diameter * (1.0 + 1e-12) {
        return Err(Error::Constraint(format!(
            "regions of radii {} and {} with center distance {gap} exceed the diameter D = {diameter}",
            opts.d_x, opts.d_y
        )));
    }
    let quad_points = opts.quad_points.unwrap_or_else(|| default_quad_points(opts.m_f));
    let coeffs = fourier_coeffs(pp, opts.m_f, quad_points)?;
    let omega = pp.omega();
    let alphas = enumerate_graded(d, opts.m_t as u32)?;
    let mf = opts.m_f as i64;

    let modes = std::iter::once(0).chain((1..=mf).flat_map(|m| [-m, m]));
    let mut complex_terms = Vec::new();
    for j in modes {
        let a = coeffs[(j + mf) as usize];
        let base = Complex64::new(0.0, -2.0 * j as f64 * omega);
        for alpha in &alphas {
            let k = alpha.order();
            if j == 0 && k > 0 {
                continue;
            }
            let fact: f64 = (1..=k).map(f64::from).product();
            let coeff = a * base.powu(k) / fact * multinomial(k, alpha)? as f64;
            complex_terms.push(FtComplexTerm { j, alpha: alpha.clone(), coeff });
        }
    }

    let bound = if ratio_ok {
        let (q, v_q, _) = match pp.base.smoothness {
            Smoothness::FiniteSmooth { q, v_q } if q <= pp.window_order => (q, v_q, 0.0),
            _ => best_fourier_part(pp, opts.m_f),
        };
        let norm = pp.sup_norm(8192);
        Some(ft_error_bound(norm, opts.d_x, opts.d_y, diameter, opts.m_t, v_q, q, opts.m_f)?)
    } else {
        None
    };

    let declared = rank_fourier_taylor(opts.m_f as u64, opts.m_t as u64, d as u64)?;
    Ok(FtPlan {
        d,
        m_f: opts.m_f,
        m_t: opts.m_t,
        diameter,
        profile: pp.base.name(),
        omega,
        window_order: pp.window_order,
        quad_points,
        x_center: opts.x_center.clone(),
        y_center: opts.y_center.clone(),
        d_x: opts.d_x,
        d_y: opts.d_y,
        declared_rank: u64::try_from(declared).map_err(|_| Error::Overflow("declared rank"))?,
        oscillatory_term_count: u64::try_from(declared / 2).map_err(|_| Error::Overflow("term count"))?,
        heuristic: bound.is_none(),
        bound,
        fourier_coeffs: coeffs,
        complex_terms,
    })
}

impl FtPlan {
    /// Real columns: one for the constant mode, two per (j > 0, alpha).
    pub fn retained_rank(&self) -> usize {
        let positive = self.complex_terms.iter().filter(|t| t.j > 0).count();
        1 + 2 * positive
    }

    fn positive_terms(&self) -> impl Iterator<Item = &FtComplexTerm> {
        self.complex_terms.iter().filter(|t| t.j > 0)
    }

    fn mode_factors(&self, phase: f64) -> Vec<Complex64> {
        (0..=self.m_f).map(|j| Complex64::from_polar(1.0, self.omega * j as f64 * phase)).collect()
    }

    /// x-side complex factor `exp(i w j |x - y_c|^2) rho_x^alpha` for every
    /// complex term, j and alpha as listed.
    pub fn x_factors(&self, x: &[f64]) -> Vec<Complex64> {
        let rho: Vec<f64> = x.iter().zip(&self.x_center).map(|(a, c)| a - c).collect();
        let phase: f64 = x.iter().zip(&self.y_center).map(|(a, c)| (a - c) * (a - c)).sum();
        let e = self.mode_factors(phase);
        self.complex_terms
            .iter()
            .map(|t| {
                let m = t.alpha.monomial(&rho);
                let ej = if t.j >= 0 { e[t.j as usize] } else { e[(-t.j) as usize].conj() };
                ej * m
            })
            .collect()
    }

    /// y-side complex factor `exp(i w j (|rho_y|^2 - 2 rho_y . rho_c)) rho_y^alpha`.
    pub fn y_factors(&self, y: &[f64]) -> Vec<Complex64> {
        let rho: Vec<f64> = y.iter().zip(&self.y_center).map(|(a, c)| a - c).collect();
        let phase: f64 = rho
            .iter()
            .zip(self.x_center.iter().zip(&self.y_center))
            .map(|(r, (xc, yc))| r * r - 2.0 * r * (xc - yc))
            .sum();
        let e = self.mode_factors(phase);
        self.complex_terms
            .iter()
            .map(|t| {
                let m = t.alpha.monomial(&rho);
                let ej = if t.j >= 0 { e[t.j as usize] } else { e[(-t.j) as usize].conj() };
                ej * m
            })
            .collect()
    }

    /// Complex sum over all terms, before realification.
    pub fn eval_complex(&self, x: &[f64], y: &[f64]) -> Complex64 {
        let (fx, fy) = (self.x_factors(x), self.y_factors(y));
        self.complex_terms.iter().zip(fx.iter().zip(&fy)).map(|(t, (a, b))| t.coeff * a * b).sum()
    }

    pub(crate) fn fill_g(&self, x: &[f64], out: &mut [f64]) {
        let rho: Vec<f64> = x.iter().zip(&self.x_center).map(|(a, c)| a - c).collect();
        let phase: f64 = x.iter().zip(&self.y_center).map(|(a, c)| (a - c) * (a - c)).sum();
        let e = self.mode_factors(phase);
        out[0] = self.fourier_coeffs[self.m_f].re;
        for (i, t) in self.positive_terms().enumerate() {
            let v = t.coeff * e[t.j as usize] * t.alpha.monomial(&rho);
            out[1 + 2 * i] = 2.0 * v.re;
            out[2 + 2 * i] = -2.0 * v.im;
        }
    }

    pub(crate) fn fill_h(&self, y: &[f64], out: &mut [f64]) {
        let rho: Vec<f64> = y.iter().zip(&self.y_center).map(|(a, c)| a - c).collect();
        let phase: f64 = rho
            .iter()
            .zip(self.x_center.iter().zip(&self.y_center))
            .map(|(r, (xc, yc))| r * r - 2.0 * r * (xc - yc))
            .sum();
        let e = self.mode_factors(phase);
        out[0] = 1.0;
        for (i, t) in self.positive_terms().enumerate() {
            let v = e[t.j as usize] * t.alpha.monomial(&rho);
            out[1 + 2 * i] = v.re;
            out[2 + 2 * i] = v.im;
        }
    }
}
