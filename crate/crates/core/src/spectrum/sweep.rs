//! Numerical rank as a function of dimension, sampling scheme and overlap
//! scenario, aggregated over independent draws.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::MemoryCap;
use crate::pointgen::{scenario_clouds, Scenario, Scheme};
use crate::profile::Family;
use crate::spectrum::rank::{Norm, Spectrum};
use crate::spectrum::{assemble, Bandwidth};

/// Endpoint masses tried by [`grid_search_p`].
pub const P_GRID: [f64; 10] = [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub dims: Vec<usize>,
    pub schemes: Vec<Scheme>,
    pub scenario: Scenario,
    pub n: usize,
    pub family: Family,
    pub bandwidth: Bandwidth,
    pub tolerances: Vec<f64>,
    pub norms: Vec<Norm>,
    pub seed: u64,
    pub repeats: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub d: usize,
    pub scheme: Scheme,
    pub tol: f64,
    pub norm: Norm,
    /// One rank per repeat, in seed order.
    pub ranks: Vec<usize>,
    pub mean: f64,
    /// Sample standard deviation; zero for a single repeat.
    pub std: f64,
}

/// Seed of the `t`-th repeat.
pub fn repeat_seed(seed: u64, t: usize) -> u64 {
    seed.wrapping_add(t as u64)
}

/// Spectrum of the kernel matrix for one draw of a scenario.
pub fn scenario_spectrum(
    scenario: Scenario,
    scheme: Scheme,
    n: usize,
    d: usize,
    family: Family,
    bandwidth: Bandwidth,
    seed: u64,
    cap: MemoryCap,
) -> Result<Spectrum> {
    let (x, y) = scenario_clouds(scenario, scheme, n, d, seed)?;
    let k = assemble(&x, &y, family, bandwidth, cap)?;
    Spectrum::new(k.entries, cap)
}

pub fn mean_std(values: &[usize]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<usize>() as f64 / n;
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// One row per (d, scheme, tol, norm), in that nesting order.
pub fn rank_sweep(cfg: &SweepConfig, cap: MemoryCap) -> Result<Vec<SweepRow>> {
    if cfg.repeats == 0 {
        return Err(Error::Contract("at least one repeat is required".into()));
    }
    let mut rows = Vec::new();
    for &d in &cfg.dims {
        for &scheme in &cfg.schemes {
            let cells = cfg.tolerances.len() * cfg.norms.len();
            let mut per_cell: Vec<Vec<usize>> = vec![Vec::with_capacity(cfg.repeats); cells];
            for t in 0..cfg.repeats {
                let spec = scenario_spectrum(
                    cfg.scenario,
                    scheme,
                    cfg.n,
                    d,
                    cfg.family,
                    cfg.bandwidth,
                    repeat_seed(cfg.seed, t),
                    cap,
                )?;
                for (ti, &tol) in cfg.tolerances.iter().enumerate() {
                    for (ni, &norm) in cfg.norms.iter().enumerate() {
                        per_cell[ti * cfg.norms.len() + ni].push(spec.rank(tol, norm)?.rank);
                    }
                }
            }
            for (ti, &tol) in cfg.tolerances.iter().enumerate() {
                for (ni, &norm) in cfg.norms.iter().enumerate() {
                    let ranks = std::mem::take(&mut per_cell[ti * cfg.norms.len() + ni]);
                    let (mean, std) = mean_std(&ranks);
                    rows.push(SweepRow { d, scheme, tol, norm, ranks, mean, std });
                }
            }
        }
    }
    Ok(rows)
}

/// Outcome of [`grid_search_p`]: the chosen mass and the mean rank per
/// candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PSearch {
    pub best_p: f64,
    pub candidates: Vec<(f64, f64)>,
}

/// Endpoint mass p from `grid` maximizing the mean numerical rank over
/// `repeats` draws. Ties go to the smaller p.
#[allow(clippy::too_many_arguments)]
pub fn grid_search_p(
    grid: &[f64],
    scenario: Scenario,
    n: usize,
    d: usize,
    family: Family,
    bandwidth: Bandwidth,
    tol: f64,
    norm: Norm,
    seed: u64,
    repeats: usize,
    cap: MemoryCap,
) -> Result<PSearch> {
    if grid.is_empty() || repeats == 0 {
        return Err(Error::Contract("grid search needs candidates and at least one repeat".into()));
    }
    let mut candidates = Vec::with_capacity(grid.len());
    for &p in grid {
        let mut ranks = Vec::with_capacity(repeats);
        for t in 0..repeats {
            let s = scenario_spectrum(scenario, Scheme::Endpoint { p }, n, d, family, bandwidth, repeat_seed(seed, t), cap)?;
            ranks.push(s.rank(tol, norm)?.rank);
        }
        candidates.push((p, mean_std(&ranks).0));
    }
    let best_p = candidates.iter().fold(candidates[0], |best, &c| if c.1 > best.1 { c } else { best }).0;
    Ok(PSearch { best_p, candidates })
}

/// Least-squares slope of log(rank) against log(d).
pub fn loglog_slope(points: &[(usize, f64)]) -> Result<f64> {
    if points.len() < 2 || points.iter().any(|&(d, r)| d == 0 || r <= 0.0) {
        return Err(Error::Contract("slope fit needs two or more points with positive d and rank".into()));
    }
    let xs: Vec<f64> = points.iter().map(|&(d, _)| (d as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, r)| r.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Contract("slope fit needs at least two distinct dimensions".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}
