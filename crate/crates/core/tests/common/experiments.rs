//! Experiment protocols shared by the acceptance report and the paper
//! example tests.

use rbf_lowrank::linalg::MemoryCap;
use rbf_lowrank::pointgen::{Scenario, Scheme};
use rbf_lowrank::profile::Family;
use rbf_lowrank::spectrum::rank::{pooled_ratio_spikes, Norm, Spike};
use rbf_lowrank::spectrum::sweep::{mean_std, repeat_seed, scenario_spectrum};
use rbf_lowrank::spectrum::Bandwidth;

/// Independent draws pooled for the spike pattern.
pub const SPIKE_SEEDS: usize = 5;

/// Ratio spikes of the Gaussian kernel on endpoint data in d = 3, pooled
/// over [`SPIKE_SEEDS`] draws by the geometric mean of the ratios.
pub fn pooled_spikes(d: usize, n: usize, p: f64, family: Family, threshold: f64, seed: u64) -> Vec<Spike> {
    let spectra: Vec<Vec<f64>> = (0..SPIKE_SEEDS)
        .map(|t| {
            scenario_spectrum(
                Scenario::Complete,
                Scheme::Endpoint { p },
                n,
                d,
                family,
                Bandwidth::SqrtD,
                repeat_seed(seed, t),
                MemoryCap::default(),
            )
            .unwrap()
            .singular_values()
            .to_vec()
        })
        .collect();
    let refs: Vec<&[f64]> = spectra.iter().map(|s| s.as_slice()).collect();
    pooled_ratio_spikes(&refs, threshold)
}

/// Drop ratios of the truncated-SVD error curve, in the Frobenius norm
/// (`e(r) = ||K - K_r||_F / ||K||_F`) and in the spectral norm
/// (`e(r) = sigma_{r+1} / sigma_1`). Entry r is `e(r-1) / e(r)`, r >= 1.
pub struct DropCurves {
    pub fro: Vec<f64>,
    pub two: Vec<f64>,
}

pub fn drop_curves(d: usize, n: usize, seed: u64, r_max: usize) -> DropCurves {
    let spec = scenario_spectrum(
        Scenario::Complete,
        Scheme::Endpoint { p: 0.0 },
        n,
        d,
        Family::Gaussian,
        Bandwidth::MaxDist,
        seed,
        MemoryCap::default(),
    )
    .unwrap();
    let tail = spec.fro_tail();
    let s = spec.singular_values();
    let mut fro = vec![f64::NAN];
    let mut two = vec![f64::NAN];
    for r in 1..=r_max {
        fro.push(tail[r - 1] / tail[r]);
        let prev = if r == 1 { 1.0 } else { s[r - 1] / s[0] };
        two.push(prev / (s[r] / s[0]));
    }
    DropCurves { fro, two }
}

/// Largest drop ratio at ranks within one of `target`.
pub fn best_drop_near(curve: &[f64], target: usize) -> (usize, f64) {
    (target.saturating_sub(1).max(1)..=(target + 1).min(curve.len() - 1))
        .map(|r| (r, curve[r]))
        .fold((0, 0.0), |best, c| if c.1 > best.1 { c } else { best })
}

/// Max-norm ranks at `tol` for `repeats` draws of the complete scenario.
#[allow(clippy::too_many_arguments)]
pub fn ranks_over_seeds(
    scenario: Scenario,
    scheme: Scheme,
    n: usize,
    d: usize,
    tol: f64,
    norm: Norm,
    seed: u64,
    repeats: usize,
) -> Vec<usize> {
    (0..repeats)
        .map(|t| {
            scenario_spectrum(scenario, scheme, n, d, Family::Gaussian, Bandwidth::SqrtD, repeat_seed(seed, t), MemoryCap::default())
                .unwrap()
                .rank(tol, norm)
                .unwrap()
                .rank
        })
        .collect()
}

pub fn mean(values: &[usize]) -> f64 {
    mean_std(values).0
}
