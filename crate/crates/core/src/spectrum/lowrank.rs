//! Low-rank approximation methods and reconstruction-error curves.

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{orthonormalize, svd_of, DenseMatrix};
use crate::pointgen::derive_seed;
use crate::spectrum::rank::Spectrum;

/// Pseudo-inverse cutoff relative to the largest singular value of the core.
pub const PINV_CUTOFF: f64 = 1e-12;

/// Rank-r approximation `G H^T`.
#[derive(Debug, Clone)]
pub struct LowRank {
    pub g: Mat<f64>,
    pub h: Mat<f64>,
}

impl LowRank {
    pub fn rank(&self) -> usize {
        self.g.ncols()
    }

    pub fn reconstruct(&self) -> Mat<f64> {
        &self.g * self.h.transpose()
    }

    /// Relative errors `(||K - G H^T||_F / ||K||_F, ||K - G H^T||_max / ||K||_max)`.
    pub fn errors(&self, k: &DenseMatrix) -> (f64, f64) {
        let rec = self.reconstruct();
        let (mut fro, mut mx) = (0.0f64, 0.0f64);
        for i in 0..k.nrows() {
            for j in 0..k.ncols() {
                let e = k.get(i, j) - rec[(i, j)];
                fro += e * e;
                mx = mx.max(e.abs());
            }
        }
        let kf = k.frobenius();
        let km = k.max_abs();
        (
            if kf > 0.0 { fro.sqrt() / kf } else { fro.sqrt() },
            if km > 0.0 { mx / km } else { mx },
        )
    }
}

/// Weighted sampling of `count` distinct indices with probability
/// proportional to `weights`, by Efraimidis-Spirakis keys `ln(u) / w`.
pub fn weighted_sample(weights: &[f64], count: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut keyed: Vec<(f64, usize)> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let u: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
            let key = if w > 0.0 { u.ln() / w } else { f64::NEG_INFINITY };
            (key, i)
        })
        .collect();
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut picked: Vec<usize> = keyed.into_iter().take(count).map(|(_, i)| i).collect();
    picked.sort_unstable();
    picked
}

/// Rank-r leverage scores of the rows of `basis` (squared row norms of its
/// first r columns).
fn leverage(basis: &Mat<f64>, r: usize) -> Vec<f64> {
    (0..basis.nrows()).map(|i| (0..r).map(|k| basis[(i, k)] * basis[(i, k)]).sum()).collect()
}

/// Leverage-score Nyström (CUR for rectangular K) with exact rank-r
/// leverage scores taken from `spectrum`'s SVD.
///
/// `r + oversample` columns (and, for rectangular or non-symmetric K, as
/// many rows) are sampled without replacement. The approximation
/// `C W^+ R`, with the core pseudo-inverted at cutoff [`PINV_CUTOFF`], is
/// then truncated to its best rank-r part.
pub fn nystrom_leverage(spectrum: &Spectrum, r: usize, oversample: usize, symmetric: bool, seed: u64) -> Result<LowRank> {
    let k = &spectrum.matrix;
    let (m, n) = (k.nrows(), k.ncols());
    let c = r + oversample;
    if r == 0 || c > m.min(n) {
        return Err(Error::Contract(format!(
            "need 1 <= r and r + oversample <= min(rows, cols); got r = {r}, oversample = {oversample}, shape {m} x {n}"
        )));
    }
    let r_eff = r.min(spectrum.svd.s.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cols = weighted_sample(&leverage(&spectrum.svd.v, r_eff), c, &mut rng);
    let rows = if symmetric && m == n {
        cols.clone()
    } else {
        weighted_sample(&leverage(&spectrum.svd.u, r_eff), c, &mut rng)
    };
    let cmat = Mat::from_fn(m, c, |i, j| k.get(i, cols[j]));
    let rmat = Mat::from_fn(c, n, |i, j| k.get(rows[i], j));
    let w = Mat::from_fn(c, c, |i, j| k.get(rows[i], cols[j]));
    let core = svd_of(w.as_ref())?;
    let smax = core.s.first().copied().unwrap_or(0.0);
    let keep = core.s.iter().take_while(|&&s| s > PINV_CUTOFF * smax).count();
    // C W^+ R = Q (Q^T C V S^{-1}) (U^T R) with Q an orthonormal basis of C.
    let q = orthonormalize(cmat.as_ref());
    let qc = q.transpose() * &cmat;
    let left = Mat::from_fn(qc.nrows(), keep, |i, j| {
        (0..c).map(|t| qc[(i, t)] * core.v[(t, j)]).sum::<f64>() / core.s[j]
    });
    let ut = Mat::from_fn(keep, c, |i, j| core.u[(j, i)]);
    let small = svd_of((&left * (&ut * &rmat)).as_ref())?;
    let rank = r.min(small.s.len());
    let qu = &q * &small.u;
    let g = Mat::from_fn(m, rank, |i, j| qu[(i, j)] * small.s[j]);
    let h = Mat::from_fn(n, rank, |i, j| small.v[(i, j)]);
    Ok(LowRank { g, h })
}

/// Randomized SVD by a Gaussian range finder with `power_iters` subspace
/// iterations, re-orthonormalizing after every multiplication. Returns the
/// rank-r truncation as `(U S) V^T` together with the estimated singular
/// values.
pub fn randomized_svd(
    k: &DenseMatrix,
    r: usize,
    power_iters: usize,
    oversample: usize,
    seed: u64,
) -> Result<(LowRank, Vec<f64>)> {
    let (m, n) = (k.nrows(), k.ncols());
    let l = r + oversample;
    if r == 0 || l > m.min(n) {
        return Err(Error::Contract(format!(
            "need 1 <= r and r + oversample <= min(rows, cols); got r = {r}, oversample = {oversample}, shape {m} x {n}"
        )));
    }
    let a = k.to_faer();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega = Mat::from_fn(n, l, |_, _| rng.sample::<f64, _>(StandardNormal));
    let mut q = orthonormalize((&a * &omega).as_ref());
    for _ in 0..power_iters {
        let z = orthonormalize((a.transpose() * &q).as_ref());
        q = orthonormalize((&a * &z).as_ref());
    }
    let b = q.transpose() * &a;
    let small = svd_of(b.as_ref())?;
    let u = &q * &small.u;
    let g = Mat::from_fn(m, r, |i, j| u[(i, j)] * small.s[j]);
    let h = Mat::from_fn(n, r, |i, j| small.v[(i, j)]);
    Ok((LowRank { g, h }, small.s[..r].to_vec()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Method {
    Svd,
    /// Leverage-score Nyström; the error is averaged over `repeats` seeds.
    Nystrom { oversample: usize, repeats: usize, seed: u64 },
    RandSvd { power_iters: usize, oversample: usize, seed: u64 },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Svd => "svd",
            Method::Nystrom { .. } => "nystrom",
            Method::RandSvd { .. } => "randsvd",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub rank: usize,
    pub method: String,
    pub rel_fro_error: f64,
}

/// Relative Frobenius error of each method at each rank. Oversampling is
/// reduced where `rank + oversample` would exceed the matrix size.
pub fn reconstruction_curve(spectrum: &Spectrum, ranks: &[usize], methods: &[Method], symmetric: bool) -> Result<Vec<CurveRow>> {
    if ranks.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Contract("ranks must be sorted ascending".into()));
    }
    let k = &spectrum.matrix;
    let size = k.nrows().min(k.ncols());
    if let Some(&r) = ranks.last() {
        if r > size {
            return Err(Error::Contract(format!("rank {r} exceeds the matrix size {size}")));
        }
    }
    let tail = spectrum.fro_tail();
    let mut rows = Vec::new();
    for method in methods {
        for &r in ranks {
            let err = match *method {
                Method::Svd => tail[r],
                _ if r == 0 => 1.0,
                Method::Nystrom { oversample, repeats, seed } => {
                    let os = oversample.min(size - r);
                    let reps = repeats.max(1);
                    let mut acc = 0.0;
                    for t in 0..reps {
                        let lr = nystrom_leverage(spectrum, r, os, symmetric, derive_seed(seed, t as u64))?;
                        acc += lr.errors(k).0;
                    }
                    acc / reps as f64
                }
                Method::RandSvd { power_iters, oversample, seed } => {
                    let os = oversample.min(size - r);
                    randomized_svd(k, r, power_iters, os, seed)?.0.errors(k).0
                }
            };
            rows.push(CurveRow { rank: r, method: method.name().to_string(), rel_fro_error: err });
        }
    }
    Ok(rows)
}

/// Ranks near which the error drops by at least `factor` relative to the
/// previous rank, from an ascending per-rank error column.
pub fn error_drops(errors: &[(usize, f64)], factor: f64) -> Vec<usize> {
    errors
        .windows(2)
        .filter(|w| w[1].1 * factor <= w[0].1 && w[0].1 > 0.0)
        .map(|w| w[1].0)
        .collect()
}
