//! Numerical ranks, singular-value ratio spikes and plateau grouping.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indexcomb::group_cardinality;
use crate::linalg::{dense_bytes, thin_svd, DenseMatrix, MemoryCap, Svd};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    Fro,
    Two,
    Max,
}

impl Norm {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "fro" => Ok(Norm::Fro),
            "two" => Ok(Norm::Two),
            "max" => Ok(Norm::Max),
            other => Err(Error::Contract(format!("unknown norm `{other}` (expected fro, two or max)"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Norm::Fro => "fro",
            Norm::Two => "two",
            Norm::Max => "max",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankResult {
    pub norm: Norm,
    pub tol: f64,
    pub rank: usize,
    /// Max norm only: the error rose back above the tolerance at some rank
    /// after the first crossing, within the scanned range.
    pub rerise: bool,
}

/// A matrix together with its full thin SVD.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub matrix: DenseMatrix,
    pub svd: Svd,
}

impl Spectrum {
    pub fn new(matrix: DenseMatrix, cap: MemoryCap) -> Result<Self> {
        let (m, n) = (matrix.nrows(), matrix.ncols());
        cap.check("SVD workspace", dense_bytes(m.max(n), m.max(n)) * 4)?;
        if !matrix.is_finite() {
            return Err(Error::Numerical("matrix has non-finite entries".into()));
        }
        let svd = thin_svd(&matrix)?;
        Ok(Spectrum { matrix, svd })
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.svd.s
    }

    fn check_tol(tol: f64) -> Result<()> {
        if !(tol > 0.0 && tol <= 1.0) {
            return Err(Error::Contract(format!("tolerance must lie in (0, 1], got {tol}")));
        }
        Ok(())
    }

    /// Relative Frobenius error of the rank-r truncation for r = 0..=len.
    pub fn fro_tail(&self) -> Vec<f64> {
        let s = &self.svd.s;
        let mut tail = vec![0.0; s.len() + 1];
        for i in (0..s.len()).rev() {
            tail[i] = tail[i + 1] + s[i] * s[i];
        }
        let total = tail[0];
        tail.iter().map(|t| if total > 0.0 { (t / total).sqrt() } else { 0.0 }).collect()
    }

    /// Ranks for several tolerances in one norm.
    pub fn ranks(&self, tols: &[f64], norm: Norm) -> Result<Vec<RankResult>> {
        for &t in tols {
            Self::check_tol(t)?;
        }
        let s = &self.svd.s;
        match norm {
            Norm::Fro => {
                let tail = self.fro_tail();
                Ok(tols
                    .iter()
                    .map(|&tol| RankResult { norm, tol, rank: tail.iter().position(|&e| e <= tol).unwrap(), rerise: false })
                    .collect())
            }
            Norm::Two => Ok(tols
                .iter()
                .map(|&tol| {
                    let s1 = s.first().copied().unwrap_or(0.0);
                    let rank = (0..=s.len()).find(|&r| s.get(r).copied().unwrap_or(0.0) <= tol * s1).unwrap();
                    RankResult { norm, tol, rank, rerise: false }
                })
                .collect()),
            Norm::Max => Ok(self.max_ranks(tols)),
        }
    }

    pub fn rank(&self, tol: f64, norm: Norm) -> Result<RankResult> {
        Ok(self.ranks(&[tol], norm)?[0])
    }

    /// Max-entry error of the rank-r truncation for r = 0..=r_max.
    pub fn max_error_curve(&self, r_max: usize) -> Vec<f64> {
        self.max_scan(|errs| errs.len() > r_max)
    }

    /// Subtracts `sigma_r u_r v_r^T` one term at a time, recording the
    /// max-entry residual, until `stop` says enough.
    fn max_scan(&self, stop: impl Fn(&[f64]) -> bool) -> Vec<f64> {
        let (m, n) = (self.matrix.nrows(), self.matrix.ncols());
        let mut residual = self.matrix.as_slice().to_vec();
        let mut errs = vec![self.matrix.max_abs()];
        let rank_cap = self.svd.s.len();
        while !stop(&errs) && errs.len() <= rank_cap {
            let r = errs.len() - 1;
            let sigma = self.svd.s[r];
            let u: Vec<f64> = (0..m).map(|i| self.svd.u[(i, r)] * sigma).collect();
            let v: Vec<f64> = (0..n).map(|j| self.svd.v[(j, r)]).collect();
            let err = if n == 0 {
                0.0
            } else {
                residual
                    .par_chunks_mut(n)
                    .enumerate()
                    .map(|(i, row)| {
                        let ui = u[i];
                        row.iter_mut().zip(&v).fold(0.0f64, |acc, (e, vj)| {
                            *e -= ui * vj;
                            acc.max(e.abs())
                        })
                    })
                    .reduce(|| 0.0, f64::max)
            };
            errs.push(err);
        }
        errs
    }

    fn max_ranks(&self, tols: &[f64]) -> Vec<RankResult> {
        let kmax = self.matrix.max_abs();
        let tightest = tols.iter().copied().fold(f64::INFINITY, f64::min);
        let errs = self.max_scan(|e| {
            let last = *e.last().unwrap();
            if last > tightest * kmax {
                return false;
            }
            // run a short window past the last first-crossing to look for re-rises
            let first = e.iter().position(|&v| v <= tightest * kmax).unwrap();
            e.len() > first + (first / 10).max(5)
        });
        tols.iter()
            .map(|&tol| {
                let thr = tol * kmax;
                let rank = errs.iter().position(|&v| v <= thr).unwrap_or(errs.len() - 1);
                let rerise = errs[rank..].iter().any(|&v| v > thr);
                RankResult { norm: Norm::Max, tol, rank, rerise }
            })
            .collect()
    }
}

/// Numerical rank of `k` at relative tolerance `tol` in `norm`.
pub fn numerical_rank(k: &DenseMatrix, tol: f64, norm: Norm) -> Result<usize> {
    Ok(Spectrum::new(k.clone(), MemoryCap::default())?.rank(tol, norm)?.rank)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spike {
    /// 1-based index i of the ratio sigma_i / sigma_{i+1}.
    pub index: usize,
    pub ratio: f64,
    /// The denominator was below the floor and was replaced by it.
    pub capped: bool,
}

/// Indices whose ratio `sigma_i / sigma_{i+1}` exceeds `threshold`.
///
/// Values below `floor` are treated as numerically zero: a ratio with such a
/// denominator is capped at `sigma_i / floor`, and a ratio whose numerator is
/// already below the floor is ignored.
pub fn ratio_spikes_with_floor(s: &[f64], threshold: f64, floor: f64) -> Vec<Spike> {
    let mut out = Vec::new();
    for i in 0..s.len().saturating_sub(1) {
        if s[i] <= floor {
            break;
        }
        let capped = s[i + 1] < floor;
        let ratio = s[i] / if capped { floor } else { s[i + 1] };
        if ratio > threshold {
            out.push(Spike { index: i + 1, ratio, capped });
        }
    }
    out
}

/// [`ratio_spikes_with_floor`] with the floor at machine epsilon times sigma_1.
pub fn ratio_spikes(s: &[f64], threshold: f64) -> Vec<Spike> {
    let floor = f64::EPSILON * s.first().copied().unwrap_or(0.0);
    ratio_spikes_with_floor(s, threshold, floor)
}

/// Ratio spikes of several independent spectra, pooled by taking the
/// geometric mean of `sigma_i / sigma_{i+1}` across them.
///
/// Each spectrum is cut where its values reach `eps * sigma_1`, and the pooled
/// ratios are only formed over the indices that every spectrum keeps.
pub fn pooled_ratio_spikes(spectra: &[&[f64]], threshold: f64) -> Vec<Spike> {
    let usable = |s: &[f64]| {
        let floor = f64::EPSILON * s.first().copied().unwrap_or(0.0);
        s.iter().take_while(|&&v| v > floor).count().saturating_sub(1)
    };
    let Some(len) = spectra.iter().map(|s| usable(s)).min() else {
        return Vec::new();
    };
    let m = spectra.len() as f64;
    (0..len)
        .filter_map(|i| {
            let log_mean = spectra.iter().map(|s| (s[i] / s[i + 1]).ln()).sum::<f64>() / m;
            let ratio = log_mean.exp();
            (ratio > threshold).then_some(Spike { index: i + 1, ratio, capped: false })
        })
        .collect()
}

/// One block of a plateau grouping: all Taylor terms of order `taylor` in
/// Fourier mode `fourier`, of which there are C(taylor + d - 1, d - 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupUnit {
    pub fourier: usize,
    pub taylor: usize,
    pub size: u128,
}

/// Tries to explain the gaps between consecutive spike indices as sums of
/// group units, each unit used at most once. Greedy: for every gap take the
/// largest unused unit that still fits, preferring low total order.
pub fn match_grouping(spikes: &[usize], d: usize, max_fourier: usize) -> Option<Vec<Vec<GroupUnit>>> {
    let top = *spikes.last()?;
    let mut units = Vec::new();
    for fourier in 1..=max_fourier {
        for taylor in 0.. {
            let size = group_cardinality(d as u64, taylor as u64).ok()?;
            if size > top as u128 {
                break;
            }
            units.push(GroupUnit { fourier, taylor, size });
        }
    }
    units.sort_by_key(|u| (std::cmp::Reverse(u.size), u.fourier + u.taylor, u.fourier));
    let mut used = vec![false; units.len()];
    let mut groups = Vec::new();
    let mut prev = 0usize;
    for &s in spikes {
        let mut gap = s.checked_sub(prev)? as u128;
        let mut group = Vec::new();
        while gap > 0 {
            let pick = (0..units.len()).find(|&i| !used[i] && units[i].size <= gap)?;
            used[pick] = true;
            gap -= units[pick].size;
            group.push(units[pick]);
        }
        groups.push(group);
        prev = s;
    }
    Some(groups)
}
