//! Kernel matrices and their spectral diagnostics.
//!
//! * [`assemble`] builds `K_ij = f(|x_i - y_j|^2)` for a bandwidth policy.
//! * [`Spectrum`] holds one SVD and answers numerical-rank queries in the
//!   Frobenius, spectral and max-entry norms.
//! * [`ratio_spikes`] finds large gaps `sigma_i / sigma_{i+1}`.
//! * [`sweep`] aggregates ranks over dimensions, schemes and repeats.
//! * [`lowrank`] has the leverage-score Nyström method, randomized SVD and
//!   reconstruction curves.

pub mod lowrank;
pub mod rank;
pub mod report;
pub mod sweep;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dense_bytes, DenseMatrix, MemoryCap};
use crate::pointgen::PointCloud;
use crate::profile::Family;

pub use lowrank::{nystrom_leverage, randomized_svd, reconstruction_curve, CurveRow, LowRank, Method};
pub use rank::{numerical_rank, pooled_ratio_spikes, ratio_spikes, GroupUnit, Norm, RankResult, Spectrum, Spike};
pub use report::SpectrumReport;

/// How the bandwidth h of `f(u / h^2)` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case")]
pub enum Bandwidth {
    /// h = sqrt(d).
    SqrtD,
    /// h = largest distance between a source and a target point.
    MaxDist,
    Fixed { h: f64 },
}

impl Bandwidth {
    pub fn parse(s: &str, fixed: Option<f64>) -> Result<Self> {
        match s {
            "sqrt-d" => Ok(Bandwidth::SqrtD),
            "max-dist" => Ok(Bandwidth::MaxDist),
            "fixed" => fixed
                .filter(|h| *h > 0.0)
                .map(|h| Bandwidth::Fixed { h })
                .ok_or_else(|| Error::Contract("the fixed bandwidth policy needs a positive --h".into())),
            other => Err(Error::Contract(format!("unknown bandwidth policy `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Bandwidth::SqrtD => "sqrt-d",
            Bandwidth::MaxDist => "max-dist",
            Bandwidth::Fixed { .. } => "fixed",
        }
    }

    pub fn resolve(&self, x: &PointCloud, y: &PointCloud) -> f64 {
        match *self {
            Bandwidth::SqrtD => (x.dim() as f64).sqrt(),
            Bandwidth::MaxDist => max_distance(x, y),
            Bandwidth::Fixed { h } => h,
        }
    }
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum()
}

/// Largest `|x_i - y_j|` over all pairs.
pub fn max_distance(x: &PointCloud, y: &PointCloud) -> f64 {
    use rayon::prelude::*;
    (0..x.len())
        .into_par_iter()
        .map(|i| (0..y.len()).map(|j| squared_distance(x.point(i), y.point(j))).fold(0.0, f64::max))
        .reduce(|| 0.0, f64::max)
        .sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    pub entries: DenseMatrix,
    pub family: Family,
    pub bandwidth: Bandwidth,
    pub h: f64,
    /// True when source and target are the same cloud.
    pub symmetric: bool,
}

pub fn assemble(
    x: &PointCloud,
    y: &PointCloud,
    family: Family,
    bandwidth: Bandwidth,
    cap: MemoryCap,
) -> Result<KernelMatrix> {
    if x.dim() != y.dim() {
        return Err(Error::InvalidDimension(format!("clouds have dimensions {} and {}", x.dim(), y.dim())));
    }
    cap.check("kernel matrix", dense_bytes(x.len(), y.len()))?;
    let h = bandwidth.resolve(x, y);
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Contract(format!("bandwidth must be positive, resolved to {h}")));
    }
    let f = family.with_bandwidth(h);
    let entries = DenseMatrix::par_from_rows(x.len(), y.len(), |i, row| {
        let xi = x.point(i);
        for (j, out) in row.iter_mut().enumerate() {
            *out = f.eval(squared_distance(xi, y.point(j)));
        }
    });
    if !entries.is_finite() {
        return Err(Error::Numerical("kernel matrix has non-finite entries".into()));
    }
    Ok(KernelMatrix { entries, family, bandwidth, h, symmetric: x == y })
}
