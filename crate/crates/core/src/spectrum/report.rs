//! Serializable summary of a spectral analysis, plus its CSV views.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::indexcomb::{default_k_max, predicted_decay_indices};
use crate::spectrum::lowrank::CurveRow;
use crate::spectrum::rank::{match_grouping, ratio_spikes, GroupUnit, Norm, RankResult, Spectrum, Spike};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelInfo {
    pub profile: String,
    pub bandwidth: String,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpikeSet {
    pub threshold: f64,
    pub spikes: Vec<Spike>,
    /// Greedy explanation of the spike gaps by Fourier/Taylor term groups,
    /// when one exists.
    pub grouping: Option<Vec<Vec<GroupUnit>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub rows: usize,
    pub cols: usize,
    pub d: usize,
    pub kernel: Option<KernelInfo>,
    pub tolerances: Vec<f64>,
    pub ranks: Vec<RankResult>,
    pub ratio_spikes: Vec<SpikeSet>,
    /// C(k + d, d) for k = 0, 1, ...
    pub predicted_indices: Vec<u64>,
    pub singular_values: Vec<f64>,
}

/// Largest Fourier order tried by the grouping matcher.
pub const GROUPING_MAX_FOURIER: usize = 5;

impl SpectrumReport {
    pub fn build(
        spectrum: &Spectrum,
        d: usize,
        tolerances: &[f64],
        norms: &[Norm],
        thresholds: &[f64],
        kernel: Option<KernelInfo>,
    ) -> Result<Self> {
        let mut ranks = Vec::new();
        for &norm in norms {
            ranks.extend(spectrum.ranks(tolerances, norm)?);
        }
        let s = spectrum.singular_values();
        let ratio_spikes = thresholds
            .iter()
            .map(|&threshold| {
                let spikes = ratio_spikes(s, threshold);
                let idx: Vec<usize> = spikes.iter().map(|sp| sp.index).collect();
                let grouping = if d > 0 { match_grouping(&idx, d, GROUPING_MAX_FOURIER) } else { None };
                SpikeSet { threshold, spikes, grouping }
            })
            .collect();
        let predicted_indices = if d > 0 {
            let k_max = default_k_max(d as u64, s.len() as u128);
            predicted_decay_indices(d as u64, k_max)?.into_iter().map(|v| v as u64).collect()
        } else {
            Vec::new()
        };
        Ok(SpectrumReport {
            rows: spectrum.matrix.nrows(),
            cols: spectrum.matrix.ncols(),
            d,
            kernel,
            tolerances: tolerances.to_vec(),
            ranks,
            ratio_spikes,
            predicted_indices,
            singular_values: s.to_vec(),
        })
    }
}

/// `index,sigma,ratio_next` with 1-based indices; the last ratio is empty.
pub fn write_singular_values<W: Write>(s: &[f64], mut w: W) -> Result<()> {
    writeln!(w, "index,sigma,ratio_next")?;
    for (i, v) in s.iter().enumerate() {
        match s.get(i + 1) {
            Some(next) => writeln!(w, "{},{v:?},{:?}", i + 1, v / next)?,
            None => writeln!(w, "{},{v:?},", i + 1)?,
        }
    }
    Ok(())
}

/// `rank,method,rel_fro_error`.
pub fn write_curve<W: Write>(rows: &[CurveRow], mut w: W) -> Result<()> {
    writeln!(w, "rank,method,rel_fro_error")?;
    for r in rows {
        writeln!(w, "{},{},{:?}", r.rank, r.method, r.rel_fro_error)?;
    }
    Ok(())
}
