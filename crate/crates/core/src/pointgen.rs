//! Seedable point-cloud generation: endpoint-weighted, Halton and uniform
//! samplers, and the three source/target overlap scenarios.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Identifier of the random stream written into output metadata.
pub const GENERATOR_ID: &str = "chacha8/rand_chacha-0.9/seed_from_u64";

/// Largest dimension supported by the Halton sampler.
pub const HALTON_MAX_DIM: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scheme {
    /// Each coordinate is `a` with probability p, `b` with probability p,
    /// and uniform on (a, b) otherwise, where [a, b] is the box side.
    Endpoint { p: f64 },
    Halton { offset: u64 },
    Uniform,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Endpoint { .. } => "endpoint",
            Scheme::Halton { .. } => "halton",
            Scheme::Uniform => "uniform",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub points: DenseMatrix,
    pub box_lo: Vec<f64>,
    pub box_hi: Vec<f64>,
    pub scheme: Scheme,
    pub seed: u64,
}

/// The sidecar metadata describing how a cloud was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloudMeta {
    pub scheme: Scheme,
    pub seed: u64,
    pub generator: String,
    pub box_lo: Vec<f64>,
    pub box_hi: Vec<f64>,
    pub n: usize,
    pub d: usize,
}

impl PointCloud {
    /// Wraps externally supplied points; the box is their bounding box.
    pub fn from_points(points: DenseMatrix) -> Self {
        let d = points.ncols();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for i in 0..points.nrows() {
            for (k, &v) in points.row(i).iter().enumerate() {
                lo[k] = lo[k].min(v);
                hi[k] = hi[k].max(v);
            }
        }
        if points.nrows() == 0 {
            lo.fill(0.0);
            hi.fill(0.0);
        }
        PointCloud { points, box_lo: lo, box_hi: hi, scheme: Scheme::Uniform, seed: 0 }
    }

    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        self.points.row(i)
    }

    /// Diagonal length of the bounding box.
    pub fn box_diameter(&self) -> f64 {
        self.box_lo.iter().zip(&self.box_hi).map(|(l, h)| (h - l) * (h - l)).sum::<f64>().sqrt()
    }

    pub fn box_center(&self) -> Vec<f64> {
        self.box_lo.iter().zip(&self.box_hi).map(|(l, h)| 0.5 * (l + h)).collect()
    }

    /// Largest distance from `center` to a corner of the box.
    pub fn box_radius_from(&self, center: &[f64]) -> f64 {
        self.box_lo
            .iter()
            .zip(&self.box_hi)
            .zip(center)
            .map(|((l, h), c)| {
                let m = (c - l).abs().max((h - c).abs());
                m * m
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn meta(&self) -> CloudMeta {
        CloudMeta {
            scheme: self.scheme,
            seed: self.seed,
            generator: GENERATOR_ID.into(),
            box_lo: self.box_lo.clone(),
            box_hi: self.box_hi.clone(),
            n: self.len(),
            d: self.dim(),
        }
    }
}

fn check_box(box_lo: &[f64], box_hi: &[f64]) -> Result<()> {
    if box_lo.len() != box_hi.len() || box_lo.is_empty() {
        return Err(Error::InvalidDimension(format!(
            "box bounds have lengths {} and {}",
            box_lo.len(),
            box_hi.len()
        )));
    }
    for (l, h) in box_lo.iter().zip(box_hi) {
        if !(l < h) || !l.is_finite() || !h.is_finite() {
            return Err(Error::Contract(format!("box side [{l}, {h}] is not a proper interval")));
        }
    }
    Ok(())
}

fn open_uniform(rng: &mut ChaCha8Rng, a: f64, b: f64) -> f64 {
    loop {
        let v = a + (b - a) * rng.random::<f64>();
        if v > a && v < b {
            return v;
        }
    }
}

/// Samples `n` points in the box with the given scheme.
pub fn sample_in_box(scheme: Scheme, n: usize, box_lo: &[f64], box_hi: &[f64], seed: u64) -> Result<PointCloud> {
    check_box(box_lo, box_hi)?;
    let d = box_lo.len();
    let points = match scheme {
        Scheme::Endpoint { p } => {
            if !(0.0..=0.5).contains(&p) {
                return Err(Error::InvalidProbability(p));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            DenseMatrix::from_fn(n, d, |_, k| {
                let (a, b) = (box_lo[k], box_hi[k]);
                let u: f64 = rng.random();
                if u < p {
                    a
                } else if u < 2.0 * p {
                    b
                } else {
                    open_uniform(&mut rng, a, b)
                }
            })
        }
        Scheme::Uniform => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            DenseMatrix::from_fn(n, d, |_, k| {
                let (a, b) = (box_lo[k], box_hi[k]);
                (a + (b - a) * rng.random::<f64>()).min(b)
            })
        }
        Scheme::Halton { offset } => {
            if d > HALTON_MAX_DIM {
                return Err(Error::InvalidDimension(format!("Halton sampler supports d <= {HALTON_MAX_DIM}, got {d}")));
            }
            let primes = first_primes(d);
            DenseMatrix::from_fn(n, d, |i, k| {
                let t = radical_inverse(i as u64 + offset + 1, primes[k]);
                box_lo[k] + (box_hi[k] - box_lo[k]) * t
            })
        }
    };
    Ok(PointCloud { points, box_lo: box_lo.to_vec(), box_hi: box_hi.to_vec(), scheme, seed })
}

pub fn sample_endpoint(n: usize, d: usize, a: f64, b: f64, p: f64, seed: u64) -> Result<PointCloud> {
    if d == 0 {
        return Err(Error::InvalidDimension("d must be positive".into()));
    }
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    sample_in_box(Scheme::Endpoint { p }, n, &vec![a; d], &vec![b; d], seed)
}

pub fn sample_uniform(n: usize, d: usize, a: f64, b: f64, seed: u64) -> Result<PointCloud> {
    if d == 0 {
        return Err(Error::InvalidDimension("d must be positive".into()));
    }
    sample_in_box(Scheme::Uniform, n, &vec![a; d], &vec![b; d], seed)
}

pub fn sample_halton(n: usize, d: usize, offset: u64, box_lo: &[f64], box_hi: &[f64]) -> Result<PointCloud> {
    if box_lo.len() != d {
        return Err(Error::InvalidDimension(format!("box has dimension {}, expected {d}", box_lo.len())));
    }
    sample_in_box(Scheme::Halton { offset }, n, box_lo, box_hi, 0)
}

/// Van der Corput radical inverse of `i` in base `base`.
pub fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

pub fn first_primes(count: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(count);
    let mut c = 2u64;
    while primes.len() < count {
        if primes.iter().take_while(|&&p| p * p <= c).all(|&p| c % p != 0) {
            primes.push(c);
        }
        c += 1;
    }
    primes
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Complete,
    Partial,
    None,
}

impl Scenario {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "complete" => Ok(Scenario::Complete),
            "partial" => Ok(Scenario::Partial),
            "none" => Ok(Scenario::None),
            other => Err(Error::Contract(format!("unknown scenario `{other}`"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Complete => "complete",
            Scenario::Partial => "partial",
            Scenario::None => "none",
        }
    }
}

/// Axis-aligned box as (lo, hi) vectors.
pub type BoxBounds = (Vec<f64>, Vec<f64>);

/// Source and target boxes for an overlap scenario in the unit cube.
pub fn overlap_boxes(scenario: Scenario, d: usize) -> (BoxBounds, BoxBounds) {
    let cube = |lo: f64, hi: f64| (vec![lo; d], vec![hi; d]);
    match scenario {
        Scenario::Complete => (cube(0.0, 1.0), cube(0.0, 1.0)),
        Scenario::Partial => (cube(0.0, 2.0 / 3.0), cube(1.0 / 3.0, 1.0)),
        Scenario::None => (cube(0.0, 0.5), cube(0.5, 1.0)),
    }
}

/// A second, decorrelated seed derived from `seed` (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed.wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Source and target clouds for a scenario. In the complete-overlap case the
/// target is the source itself, so the kernel matrix is square and symmetric.
pub fn scenario_clouds(scenario: Scenario, scheme: Scheme, n: usize, d: usize, seed: u64) -> Result<(PointCloud, PointCloud)> {
    if d == 0 {
        return Err(Error::InvalidDimension("d must be positive".into()));
    }
    let ((xl, xh), (yl, yh)) = overlap_boxes(scenario, d);
    let x = sample_in_box(scheme, n, &xl, &xh, seed)?;
    if scenario == Scenario::Complete {
        return Ok((x.clone(), x));
    }
    let y_scheme = match scheme {
        Scheme::Halton { offset } => Scheme::Halton { offset: offset + n as u64 },
        s => s,
    };
    let y = sample_in_box(y_scheme, n, &yl, &yh, derive_seed(seed, 1))?;
    Ok((x, y))
}
