//! Row-major dense matrices and the bridge to `faer` for factorizations.

use faer::Mat;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Dense row-major `f64` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Contract(format!(
                "matrix data has {} entries, expected {rows} x {cols}",
                data.len()
            )));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    /// Fills each row independently and in parallel; the result does not
    /// depend on the thread count.
    pub fn par_from_rows(rows: usize, cols: usize, f: impl Fn(usize, &mut [f64]) + Sync) -> Self {
        let mut data = vec![0.0; rows * cols];
        if cols > 0 {
            data.par_chunks_mut(cols).enumerate().for_each(|(i, row)| f(i, row));
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Largest absolute entry (0 for an empty matrix).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Largest |A_ij - B_ij|.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `self * other^T`, rows computed in parallel.
    pub fn mul_transpose(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.cols, "inner dimensions differ");
        DenseMatrix::par_from_rows(self.rows, other.rows, |i, out| {
            let a = self.row(i);
            for (j, o) in out.iter_mut().enumerate() {
                *o = a.iter().zip(other.row(j)).map(|(x, y)| x * y).sum();
            }
        })
    }

    pub fn to_faer(&self) -> Mat<f64> {
        Mat::from_fn(self.rows, self.cols, |i, j| self.get(i, j))
    }

    pub fn from_faer(m: faer::MatRef<'_, f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

/// Bytes needed for a dense `rows x cols` f64 matrix.
pub fn dense_bytes(rows: usize, cols: usize) -> u128 {
    rows as u128 * cols as u128 * 8
}

/// Memory cap for dense allocations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryCap {
    pub bytes: u128,
}

impl Default for MemoryCap {
    fn default() -> Self {
        MemoryCap { bytes: 2 << 30 }
    }
}

impl MemoryCap {
    pub fn check(&self, what: &str, required_bytes: u128) -> Result<()> {
        if required_bytes > self.bytes {
            Err(Error::Resource { what: what.into(), required_bytes, cap_bytes: self.bytes })
        } else {
            Ok(())
        }
    }
}

/// Thin SVD `A = U diag(s) V^T` with singular values descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Mat<f64>,
    pub s: Vec<f64>,
    pub v: Mat<f64>,
}

pub fn thin_svd(a: &DenseMatrix) -> Result<Svd> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(Svd { u: Mat::zeros(a.nrows(), 0), s: Vec::new(), v: Mat::zeros(a.ncols(), 0) });
    }
    svd_of(a.to_faer().as_ref())
}

/// Uses the implicit-shift QR iteration on the bidiagonal form. The
/// divide-and-conquer path in faer 0.24 can collapse exactly rank-deficient
/// inputs to rank one.
pub fn svd_of(a: faer::MatRef<'_, f64>) -> Result<Svd> {
    use faer::dyn_stack::{MemBuffer, MemStack};
    use faer::linalg::svd::{svd, svd_scratch, ComputeSvdVectors, SvdParams};

    let (m, n) = a.shape();
    let size = m.min(n);
    let params = SvdParams { recursion_threshold: usize::MAX, ..<SvdParams as faer::Auto<f64>>::auto() };
    let par = faer::get_global_parallelism();
    let mut u = Mat::<f64>::zeros(m, size);
    let mut v = Mat::<f64>::zeros(n, size);
    let mut s = faer::diag::Diag::<f64>::zeros(size);
    let mut buf = MemBuffer::new(svd_scratch::<f64>(
        m,
        n,
        ComputeSvdVectors::Thin,
        ComputeSvdVectors::Thin,
        par,
        params.into(),
    ));
    svd(a, s.as_mut(), Some(u.as_mut()), Some(v.as_mut()), par, MemStack::new(&mut buf), params.into())
        .map_err(|e| Error::Numerical(format!("SVD did not converge: {e:?}")))?;
    let s: Vec<f64> = (0..size).map(|i| s[i]).collect();
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("SVD produced non-finite singular values".into()));
    }
    Ok(Svd { u, s, v })
}

/// Orthonormal basis of the column space of `a` (thin Q of a QR factorization).
pub fn orthonormalize(a: faer::MatRef<'_, f64>) -> Mat<f64> {
    a.qr().compute_thin_Q()
}
