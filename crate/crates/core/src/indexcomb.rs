//! Multi-indices, multinomial coefficients and the closed-form term counts.
//!
//! All counts are computed in checked `u128` arithmetic; overflow surfaces as
//! [`Error::Overflow`] instead of wrapping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent vector `alpha` in N^d.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(d: usize) -> Self {
        MultiIndex(vec![0; d])
    }

    /// Unit index with a one in slot `i`.
    pub fn unit(d: usize, i: usize) -> Self {
        let mut e = vec![0; d];
        e[i] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Total degree |alpha|.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// x^alpha = prod x_i^alpha_i.
    pub fn monomial(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.0.len());
        self.0
            .iter()
            .zip(x)
            .filter(|(&a, _)| a > 0)
            .map(|(&a, &xi)| xi.powi(a as i32))
            .product()
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

/// All alpha in N^d with |alpha| = `total_degree`, lexicographically
/// descending: `(m,0,..,0)` first, `(0,..,0,m)` last.
pub fn enumerate_multiindices(d: usize, total_degree: u32) -> Result<Vec<MultiIndex>> {
    if d == 0 {
        return Err(Error::InvalidDimension("multi-index dimension must be >= 1".into()));
    }
    let mut out = Vec::new();
    let mut current = vec![0u32; d];
    fill(&mut current, 0, total_degree, &mut out);
    Ok(out)
}

fn fill(current: &mut [u32], slot: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if slot + 1 == current.len() {
        current[slot] = remaining;
        out.push(MultiIndex(current.to_vec()));
        return;
    }
    for a in (0..=remaining).rev() {
        current[slot] = a;
        fill(current, slot + 1, remaining - a, out);
    }
    current[slot] = 0;
}

/// Graded enumeration: all indices with |alpha| <= `max_degree`, ascending
/// degree, lexicographically descending within a degree.
pub fn enumerate_graded(d: usize, max_degree: u32) -> Result<Vec<MultiIndex>> {
    let mut out = Vec::new();
    for m in 0..=max_degree {
        out.extend(enumerate_multiindices(d, m)?);
    }
    Ok(out)
}

/// Binomial coefficient C(n, k) with overflow detection. Returns 0 for k > n.
pub fn binomial(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        // acc * num is divisible by i; cancel the common factor of num and i
        // first so that i divides acc exactly.
        let mut num = n as u128 - k as u128 + i;
        let g = gcd(num, i);
        num /= g;
        let den = i / g;
        acc = (acc / den)
            .checked_mul(num)
            .ok_or(Error::Overflow("binomial coefficient"))?;
    }
    Ok(acc)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// m! / (alpha_1! ... alpha_d!), computed as a product of binomials.
pub fn multinomial(m: u32, alpha: &MultiIndex) -> Result<u128> {
    if alpha.order() != m {
        return Err(Error::Contract(format!(
            "multinomial requires |alpha| = m, got |alpha| = {} and m = {m}",
            alpha.order()
        )));
    }
    let mut acc: u128 = 1;
    let mut partial: u64 = 0;
    for &a in alpha.exponents() {
        partial += a as u64;
        let b = binomial(partial, a as u64)?;
        acc = acc.checked_mul(b).ok_or(Error::Overflow("multinomial coefficient"))?;
    }
    Ok(acc)
}

/// Term count of the Chebyshev separable expansion: C(n+d+2, d+2).
pub fn rank_chebyshev(n: u64, d: u64) -> Result<u128> {
    binomial(n + d + 2, d + 2)
}

/// Realified term count of the Fourier-Taylor expansion: 4 M_f C(M_t+d, d).
pub fn rank_fourier_taylor(m_f: u64, m_t: u64, d: u64) -> Result<u128> {
    let b = binomial(m_t + d, d)?;
    b.checked_mul(4)
        .and_then(|v| v.checked_mul(m_f as u128))
        .ok_or(Error::Overflow("Fourier-Taylor rank"))
}

/// Indices C(k+d, d), k = 0..=k_max, where singular-value decays are expected.
pub fn predicted_decay_indices(d: u64, k_max: u64) -> Result<Vec<u128>> {
    (0..=k_max).map(|k| binomial(k + d, d)).collect()
}

/// Number of degree-k monomials in d variables: C(k+d-1, d-1).
pub fn group_cardinality(d: u64, k: u64) -> Result<u128> {
    if d == 0 {
        return Err(Error::InvalidDimension("group cardinality needs d >= 1".into()));
    }
    binomial(k + d - 1, d - 1)
}

/// Largest k with C(k+d, d) <= `limit`, used to default `k_max` to the
/// matrix size.
pub fn default_k_max(d: u64, limit: u128) -> u64 {
    let mut k = 0;
    while let Ok(v) = binomial(k + 1 + d, d) {
        if v > limit {
            break;
        }
        k += 1;
    }
    k
}
