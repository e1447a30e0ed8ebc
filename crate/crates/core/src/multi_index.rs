//! Multi-indices `α ∈ ℕ₀ⁿ` and their graded lexicographic order.

use std::cmp::Ordering;
use std::fmt;

/// A multi-index `α = (α₁, …, αₙ)`.
///
/// Ordering is graded lexicographic: lower total degree first, then within a
/// degree the larger leading entry first, so `(1,0) < (0,1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        assert!(
            !entries.is_empty(),
            "multi-index dimension must be at least 1"
        );
        MultiIndex(entries)
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(vec![0; n])
    }

    /// The unit index `e_j` scaled by `k`.
    pub fn axis(n: usize, j: usize, k: u32) -> Self {
        let mut e = vec![0; n];
        e[j] = k;
        Self::new(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, j: usize) -> u32 {
        self.0[j]
    }

    /// `α − 2e_j`, if `α_j ≥ 2`.
    pub fn lower_by_two(&self, j: usize) -> Option<MultiIndex> {
        if self.0[j] >= 2 {
            let mut e = self.0.clone();
            e[j] -= 2;
            Some(MultiIndex(e))
        } else {
            None
        }
    }

    /// Componentwise `α + 1` as a signed rate vector.
    pub fn shifted_by_one(&self) -> Vec<i64> {
        self.0.iter().map(|&x| x as i64 + 1).collect()
    }

    /// `x^α` at the given point.
    pub fn monomial(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .map(|(&k, &xi)| xi.powi(k as i32))
            .product()
    }

    /// Componentwise `β ≤ α`.
    pub fn divides(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dim()
            .cmp(&other.dim())
            .then_with(|| self.degree().cmp(&other.degree()))
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex::new(v)
    }
}

/// All `α ∈ ℕ₀ⁿ` with `|α| ≤ d`, in graded lexicographic order.
///
/// The result has `C(n+d, d)` entries.
pub fn enumerate_multiindices(n: usize, d: u32) -> Vec<MultiIndex> {
    assert!(n >= 1, "dimension must be at least 1");
    let mut out = Vec::with_capacity(binomial(n as u64 + d as u64, d as u64) as usize);
    let mut buf = vec![0u32; n];
    for deg in 0..=d {
        compositions(deg, 0, &mut buf, &mut out);
    }
    out
}

fn compositions(remaining: u32, pos: usize, buf: &mut [u32], out: &mut Vec<MultiIndex>) {
    if pos == buf.len() - 1 {
        buf[pos] = remaining;
        out.push(MultiIndex(buf.to_vec()));
        return;
    }
    for k in (0..=remaining).rev() {
        buf[pos] = k;
        compositions(remaining - k, pos + 1, buf, out);
    }
}

pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}
