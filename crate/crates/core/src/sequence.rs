//! Truncated moment sequences, polynomials, and the Riesz functional.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::multi_index::{enumerate_multiindices, MultiIndex};

/// A truncated multisequence `(s_α)_{|α| ≤ d}` in `n` variables.
///
/// Values are stored in graded lexicographic order of the indices, so every
/// `α − 2e_j` precedes `α`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence {
    n: usize,
    degree: u32,
    indices: Vec<MultiIndex>,
    values: Vec<f64>,
}

impl MomentSequence {
    /// Builds a sequence from values listed in graded lexicographic order.
    pub fn from_values(n: usize, degree: u32, values: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSequence(
                "dimension must be at least 1".into(),
            ));
        }
        let indices = enumerate_multiindices(n, degree);
        if indices.len() != values.len() {
            return Err(Error::InvalidSequence(format!(
                "expected {} values for n={n}, d={degree}, got {}",
                indices.len(),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidSequence(format!("non-finite value {v}")));
        }
        Ok(MomentSequence {
            n,
            degree,
            indices,
            values,
        })
    }

    /// A one-dimensional sequence `(s_0, …, s_d)`.
    pub fn one_dim(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSequence("empty sequence".into()));
        }
        Self::from_values(1, values.len() as u32 - 1, values.to_vec())
    }

    pub fn from_fn(n: usize, degree: u32, mut f: impl FnMut(&MultiIndex) -> f64) -> Self {
        let indices = enumerate_multiindices(n, degree);
        let values = indices.iter().map(&mut f).collect();
        MomentSequence {
            n,
            degree,
            indices,
            values,
        }
    }

    /// Builds a sequence from `(α, s_α)` pairs; every index with `|α| ≤ d`
    /// must appear exactly once.
    pub fn from_pairs(n: usize, degree: u32, pairs: Vec<(MultiIndex, f64)>) -> Result<Self> {
        let indices = enumerate_multiindices(n, degree);
        let mut values = vec![None; indices.len()];
        for (alpha, v) in pairs {
            if alpha.dim() != n {
                return Err(Error::InvalidSequence(format!(
                    "index {alpha} has dimension {}, expected {n}",
                    alpha.dim()
                )));
            }
            if alpha.degree() > degree {
                return Err(Error::InvalidSequence(format!(
                    "index {alpha} exceeds degree {degree}"
                )));
            }
            let pos = indices.binary_search(&alpha).expect("index within degree");
            if values[pos].replace(v).is_some() {
                return Err(Error::InvalidSequence(format!(
                    "index {alpha} appears twice"
                )));
            }
        }
        let values = values
            .into_iter()
            .zip(&indices)
            .map(|(v, a)| v.ok_or_else(|| Error::InvalidSequence(format!("index {a} missing"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_values(n, degree, values)
    }

    pub fn zeros(n: usize, degree: u32) -> Self {
        Self::from_fn(n, degree, |_| 0.0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, f64)> {
        self.indices.iter().zip(self.values.iter().copied())
    }

    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        if alpha.dim() != self.n || alpha.degree() > self.degree {
            return None;
        }
        self.indices.binary_search(alpha).ok()
    }

    pub fn get(&self, alpha: &MultiIndex) -> Option<f64> {
        self.position(alpha).map(|i| self.values[i])
    }

    /// `s_α`; panics if `α` is outside the index set.
    pub fn value(&self, alpha: &MultiIndex) -> f64 {
        self.get(alpha)
            .unwrap_or_else(|| panic!("index {alpha} outside sequence of degree {}", self.degree))
    }

    /// One-dimensional access `s_k`.
    pub fn at(&self, k: usize) -> f64 {
        assert_eq!(self.n, 1, "at() is for one-dimensional sequences");
        self.values[k]
    }

    pub fn s0(&self) -> f64 {
        self.values[0]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Restriction to `|α| ≤ d`.
    pub fn truncate(&self, d: u32) -> MomentSequence {
        assert!(d <= self.degree, "cannot truncate to a higher degree");
        let keep = enumerate_multiindices(self.n, d).len();
        MomentSequence {
            n: self.n,
            degree: d,
            indices: self.indices[..keep].to_vec(),
            values: self.values[..keep].to_vec(),
        }
    }

    /// `Σ c_i · s_i` over sequences of the same shape.
    pub fn linear_combine(coeffs: &[f64], seqs: &[&MomentSequence]) -> Result<MomentSequence> {
        let first = seqs
            .first()
            .ok_or_else(|| Error::InvalidSequence("empty combination".into()))?;
        for s in seqs {
            if s.n != first.n || s.degree != first.degree {
                return Err(Error::DimensionMismatch {
                    expected: first.len(),
                    got: s.len(),
                });
            }
        }
        let mut values = vec![0.0; first.len()];
        for (c, s) in coeffs.iter().zip(seqs) {
            for (v, x) in values.iter_mut().zip(&s.values) {
                *v += c * x;
            }
        }
        Ok(MomentSequence {
            values,
            ..(*first).clone()
        })
    }

    pub fn map_values(&self, mut f: impl FnMut(&MultiIndex, f64) -> f64) -> MomentSequence {
        let values = self.iter().map(|(a, v)| f(a, v)).collect();
        MomentSequence {
            values,
            ..self.clone()
        }
    }

    /// Characteristic length `ρ = sqrt(Σ_j s_{2e_j} / (n s_0))`, falling back
    /// to 1 when the second moments are unavailable or not positive.
    pub fn length_scale(&self) -> f64 {
        if self.degree < 2 || self.s0() <= 0.0 {
            return 1.0;
        }
        let second: f64 = (0..self.n)
            .map(|j| self.value(&MultiIndex::axis(self.n, j, 2)))
            .sum();
        let r2 = second / (self.n as f64 * self.s0());
        if r2 > 0.0 && r2.is_finite() {
            r2.sqrt()
        } else {
            1.0
        }
    }

    /// Natural magnitude of `s_α`: `max(|s_α|, s_0 ρ^{|α|})`.
    pub fn magnitude(&self, alpha: &MultiIndex) -> f64 {
        let v = self.value(alpha).abs();
        v.max(self.s0().abs() * self.length_scale().powi(alpha.degree() as i32))
    }

    /// Largest entrywise relative mismatch, each entry measured against the
    /// natural magnitude of `self`.
    pub fn relative_mismatch(&self, other: &MomentSequence) -> f64 {
        assert_eq!(self.n, other.n);
        let d = self.degree.min(other.degree);
        let mut worst: f64 = 0.0;
        for (alpha, v) in self.iter().filter(|(a, _)| a.degree() <= d) {
            let w = other.value(alpha);
            let scale = self.magnitude(alpha).max(w.abs()).max(f64::MIN_POSITIVE);
            worst = worst.max((v - w).abs() / scale);
        }
        worst
    }
}

/// A real polynomial `Σ c_α x^α` in `n` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    n: usize,
    coeffs: BTreeMap<MultiIndex, f64>,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Polynomial {
            n,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self::from_terms(n, [(MultiIndex::zeros(n), c)])
    }

    pub fn monomial(alpha: MultiIndex, c: f64) -> Self {
        let n = alpha.dim();
        Self::from_terms(n, [(alpha, c)])
    }

    /// Sums coefficients of repeated indices; exact zeros are dropped.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (MultiIndex, f64)>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (alpha, c) in terms {
            assert_eq!(alpha.dim(), n, "term dimension mismatch");
            *coeffs.entry(alpha).or_insert(0.0) += c;
        }
        coeffs.retain(|_, c| *c != 0.0);
        Polynomial { n, coeffs }
    }

    /// One-dimensional `c_0 + c_1 x + …`.
    pub fn one_dim(coeffs: &[f64]) -> Self {
        Self::from_terms(
            1,
            coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| (MultiIndex::new(vec![k as u32]), c)),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, f64)> {
        self.coeffs.iter().map(|(a, &c)| (a, c))
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> f64 {
        self.coeffs.get(alpha).copied().unwrap_or(0.0)
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.coeffs
            .keys()
            .map(MultiIndex::degree)
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms().map(|(a, c)| c * a.monomial(x)).sum()
    }

    pub fn scale(&self, c: f64) -> Polynomial {
        Polynomial::from_terms(self.n, self.terms().map(|(a, v)| (a.clone(), c * v)))
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.n, other.n);
        Polynomial::from_terms(
            self.n,
            self.terms()
                .chain(other.terms())
                .map(|(a, v)| (a.clone(), v)),
        )
    }

    /// `Δp = Σ_j ∂_j² p`.
    pub fn laplacian(&self) -> Polynomial {
        let terms = self.terms().flat_map(|(alpha, c)| {
            (0..self.n).filter_map(move |j| {
                let k = alpha.get(j) as f64;
                alpha.lower_by_two(j).map(|b| (b, c * k * (k - 1.0)))
            })
        });
        Polynomial::from_terms(self.n, terms.collect::<Vec<_>>())
    }

    pub fn map_coeffs(&self, mut f: impl FnMut(&MultiIndex, f64) -> f64) -> Polynomial {
        Polynomial::from_terms(self.n, self.terms().map(|(a, c)| (a.clone(), f(a, c))))
    }
}

/// The Riesz functional `L_s(p) = Σ_α c_α s_α`.
pub fn riesz_apply(s: &MomentSequence, p: &Polynomial) -> Result<f64> {
    if p.n() != s.n() {
        return Err(Error::DimensionMismatch {
            expected: s.n(),
            got: p.n(),
        });
    }
    let mut total = 0.0;
    for (alpha, c) in p.terms() {
        let v = s.get(alpha).ok_or_else(|| Error::DegreeOverflow {
            index: alpha.clone(),
            degree: s.degree(),
        })?;
        total += c * v;
    }
    Ok(total)
}
