//! Representing-measure types: finitely atomic measures and Gaussian
//! mixtures built from the heat kernel.

use crate::error::{Error, Result};

/// Relative merge tolerance for atom locations.
pub const ATOM_MERGE_TOL: f64 = 1e-9;

/// Whether two points coincide under the atom merge rule: max-norm distance
/// below `1e-9 · (1 + max coordinate magnitude)`.
pub fn points_coincide(x: &[f64], y: &[f64]) -> bool {
    let dist = x
        .iter()
        .zip(y)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let mag = x.iter().chain(y).map(|v| v.abs()).fold(0.0, f64::max);
    dist < ATOM_MERGE_TOL * (1.0 + mag)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub point: Vec<f64>,
    pub weight: f64,
}

/// `μ = Σ c_i δ_{x_i}`, possibly signed.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    n: usize,
    atoms: Vec<Atom>,
}

impl AtomicMeasure {
    /// Builds the measure, merging coincident atoms (weights add) and
    /// dropping atoms whose weight is exactly zero.
    pub fn new(n: usize, atoms: Vec<Atom>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMeasure("dimension must be at least 1".into()));
        }
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for atom in atoms {
            if atom.point.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: atom.point.len(),
                });
            }
            if !atom.weight.is_finite() || atom.point.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidMeasure("non-finite atom".into()));
            }
            match merged
                .iter_mut()
                .find(|m| points_coincide(&m.point, &atom.point))
            {
                Some(m) => m.weight += atom.weight,
                None => merged.push(atom),
            }
        }
        merged.retain(|a| a.weight != 0.0);
        Ok(AtomicMeasure { n, atoms: merged })
    }

    /// One-dimensional measure from `(x_i, c_i)` pairs.
    pub fn one_dim(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            1,
            pairs
                .iter()
                .map(|&(x, c)| Atom {
                    point: vec![x],
                    weight: c,
                })
                .collect(),
        )
    }

    /// Skips merging; used where the caller knows the points stay distinct.
    pub(crate) fn from_distinct(n: usize, atoms: Vec<Atom>) -> Self {
        AtomicMeasure { n, atoms }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn is_signed(&self) -> bool {
        self.atoms.iter().any(|a| a.weight < 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianComponent {
    pub center: Vec<f64>,
    pub weight: f64,
    /// Heat time `t_i ≥ 0`; the component has per-coordinate variance `2νt_i`
    /// and is the point mass at `center` when `t_i = 0`.
    pub time: f64,
}

/// `μ = Σ c_i Θ_{ν t_i}(x − p_i)` with the heat kernel
/// `Θ_{νt}(x) = (4πνt)^{-n/2} exp(−|x|²/(4νt))`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixture {
    n: usize,
    nu: f64,
    components: Vec<GaussianComponent>,
}

impl GaussianMixture {
    pub fn new(n: usize, nu: f64, components: Vec<GaussianComponent>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMeasure("dimension must be at least 1".into()));
        }
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::InvalidMeasure(format!(
                "diffusion nu = {nu} must be > 0"
            )));
        }
        for c in &components {
            if c.center.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: c.center.len(),
                });
            }
            if !(c.time >= 0.0 && c.time.is_finite()) {
                return Err(Error::InvalidMeasure(format!(
                    "component time {} < 0",
                    c.time
                )));
            }
            if !c.weight.is_finite() || c.center.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidMeasure("non-finite component".into()));
            }
        }
        Ok(GaussianMixture { n, nu, components })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn components(&self) -> &[GaussianComponent] {
        &self.components
    }

    /// `τ = min_i t_i`, or 0 for an empty mixture.
    pub fn min_time(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.time)
            .reduce(f64::min)
            .unwrap_or(0.0)
    }

    pub(crate) fn with_components(&self, components: Vec<GaussianComponent>) -> Self {
        GaussianMixture {
            n: self.n,
            nu: self.nu,
            components,
        }
    }

    /// Density of the absolutely continuous part; components with `t_i = 0`
    /// contribute nothing.
    pub fn density(&self, x: &[f64]) -> f64 {
        self.components
            .iter()
            .filter(|c| c.time > 0.0)
            .map(|c| {
                let var2 = 4.0 * self.nu * c.time;
                let r2: f64 = x.iter().zip(&c.center).map(|(a, b)| (a - b).powi(2)).sum();
                c.weight
                    * (std::f64::consts::PI * var2).powf(-(self.n as f64) / 2.0)
                    * (-r2 / var2).exp()
            })
            .sum()
    }
}
