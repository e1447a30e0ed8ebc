//! Gaussian-mixture recovery for interior one-dimensional sequences.
//!
//! An interior sequence is heat-evolved backwards to the cone boundary. There
//! the Hankel matrix has a kernel whose polynomial vanishes on the support of
//! an atomic measure; heat-evolving that measure forward by the same time
//! gives a Gaussian mixture with the original moments.

use nalgebra::{DMatrix, DVector};

use crate::boundary::{heat_distance_1d, merge_close, BoundaryOptions, BoundaryReport};
use crate::error::{Error, Result};
use crate::hankel::build_hankel;
use crate::measure::{GaussianComponent, GaussianMixture};
use crate::multi_index::MultiIndex;
use crate::oracle::oracle_moments_gaussian_mixture;
use crate::sequence::MomentSequence;

/// Extends an odd-degree sequence `s_0 … s_{2d+1}` by
/// `s_{2d+2} = bᵀ A⁻¹ b + 1`, where `A` is the Hankel matrix of the even part
/// and `b = (s_{d+1}, …, s_{2d+1})`. The first term is the smallest value
/// keeping the extended Hankel matrix PSD (Schur complement), so the result
/// is positive definite. Even-degree input is returned unchanged.
pub fn augment_odd(s: &MomentSequence) -> Result<MomentSequence> {
    if s.n() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: s.n(),
        });
    }
    if s.degree().is_multiple_of(2) {
        return Ok(s.clone());
    }
    let d = (s.degree() / 2) as usize;
    let a = build_hankel(s, d)?.matrix().clone();
    let chol = a.clone().cholesky().ok_or_else(|| Error::NotInterior {
        min_eigenvalue: a.symmetric_eigenvalues().min(),
    })?;
    let b = DVector::from_iterator(d + 1, (0..=d).map(|i| s.at(d + 1 + i)));
    let minimal = b.dot(&chol.solve(&b));
    let mut values = s.values().to_vec();
    values.push(minimal + 1.0);
    MomentSequence::from_values(1, s.degree() + 1, values)
}

/// Real roots of `f(x) = Σ f_i x^i`, from the eigenvalues of the companion
/// matrix followed by a few Newton steps on `f`. Fails if any root has
/// `|Im| > tol · (1 + |Re|)`.
pub fn atoms_from_kernel(f: &[f64], tol: f64) -> Result<Vec<f64>> {
    let mut coeffs = f.to_vec();
    while coeffs.last() == Some(&0.0) {
        coeffs.pop();
    }
    if coeffs.is_empty() {
        return Err(Error::NoKernel("zero polynomial".into()));
    }
    let k = coeffs.len() - 1;
    if k == 0 {
        return Ok(vec![]);
    }
    let lead = coeffs[k];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    let mut comp = DMatrix::<f64>::zeros(k, k);
    for i in 1..k {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..k {
        comp[(i, k - 1)] = -monic[i];
    }
    let eig = comp.complex_eigenvalues();
    let mut roots = Vec::with_capacity(k);
    for z in eig.iter() {
        if z.im.abs() > tol * (1.0 + z.re.abs()) {
            return Err(Error::ComplexRoots(format!(
                "root {} {:+}i of a degree-{k} kernel polynomial",
                z.re, z.im
            )));
        }
        roots.push(polish(&monic, z.re));
    }
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

fn polish(p: &[f64], mut x: f64) -> f64 {
    for _ in 0..4 {
        let (mut v, mut dv) = (0.0, 0.0);
        for &c in p.iter().rev() {
            dv = dv * x + v;
            v = v * x + c;
        }
        if dv == 0.0 {
            break;
        }
        let step = v / dv;
        if !step.is_finite() || step.abs() > 1e-3 * (1.0 + x.abs()) {
            break;
        }
        x -= step;
    }
    x
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightFit {
    pub weights: Vec<f64>,
    /// Largest relative mismatch over the moments used in the fit.
    pub residual: f64,
    /// Highest moment order used.
    pub top_moment: u32,
}

/// Weights `c_i` with `Σ_i c_i x_i^j ≈ s_j`, least squares over
/// `j = 0 … max(k−1, deg s − 1)` (the top moment is left out since a boundary
/// sequence only pins it down up to a nonnegative slack).
///
/// Rows are scaled by `max(1, max|x_i|)^{−j}` and the system is solved by SVD.
pub fn weights_from_atoms(atoms: &[f64], s: &MomentSequence, tol: f64) -> Result<WeightFit> {
    if s.n() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: s.n(),
        });
    }
    let k = atoms.len();
    if k == 0 {
        return Err(Error::Singular("no atoms".into()));
    }
    let deg = s.degree() as usize;
    let top = deg.saturating_sub(1).max(k - 1).min(deg);
    if top + 1 < k {
        return Err(Error::Singular(format!(
            "{k} atoms but only {} moments",
            top + 1
        )));
    }
    let xmax = atoms.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let rows = top + 1;
    let a = DMatrix::from_fn(rows, k, |j, i| (atoms[i] / xmax).powi(j as i32));
    let b = DVector::from_fn(rows, |j, _| s.at(j) / xmax.powi(j as i32));
    let svd = a.svd(true, true);
    let c = svd
        .solve(&b, 1e-14)
        .map_err(|e| Error::Singular(e.to_string()))?;
    let weights: Vec<f64> = c.iter().copied().collect();
    if let Some((i, w)) = weights
        .iter()
        .enumerate()
        .filter(|(_, w)| **w < -tol)
        .min_by(|x, y| x.1.total_cmp(y.1))
    {
        return Err(Error::NegativeWeight {
            atom: atoms[i],
            weight: *w,
        });
    }
    let residual = (0..rows)
        .map(|j| {
            let fit: f64 = atoms
                .iter()
                .zip(&weights)
                .map(|(x, c)| c * x.powi(j as i32))
                .sum();
            let alpha = MultiIndex::new(vec![j as u32]);
            (fit - s.at(j)).abs() / s.magnitude(&alpha).max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max);
    Ok(WeightFit {
        weights,
        residual,
        top_moment: top as u32,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryOptions {
    pub boundary: BoundaryOptions,
    /// Forward-check acceptance gate on the relative moment mismatch.
    pub residual_gate: f64,
    /// Negative weights below `−weight_tol` reject the atom set.
    pub weight_tol: f64,
    /// Kernel roots closer than `cluster_tol` times the length scale of the
    /// input (or the boundary, if larger) are tried as a single atom first.
    pub cluster_tol: f64,
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        RecoveryOptions {
            boundary: BoundaryOptions::default(),
            residual_gate: 1e-6,
            weight_tol: 1e-9,
            cluster_tol: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult {
    pub mixture: GaussianMixture,
    /// `(location, weight)` of the boundary measure.
    pub atoms: Vec<(f64, f64)>,
    pub delta: f64,
    pub residual: f64,
    /// The input had odd degree and was extended before recovery.
    pub augmented: bool,
    pub kernel_degenerate: bool,
    /// The alternate kernel polynomial produced the accepted result.
    pub used_alternate_kernel: bool,
    pub boundary: BoundaryReport,
}

/// Recovers `μ = Σ c_i Θ_{νδ}(x − x_i)` representing the interior sequence `s`.
pub fn recover_gaussian_mixture(
    s: &MomentSequence,
    nu: f64,
    opts: &RecoveryOptions,
) -> Result<RecoveryResult> {
    if s.n() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: s.n(),
        });
    }
    let augmented = s.degree() % 2 == 1;
    let work = augment_odd(s)?;
    let report = heat_distance_1d(&work, nu, &opts.boundary)?;
    if report.trivial {
        return Err(Error::InsufficientDegree {
            needed: 2,
            have: s.degree(),
        });
    }
    let boundary = report
        .boundary_sequence
        .clone()
        .expect("non-trivial report has a boundary sequence");
    let delta = report.distance;
    let primary = report.kernel_poly.clone().expect("kernel polynomial");

    let first = attempt(&primary, &boundary, s, nu, delta, opts);
    let (outcome, used_alt) = match (first, &report.kernel_poly_alt) {
        (Ok(ok), _) => (ok, false),
        (Err(e), Some(alt)) => {
            log::warn!("recovery with the minimal-degree kernel failed ({e}); retrying with the max-trailing kernel vector");
            match attempt(alt, &boundary, s, nu, delta, opts) {
                Ok(ok) => (ok, true),
                Err(e2) => {
                    log::warn!("retry failed as well: {e2}");
                    return Err(e2);
                }
            }
        }
        (Err(e), None) => return Err(e),
    };
    log::debug!(
        "recovered {} atoms at delta = {delta}, residual {:e}",
        outcome.atoms.len(),
        outcome.residual
    );
    Ok(RecoveryResult {
        mixture: outcome.mixture,
        atoms: outcome.atoms,
        delta,
        residual: outcome.residual,
        augmented,
        kernel_degenerate: report.kernel_degenerate,
        used_alternate_kernel: used_alt,
        boundary: report,
    })
}

struct Attempt {
    mixture: GaussianMixture,
    atoms: Vec<(f64, f64)>,
    residual: f64,
}

fn attempt(
    kernel: &[f64],
    boundary: &MomentSequence,
    s: &MomentSequence,
    nu: f64,
    delta: f64,
    opts: &RecoveryOptions,
) -> Result<Attempt> {
    let roots = merge_close(atoms_from_kernel(kernel, opts.boundary.root_imag_tol)?);
    // A rank deficit of two or more is only bracketed to about √eps, and the
    // near-multiple root then splits. Prefer the clustered atom set whenever
    // it passes the same forward check. The split width follows the error in
    // δ through the heat spread, not the atom locations, so the input scale
    // (which includes that spread) bounds it.
    let scale = s.length_scale().max(boundary.length_scale());
    let clustered = cluster(&roots, opts.cluster_tol * scale);
    if clustered.len() < roots.len() {
        match fit_atoms(&clustered, kernel, boundary, s, nu, delta, opts) {
            Ok(ok) => return Ok(ok),
            Err(e) => log::debug!("clustered atoms {clustered:?} rejected: {e}"),
        }
    }
    fit_atoms(&roots, kernel, boundary, s, nu, delta, opts)
}

/// Replaces each run of sorted roots with consecutive gaps `≤ tol` by its mean.
fn cluster(roots: &[f64], tol: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(roots.len());
    let mut run: Vec<f64> = Vec::new();
    for &r in roots {
        if run.last().is_some_and(|&x| r - x > tol) {
            out.push(run.iter().sum::<f64>() / run.len() as f64);
            run.clear();
        }
        run.push(r);
    }
    if !run.is_empty() {
        out.push(run.iter().sum::<f64>() / run.len() as f64);
    }
    out
}

fn fit_atoms(
    roots: &[f64],
    kernel: &[f64],
    boundary: &MomentSequence,
    s: &MomentSequence,
    nu: f64,
    delta: f64,
    opts: &RecoveryOptions,
) -> Result<Attempt> {
    let m = boundary.degree() / 2;
    let fit = weights_from_atoms(roots, &boundary.truncate(2 * m), opts.weight_tol)?;
    let components = roots
        .iter()
        .zip(&fit.weights)
        .map(|(&x, &c)| GaussianComponent {
            center: vec![x],
            weight: c,
            time: delta,
        })
        .collect();
    let mixture = GaussianMixture::new(1, nu, components)?;
    let forward = oracle_moments_gaussian_mixture(&mixture, s.degree());
    let residual = s.relative_mismatch(&forward);
    let atoms: Vec<(f64, f64)> = roots.iter().copied().zip(fit.weights).collect();
    if residual > opts.residual_gate {
        return Err(Error::ResidualTooLarge {
            residual,
            gate: opts.residual_gate,
            state: format!(
                "delta = {delta}, kernel = {kernel:?}, atoms = {atoms:?}, fit residual = {:e}",
                fit.residual
            ),
        });
    }
    Ok(Attempt {
        mixture,
        atoms,
        residual,
    })
}
