//! Heat distance to the moment-cone boundary and the boundary projection.
//!
//! For an interior one-dimensional sequence the backward heat curve
//! `t ↦ 𝔭_s(−t)` stays in the cone up to the heat distance `𝔡_s`, where the
//! Hankel matrix first becomes singular. The distance is located by scanning
//! the sign of `λ_min` and bisecting the first change.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::flows::{evaluate_flow, heat_flow, MomentFlow};
use crate::hankel::{
    build_hankel, classify_psd, kernel_polynomial_max_trailing, minimal_degree_kernel,
    sorted_eigen, HankelMatrix, PsdStatus,
};
use crate::multi_index::MultiIndex;
use crate::recovery::{atoms_from_kernel, weights_from_atoms};
use crate::sequence::MomentSequence;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryOptions {
    /// Absolute bisection tolerance in `t`.
    pub tol: f64,
    /// Eigenvalue tolerance for the interior check.
    pub psd_tol: f64,
    /// Relative eigenvalue threshold (on the Jacobi-scaled matrix) below which
    /// an eigenvector at the boundary counts as a kernel vector.
    pub kernel_tol: f64,
    pub scan_cells: usize,
    /// Relative residual allowed when reconstructed atoms reproduce the
    /// boundary moments in the membership test.
    pub membership_tol: f64,
    pub root_imag_tol: f64,
    /// Relative distance below the one-point bound within which a crossing
    /// is moved onto the bound when `H(−ub)` is PSD.
    pub snap_window: f64,
}

impl Default for BoundaryOptions {
    fn default() -> Self {
        BoundaryOptions {
            tol: 1e-10,
            psd_tol: 1e-10,
            kernel_tol: 1e-8,
            scan_cells: 128,
            membership_tol: 1e-6,
            root_imag_tol: 1e-6,
            snap_window: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperBound {
    /// `+∞` in the trivial cases.
    pub value: f64,
    /// Degree below 2 or the zero sequence: the whole real line is admissible.
    pub trivial: bool,
}

/// One-point bound `𝔡_s ≤ (Σ_i s_{2e_i}) / (2n s_0 ν)`.
pub fn distance_upper_bound(s: &MomentSequence, nu: f64) -> Result<UpperBound> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::InvalidParams(format!("nu = {nu} must be > 0")));
    }
    if s.degree() < 2 || s.is_zero() {
        return Ok(UpperBound {
            value: f64::INFINITY,
            trivial: true,
        });
    }
    if s.s0() <= 0.0 {
        return Err(Error::NonPositiveMass(s.s0()));
    }
    let n = s.n();
    let second: f64 = (0..n).map(|j| s.value(&MultiIndex::axis(n, j, 2))).sum();
    Ok(UpperBound {
        value: second / (2.0 * n as f64 * s.s0() * nu),
        trivial: false,
    })
}

/// Outcome of the 1-D boundary membership test: atoms reconstructed from the
/// kernel polynomial, their weights, and how well they explain the moments.
#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub atoms: Vec<f64>,
    pub weights: Vec<f64>,
    /// Relative mismatch on moments `0 … 2m−1`.
    pub residual: f64,
    /// `s_{2m} − ∫ x^{2m} dμ`, relative to the natural magnitude of `s_{2m}`.
    pub top_slack: f64,
    pub passed: bool,
    /// Why the test failed, when it did.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryDiagnostics {
    pub scan_cells: usize,
    /// Scan cell `[lo, hi]` holding the first crossing.
    pub bracket: (f64, f64),
    pub bisection_steps: usize,
    /// The crossing fell just below the one-point bound, `H(−ub)` was PSD,
    /// and the distance was set to the bound exactly.
    pub snapped_to_bound: bool,
    /// `λ_min` of the Jacobi-scaled Hankel matrix at the boundary.
    pub scaled_min_eigenvalue: f64,
    /// LU determinants of the unscaled Hankel matrix at the bracket ends.
    pub det_bracket: (f64, f64),
    pub kernel_dim: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryReport {
    /// `𝔡_s`; `+∞` in the trivial cases.
    pub distance: f64,
    /// Whether `𝔭_s(−𝔡_s)` itself lies in the cone.
    pub interval_closed: bool,
    pub upper_bound: f64,
    pub trivial: bool,
    /// An odd top moment was dropped for the Hankel analysis.
    pub truncated_odd: bool,
    /// `𝔭_s(−𝔡_s)` over the full input degree.
    pub boundary_sequence: Option<MomentSequence>,
    pub kernel_poly: Option<Vec<f64>>,
    /// Alternate kernel polynomial, present when the kernel is degenerate.
    pub kernel_poly_alt: Option<Vec<f64>>,
    pub kernel_degenerate: bool,
    pub membership: Option<Membership>,
    pub diagnostics: Option<BoundaryDiagnostics>,
}

impl BoundaryReport {
    fn trivial(upper_bound: f64) -> Self {
        BoundaryReport {
            distance: f64::INFINITY,
            interval_closed: false,
            upper_bound,
            trivial: true,
            truncated_odd: false,
            boundary_sequence: None,
            kernel_poly: None,
            kernel_poly_alt: None,
            kernel_degenerate: false,
            membership: None,
            diagnostics: None,
        }
    }
}

/// `D H D` of the backward-evolved Hankel matrix.
struct Probe<'a> {
    flow: &'a MomentFlow,
    order: usize,
}

impl Probe<'_> {
    fn hankel(&self, t: f64) -> HankelMatrix {
        build_hankel(&evaluate_flow(self.flow, -t), self.order).expect("degree checked")
    }

    /// Positive definiteness of `H(𝔭_s(−t))`, decided on the Jacobi-scaled
    /// matrix (same inertia by Sylvester's law).
    fn is_pd(&self, t: f64) -> bool {
        let h = self.hankel(t);
        if (0..=self.order).any(|i| h.entry(i, i) <= 0.0) {
            return false;
        }
        let (scaled, _) = h.jacobi_scaled();
        sorted_eigen(&scaled)[0].0 > 0.0
    }
}

/// Heat distance of a one-dimensional sequence to the cone boundary.
pub fn heat_distance_1d(
    s: &MomentSequence,
    nu: f64,
    opts: &BoundaryOptions,
) -> Result<BoundaryReport> {
    if s.n() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: s.n(),
        });
    }
    let ub = distance_upper_bound(s, nu)?;
    if ub.trivial {
        return Ok(BoundaryReport::trivial(ub.value));
    }
    let m = (s.degree() / 2) as usize;
    let truncated_odd = s.degree() % 2 == 1;
    let even = s.truncate(2 * m as u32);

    let h0 = build_hankel(&even, m)?;
    let r0 = classify_psd(&h0, opts.psd_tol);
    if r0.status != PsdStatus::PositiveDefinite {
        return Err(Error::NotInterior {
            min_eigenvalue: r0.min_eigenvalue,
        });
    }

    let flow = heat_flow(&even, nu)?;
    let probe = Probe {
        flow: &flow,
        order: m,
    };
    let cells = opts.scan_cells.max(1);
    let grid = |i: usize| ub.value * i as f64 / cells as f64;

    let first = (1..=cells).find(|&i| !probe.is_pd(grid(i)));
    let (mut lo, mut hi, snapped_at_end) = match first {
        Some(i) => (grid(i - 1), grid(i), false),
        None => {
            // Rounding can leave H(−ub) barely PD when the bound is attained.
            let status = classify_psd(&probe.hankel(ub.value), opts.kernel_tol).status;
            if status == PsdStatus::PsdSingular {
                (ub.value, ub.value, true)
            } else {
                return Err(Error::BracketingFailed(format!(
                    "Hankel matrix stays positive definite on [0, {}] over {cells} cells; scaled status at the bound: {}",
                    ub.value,
                    status.as_str()
                )));
            }
        }
    };
    let bracket = (lo, hi);
    let mut steps = 0;
    while hi - lo > opts.tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if probe.is_pd(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        steps += 1;
    }
    let mut distance = 0.5 * (lo + hi);
    let mut snapped = snapped_at_end;
    // If H(−ub) is still PSD the bound itself is the distance. Near such a
    // point the crossing is only resolved to about sqrt(eps), hence the
    // relative window rather than the bisection tolerance.
    if !snapped
        && ub.value - distance <= opts.snap_window * ub.value.max(opts.tol)
        && classify_psd(&probe.hankel(ub.value), opts.kernel_tol).status != PsdStatus::Indefinite
    {
        distance = ub.value;
        snapped = true;
    }

    let h_b = probe.hankel(distance);
    let (scaled, dscale) = h_b.jacobi_scaled();
    let pairs = sorted_eigen(&scaled);
    let scaled_min = pairs[0].0;
    let scale = pairs.iter().fold(1.0f64, |m, p| m.max(p.0.abs()));
    let mut basis: Vec<Vec<f64>> = pairs
        .iter()
        .filter(|p| p.0.abs() <= opts.kernel_tol * scale)
        .map(|p| unscale(&p.1, &dscale))
        .collect();
    if basis.is_empty() {
        basis.push(unscale(&pairs[0].1, &dscale));
    }
    let kernel_dim = basis.len();
    let kernel = minimal_degree_kernel(&basis)?;
    let kernel_alt = if kernel_dim > 1 {
        Some(kernel_polynomial_max_trailing(&crate::hankel::PsdReport {
            status: PsdStatus::PsdSingular,
            min_eigenvalue: scaled_min,
            eigenvalues: pairs.iter().map(|p| p.0).collect(),
            kernel_basis: basis.clone(),
            scale,
        })?)
    } else {
        None
    };

    let boundary_sequence = if truncated_odd {
        evaluate_flow(&heat_flow(s, nu)?, -distance)
    } else {
        evaluate_flow(&flow, -distance)
    };
    let even_boundary = boundary_sequence.truncate(2 * m as u32);
    let membership = membership_test(&kernel, &even_boundary, opts);

    let det_bracket = (
        probe.hankel(bracket.0).determinant(),
        probe.hankel(bracket.1).determinant(),
    );
    Ok(BoundaryReport {
        distance,
        interval_closed: membership.passed,
        upper_bound: ub.value,
        trivial: false,
        truncated_odd,
        boundary_sequence: Some(boundary_sequence),
        kernel_poly: Some(kernel),
        kernel_poly_alt: kernel_alt,
        kernel_degenerate: kernel_dim > 1,
        membership: Some(membership),
        diagnostics: Some(BoundaryDiagnostics {
            scan_cells: cells,
            bracket,
            bisection_steps: steps,
            snapped_to_bound: snapped,
            scaled_min_eigenvalue: scaled_min,
            det_bracket,
            kernel_dim,
        }),
    })
}

fn unscale(w: &[f64], d: &DVector<f64>) -> Vec<f64> {
    w.iter().zip(d.iter()).map(|(x, s)| x * s).collect()
}

/// Boundary membership for `s` of degree `2m`: the atoms of the kernel
/// polynomial must carry nonnegative weights reproducing `s_0 … s_{2m−1}`,
/// and `s_{2m}` may exceed the reconstructed top moment by a slack `≥ 0`.
fn membership_test(kernel: &[f64], s: &MomentSequence, opts: &BoundaryOptions) -> Membership {
    let fail =
        |atoms: Vec<f64>, weights: Vec<f64>, residual: f64, slack: f64, why: String| Membership {
            atoms,
            weights,
            residual,
            top_slack: slack,
            passed: false,
            failure: Some(why),
        };
    let atoms = match atoms_from_kernel(kernel, opts.root_imag_tol) {
        Ok(a) => a,
        Err(e) => return fail(vec![], vec![], f64::NAN, f64::NAN, e.to_string()),
    };
    let atoms = merge_close(atoms);
    let fit = match weights_from_atoms(&atoms, s, opts.membership_tol) {
        Ok(f) => f,
        Err(e) => return fail(atoms, vec![], f64::NAN, f64::NAN, e.to_string()),
    };
    let top = 2 * (s.degree() / 2) as usize;
    let reconstructed: f64 = atoms
        .iter()
        .zip(&fit.weights)
        .map(|(x, c)| c * x.powi(top as i32))
        .sum();
    let top_index = MultiIndex::new(vec![top as u32]);
    let slack = (s.at(top) - reconstructed) / s.magnitude(&top_index);
    if fit.residual > opts.membership_tol {
        let why = format!(
            "moment residual {:e} above {:e}",
            fit.residual, opts.membership_tol
        );
        return fail(atoms, fit.weights, fit.residual, slack, why);
    }
    if slack < -opts.membership_tol {
        let why = format!("top moment slack {slack:e} is negative");
        return fail(atoms, fit.weights, fit.residual, slack, why);
    }
    Membership {
        atoms,
        weights: fit.weights,
        residual: fit.residual,
        top_slack: slack,
        passed: true,
        failure: None,
    }
}

/// Collapses roots that coincide under the atom merge rule.
pub(crate) fn merge_close(mut roots: Vec<f64>) -> Vec<f64> {
    roots.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(roots.len());
    let mut count = 0.0;
    for r in roots {
        match out.last_mut() {
            Some(last) if crate::measure::points_coincide(&[*last], &[r]) => {
                count += 1.0;
                *last += (r - *last) / count;
            }
            _ => {
                out.push(r);
                count = 1.0;
            }
        }
    }
    out
}

/// `s ↦ (𝔭_s(−𝔡_s), 𝔡_s)`.
pub fn boundary_project(
    s: &MomentSequence,
    nu: f64,
    opts: &BoundaryOptions,
) -> Result<(MomentSequence, f64)> {
    let report = heat_distance_1d(s, nu, opts)?;
    match report.boundary_sequence {
        Some(b) => Ok((b, report.distance)),
        None => Err(Error::InvalidSequence(
            "degree below 2 or zero sequence: the heat curve never leaves the cone".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[f64]) -> MomentSequence {
        MomentSequence::one_dim(v).unwrap()
    }

    #[test]
    fn upper_bounds() {
        assert_eq!(
            distance_upper_bound(&seq(&[1.0, 0.0, 1.0]), 1.0)
                .unwrap()
                .value,
            0.5
        );
        let s2 = MomentSequence::from_values(2, 2, vec![1.0, 0.0, 0.0, 2.0, 0.0, 2.0]).unwrap();
        assert_eq!(distance_upper_bound(&s2, 1.0).unwrap().value, 1.0);
        assert_eq!(distance_upper_bound(&s2, 2.0).unwrap().value, 0.5);
        assert!(
            distance_upper_bound(&seq(&[1.0, 0.3]), 1.0)
                .unwrap()
                .trivial
        );
        assert!(matches!(
            distance_upper_bound(&seq(&[-1.0, 0.0, 1.0]), 1.0),
            Err(Error::NonPositiveMass(_))
        ));
    }

    #[test]
    fn two_atom_instance() {
        let r =
            heat_distance_1d(&seq(&[1.0, 0.0, 3.0, 0.0, 25.0]), 1.0, &Default::default()).unwrap();
        assert!((r.distance - 1.0).abs() < 1e-9);
        assert_eq!(r.upper_bound, 1.5);
        let b = r.boundary_sequence.unwrap();
        for (x, y) in b.values().iter().zip([1.0, 0.0, 1.0, 0.0, 1.0]) {
            assert!((x - y).abs() < 1e-9);
        }
        let k = r.kernel_poly.unwrap();
        assert!((k[0] + 1.0).abs() < 1e-8 && k[1].abs() < 1e-8 && k[2] == 1.0);
        assert!(r.interval_closed);
    }

    #[test]
    fn gaussian_reaches_dirac() {
        let r =
            heat_distance_1d(&seq(&[1.0, 0.0, 1.0, 0.0, 3.0]), 1.0, &Default::default()).unwrap();
        assert_eq!(r.distance, 0.5);
        assert!(r.kernel_degenerate);
        assert_eq!(r.kernel_poly.as_deref(), Some(&[0.0, 1.0][..]));
        let b = r.boundary_sequence.unwrap();
        assert!(b.values().iter().skip(1).all(|v| v.abs() < 1e-12));
        assert!(r.interval_closed);
    }

    #[test]
    fn boundary_input_is_rejected() {
        let r = heat_distance_1d(&seq(&[1.0, 0.0, 1.0, 0.0, 1.0]), 1.0, &Default::default());
        assert!(matches!(r, Err(Error::NotInterior { .. })));
    }

    #[test]
    fn merges_close_roots() {
        assert_eq!(merge_close(vec![1.0, -1.0, 1.0 + 1e-12]).len(), 2);
    }
}
