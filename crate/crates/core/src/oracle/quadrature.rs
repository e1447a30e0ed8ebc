//! Adaptive Gauss–Kronrod quadrature for moment integrals.
//!
//! The one-dimensional driver is vector valued so that all moments of a
//! density share function evaluations. Boxes in up to three dimensions are
//! handled by nesting the driver coordinate by coordinate.

use crate::error::{Error, Result};
use crate::multi_index::{enumerate_multiindices, MultiIndex};
use crate::sequence::MomentSequence;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss 7-point weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    /// Subinterval budget per one-dimensional integral.
    pub max_intervals: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            max_intervals: 4000,
        }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: Vec<f64>,
}

impl Segment {
    fn worst(&self) -> f64 {
        self.error.iter().copied().fold(0.0, f64::max)
    }
}

fn gk15<F>(f: &mut F, a: f64, b: f64) -> Result<Segment>
where
    F: FnMut(f64) -> Result<Vec<f64>>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let m = fc.len();
    let mut kronrod: Vec<f64> = fc.iter().map(|v| v * WGK[7]).collect();
    let mut gauss: Vec<f64> = fc.iter().map(|v| v * WG[3]).collect();
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        for i in 0..m {
            let sum = f1[i] + f2[i];
            kronrod[i] += WGK[j] * sum;
            if j % 2 == 1 {
                gauss[i] += WG[j / 2] * sum;
            }
        }
    }
    let value: Vec<f64> = kronrod.iter().map(|k| k * half).collect();
    let error = kronrod
        .iter()
        .zip(&gauss)
        .map(|(k, g)| ((k - g) * half).abs())
        .collect();
    Ok(Segment { a, b, value, error })
}

/// Globally adaptive 7–15 Gauss–Kronrod integration of a vector-valued
/// integrand on `[a, b]`.
///
/// Returns the integral and the achieved error estimate (largest component of
/// the summed local error estimates). Fails when the estimate stays above
/// `tol` after `max_intervals` subdivisions.
pub fn adaptive_gauss_kronrod<F>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
    opts: QuadratureOptions,
) -> Result<(Vec<f64>, f64)>
where
    F: FnMut(f64) -> Result<Vec<f64>>,
{
    let mut segments = vec![gk15(&mut f, a, b)?];
    loop {
        let m = segments[0].value.len();
        let mut total_err = vec![0.0; m];
        for s in &segments {
            for (t, e) in total_err.iter_mut().zip(&s.error) {
                *t += e;
            }
        }
        let estimate = total_err.iter().copied().fold(0.0, f64::max);
        if estimate <= tol {
            let mut value = vec![0.0; m];
            for s in &segments {
                for (v, x) in value.iter_mut().zip(&s.value) {
                    *v += x;
                }
            }
            return Ok((value, estimate));
        }
        if segments.len() >= opts.max_intervals {
            return Err(Error::QuadratureNonConvergence { estimate, tol });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .map(|(i, s)| (i, s.worst()))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if !(mid > seg.a && mid < seg.b) {
            return Err(Error::QuadratureNonConvergence { estimate, tol });
        }
        segments.push(gk15(&mut f, seg.a, mid)?);
        segments.push(gk15(&mut f, mid, seg.b)?);
    }
}

/// Moments `∫_box x^α ρ(x) dx`, `|α| ≤ d`, of a density on a box in up to
/// three dimensions, each entry to absolute tolerance `tol`.
///
/// The caller picks a box whose exterior mass is negligible.
pub fn oracle_moments_quadrature(
    density: &dyn Fn(&[f64]) -> f64,
    bounds: &[(f64, f64)],
    d: u32,
    tol: f64,
    opts: QuadratureOptions,
) -> Result<MomentSequence> {
    let n = bounds.len();
    if n == 0 || n > 3 {
        return Err(Error::InvalidParams(format!(
            "quadrature oracle supports 1 ≤ n ≤ 3, got {n}"
        )));
    }
    let mut prefix = Vec::with_capacity(n);
    let values = nested(density, bounds, 0, &mut prefix, d, tol, opts)?;
    MomentSequence::from_values(n, d, values)
}

/// Integrates coordinates `k..n` with `prefix` fixing coordinates `0..k`.
/// The result is indexed by `enumerate_multiindices(n − k, d)`.
fn nested(
    density: &dyn Fn(&[f64]) -> f64,
    bounds: &[(f64, f64)],
    k: usize,
    prefix: &mut Vec<f64>,
    d: u32,
    tol: f64,
    opts: QuadratureOptions,
) -> Result<Vec<f64>> {
    let n = bounds.len();
    let (lo, hi) = bounds[k];
    let width = (hi - lo).abs().max(f64::MIN_POSITIVE);
    let own = enumerate_multiindices(n - k, d);
    let inner_idx = if k + 1 < n {
        enumerate_multiindices(n - k - 1, d)
    } else {
        Vec::new()
    };
    let inner_tol = tol / (2.0 * width);
    let integrand = |x: f64| -> Result<Vec<f64>> {
        prefix.push(x);
        let inner = if k + 1 < n {
            nested(density, bounds, k + 1, prefix, d, inner_tol, opts)
        } else {
            Ok(vec![density(prefix)])
        };
        prefix.pop();
        let inner = inner?;
        Ok(own
            .iter()
            .map(|alpha| {
                let head = alpha.get(0);
                let rest = if k + 1 < n {
                    let tail = MultiIndex::new(alpha.entries()[1..].to_vec());
                    inner[inner_idx.binary_search(&tail).expect("tail index")]
                } else {
                    inner[0]
                };
                x.powi(head as i32) * rest
            })
            .collect())
    };
    let outer_tol = if k + 1 < n { tol / 2.0 } else { tol };
    adaptive_gauss_kronrod(integrand, lo, hi, outer_tol, opts).map(|(v, _)| v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let (v, err) = adaptive_gauss_kronrod(
            |x| Ok(vec![x.powi(6), 1.0]),
            -1.0,
            2.0,
            1e-12,
            QuadratureOptions::default(),
        )
        .unwrap();
        assert!((v[0] - (128.0 + 1.0) / 7.0).abs() < 1e-12);
        assert!((v[1] - 3.0).abs() < 1e-14);
        assert!(err <= 1e-12);
    }

    #[test]
    fn budget_exhaustion_reports_estimate() {
        let res = adaptive_gauss_kronrod(
            |x: f64| Ok(vec![(1.0 / x.abs().max(1e-300)).sqrt()]),
            -1.0,
            1.0,
            1e-14,
            QuadratureOptions { max_intervals: 8 },
        );
        match res {
            Err(Error::QuadratureNonConvergence { estimate, tol }) => {
                assert!(estimate > tol);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn rejects_four_dimensions() {
        let r = oracle_moments_quadrature(&|_| 1.0, &[(0.0, 1.0); 4], 1, 1e-8, Default::default());
        assert!(r.is_err());
    }
}
