//! Dormand–Prince 5(4) reference integrator for the moment ODE
//! `∂_t s_α = ν Σ_j α_j(α_j−1) s_{α−2e_j} − (Σ_j a_j(α_j+1)) s_α`.

use crate::error::{Error, Result};
use crate::sequence::MomentSequence;

/// Per-component error weight is `atol + rtol · |y|`. The default is
/// relative-dominant so that strongly decaying moments keep their relative
/// accuracy.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-14,
            max_steps: 1_000_000,
        }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order weights equal the last row of A; these are the fourth-order ones
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction) with an
/// embedded 5(4) pair and standard step-size control.
pub fn dormand_prince<F>(
    mut f: F,
    y0: &[f64],
    t0: f64,
    t1: f64,
    opts: OdeOptions,
) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let m = y0.len();
    let mut y = y0.to_vec();
    if t1 == t0 {
        return Ok(y);
    }
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    let mut t = t0;
    let mut h = dir * (span * 1e-3).max(1e-8).min(span);
    let mut k = vec![vec![0.0; m]; 7];
    let mut stage = vec![0.0; m];
    let mut y_new = vec![0.0; m];
    f(t, &y, &mut k[0]);
    for _ in 0..opts.max_steps {
        if (t1 - t) * dir <= 0.0 {
            return Ok(y);
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        for s in 1..7 {
            for i in 0..m {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += h * A[s][j] * kj[i];
                }
                stage[i] = acc;
            }
            let (done, rest) = k.split_at_mut(s);
            let _ = done;
            f(t + C[s] * h, &stage, &mut rest[0]);
        }
        // stage 6 was evaluated at the fifth-order solution (FSAL)
        y_new.copy_from_slice(&stage);
        let mut err_sq = 0.0;
        for i in 0..m {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                let b5 = if j < 6 { A[6][j] } else { 0.0 };
                e += h * (b5 - B4[j]) * kj[i];
            }
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err_sq += (e / sc).powi(2);
        }
        let err = (err_sq / m.max(1) as f64).sqrt();
        if !err.is_finite() {
            return Err(Error::OdeFailure {
                t,
                reason: "non-finite error estimate".into(),
            });
        }
        if err <= 1.0 {
            t += h;
            y.copy_from_slice(&y_new);
            let last = k[6].clone();
            k[0] = last;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h.abs() < 1e-14 * span.max(1.0) {
            return Err(Error::OdeFailure {
                t,
                reason: "step size underflow".into(),
            });
        }
    }
    Err(Error::OdeFailure {
        t,
        reason: "step budget exhausted".into(),
    })
}

/// Moments of the combined flow at time `t`, by numerical integration of the
/// moment ODE from the initial sequence.
pub fn combined_moments_ode(
    s: &MomentSequence,
    nu: f64,
    a: &[f64],
    t: f64,
    opts: OdeOptions,
) -> Result<MomentSequence> {
    let n = s.n();
    if a.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.len(),
        });
    }
    struct Row {
        decay: f64,
        sources: Vec<(usize, f64)>,
    }
    let rows: Vec<Row> = s
        .indices()
        .iter()
        .map(|alpha| {
            let decay = (0..n)
                .map(|j| a[j] * (alpha.get(j) as f64 + 1.0))
                .sum::<f64>();
            let sources = (0..n)
                .filter_map(|j| {
                    let k = alpha.get(j) as f64;
                    alpha
                        .lower_by_two(j)
                        .map(|b| (s.position(&b).expect("lower index"), nu * k * (k - 1.0)))
                })
                .collect();
            Row { decay, sources }
        })
        .collect();
    let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
        for (i, row) in rows.iter().enumerate() {
            let mut v = -row.decay * y[i];
            for &(j, c) in &row.sources {
                v += c * y[j];
            }
            dy[i] = v;
        }
    };
    let y = dormand_prince(rhs, s.values(), 0.0, t, opts)?;
    MomentSequence::from_values(n, s.degree(), y)
}
