//! Independent moment oracles.
//!
//! None of these routines touch the flow machinery; they compute moments
//! directly from a measure (closed form or quadrature) or integrate the
//! moment ODE numerically, and serve as the reference side of every
//! verification.

mod ode;
mod quadrature;

pub use ode::{combined_moments_ode, dormand_prince, OdeOptions};
pub use quadrature::{adaptive_gauss_kronrod, oracle_moments_quadrature, QuadratureOptions};

use crate::measure::{AtomicMeasure, GaussianMixture};
use crate::multi_index::MultiIndex;
use crate::sequence::MomentSequence;

/// `s_α = Σ_i c_i x_i^α` for `|α| ≤ d`.
pub fn oracle_moments_atomic(mu: &AtomicMeasure, d: u32) -> MomentSequence {
    let n = mu.n();
    // per atom, per coordinate powers x^0..x^d
    let powers: Vec<Vec<Vec<f64>>> = mu
        .atoms()
        .iter()
        .map(|a| a.point.iter().map(|&x| power_table(x, d)).collect())
        .collect();
    MomentSequence::from_fn(n, d, |alpha| {
        mu.atoms()
            .iter()
            .zip(&powers)
            .map(|(atom, pw)| atom.weight * monomial_from_table(pw, alpha))
            .sum()
    })
}

/// Closed-form moments of `Σ c_i Θ_{ν t_i}(x − p_i)`.
///
/// Per coordinate `E[(p + Z)^m] = Σ_j C(m,2j) p^{m−2j} σ^{2j} (2j−1)!!` with
/// `σ² = 2νt_i`; coordinates are independent so the multivariate moment is
/// the product.
pub fn oracle_moments_gaussian_mixture(g: &GaussianMixture, d: u32) -> MomentSequence {
    let tables: Vec<Vec<Vec<f64>>> = g
        .components()
        .iter()
        .map(|c| {
            let var = 2.0 * g.nu() * c.time;
            c.center
                .iter()
                .map(|&p| shifted_gaussian_moments(p, var, d))
                .collect()
        })
        .collect();
    MomentSequence::from_fn(g.n(), d, |alpha| {
        g.components()
            .iter()
            .zip(&tables)
            .map(|(c, tab)| c.weight * monomial_from_table(tab, alpha))
            .sum()
    })
}

/// `E[(p + Z)^m]` for `m = 0..=d`, `Z ~ N(0, var)`.
pub fn shifted_gaussian_moments(p: f64, var: f64, d: u32) -> Vec<f64> {
    if var == 0.0 {
        return power_table(p, d);
    }
    let pw = power_table(p, d);
    // central moments E[Z^{2j}] = var^j (2j−1)!!
    let mut central = vec![0.0; d as usize + 1];
    central[0] = 1.0;
    let mut k = 2;
    while k <= d as usize {
        central[k] = central[k - 2] * var * (k as f64 - 1.0);
        k += 2;
    }
    (0..=d as usize)
        .map(|m| {
            let mut binom = 1.0;
            let mut total = 0.0;
            for k in 0..=m {
                if k % 2 == 0 {
                    total += binom * pw[m - k] * central[k];
                }
                binom = binom * (m - k) as f64 / (k + 1) as f64;
            }
            total
        })
        .collect()
}

/// `s_k = e^{k²/2}`, `k = 0..=d`.
pub fn stieltjes_sequence(d: u32) -> MomentSequence {
    MomentSequence::from_fn(1, d, |alpha| {
        let k = alpha.get(0) as f64;
        (k * k / 2.0).exp()
    })
}

fn power_table(x: f64, d: u32) -> Vec<f64> {
    let mut out = Vec::with_capacity(d as usize + 1);
    let mut acc = 1.0;
    for _ in 0..=d {
        out.push(acc);
        acc *= x;
    }
    out
}

fn monomial_from_table(table: &[Vec<f64>], alpha: &MultiIndex) -> f64 {
    alpha
        .entries()
        .iter()
        .zip(table)
        .map(|(&k, t)| t[k as usize])
        .product()
}
