//! Dual actions of the flows on polynomials (the Riesz adjoints).

use crate::error::{Error, Result};
use crate::sequence::Polynomial;

/// `p_t = Σ_k (νt)^k Δ^k p₀ / k!`, a finite sum because `Δ` lowers degree.
///
/// Satisfies `L_{𝔭_s(t)}(p₀) = L_s(p_t)` and `deg p_t = deg p₀`.
pub fn heat_dual_poly(p0: &Polynomial, nu: f64, t: f64) -> Polynomial {
    let mut out = p0.clone();
    let mut lap = p0.clone();
    let mut factor = 1.0;
    let mut k = 1.0;
    loop {
        lap = lap.laplacian();
        if lap.is_zero() {
            return out;
        }
        factor *= nu * t / k;
        out = out.add(&lap.scale(factor));
        k += 1.0;
    }
}

/// `p_t = Σ_α c_α e^{(Σ_i a_i α_i) t} x^α`.
///
/// Satisfies `L_{𝔱_s(t)}(p_t) = e^{−(Σ_i a_i) t} L_s(p₀)`.
pub fn transport_dual_poly(p0: &Polynomial, a: &[f64], t: f64) -> Result<Polynomial> {
    if a.len() != p0.n() {
        return Err(Error::DimensionMismatch {
            expected: p0.n(),
            got: a.len(),
        });
    }
    Ok(p0.map_coeffs(|alpha, c| {
        let r: f64 = alpha
            .entries()
            .iter()
            .zip(a)
            .map(|(&k, &x)| k as f64 * x)
            .sum();
        c * (r * t).exp()
    }))
}
