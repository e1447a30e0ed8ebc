//! Moment flows: heat `𝔭_s`, transport `𝔱_s`, and their combination.
//!
//! Every flow is a [`MomentFlow`], a table `α ↦ ExpPoly` built once from the
//! initial moments and then evaluated at any real time.

mod dual;
mod measures;

pub use dual::{heat_dual_poly, transport_dual_poly};
pub use measures::{evolve_gaussian_mixture, transport_atomic};

use crate::error::{Error, Result};
use crate::exppoly::{default_resonance_tol, ExpPoly, Term};
use crate::multi_index::{binomial, enumerate_multiindices, MultiIndex};
use crate::sequence::MomentSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FlowKind {
    Heat,
    Transport,
    Combined,
}

impl FlowKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FlowKind::Heat => "heat",
            FlowKind::Transport => "transport",
            FlowKind::Combined => "combined",
        }
    }
}

impl std::str::FromStr for FlowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "heat" => Ok(FlowKind::Heat),
            "transport" => Ok(FlowKind::Transport),
            "combined" => Ok(FlowKind::Combined),
            other => Err(Error::InvalidParams(format!("unknown flow kind {other:?}"))),
        }
    }
}

/// Diffusion `ν`, drift `a` and the flow kind, validated together.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowParams {
    kind: FlowKind,
    nu: f64,
    a: Vec<f64>,
}

impl FlowParams {
    /// Heat needs `ν > 0, a = 0`; transport needs `ν = 0`; combined allows
    /// `ν ≥ 0` and any `a`.
    pub fn new(kind: FlowKind, nu: f64, a: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidParams(
                "drift vector must have dimension n ≥ 1".into(),
            ));
        }
        if !nu.is_finite() || a.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams("non-finite flow parameter".into()));
        }
        match kind {
            FlowKind::Heat => {
                if nu <= 0.0 {
                    return Err(Error::InvalidParams(format!(
                        "heat flow needs nu > 0, got {nu}"
                    )));
                }
                if a.iter().any(|&x| x != 0.0) {
                    return Err(Error::InvalidParams("heat flow needs a = 0".into()));
                }
            }
            FlowKind::Transport => {
                if nu != 0.0 {
                    return Err(Error::InvalidParams(format!(
                        "transport flow needs nu = 0, got {nu}"
                    )));
                }
            }
            FlowKind::Combined => {
                if nu < 0.0 {
                    return Err(Error::InvalidParams(format!(
                        "combined flow needs nu >= 0, got {nu}"
                    )));
                }
            }
        }
        Ok(FlowParams { kind, nu, a })
    }

    pub fn heat(n: usize, nu: f64) -> Result<Self> {
        Self::new(FlowKind::Heat, nu, vec![0.0; n])
    }

    pub fn transport(a: Vec<f64>) -> Result<Self> {
        Self::new(FlowKind::Transport, 0.0, a)
    }

    pub fn combined(nu: f64, a: Vec<f64>) -> Result<Self> {
        Self::new(FlowKind::Combined, nu, a)
    }

    pub fn kind(&self) -> FlowKind {
        self.kind
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// Builds the flow of `s` under these parameters.
    pub fn build(&self, s: &MomentSequence) -> Result<MomentFlow> {
        if s.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: s.n(),
                got: self.n(),
            });
        }
        Ok(match self.kind {
            FlowKind::Heat => heat_flow(s, self.nu)?,
            FlowKind::Transport => transport_flow(s, &self.a)?,
            FlowKind::Combined => combined_flow(s, self.nu, &self.a)?,
        })
    }
}

/// The moment flow of an initial sequence: one exponential polynomial per
/// multi-index, aligned with [`MomentSequence::indices`].
#[derive(Debug, Clone, PartialEq)]
pub struct MomentFlow {
    params: FlowParams,
    initial: MomentSequence,
    entries: Vec<ExpPoly>,
}

impl MomentFlow {
    /// Assembles a flow from precomputed entries (one per index of `initial`).
    pub fn from_parts(
        params: FlowParams,
        initial: MomentSequence,
        entries: Vec<ExpPoly>,
    ) -> Result<Self> {
        if entries.len() != initial.len() {
            return Err(Error::InvalidSequence(format!(
                "flow has {} entries for {} indices",
                entries.len(),
                initial.len()
            )));
        }
        if params.n() != initial.n() || entries.iter().any(|e| e.n() != initial.n()) {
            return Err(Error::DimensionMismatch {
                expected: initial.n(),
                got: params.n(),
            });
        }
        Ok(MomentFlow {
            params,
            initial,
            entries,
        })
    }

    pub fn n(&self) -> usize {
        self.initial.n()
    }

    pub fn degree(&self) -> u32 {
        self.initial.degree()
    }

    pub fn params(&self) -> &FlowParams {
        &self.params
    }

    pub fn initial(&self) -> &MomentSequence {
        &self.initial
    }

    pub fn entries(&self) -> &[ExpPoly] {
        &self.entries
    }

    pub fn entry(&self, alpha: &MultiIndex) -> Option<&ExpPoly> {
        self.initial.position(alpha).map(|i| &self.entries[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &ExpPoly)> {
        self.initial.indices().iter().zip(&self.entries)
    }
}

/// Entrywise evaluation; `t = 0` returns the initial sequence verbatim.
pub fn evaluate_flow(flow: &MomentFlow, t: f64) -> MomentSequence {
    if t == 0.0 {
        return flow.initial.clone();
    }
    let a = flow.params.a();
    let values = flow.entries.iter().map(|e| e.eval(a, t)).collect();
    MomentSequence::from_values(flow.n(), flow.degree(), values)
        .expect("flow entries match the index set")
}

/// Heat flow `∂_t s_α = ν Σ_j α_j(α_j−1) s_{α−2e_j}`, built by ascending
/// degree: `entries(α) = s_α(0) + ν ∫₀ᵗ Σ_j α_j(α_j−1) entries(α−2e_j)`.
pub fn heat_flow(s: &MomentSequence, nu: f64) -> Result<MomentFlow> {
    let n = s.n();
    let params = FlowParams::heat(n, nu)?;
    let zero_mu = vec![0i64; n];
    let zero_a = vec![0.0; n];
    let mut entries: Vec<ExpPoly> = Vec::with_capacity(s.len());
    for (alpha, s_alpha) in s.iter() {
        let (coeffs, lower) = lower_entries(s, &entries, alpha);
        let constant = ExpPoly::constant(n, s_alpha);
        if lower.is_empty() {
            entries.push(constant);
            continue;
        }
        let g = ExpPoly::linear_combine(&coeffs, &lower)?;
        let integral = g.integrate_with_rate(&zero_mu, &zero_a, 0.0).scale(nu);
        entries.push(integral.add(&constant));
    }
    MomentFlow::from_parts(params, s.clone(), entries)
}

/// `(α_j(α_j−1), entries(α−2e_j))` over the coordinates with `α_j ≥ 2`.
fn lower_entries<'a>(
    s: &MomentSequence,
    entries: &'a [ExpPoly],
    alpha: &MultiIndex,
) -> (Vec<f64>, Vec<&'a ExpPoly>) {
    let mut coeffs = Vec::new();
    let mut lower = Vec::new();
    for j in 0..s.n() {
        if let Some(beta) = alpha.lower_by_two(j) {
            let k = alpha.get(j) as f64;
            coeffs.push(k * (k - 1.0));
            lower.push(&entries[s.position(&beta).expect("lower index present")]);
        }
    }
    (coeffs, lower)
}

/// One-dimensional heat flow from the closed form
/// `s_m(t) = Σ_j m!/((m−2j)! j!) s_{m−2j}(0) (νt)^j`.
pub fn heat_flow_1d_closed(s: &MomentSequence, nu: f64) -> Result<MomentFlow> {
    if s.n() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: s.n(),
        });
    }
    let params = FlowParams::heat(1, nu)?;
    let entries = (0..=s.degree() as u64)
        .map(|m| {
            let terms = (0..=m / 2)
                .map(|j| {
                    // m!/((m−2j)! j!) = C(m, 2j) · (2j)!/j!
                    let falling: u64 = (j + 1..=2 * j).product();
                    let c = (binomial(m, 2 * j) * falling) as f64;
                    Term::new(
                        c * s.at((m - 2 * j) as usize) * nu.powi(j as i32),
                        j as u32,
                        vec![0],
                    )
                })
                .collect();
            ExpPoly::from_terms(1, terms)
        })
        .collect();
    MomentFlow::from_parts(params, s.clone(), entries)
}

/// Transport flow `𝔱_{s,α}(t) = s_α(0) e^{−Σ_i a_i(α_i+1) t}`.
pub fn transport_flow(s: &MomentSequence, a: &[f64]) -> Result<MomentFlow> {
    let n = s.n();
    check_drift(n, a)?;
    let params = FlowParams::transport(a.to_vec())?;
    let entries = s
        .iter()
        .map(|(alpha, v)| {
            let rate = alpha.shifted_by_one().iter().map(|m| -m).collect();
            ExpPoly::from_terms(n, vec![Term::new(v, 0, rate)])
        })
        .collect();
    MomentFlow::from_parts(params, s.clone(), entries)
}

/// Combined flow
/// `∂_t s_α = ν Σ_j α_j(α_j−1) s_{α−2e_j} − (Σ_j a_j(α_j+1)) s_α`,
/// solved by variation of constants for each index in ascending degree.
pub fn combined_flow(s: &MomentSequence, nu: f64, a: &[f64]) -> Result<MomentFlow> {
    combined_flow_with_tol(s, nu, a, default_resonance_tol(a))
}

/// [`combined_flow`] with an explicit resonance tolerance.
pub fn combined_flow_with_tol(
    s: &MomentSequence,
    nu: f64,
    a: &[f64],
    res_tol: f64,
) -> Result<MomentFlow> {
    let n = s.n();
    check_drift(n, a)?;
    let params = FlowParams::combined(nu, a.to_vec())?;
    let mut entries: Vec<ExpPoly> = Vec::with_capacity(s.len());
    for (alpha, s_alpha) in s.iter() {
        let rho = alpha.shifted_by_one();
        let minus_rho: Vec<i64> = rho.iter().map(|m| -m).collect();
        let (coeffs, lower) = lower_entries(s, &entries, alpha);
        let mut inner = ExpPoly::constant(n, s_alpha);
        if !lower.is_empty() && nu != 0.0 {
            let g = ExpPoly::linear_combine(&coeffs, &lower)?;
            let integral = g.integrate_with_rate(&rho, a, res_tol).scale(nu);
            inner = integral.add(&inner);
        }
        entries.push(inner.shift_rate(&minus_rho).reduce_rates(a, res_tol));
    }
    MomentFlow::from_parts(params, s.clone(), entries)
}

/// Smallest nonzero realized rate `|2 i·a|`, `i ∈ ℕⁿ ∖ {0}`, `|i| ≤ d/2`,
/// met by the combined-flow integrations of a degree-`d` sequence. Rates at
/// or below `res_tol` are resonant and integrate exactly, so they are
/// skipped; `+∞` when no rate qualifies.
///
/// Coefficients of the closed form grow like `1/r^{k+1}`, so evaluation
/// loses roughly `(k+1)! / (r|t|)^{k+1}` ulps when this gap is small.
pub fn resonance_gap(a: &[f64], d: u32, res_tol: f64) -> f64 {
    enumerate_multiindices(a.len(), d / 2)
        .iter()
        .skip(1)
        .map(|i| {
            2.0 * i
                .entries()
                .iter()
                .zip(a)
                .map(|(&k, x)| k as f64 * x)
                .sum::<f64>()
                .abs()
        })
        .filter(|&r| r > res_tol)
        .fold(f64::INFINITY, f64::min)
}

fn check_drift(n: usize, a: &[f64]) -> Result<()> {
    if a.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[f64]) -> MomentSequence {
        MomentSequence::one_dim(v).unwrap()
    }

    fn t1(coeff: f64, power: u32, rate: i64) -> Term {
        Term::new(coeff, power, vec![rate])
    }

    #[test]
    fn params_validation() {
        assert!(FlowParams::heat(1, 1.0).is_ok());
        assert!(FlowParams::heat(1, 0.0).is_err());
        assert!(FlowParams::new(FlowKind::Heat, 1.0, vec![1.0]).is_err());
        assert!(FlowParams::transport(vec![1.0]).is_ok());
        assert!(FlowParams::new(FlowKind::Transport, 1.0, vec![1.0]).is_err());
        assert!(FlowParams::combined(0.0, vec![-2.0]).is_ok());
        assert!(FlowParams::combined(-1.0, vec![0.0]).is_err());
    }

    #[test]
    fn heat_dirac_second_moment() {
        let f = heat_flow(&seq(&[1.0, 0.0, 0.0]), 1.0).unwrap();
        assert_eq!(f.entries()[2].terms(), &[t1(2.0, 1, 0)]);
        assert_eq!(evaluate_flow(&f, 1.0).values(), &[1.0, 0.0, 2.0]);
    }

    #[test]
    fn heat_gaussian_forward() {
        let f = heat_flow(&seq(&[1.0, 0.0, 1.0, 0.0, 3.0]), 1.0).unwrap();
        assert_eq!(evaluate_flow(&f, 0.5).values(), &[1.0, 0.0, 2.0, 0.0, 12.0]);
    }

    #[test]
    fn closed_form_low_orders() {
        let s = seq(&[2.0, 3.0, 5.0, 7.0, 11.0]);
        let f = heat_flow_1d_closed(&s, 1.0).unwrap();
        assert_eq!(f.entries()[2].terms(), &[t1(5.0, 0, 0), t1(4.0, 1, 0)]);
        assert_eq!(
            f.entries()[4].terms(),
            &[t1(11.0, 0, 0), t1(60.0, 1, 0), t1(24.0, 2, 0)]
        );
    }

    #[test]
    fn transport_examples() {
        let f = transport_flow(&seq(&[1.0, 0.0, 1.0]), &[1.0]).unwrap();
        let v = evaluate_flow(&f, 2f64.ln());
        assert!((v.at(0) - 0.5).abs() < 1e-15);
        assert!((v.at(2) - 0.125).abs() < 1e-15);

        let s2 = MomentSequence::from_values(2, 1, vec![1.0, 4.0, 2.0]).unwrap();
        let f = transport_flow(&s2, &[1.0, -1.0]).unwrap();
        let e = f.entry(&MultiIndex::new(vec![1, 0])).unwrap();
        assert_eq!(e.terms(), &[Term::new(4.0, 0, vec![-2, -1])]);
        assert!((e.eval(&[1.0, -1.0], 1.0) - 4.0 * (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn evaluate_at_zero_is_initial() {
        let s = seq(&[1.0, 0.3, 2.0, -1.0]);
        let f = combined_flow(&s, 0.7, &[0.4]).unwrap();
        assert_eq!(evaluate_flow(&f, 0.0), s);
    }

    #[test]
    fn combined_without_drift_matches_heat() {
        let s = seq(&[1.0, 0.0, 1.0, 0.0, 3.0]);
        let h = heat_flow(&s, 1.0).unwrap();
        let c = combined_flow(&s, 1.0, &[0.0]).unwrap();
        for (x, y) in h.entries().iter().zip(c.entries()) {
            assert!(x.same_terms(y), "{x:?} vs {y:?}");
        }
    }
}
