//! Exponential polynomials `Σ c · t^k · e^{(m·a) t}` with integer rate
//! vectors `m`.
//!
//! The realized rate `m·a` depends on an ambient drift vector `a` that is
//! passed in at evaluation and integration time. Keeping `m` integral means a
//! zero drift produces exactly-zero exponents, so heat-flow entries are plain
//! polynomials in `t` with no rounding in the rates.

use std::cmp::Ordering;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: f64,
    pub power: u32,
    pub rate: Vec<i64>,
    /// Set when the term came out of a resonant integration step whose
    /// integer rate is nonzero but realizes to (numerically) zero. Audit only:
    /// evaluation always uses `rate · a`.
    pub resonant: bool,
}

impl Term {
    pub fn new(coeff: f64, power: u32, rate: Vec<i64>) -> Self {
        Term {
            coeff,
            power,
            rate,
            resonant: false,
        }
    }

    fn key_cmp(&self, other: &Term) -> Ordering {
        self.rate
            .cmp(&other.rate)
            .then(self.power.cmp(&other.power))
    }
}

/// Default resonance tolerance `1e-12 · (1 + ‖a‖₁)`.
pub fn default_resonance_tol(a: &[f64]) -> f64 {
    1e-12 * (1.0 + a.iter().map(|x| x.abs()).sum::<f64>())
}

fn realized(rate: &[i64], a: &[f64]) -> f64 {
    rate.iter().zip(a).map(|(&m, &x)| m as f64 * x).sum()
}

/// A finite exponential polynomial in canonical form: terms sorted by
/// `(rate, power)`, at most one term per pair, no exactly-zero coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpPoly {
    n: usize,
    terms: Vec<Term>,
}

impl ExpPoly {
    pub fn zero(n: usize) -> Self {
        ExpPoly { n, terms: vec![] }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self::from_terms(n, vec![Term::new(c, 0, vec![0; n])])
    }

    /// Canonicalizes the given terms. Panics if a rate vector has the wrong
    /// dimension.
    pub fn from_terms(n: usize, terms: Vec<Term>) -> Self {
        for t in &terms {
            assert_eq!(t.rate.len(), n, "rate vector dimension");
        }
        ExpPoly { n, terms }.canonicalize()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest power of `t` present (0 for the zero function).
    pub fn max_power(&self) -> u32 {
        self.terms.iter().map(|t| t.power).max().unwrap_or(0)
    }

    /// Merges like terms and drops exact zeros. Nothing is pruned by size.
    pub fn canonicalize(mut self) -> Self {
        self.terms.sort_by(|x, y| x.key_cmp(y));
        let mut out: Vec<Term> = Vec::with_capacity(self.terms.len());
        for t in self.terms {
            match out.last_mut() {
                Some(last) if last.key_cmp(&t) == Ordering::Equal => {
                    last.coeff += t.coeff;
                    last.resonant |= t.resonant;
                }
                _ => out.push(t),
            }
        }
        out.retain(|t| t.coeff != 0.0);
        ExpPoly {
            n: self.n,
            terms: out,
        }
    }

    /// Same terms up to the audit flag.
    pub fn same_terms(&self, other: &ExpPoly) -> bool {
        self.n == other.n
            && self.terms.len() == other.terms.len()
            && self
                .terms
                .iter()
                .zip(&other.terms)
                .all(|(x, y)| x.coeff == y.coeff && x.power == y.power && x.rate == y.rate)
    }

    /// `Σ c t^k e^{(m·a)t}`; each distinct rate vector costs one exponential.
    ///
    /// The zero-rate group is added last, which lets [`integrate_with_rate`]
    /// pick its constant so that the value at `t = 0` is exactly zero.
    ///
    /// [`integrate_with_rate`]: ExpPoly::integrate_with_rate
    pub fn eval(&self, a: &[f64], t: f64) -> f64 {
        debug_assert_eq!(a.len(), self.n);
        let mut total = 0.0;
        let mut zero_group = 0.0;
        let mut i = 0;
        while i < self.terms.len() {
            let rate = &self.terms[i].rate;
            let mut poly = 0.0;
            let mut j = i;
            while j < self.terms.len() && &self.terms[j].rate == rate {
                poly += self.terms[j].coeff * t.powi(self.terms[j].power as i32);
                j += 1;
            }
            if rate.iter().all(|&m| m == 0) {
                zero_group = poly;
            } else {
                let r = realized(rate, a);
                total += if r == 0.0 { poly } else { poly * (r * t).exp() };
            }
            i = j;
        }
        total + zero_group
    }

    pub fn scale(&self, c: f64) -> ExpPoly {
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                coeff: c * t.coeff,
                ..t.clone()
            })
            .collect();
        ExpPoly { n: self.n, terms }.canonicalize()
    }

    pub fn add(&self, other: &ExpPoly) -> ExpPoly {
        assert_eq!(self.n, other.n, "exppoly dimension");
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        ExpPoly { n: self.n, terms }.canonicalize()
    }

    /// Canonical `Σ c_i f_i`.
    pub fn linear_combine(coeffs: &[f64], fs: &[&ExpPoly]) -> Result<ExpPoly> {
        if coeffs.len() != fs.len() {
            return Err(Error::DimensionMismatch {
                expected: fs.len(),
                got: coeffs.len(),
            });
        }
        let n = match fs.first() {
            Some(f) => f.n,
            None => return Ok(ExpPoly::zero(0)),
        };
        let mut terms = Vec::new();
        for (&c, f) in coeffs.iter().zip(fs) {
            if f.n != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: f.n,
                });
            }
            terms.extend(f.terms.iter().map(|t| Term {
                coeff: c * t.coeff,
                ..t.clone()
            }));
        }
        Ok(ExpPoly { n, terms }.canonicalize())
    }

    /// Multiplies by `e^{(δ·a)t}`, i.e. adds `δ` to every rate vector.
    pub fn shift_rate(&self, delta: &[i64]) -> ExpPoly {
        assert_eq!(delta.len(), self.n, "rate shift dimension");
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                rate: t.rate.iter().zip(delta).map(|(m, d)| m + d).collect(),
                ..t.clone()
            })
            .collect();
        ExpPoly { n: self.n, terms }.canonicalize()
    }

    /// `∫₀ᵗ f(τ) e^{(μ·a)τ} dτ` as an exponential polynomial in `t`.
    ///
    /// A term whose combined rate `r = (m+μ)·a` satisfies `|r| ≤ res_tol` is
    /// integrated as a pure power. Otherwise repeated integration by parts
    /// gives the antiderivative
    /// `F(τ) = c e^{rτ} Σ_j (−1)^j k!/(k−j)! τ^{k−j} / r^{j+1}`, and the
    /// constant `−F(0)` is stored with the zero rate vector, so the result
    /// evaluates to exactly 0 at `t = 0`.
    pub fn integrate_with_rate(&self, mu: &[i64], a: &[f64], res_tol: f64) -> ExpPoly {
        assert_eq!(mu.len(), self.n, "rate dimension");
        assert_eq!(a.len(), self.n, "drift dimension");
        let mut out = Vec::new();
        for t in &self.terms {
            let rate: Vec<i64> = t.rate.iter().zip(mu).map(|(m, u)| m + u).collect();
            let r = realized(&rate, a);
            let k = t.power;
            if r.abs() <= res_tol {
                let resonant = t.resonant || rate.iter().any(|&m| m != 0);
                out.push(Term {
                    coeff: t.coeff / (k as f64 + 1.0),
                    power: k + 1,
                    rate,
                    resonant,
                });
                continue;
            }
            // falling factorial k!/(k−j)! accumulated alongside 1/r^{j+1}
            let mut fall = 1.0;
            let mut inv = 1.0 / r;
            for j in 0..=k {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                out.push(Term {
                    coeff: t.coeff * sign * fall * inv,
                    power: k - j,
                    rate: rate.clone(),
                    resonant: t.resonant,
                });
                fall *= (k - j) as f64;
                inv /= r;
            }
        }
        // Every zero-rate term has power ≥ 1 here, so `rest(0)` is the
        // eval-order sum of the other constants and `−F(0)` cancels it exactly.
        let rest = ExpPoly {
            n: self.n,
            terms: out,
        }
        .canonicalize();
        let f0 = rest.eval(a, 0.0);
        rest.add(&ExpPoly::constant(self.n, -f0))
    }

    /// Rewrites rate vectors that realize the same exponent under `a`.
    ///
    /// Vectors with `|m·a| ≤ res_tol` become the zero vector; any other group
    /// of vectors whose realized rates agree within `res_tol` is mapped to
    /// its lexicographically smallest member. The function value is unchanged
    /// up to `res_tol · t` in the exponent, and like terms then merge.
    pub fn reduce_rates(&self, a: &[f64], res_tol: f64) -> ExpPoly {
        let mut reps: Vec<(f64, Vec<i64>)> = vec![(0.0, vec![0; self.n])];
        let mut sorted: Vec<&Vec<i64>> = self.terms.iter().map(|t| &t.rate).collect();
        sorted.sort();
        sorted.dedup();
        for rate in sorted {
            let r = realized(rate, a);
            if !reps.iter().any(|(x, _)| (x - r).abs() <= res_tol) {
                reps.push((r, rate.clone()));
            }
        }
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let r = realized(&t.rate, a);
                let rep = reps
                    .iter()
                    .find(|(x, _)| (x - r).abs() <= res_tol)
                    .map(|(_, m)| m.clone())
                    .expect("representative exists");
                Term {
                    rate: rep,
                    ..t.clone()
                }
            })
            .collect();
        ExpPoly { n: self.n, terms }.canonicalize()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1(coeff: f64, power: u32, rate: i64) -> Term {
        Term::new(coeff, power, vec![rate])
    }

    #[test]
    fn canonicalize_merges_and_cancels() {
        let f = ExpPoly::from_terms(1, vec![e1(1.0, 0, 0), e1(2.0, 0, 0)]);
        assert_eq!(f.terms(), &[e1(3.0, 0, 0)]);
        let f = ExpPoly::from_terms(1, vec![e1(1.0, 1, 0), e1(-1.0, 1, 0)]);
        assert!(f.is_zero());
        let f = ExpPoly::from_terms(
            2,
            vec![Term::new(0.5, 2, vec![2, 0]), Term::new(0.5, 2, vec![2, 0])],
        );
        assert_eq!(f.terms(), &[Term::new(1.0, 2, vec![2, 0])]);
    }

    #[test]
    fn eval_examples() {
        assert_eq!(ExpPoly::constant(1, 1.0).eval(&[3.0], 7.0), 1.0);
        let f = ExpPoly::from_terms(1, vec![e1(1.0, 0, -3)]);
        assert!((f.eval(&[1.0], 2f64.ln()) - 0.125).abs() < 1e-15);
        let f = ExpPoly::from_terms(1, vec![e1(12.0, 2, 0), e1(12.0, 1, 0), e1(3.0, 0, 0)]);
        assert_eq!(f.eval(&[0.0], 0.5), 12.0);
    }

    #[test]
    fn integrate_plain_exponential_and_resonance() {
        let one = ExpPoly::constant(1, 1.0);
        let f = one.integrate_with_rate(&[0], &[0.0], 1e-12);
        assert_eq!(f.terms(), &[e1(1.0, 1, 0)]);

        let f = one.integrate_with_rate(&[2], &[1.0], 1e-12);
        assert_eq!(f.terms(), &[e1(-0.5, 0, 0), e1(0.5, 0, 2)]);

        let g = ExpPoly::from_terms(1, vec![e1(1.0, 0, -2)]);
        let f = g.integrate_with_rate(&[2], &[1.0], 1e-12);
        assert_eq!(f.terms(), &[e1(1.0, 1, 0)]);
    }

    #[test]
    fn integral_vanishes_at_zero() {
        let g = ExpPoly::from_terms(1, vec![e1(2.0, 3, 1), e1(-1.5, 1, -2), e1(0.25, 0, 0)]);
        let f = g.integrate_with_rate(&[1], &[0.7], 1e-12);
        assert_eq!(f.eval(&[0.7], 0.0), 0.0);
    }

    #[test]
    fn resonant_flag_marks_nonzero_rate() {
        // rate (1,-1) realizes to zero at a = (1,1)
        let g = ExpPoly::from_terms(2, vec![Term::new(1.0, 0, vec![1, 0])]);
        let f = g.integrate_with_rate(&[0, -1], &[1.0, 1.0], 1e-12);
        assert_eq!(f.terms().len(), 1);
        assert!(f.terms()[0].resonant);
        assert_eq!(f.terms()[0].power, 1);
    }

    #[test]
    fn reduce_rates_merges_equal_realizations() {
        let f = ExpPoly::from_terms(
            2,
            vec![
                Term::new(1.0, 0, vec![1, 0]),
                Term::new(2.0, 0, vec![0, 1]),
                Term::new(3.0, 1, vec![1, -1]),
            ],
        );
        let g = f.reduce_rates(&[1.0, 1.0], 1e-12);
        assert_eq!(
            g.terms(),
            &[Term::new(3.0, 1, vec![0, 0]), Term::new(3.0, 0, vec![0, 1])]
        );
        for t in [-1.0, 0.3, 2.0] {
            assert!((g.eval(&[1.0, 1.0], t) - f.eval(&[1.0, 1.0], t)).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_combine_examples() {
        let t = ExpPoly::from_terms(1, vec![e1(1.0, 1, 0)]);
        let t2 = ExpPoly::from_terms(1, vec![e1(1.0, 2, 0)]);
        let f = ExpPoly::linear_combine(&[2.0, 3.0], &[&t, &t2]).unwrap();
        assert_eq!(f.terms(), &[e1(2.0, 1, 0), e1(3.0, 2, 0)]);
        assert!(ExpPoly::linear_combine(&[1.0, -1.0], &[&t, &t])
            .unwrap()
            .is_zero());
        assert_eq!(ExpPoly::linear_combine(&[1.0, 0.0], &[&t, &t2]).unwrap(), t);
    }
}
