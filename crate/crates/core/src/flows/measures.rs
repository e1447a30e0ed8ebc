//! The flows acting on representing measures rather than on moments.

use crate::error::{Error, Result};
use crate::measure::{Atom, AtomicMeasure, GaussianComponent, GaussianMixture};

/// Heat evolution of a Gaussian mixture: every component time `t_i` becomes
/// `t_i + t`. Times below `−min_i t_i` are refused; at exactly `−min_i t_i`
/// the youngest components become point masses.
pub fn evolve_gaussian_mixture(g: &GaussianMixture, t: f64) -> Result<GaussianMixture> {
    let tau = g.min_time();
    if !t.is_finite() || t < -tau {
        return Err(Error::PastHorizon { t, horizon: tau });
    }
    let components = g
        .components()
        .iter()
        .map(|c| GaussianComponent {
            center: c.center.clone(),
            weight: c.weight,
            time: (c.time + t).max(0.0),
        })
        .collect();
    Ok(g.with_components(components))
}

/// Transport of point masses: `x_{i,j} ↦ x_{i,j} e^{−a_j t}` and
/// `c_i ↦ c_i e^{−Σ_j a_j t}`. The map is a bijection, so the atom count is
/// preserved for every real `t`.
pub fn transport_atomic(mu: &AtomicMeasure, a: &[f64], t: f64) -> Result<AtomicMeasure> {
    if a.len() != mu.n() {
        return Err(Error::DimensionMismatch {
            expected: mu.n(),
            got: a.len(),
        });
    }
    let contraction: Vec<f64> = a.iter().map(|aj| (-aj * t).exp()).collect();
    let mass = (-a.iter().sum::<f64>() * t).exp();
    let atoms = mu
        .atoms()
        .iter()
        .map(|atom| Atom {
            point: atom
                .point
                .iter()
                .zip(&contraction)
                .map(|(x, c)| x * c)
                .collect(),
            weight: atom.weight * mass,
        })
        .collect();
    Ok(AtomicMeasure::from_distinct(mu.n(), atoms))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mixture(time: f64) -> GaussianMixture {
        GaussianMixture::new(
            1,
            1.0,
            vec![GaussianComponent {
                center: vec![0.0],
                weight: 1.0,
                time,
            }],
        )
        .unwrap()
    }

    #[test]
    fn time_shifts() {
        let g = mixture(0.5);
        assert_eq!(
            evolve_gaussian_mixture(&g, 0.5).unwrap().components()[0].time,
            1.0
        );
        assert_eq!(evolve_gaussian_mixture(&g, 0.0).unwrap(), g);
        assert_eq!(
            evolve_gaussian_mixture(&g, -0.5).unwrap().components()[0].time,
            0.0
        );
        assert!(matches!(
            evolve_gaussian_mixture(&g, -0.6),
            Err(Error::PastHorizon { .. })
        ));
    }

    #[test]
    fn transport_point_mass() {
        let mu = AtomicMeasure::one_dim(&[(1.0, 1.0)]).unwrap();
        let out = transport_atomic(&mu, &[1.0], 2f64.ln()).unwrap();
        assert!((out.atoms()[0].point[0] - 0.5).abs() < 1e-15);
        assert!((out.atoms()[0].weight - 0.5).abs() < 1e-15);
        assert_eq!(transport_atomic(&mu, &[1.0], 0.0).unwrap(), mu);
    }

    #[test]
    fn transport_group_property() {
        let mu = AtomicMeasure::one_dim(&[(-1.3, 0.4), (2.1, 0.9)]).unwrap();
        let fwd = transport_atomic(&mu, &[0.8], 2f64.ln()).unwrap();
        let back = transport_atomic(&fwd, &[0.8], -(2f64.ln())).unwrap();
        for (x, y) in back.atoms().iter().zip(mu.atoms()) {
            assert!((x.point[0] - y.point[0]).abs() < 1e-13);
            assert!((x.weight - y.weight).abs() < 1e-13);
        }
    }
}
