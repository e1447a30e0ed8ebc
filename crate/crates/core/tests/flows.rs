mod common;

use common::{close, random_mixture, random_sequence, rng};
use moment_flows::oracle::{
    combined_moments_ode, oracle_moments_atomic, oracle_moments_gaussian_mixture, OdeOptions,
};
use moment_flows::{
    combined_flow, evaluate_flow, evolve_gaussian_mixture, heat_flow, heat_flow_1d_closed,
    resonance_gap, transport_atomic, transport_flow, ExpPoly, FlowKind, FlowParams, MomentSequence,
    MultiIndex, Term,
};
use proptest::prelude::*;
use rand::Rng;

fn unit(d: u32, i: usize) -> MomentSequence {
    let mut v = vec![0.0; d as usize + 1];
    v[i] = 1.0;
    MomentSequence::one_dim(&v).unwrap()
}

fn factorial(k: u64) -> u64 {
    (1..=k).product()
}

// heat, n = 1, ν = 1: s_m(t) = Σ_j m!/((m−2j)! j!) s_{m−2j}(0) t^j
#[test]
fn heat_table_exact_through_degree_12() {
    let d = 12;
    for i in 0..=d as usize {
        let flow = heat_flow(&unit(d, i), 1.0).unwrap();
        for m in 0..=d as usize {
            let e = flow.entry(&MultiIndex::new(vec![m as u32])).unwrap();
            let expected = if m >= i && (m - i) % 2 == 0 {
                let j = (m - i) / 2;
                let c = factorial(m as u64) / (factorial(i as u64) * factorial(j as u64));
                vec![Term::new(c as f64, j as u32, vec![0])]
            } else {
                vec![]
            };
            let expected = ExpPoly::from_terms(1, expected).canonicalize();
            assert!(e.same_terms(&expected), "m={m} i={i}: {e:?}");
        }
    }
}

#[test]
fn heat_table_named_lines() {
    let s = MomentSequence::one_dim(&[1.5, -0.25, 2.0, 0.75, 9.0, -3.0]).unwrap();
    let flow = heat_flow(&s, 1.0).unwrap();
    let e4 = flow.entry(&MultiIndex::new(vec![4])).unwrap();
    let e5 = flow.entry(&MultiIndex::new(vec![5])).unwrap();
    let want4 = ExpPoly::from_terms(
        1,
        vec![
            Term::new(9.0, 0, vec![0]),
            Term::new(12.0 * 2.0, 1, vec![0]),
            Term::new(12.0 * 1.5, 2, vec![0]),
        ],
    )
    .canonicalize();
    let want5 = ExpPoly::from_terms(
        1,
        vec![
            Term::new(-3.0, 0, vec![0]),
            Term::new(20.0 * 0.75, 1, vec![0]),
            Term::new(60.0 * -0.25, 2, vec![0]),
        ],
    )
    .canonicalize();
    assert!(e4.same_terms(&want4), "{e4:?}");
    assert!(e5.same_terms(&want5), "{e5:?}");
}

#[test]
fn closed_form_heat_matches_recursion_exactly() {
    for d in 0..=12 {
        for i in 0..=d as usize {
            let s = unit(d, i);
            let a = heat_flow(&s, 1.0).unwrap();
            let b = heat_flow_1d_closed(&s, 1.0).unwrap();
            for (x, y) in a.entries().iter().zip(b.entries()) {
                assert!(x.same_terms(y), "d={d} i={i}");
            }
        }
    }
}

#[test]
fn heat_second_moment_grows_linearly() {
    let s = MomentSequence::one_dim(&[1.0, 0.0, 0.0]).unwrap();
    let out = evaluate_flow(&heat_flow(&s, 1.0).unwrap(), 1.0);
    assert_eq!(out.values(), &[1.0, 0.0, 2.0]);
}

fn assert_terms(e: &ExpPoly, want: &[(f64, i64)]) {
    let want = ExpPoly::from_terms(
        1,
        want.iter()
            .map(|&(c, r)| Term::new(c, 0, vec![r]))
            .collect(),
    )
    .canonicalize();
    assert_eq!(e.terms().len(), want.terms().len(), "{e:?} vs {want:?}");
    for (x, y) in e.terms().iter().zip(want.terms()) {
        assert_eq!(x.rate, y.rate);
        assert_eq!(x.power, y.power);
        assert!(
            (x.coeff - y.coeff).abs() <= 1e-13 * y.coeff.abs(),
            "{x:?} vs {y:?}"
        );
    }
}

fn examples_sequence() -> MomentSequence {
    MomentSequence::one_dim(&[1.25, 0.5, 2.5, -0.75, 11.0]).unwrap()
}

#[test]
fn combined_positive_drift_example() {
    let s = examples_sequence();
    let v = s.values().to_vec();
    let flow = combined_flow(&s, 1.0, &[1.0]).unwrap();
    let e = flow.entries();
    assert_terms(&e[0], &[(v[0], -1)]);
    assert_terms(&e[1], &[(v[1], -2)]);
    assert_terms(&e[2], &[(v[2] - v[0], -3), (v[0], -1)]);
    assert_terms(&e[3], &[(v[3] - 3.0 * v[1], -4), (3.0 * v[1], -2)]);
    assert_terms(
        &e[4],
        &[
            (v[4] - 6.0 * v[2] + 3.0 * v[0], -5),
            (6.0 * (v[2] - v[0]), -3),
            (3.0 * v[0], -1),
        ],
    );
}

#[test]
fn combined_negative_drift_example() {
    let s = examples_sequence().truncate(3);
    let v = s.values().to_vec();
    let flow = combined_flow(&s, 1.0, &[-1.0]).unwrap();
    let e = flow.entries();
    // realized rates +1, +2, +3, +4 are stored as rate vectors times a = −1
    assert_terms(&e[0], &[(v[0], -1)]);
    assert_terms(&e[1], &[(v[1], -2)]);
    assert_terms(&e[2], &[(v[2] + v[0], -3), (-v[0], -1)]);
    assert_terms(&e[3], &[(v[3] + 3.0 * v[1], -4), (-3.0 * v[1], -2)]);
    for t in [-1.0, 0.3, 1.0] {
        let out = evaluate_flow(&flow, t);
        let want = (v[2] + v[0]) * (3.0 * t).exp() - v[0] * t.exp();
        assert!(close(out.at(2), want, 1e-14));
    }
}

#[test]
fn transport_matches_pushforward() {
    let mut r = rng(11);
    for _ in 0..200 {
        let n = r.random_range(1..=3);
        let d = r.random_range(0..=6);
        let k = r.random_range(1..=4);
        let mu = common::random_atomic(&mut r, n, k);
        let a: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        let t = r.random_range(-2.0..2.0);
        let s = oracle_moments_atomic(&mu, d);
        let got = evaluate_flow(&transport_flow(&s, &a).unwrap(), t);
        let want = oracle_moments_atomic(&transport_atomic(&mu, &a, t).unwrap(), d);
        assert!(want.relative_mismatch(&got) <= 1e-12);
    }
}

fn random_params(r: &mut impl Rng, kind: FlowKind, n: usize) -> FlowParams {
    let nu = r.random_range(0.1..1.5);
    let a: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
    match kind {
        FlowKind::Heat => FlowParams::heat(n, nu).unwrap(),
        FlowKind::Transport => FlowParams::transport(a).unwrap(),
        FlowKind::Combined => FlowParams::combined(nu, a).unwrap(),
    }
}

#[test]
fn semigroup_all_flows() {
    let mut r = rng(12);
    for kind in [FlowKind::Heat, FlowKind::Transport, FlowKind::Combined] {
        let mut done = 0;
        while done < 100 {
            let n = r.random_range(1..=2);
            let d = r.random_range(0..=6);
            let p = random_params(&mut r, kind, n);
            if resonance_gap(p.a(), d, 1e-12) < 0.2 {
                continue;
            }
            let s = random_sequence(&mut r, n, d);
            let t1 = r.random_range(-0.5..1.0);
            let t2 = r.random_range(-0.5..1.0);
            let direct = evaluate_flow(&p.build(&s).unwrap(), t1 + t2);
            let mid = evaluate_flow(&p.build(&s).unwrap(), t1);
            let composed = evaluate_flow(&p.build(&mid).unwrap(), t2);
            assert!(
                direct.relative_mismatch(&composed) <= 1e-11,
                "{kind:?} {:?}",
                p
            );
            done += 1;
        }
    }
}

#[test]
fn flows_are_linear() {
    let mut r = rng(13);
    for kind in [FlowKind::Heat, FlowKind::Transport, FlowKind::Combined] {
        for _ in 0..100 {
            let n = r.random_range(1..=3);
            let d = r.random_range(0..=5);
            let p = random_params(&mut r, kind, n);
            let s = random_sequence(&mut r, n, d);
            let u = random_sequence(&mut r, n, d);
            let (x, y) = (r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
            let t = r.random_range(-1.0..1.0);
            let mix = MomentSequence::linear_combine(&[x, y], &[&s, &u]).unwrap();
            let lhs = evaluate_flow(&p.build(&mix).unwrap(), t);
            let fs = evaluate_flow(&p.build(&s).unwrap(), t);
            let fu = evaluate_flow(&p.build(&u).unwrap(), t);
            let rhs = MomentSequence::linear_combine(&[x, y], &[&fs, &fu]).unwrap();
            for (l, rr) in lhs.values().iter().zip(rhs.values()) {
                let scale = 1.0
                    + fs.values()
                        .iter()
                        .chain(fu.values())
                        .fold(0.0f64, |m, v| m.max(v.abs()));
                assert!((l - rr).abs() <= 1e-11 * scale * (x.abs() + y.abs() + 1.0));
            }
        }
    }
}

#[test]
fn heat_power_bounded_by_half_degrees() {
    let mut r = rng(14);
    for _ in 0..30 {
        let n = r.random_range(1..=3);
        let s = random_sequence(&mut r, n, 8);
        let flow = heat_flow(&s, 0.7).unwrap();
        for (alpha, e) in flow.iter() {
            let bound: u32 = alpha.entries().iter().map(|k| k / 2).sum();
            assert!(e.max_power() <= bound, "{alpha} {}", e.max_power());
            assert!(e.terms().iter().all(|t| t.rate.iter().all(|&m| m == 0)));
        }
    }
}

#[test]
fn heat_commutes_with_gaussian_evolution() {
    let mut r = rng(15);
    for _ in 0..200 {
        let k = r.random_range(1..=3);
        let nu = r.random_range(0.2..1.5);
        let g = random_mixture(&mut r, 1, k, nu);
        let d = r.random_range(0..=10);
        let t = r.random_range(-g.min_time()..2.0);
        let s = oracle_moments_gaussian_mixture(&g, d);
        let got = evaluate_flow(&heat_flow(&s, nu).unwrap(), t);
        let want = oracle_moments_gaussian_mixture(&evolve_gaussian_mixture(&g, t).unwrap(), d);
        assert!(
            want.relative_mismatch(&got) <= 1e-9,
            "{}",
            want.relative_mismatch(&got)
        );
    }
}

#[test]
fn heat_commutes_in_several_dimensions() {
    let mut r = rng(16);
    for _ in 0..50 {
        let n = r.random_range(2..=3);
        let g = random_mixture(&mut r, n, 2, 0.5);
        let t = r.random_range(0.0..1.5);
        let s = oracle_moments_gaussian_mixture(&g, 6);
        let got = evaluate_flow(&heat_flow(&s, 0.5).unwrap(), t);
        let want = oracle_moments_gaussian_mixture(&evolve_gaussian_mixture(&g, t).unwrap(), 6);
        assert!(want.relative_mismatch(&got) <= 1e-9);
    }
}

#[test]
fn combined_matches_ode() {
    let mut r = rng(17);
    let opts = OdeOptions::default();
    let mut done = 0;
    while done < 50 {
        let n = r.random_range(1..=2);
        let d = r.random_range(0..=8);
        let a: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        if resonance_gap(&a, d, 1e-12) < 0.2 {
            continue;
        }
        let nu = r.random_range(0.1..1.5);
        let s = random_sequence(&mut r, n, d);
        let flow = combined_flow(&s, nu, &a).unwrap();
        for t in [-1.0, -0.5, 0.5, 1.0, 2.0] {
            let got = evaluate_flow(&flow, t);
            let want = combined_moments_ode(&s, nu, &a, t, opts).unwrap();
            assert!(want.relative_mismatch(&got) <= 1e-7, "a={a:?} t={t}");
        }
        done += 1;
    }
}

// With every a_j ≠ 0 the generator is diagonalizable, so resonant t-powers
// must cancel to roundoff; a zero drift coordinate gives genuine powers.
#[test]
fn exactly_resonant_drift_matches_ode() {
    let mut r = rng(18);
    for a in [
        vec![0.5, -0.5],
        vec![1.0, -1.0],
        vec![0.25, -0.5],
        vec![0.0, 0.5],
    ] {
        let s = random_sequence(&mut r, 2, 8);
        let flow = combined_flow(&s, 0.8, &a).unwrap();
        let top = flow
            .entries()
            .iter()
            .flat_map(|e| e.terms())
            .fold(0.0f64, |m, t| m.max(t.coeff.abs()));
        let powered = flow
            .entries()
            .iter()
            .flat_map(|e| e.terms())
            .filter(|t| t.power > 0)
            .fold(0.0f64, |m, t| m.max(t.coeff.abs()));
        if a[0] == 0.0 {
            assert!(powered > 1e-3 * top);
        } else {
            assert!(powered <= 1e-13 * top, "{a:?}: {powered:e} vs {top:e}");
        }
        for t in [-0.5, 1.0, 2.0] {
            let got = evaluate_flow(&flow, t);
            let want = combined_moments_ode(&s, 0.8, &a, t, OdeOptions::default()).unwrap();
            assert!(want.relative_mismatch(&got) <= 1e-8, "{a:?} t={t}");
        }
    }
}

#[test]
fn combined_reduces_to_each_part() {
    let mut r = rng(19);
    let s = random_sequence(&mut r, 2, 6);
    let heat = evaluate_flow(&heat_flow(&s, 0.6).unwrap(), 0.7);
    let c0 = evaluate_flow(&combined_flow(&s, 0.6, &[0.0, 0.0]).unwrap(), 0.7);
    assert!(heat.relative_mismatch(&c0) <= 1e-13);
    let tr = evaluate_flow(&transport_flow(&s, &[0.3, -0.4]).unwrap(), 0.7);
    let c1 = evaluate_flow(&combined_flow(&s, 0.0, &[0.3, -0.4]).unwrap(), 0.7);
    assert!(tr.relative_mismatch(&c1) <= 1e-13);
}

#[test]
fn time_zero_is_identity() {
    let mut r = rng(20);
    let s = random_sequence(&mut r, 3, 5);
    for p in [
        FlowParams::heat(3, 1.0).unwrap(),
        FlowParams::transport(vec![0.1, 0.2, 0.3]).unwrap(),
        FlowParams::combined(1.0, vec![0.1, 0.2, 0.3]).unwrap(),
    ] {
        assert_eq!(evaluate_flow(&p.build(&s).unwrap(), 0.0), s);
    }
}

#[test]
fn invalid_params_rejected() {
    assert!(FlowParams::heat(1, 0.0).is_err());
    assert!(FlowParams::new(FlowKind::Heat, 1.0, vec![0.5]).is_err());
    assert!(FlowParams::new(FlowKind::Transport, 1.0, vec![0.5]).is_err());
    assert!(FlowParams::combined(-1.0, vec![0.5]).is_err());
    assert!(FlowParams::combined(1.0, vec![]).is_err());
    assert!(FlowParams::combined(f64::NAN, vec![1.0]).is_err());
    let s = MomentSequence::one_dim(&[1.0, 0.0, 1.0]).unwrap();
    assert!(FlowParams::combined(1.0, vec![0.1, 0.2])
        .unwrap()
        .build(&s)
        .is_err());
}

#[test]
fn resonance_gap_examples() {
    assert_eq!(resonance_gap(&[1.0], 1, 1e-12), f64::INFINITY);
    assert_eq!(resonance_gap(&[1.0], 4, 1e-12), 2.0);
    assert_eq!(resonance_gap(&[0.5, -0.5], 4, 1e-12), 1.0);
    assert!((resonance_gap(&[0.3, -0.2], 4, 1e-12) - 0.2).abs() < 1e-15);
}

proptest! {
    #[test]
    fn heat_semigroup_prop(vals in prop::collection::vec(-2.0f64..2.0, 7), t1 in -1.0f64..1.0, t2 in -1.0f64..1.0) {
        let s = MomentSequence::one_dim(&vals).unwrap();
        let f = heat_flow(&s, 1.0).unwrap();
        let direct = evaluate_flow(&f, t1 + t2);
        let composed = evaluate_flow(&heat_flow(&evaluate_flow(&f, t1), 1.0).unwrap(), t2);
        for (x, y) in direct.values().iter().zip(composed.values()) {
            prop_assert!((x - y).abs() <= 1e-11 * (1.0 + x.abs()) * 100.0);
        }
    }

    #[test]
    fn transport_entries_are_single_terms(vals in prop::collection::vec(-2.0f64..2.0, 10), a0 in -1.0f64..1.0, a1 in -1.0f64..1.0) {
        let s = MomentSequence::from_values(2, 3, vals).unwrap();
        let f = transport_flow(&s, &[a0, a1]).unwrap();
        for (alpha, e) in f.iter() {
            prop_assert!(e.terms().len() <= 1);
            if let Some(term) = e.terms().first() {
                prop_assert_eq!(term.rate.clone(), alpha.shifted_by_one().iter().map(|m| -m).collect::<Vec<_>>());
            }
        }
    }
}
