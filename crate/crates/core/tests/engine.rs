mod common;

use num_bigint::BigInt;
use num_traits::Zero;

use common::{apply, oracle_set, random_parameters};
use preper_core::arith::{enumerate_rationals, padic_valuation, rat, Rational, Valuation};
use preper_core::engine::{compute_preper, EngineConfig, Method};
use preper_core::family::{builtin_family, FamilyLift, SpecializedMap};
use preper_core::tropical::{filter_inverse_monomial, filter_three_cycle};

fn assert_matches_oracle(lift: &FamilyLift, ts: &[Rational], height: u64) {
    for t in ts {
        let m = lift.specialize(t).unwrap();
        let r = compute_preper(&m, Some(lift), &EngineConfig::default()).unwrap();
        let expect = oracle_set(&m, height, 200);
        assert_eq!(r.portrait.nodes, expect, "{} at t = {t}", lift.name());
        for (i, p) in r.portrait.nodes.iter().enumerate() {
            assert_eq!(r.portrait.nodes[r.portrait.edges[i]], apply(&m, p));
        }
    }
}

#[test]
fn quadratic_matches_oracle() {
    let q = builtin_family("quadratic").unwrap();
    let mut ts = random_parameters(0x5eed, 40, 50, false);
    ts.extend([rat(0, 1), rat(-1, 1), rat(-2, 1), rat(1, 4), rat(-29, 16), rat(5, 36), rat(-7, 4)]);
    assert_matches_oracle(&q, &ts, 100);
}

#[test]
fn crit2_matches_oracle() {
    let c = builtin_family("crit2").unwrap();
    assert_matches_oracle(&c, &random_parameters(7, 12, 20, true), 60);
}

#[test]
fn cubic_matches_oracle() {
    let c = builtin_family("cubic").unwrap();
    let mut ts = random_parameters(11, 25, 30, false);
    ts.extend([rat(0, 1), rat(-1, 1), rat(1, 8), rat(-3, 8)]);
    assert_matches_oracle(&c, &ts, 60);
}

fn exhaustive() -> EngineConfig {
    EngineConfig {
        use_filters: false,
        ..EngineConfig::default()
    }
}

#[test]
fn quadratic_search_paths_agree() {
    let q = builtin_family("quadratic").unwrap();
    for t in random_parameters(3, 300, 40, false) {
        if preper_core::arith::exact_isqrt(t.denom()).is_none() {
            continue;
        }
        let m = q.specialize(&t).unwrap();
        let fast = compute_preper(&m, Some(&q), &exhaustive()).unwrap();
        let general = compute_preper(&m, None, &exhaustive()).unwrap();
        assert_eq!(fast.portrait, general.portrait, "t = {t}");
    }
}

#[test]
fn quadratic_filter_sound_small_sweep() {
    let q = builtin_family("quadratic").unwrap();
    for t in enumerate_rationals(60) {
        let m = q.specialize(&t).unwrap();
        let filtered = compute_preper(&m, Some(&q), &EngineConfig::default()).unwrap();
        if filtered.method == Method::TropicalFilter {
            let full = compute_preper(&m, None, &exhaustive()).unwrap();
            assert_eq!(filtered.portrait, full.portrait, "t = {t}");
        }
    }
}

#[test]
fn template_filters_sound() {
    let cases: [(&str, &[(i64, i64)]); 4] = [
        ("additive:0,1,1", &[(1, 3), (-5, 7), (2, 27), (7, 2)]),
        ("unicritical:4", &[(1, 2), (-3, 8), (5, 27)]),
        ("inverse:1:0,-1,1", &[(1, 3), (-2, 5), (4, 7)]),
        ("inverse:2:0,0,1,1", &[(1, 2), (3, 5), (-1, 7)]),
    ];
    for (name, ts) in cases {
        let lift = builtin_family(name).unwrap();
        for &(a, b) in ts {
            let t = rat(a, b);
            let m = lift.specialize(&t).unwrap();
            let filtered = compute_preper(&m, Some(&lift), &EngineConfig::default()).unwrap();
            assert_eq!(filtered.method, Method::TropicalFilter, "{name} at {t}");
            let full = compute_preper(&m, None, &exhaustive()).unwrap();
            assert_eq!(filtered.portrait, full.portrait, "{name} at {t}");
        }
    }
}

#[test]
fn three_cycle_template_sound() {
    let lift = builtin_family("three-cycle:5:3").unwrap();
    for t in [rat(1, 2), rat(3, 7), rat(-4, 3)] {
        let m = lift.specialize(&t).unwrap();
        let filtered = compute_preper(&m, Some(&lift), &EngineConfig::default()).unwrap();
        assert_eq!(filtered.method, Method::TropicalFilter);
        assert_eq!(filtered.count, 3);
        let full = compute_preper(&m, None, &exhaustive()).unwrap();
        assert_eq!(filtered.portrait, full.portrait, "t = {t}");
    }
}

fn three_cycle_map(d: usize, e: usize, c: &Rational) -> SpecializedMap {
    let (a, b) = (c.numer().clone(), c.denom().clone());
    let mut f = vec![BigInt::zero(); d + 1];
    f[0] = b.clone();
    f[e] = a;
    let mut g = Vec::new();
    let mut binom = BigInt::from(1);
    for i in 0..=d {
        g.push(if i % 2 == 0 { &b * &binom } else { -(&b * &binom) });
        binom = binom * BigInt::from(d - i) / BigInt::from(i + 1);
    }
    SpecializedMap::from_forms(f, g, c.clone()).unwrap()
}

fn p_of(c: &Rational) -> u64 {
    let den = c.denom();
    (2u64..).find(|p| (den % BigInt::from(*p)).is_zero()).unwrap()
}

#[test]
fn three_cycle_quadratic_numerator_cases() {
    for (d, c) in [(5, rat(1, 3)), (5, rat(2, 7)), (4, rat(1, 3)), (4, rat(-2, 5)), (6, rat(1, 5))] {
        let m = three_cycle_map(d, 2, &c);
        let p = p_of(&c);
        let verdict = filter_three_cycle(padic_valuation(&c, p), d, 2, padic_valuation(&Rational::from_integer(d.into()), p));
        assert!(verdict.decided, "d = {d}, c = {c}");
        let set = verdict.preper_set.unwrap().resolve(&m).unwrap();
        let full = compute_preper(&m, None, &exhaustive()).unwrap();
        assert_eq!(set, full.portrait.nodes, "d = {d}, c = {c}");
    }
}

#[test]
fn inverse_monomial_remark() {
    // c z^d / (a_0 + … + a_e z^e)
    let cases: [(usize, &[i64], (i64, i64)); 4] = [
        (3, &[1, 2], (1, 5)),
        (3, &[1, -1], (2, 7)),
        (4, &[1, 0, 1], (1, 3)),
        (4, &[2, 1, 3], (-3, 5)),
    ];
    for (d, a, (cn, cd)) in cases {
        let c = rat(cn, cd);
        let e = a.len() - 1;
        let mut f = vec![BigInt::zero(); d + 1];
        f[d] = c.numer().clone();
        let g: Vec<BigInt> = (0..=d)
            .map(|i| a.get(i).map_or(BigInt::zero(), |&ai| BigInt::from(ai) * c.denom()))
            .collect();
        let m = SpecializedMap::from_forms(f, g, c.clone()).unwrap();
        let p = cd as u64;
        let vals: Vec<Valuation> = a.iter().map(|&ai| padic_valuation(&rat(ai, 1), p)).collect();
        let verdict = filter_inverse_monomial(padic_valuation(&c, p), d, e, &vals);
        assert!(verdict.decided, "d = {d}, c = {c}");
        let set = verdict.preper_set.unwrap().resolve(&m).unwrap();
        let full = compute_preper(&m, None, &exhaustive()).unwrap();
        assert_eq!(set, full.portrait.nodes, "d = {d}, c = {c}");
    }
}
