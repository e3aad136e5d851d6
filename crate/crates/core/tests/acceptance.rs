//! One line per acceptance criterion, `PASS` or `FAIL`, with the measured
//! values and the pinned tolerance.

mod common;

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Signed;

use common::{oracle_set, random_parameters};
use preper_core::arith::real::{pi, Ball, DEFAULT_PREC};
use preper_core::arith::{enumerate_rationals, rat, Rational};
use preper_core::asymptotics::*;
use preper_core::census::*;
use preper_core::engine::{compute_preper, EngineConfig, Method};
use preper_core::family::builtin_family;

fn report(n: u32, pass: bool, detail: String) {
    println!("criterion {n}: {} | {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n}: {detail}");
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

/// Certified `|a − b| ≤ tol`.
fn within(a: &Ball, b: &Ball, tol: &Rational) -> bool {
    (a.midpoint() - b.midpoint()).abs() + a.radius() + b.radius() <= *tol
}

fn csv_bytes(x: u64, workers: usize) -> Vec<u8> {
    let lift = builtin_family("quadratic").unwrap();
    let mut w = CsvRowWriter::new(Vec::new());
    run_census(&lift, x, workers, |r| w.write(r)).unwrap();
    w.finish().unwrap()
}

#[test]
fn criterion_1_figure_counts() {
    let mut pass = true;
    let mut parts = Vec::new();
    for (c, classes, total) in [(-3, [9, 35, 9], 53), (1, [13, 41, 10], 64)] {
        let (r, dt) = timed(|| count_image_phi(c, 100).unwrap());
        pass &= r.classes == classes && r.total == total && dt < Duration::from_secs(1);
        parts.push(format!("phi_{c} = {:?} = {} in {dt:.2?}", r.classes, r.total));
    }
    let (psi, dt) = timed(|| count_image_psi(100).unwrap());
    pass &= psi == 65 && dt < Duration::from_secs(1);
    parts.push(format!("psi = {psi} in {dt:.2?}"));
    report(1, pass, format!("{} (exact, < 1 s each)", parts.join(", ")));
}

#[test]
fn criterion_2_e0_portraits() {
    let q = builtin_family("quadratic").unwrap();
    let ts = [rat(0, 1), rat(-1, 1), rat(-2, 1), rat(1, 4), rat(-29, 16)];
    let counts: Vec<usize> = ts
        .iter()
        .map(|t| {
            let m = q.specialize(t).unwrap();
            compute_preper(&m, Some(&q), &EngineConfig::default()).unwrap().count
        })
        .collect();
    report(2, counts == [4, 4, 6, 3, 9], format!("counts {counts:?}, expected [4, 4, 6, 3, 9] (exact)"));
}

#[test]
fn criterion_3_identity_suite() {
    let q = builtin_family("quadratic").unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for x in [29, 50, 100] {
        let (s, dt) = timed(|| run_census(&q, x, 1, |_| Ok(())).unwrap());
        let id = identity_check(&s);
        let ok = id.applicable && id.all_pass() && s.unclassified.is_empty() && large_cycle_scan(&s)[&3].is_empty();
        pass &= ok && (x != 100 || dt < Duration::from_secs(30));
        parts.push(format!("X = {x}: NE = {}, R = {}, {} in {dt:.2?}", s.ne, s.r, if ok { "ok" } else { "broken" }));
    }
    report(3, pass, format!("{} (exact, X = 100 under 30 s)", parts.join("; ")));
}

#[test]
fn criterion_4_constants() {
    let tol = Rational::new(BigInt::from(1), BigInt::from(10u64).pow(20));
    let pi2 = pi(DEFAULT_PREC).square();
    let mut pass = true;
    for (q, r, k) in [(2, 1, 4), (4, 2, 1), (4, 0, 1)] {
        let c = constant_cqr(q, r).unwrap().value;
        pass &= within(&c.mul(&pi2), &Ball::exact_int(k, DEFAULT_PREC), &tol);
    }
    let (c1, c2) = constant_c1c2();
    pass &= within(&c1.value.mul_int(4), &c2.value, &tol);
    let c2f = c2.value.to_f64();
    pass &= (c2f - 4.607).abs() < 0.0005 * 4.607;
    let gsum = constant_gamma(1).unwrap().value.add(&constant_gamma(-3).unwrap().value);
    let alt = Ball::exact_int(12, DEFAULT_PREC).div(&pi2).mul(&gsum);
    pass &= within(&alt, &c2.value, &tol);
    report(4, pass, format!("C2 = {}, C1 = {}, class constants times pi^2 within 1e-20", c2.decimal, c1.decimal));
}

#[test]
fn criterion_5_oracle_equivalence() {
    let q = builtin_family("quadratic").unwrap();
    let ts = random_parameters(0xacce, 200, 50, false);
    let (mismatches, dt) = timed(|| {
        ts.iter()
            .filter(|t| {
                let m = q.specialize(t).unwrap();
                let r = compute_preper(&m, Some(&q), &EngineConfig::default()).unwrap();
                r.portrait.nodes != oracle_set(&m, 100, 200)
            })
            .count()
    });
    report(
        5,
        mismatches == 0 && dt < Duration::from_secs(120),
        format!("{mismatches} mismatches over {} parameters in {dt:.1?} (exact, < 2 min)", ts.len()),
    );
}

#[test]
fn criterion_6_tropical_soundness() {
    let q = builtin_family("quadratic").unwrap();
    let exhaustive = EngineConfig {
        use_filters: false,
        ..EngineConfig::default()
    };
    let (mut decided, mut mismatches) = (0, 0);
    for t in enumerate_rationals(200) {
        let m = q.specialize(&t).unwrap();
        let filtered = compute_preper(&m, Some(&q), &EngineConfig::default()).unwrap();
        if filtered.method == Method::TropicalFilter {
            decided += 1;
            if compute_preper(&m, None, &exhaustive).unwrap().portrait != filtered.portrait {
                mismatches += 1;
            }
        }
    }
    report(6, mismatches == 0, format!("{decided} filter verdicts, {mismatches} mismatches (zero tolerance)"));
}

#[test]
fn criterion_7_squarefull() {
    let small = squarefull_census(100).unwrap();
    let big = squarefull_census(1_000_000).unwrap();
    let rel = (big.exact as f64 - big.predicted).abs() / big.predicted;
    report(
        7,
        small.exact == 14 && rel <= 0.02,
        format!(
            "count(100) = {}, count(10^6) = {} vs {:.2} (relative gap {:.4}, tolerance 0.02)",
            small.exact, big.exact, big.predicted, rel
        ),
    );
}

#[test]
fn criterion_8_asymptotic_bands() {
    let q = builtin_family("quadratic").unwrap();
    let xs = [100, 400, 1600];
    let sums = run_census_checkpoints(&q, &xs, &CensusConfig::default(), |_| Ok(())).unwrap();
    let (c1, c2) = constant_c1c2();
    let (c1, c2) = (c1.value.to_f64(), c2.value.to_f64());
    let ne: Vec<f64> = sums.iter().map(|s| s.ne as f64 / s.x as f64).collect();
    let r: Vec<f64> = sums.iter().map(|s| s.r as f64 / s.x as f64).collect();
    let toward = |v: &[f64], c: f64| v.windows(2).all(|w| (w[1] - c).abs() < (w[0] - c).abs());
    let band = (ne[2] - c1).abs() <= 0.30 * c1 && (r[2] - c2).abs() <= 0.30 * c2;
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ");
    report(
        8,
        band && toward(&ne, c1) && toward(&r, c2),
        format!(
            "NE/X = [{}] -> C1 = {c1:.4}, R/X = [{}] -> C2 = {c2:.4} (band 0.30 at X = 1600, monotone approach)",
            fmt(&ne),
            fmt(&r)
        ),
    );
}

#[test]
fn criterion_9_determinism() {
    let one = csv_bytes(100, 1);
    let eight = csv_bytes(100, 8);
    report(
        9,
        one == eight,
        format!("{} bytes with 1 worker, {} with 8, identical = {}", one.len(), eight.len(), one == eight),
    );
}

