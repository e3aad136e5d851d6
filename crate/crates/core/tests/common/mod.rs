#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use preper_core::arith::{enumerate_rationals, rat, rational_height, ExtRational, Rational};
use preper_core::family::SpecializedMap;

/// Plain affine evaluation `F(z, 1) / G(z, 1)`, written independently of the
/// engine's homogeneous evaluator.
pub fn apply(m: &SpecializedMap, p: &ExtRational) -> ExtRational {
    let (f, g) = (m.f(), m.g());
    match p {
        ExtRational::Infinity => {
            let d = f.len() - 1;
            if g[d].is_zero() {
                ExtRational::Infinity
            } else {
                ExtRational::Finite(Rational::new(f[d].clone(), g[d].clone()))
            }
        }
        ExtRational::Finite(z) => {
            let horner = |c: &[BigInt]| {
                c.iter()
                    .rev()
                    .fold(Rational::zero(), |acc, ci| acc * z + Rational::from_integer(ci.clone()))
            };
            let den = horner(g);
            if den.is_zero() {
                ExtRational::Infinity
            } else {
                ExtRational::Finite(horner(f) / den)
            }
        }
    }
}

/// Orbit of `p` revisits itself within `steps` iterations before any point
/// exceeds a huge height.
pub fn oracle_preperiodic(m: &SpecializedMap, p: &ExtRational, steps: usize) -> bool {
    let cap = BigInt::from(10u64).pow(9);
    let mut seen = BTreeSet::new();
    let mut q = p.clone();
    for _ in 0..=steps {
        if !seen.insert(q.clone()) {
            return true;
        }
        if let ExtRational::Finite(z) = &q {
            if rational_height(z) > cap {
                return false;
            }
        }
        q = apply(m, &q);
    }
    false
}

pub fn oracle_set(m: &SpecializedMap, height: u64, steps: usize) -> Vec<ExtRational> {
    std::iter::once(ExtRational::Infinity)
        .chain(enumerate_rationals(height).map(ExtRational::Finite))
        .filter(|p| oracle_preperiodic(m, p, steps))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

pub fn random_parameters(seed: u64, n: usize, max_height: i64, nonzero: bool) -> Vec<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < n {
        let a: i64 = rng.gen_range(-max_height..=max_height);
        let b: i64 = rng.gen_range(1..=max_height);
        if a.gcd(&b) != 1 || (nonzero && a == 0) {
            continue;
        }
        out.push(rat(a, b));
    }
    out
}
