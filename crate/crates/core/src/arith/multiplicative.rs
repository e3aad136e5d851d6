//! Sieve, trial-division factorization and the classical multiplicative
//! functions φ, μ, ω, τ.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Trial division uses every prime up to this bound.
pub const SIEVE_LIMIT: u64 = 1_000_000;

/// Primes up to [`SIEVE_LIMIT`], computed once.
pub fn prime_sieve() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(SIEVE_LIMIT))
}

fn primes_up_to(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// `φ(0..=n)` by a linear pass; index 0 is unused.
pub(crate) fn totient_sieve(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut phi: Vec<u64> = (0..=n as u64).collect();
    for i in 2..=n {
        if phi[i] == i as u64 {
            let mut j = i;
            while j <= n {
                phi[j] -= phi[j] / i as u64;
                j += i;
            }
        }
    }
    phi
}

/// Prime factorization `[(p, e)]` in ascending order; `factor_u64(1)` is empty.
///
/// A cofactor left after dividing out all sieve primes is prime when it is
/// below `SIEVE_LIMIT²`; anything larger is reported as unfactorable.
pub fn factor_u64(mut n: u64) -> Result<Vec<(u64, u32)>> {
    assert!(n >= 1, "cannot factor 0");
    let mut out = Vec::new();
    let mut exhausted = true;
    for &p in prime_sieve() {
        if p * p > n {
            exhausted = false;
            break;
        }
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if n > 1 {
        // no factor ≤ SIEVE_LIMIT remains, so n is prime unless n > SIEVE_LIMIT²
        if exhausted && n / SIEVE_LIMIT > SIEVE_LIMIT {
            return Err(Error::FactorizationLimit(n.to_string()));
        }
        out.push((n, 1));
    }
    Ok(out)
}

/// Factorization of `|n|` for an arbitrary-precision nonzero integer.
pub fn factor_bigint(n: &BigInt) -> Result<Vec<(BigInt, u32)>> {
    assert!(!n.is_zero(), "cannot factor 0");
    let mut n = n.abs();
    if let Some(small) = n.to_u64() {
        return Ok(factor_u64(small)?
            .into_iter()
            .map(|(p, e)| (BigInt::from(p), e))
            .collect());
    }
    let mut out = Vec::new();
    for &p in prime_sieve() {
        let pb = BigInt::from(p);
        if &pb * &pb > n {
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = n.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            n = q;
            e += 1;
        }
        if e > 0 {
            out.push((pb, e));
            if let Some(small) = n.to_u64() {
                for (p, e) in factor_u64(small)? {
                    out.push((BigInt::from(p), e));
                }
                return Ok(out);
            }
        }
    }
    if !n.is_one() {
        let limit = BigInt::from(SIEVE_LIMIT);
        if n > &limit * &limit {
            return Err(Error::FactorizationLimit(n.to_string()));
        }
        out.push((n, 1));
    }
    Ok(out)
}

/// All positive divisors, ascending.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    let mut ds = vec![1u64];
    for (p, e) in factor_u64(n)? {
        let len = ds.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    Ok(ds)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MultiplicativeSuite {
    pub phi: u64,
    pub mu: i8,
    pub omega: u32,
    pub tau: u64,
}

/// Euler totient, Möbius, distinct prime count and divisor count of `n ≥ 1`.
pub fn multiplicative_suite(n: u64) -> Result<MultiplicativeSuite> {
    if n == 0 {
        return Err(Error::InvalidArgument("multiplicative functions need n ≥ 1".into()));
    }
    let fac = factor_u64(n)?;
    let mut phi = 1u64;
    let mut tau = 1u64;
    let mut squarefree = true;
    for &(p, e) in &fac {
        phi = phi
            .checked_mul((p - 1) * p.pow(e - 1))
            .ok_or(Error::Overflow("totient"))?;
        tau = tau.checked_mul(e as u64 + 1).ok_or(Error::Overflow("divisor count"))?;
        squarefree &= e == 1;
    }
    let omega = fac.len() as u32;
    let mu = if !squarefree {
        0
    } else if omega % 2 == 0 {
        1
    } else {
        -1
    };
    Ok(MultiplicativeSuite { phi, mu, omega, tau })
}

pub fn is_squarefree(n: u64) -> Result<bool> {
    Ok(factor_u64(n)?.iter().all(|&(_, e)| e == 1))
}

/// Every prime factor occurs at least twice.
pub fn is_squarefull(n: u64) -> Result<bool> {
    Ok(factor_u64(n)?.iter().all(|&(_, e)| e >= 2))
}

/// The unique `(b, m)` with `n = b²·m³` and `m` squarefree, for squarefull `n`.
pub fn squarefull_decompose(n: u64) -> Result<Option<(u64, u64)>> {
    let fac = factor_u64(n)?;
    if fac.iter().any(|&(_, e)| e < 2) {
        return Ok(None);
    }
    let mut b = 1u64;
    let mut m = 1u64;
    for (p, e) in fac {
        let (half, cube) = if e % 2 == 0 { (e / 2, false) } else { ((e - 3) / 2, true) };
        b = b
            .checked_mul(p.checked_pow(half).ok_or(Error::Overflow("squarefull b"))?)
            .ok_or(Error::Overflow("squarefull b"))?;
        if cube {
            m *= p;
        }
    }
    Ok(Some((b, m)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn suite(n: u64) -> (u64, i8, u32, u64) {
        let s = multiplicative_suite(n).unwrap();
        (s.phi, s.mu, s.omega, s.tau)
    }

    #[test]
    fn suite_examples() {
        assert_eq!(suite(12), (4, 0, 2, 6));
        assert_eq!(suite(1), (1, 1, 0, 1));
        // six distinct primes, so μ = +1
        assert_eq!(suite(30030), (5760, 1, 6, 64));
        assert!(multiplicative_suite(0).is_err());
    }

    #[test]
    fn mobius_inversion_of_totient() {
        let phi = totient_sieve(10_000);
        for n in 1..=10_000u64 {
            let s: i64 = divisors(n)
                .unwrap()
                .into_iter()
                .map(|k| multiplicative_suite(k).unwrap().mu as i64 * (n / k) as i64)
                .sum();
            assert_eq!(s, phi[n as usize] as i64, "n = {n}");
            if n <= 2000 {
                assert_eq!(multiplicative_suite(n).unwrap().phi, phi[n as usize]);
            }
        }
    }

    #[test]
    fn squarefull_examples() {
        assert_eq!(squarefull_decompose(72).unwrap(), Some((3, 2)));
        assert!(!is_squarefull(12).unwrap());
        assert_eq!(squarefull_decompose(12).unwrap(), None);
        assert_eq!(squarefull_decompose(1_000_000).unwrap(), Some((1000, 1)));
        assert_eq!(squarefull_decompose(1).unwrap(), Some((1, 1)));
    }

    #[test]
    fn squarefull_reconstruction_to_a_million() {
        let mut count = 0;
        for n in 1..=1_000_000u64 {
            if let Some((b, m)) = squarefull_decompose(n).unwrap() {
                assert_eq!(b * b * m * m * m, n);
                assert!(is_squarefree(m).unwrap());
                count += 1;
            }
        }
        assert!(count > 2000);
    }

    #[test]
    fn large_factorizations() {
        let p = 1_000_003u64; // prime just above the sieve
        assert_eq!(factor_u64(p).unwrap(), vec![(p, 1)]);
        assert_eq!(factor_u64(2 * p).unwrap(), vec![(2, 1), (p, 1)]);
        assert!(factor_u64(p * p).is_err());
        let big = BigInt::from(2u64).pow(70) * BigInt::from(3);
        assert_eq!(
            factor_bigint(&big).unwrap(),
            vec![(BigInt::from(2), 70), (BigInt::from(3), 1)]
        );
        assert_eq!(divisors(12).unwrap(), vec![1, 2, 3, 4, 6, 12]);
    }
}
