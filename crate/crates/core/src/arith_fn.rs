//! Multiplicative functions over a concrete modulus.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow};

use crate::error::{Error, Result};
use crate::exact_arith::Rational;

/// Prime factorization with strictly increasing primes.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// The number this factorization reconstructs.
    pub fn value(&self) -> u64 {
        self.factors.iter().map(|&(p, e)| p.pow(e)).product()
    }
}

/// Trial division.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::InvalidArgument("cannot factorize 0".into()));
    }
    let mut factors = Vec::new();
    let mut rest = n;
    let mut p = 2u64;
    while p.saturating_mul(p) <= rest {
        if rest.is_multiple_of(p) {
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(Factorization { factors })
}

/// Jordan totient `J_s(k) = k^s prod_{p | k} (1 - p^{-s})`.
///
/// Computed as the integer `prod p^{s(e-1)} (p^s - 1)` over `p^e || k`.
pub fn jordan_totient(s: u32, k: u64) -> Rational {
    Rational::from_integer(jordan_totient_int(s, k))
}

pub(crate) fn jordan_totient_int(s: u32, k: u64) -> BigInt {
    assert!(k >= 1, "Jordan totient needs k >= 1");
    let f = factorize(k).expect("k >= 1");
    f.factors()
        .iter()
        .map(|&(p, e)| {
            let ps: BigInt = Pow::pow(BigInt::from(p), s);
            Pow::pow(ps.clone(), e - 1) * (ps - BigInt::one())
        })
        .product()
}

/// Euler's totient, identical to `J_1`.
pub fn euler_phi(k: u64) -> Rational {
    jordan_totient(1, k)
}

pub(crate) fn phi_u64(k: u64) -> u64 {
    factorize(k)
        .expect("k >= 1")
        .factors()
        .iter()
        .map(|&(p, e)| p.pow(e - 1) * (p - 1))
        .product()
}

/// Residues `1 <= m <= k` with `gcd(m, k) = 1`, ascending.
pub fn coprime_residues(k: u64) -> Vec<u64> {
    (1..=k).filter(|m| m.gcd(&k) == 1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::int;
    use proptest::prelude::*;

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(12).unwrap().factors(), &[(2, 2), (3, 1)]);
        assert!(factorize(1).unwrap().factors().is_empty());
        assert_eq!(factorize(97).unwrap().factors(), &[(97, 1)]);
        assert!(factorize(0).is_err());
    }

    #[test]
    fn jordan_examples() {
        assert_eq!(jordan_totient(1, 12), int(4));
        assert_eq!(jordan_totient(2, 3), int(8));
        assert_eq!(jordan_totient(2, 4), int(12));
        assert_eq!(jordan_totient(3, 1), int(1));
    }

    #[test]
    fn phi_examples() {
        assert_eq!(euler_phi(12), int(4));
        assert_eq!(euler_phi(1), int(1));
        assert_eq!(euler_phi(7), int(6));
    }

    #[test]
    fn coprime_examples() {
        assert_eq!(coprime_residues(12), vec![1, 5, 7, 11]);
        assert_eq!(coprime_residues(3), vec![1, 2]);
        assert_eq!(coprime_residues(1), vec![1]);
    }

    #[test]
    fn coprime_count_is_phi() {
        for k in 1..=1000u64 {
            assert_eq!(int(coprime_residues(k).len() as i64), euler_phi(k), "k={k}");
            assert_eq!(phi_u64(k), coprime_residues(k).len() as u64);
        }
    }

    #[test]
    fn divisor_sum_of_jordan() {
        for n in 1..=500u64 {
            for s in 1..=6u32 {
                let sum: Rational = (1..=n)
                    .filter(|d| n % d == 0)
                    .map(|d| jordan_totient(s, d))
                    .sum();
                assert_eq!(sum, Rational::from_integer(Pow::pow(BigInt::from(n), s)));
            }
        }
    }

    /// Literal `k^s prod (1 - p^{-s})` over rationals.
    fn jordan_by_definition(s: u32, k: u64) -> Rational {
        let mut acc = Rational::from_integer(Pow::pow(BigInt::from(k), s));
        for p in factorize(k).unwrap().primes() {
            let ps = Rational::from_integer(Pow::pow(BigInt::from(p), s));
            acc *= int(1) - ps.recip();
        }
        acc
    }

    proptest! {
        #[test]
        fn factorization_reconstructs(n in 1u64..1_000_000) {
            let f = factorize(n).unwrap();
            prop_assert_eq!(f.value(), n);
            prop_assert!(f.factors().windows(2).all(|w| w[0].0 < w[1].0));
        }

        #[test]
        fn jordan_multiplicative(m in 1u64..10_000, n in 1u64..10_000, s in 1u32..=12) {
            prop_assume!(m.gcd(&n) == 1);
            prop_assert_eq!(
                jordan_totient(s, m * n),
                jordan_totient(s, m) * jordan_totient(s, n)
            );
        }

        #[test]
        fn jordan_matches_definition(k in 1u64..5000, s in 1u32..=8) {
            prop_assert_eq!(jordan_totient(s, k), jordan_by_definition(s, k));
        }
    }
}
