//! Exact combinatorial scalars.
//!
//! Everything here is an exact rational: factorials, binomials, Bernoulli
//! numbers (with `B_1 = -1/2`), the `A_{q,j}` coefficients that expand the
//! derivatives of `1/(e^w - 1)`, and Chebyshev coefficient tables.
//!
//! The growing tables are published behind an `RwLock`: an entry, once
//! pushed, is never modified, so readers only ever see finished values.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

/// `n / d` as a [`Rational`].
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as a [`Rational`].
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `(-1)^e`.
pub fn sign_pow(e: i64) -> Rational {
    if e.rem_euclid(2) == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// `2^e` for `e >= 0`.
pub fn pow2(e: u32) -> Rational {
    Rational::from_integer(BigInt::one() << e as usize)
}

/// Renders a rational as `p/q`, always including the denominator.
pub fn to_pq_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse_int = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("not an integer: {t:?}")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(parse_int(n)?, d))
        }
        None => Ok(Rational::from_integer(parse_int(s)?)),
    }
}

fn factorial_table() -> &'static RwLock<Vec<BigInt>> {
    static TABLE: OnceLock<RwLock<Vec<BigInt>>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(vec![BigInt::one()]))
}

/// `n!` as an exact integer.
pub fn factorial_int(n: usize) -> BigInt {
    {
        let table = factorial_table().read().unwrap();
        if let Some(v) = table.get(n) {
            return v.clone();
        }
    }
    let mut table = factorial_table().write().unwrap();
    while table.len() <= n {
        let next = table.last().unwrap() * BigInt::from(table.len());
        table.push(next);
    }
    table[n].clone()
}

/// `n!` as a [`Rational`].
pub fn factorial(n: usize) -> Rational {
    Rational::from_integer(factorial_int(n))
}

/// Binomial coefficient `C(n, k)`; zero when `k < 0` or `k > n`.
pub fn binomial(n: u64, k: i64) -> Rational {
    if k < 0 || k as u64 > n {
        return Rational::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= BigInt::from(n - i);
        acc /= BigInt::from(i + 1);
    }
    Rational::from_integer(acc)
}

fn bernoulli_table() -> &'static RwLock<Vec<Rational>> {
    static TABLE: OnceLock<RwLock<Vec<Rational>>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(vec![Rational::one()]))
}

/// The `n`-th Bernoulli number, `B_1 = -1/2` convention.
///
/// Solved upward from `B_0 = 1` through `sum_{q=0}^{m} C(m+1, q) B_q = 0`.
pub fn bernoulli(n: usize) -> Rational {
    if n >= 3 && n % 2 == 1 {
        return Rational::zero();
    }
    {
        let table = bernoulli_table().read().unwrap();
        if let Some(v) = table.get(n) {
            return v.clone();
        }
    }
    let mut table = bernoulli_table().write().unwrap();
    while table.len() <= n {
        let m = table.len();
        let value = if m >= 3 && m % 2 == 1 {
            Rational::zero()
        } else {
            let mut sum = Rational::zero();
            for (q, b) in table.iter().enumerate() {
                if !b.is_zero() {
                    sum += binomial(m as u64 + 1, q as i64) * b;
                }
            }
            -sum / int(m as i64 + 1)
        };
        table.push(value);
    }
    table[n].clone()
}

fn a_coeff_table() -> &'static RwLock<HashMap<(usize, usize), Rational>> {
    static TABLE: OnceLock<RwLock<HashMap<(usize, usize), Rational>>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// `A_{q,j} = sum_{r=0}^{j-1} (-1)^{r+q} C(j-1, r) (j-r)^q` for `1 <= j <= q+1`.
///
/// These are the coefficients of `d^q/dw^q (1/(e^w-1)) = sum_j A_{q,j} / (e^w-1)^j`.
pub fn a_coeff(q: usize, j: i64) -> Result<Rational> {
    if j < 1 || j as usize > q + 1 {
        return Err(Error::InvalidArgument(format!(
            "A_{{q,j}} needs 1 <= j <= q+1, got q={q}, j={j}"
        )));
    }
    let j = j as usize;
    if let Some(v) = a_coeff_table().read().unwrap().get(&(q, j)) {
        return Ok(v.clone());
    }
    let mut sum = BigInt::zero();
    for r in 0..j {
        let term = binomial(j as u64 - 1, r as i64).to_integer()
            * num_traits::pow(BigInt::from(j - r), q);
        if (r + q).is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let value = Rational::from_integer(sum);
    a_coeff_table()
        .write()
        .unwrap()
        .entry((q, j))
        .or_insert_with(|| value.clone());
    Ok(value)
}

/// Infallible `A_{q,j}` for loop bounds that are in range by construction.
pub(crate) fn a(q: usize, j: usize) -> Rational {
    a_coeff(q, j as i64).expect("A_{q,j} index within 1..=q+1")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChebyshevKind {
    First,
    Second,
}

/// Coefficients of `T_n` or `U_n` in the monomial basis, `coeffs[i]` for `x^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChebyshevCoeffs {
    pub kind: ChebyshevKind,
    pub degree: usize,
    pub coeffs: Vec<Rational>,
}

impl ChebyshevCoeffs {
    /// Horner evaluation in floating point.
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| {
            let c = num_traits::ToPrimitive::to_f64(c).unwrap_or(f64::NAN);
            acc * x + c
        })
    }
}

/// Chebyshev coefficients from the explicit factorial formulas.
///
/// `T_n(x) = (n/2) sum_k (-1)^k (n-k-1)! / (k! (n-2k)!) (2x)^{n-2k}` (with
/// `T_0 = 1`), and `U_n(x) = sum_k (-1)^k (n-k)! / (k! (n-2k)!) (2x)^{n-2k}`.
pub fn chebyshev_coeffs(kind: ChebyshevKind, n: usize) -> ChebyshevCoeffs {
    let mut coeffs = vec![Rational::zero(); n + 1];
    if n == 0 {
        coeffs[0] = Rational::one();
    } else {
        for k in 0..=n / 2 {
            let deg = n - 2 * k;
            let mut c = match kind {
                ChebyshevKind::First => {
                    int(n as i64) / int(2) * factorial(n - k - 1)
                        / (factorial(k) * factorial(deg))
                }
                ChebyshevKind::Second => factorial(n - k) / (factorial(k) * factorial(deg)),
            };
            c *= pow2(deg as u32);
            if k % 2 == 1 {
                c = -c;
            }
            coeffs[deg] = c;
        }
    }
    ChebyshevCoeffs {
        kind,
        degree: n,
        coeffs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(5, 2), int(10));
        assert_eq!(binomial(7, 0), int(1));
        assert_eq!(binomial(4, 7), int(0));
        assert_eq!(binomial(4, -1), int(0));
    }

    #[test]
    fn bernoulli_examples() {
        assert_eq!(bernoulli(0), int(1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(3), int(0));
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(12), rat(-691, 2730));
    }

    /// Akiyama-Tanigawa: an independent route to B_n, in the B_1 = +1/2 convention.
    fn akiyama_tanigawa(n: usize) -> Rational {
        let mut a: Vec<Rational> = Vec::new();
        for m in 0..=n {
            a.push(rat(1, m as i64 + 1));
            for j in (1..=m).rev() {
                a[j - 1] = int(j as i64) * (&a[j - 1] - &a[j]);
            }
        }
        a[0].clone()
    }

    #[test]
    fn bernoulli_matches_akiyama_tanigawa() {
        for n in 0..=30 {
            let mut expected = akiyama_tanigawa(n);
            if n == 1 {
                expected = -expected;
            }
            assert_eq!(bernoulli(n), expected, "B_{n}");
        }
    }

    #[test]
    fn bernoulli_binomial_identity() {
        for m in 2..=30usize {
            let sum: Rational = (0..=m)
                .map(|q| binomial(m as u64, q as i64) * bernoulli(q))
                .sum();
            assert_eq!(sum, bernoulli(m), "m = {m}");
        }
    }

    #[test]
    fn a_coeff_examples() {
        assert_eq!(a_coeff(0, 1).unwrap(), int(1));
        assert_eq!(a_coeff(2, 3).unwrap(), int(2));
        assert_eq!(a_coeff(1, 1).unwrap(), int(-1));
        assert!(a_coeff(2, 0).is_err());
        assert!(a_coeff(2, 4).is_err());
    }

    #[test]
    fn a_coeff_diagonal() {
        for r in 1..=12usize {
            let expected = sign_pow(r as i64 - 1) * factorial(r - 1);
            assert_eq!(a_coeff(r - 1, r as i64).unwrap(), expected, "r = {r}");
        }
    }

    #[test]
    fn a_coeff_integer_valued() {
        for q in 0..10 {
            for j in 1..=q as i64 + 1 {
                assert!(a_coeff(q, j).unwrap().is_integer());
            }
        }
    }

    /// `d^q/dw^q` of `1/(e^w - 1)` by the Cauchy integral on a circle that
    /// stays clear of the poles at `2 pi i Z`.
    fn cauchy_derivative(w: num_complex::Complex64, q: usize) -> num_complex::Complex64 {
        use num_complex::Complex64;
        let two_pi = 2.0 * std::f64::consts::PI;
        let dist = [0.0, two_pi, -two_pi]
            .iter()
            .map(|&im| (w - Complex64::new(0.0, im)).norm())
            .fold(f64::INFINITY, f64::min);
        let rho = dist / 2.0;
        let n = 256;
        let mut acc = Complex64::new(0.0, 0.0);
        for t in 0..n {
            let theta = two_pi * t as f64 / n as f64;
            let z = w + Complex64::from_polar(rho, theta);
            let f = (z.exp() - 1.0).inv();
            acc += f * Complex64::from_polar(1.0, -(q as f64) * theta);
        }
        let qf: f64 = (1..=q).map(|i| i as f64).product();
        acc / n as f64 * qf / rho.powi(q as i32)
    }

    #[test]
    fn a_coeff_derivative_identity() {
        use num_complex::Complex64;
        use num_traits::ToPrimitive;
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed);
        let mut checked = 0;
        while checked < 20 {
            let w = Complex64::new(rng.gen_range(0.3..2.5), rng.gen_range(-2.0..2.0));
            let base = w.exp() - 1.0;
            if base.norm() <= 0.1 {
                continue;
            }
            for q in 0..=8 {
                let series: Complex64 = (1..=q + 1)
                    .map(|j| a(q, j).to_f64().unwrap() / base.powi(j as i32))
                    .sum();
                let direct = cauchy_derivative(w, q);
                let rel = (series - direct).norm() / direct.norm().max(1e-300);
                assert!(rel < 1e-6, "q={q} w={w} rel={rel}");
            }
            checked += 1;
        }
    }

    #[test]
    fn chebyshev_examples() {
        let t0 = chebyshev_coeffs(ChebyshevKind::First, 0);
        assert_eq!(t0.coeffs, vec![int(1)]);
        let t2 = chebyshev_coeffs(ChebyshevKind::First, 2);
        assert_eq!(t2.coeffs, vec![int(-1), int(0), int(2)]);
        let u1 = chebyshev_coeffs(ChebyshevKind::Second, 1);
        assert_eq!(u1.coeffs, vec![int(0), int(2)]);
        let u0 = chebyshev_coeffs(ChebyshevKind::Second, 0);
        assert_eq!(u0.coeffs, vec![int(1)]);
    }

    #[test]
    fn chebyshev_degree_and_parity() {
        for kind in [ChebyshevKind::First, ChebyshevKind::Second] {
            for n in 0..=12 {
                let c = chebyshev_coeffs(kind, n);
                assert_eq!(c.degree, n);
                assert!(!c.coeffs[n].is_zero());
                for (i, v) in c.coeffs.iter().enumerate() {
                    if (i + n) % 2 == 1 {
                        assert!(v.is_zero(), "{kind:?} n={n} i={i}");
                    }
                }
            }
        }
    }

    #[test]
    fn chebyshev_trig_identities() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for n in 0..=12 {
            let t = chebyshev_coeffs(ChebyshevKind::First, n);
            let u = chebyshev_coeffs(ChebyshevKind::Second, n);
            for _ in 0..100 {
                let theta: f64 = rng.gen_range(0.0..std::f64::consts::PI);
                let c = theta.cos();
                assert!((t.eval_f64(c) - (n as f64 * theta).cos()).abs() < 1e-12);
                assert!(
                    (u.eval_f64(c) * theta.sin() - ((n + 1) as f64 * theta).sin()).abs() < 1e-12
                );
            }
        }
    }

    #[test]
    fn pq_round_trip() {
        for r in [rat(-5, 16632), int(0), int(691), rat(1, 3)] {
            assert_eq!(parse_rational(&to_pq_string(&r)).unwrap(), r);
        }
        assert_eq!(parse_rational("12").unwrap(), int(12));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
