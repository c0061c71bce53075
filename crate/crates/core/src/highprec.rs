//! Thin multi-precision real and complex types over `astro-float`.
//!
//! Each value carries the precision (in bits) its operations run at; binary
//! operations use the larger of the two operand precisions. Transcendental
//! constants come from a per-thread cache so values can be built on worker
//! threads without coordination.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::BigInt;
use num_traits::Zero;

use crate::exact_arith::Rational;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

#[derive(Clone, Debug)]
pub struct Real {
    v: BigFloat,
    prec: usize,
}

impl Real {
    fn wrap(v: BigFloat, prec: usize) -> Self {
        Real { v, prec }
    }

    pub fn zero(prec: usize) -> Self {
        Self::from_i64(0, prec)
    }

    pub fn one(prec: usize) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn from_i64(i: i64, prec: usize) -> Self {
        Self::wrap(BigFloat::from_i64(i, prec), prec)
    }

    pub fn from_u64(u: u64, prec: usize) -> Self {
        Self::wrap(BigFloat::from_u64(u, prec), prec)
    }

    pub fn from_bigint(n: &BigInt, prec: usize) -> Self {
        if n.is_zero() {
            return Self::zero(prec);
        }
        let (sign, words) = n.to_u64_digits();
        let sign = match sign {
            num_bigint::Sign::Minus => Sign::Neg,
            _ => Sign::Pos,
        };
        let exponent = (64 * words.len()) as i32;
        let mut v = BigFloat::from_words(&words, sign, exponent);
        v.set_precision(prec, RM).expect("precision change");
        Self::wrap(v, prec)
    }

    /// Rounds an exact rational to `prec` bits (one division, so at most a
    /// couple of ulps off).
    pub fn from_rational(r: &Rational, prec: usize) -> Self {
        let guard = prec + 16;
        let n = Self::from_bigint(r.numer(), guard);
        let d = Self::from_bigint(r.denom(), guard);
        (&n / &d).with_prec(prec)
    }

    pub fn pi(prec: usize) -> Self {
        Self::wrap(with_consts(|cc| cc.pi(prec, RM)), prec)
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn with_prec(&self, prec: usize) -> Self {
        let mut v = self.v.clone();
        v.set_precision(prec, RM).expect("precision change");
        Self::wrap(v, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.v.is_negative() && !self.v.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.v.is_nan() && !self.v.is_inf()
    }

    pub fn abs(&self) -> Self {
        Self::wrap(self.v.abs(), self.prec)
    }

    pub fn recip(&self) -> Self {
        Self::wrap(self.v.reciprocal(self.prec, RM), self.prec)
    }

    pub fn powi(&self, n: usize) -> Self {
        Self::wrap(self.v.powi(n, self.prec, RM), self.prec)
    }

    /// Integer power allowing negative exponents.
    pub fn powi_signed(&self, n: i64) -> Self {
        let p = self.powi(n.unsigned_abs() as usize);
        if n < 0 {
            p.recip()
        } else {
            p
        }
    }

    pub fn sin(&self) -> Self {
        Self::wrap(with_consts(|cc| self.v.sin(self.prec, RM, cc)), self.prec)
    }

    pub fn cos(&self) -> Self {
        Self::wrap(with_consts(|cc| self.v.cos(self.prec, RM, cc)), self.prec)
    }

    pub fn ln(&self) -> Self {
        Self::wrap(with_consts(|cc| self.v.ln(self.prec, RM, cc)), self.prec)
    }

    pub fn max(&self, other: &Real) -> Real {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    /// `|self - other| / |other|`, or `|self|` when `other` is zero.
    pub fn rel_diff(&self, other: &Real) -> Real {
        let d = (self - other).abs();
        if other.is_zero() {
            d
        } else {
            &d / &other.abs()
        }
    }

    /// Nearest `f64`.
    pub fn to_f64(&self) -> f64 {
        if self.v.is_zero() {
            return 0.0;
        }
        let s = with_consts(|cc| self.v.format(Radix::Dec, RM, cc)).unwrap_or_default();
        s.parse::<f64>().unwrap_or(f64::NAN)
    }

    /// Scientific notation with `digits` significant decimal digits, e.g.
    /// `1.2337005501361698273543113749845e0`.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        if self.v.is_zero() {
            return "0".to_string();
        }
        if !self.is_finite() {
            return "NaN".to_string();
        }
        let raw = with_consts(|cc| self.v.format(Radix::Dec, RM, cc)).unwrap_or_default();
        round_scientific(&raw, digits.max(1))
    }
}

/// Rounds a decimal string like `-2.3333e+0` to `digits` significant digits.
fn round_scientific(raw: &str, digits: usize) -> String {
    let (neg, body) = match raw.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, raw),
    };
    let (mant, exp) = match body.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().unwrap_or(0)),
        None => (body, 0),
    };
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    let all: Vec<u8> = int_part
        .bytes()
        .chain(frac_part.bytes())
        .map(|b| b - b'0')
        .collect();
    // Position of the decimal point relative to the first digit.
    let lead = all.iter().position(|&d| d != 0).unwrap_or(0);
    let mut exp10 = exp + int_part.len() as i64 - 1 - lead as i64;
    let sig = &all[lead..];
    let mut kept: Vec<u8> = sig.iter().copied().take(digits).collect();
    while kept.len() < digits {
        kept.push(0);
    }
    if sig.len() > digits && sig[digits] >= 5 {
        let mut i = digits;
        loop {
            if i == 0 {
                kept.insert(0, 1);
                kept.pop();
                exp10 += 1;
                break;
            }
            i -= 1;
            if kept[i] == 9 {
                kept[i] = 0;
            } else {
                kept[i] += 1;
                break;
            }
        }
    }
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push((b'0' + kept[0]) as char);
    if digits > 1 {
        out.push('.');
        out.extend(kept[1..].iter().map(|&d| (b'0' + d) as char));
    }
    out.push_str(&format!("e{exp10}"));
    out
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = (self.prec as f64 * std::f64::consts::LOG10_2).floor() as usize;
        f.write_str(&self.to_decimal_string(digits.max(1)))
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.v.cmp(&other.v).map(|c| c.cmp(&0))
    }
}

macro_rules! real_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let prec = self.prec.max(rhs.prec);
                Real::wrap(self.v.$method(&rhs.v, prec, RM), prec)
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
    };
}

real_binop!(Add, add);
real_binop!(Sub, sub);
real_binop!(Mul, mul);
real_binop!(Div, div);

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::wrap(BigFloat::neg(&self.v), self.prec)
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        -&self
    }
}

/// Neumaier-compensated accumulator.
#[derive(Clone, Debug)]
pub struct CompensatedSum {
    sum: Real,
    comp: Real,
}

impl CompensatedSum {
    pub fn new(prec: usize) -> Self {
        CompensatedSum {
            sum: Real::zero(prec),
            comp: Real::zero(prec),
        }
    }

    pub fn add(&mut self, x: &Real) {
        let t = &self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = &self.comp + &(&(&self.sum - &t) + x);
        } else {
            self.comp = &self.comp + &(&(x - &t) + &self.sum);
        }
        self.sum = t;
    }

    pub fn total(&self) -> Real {
        &self.sum + &self.comp
    }
}

#[derive(Clone, Debug)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Self {
        Complex { re, im }
    }

    pub fn zero(prec: usize) -> Self {
        Complex::new(Real::zero(prec), Real::zero(prec))
    }

    pub fn from_real(re: Real) -> Self {
        let prec = re.prec();
        Complex::new(re, Real::zero(prec))
    }

    /// `exp(2 pi i t / n)`.
    pub fn root_of_unity(t: i64, n: u64, prec: usize) -> Self {
        let t = t.rem_euclid(n as i64);
        // Exact values on the axes keep characters of order 1, 2 and 4 exact.
        let q = 4 * t as u64;
        if q.is_multiple_of(n) {
            let (re, im) = match q / n {
                0 => (1, 0),
                1 => (0, 1),
                2 => (-1, 0),
                _ => (0, -1),
            };
            return Complex::new(Real::from_i64(re, prec), Real::from_i64(im, prec));
        }
        let angle = &(&Real::pi(prec + 16) * &Real::from_i64(2 * t, prec + 16))
            / &Real::from_u64(n, prec + 16);
        Complex::new(angle.cos().with_prec(prec), angle.sin().with_prec(prec))
    }

    pub fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -&self.im)
    }

    pub fn norm_sqr(&self) -> Real {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn scale(&self, s: &Real) -> Self {
        Complex::new(&self.re * s, &self.im * s)
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        Complex::new(&self.re / &n, -&(&self.im / &n))
    }

    pub fn powi(&self, n: usize) -> Self {
        let prec = self.re.prec();
        let mut acc = Complex::from_real(Real::one(prec));
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Largest of `|re|`, `|im|`.
    pub fn max_abs(&self) -> Real {
        self.re.abs().max(&self.im.abs())
    }
}

impl Add<&Complex> for &Complex {
    type Output = Complex;
    fn add(self, rhs: &Complex) -> Complex {
        Complex::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub<&Complex> for &Complex {
    type Output = Complex;
    fn sub(self, rhs: &Complex) -> Complex {
        Complex::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul<&Complex> for &Complex {
    type Output = Complex;
    fn mul(self, rhs: &Complex) -> Complex {
        Complex::new(
            &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        )
    }
}

/// Compensated accumulation of complex values, componentwise.
#[derive(Clone, Debug)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub fn new(prec: usize) -> Self {
        ComplexSum {
            re: CompensatedSum::new(prec),
            im: CompensatedSum::new(prec),
        }
    }

    pub fn add(&mut self, z: &Complex) {
        self.re.add(&z.re);
        self.im.add(&z.im);
    }

    pub fn total(&self) -> Complex {
        Complex::new(self.re.total(), self.im.total())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::rat;

    #[test]
    fn rational_conversion() {
        let x = Real::from_rational(&rat(-7, 3), 128);
        assert!((x.to_f64() + 7.0 / 3.0).abs() < 1e-15);
        let big = Rational::from_integer(BigInt::from(3) << 200usize);
        let y = Real::from_rational(&big, 128);
        let expected = &Real::from_i64(3, 128) * &Real::from_i64(2, 128).powi(200);
        assert!(y.rel_diff(&expected).to_f64() < 1e-35);
    }

    #[test]
    fn pi_and_trig() {
        let pi = Real::pi(192);
        assert!((pi.to_f64() - std::f64::consts::PI).abs() < 1e-15);
        let s = (&pi / &Real::from_i64(6, 192)).sin();
        assert!(s.rel_diff(&Real::from_rational(&rat(1, 2), 192)).to_f64() < 1e-55);
    }

    #[test]
    fn decimal_rounding() {
        assert_eq!(round_scientific("2.33335e+0", 5), "2.3334e0");
        assert_eq!(round_scientific("9.9996e-3", 4), "1.000e-2");
        assert_eq!(round_scientific("-1.25e+2", 2), "-1.3e2");
        assert_eq!(round_scientific("1.0e+0", 3), "1.00e0");
        let x = Real::from_rational(&rat(1, 3), 128);
        assert_eq!(x.to_decimal_string(6), "3.33333e-1");
    }

    #[test]
    fn roots_of_unity() {
        let prec = 128;
        let i = Complex::root_of_unity(1, 4, prec);
        assert!(i.re.is_zero());
        assert_eq!(i.im.to_f64(), 1.0);
        let w = Complex::root_of_unity(1, 3, prec);
        let cube = w.powi(3);
        assert!((cube.re.to_f64() - 1.0).abs() < 1e-30);
        assert!(cube.im.to_f64().abs() < 1e-30);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let prec = 64;
        let mut s = CompensatedSum::new(prec);
        let big = Real::from_i64(1, prec).with_prec(prec);
        let tiny = &Real::one(prec) / &Real::from_i64(2, prec).powi(80);
        s.add(&big);
        for _ in 0..4 {
            s.add(&tiny);
        }
        s.add(&-&big);
        let expected = &tiny * &Real::from_i64(4, prec);
        assert_eq!(s.total(), expected);
    }
}
