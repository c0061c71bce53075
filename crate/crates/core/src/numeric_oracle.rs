//! Brute-force numerics used to check the closed forms.
//!
//! Characters are enumerated from an explicit cyclic decomposition of
//! `(Z/kZ)^*`, L-values come from finite Hurwitz zeta combinations
//! `L(r, chi) = k^{-r} sum_a chi(a) zeta(r, a/k)`, and the exponential sums
//! are evaluated term by term.

use std::sync::Arc;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith_fn::{coprime_residues, factorize, phi_u64};
use crate::error::{Error, Result};
use crate::exact_arith::{a, bernoulli, binomial, factorial, Rational};
use crate::highprec::{CompensatedSum, Complex, ComplexSum, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// Parity matching `chi(-1) = (-1)^r`.
    pub fn of(r: usize) -> Parity {
        if r.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// `(Z/kZ)^*` as a product of cyclic groups.
#[derive(Clone, Debug)]
pub struct CharacterGroup {
    modulus: u64,
    /// `(generator, order)` per cyclic factor.
    factors: Vec<(u64, u64)>,
    /// Exponent vector of each residue, indexed by residue; `None` if not a unit.
    dlog: Vec<Option<Vec<u64>>>,
    /// lcm of the factor orders; character values are `L`-th roots of unity.
    exponent: u64,
}

impl CharacterGroup {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn factors(&self) -> &[(u64, u64)] {
        &self.factors
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().map(|&(_, o)| o).product()
    }

    /// lcm of the cyclic orders.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn dlog(&self, m: u64) -> Option<&[u64]> {
        self.dlog[(m % self.modulus) as usize].as_deref()
    }
}

fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let m = m as u128;
    let mut acc = 1 % m;
    let mut base = b as u128 % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc as u64
}

/// Smallest primitive root modulo an odd prime power.
fn primitive_root(p: u64, pa: u64) -> u64 {
    let order = phi_u64(pa);
    let primes: Vec<u64> = factorize(order).expect("order >= 1").primes().collect();
    (2..pa)
        .find(|&g| g % p != 0 && primes.iter().all(|&q| pow_mod(g, order / q, pa) != 1))
        .expect("odd prime powers are cyclic")
}

/// `x` with `x = g mod pa` and `x = 1 mod rest` (coprime moduli).
fn crt_lift(g: u64, pa: u64, rest: u64) -> u64 {
    if rest == 1 {
        return g % pa;
    }
    // x = 1 + rest * t, need rest * t = g - 1 mod pa
    let inv = mod_inverse(rest % pa, pa);
    let t = ((g + pa - 1) % pa) as u128 * inv as u128 % pa as u128;
    (1 + rest as u128 * t) as u64 % (pa * rest)
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    let e = (a as i128).extended_gcd(&(m as i128));
    debug_assert_eq!(e.gcd, 1);
    e.x.rem_euclid(m as i128) as u64
}

/// Builds the cyclic decomposition and discrete-log table for modulus `k`.
pub fn character_group(k: u64) -> Result<CharacterGroup> {
    if k == 0 {
        return Err(Error::InvalidArgument("modulus must be positive".into()));
    }
    let fact = factorize(k)?;
    let mut factors = Vec::new();
    for &(p, e) in fact.factors() {
        let pa = p.pow(e);
        let rest = k / pa;
        let local: Vec<(u64, u64)> = if p == 2 {
            match e {
                1 => vec![],
                2 => vec![(3, 2)],
                _ => vec![(pa - 1, 2), (3, pa / 4)],
            }
        } else {
            vec![(primitive_root(p, pa), phi_u64(pa))]
        };
        for (g, order) in local {
            factors.push((crt_lift(g, pa, rest), order));
        }
    }
    let exponent = factors.iter().fold(1u64, |acc, &(_, o)| acc.lcm(&o));
    let mut dlog: Vec<Option<Vec<u64>>> = vec![None; k as usize];
    let total: u64 = factors.iter().map(|&(_, o)| o).product();
    let mut vec = vec![0u64; factors.len()];
    for _ in 0..total {
        let m = factors
            .iter()
            .zip(&vec)
            .fold(1 % k, |acc, (&(g, _), &t)| {
                (acc as u128 * pow_mod(g, t, k) as u128 % k as u128) as u64
            });
        let slot = &mut dlog[m as usize];
        assert!(slot.is_none(), "generators of (Z/{k}Z)^* are not independent");
        *slot = Some(vec.clone());
        for (i, &(_, o)) in factors.iter().enumerate() {
            vec[i] += 1;
            if vec[i] < o {
                break;
            }
            vec[i] = 0;
        }
    }
    debug_assert_eq!(total, phi_u64(k));
    Ok(CharacterGroup {
        modulus: k,
        factors,
        dlog,
        exponent,
    })
}

/// A character, given by the exponents it assigns to each generator.
#[derive(Clone, Debug)]
pub struct DirichletCharacter {
    group: Arc<CharacterGroup>,
    exponents: Vec<u64>,
}

impl DirichletCharacter {
    pub fn group(&self) -> &CharacterGroup {
        &self.group
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus
    }

    /// `chi(m) = exp(2 pi i t / L)` with `L` the group exponent; `None` when
    /// `gcd(m, k) > 1`.
    pub fn value_exponent(&self, m: u64) -> Option<u64> {
        let l = self.group.exponent;
        let v = self.group.dlog(m)?;
        let t = self
            .exponents
            .iter()
            .zip(v)
            .zip(&self.group.factors)
            .fold(0u64, |acc, ((&e, &x), &(_, o))| {
                (acc + (e * x % o) * (l / o)) % l
            });
        Some(t)
    }

    pub fn value(&self, m: u64, precision_bits: usize) -> Complex {
        match self.value_exponent(m) {
            None => Complex::zero(precision_bits),
            Some(t) => Complex::root_of_unity(t as i64, self.group.exponent, precision_bits),
        }
    }

    pub fn is_principal(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    pub fn parity(&self) -> Parity {
        let t = self.value_exponent(self.modulus() - 1).unwrap_or(0);
        if t == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn conj(&self) -> DirichletCharacter {
        DirichletCharacter {
            group: Arc::clone(&self.group),
            exponents: self
                .exponents
                .iter()
                .zip(&self.group.factors)
                .map(|(&e, &(_, o))| (o - e) % o)
                .collect(),
        }
    }
}

/// All `phi(k)` characters mod `k`, principal first.
pub fn characters(k: u64) -> Result<Vec<DirichletCharacter>> {
    let group = Arc::new(character_group(k)?);
    let orders: Vec<u64> = group.factors.iter().map(|&(_, o)| o).collect();
    let mut out = Vec::with_capacity(group.order() as usize);
    let mut vec = vec![0u64; orders.len()];
    for _ in 0..group.order() {
        out.push(DirichletCharacter {
            group: Arc::clone(&group),
            exponents: vec.clone(),
        });
        for (i, &o) in orders.iter().enumerate() {
            vec[i] += 1;
            if vec[i] < o {
                break;
            }
            vec[i] = 0;
        }
    }
    Ok(out)
}

pub fn characters_with_parity(k: u64, parity: Parity) -> Result<Vec<DirichletCharacter>> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!(
            "parity classes are split only for k >= 3, got k = {k}"
        )));
    }
    Ok(characters(k)?
        .into_iter()
        .filter(|c| c.parity() == parity)
        .collect())
}

/// The principal character mod `k`.
pub fn principal_character(k: u64) -> Result<DirichletCharacter> {
    Ok(characters(k)?.swap_remove(0))
}

/// Euler-Maclaurin for `sum_{n>=0} (n+x)^{-s}`.
///
/// For `s = 1` the divergent part is dropped and the result is `-psi(x)`,
/// which is what `L(1, chi)` needs once `sum_a chi(a) = 0`.
fn euler_maclaurin(s: u32, x: &Rational, work: usize) -> Result<Real> {
    let xf = x.to_f64().unwrap_or(f64::NAN);
    if xf.is_nan() || xf <= 0.0 {
        return Err(Error::InvalidArgument(
            "Hurwitz parameter must be positive".into(),
        ));
    }
    let n_head = (0.15 * work as f64) as u64 + s as u64 + 10;
    let base = n_head as f64 + xf;
    // log2 of 4 (s)_{2M} / (2 pi)^{2M} * base^{1 - s - 2M} / (s + 2M - 1)
    let sf = s as f64;
    let max_terms = 4 * work + 64;
    let mut log_rising = 0.0f64;
    let mut m_tail = None;
    for m in 1..=max_terms {
        let j = 2 * m as u64;
        log_rising += ((sf + j as f64 - 2.0).ln() + (sf + j as f64 - 1.0).ln()) / 2f64.ln();
        let bound = 2.0 + log_rising - j as f64 * (2.0 * std::f64::consts::PI).log2()
            + (1.0 - sf - j as f64) * base.log2()
            - (sf + j as f64 - 1.0).log2();
        if bound < -(work as f64) - 8.0 {
            m_tail = Some(m);
            break;
        }
    }
    let m_tail = m_tail.ok_or(Error::PrecisionUnreachable {
        bits: work,
        limit: max_terms,
    })?;

    let xr = Real::from_rational(x, work);
    let mut acc = CompensatedSum::new(work);
    for n in 0..n_head {
        let t = &Real::from_u64(n, work) + &xr;
        acc.add(&t.powi(s as usize).recip());
    }
    let nb = &Real::from_u64(n_head, work) + &xr;
    let nb_inv = nb.recip();
    if s == 1 {
        acc.add(&-nb.ln());
    } else {
        let head = &nb.powi(s as usize - 1).recip() / &Real::from_u64(s as u64 - 1, work);
        acc.add(&head);
    }
    let nb_pow_s = nb_inv.powi(s as usize);
    acc.add(&(&nb_pow_s / &Real::from_u64(2, work)));
    // B_{2j}/(2j)! * (s)_{2j-1} * (N+x)^{-s-2j+1}
    let nb_inv_sq = &nb_inv * &nb_inv;
    let mut power = &nb_pow_s * &nb_inv;
    let mut rising = Rational::from_integer(s.into());
    for j in 1..=m_tail {
        if j > 1 {
            let lo = (s + 2 * j as u32 - 3) as i64;
            rising *= Rational::from_integer((lo * (lo + 1)).into());
            power = &power * &nb_inv_sq;
        }
        let c = bernoulli(2 * j) / factorial(2 * j) * &rising;
        acc.add(&(&Real::from_rational(&c, work) * &power));
    }
    Ok(acc.total())
}

/// Hurwitz zeta `zeta(s, x)` for integer `s >= 2` and rational `x > 0`.
pub fn hurwitz_zeta(s: u32, x: &Rational, precision_bits: usize) -> Result<Real> {
    if s < 2 {
        return Err(Error::InvalidArgument(format!(
            "Hurwitz zeta needs s >= 2, got {s}"
        )));
    }
    Ok(euler_maclaurin(s, x, precision_bits + 16)?.with_prec(precision_bits))
}

/// Working precision for `k^{-r} sum_a chi(a) zeta(r, a/k)`: the terms reach
/// `k^r` while the result is of order one.
fn l_work_prec(r: u32, k: u64, precision_bits: usize) -> usize {
    precision_bits + (r as f64 * (k as f64).log2()).ceil() as usize + 32
}

/// `zeta(r, a/k)` (or `-psi(a/k)` at `r = 1`) for every unit `a`.
fn hurwitz_row(r: u32, k: u64, work: usize) -> Result<Vec<(u64, Real)>> {
    coprime_residues(k)
        .into_par_iter()
        .map(|a_| {
            let x = Rational::new(a_.into(), k.into());
            euler_maclaurin(r, &x, work).map(|v| (a_, v))
        })
        .collect()
}

fn l_from_row(r: u32, chi: &DirichletCharacter, row: &[(u64, Real)], work: usize) -> Complex {
    let mut acc = ComplexSum::new(work);
    for (a_, z) in row {
        acc.add(&chi.value(*a_, work).scale(z));
    }
    let k_pow = Real::from_u64(chi.modulus(), work).powi(r as usize).recip();
    acc.total().scale(&k_pow)
}

fn check_l_args(r: u32, chi: &DirichletCharacter) -> Result<()> {
    match r {
        0 => Err(Error::InvalidArgument("L-values need r >= 1".into())),
        1 if chi.parity() != Parity::Odd => Err(Error::InvalidArgument(
            "L(1, chi) is only evaluated for odd characters".into(),
        )),
        _ => Ok(()),
    }
}

/// `L(r, chi)` to `precision_bits`.
pub fn l_value_numeric(r: u32, chi: &DirichletCharacter, precision_bits: usize) -> Result<Complex> {
    check_l_args(r, chi)?;
    let work = l_work_prec(r, chi.modulus(), precision_bits);
    let row = hurwitz_row(r, chi.modulus(), work)?;
    let l = l_from_row(r, chi, &row, work);
    Ok(Complex::new(
        l.re.with_prec(precision_bits),
        l.im.with_prec(precision_bits),
    ))
}

/// `sum |L(r, chi)|^2` over characters with `chi(-1) = (-1)^r`.
pub fn mean_square_numeric(r: u32, k: u64, precision_bits: usize) -> Result<Real> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be positive".into()));
    }
    let chars = characters_with_parity(k, Parity::of(r as usize))?;
    mean_square_over(r, &chars, precision_bits)
}

/// Mean square over an explicit character list, summed in list order.
pub fn mean_square_over(
    r: u32,
    chars: &[DirichletCharacter],
    precision_bits: usize,
) -> Result<Real> {
    let Some(first) = chars.first() else {
        return Ok(Real::zero(precision_bits));
    };
    for chi in chars {
        check_l_args(r, chi)?;
    }
    let work = l_work_prec(r, first.modulus(), precision_bits);
    let row = hurwitz_row(r, first.modulus(), work)?;
    let squares: Vec<Real> = chars
        .par_iter()
        .map(|chi| l_from_row(r, chi, &row, work).norm_sqr())
        .collect();
    let mut acc = CompensatedSum::new(work);
    for sq in &squares {
        acc.add(sq);
    }
    Ok(acc.total().with_prec(precision_bits))
}

/// `sum_{(m,k)=1} (sum_j j^p w^{mj}) (sum_s s^q w^{+-ms})`, `w = e^{2 pi i/k}`.
pub fn exp_sum_direct(
    p: u32,
    q: u32,
    k: u64,
    conjugate_second: bool,
    precision_bits: usize,
) -> Result<Complex> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!("need k >= 3, got k = {k}")));
    }
    let work = precision_bits + 32;
    let powered = |m: u64, e: u32, sign: i64| {
        let mut acc = ComplexSum::new(work);
        for j in 1..k {
            let w = Complex::root_of_unity(sign * ((m * j % k) as i64), k, work);
            acc.add(&w.scale(&Real::from_u64(j, work).powi(e as usize)));
        }
        acc.total()
    };
    let mut total = ComplexSum::new(work);
    for m in coprime_residues(k) {
        let first = powered(m, p, 1);
        let second = powered(m, q, if conjugate_second { -1 } else { 1 });
        total.add(&(&first * &second));
    }
    let t = total.total();
    Ok(Complex::new(
        t.re.with_prec(precision_bits),
        t.im.with_prec(precision_bits),
    ))
}

/// Checks `sum_{j<k} j^n w^{mj} = sum_j C(n,j) k^j sum_alpha A_{n-j,alpha} / (w^m - 1)^alpha`
/// at 128 bits, to `1e-10` relative.
pub fn power_exp_identity_check(n: u32, m: u64, k: u64) -> Result<bool> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!("need k >= 3, got k = {k}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("power must be positive".into()));
    }
    if m.gcd(&k) != 1 {
        return Err(Error::InvalidArgument(format!(
            "m = {m} is not coprime to k = {k}"
        )));
    }
    let prec = 128;
    let work = prec + 32;
    let mut lhs = ComplexSum::new(work);
    for j in 1..k {
        let w = Complex::root_of_unity((m * j % k) as i64, k, work);
        lhs.add(&w.scale(&Real::from_u64(j, work).powi(n as usize)));
    }
    let lhs = lhs.total();

    let base = &Complex::root_of_unity((m % k) as i64, k, work) - &Complex::from_real(Real::one(work));
    let inv = base.recip();
    let n = n as usize;
    let mut rhs = ComplexSum::new(work);
    for j in 1..=n {
        let outer = binomial(n as u64, j as i64)
            * Rational::from_integer(num_traits::pow(num_bigint::BigInt::from(k), j));
        let mut inner = ComplexSum::new(work);
        for alpha in 1..=n - j + 1 {
            let c = a(n - j, alpha);
            if c.is_zero() {
                continue;
            }
            inner.add(&inv.powi(alpha).scale(&Real::from_rational(&c, work)));
        }
        rhs.add(&inner.total().scale(&Real::from_rational(&outer, work)));
    }
    let rhs = rhs.total();
    let diff = (&lhs - &rhs).max_abs();
    let scale = lhs.max_abs().max(&rhs.max_abs()).max(&Real::one(work));
    Ok((&diff / &scale).to_f64() <= 1e-10)
}
