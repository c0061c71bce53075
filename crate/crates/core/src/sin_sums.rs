//! Reciprocal sine power sums `SIN(n) = sum_{(m,k)=1} sin(pi m/k)^{-n}`.
//!
//! For even `n` the sum is a rational combination of Jordan totients of `k`.
//! The expansion is built bottom-up from `SIN(0) = phi(k) = J_1(k)`: each
//! step assembles a Laurent polynomial in `k` out of smaller sine sums, and
//! every power of `k` other than `k^0` has to cancel.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_traits::Zero;

use crate::arith_fn::coprime_residues;
use crate::error::{Error, Result};
use crate::exact_arith::{a, bernoulli, binomial, factorial, int, pow2, sign_pow};
use crate::highprec::{CompensatedSum, Real};
use crate::symbolic::{Format, JordanCombo, KLaurent, Render};

fn sin_table() -> &'static RwLock<Vec<JordanCombo>> {
    static TABLE: OnceLock<RwLock<Vec<JordanCombo>>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(vec![JordanCombo::term(1, int(1))]))
}

fn recip_table() -> &'static RwLock<HashMap<usize, JordanCombo>> {
    static TABLE: OnceLock<RwLock<HashMap<usize, JordanCombo>>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn require_even(n: usize) -> Result<()> {
    if n % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "sine power sums are only expanded for even exponents, got {n}"
        )));
    }
    Ok(())
}

/// Already-published `SIN(t)` for even `t`; callers guarantee `t` is built.
fn cached(t: usize) -> JordanCombo {
    sin_table().read().unwrap()[t / 2].clone()
}

/// Exact Jordan-totient expansion of `SIN(n)` for even `n`.
pub fn sin_sum_exact(n: usize) -> Result<JordanCombo> {
    require_even(n)?;
    if let Some(v) = sin_table().read().unwrap().get(n / 2) {
        return Ok(v.clone());
    }
    loop {
        let next = sin_table().read().unwrap().len() * 2;
        if next > n {
            break;
        }
        let laurent = sin_sum_recursion(next)?;
        let value = collect_constant(&laurent, next)?;
        let mut table = sin_table().write().unwrap();
        if table.len() * 2 == next {
            table.push(value);
        }
    }
    Ok(cached(n))
}

/// Rejects any surviving `k^e` with `e != 0` and returns the `k^0` part.
fn collect_constant(laurent: &KLaurent, n: usize) -> Result<JordanCombo> {
    if let Some((e, residue)) = laurent.iter().find(|&(e, _)| e != 0) {
        return Err(Error::Cancellation {
            context: format!("SIN({n})"),
            exponent: e,
            residue: residue.render(Format::Text),
        });
    }
    Ok(laurent.coeff(0))
}

/// The recursion for `SIN(n)` before collecting powers of `k`.
///
/// Requires `SIN(t)` for all even `t < n` (built on demand). For `n = 0`
/// this is just `J_1`.
pub fn sin_sum_recursion(n: usize) -> Result<KLaurent> {
    require_even(n)?;
    if n == 0 {
        return Ok(KLaurent::monomial(0, JordanCombo::term(1, int(1))));
    }
    if n > 2 {
        sin_sum_exact(n - 2)?;
    }
    let half = (n / 2) as i64;
    let mut out = KLaurent::new();
    let lead = sign_pow(half + 1) * pow2(n as u32) * bernoulli(n) / factorial(n);
    out.add_combo(0, &JordanCombo::term(n as u32, lead), &int(1));

    let pref = sign_pow(half) * pow2(n as u32) / factorial(n);
    for q in 0..=n {
        let bq = bernoulli(q);
        if bq.is_zero() {
            continue;
        }
        let wq = &pref * binomial(n as u64, q as i64) * bq;
        for j in 1..=n - q {
            let w = &wq * binomial((n - q) as u64, j as i64);
            let e = (q + j) as i64 - 1;
            let deg = n - q - j;
            let mut inner = JordanCombo::new();
            for alpha in 1..=deg + 1 {
                let weight = a(deg, alpha) * int(if alpha % 2 == 0 { alpha as i64 } else { 1 });
                let fl = alpha / 2;
                for c in 0..=fl {
                    let co = sign_pow((c + alpha.div_ceil(2)) as i64) * factorial(alpha - c - 1)
                        / (pow2(2 * c as u32 + 1) * factorial(c) * factorial(2 * fl - 2 * c));
                    let wc = &weight * co;
                    for d in 0..=fl - c {
                        if alpha as i64 - 2 * d as i64 == n as i64 {
                            continue;
                        }
                        let t = 2 * fl - 2 * d;
                        let coef = &wc * sign_pow(d as i64) * binomial((fl - c) as u64, d as i64);
                        inner.add_scaled(&cached(t), &coef);
                    }
                }
            }
            out.add_combo(e, &inner, &w);
        }
    }
    Ok(out)
}

/// `Re sum_{(m,k)=1} (e^{2 pi i m/k} - 1)^{-n}` as a Jordan combination.
///
/// The pairing `m <-> k - m` makes the sum real. Only even sine powers
/// appear, for either parity of `n`.
pub fn reciprocal_power_sum(n: usize) -> Result<JordanCombo> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "reciprocal power sums start at exponent 1".into(),
        ));
    }
    if let Some(v) = recip_table().read().unwrap().get(&n) {
        return Ok(v.clone());
    }
    sin_sum_exact(if n.is_multiple_of(2) { n } else { n - 1 })?;
    let mut out = JordanCombo::new();
    if n.is_multiple_of(2) {
        let half = n / 2;
        for c in 0..=half {
            let co = int(n as i64) * sign_pow((c + half) as i64) * factorial(n - c - 1)
                / (pow2(2 * c as u32 + 1) * factorial(c) * factorial(n - 2 * c));
            let t = half - c;
            for d in 0..=t {
                let coef = &co * sign_pow(d as i64) * binomial(t as u64, d as i64);
                out.add_scaled(&cached(n - 2 * d), &coef);
            }
        }
    } else {
        for e in 0..=(n - 1) / 2 {
            let co = sign_pow((e + n.div_ceil(2)) as i64) * factorial(n - e - 1)
                / (pow2(2 * e as u32 + 1) * factorial(e) * factorial(n - 2 * e - 1));
            let t = (n - 2 * e - 1) / 2;
            for f in 0..=t {
                let coef = &co * sign_pow(f as i64) * binomial(t as u64, f as i64);
                out.add_scaled(&cached(n - 2 * f - 1), &coef);
            }
        }
    }
    recip_table()
        .write()
        .unwrap()
        .entry(n)
        .or_insert_with(|| out.clone());
    Ok(out)
}

/// Direct evaluation of `SIN(n)` at a concrete modulus.
pub fn sin_sum_numeric(n: usize, k: u64, precision_bits: usize) -> Result<Real> {
    require_even(n)?;
    if k < 3 {
        return Err(Error::InvalidArgument(format!(
            "sine sums are evaluated for k >= 3, got k = {k}"
        )));
    }
    let work = precision_bits + 32;
    let pi_over_k = &Real::pi(work) / &Real::from_u64(k, work);
    let mut acc = CompensatedSum::new(work);
    for m in coprime_residues(k) {
        let s = (&pi_over_k * &Real::from_u64(m, work)).sin();
        acc.add(&s.recip().powi(n));
    }
    Ok(acc.total().with_prec(precision_bits))
}
