//! Mean squares `sum_{chi(-1) = (-1)^r} |L(r, chi)|^2` in closed form.
//!
//! Writing `N = r`, both parities reduce to double sums over Bernoulli
//! indices `q1, q2` of products of the power exponential sums
//! `g_p(m) = sum_{j=1}^{k-1} j^p e^{2 pi i m j / k}`, summed over `m`
//! coprime to `k`. Three families appear:
//!
//! * `sigma0`: single `g_p`, collapses to `phi(k)/2` at `r = 1` and to zero
//!   otherwise.
//! * `sigma1`: `g_p * g_{q-a}` with an extra binomial loop over `a`.
//! * `sigma2`: `g_p * g_q`.
//!
//! The odd case uses `N = 2h+1` with `q <= 2h`, the even ("prime") case
//! `N = 2h` with `q <= 2h-2`. Each `Re sum_m g_p g_q` is expanded through
//! [`realjs_laurent`] into reciprocal power sums and then sine sums, so every
//! builder returns an exact [`KLaurent`].

use std::collections::{BTreeMap, HashMap};
use std::sync::{OnceLock, RwLock};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact_arith::{a, bernoulli, binomial, factorial, int, pow2, sign_pow, Rational};
use crate::highprec::Real;
use crate::sin_sums::reciprocal_power_sum;
use crate::symbolic::{ClosedForm, Format, JordanCombo, KLaurent, Render};

/// Text deviations applied to the even-case formulas, for `--pedantic`.
pub const EVEN_CASE_DEVIATIONS: &[&str] = &[
    "even case: the undefined offset h0 in the A-coefficient subscript A_{2h+h0-q1-j, alpha} is taken as 0",
    "even case: in sigma1' the inner beta range runs to 2h-q2-a-s+1 (the A-coefficient domain); the printed upper limit 2h-q2-a-s breaks sigma1' = sigma2'",
];

fn realjs_table() -> &'static RwLock<HashMap<(usize, usize), KLaurent>> {
    static TABLE: OnceLock<RwLock<HashMap<(usize, usize), KLaurent>>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(HashMap::new()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum SigmaKind {
    Zero,
    One,
    Two,
}

type SigmaTable = RwLock<HashMap<(SigmaKind, usize, usize), KLaurent>>;

fn sigma_table() -> &'static SigmaTable {
    static TABLE: OnceLock<SigmaTable> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// `Re sum_{(m,k)=1} g_p(m) g_q(m)` as a Laurent polynomial in `k`.
///
/// `sum_{j,s} C(p,j) C(q,s) k^{j+s} sum_{alpha,beta} A_{p-j,alpha} A_{q-s,beta} R(alpha+beta)`
/// where `R(n)` is [`reciprocal_power_sum`].
pub fn realjs_laurent(p: usize, q: usize) -> Result<KLaurent> {
    if p == 0 || q == 0 {
        return Err(Error::InvalidArgument(format!(
            "power exponential sums need positive powers, got ({p}, {q})"
        )));
    }
    if let Some(v) = realjs_table().read().unwrap().get(&(p, q)) {
        return Ok(v.clone());
    }
    // Collect rational weights per (k-exponent, reciprocal power) first.
    let mut weights: BTreeMap<(i64, usize), Rational> = BTreeMap::new();
    for j in 1..=p {
        for s in 1..=q {
            let w = binomial(p as u64, j as i64) * binomial(q as u64, s as i64);
            for alpha in 1..=p - j + 1 {
                let wa = &w * a(p - j, alpha);
                for beta in 1..=q - s + 1 {
                    let slot = weights
                        .entry(((j + s) as i64, alpha + beta))
                        .or_insert_with(Rational::zero);
                    *slot += &wa * a(q - s, beta);
                }
            }
        }
    }
    let mut out = KLaurent::new();
    for ((e, n), w) in weights {
        out.add_combo(e, &reciprocal_power_sum(n)?, &w);
    }
    realjs_table()
        .write()
        .unwrap()
        .entry((p, q))
        .or_insert_with(|| out.clone());
    Ok(out)
}

/// `sum_{(m,k)=1} g_p(m)`, which is real.
fn single_sum_laurent(p: usize) -> Result<KLaurent> {
    let mut out = KLaurent::new();
    for j in 1..=p {
        let mut inner = JordanCombo::new();
        for alpha in 1..=p - j + 1 {
            inner.add_scaled(&reciprocal_power_sum(alpha)?, &a(p - j, alpha));
        }
        out.add_combo(j as i64, &inner, &binomial(p as u64, j as i64));
    }
    Ok(out)
}

/// `B_{q1} B_{q2} C(N,q1) C(N,q2)` over `q1, q2 <= q_max`, skipping zeros.
fn bernoulli_pairs(n_top: usize, q_max: usize) -> Vec<(usize, usize, Rational)> {
    let mut out = Vec::new();
    for q1 in 0..=q_max {
        for q2 in 0..=q_max {
            let w = bernoulli(q1)
                * bernoulli(q2)
                * binomial(n_top as u64, q1 as i64)
                * binomial(n_top as u64, q2 as i64);
            if !w.is_zero() {
                out.push((q1, q2, w));
            }
        }
    }
    out
}

fn build(kind: SigmaKind, n_top: usize, q_max: usize) -> Result<KLaurent> {
    let key = (kind, n_top, q_max);
    if let Some(v) = sigma_table().read().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let n = n_top as i64;
    let mut out = KLaurent::new();
    for (q1, q2, w) in bernoulli_pairs(n_top, q_max) {
        let base = q1 as i64 + q2 as i64 - 2 * n;
        match kind {
            SigmaKind::Zero => {
                // k^{-(2N - q1 - q2)} * (-k^{N - q2}) * sum_m g_{N-q1}
                let term = single_sum_laurent(n_top - q1)?.shifted(base + n - q2 as i64);
                out.add_scaled(&term, &-w);
            }
            SigmaKind::One => {
                for a_ in 0..n_top - q2 {
                    let wa = &w
                        * sign_pow((n_top - q2 - a_) as i64)
                        * binomial((n_top - q2) as u64, a_ as i64);
                    let term = realjs_laurent(n_top - q1, n_top - q2 - a_)?;
                    out.add_scaled(&term.shifted(base + a_ as i64), &wa);
                }
            }
            SigmaKind::Two => {
                let term = realjs_laurent(n_top - q1, n_top - q2)?;
                out.add_scaled(&term.shifted(base), &w);
            }
        }
    }
    sigma_table()
        .write()
        .unwrap()
        .entry(key)
        .or_insert_with(|| out.clone());
    Ok(out)
}

fn require_h(h: usize, min: usize, what: &str) -> Result<()> {
    if h < min {
        return Err(Error::InvalidArgument(format!(
            "{what} needs h >= {min}, got h = {h}"
        )));
    }
    Ok(())
}

/// Odd-case single-sum term. Equals `phi(k)/2` at `h = 0` and vanishes for
/// `h >= 1`.
pub fn sigma0(h: usize) -> Result<KLaurent> {
    build(SigmaKind::Zero, 2 * h + 1, 2 * h)
}

/// Odd-case cross term with the extra binomial loop.
pub fn sigma1(h: usize) -> Result<KLaurent> {
    require_h(h, 1, "sigma1")?;
    build(SigmaKind::One, 2 * h + 1, 2 * h)
}

/// Odd-case product term; the body of the odd mean-square formula.
pub fn sigma2(h: usize) -> Result<KLaurent> {
    require_h(h, 1, "sigma2")?;
    build(SigmaKind::Two, 2 * h + 1, 2 * h)
}

/// Even-case single-sum term; vanishes for `h >= 2`.
pub fn sigma0_prime(h: usize) -> Result<KLaurent> {
    require_h(h, 2, "sigma0'")?;
    build(SigmaKind::Zero, 2 * h, 2 * h - 2)
}

pub fn sigma1_prime(h: usize) -> Result<KLaurent> {
    require_h(h, 2, "sigma1'")?;
    build(SigmaKind::One, 2 * h, 2 * h - 2)
}

/// Even-case product term; the body of the even mean-square formula.
pub fn sigma2_prime(h: usize) -> Result<KLaurent> {
    require_h(h, 2, "sigma2'")?;
    build(SigmaKind::Two, 2 * h, 2 * h - 2)
}

/// A mean-square closed form, possibly with a second additive term.
///
/// Only `r = 1` carries a correction: the `phi(k)^2` contribution of the
/// single-sum term, which vanishes for every other `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeanSquareForm {
    pub r: usize,
    pub main: ClosedForm,
    pub correction: Option<ClosedForm>,
}

impl MeanSquareForm {
    pub fn terms(&self) -> impl Iterator<Item = &ClosedForm> {
        std::iter::once(&self.main).chain(self.correction.iter())
    }

    pub fn evaluate(&self, k: u64, precision_bits: usize) -> Result<Real> {
        let mut total = Real::zero(precision_bits);
        for f in self.terms() {
            total = &total + &f.evaluate(k, precision_bits)?;
        }
        Ok(total)
    }

    /// Exact value divided by `pi^{2r}`; every term shares that power.
    pub fn rational_part(&self, k: u64) -> Rational {
        self.terms().map(|f| f.rational_part(k)).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        match &self.correction {
            None => self.main.to_json(),
            Some(c) => serde_json::Value::Array(vec![self.main.to_json(), c.to_json()]),
        }
    }
}

impl Render for MeanSquareForm {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json().to_string(),
            _ => {
                let parts: Vec<String> = self.terms().map(|f| f.render(format)).collect();
                parts.join(" + ")
            }
        }
    }
}

/// `sum_{chi odd} |L(r, chi)|^2` for odd `r`.
///
/// `-2^{2r-2} pi^{2r} / (r!^2 k^2) * phi(k) * sigma2((r-1)/2)`, plus
/// `pi^2 phi(k)^2 / (4 k^2)` when `r = 1`.
pub fn mean_square_odd(r: usize) -> Result<MeanSquareForm> {
    if r.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "the odd-character formula needs odd r, got r = {r}"
        )));
    }
    let h = (r - 1) / 2;
    let body = build(SigmaKind::Two, 2 * h + 1, 2 * h)?.shifted(-2);
    let r_fact = factorial(r);
    let scalar = -pow2(2 * r as u32 - 2) / (&r_fact * &r_fact);
    let main = ClosedForm::new(scalar, 2 * r as u32, 1, body);
    let correction = if r == 1 {
        // |pi/k|^2 * phi(k)/2 * sigma0(0), with sigma0(0) = phi(k)/2
        Some(ClosedForm::new(
            Rational::new(1.into(), 2.into()),
            2,
            1,
            sigma0(0)?.shifted(-2),
        ))
    } else {
        None
    };
    Ok(MeanSquareForm {
        r,
        main,
        correction,
    })
}

/// `sum_{chi even} |L(r, chi)|^2` for even `r >= 4`.
///
/// `2^{2r-2} pi^{2r} / (r!^2 k^2) * phi(k) * sigma2'(r/2)`.
pub fn mean_square_even(r: usize) -> Result<MeanSquareForm> {
    if r % 2 == 1 || r < 4 {
        return Err(Error::InvalidArgument(format!(
            "the even-character formula needs even r >= 4 (h >= 2), got r = {r}"
        )));
    }
    let body = sigma2_prime(r / 2)?.shifted(-2);
    let r_fact = factorial(r);
    let scalar = pow2(2 * r as u32 - 2) / (&r_fact * &r_fact);
    Ok(MeanSquareForm {
        r,
        main: ClosedForm::new(scalar, 2 * r as u32, 1, body),
        correction: None,
    })
}

/// Dispatches on the parity of `r`.
pub fn mean_square(r: usize) -> Result<MeanSquareForm> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be positive".into()));
    }
    if r % 2 == 1 {
        mean_square_odd(r)
    } else {
        mean_square_even(r)
    }
}

/// `L(r, chi_0) = zeta(r) J_r(k) / k^r` for even `r`, with `zeta(r)` in
/// Bernoulli form `(-1)^{r/2+1} (2 pi)^r B_r / (2 r!)`.
pub fn l_principal_closed_form(r: usize) -> Result<ClosedForm> {
    if r == 0 || r % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "principal L-values are expanded for even r >= 2, got r = {r}"
        )));
    }
    let scalar =
        sign_pow(r as i64 / 2 + 1) * pow2(r as u32) * bernoulli(r) / (int(2) * factorial(r));
    Ok(ClosedForm::new(
        scalar,
        r as u32,
        0,
        KLaurent::monomial(-(r as i64), JordanCombo::term(r as u32, int(1))),
    ))
}

/// Exact `Re sum_{(m,k)=1} g_p(m) g_q(m)` at a concrete modulus.
pub fn realjs_rhs_exact(p: usize, q: usize, k: u64) -> Result<Rational> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!("need k >= 3, got k = {k}")));
    }
    Ok(realjs_laurent(p, q)?.evaluate(k))
}
