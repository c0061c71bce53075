//! Closed-form algebra over Jordan totients.
//!
//! * [`JordanCombo`]: `sum_s c_s J_s(k)` with rational `c_s`.
//! * [`KLaurent`]: `sum_e k^e * combo_e`, a Laurent polynomial in `k` whose
//!   coefficients are Jordan combinations.
//! * [`ClosedForm`]: `scalar * pi^a * phi(k)^b * body(k)`.
//!
//! All three keep a canonical representation (no stored zeros), so derived
//! equality is value equality. `ClosedForm` additionally normalizes its
//! body to coprime integer coefficients with a positive leading term, moving
//! the content into `scalar`; this is the shape the mean-square formulas are
//! usually quoted in.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};
use serde_json::{Map, Value};

use crate::arith_fn::{jordan_totient, phi_u64};
use crate::error::{Error, Result};
use crate::exact_arith::{parse_rational, to_pq_string, Rational};
use crate::highprec::Real;

/// Output format for [`Render`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Latex,
    Json,
    Text,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "latex" | "tex" => Ok(Format::Latex),
            "json" => Ok(Format::Json),
            "text" | "txt" => Ok(Format::Text),
            other => Err(Error::InvalidArgument(format!("unknown format {other:?}"))),
        }
    }
}

pub trait Render {
    fn render(&self, format: Format) -> String;
}

/// Renders any closed-form object.
pub fn render<R: Render + ?Sized>(value: &R, format: Format) -> String {
    value.render(format)
}

/// Rational linear combination of Jordan totients `J_s(k)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct JordanCombo {
    terms: BTreeMap<u32, Rational>,
}

impl JordanCombo {
    pub fn new() -> Self {
        Self::default()
    }

    /// `c * J_s(k)`.
    pub fn term(s: u32, c: Rational) -> Self {
        let mut out = Self::new();
        out.add_term(s, c);
        out
    }

    pub fn from_terms<I: IntoIterator<Item = (u32, Rational)>>(terms: I) -> Self {
        let mut out = Self::new();
        for (s, c) in terms {
            out.add_term(s, c);
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, s: u32) -> Rational {
        self.terms.get(&s).cloned().unwrap_or_else(Rational::zero)
    }

    /// Terms in ascending Jordan index.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (u32, &Rational)> {
        self.terms.iter().map(|(&s, c)| (s, c))
    }

    pub fn add_term(&mut self, s: u32, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(s).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&s);
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &JordanCombo, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (&s, v) in &other.terms {
            self.add_term(s, v * c);
        }
    }

    pub fn scaled(&self, c: &Rational) -> JordanCombo {
        if c.is_zero() {
            return JordanCombo::new();
        }
        JordanCombo {
            terms: self.terms.iter().map(|(&s, v)| (s, v * c)).collect(),
        }
    }

    pub fn negated(&self) -> JordanCombo {
        JordanCombo {
            terms: self.terms.iter().map(|(&s, v)| (s, -v)).collect(),
        }
    }

    /// Highest-index term.
    pub fn leading(&self) -> Option<(u32, &Rational)> {
        self.terms.iter().next_back().map(|(&s, c)| (s, c))
    }

    pub fn to_json(&self) -> Value {
        Value::Object(
            self.terms
                .iter()
                .map(|(s, c)| (s.to_string(), Value::String(to_pq_string(c))))
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Parse("Jordan combination must be a JSON object".into()))?;
        let mut out = JordanCombo::new();
        for (key, val) in obj {
            let s: u32 = key
                .parse()
                .map_err(|_| Error::Parse(format!("bad Jordan index {key:?}")))?;
            if s == 0 {
                return Err(Error::Parse("Jordan index must be positive".into()));
            }
            let c = val
                .as_str()
                .ok_or_else(|| Error::Parse(format!("coefficient of J_{s} must be a string")))?;
            out.add_term(s, parse_rational(c)?);
        }
        Ok(out)
    }
}

pub fn jc_add(a: &JordanCombo, b: &JordanCombo) -> JordanCombo {
    let mut out = a.clone();
    out.add_scaled(b, &Rational::one());
    out
}

pub fn jc_scale(a: &JordanCombo, c: &Rational) -> JordanCombo {
    a.scaled(c)
}

/// `sum_s c_s J_s(k)`, exact.
pub fn evaluate_jordan(c: &JordanCombo, k: u64) -> Rational {
    c.iter().map(|(s, v)| v * jordan_totient(s, k)).sum()
}

/// Laurent polynomial in `k` with Jordan-combination coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct KLaurent {
    terms: BTreeMap<i64, JordanCombo>,
}

impl KLaurent {
    pub fn new() -> Self {
        Self::default()
    }

    /// `k^e * combo`.
    pub fn monomial(e: i64, combo: JordanCombo) -> Self {
        let mut out = Self::new();
        out.add_combo(e, &combo, &Rational::one());
        out
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exponents present, ascending.
    pub fn exponents(&self) -> Vec<i64> {
        self.terms.keys().copied().collect()
    }

    pub fn coeff(&self, e: i64) -> JordanCombo {
        self.terms.get(&e).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (i64, &JordanCombo)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    /// `self += c * k^e * combo`.
    pub fn add_combo(&mut self, e: i64, combo: &JordanCombo, c: &Rational) {
        if c.is_zero() || combo.is_empty() {
            return;
        }
        let slot = self.terms.entry(e).or_default();
        slot.add_scaled(combo, c);
        if slot.is_empty() {
            self.terms.remove(&e);
        }
    }

    pub fn add_scaled(&mut self, other: &KLaurent, c: &Rational) {
        for (&e, combo) in &other.terms {
            self.add_combo(e, combo, c);
        }
    }

    pub fn scaled(&self, c: &Rational) -> KLaurent {
        if c.is_zero() {
            return KLaurent::new();
        }
        KLaurent {
            terms: self.terms.iter().map(|(&e, j)| (e, j.scaled(c))).collect(),
        }
    }

    pub fn negated(&self) -> KLaurent {
        self.scaled(&-Rational::one())
    }

    /// Multiplies by `k^t`.
    pub fn shifted(&self, t: i64) -> KLaurent {
        KLaurent {
            terms: self.terms.iter().map(|(&e, j)| (e + t, j.clone())).collect(),
        }
    }

    /// Exact value at a concrete modulus.
    pub fn evaluate(&self, k: u64) -> Rational {
        let kr = Rational::from_integer(BigInt::from(k));
        self.terms
            .iter()
            .map(|(&e, combo)| Pow::pow(&kr, e as i32) * evaluate_jordan(combo, k))
            .sum()
    }

    pub fn to_json(&self) -> Value {
        Value::Object(
            self.terms
                .iter()
                .map(|(e, c)| (e.to_string(), c.to_json()))
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Parse("Laurent body must be a JSON object".into()))?;
        let mut out = KLaurent::new();
        for (key, val) in obj {
            let e: i64 = key
                .parse()
                .map_err(|_| Error::Parse(format!("bad k-exponent {key:?}")))?;
            out.add_combo(e, &JordanCombo::from_json(val)?, &Rational::one());
        }
        Ok(out)
    }
}

pub fn kl_add(a: &KLaurent, b: &KLaurent) -> KLaurent {
    let mut out = a.clone();
    out.add_scaled(b, &Rational::one());
    out
}

pub fn kl_scale(a: &KLaurent, c: &Rational) -> KLaurent {
    a.scaled(c)
}

pub fn kl_shift(a: &KLaurent, t: i64) -> KLaurent {
    a.shifted(t)
}

/// `scalar * pi^pi_exp * phi(k)^phi_exp * body(k)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClosedForm {
    scalar: Rational,
    pi_exp: u32,
    phi_exp: u32,
    body: KLaurent,
}

impl ClosedForm {
    /// Builds the form and normalizes it; see the module docs.
    pub fn new(scalar: Rational, pi_exp: u32, phi_exp: u32, body: KLaurent) -> Self {
        if scalar.is_zero() || body.is_empty() {
            return Self::zero();
        }
        let content = body_content(&body);
        let body = body.scaled(&content.recip());
        ClosedForm {
            scalar: scalar * content,
            pi_exp,
            phi_exp,
            body,
        }
    }

    pub fn zero() -> Self {
        ClosedForm {
            scalar: Rational::zero(),
            pi_exp: 0,
            phi_exp: 0,
            body: KLaurent::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.scalar.is_zero()
    }

    pub fn scalar(&self) -> &Rational {
        &self.scalar
    }

    pub fn pi_exp(&self) -> u32 {
        self.pi_exp
    }

    pub fn phi_exp(&self) -> u32 {
        self.phi_exp
    }

    pub fn body(&self) -> &KLaurent {
        &self.body
    }

    /// Everything but the power of pi, exactly.
    pub fn rational_part(&self, k: u64) -> Rational {
        if self.is_zero() {
            return Rational::zero();
        }
        let phi = Rational::from_integer(BigInt::from(phi_u64(k)));
        &self.scalar * Pow::pow(&phi, self.phi_exp) * self.body.evaluate(k)
    }

    pub fn evaluate(&self, k: u64, precision_bits: usize) -> Result<Real> {
        evaluate_closed_form(self, k, precision_bits)
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("scalar".into(), Value::String(to_pq_string(&self.scalar)));
        m.insert("pi_exp".into(), Value::from(self.pi_exp));
        m.insert("phi_exp".into(), Value::from(self.phi_exp));
        m.insert("body".into(), self.body.to_json());
        Value::Object(m)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Parse("closed form must be a JSON object".into()))?;
        let field = |name: &str| {
            obj.get(name)
                .ok_or_else(|| Error::Parse(format!("missing field {name:?}")))
        };
        let scalar = parse_rational(
            field("scalar")?
                .as_str()
                .ok_or_else(|| Error::Parse("scalar must be a string".into()))?,
        )?;
        let exp = |name: &str| -> Result<u32> {
            field(name)?
                .as_u64()
                .and_then(|n| u32::try_from(n).ok())
                .ok_or_else(|| Error::Parse(format!("{name} must be a non-negative integer")))
        };
        Ok(ClosedForm::new(
            scalar,
            exp("pi_exp")?,
            exp("phi_exp")?,
            KLaurent::from_json(field("body")?)?,
        ))
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&v)
    }
}

/// Positive rational `c` such that `body / c` has coprime integer
/// coefficients, signed so the leading coefficient of `body / c` is positive.
fn body_content(body: &KLaurent) -> Rational {
    let mut num_gcd = BigInt::zero();
    let mut den_lcm = BigInt::one();
    for (_, combo) in body.iter() {
        for (_, c) in combo.iter() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
    }
    let mut content = Rational::new(num_gcd, den_lcm);
    let leading_negative = body
        .iter()
        .next_back()
        .and_then(|(_, combo)| combo.leading())
        .map(|(_, c)| c.is_negative())
        .unwrap_or(false);
    if leading_negative {
        content = -content;
    }
    content
}

/// Numeric value at `k`: exact rational part first, then the pi power.
pub fn evaluate_closed_form(f: &ClosedForm, k: u64, precision_bits: usize) -> Result<Real> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!(
            "closed forms are stated for k >= 3, got k = {k}"
        )));
    }
    if precision_bits < 53 {
        return Err(Error::InvalidArgument(format!(
            "precision must be at least 53 bits, got {precision_bits}"
        )));
    }
    if f.is_zero() {
        return Ok(Real::zero(precision_bits));
    }
    let work = precision_bits + 32;
    let exact = Real::from_rational(&f.rational_part(k), work);
    let pi_pow = Real::pi(work).powi(f.pi_exp as usize);
    Ok((&exact * &pi_pow).with_prec(precision_bits))
}

fn latex_coeff(c: &Rational) -> String {
    if c.is_one() {
        String::new()
    } else if c.is_integer() {
        format!("{} ", c.numer())
    } else {
        format!("\\frac{{{}}}{{{}}} ", c.numer(), c.denom())
    }
}

fn text_coeff(c: &Rational) -> String {
    if c.is_one() {
        String::new()
    } else {
        format!("{c} ")
    }
}

fn join_signed<'a>(
    terms: impl Iterator<Item = (u32, &'a Rational)>,
    piece: impl Fn(u32, &Rational) -> String,
) -> String {
    let mut out = String::new();
    for (i, (s, c)) in terms.enumerate() {
        let body = piece(s, &c.abs());
        match (i, c.is_negative()) {
            (0, false) => out.push_str(&body),
            (0, true) => {
                out.push('-');
                out.push_str(&body);
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(&body);
            }
            (_, true) => {
                out.push_str(" - ");
                out.push_str(&body);
            }
        }
    }
    if out.is_empty() {
        "0".to_string()
    } else {
        out
    }
}

impl Render for JordanCombo {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Latex => join_signed(self.iter().rev(), |s, c| {
                format!("{}J_{{{s}}}(k)", latex_coeff(c))
            }),
            Format::Text => join_signed(self.iter().rev(), |s, c| format!("{}J_{s}", text_coeff(c))),
            Format::Json => self.to_json().to_string(),
        }
    }
}

impl Render for KLaurent {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json().to_string(),
            Format::Latex => {
                if self.is_empty() {
                    return "0".into();
                }
                if self.exponents() == [0] {
                    return self.coeff(0).render(Format::Latex);
                }
                let parts: Vec<String> = self
                    .iter()
                    .rev()
                    .map(|(e, c)| {
                        let combo = c.render(Format::Latex);
                        match e {
                            0 => format!("\\left({combo}\\right)"),
                            _ => format!("k^{{{e}}}\\left({combo}\\right)"),
                        }
                    })
                    .collect();
                parts.join(" + ")
            }
            Format::Text => {
                if self.is_empty() {
                    return "0".into();
                }
                if self.exponents() == [0] {
                    return self.coeff(0).render(Format::Text);
                }
                let parts: Vec<String> = self
                    .iter()
                    .rev()
                    .map(|(e, c)| {
                        let combo = c.render(Format::Text);
                        match e {
                            0 => format!("({combo})"),
                            _ => format!("k^{e} * ({combo})"),
                        }
                    })
                    .collect();
                parts.join(" + ")
            }
        }
    }
}

impl ClosedForm {
    fn render_latex(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let exps = self.body.exponents();
        let single = (exps.len() == 1).then(|| exps[0]);
        let mut num: Vec<String> = Vec::new();
        let mut den: Vec<String> = Vec::new();
        let s = self.scalar.abs();
        if !s.numer().is_one() {
            num.push(s.numer().to_string());
        }
        if !s.denom().is_one() {
            den.push(s.denom().to_string());
        }
        match self.pi_exp {
            0 => {}
            1 => num.push("\\pi".into()),
            n => num.push(format!("\\pi^{{{n}}}")),
        }
        match self.phi_exp {
            0 => {}
            1 => num.push("\\phi(k)".into()),
            n => num.push(format!("\\phi(k)^{{{n}}}")),
        }
        let tail = match single {
            Some(e) => {
                match e.cmp(&0) {
                    std::cmp::Ordering::Less if e == -1 => den.push("k".into()),
                    std::cmp::Ordering::Less => den.push(format!("k^{{{}}}", -e)),
                    std::cmp::Ordering::Greater if e == 1 => num.push("k".into()),
                    std::cmp::Ordering::Greater => num.push(format!("k^{{{e}}}")),
                    std::cmp::Ordering::Equal => {}
                }
                self.body.coeff(e).render(Format::Latex)
            }
            None => self.body.render(Format::Latex),
        };
        let sign = if self.scalar.is_negative() { "-" } else { "" };
        let num_s = if num.is_empty() { "1".to_string() } else { num.join("") };
        let prefix = if den.is_empty() {
            num_s
        } else {
            format!("\\frac{{{num_s}}}{{{}}}", den.join(" \\, "))
        };
        format!("{sign}{prefix}\\left({tail}\\right)")
    }

    fn render_text(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = vec![self.scalar.to_string()];
        match self.pi_exp {
            0 => {}
            1 => parts.push("pi".into()),
            n => parts.push(format!("pi^{n}")),
        }
        match self.phi_exp {
            0 => {}
            1 => parts.push("phi(k)".into()),
            n => parts.push(format!("phi(k)^{n}")),
        }
        let exps = self.body.exponents();
        if exps.len() == 1 {
            let e = exps[0];
            if e != 0 {
                parts.push(format!("k^{e}"));
            }
            parts.push(format!("({})", self.body.coeff(e).render(Format::Text)));
        } else {
            parts.push(format!("[{}]", self.body.render(Format::Text)));
        }
        parts.join(" * ")
    }
}

impl Render for ClosedForm {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Latex => self.render_latex(),
            Format::Text => self.render_text(),
            Format::Json => self.to_json().to_string(),
        }
    }
}

impl fmt::Display for JordanCombo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(Format::Text))
    }
}

impl fmt::Display for KLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(Format::Text))
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(Format::Text))
    }
}
