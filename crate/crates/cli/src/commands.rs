//! Subcommand bodies. Each returns what to print; `main` maps errors to
//! exit codes.

use std::fmt;

use msq_core::highprec::Real;
use msq_core::mean_square::{
    mean_square, realjs_rhs_exact, sigma0, sigma0_prime, sigma1, sigma1_prime, sigma2,
    sigma2_prime, EVEN_CASE_DEVIATIONS,
};
use msq_core::numeric_oracle::{exp_sum_direct, mean_square_numeric, power_exp_identity_check};
use msq_core::sin_sums::sin_sum_exact;
use msq_core::symbolic::{evaluate_jordan, kl_add, Format, JordanCombo, KLaurent, Render};
use msq_core::{exact_arith::to_pq_string, Error};
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Debug)]
pub enum CliError {
    /// Bad input; exit code 2.
    Usage(String),
    /// Internal or verification failure; exit code 1.
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::Parse(_) => CliError::Usage(e.to_string()),
            Error::Cancellation { .. } | Error::PrecisionUnreachable { .. } => {
                CliError::Failure(e.to_string())
            }
        }
    }
}

/// Text for stdout, notes for stderr, and whether every check passed.
#[derive(Debug, Default)]
pub struct Output {
    pub stdout: String,
    pub notes: Vec<String>,
    pub passed: bool,
}

impl Output {
    fn ok(stdout: String) -> Output {
        Output {
            stdout,
            notes: Vec::new(),
            passed: true,
        }
    }
}

fn deviation_notes(pedantic: bool, even_case_used: bool) -> Vec<String> {
    if pedantic && even_case_used {
        EVEN_CASE_DEVIATIONS.iter().map(|d| format!("deviation: {d}")).collect()
    } else {
        Vec::new()
    }
}

/// Decimal digits carried by `bits` binary digits.
pub fn decimal_digits(bits: usize) -> usize {
    (bits as f64 * std::f64::consts::LOG10_2).floor() as usize
}

pub fn closed_form(r: u64, format: Format, pedantic: bool) -> Result<Output, CliError> {
    match r {
        0 => return Err(CliError::Usage("r must be at least 1".into())),
        2 => {
            return Err(CliError::Usage(
                "r = 2 is not covered: the even-character formula needs r = 2h with h >= 2 (r >= 4)"
                    .into(),
            ))
        }
        _ => {}
    }
    let form = mean_square(r as usize)?;
    let mut out = Output::ok(form.render(format) + "\n");
    out.notes = deviation_notes(pedantic, r.is_multiple_of(2));
    Ok(out)
}

pub fn sin_sum(n: u64, k: Option<u64>, format: Format) -> Result<Output, CliError> {
    if n % 2 == 1 {
        return Err(CliError::Usage(format!(
            "sine power sums are expanded for even n only, got n = {n}"
        )));
    }
    if let Some(k) = k {
        if k < 3 {
            return Err(CliError::Usage(format!("k must be at least 3, got {k}")));
        }
    }
    let combo = sin_sum_exact(n as usize)?;
    let value = k.map(|k| evaluate_jordan(&combo, k));
    let stdout = match format {
        Format::Json => {
            let mut obj = json!({ "n": n, "combo": combo.to_json() });
            if let (Some(k), Some(v)) = (k, &value) {
                obj["k"] = json!(k);
                obj["value"] = json!(to_pq_string(v));
            }
            obj.to_string() + "\n"
        }
        _ => {
            let mut s = combo.render(format) + "\n";
            if let Some(v) = &value {
                s.push_str(&format!("{v}\n"));
            }
            s
        }
    };
    Ok(Output::ok(stdout))
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VerifyCase {
    pub r: u64,
    pub k: u64,
    pub symbolic_value: String,
    pub numeric_value: String,
    pub rel_error: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

impl Summary {
    fn of(passes: impl Iterator<Item = bool>) -> Summary {
        let (mut total, mut passed) = (0, 0);
        for p in passes {
            total += 1;
            passed += p as usize;
        }
        Summary {
            total,
            passed,
            failed: total - passed,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VerifyReport {
    pub precision_bits: usize,
    pub digits: usize,
    pub tolerance: String,
    pub cases: Vec<VerifyCase>,
    pub summary: Summary,
}

fn check_precision(prec: usize) -> Result<(), CliError> {
    if !(53..=4096).contains(&prec) {
        return Err(CliError::Usage(format!(
            "precision must be between 53 and 4096 bits, got {prec}"
        )));
    }
    Ok(())
}

fn check_tolerance(tol: f64) -> Result<(), CliError> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(CliError::Usage(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

pub fn verify(
    rs: &[u64],
    ks: &[u64],
    prec: usize,
    tol: f64,
    pedantic: bool,
) -> Result<Output, CliError> {
    check_precision(prec)?;
    check_tolerance(tol)?;
    if rs.is_empty() || ks.is_empty() {
        return Err(CliError::Usage("need at least one r and one k".into()));
    }
    if let Some(&r) = rs.iter().find(|&&r| r == 0 || r == 2) {
        return Err(CliError::Usage(format!(
            "r = {r} has no closed form (need r = 1, r odd, or r even >= 4)"
        )));
    }
    if let Some(&k) = ks.iter().find(|&&k| k < 3) {
        return Err(CliError::Usage(format!("k must be at least 3, got {k}")));
    }
    let forms = rs
        .iter()
        .map(|&r| mean_square(r as usize).map(|f| (r, f)))
        .collect::<Result<Vec<_>, _>>()?;
    let digits = decimal_digits(prec);
    let pairs: Vec<(usize, u64)> = (0..forms.len())
        .flat_map(|i| ks.iter().map(move |&k| (i, k)))
        .collect();
    let cases = pairs
        .par_iter()
        .map(|&(i, k)| {
            let (r, form) = &forms[i];
            log::debug!("verify r={r} k={k}");
            let symbolic = form.evaluate(k, prec)?;
            let numeric = mean_square_numeric(*r as u32, k, prec)?;
            let rel = symbolic.rel_diff(&numeric).to_f64();
            Ok(VerifyCase {
                r: *r,
                k,
                symbolic_value: symbolic.to_decimal_string(digits),
                numeric_value: numeric.to_decimal_string(digits),
                rel_error: format!("{rel:e}"),
                pass: rel <= tol,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let summary = Summary::of(cases.iter().map(|c| c.pass));
    let passed = summary.failed == 0;
    let report = VerifyReport {
        precision_bits: prec,
        digits,
        tolerance: format!("{tol:e}"),
        cases,
        summary,
    };
    Ok(Output {
        stdout: serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        notes: deviation_notes(pedantic, rs.iter().any(|r| r % 2 == 0)),
        passed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Identity {
    /// Exact double exponential sums against direct summation.
    Realjs,
    /// Power exponential sums against their reciprocal-power expansion.
    Expsum,
    /// The cross term cancels the product term, exactly.
    SigmaCancel,
    /// The single-sum term: phi(k)/2 at r = 1, zero otherwise.
    Sigma0,
}

impl Identity {
    fn name(self) -> &'static str {
        match self {
            Identity::Realjs => "realjs",
            Identity::Expsum => "expsum",
            Identity::SigmaCancel => "sigma-cancel",
            Identity::Sigma0 => "sigma0",
        }
    }
}

#[derive(Clone, Debug)]
pub struct IdentityParams {
    pub p_max: u64,
    pub q_max: u64,
    pub k_min: u64,
    pub k_max: u64,
    pub n_max: u64,
    pub h_min: u64,
    pub h_max: u64,
    pub prec: usize,
    pub tol: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct IdentityCase {
    pub params: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_error: Option<String>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct IdentityReport {
    pub check: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision_bits: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<String>,
    pub cases: Vec<IdentityCase>,
    pub summary: Summary,
}

fn laurent_text(kl: &KLaurent) -> String {
    kl.render(Format::Text)
}

pub fn identity_check(
    which: Identity,
    p: &IdentityParams,
    pedantic: bool,
) -> Result<Output, CliError> {
    check_precision(p.prec)?;
    check_tolerance(p.tol)?;
    if p.k_min < 3 || p.k_min > p.k_max {
        return Err(CliError::Usage(format!(
            "need 3 <= k-min <= k-max, got {}..{}",
            p.k_min, p.k_max
        )));
    }
    if p.h_min > p.h_max {
        return Err(CliError::Usage("h-min exceeds h-max".into()));
    }
    let mut numeric = false;
    let mut even_case = false;
    let cases = match which {
        Identity::Realjs => {
            numeric = true;
            if p.p_max == 0 || p.q_max == 0 {
                return Err(CliError::Usage("p-max and q-max must be positive".into()));
            }
            let grid: Vec<(u64, u64, u64)> = (1..=p.p_max)
                .flat_map(|a| (1..=p.q_max).map(move |b| (a, b)))
                .flat_map(|(a, b)| (p.k_min..=p.k_max).map(move |k| (a, b, k)))
                .collect();
            grid.par_iter()
                .map(|&(a, b, k)| {
                    let exact = realjs_rhs_exact(a as usize, b as usize, k)?;
                    let direct = exp_sum_direct(a as u32, b as u32, k, false, p.prec)?;
                    let err = if exact.is_zero() {
                        direct.re.abs().to_f64()
                    } else {
                        Real::from_rational(&exact, p.prec).rel_diff(&direct.re).to_f64()
                    };
                    Ok(IdentityCase {
                        params: json!({ "p": a, "q": b, "k": k }),
                        value: Some(to_pq_string(&exact)),
                        rel_error: Some(format!("{err:e}")),
                        pass: err <= p.tol,
                    })
                })
                .collect::<Result<Vec<_>, Error>>()?
        }
        Identity::Expsum => {
            if p.n_max == 0 {
                return Err(CliError::Usage("n-max must be positive".into()));
            }
            let mut out = Vec::new();
            for n in 1..=p.n_max {
                for k in p.k_min..=p.k_max {
                    for m in msq_core::arith_fn::coprime_residues(k) {
                        let ok = power_exp_identity_check(n as u32, m, k)?;
                        out.push(IdentityCase {
                            params: json!({ "n": n, "m": m, "k": k }),
                            value: None,
                            rel_error: None,
                            pass: ok,
                        });
                    }
                }
            }
            out
        }
        Identity::SigmaCancel => {
            let mut out = Vec::new();
            for h in p.h_min.max(1)..=p.h_max {
                let h_ = h as usize;
                let sum = kl_add(&sigma1(h_)?, &sigma2(h_)?);
                out.push(IdentityCase {
                    params: json!({ "h": h, "case": "odd", "identity": "sigma1 + sigma2 = 0" }),
                    value: Some(laurent_text(&sum)),
                    rel_error: None,
                    pass: sum.is_empty(),
                });
                if h >= 2 {
                    even_case = true;
                    let diff = kl_add(&sigma1_prime(h_)?, &sigma2_prime(h_)?.negated());
                    out.push(IdentityCase {
                        params: json!({ "h": h, "case": "even", "identity": "sigma1' - sigma2' = 0" }),
                        value: Some(laurent_text(&diff)),
                        rel_error: None,
                        pass: diff.is_empty(),
                    });
                }
            }
            out
        }
        Identity::Sigma0 => {
            let half_phi = KLaurent::monomial(
                0,
                JordanCombo::term(1, msq_core::exact_arith::rat(1, 2)),
            );
            let mut out = Vec::new();
            for h in p.h_min..=p.h_max {
                let v = sigma0(h as usize)?;
                let expected = if h == 0 { half_phi.clone() } else { KLaurent::new() };
                out.push(IdentityCase {
                    params: json!({ "h": h, "case": "odd", "r": 2 * h + 1 }),
                    value: Some(laurent_text(&v)),
                    rel_error: None,
                    pass: v == expected,
                });
                if h >= 2 {
                    even_case = true;
                    let v = sigma0_prime(h as usize)?;
                    out.push(IdentityCase {
                        params: json!({ "h": h, "case": "even", "r": 2 * h }),
                        value: Some(laurent_text(&v)),
                        rel_error: None,
                        pass: v.is_empty(),
                    });
                }
            }
            out
        }
    };
    let summary = Summary::of(cases.iter().map(|c| c.pass));
    let passed = summary.failed == 0;
    let report = IdentityReport {
        check: which.name().into(),
        precision_bits: numeric.then_some(p.prec),
        tolerance: numeric.then(|| format!("{:e}", p.tol)),
        cases,
        summary,
    };
    Ok(Output {
        stdout: serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        notes: deviation_notes(pedantic, even_case),
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits_for_common_precisions() {
        assert_eq!(decimal_digits(53), 15);
        assert_eq!(decimal_digits(128), 38);
        assert_eq!(decimal_digits(256), 77);
    }

    #[test]
    fn r2_is_usage_error() {
        let e = closed_form(2, Format::Text, false).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("h >= 2"));
    }

    #[test]
    fn odd_n_is_usage_error() {
        assert_eq!(sin_sum(3, None, Format::Text).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn verify_pass_matches_tolerance() {
        let out = verify(&[3], &[3, 4], 128, 1e-10, false).unwrap();
        let report: VerifyReport = serde_json::from_str(&out.stdout).unwrap();
        for c in &report.cases {
            let rel: f64 = c.rel_error.parse().unwrap();
            assert_eq!(c.pass, rel <= 1e-10);
        }
        assert!(out.passed);
    }

    #[test]
    fn pedantic_notes_only_for_even_case() {
        assert!(closed_form(5, Format::Text, true).unwrap().notes.is_empty());
        assert_eq!(closed_form(6, Format::Text, true).unwrap().notes.len(), 2);
        assert!(closed_form(6, Format::Text, false).unwrap().notes.is_empty());
    }
}
