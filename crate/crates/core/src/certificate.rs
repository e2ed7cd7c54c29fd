//! K-instability certificates: canonical JSON encoding and an independent
//! verifier.
//!
//! The verifier trusts nothing stored in the file. It recounts `N_k` and
//! `w_k` over monomial bases, interpolates, applies the definition of DF and
//! only then compares with the stored values and the closed formula.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::bigraded::{AmbientShape, EnumerationCap, OneParameterSubgroup};
use crate::dfcalc::{
    coefficients_from_polys, df_closed, df_general, sample_restricted, Polarization,
};
use crate::error::{Error, Result};
use crate::exactmath::{format_rational, interpolate, parse_rational, Rational};
use crate::geometry::{semiinvariant_alpha, NormalForm};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub schema_version: String,
    pub m: usize,
    pub n: usize,
    pub r: usize,
    pub d: u64,
    pub e: u64,
    pub lambda_u: Vec<i64>,
    pub lambda_v: Vec<i64>,
    pub alpha: i64,
    pub a0: Rational,
    pub a1: Rational,
    pub b0: Rational,
    pub b1: Rational,
    pub df: Rational,
    pub factor_swapped: bool,
}

/// On-disk layout. Field names are the JSON keys.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateFile {
    schema_version: String,
    m: usize,
    n: usize,
    r: usize,
    d: u64,
    e: u64,
    lambda_u: Vec<i64>,
    lambda_v: Vec<i64>,
    alpha: i64,
    a0: String,
    a1: String,
    b0: String,
    b1: String,
    df: String,
    factor_swapped: bool,
}

impl Certificate {
    pub fn check_invariants(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidCertificate(msg));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!("schema_version {:?}", self.schema_version));
        }
        if self.m == 0 || self.n == 0 || self.d == 0 || self.e == 0 {
            return bad("m, n, d, e must be positive".into());
        }
        if self.r < 1 || self.r > self.m.min(self.n) {
            return bad(format!("r={} outside 1..=min(m,n)", self.r));
        }
        if self.m == self.n && self.r == self.n {
            return bad("m=n and X smooth".into());
        }
        if self.lambda_u.len() != self.m + 1 || self.lambda_v.len() != self.n + 1 {
            return bad("λ weight vectors do not match (m, n)".into());
        }
        let lambda = OneParameterSubgroup::new(self.lambda_u.clone(), self.lambda_v.clone());
        lambda.check_special_linear()?;
        if !self.df.is_negative() {
            return bad(format!("df = {} is not negative", self.df));
        }
        let shape = AmbientShape::new(self.m, self.n)?;
        let pol = Polarization::new(self.d, self.e)?;
        if self.df != df_closed(shape, pol, self.alpha) {
            return bad("df differs from -2mnde·alpha/(me+nd)^2".into());
        }
        Ok(())
    }
}

/// Canonical text: compact JSON, keys sorted, rationals as reduced
/// `"num/den"` strings, one trailing newline.
pub fn emit(cert: &Certificate) -> Result<String> {
    cert.check_invariants()?;
    let file = CertificateFile {
        schema_version: cert.schema_version.clone(),
        m: cert.m,
        n: cert.n,
        r: cert.r,
        d: cert.d,
        e: cert.e,
        lambda_u: cert.lambda_u.clone(),
        lambda_v: cert.lambda_v.clone(),
        alpha: cert.alpha,
        a0: format_rational(&cert.a0),
        a1: format_rational(&cert.a1),
        b0: format_rational(&cert.b0),
        b1: format_rational(&cert.b1),
        df: format_rational(&cert.df),
        factor_swapped: cert.factor_swapped,
    };
    // serde_json::Map is a BTreeMap, so going through Value sorts the keys
    let value =
        serde_json::to_value(&file).map_err(|e| Error::InvalidCertificate(e.to_string()))?;
    let mut text =
        serde_json::to_string(&value).map_err(|e| Error::InvalidCertificate(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Schema-level parse. Does not check any mathematical claim.
pub fn parse(text: &str) -> Result<Certificate> {
    let file: CertificateFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(Error::Parse(format!(
            "unknown schema_version {:?} (supported: {SCHEMA_VERSION:?})",
            file.schema_version
        )));
    }
    Ok(Certificate {
        schema_version: file.schema_version,
        m: file.m,
        n: file.n,
        r: file.r,
        d: file.d,
        e: file.e,
        lambda_u: file.lambda_u,
        lambda_v: file.lambda_v,
        alpha: file.alpha,
        a0: parse_rational(&file.a0)?,
        a1: parse_rational(&file.a1)?,
        b0: parse_rational(&file.b0)?,
        b1: parse_rational(&file.b1)?,
        df: parse_rational(&file.df)?,
        factor_swapped: file.factor_swapped,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub check: String,
    pub expected: String,
    pub found: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: expected {}, found {}",
            self.check, self.expected, self.found
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Verdict {
    pub ok: bool,
    pub failures: Vec<Failure>,
}

impl Verdict {
    pub fn failed(&self, check: &str) -> bool {
        self.failures.iter().any(|f| f.check == check)
    }
}

struct Checks(Vec<Failure>);

impl Checks {
    fn expect<T: fmt::Display + PartialEq>(&mut self, check: &str, expected: T, found: T) -> bool {
        let pass = expected == found;
        if !pass {
            self.0.push(Failure {
                check: check.to_string(),
                expected: expected.to_string(),
                found: found.to_string(),
            });
        }
        pass
    }

    fn fail(&mut self, check: &str, expected: impl fmt::Display, found: impl fmt::Display) {
        self.0.push(Failure {
            check: check.to_string(),
            expected: expected.to_string(),
            found: found.to_string(),
        });
    }

    fn finish(self) -> Verdict {
        Verdict {
            ok: self.0.is_empty(),
            failures: self.0,
        }
    }
}

/// Re-derives every claim of a certificate. Parse problems are errors;
/// mathematical problems are reported in the [`Verdict`].
pub fn verify(text: &str) -> Result<Verdict> {
    verify_with_cap(text, EnumerationCap::from_env())
}

pub fn verify_with_cap(text: &str, cap: EnumerationCap) -> Result<Verdict> {
    let cert = parse(text)?;
    let mut checks = Checks(Vec::new());

    // structure first: without a consistent shape nothing else can be recomputed
    if cert.m == 0 || cert.n == 0 {
        checks.fail("shape", "m, n >= 1", format!("m={} n={}", cert.m, cert.n));
        return Ok(checks.finish());
    }
    if cert.d == 0 || cert.e == 0 {
        checks.fail(
            "polarization",
            "d, e >= 1",
            format!("d={} e={}", cert.d, cert.e),
        );
        return Ok(checks.finish());
    }
    let lengths_ok = checks.expect("lambda_u_len", cert.m + 1, cert.lambda_u.len())
        & checks.expect("lambda_v_len", cert.n + 1, cert.lambda_v.len());
    let rank_ok = cert.r >= 1 && cert.r <= cert.m.min(cert.n);
    if !rank_ok {
        checks.fail("r", format!("1 <= r <= {}", cert.m.min(cert.n)), cert.r);
    }
    if !(lengths_ok && rank_ok) {
        return Ok(checks.finish());
    }
    let shape = AmbientShape::new(cert.m, cert.n)?;
    let pol = Polarization::new(cert.d, cert.e)?;
    let nf = NormalForm::new(shape, cert.r)?;
    if !nf.theorem_applies() {
        checks.fail(
            "hypothesis",
            "m != n or r < min(m,n)",
            format!("m=n={} r={}", cert.m, cert.r),
        );
    }

    let sum_u: i64 = cert.lambda_u.iter().sum();
    let sum_v: i64 = cert.lambda_v.iter().sum();
    let sl_ok = checks.expect("sl_u", 0, sum_u) & checks.expect("sl_v", 0, sum_v);
    let carried_by_x = cert.lambda_u.iter().any(|w| *w != 0);
    checks.expect("factor_swapped", carried_by_x, cert.factor_swapped);
    if !sl_ok {
        return Ok(checks.finish());
    }

    let lambda = OneParameterSubgroup::new(cert.lambda_u.clone(), cert.lambda_v.clone());
    let alpha = match semiinvariant_alpha(&nf, &lambda) {
        Ok(alpha) => alpha,
        Err(err) => {
            checks.fail("alpha", "f semi-invariant under λ", err);
            return Ok(checks.finish());
        }
    };
    checks.expect("alpha", alpha, cert.alpha);

    let samples = sample_restricted(shape, pol, &lambda, alpha, cap)?;
    let hilbert = interpolate(&samples.dims)?;
    let weight = interpolate(&samples.weights)?;
    let coeffs = match coefficients_from_polys(shape, &hilbert, &weight) {
        Ok(c) => c,
        Err(err) => {
            checks.fail("expansion", "N_k of degree m+n-1, w_k of degree m+n", err);
            return Ok(checks.finish());
        }
    };
    checks.expect("a0", &coeffs.a0, &cert.a0);
    checks.expect("a1", &coeffs.a1, &cert.a1);
    checks.expect("b0", &coeffs.b0, &cert.b0);
    checks.expect("b1", &coeffs.b1, &cert.b1);

    let df = df_general(&coeffs)?;
    checks.expect("df", &df, &cert.df);
    checks.expect("df_closed", &df_closed(shape, pol, alpha), &df);
    if !df.is_negative() {
        checks.fail("df_negative", "df < 0", &df);
    }
    if cert.df.is_zero() || cert.df.is_positive() {
        checks.fail("stored_df_negative", "df < 0", &cert.df);
    }
    Ok(checks.finish())
}
