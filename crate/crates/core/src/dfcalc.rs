//! Hilbert and weight polynomials of a product test configuration and the
//! Donaldson-Futaki invariant built from them.
//!
//! Two independent routes are kept side by side. The *counted* route sums
//! over the monomial bases of `S_{dk,ek}` and `S_{dk-1,ek-1}` at
//! `k = 1..=m+n+1` and interpolates. The *closed* route multiplies binomial
//! polynomials. `N_k` and `w_k` are honest polynomials for every `k >= 1`,
//! so the two must agree coefficient for coefficient.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::bigraded::{restricted_census, AmbientShape, EnumerationCap, OneParameterSubgroup};
use crate::certificate::{Certificate, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::exactmath::{binom_poly, int, interpolate, leading_two, Rational, RationalPolynomial};
use crate::geometry::{destabilizer, is_normal, semiinvariant_alpha, NormalForm};

/// The polarization `O_X(d, e)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Polarization {
    pub d: u64,
    pub e: u64,
}

impl Polarization {
    pub fn new(d: u64, e: u64) -> Result<Self> {
        if d == 0 || e == 0 {
            return Err(Error::InvalidShape(format!(
                "O({d},{e}) is not ample: both degrees must be positive"
            )));
        }
        Ok(Self { d, e })
    }
}

/// Top two coefficients of `N_k` and `w_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionCoefficients {
    pub a0: Rational,
    pub a1: Rational,
    pub b0: Rational,
    pub b1: Rational,
}

impl ExpansionCoefficients {
    /// Coefficients after twisting the linearization by the character `c`,
    /// which replaces `w_k` with `w_k + c k N_k`.
    pub fn twisted(&self, c: &Rational) -> Self {
        Self {
            a0: self.a0.clone(),
            a1: self.a1.clone(),
            b0: &self.b0 + c * &self.a0,
            b1: &self.b1 + c * &self.a1,
        }
    }
}

/// `N_k` and `w_k` sampled from the monomial census at `k = 1..=m+n+1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Samples {
    pub dims: Vec<(i64, Rational)>,
    pub weights: Vec<(i64, Rational)>,
}

pub fn sample_restricted(
    shape: AmbientShape,
    pol: Polarization,
    lambda: &OneParameterSubgroup,
    alpha: i64,
    cap: EnumerationCap,
) -> Result<Samples> {
    let nodes = (shape.m + shape.n + 1) as u64;
    let mut dims = Vec::with_capacity(nodes as usize);
    let mut weights = Vec::with_capacity(nodes as usize);
    for k in 1..=nodes {
        let c = restricted_census(shape, pol.d, pol.e, k, lambda, alpha, cap)?;
        dims.push((k as i64, Rational::from_integer(c.count)));
        weights.push((k as i64, Rational::from_integer(c.weight)));
    }
    Ok(Samples { dims, weights })
}

/// `C(m+dk, m) C(n+ek, n) - C(m+dk-1, m) C(n+ek-1, n)`
pub fn hilbert_poly_closed(shape: AmbientShape, pol: Polarization) -> RationalPolynomial {
    let (m, n) = (shape.m as u64, shape.n as u64);
    let top = &binom_poly(m, pol.d, m as i64) * &binom_poly(n, pol.e, n as i64);
    let sub = &binom_poly(m, pol.d, m as i64 - 1) * &binom_poly(n, pol.e, n as i64 - 1);
    &top - &sub
}

/// `-alpha C(m+dk-1, m) C(n+ek-1, n)`
pub fn weight_poly_closed(
    shape: AmbientShape,
    pol: Polarization,
    alpha: i64,
) -> RationalPolynomial {
    let (m, n) = (shape.m as u64, shape.n as u64);
    let sub = &binom_poly(m, pol.d, m as i64 - 1) * &binom_poly(n, pol.e, n as i64 - 1);
    sub.scale(&int(-alpha))
}

fn agree(
    what: &str,
    counted: RationalPolynomial,
    closed: RationalPolynomial,
) -> Result<RationalPolynomial> {
    if counted != closed {
        return Err(Error::Invariant(format!(
            "{what}: counted {counted} but closed form {closed}"
        )));
    }
    Ok(counted)
}

/// `N_k = dim H^0(X, O(dk, ek))`, a polynomial of degree `m + n - 1`.
pub fn hilbert_poly(shape: AmbientShape, pol: Polarization) -> Result<RationalPolynomial> {
    let lambda = OneParameterSubgroup::trivial(shape);
    let samples = sample_restricted(shape, pol, &lambda, 0, EnumerationCap::from_env())?;
    hilbert_from_samples(shape, pol, &samples)
}

fn hilbert_from_samples(
    shape: AmbientShape,
    pol: Polarization,
    samples: &Samples,
) -> Result<RationalPolynomial> {
    let p = agree(
        "N_k",
        interpolate(&samples.dims)?,
        hilbert_poly_closed(shape, pol),
    )?;
    if p.degree() != Some(shape.m + shape.n - 1) {
        return Err(Error::DegreeMismatch {
            expected: shape.m + shape.n - 1,
            found: p.degree(),
        });
    }
    Ok(p)
}

/// `w_k`, the total weight on `R_k`; degree `m + n`, or zero when `alpha = 0`.
pub fn weight_poly(
    shape: AmbientShape,
    pol: Polarization,
    lambda: &OneParameterSubgroup,
    alpha: i64,
) -> Result<RationalPolynomial> {
    lambda.check_special_linear()?;
    let samples = sample_restricted(shape, pol, lambda, alpha, EnumerationCap::from_env())?;
    agree(
        "w_k",
        interpolate(&samples.weights)?,
        weight_poly_closed(shape, pol, alpha),
    )
}

fn rpow(base: u64, exp: i64) -> Rational {
    let p = Rational::from_integer(BigInt::from(base).pow(exp.unsigned_abs() as u32));
    if exp < 0 {
        p.recip()
    } else {
        p
    }
}

fn factorial(n: usize) -> Rational {
    (1..=n).fold(Rational::one(), |acc, i| acc * int(i as i64))
}

/// The four printed closed forms:
///
/// ```text
/// a0 =  d^{m-1} e^{n-1} (me + nd) / (m! n!)
/// a1 =  d^{m-2} e^{n-2} (m^2(m-1)e^2 + mn(m+n)de + n^2(n-1)d^2) / (2 m! n!)
/// b0 = -d^m e^n alpha / (m! n!)
/// b1 = -d^{m-1} e^{n-1} (m(m-1)e + n(n-1)d) alpha / (2 m! n!)
/// ```
pub fn closed_form_coefficients(
    shape: AmbientShape,
    pol: Polarization,
    alpha: i64,
) -> ExpansionCoefficients {
    let (m, n) = (shape.m as i64, shape.n as i64);
    let (d, e) = (pol.d as i64, pol.e as i64);
    let mn_fact = factorial(shape.m) * factorial(shape.n);
    let alpha = int(alpha);
    let a0 = rpow(pol.d, m - 1) * rpow(pol.e, n - 1) * int(m * e + n * d) / &mn_fact;
    let a1_poly = m * m * (m - 1) * e * e + m * n * (m + n) * d * e + n * n * (n - 1) * d * d;
    let a1 = rpow(pol.d, m - 2) * rpow(pol.e, n - 2) * int(a1_poly) / (int(2) * &mn_fact);
    let b0 = -(rpow(pol.d, m) * rpow(pol.e, n) * &alpha / &mn_fact);
    let b1_poly = m * (m - 1) * e + n * (n - 1) * d;
    let b1 =
        -(rpow(pol.d, m - 1) * rpow(pol.e, n - 1) * int(b1_poly) * &alpha / (int(2) * &mn_fact));
    ExpansionCoefficients { a0, a1, b0, b1 }
}

/// Reads `(a0, a1)` from `N_k` and `(b0, b1)` from `w_k`.
pub fn coefficients_from_polys(
    shape: AmbientShape,
    hilbert: &RationalPolynomial,
    weight: &RationalPolynomial,
) -> Result<ExpansionCoefficients> {
    let dim = shape.m + shape.n;
    let (a0, a1) = leading_two(hilbert, dim - 1)?;
    let (b0, b1) = if weight.is_zero() {
        (Rational::zero(), Rational::zero())
    } else {
        leading_two(weight, dim)?
    };
    Ok(ExpansionCoefficients { a0, a1, b0, b1 })
}

/// Expansion coefficients via the counted route, checked against the
/// binomial polynomials and the printed closed forms.
pub fn expansion(
    shape: AmbientShape,
    pol: Polarization,
    lambda: &OneParameterSubgroup,
    alpha: i64,
) -> Result<ExpansionCoefficients> {
    expansion_with_cap(shape, pol, lambda, alpha, EnumerationCap::from_env())
}

pub fn expansion_with_cap(
    shape: AmbientShape,
    pol: Polarization,
    lambda: &OneParameterSubgroup,
    alpha: i64,
    cap: EnumerationCap,
) -> Result<ExpansionCoefficients> {
    lambda.check_special_linear()?;
    let samples = sample_restricted(shape, pol, lambda, alpha, cap)?;
    let hilbert = hilbert_from_samples(shape, pol, &samples)?;
    let weight = agree(
        "w_k",
        interpolate(&samples.weights)?,
        weight_poly_closed(shape, pol, alpha),
    )?;
    let coeffs = coefficients_from_polys(shape, &hilbert, &weight)?;
    let printed = closed_form_coefficients(shape, pol, alpha);
    if coeffs != printed {
        return Err(Error::Invariant(format!(
            "extracted coefficients {coeffs:?} differ from closed forms {printed:?}"
        )));
    }
    Ok(coeffs)
}

/// `DF = 2 (a1 b0 - a0 b1) / a0^2`
pub fn df_general(c: &ExpansionCoefficients) -> Result<Rational> {
    if !c.a0.is_positive() {
        return Err(Error::DegenerateHilbert(c.a0.to_string()));
    }
    Ok(int(2) * (&c.a1 * &c.b0 - &c.a0 * &c.b1) / (&c.a0 * &c.a0))
}

/// `DF = -2 m n d e alpha / (m e + n d)^2`
pub fn df_closed(shape: AmbientShape, pol: Polarization, alpha: i64) -> Rational {
    let (m, n) = (shape.m as i64, shape.n as i64);
    let (d, e) = (pol.d as i64, pol.e as i64);
    let denom = m * e + n * d;
    Rational::new(
        BigInt::from(-2) * m * n * d * e * alpha,
        BigInt::from(denom) * denom,
    )
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    Unstable(Box<Certificate>),
    Inconclusive { reason: String },
}

pub const INCONCLUSIVE_REASON: &str =
    "m=n and X smooth: instability hypothesis not met, no verdict";

pub fn decide_instability(nf: &NormalForm, pol: Polarization) -> Result<Decision> {
    decide_instability_with_cap(nf, pol, EnumerationCap::from_env())
}

pub fn decide_instability_with_cap(
    nf: &NormalForm,
    pol: Polarization,
    cap: EnumerationCap,
) -> Result<Decision> {
    if !is_normal(nf) {
        return Err(Error::NotNormal);
    }
    if !nf.theorem_applies() {
        return Ok(Decision::Inconclusive {
            reason: INCONCLUSIVE_REASON.to_string(),
        });
    }
    let destab = destabilizer(nf)?;
    let alpha = semiinvariant_alpha(nf, &destab.lambda)?;
    if alpha != 1 {
        return Err(Error::Invariant(format!(
            "destabilizer has weight {alpha}, not 1"
        )));
    }
    let coeffs = expansion_with_cap(nf.shape, pol, &destab.lambda, alpha, cap)?;
    let general = df_general(&coeffs)?;
    let closed = df_closed(nf.shape, pol, alpha);
    if general != closed {
        return Err(Error::Invariant(format!(
            "DF by definition {general} differs from closed form {closed}"
        )));
    }
    if !general.is_negative() {
        return Err(Error::Invariant(format!("DF = {general} is not negative")));
    }
    Ok(Decision::Unstable(Box::new(Certificate {
        schema_version: SCHEMA_VERSION.to_string(),
        m: nf.shape.m,
        n: nf.shape.n,
        r: nf.r,
        d: pol.d,
        e: pol.e,
        lambda_u: destab.lambda.u,
        lambda_v: destab.lambda.v,
        alpha,
        a0: coeffs.a0,
        a1: coeffs.a1,
        b0: coeffs.b0,
        b1: coeffs.b1,
        df: general,
        factor_swapped: destab.factor_swapped,
    })))
}
