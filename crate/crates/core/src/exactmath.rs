//! Exact arithmetic substrate: big rationals, univariate polynomials over
//! the rationals, binomial coefficients and Lagrange interpolation.
//!
//! Nothing in this crate touches floating point. Every comparison is exact.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always stored reduced with a positive
/// denominator.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Formats as `num/den`, including a `/1` for integers.
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `p/q` or a bare integer `p`. The result is reduced.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("not a rational: {text:?}"));
    let (num, den) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {text:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Six-digit decimal rendering, for display only.
pub fn approx_decimal(q: &Rational) -> String {
    let scale = BigInt::from(1_000_000);
    let scaled = (q * Rational::from_integer(scale.clone())).round();
    let scaled = scaled.to_integer();
    let sign = if scaled.is_negative() { "-" } else { "" };
    let (whole, frac) = scaled.abs().div_rem(&scale);
    format!("{sign}{whole}.{frac:0>6}")
}

/// Binomial coefficient `C(a, b)`, zero when `b > a`.
pub fn binom(a: u64, b: u64) -> BigInt {
    if b > a {
        return BigInt::zero();
    }
    let b = b.min(a - b);
    let mut acc = BigInt::one();
    for i in 0..b {
        // acc * (a - i) is divisible by (i + 1) at every step
        acc = acc * BigInt::from(a - i) / BigInt::from(i + 1);
    }
    acc
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Univariate polynomial in `k` with rational coefficients.
///
/// `coeffs[i]` is the coefficient of `k^i`; trailing zeros are never stored,
/// so the zero polynomial has no coefficients at all.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RationalPolynomial {
    coeffs: Vec<Rational>,
}

impl RationalPolynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `scale * k + offset`
    pub fn linear(scale: Rational, offset: Rational) -> Self {
        Self::new(vec![offset, scale])
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, power: usize) -> Rational {
        self.coeffs
            .get(power)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, k: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * k + c)
    }

    pub fn eval_int(&self, k: i64) -> Rational {
        self.eval(&int(k))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }
}

impl Add for &RationalPolynomial {
    type Output = RationalPolynomial;

    fn add(self, rhs: Self) -> RationalPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        RationalPolynomial::new((0..len).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &RationalPolynomial {
    type Output = RationalPolynomial;

    fn sub(self, rhs: Self) -> RationalPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        RationalPolynomial::new((0..len).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &RationalPolynomial {
    type Output = RationalPolynomial;

    fn mul(self, rhs: Self) -> RationalPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return RationalPolynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPolynomial::new(out)
    }
}

impl Neg for &RationalPolynomial {
    type Output = RationalPolynomial;

    fn neg(self) -> RationalPolynomial {
        RationalPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (power, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let abs = c.abs();
            let show_coeff = power == 0 || !abs.is_one();
            if show_coeff {
                if abs.is_integer() {
                    write!(f, "{}", abs.numer())?;
                } else {
                    write!(f, "({})", abs)?;
                }
            }
            match power {
                0 => {}
                1 => f.write_str("k")?,
                _ => write!(f, "k^{power}")?,
            }
        }
        Ok(())
    }
}

/// `C(step * k + shift, m)` as a polynomial in `k`:
/// `prod_{i=1..m} (step * k + shift - m + i) / m!`.
///
/// Agrees with [`binom`] wherever `step * k + shift >= 0`.
pub fn binom_poly(m: u64, step: u64, shift: i64) -> RationalPolynomial {
    let mut acc = RationalPolynomial::constant(Rational::one());
    for i in 1..=m as i64 {
        let factor = RationalPolynomial::linear(int(step as i64), int(shift - m as i64 + i));
        acc = &acc * &factor;
    }
    acc.scale(&Rational::new(BigInt::one(), factorial(m)))
}

/// Exact Lagrange interpolation through `(node, value)` samples.
///
/// Returns the unique polynomial of degree below the number of samples.
pub fn interpolate(samples: &[(i64, Rational)]) -> Result<RationalPolynomial> {
    if samples.is_empty() {
        return Err(Error::MalformedSamples("no samples".into()));
    }
    for (i, (x, _)) in samples.iter().enumerate() {
        if samples[..i].iter().any(|(y, _)| y == x) {
            return Err(Error::MalformedSamples(format!("duplicate node {x}")));
        }
    }
    let mut acc = RationalPolynomial::zero();
    for (i, (xi, yi)) in samples.iter().enumerate() {
        let mut basis = RationalPolynomial::constant(Rational::one());
        let mut denom = Rational::one();
        for (j, (xj, _)) in samples.iter().enumerate() {
            if i == j {
                continue;
            }
            basis = &basis * &RationalPolynomial::linear(Rational::one(), int(-xj));
            denom *= int(xi - xj);
        }
        acc = &acc + &basis.scale(&(yi / denom));
    }
    Ok(acc)
}

/// Top two coefficients of a polynomial of known degree.
pub fn leading_two(p: &RationalPolynomial, expected_degree: usize) -> Result<(Rational, Rational)> {
    let degree_ok = match p.degree() {
        Some(d) => d == expected_degree,
        None => false,
    };
    if !degree_ok {
        return Err(Error::DegreeMismatch {
            expected: expected_degree,
            found: p.degree(),
        });
    }
    let sub = if expected_degree == 0 {
        Rational::zero()
    } else {
        p.coeff(expected_degree - 1)
    };
    Ok((p.coeff(expected_degree), sub))
}
