//! Exact rational scalars with a cached `f64` view.
//!
//! Body data is kept exact so lattice membership can be decided without
//! rounding whenever no irrational transform intervenes. Floats read from
//! JSON are dyadic rationals and convert losslessly.

use std::fmt;
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use num::Integer;

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Longest decimal or exponent literal accepted by [`Scalar::parse`].
const MAX_LITERAL_LEN: usize = 256;
/// Longest integer, or side of a `p/q` literal. Large enough for every
/// literal that [`Scalar::to_literal`] emits for a parsed value.
const MAX_DIGITS: usize = 400;

#[derive(Clone, Debug, PartialEq)]
pub struct Scalar {
    exact: Rational,
    approx: f64,
}

impl Scalar {
    pub fn from_rational(exact: Rational) -> Self {
        let approx = rational_to_f64(&exact);
        Scalar { exact, approx }
    }

    pub fn from_int(v: i64) -> Self {
        Scalar { exact: Rational::from_integer(BigInt::from(v)), approx: v as f64 }
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(Self::from_rational(Rational::new(BigInt::from(num), BigInt::from(den))))
    }

    pub fn from_f64(v: f64) -> Result<Self> {
        let exact = Rational::from_f64(v)
            .ok_or_else(|| Error::Parse(format!("non-finite number {v}")))?;
        Ok(Scalar { exact, approx: v })
    }

    /// Parses `"p/q"`, integers, and decimal literals (`"0.25"`, `"1e-3"`).
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s.len() > 2 * MAX_DIGITS + 3 {
            return Err(Error::Parse(format!("bad numeric literal {s:?}")));
        }
        if let Some((p, q)) = s.split_once('/') {
            let p = parse_int(p)?;
            let q = parse_int(q)?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            return Ok(Self::from_rational(Rational::new(p, q)));
        }
        if let Ok(i) = parse_int(s) {
            return Ok(Self::from_rational(Rational::from_integer(i)));
        }
        if s.len() > MAX_LITERAL_LEN {
            return Err(Error::Parse(format!("numeric literal longer than {MAX_LITERAL_LEN} characters")));
        }
        if let Some(r) = parse_decimal(s) {
            return Ok(Self::from_rational(r));
        }
        let v: f64 = s.parse().map_err(|_| Error::Parse(format!("bad numeric literal {s:?}")))?;
        Self::from_f64(v)
    }

    pub fn exact(&self) -> &Rational {
        &self.exact
    }

    pub fn value(&self) -> f64 {
        self.approx
    }

    pub fn is_positive(&self) -> bool {
        self.exact.is_positive()
    }

    pub fn is_zero(&self) -> bool {
        self.exact.is_zero()
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        Scalar::from_rational(&self.exact * &other.exact)
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        Scalar::from_rational(&self.exact + &other.exact)
    }

    pub fn one_minus(&self) -> Scalar {
        Scalar::from_rational(Rational::one() - &self.exact)
    }

    /// Canonical text form: integer, or `p/q`.
    pub fn to_literal(&self) -> String {
        if self.exact.is_integer() {
            self.exact.numer().to_string()
        } else {
            format!("{}/{}", self.exact.numer(), self.exact.denom())
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal())
    }
}

impl FromStr for Scalar {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Scalar::parse(s)
    }
}

fn parse_int(s: &str) -> Result<BigInt> {
    let t = s.trim();
    let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("bad integer {s:?}")));
    }
    if digits.len() > MAX_DIGITS {
        return Err(Error::Parse(format!("integer longer than {MAX_DIGITS} digits")));
    }
    BigInt::from_str(t.strip_prefix('+').unwrap_or(t)).map_err(|e| Error::Parse(e.to_string()))
}

/// Exact decimal such as `-12.375`; exponents fall through to the float path.
fn parse_decimal(s: &str) -> Option<Rational> {
    let (neg, body) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (int_part, frac_part) = body.split_once('.')?;
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
    let denom = num::pow(BigInt::from(10), frac_part.len());
    let r = Rational::new(numer, denom);
    Some(if neg { -r } else { r })
}

/// Correctly-rounded-enough conversion that survives huge numerators.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

pub fn rational_from_i64(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Largest integer `m` with `m*m <= r` for `r >= 0`.
pub fn floor_sqrt(r: &Rational) -> BigInt {
    if !r.is_positive() {
        return BigInt::zero();
    }
    // floor(sqrt(p/q)) = floor(sqrt(floor(p*q / q^2)))... use floor(sqrt(floor(r))) refinement
    let fl = r.floor().to_integer();
    let mut m = fl.sqrt();
    // m^2 <= floor(r) <= r; step up while (m+1)^2 <= r
    loop {
        let next = &m + BigInt::one();
        if Rational::from_integer(&next * &next) <= *r {
            m = next;
        } else {
            break;
        }
    }
    m
}

pub fn is_integer_valued(r: &Rational) -> bool {
    r.denom().is_one()
}

pub fn gcd_normalized(r: &Rational) -> (BigInt, BigInt) {
    let g = r.numer().gcd(r.denom());
    (r.numer() / &g, r.denom() / &g)
}
