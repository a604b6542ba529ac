use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar. Always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Builds `n/d`. Panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid integer `{0}` in rational literal")]
    BadInteger(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Parses `"p"`, `"-p"` or `"p/q"` into canonical form.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let parse_int = |s: &str| {
        let s = s.trim();
        let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseRationalError::BadInteger(s.into()));
        }
        BigInt::from_str(s).map_err(|_| ParseRationalError::BadInteger(s.into()))
    };
    match text.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(text)?)),
        Some((num, den)) => {
            let num = parse_int(num)?;
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err(ParseRationalError::ZeroDenominator(text.into()));
            }
            Ok(Rational::new(num, den))
        }
    }
}

/// Least common multiple of the denominators of `values` (1 for an empty slice).
pub fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// Scales a rational vector to coprime integer entries, keeping its direction.
/// The zero vector is returned unchanged.
pub fn primitive_integer_vector(values: &[Rational]) -> alloc::vec::Vec<Rational> {
    let lcm = denominator_lcm(values);
    let ints: alloc::vec::Vec<BigInt> = values.iter().map(|q| q.numer() * (&lcm / q.denom())).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if gcd.is_zero() {
        return values.to_vec();
    }
    ints.into_iter().map(|x| Rational::from_integer(x / &gcd)).collect()
}

fn scaled_isqrt(q: &Rational, bits: u32) -> (BigInt, bool, BigInt) {
    assert!(!q.is_negative(), "square root of a negative rational");
    let scale = BigInt::one() << bits;
    // sqrt(n/d) * 2^bits = sqrt(n * d * 4^bits) / d
    let radicand = q.numer() * q.denom() * (&scale * &scale);
    let root = radicand.sqrt();
    let exact = &root * &root == radicand;
    (root, exact, q.denom() * scale)
}

/// An upper bound on `sqrt(q)` with denominator dividing `d·2^bits`, exact
/// when the scaled radicand is a perfect square.
pub fn sqrt_upper_bound(q: &Rational, bits: u32) -> Rational {
    let (root, exact, den) = scaled_isqrt(q, bits);
    let root = if exact { root } else { root + BigInt::one() };
    Rational::new(root, den)
}

/// A lower bound on `sqrt(q)`, the counterpart of [`sqrt_upper_bound`].
pub fn sqrt_lower_bound(q: &Rational, bits: u32) -> Rational {
    let (root, _, den) = scaled_isqrt(q, bits);
    Rational::new(root, den)
}

/// Exact sign of a rational as -1, 0 or 1.
pub fn sign(q: &Rational) -> i8 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

/// Display wrapper that always renders as `p/q` or `p`.
pub struct Canonical<'a>(pub &'a Rational);

impl fmt::Display for Canonical<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}
