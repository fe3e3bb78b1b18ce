//! Exact coefficient arithmetic: arbitrary-precision rationals optionally
//! extended by a single square root, `value = rat + surd * sqrt(s)`.
//!
//! One extension per problem is all the four benchmark cases need (only
//! case 4 uses an irrational amplitude, `sqrt(3/4)`); keeping the tower
//! this flat makes equality decidable and arithmetic fast.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always stored reduced with positive
/// denominator (the backing type guarantees both).
pub type Rational = BigRational;

/// Build a rational from an integer pair, for tests and presets.
pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parse `p/q` or a decimal string (`0.1`, `-2.75`, `3`) into an exact
/// rational. Decimal strings convert exactly: `0.1` becomes `1/10`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Validation(format!("cannot parse rational from {text:?}"));
    if text.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = text.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Validation(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    let (sign, digits) = match text.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1, text.strip_prefix('+').unwrap_or(text)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    if all.is_empty() || !all.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let n: BigInt = all.parse().map_err(|_| bad())?;
    let d = BigInt::from(10u8).pow(frac_part.len() as u32);
    Ok(Rational::new(n * sign, d))
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
fn exact_sqrt(v: &Rational) -> Option<Rational> {
    if v.is_negative() {
        return None;
    }
    let sn = v.numer().sqrt();
    let sd = v.denom().sqrt();
    if &(&sn * &sn) == v.numer() && &(&sd * &sd) == v.denom() {
        Some(Rational::new(sn, sd))
    } else {
        None
    }
}

/// Element of the quadratic extension Q(sqrt(s)): `rat + surd * sqrt(s)`.
///
/// Canonical form: if `s` is a perfect square (including 0) the surd part is
/// folded into `rat` and `s` is reset to 0, so pure rationals always carry
/// `s = 0` and equality is plain field equality. Mixing a pure rational with
/// an extension element is allowed (the rational embeds); mixing two
/// different nonzero extensions is an error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scalar {
    rat: Rational,
    surd: Rational,
    s: Rational,
}

impl Scalar {
    /// The zero scalar.
    pub fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    /// The unit scalar.
    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    /// Embed a rational.
    pub fn from_rational(rat: Rational) -> Self {
        Scalar { rat, surd: Rational::zero(), s: Rational::zero() }
    }

    /// Embed a machine integer.
    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(Rational::from(BigInt::from(n)))
    }

    /// General constructor; validates `s >= 0` and canonicalizes.
    pub fn new(rat: Rational, surd: Rational, s: Rational) -> Result<Self> {
        if s.is_negative() {
            return Err(Error::Validation(format!("negative extension radicand {s}")));
        }
        Ok(Scalar { rat, surd, s }.canonicalized())
    }

    /// `sqrt(s)` as a scalar; perfect squares collapse to rationals.
    pub fn sqrt_of(s: Rational) -> Result<Self> {
        Self::new(Rational::zero(), Rational::one(), s)
    }

    fn canonicalized(mut self) -> Self {
        if self.surd.is_zero() {
            self.s = Rational::zero();
        } else if let Some(root) = exact_sqrt(&self.s) {
            self.rat += &self.surd * root;
            self.surd = Rational::zero();
            self.s = Rational::zero();
        }
        self
    }

    /// Rational part.
    pub fn rational_part(&self) -> &Rational {
        &self.rat
    }

    /// Coefficient of `sqrt(s)`.
    pub fn surd_part(&self) -> &Rational {
        &self.surd
    }

    /// The extension radicand (0 for pure rationals).
    pub fn extension(&self) -> &Rational {
        &self.s
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.surd.is_zero()
    }

    /// The value as a rational, if it has no surd part.
    pub fn to_rational(&self) -> Option<Rational> {
        self.surd.is_zero().then(|| self.rat.clone())
    }

    /// Common extension for a binary operation: equal radicands pass, a pure
    /// rational adopts the other operand's radicand, and two distinct
    /// nonzero radicands are incompatible.
    fn common_extension(&self, other: &Scalar) -> Result<Rational> {
        if self.s == other.s {
            Ok(self.s.clone())
        } else if self.s.is_zero() {
            Ok(other.s.clone())
        } else if other.s.is_zero() {
            Ok(self.s.clone())
        } else {
            Err(Error::IncompatibleExtension(self.s.to_string(), other.s.to_string()))
        }
    }

    /// Exact sum.
    pub fn add(&self, other: &Scalar) -> Result<Scalar> {
        let s = self.common_extension(other)?;
        Ok(Scalar { rat: &self.rat + &other.rat, surd: &self.surd + &other.surd, s }
            .canonicalized())
    }

    /// Exact difference.
    pub fn sub(&self, other: &Scalar) -> Result<Scalar> {
        self.add(&other.neg())
    }

    /// Exact product, using `sqrt(s) * sqrt(s) = s`.
    pub fn mul(&self, other: &Scalar) -> Result<Scalar> {
        let s = self.common_extension(other)?;
        let rat = &self.rat * &other.rat + &self.surd * &other.surd * &s;
        let surd = &self.rat * &other.surd + &self.surd * &other.rat;
        Ok(Scalar { rat, surd, s }.canonicalized())
    }

    /// Negation.
    pub fn neg(&self) -> Scalar {
        Scalar { rat: -&self.rat, surd: -&self.surd, s: self.s.clone() }
    }

    /// Exact `self^n`; `a^0 = 1`.
    pub fn pow(&self, n: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..n {
            // Same extension on both sides; cannot fail.
            acc = acc.mul(self).expect("self-power shares one extension");
        }
        acc
    }

    /// Scale by a plain rational.
    pub fn scale(&self, c: &Rational) -> Scalar {
        Scalar { rat: &self.rat * c, surd: &self.surd * c, s: self.s.clone() }.canonicalized()
    }

    /// Exact inverse via the conjugate: requires nonzero norm
    /// `rat^2 - surd^2 * s`, which for canonical scalars vanishes only at 0.
    pub fn inverse(&self) -> Result<Scalar> {
        let norm = &self.rat * &self.rat - &self.surd * &self.surd * &self.s;
        if norm.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let inv = norm.recip();
        Ok(Scalar { rat: &self.rat * &inv, surd: -&self.surd * &inv, s: self.s.clone() }
            .canonicalized())
    }

    /// Double-precision value of `rat + surd * sqrt(s)`.
    ///
    /// The rational conversions are correctly rounded, so the total error is
    /// at most 2 ulp (one from `sqrt`/multiply, one from the final add).
    pub fn to_f64(&self) -> f64 {
        let mut v = rational_to_f64(&self.rat);
        if !self.surd.is_zero() {
            v += rational_to_f64(&self.surd) * rational_to_f64(&self.s).sqrt();
        }
        v
    }
}

/// Correctly rounded rational-to-double conversion.
///
/// Scales the fraction so the integer quotient carries at least 54 bits,
/// divides with remainder, and rounds the quotient to a 53-bit mantissa in a
/// single step (nearest, ties to even). Avoids the double rounding of
/// converting numerator and denominator separately, which loses accuracy
/// once either exceeds 2^53.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let neg = r.is_negative();
    let num = r.numer().abs();
    let den = r.denom().clone();
    let shift = 55i64 + den.bits() as i64 - num.bits() as i64;
    let (n, d) = if shift >= 0 {
        (num << shift as u64, den)
    } else {
        (num, den << (-shift) as u64)
    };
    let (mut q, rem) = num_integer::Integer::div_rem(&n, &d);
    let excess = q.bits() as i64 - 53;
    let exp2 = if excess > 0 {
        // Dropped fraction is (low + rem/d) / 2^excess; compare its doubled
        // numerator against the halfway point d * 2^excess.
        let low = &q % (BigInt::one() << excess as u64);
        q >>= excess as u64;
        let frac2 = (low * &d + &rem) << 1u32;
        let half = d << excess as u64;
        if frac2 > half || (frac2 == half && q.is_odd()) {
            q += 1;
        }
        excess - shift
    } else {
        let twice = &rem << 1u32;
        if twice > d || (twice == d && q.is_odd()) {
            q += 1;
        }
        -shift
    };
    let mant = q.to_f64().expect("53-bit mantissa converts exactly");
    let v = mant * 2f64.powi(exp2 as i32);
    if neg {
        -v
    } else {
        v
    }
}

use num_integer::Integer as _;

impl fmt::Display for Scalar {
    /// `p/q` for rationals, `p/q + r/s*sqrt(s0)` when a surd part is present.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.surd.is_zero() {
            write!(f, "{}", self.rat)
        } else {
            write!(f, "{} + {}*sqrt({})", self.rat, self.surd, self.s)
        }
    }
}
