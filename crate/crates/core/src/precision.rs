//! Exact rationals, multiprecision reals and the error-bound contract shared by
//! every evaluator in the crate.
//!
//! Precision is counted in decimal digits. A [`BigReal`] carries the number of
//! digits it was computed at, and binary operations run at the larger of the
//! two operands' precisions. All rounding is round-to-nearest; final checks
//! compare residuals against bounds with a safety factor instead of relying on
//! directed rounding.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::{Constant, Round};
use rug::ops::Pow;
use rug::{Float, Integer};

use crate::error::{Error, Result};

pub use rug::Rational;

/// Smallest working precision accepted anywhere in the crate.
pub const MIN_DIGITS: u32 = 20;
/// Guard digits added on top of the requested precision.
pub const DEFAULT_GUARD: u32 = 20;
/// How many times the guard is doubled before giving up.
pub const MAX_ESCALATIONS: u32 = 3;
/// Precision used to carry error-bound magnitudes.
pub const BOUND_DIGITS: u32 = MIN_DIGITS;

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Binary precision used for `digits` decimal digits, with a few spare bits.
pub fn digits_to_bits(digits: u32) -> u32 {
    (f64::from(digits) * LOG2_10).ceil() as u32 + 16
}

/// `10^(-n)` as a rational.
pub fn ten_pow_neg(n: u32) -> Rational {
    Rational::from((Integer::from(1), Integer::from(Integer::u_pow_u(10, n))))
}

/// Arbitrary-precision real with an explicit working precision in decimal digits.
#[derive(Clone)]
pub struct BigReal {
    value: Float,
    digits: u32,
}

impl BigReal {
    fn raw(value: Float, digits: u32) -> Self {
        BigReal { value, digits }
    }

    /// Rounds `value` to `digits` decimal digits.
    pub fn from_float(value: &Float, digits: u32) -> Self {
        let digits = digits.max(MIN_DIGITS);
        BigReal::raw(Float::with_val(digits_to_bits(digits), value), digits)
    }

    pub fn from_rational(r: &Rational, digits: u32) -> Self {
        let digits = digits.max(MIN_DIGITS);
        BigReal::raw(Float::with_val(digits_to_bits(digits), r), digits)
    }

    pub fn from_int(v: i64, digits: u32) -> Self {
        let digits = digits.max(MIN_DIGITS);
        BigReal::raw(Float::with_val(digits_to_bits(digits), v), digits)
    }

    pub fn from_f64(v: f64, digits: u32) -> Self {
        let digits = digits.max(MIN_DIGITS);
        BigReal::raw(Float::with_val(digits_to_bits(digits), v), digits)
    }

    pub fn zero(digits: u32) -> Self {
        BigReal::from_int(0, digits)
    }

    pub fn one(digits: u32) -> Self {
        BigReal::from_int(1, digits)
    }

    /// pi to `digits` digits.
    pub fn pi(digits: u32) -> Self {
        let digits = digits.max(MIN_DIGITS);
        BigReal::raw(Float::with_val(digits_to_bits(digits), Constant::Pi), digits)
    }

    /// Parses a decimal string in the format produced by [`BigReal::to_decimal`].
    pub fn parse(s: &str, digits: u32) -> Result<Self> {
        let digits = digits.max(MIN_DIGITS);
        let parsed = Float::parse(s).map_err(|_| Error::Parse(s.to_string()))?;
        Ok(BigReal::raw(Float::with_val(digits_to_bits(digits), parsed), digits))
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn as_float(&self) -> &Float {
        &self.value
    }

    /// The same number re-rounded to a different precision.
    pub fn with_digits(&self, digits: u32) -> Self {
        BigReal::from_float(&self.value, digits)
    }

    pub fn abs(&self) -> Self {
        BigReal::raw(self.value.clone().abs(), self.digits)
    }

    pub fn recip(&self) -> Self {
        BigReal::raw(self.value.clone().recip(), self.digits)
    }

    pub fn sqrt(&self) -> Self {
        BigReal::raw(self.value.clone().sqrt(), self.digits)
    }

    pub fn sin(&self) -> Self {
        BigReal::raw(self.value.clone().sin(), self.digits)
    }

    pub fn ln(&self) -> Self {
        BigReal::raw(self.value.clone().ln(), self.digits)
    }

    pub fn exp(&self) -> Self {
        BigReal::raw(self.value.clone().exp(), self.digits)
    }

    pub fn powi(&self, n: i32) -> Self {
        BigReal::raw(self.value.clone().pow(n), self.digits)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }

    pub fn is_negative(&self) -> bool {
        self.value.is_sign_negative() && !self.value.is_zero()
    }

    pub fn cmp_abs(&self, other: &BigReal) -> Ordering {
        self.value.cmp_abs(&other.value).unwrap_or(Ordering::Equal)
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    /// Decimal exponent estimate: `log10 |x|`, or `-inf` for zero.
    pub fn log10_abs(&self) -> f64 {
        if self.value.is_zero() {
            return f64::NEG_INFINITY;
        }
        let (m, e) = self.value.to_f64_exp();
        m.abs().log10() + f64::from(e) * std::f64::consts::LOG10_2
    }

    /// Scientific decimal string with `significant` digits (rug/MPFR format,
    /// e.g. `5.7064471879e-1`).
    pub fn to_decimal(&self, significant: usize) -> String {
        self.value.to_string_radix(10, Some(significant.max(1)))
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.value.to_rational()
    }

    pub fn max_abs(a: &BigReal, b: &BigReal) -> BigReal {
        if a.cmp_abs(b) == Ordering::Less {
            b.abs()
        } else {
            a.abs()
        }
    }
}

/// `r` rounded to `digits` decimal digits (at least [`MIN_DIGITS`]).
pub fn to_bigreal(r: &Rational, digits: u32) -> BigReal {
    BigReal::from_rational(r, digits)
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}d]", self.to_decimal(25), self.digits)
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown = f.precision().unwrap_or(self.digits as usize);
        f.write_str(&self.to_decimal(shown))
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.partial_cmp(&other.value)
    }
}

impl PartialEq<i32> for BigReal {
    fn eq(&self, other: &i32) -> bool {
        self.value == *other
    }
}

impl PartialOrd<i32> for BigReal {
    fn partial_cmp(&self, other: &i32) -> Option<Ordering> {
        self.value.partial_cmp(other)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $assign_trait:ident, $assign:ident, $op:tt) => {
        impl<'a, 'b> $trait<&'b BigReal> for &'a BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &'b BigReal) -> BigReal {
                let digits = self.digits.max(rhs.digits);
                BigReal::raw(
                    Float::with_val(digits_to_bits(digits), &self.value $op &rhs.value),
                    digits,
                )
            }
        }

        impl $trait<BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                (&self).$method(&rhs)
            }
        }

        impl<'a> $trait<&'a BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &'a BigReal) -> BigReal {
                (&self).$method(rhs)
            }
        }

        impl<'a> $trait<BigReal> for &'a BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                self.$method(&rhs)
            }
        }

        impl<'a> $assign_trait<&'a BigReal> for BigReal {
            fn $assign(&mut self, rhs: &'a BigReal) {
                if rhs.digits > self.digits {
                    self.digits = rhs.digits;
                    self.value.set_prec(digits_to_bits(rhs.digits));
                }
                self.value.$assign(&rhs.value);
            }
        }

        impl $assign_trait<BigReal> for BigReal {
            fn $assign(&mut self, rhs: BigReal) {
                self.$assign(&rhs);
            }
        }

        impl $trait<i64> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: i64) -> BigReal {
                BigReal::raw(
                    Float::with_val(digits_to_bits(self.digits), &self.value $op rhs),
                    self.digits,
                )
            }
        }

        impl $trait<i64> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: i64) -> BigReal {
                (&self).$method(rhs)
            }
        }

        impl $trait<&Rational> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &Rational) -> BigReal {
                BigReal::raw(
                    Float::with_val(digits_to_bits(self.digits), &self.value $op rhs),
                    self.digits,
                )
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign, +);
binop!(Sub, sub, SubAssign, sub_assign, -);
binop!(Mul, mul, MulAssign, mul_assign, *);
binop!(Div, div, DivAssign, div_assign, /);

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal::raw(-self.value, self.digits)
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal::raw(Float::with_val(self.value.prec(), -&self.value), self.digits)
    }
}

/// Field operations shared by exact rationals and multiprecision reals, so
/// finite products and sums can be written once and run in either arithmetic.
pub trait Scalar: Clone + fmt::Debug + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn int_like(&self, v: i64) -> Self;
    fn rational_like(&self, r: &Rational) -> Self;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    /// Division; callers check [`Scalar::is_zero`] on the divisor first.
    fn over(&self, rhs: &Self) -> Self;
    fn negated(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// Nonnegative integer power by repeated squaring.
    fn pow_u(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.times(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.times(&base);
            }
        }
        acc
    }
    /// Integer power; negative exponents invert.
    fn pow_i(&self, n: i32) -> Self {
        if n >= 0 {
            self.pow_u(n as u32)
        } else {
            self.one_like().over(&self.pow_u(n.unsigned_abs()))
        }
    }
    /// `1 - self`.
    fn one_minus(&self) -> Self {
        self.one_like().minus(self)
    }
}

impl Scalar for Rational {
    fn zero_like(&self) -> Self {
        Rational::new()
    }
    fn one_like(&self) -> Self {
        Rational::from(1)
    }
    fn int_like(&self, v: i64) -> Self {
        Rational::from(v)
    }
    fn rational_like(&self, r: &Rational) -> Self {
        r.clone()
    }
    fn plus(&self, rhs: &Self) -> Self {
        Rational::from(self + rhs)
    }
    fn minus(&self, rhs: &Self) -> Self {
        Rational::from(self - rhs)
    }
    fn times(&self, rhs: &Self) -> Self {
        Rational::from(self * rhs)
    }
    fn over(&self, rhs: &Self) -> Self {
        Rational::from(self / rhs)
    }
    fn negated(&self) -> Self {
        Rational::from(-self)
    }
    fn is_zero(&self) -> bool {
        self.cmp0() == Ordering::Equal
    }
}

impl Scalar for BigReal {
    fn zero_like(&self) -> Self {
        BigReal::zero(self.digits)
    }
    fn one_like(&self) -> Self {
        BigReal::one(self.digits)
    }
    fn int_like(&self, v: i64) -> Self {
        BigReal::from_int(v, self.digits)
    }
    fn rational_like(&self, r: &Rational) -> Self {
        BigReal::from_rational(r, self.digits)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn over(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn negated(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
}

/// What an [`ErrorBound`] accounts for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Truncation,
    Rounding,
    Combined,
}

/// A nonnegative bound on the absolute error of a computed value.
#[derive(Clone, Debug)]
pub struct ErrorBound {
    magnitude: BigReal,
    kind: BoundKind,
}

/// Rounds `|x|` up at bound precision after inflating it by `2^(10 - bits)`.
/// Bound magnitudes come out of a few round-to-nearest operations at bound
/// precision; the inflation absorbs those so a bound never undercuts the
/// quantity it bounds.
fn round_up_abs(x: &Float) -> Float {
    let bits = digits_to_bits(BOUND_DIGITS);
    let abs = Float::with_val(x.prec(), x.abs_ref());
    let slack = Float::with_val(bits, 1) + (Float::with_val(bits, 1) >> (bits - 10));
    Float::with_val_round(bits, &abs * &slack, Round::Up).0
}

impl ErrorBound {
    pub fn zero(kind: BoundKind) -> Self {
        ErrorBound { magnitude: BigReal::zero(BOUND_DIGITS), kind }
    }

    /// Bound of size `|magnitude|`.
    pub fn new(kind: BoundKind, magnitude: &BigReal) -> Self {
        ErrorBound {
            magnitude: BigReal::raw(round_up_abs(&magnitude.value), BOUND_DIGITS),
            kind,
        }
    }

    pub fn truncation(magnitude: &BigReal) -> Self {
        ErrorBound::new(BoundKind::Truncation, magnitude)
    }

    pub fn rounding(magnitude: &BigReal) -> Self {
        ErrorBound::new(BoundKind::Rounding, magnitude)
    }

    pub fn magnitude(&self) -> &BigReal {
        &self.magnitude
    }

    pub fn kind(&self) -> BoundKind {
        self.kind
    }

    pub fn is_zero(&self) -> bool {
        self.magnitude.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.magnitude.is_finite()
    }

    /// Sum of both bounds; the result is at least as large as either part.
    pub fn combine(&self, other: &ErrorBound) -> ErrorBound {
        let sum = Float::with_val_round(
            digits_to_bits(BOUND_DIGITS),
            &self.magnitude.value + &other.magnitude.value,
            Round::Up,
        )
        .0;
        let kind = if self.kind == other.kind { self.kind } else { BoundKind::Combined };
        ErrorBound { magnitude: BigReal::raw(sum, BOUND_DIGITS), kind }
    }

    /// Same kind, magnitude multiplied by `|factor|`.
    pub fn scaled(&self, factor: &BigReal) -> ErrorBound {
        let prod = Float::with_val_round(
            digits_to_bits(BOUND_DIGITS),
            &self.magnitude.value * &Float::with_val(factor.value.prec(), factor.value.abs_ref()),
            Round::Up,
        )
        .0;
        ErrorBound { magnitude: BigReal::raw(prod, BOUND_DIGITS), kind: self.kind }
    }

    pub fn with_kind(mut self, kind: BoundKind) -> ErrorBound {
        self.kind = kind;
        self
    }

    pub fn to_f64(&self) -> f64 {
        self.magnitude.to_f64()
    }
}

/// Anything that carries a value together with its own truncation bound.
pub trait Estimate {
    fn value(&self) -> &BigReal;
    fn bound(&self) -> &ErrorBound;
}

impl Estimate for (BigReal, ErrorBound) {
    fn value(&self) -> &BigReal {
        &self.0
    }
    fn bound(&self) -> &ErrorBound {
        &self.1
    }
}

/// Output of [`eval_with_guard`].
#[derive(Clone, Debug)]
pub struct Guarded<T> {
    /// Result of the higher-precision run.
    pub result: T,
    pub value: BigReal,
    /// Difference of the two runs combined with the run's own truncation bound.
    pub bound: ErrorBound,
    /// Precision of the higher run.
    pub working_digits: u32,
    pub guard: u32,
}

/// Runs `computation` at `digits + guard` and `digits + 2*guard` digits and
/// returns the higher-precision value with a combined bound. Fails with
/// [`Error::PrecisionEscalation`] when the two runs differ by more than
/// `10^-digits` (relative to the value once it exceeds 1).
pub fn eval_with_guard<T, F>(computation: F, digits: u32, guard: u32) -> Result<Guarded<T>>
where
    T: Estimate,
    F: Fn(u32) -> Result<T>,
{
    let digits = digits.max(MIN_DIGITS);
    let guard = guard.max(10);
    let low = computation(digits + guard)?;
    let high = computation(digits + 2 * guard)?;

    let diff = (high.value() - low.value()).abs();
    let scale = BigReal::max_abs(high.value(), &BigReal::one(BOUND_DIGITS));
    let threshold = &BigReal::from_rational(&ten_pow_neg(digits), BOUND_DIGITS) * &scale;
    if diff > threshold || !diff.is_finite() {
        return Err(Error::PrecisionEscalation {
            digits,
            guard,
            difference: diff.to_decimal(6),
        });
    }

    let bound = ErrorBound::rounding(&diff)
        .combine(high.bound())
        .with_kind(BoundKind::Combined);
    Ok(Guarded {
        value: high.value().clone(),
        result: high,
        bound,
        working_digits: digits + 2 * guard,
        guard,
    })
}

/// [`eval_with_guard`] with the default guard, doubling it on each
/// escalation failure. After [`MAX_ESCALATIONS`] doublings the outcome is
/// [`Error::Inconclusive`].
pub fn eval_escalating<T, F>(computation: F, digits: u32) -> Result<Guarded<T>>
where
    T: Estimate,
    F: Fn(u32) -> Result<T>,
{
    let mut guard = DEFAULT_GUARD;
    for _ in 0..=MAX_ESCALATIONS {
        match eval_with_guard(&computation, digits, guard) {
            Err(Error::PrecisionEscalation { .. }) => guard *= 2,
            other => return other,
        }
    }
    Err(Error::Inconclusive { attempts: MAX_ESCALATIONS })
}

/// Parses `p/r`, an integer, or a decimal literal (`0.25`, `1e-50`, `-3.5E2`)
/// into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let err = || Error::Parse(s.to_string());
    if s.contains('/') {
        return s.parse::<Rational>().map_err(|_| err());
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().map_err(|_| err())?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits: String = format!("{int_part}{frac_part}");
    let numer: Integer = digits.parse().map_err(|_| err())?;
    let scale = exponent - frac_part.len() as i32;
    let mut value = Rational::from(numer);
    if scale >= 0 {
        value *= Integer::from(Integer::u_pow_u(10, scale as u32));
    } else {
        value /= Integer::from(Integer::u_pow_u(10, scale.unsigned_abs()));
    }
    if negative {
        value = -value;
    }
    Ok(value)
}
