//! q-shifted factorials, rising factorials and certified basic hypergeometric
//! summation.

mod phi;
mod series;

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::precision::{BigReal, ErrorBound, Estimate, Rational, Scalar, BOUND_DIGITS};

pub use phi::{phi_series, phi_series_direct, PhiSeriesSpec};
pub use series::{HyperSeries, QFactor, SumOptions, TermRatio, WeightedSeries};

/// The base q of every series and product. Verification entry points require
/// `0 < q < 1`.
#[derive(Clone, Debug)]
pub enum QPoint {
    Exact(Rational),
    Real(BigReal),
}

impl QPoint {
    pub fn exact(q: Rational) -> Result<Self> {
        check_unit_interval_rational(&q)?;
        Ok(QPoint::Exact(q))
    }

    pub fn real(q: BigReal) -> Result<Self> {
        if q <= 0 || q >= 1 {
            return Err(Error::Domain(format!("q = {} must satisfy 0 < q < 1", q.to_decimal(20))));
        }
        Ok(QPoint::Real(q))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            QPoint::Exact(r) => Some(r),
            QPoint::Real(_) => None,
        }
    }

    pub fn to_bigreal(&self, digits: u32) -> BigReal {
        match self {
            QPoint::Exact(r) => BigReal::from_rational(r, digits),
            QPoint::Real(x) => x.with_digits(digits),
        }
    }
}

pub(crate) fn check_unit_interval_rational(q: &Rational) -> Result<()> {
    if q.cmp0() != Ordering::Greater || *q >= 1 {
        return Err(Error::Domain(format!("q = {q} must satisfy 0 < q < 1")));
    }
    Ok(())
}

fn check_unit_interval(q: &BigReal) -> Result<()> {
    if !(q.is_finite() && *q > 0 && *q < 1) {
        return Err(Error::Domain(format!("q = {} must satisfy 0 < q < 1", q.to_decimal(20))));
    }
    Ok(())
}

/// A computed value together with the number of terms (or factors) used and
/// a bound on its absolute error.
#[derive(Clone, Debug)]
pub struct SeriesResult {
    pub value: BigReal,
    pub terms_used: usize,
    pub bound: ErrorBound,
}

impl Estimate for SeriesResult {
    fn value(&self) -> &BigReal {
        &self.value
    }
    fn bound(&self) -> &ErrorBound {
        &self.bound
    }
}

impl SeriesResult {
    pub fn exact(value: BigReal) -> Self {
        SeriesResult { value, terms_used: 0, bound: ErrorBound::zero(crate::precision::BoundKind::Truncation) }
    }

    fn bound_real(&self) -> BigReal {
        self.bound.magnitude().clone()
    }

    fn from_parts(value: BigReal, terms_used: usize, bound: &BigReal, kind_from: &[&ErrorBound]) -> Self {
        let mut kind = kind_from[0].kind();
        for b in &kind_from[1..] {
            if b.kind() != kind {
                kind = crate::precision::BoundKind::Combined;
            }
        }
        SeriesResult { value, terms_used, bound: ErrorBound::new(kind, bound) }
    }

    pub fn add(&self, other: &SeriesResult) -> SeriesResult {
        let b = self.bound.combine(&other.bound);
        SeriesResult { value: &self.value + &other.value, terms_used: self.terms_used + other.terms_used, bound: b }
    }

    pub fn sub(&self, other: &SeriesResult) -> SeriesResult {
        let b = self.bound.combine(&other.bound);
        SeriesResult { value: &self.value - &other.value, terms_used: self.terms_used + other.terms_used, bound: b }
    }

    pub fn neg(&self) -> SeriesResult {
        SeriesResult { value: -&self.value, terms_used: self.terms_used, bound: self.bound.clone() }
    }

    /// `|x| e2 + |y| e1 + e1 e2`
    pub fn mul(&self, other: &SeriesResult) -> SeriesResult {
        let e1 = self.bound_real();
        let e2 = other.bound_real();
        let bound = &(&(&self.value.abs().with_digits(BOUND_DIGITS) * &e2) + &(&other.value.abs().with_digits(BOUND_DIGITS) * &e1)) + &(&e1 * &e2);
        SeriesResult::from_parts(
            &self.value * &other.value,
            self.terms_used + other.terms_used,
            &bound,
            &[&self.bound, &other.bound],
        )
    }

    /// `(e1 |y| + |x| e2) / (|y| (|y| - e2))`; fails if the divisor's ball
    /// contains zero.
    pub fn div(&self, other: &SeriesResult) -> Result<SeriesResult> {
        let y = other.value.abs().with_digits(BOUND_DIGITS);
        let e2 = other.bound_real();
        if other.value.is_zero() || y <= e2 {
            return Err(Error::ZeroDenominator { what: "product quotient".into(), index: 0 });
        }
        let e1 = self.bound_real();
        let x = self.value.abs().with_digits(BOUND_DIGITS);
        let bound = &(&(&e1 * &y) + &(&x * &e2)) / &(&y * &(&y - &e2));
        Ok(SeriesResult::from_parts(
            &self.value / &other.value,
            self.terms_used + other.terms_used,
            &bound,
            &[&self.bound, &other.bound],
        ))
    }

    pub fn powi(&self, n: i32) -> Result<SeriesResult> {
        let mut acc = SeriesResult::exact(self.value.one_like());
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(self);
        }
        if n < 0 {
            SeriesResult::exact(self.value.one_like()).div(&acc)
        } else {
            Ok(acc)
        }
    }

    /// Multiplies by an exact constant.
    pub fn scale(&self, c: &BigReal) -> SeriesResult {
        SeriesResult { value: &self.value * c, terms_used: self.terms_used, bound: self.bound.scaled(c) }
    }
}

/// `(x; q)_n = prod_{i<n} (1 - x q^i)`, exact for rationals.
pub fn qpoch_finite<T: Scalar>(x: &T, q: &T, n: usize) -> T {
    let mut acc = x.one_like();
    let mut xq = x.clone();
    for i in 0..n {
        acc = acc.times(&xq.one_minus());
        if i + 1 < n {
            xq = xq.times(q);
        }
    }
    acc
}

/// [`qpoch_finite`] with a signed length; negative lengths are a domain error.
pub fn qpoch<T: Scalar>(x: &T, q: &T, n: i64) -> Result<T> {
    if n < 0 {
        return Err(Error::Domain(format!("negative q-Pochhammer length {n}")));
    }
    Ok(qpoch_finite(x, q, n as usize))
}

/// `(x; q)_inf` truncated at the first `I` with `|x| q^I / (1 - q) < 10^-digits`.
///
/// With `d = |x| q^I / (1 - q)`, the logarithm of the omitted factors is at most
/// `d / (1 - d)` in modulus, so the omitted tail moves the product by at most
/// `|P_I| * 2d/(1-d)`.
pub fn qpoch_infinite(x: &BigReal, q: &BigReal, digits: u32) -> Result<SeriesResult> {
    check_unit_interval(q)?;
    if !x.is_finite() {
        return Err(Error::Domain("non-finite q-Pochhammer argument".into()));
    }
    let wd = digits.max(x.digits()).max(q.digits());
    let q = q.with_digits(wd);
    if x.is_zero() {
        return Ok(SeriesResult::exact(BigReal::one(wd)));
    }
    let eps = BigReal::from_rational(&crate::precision::ten_pow_neg(digits), BOUND_DIGITS);
    let one_minus_q = q.one_minus().with_digits(BOUND_DIGITS);
    let mut acc = BigReal::one(wd);
    let mut xq = x.with_digits(wd);
    let mut i = 0usize;
    loop {
        let d = &xq.abs().with_digits(BOUND_DIGITS) / &one_minus_q;
        if d < eps {
            let two_d = &(&d * 2) / &d.one_minus();
            let bound = &acc.abs().with_digits(BOUND_DIGITS) * &two_d;
            return Ok(SeriesResult { value: acc, terms_used: i, bound: ErrorBound::truncation(&bound) });
        }
        acc *= &xq.one_minus();
        xq *= &q;
        i += 1;
    }
}

/// Length of a q-Pochhammer symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PochLength {
    Finite(usize),
    Infinite,
}

/// `(x_1, ..., x_r; q)_n`; bounds of the infinite factors combine as in
/// [`SeriesResult::mul`].
pub fn qpoch_multi(xs: &[BigReal], q: &BigReal, n: PochLength, digits: u32) -> Result<SeriesResult> {
    check_unit_interval(q)?;
    let mut acc = SeriesResult::exact(BigReal::one(digits));
    for x in xs {
        let f = match n {
            PochLength::Finite(n) => SeriesResult { value: qpoch_finite(x, q, n), terms_used: n, bound: ErrorBound::zero(crate::precision::BoundKind::Truncation) },
            PochLength::Infinite => qpoch_infinite(x, q, digits)?,
        };
        acc = acc.mul(&f);
    }
    Ok(acc)
}

/// Exact `(x_1, ..., x_r; q)_n`.
pub fn qpoch_multi_exact(xs: &[Rational], q: &Rational, n: usize) -> Rational {
    xs.iter().fold(Rational::from(1), |acc, x| acc * qpoch_finite(x, q, n))
}

/// Rising factorial `(x)_n = x (x+1) ... (x+n-1)`.
pub fn pochhammer<T: Scalar>(x: &T, n: usize) -> T {
    let mut acc = x.one_like();
    let mut y = x.clone();
    let one = x.one_like();
    for _ in 0..n {
        acc = acc.times(&y);
        y = y.plus(&one);
    }
    acc
}

/// Product `prod (x_i; base_i)_inf^{e_i}` of infinite q-Pochhammers with
/// signed integer exponents.
pub fn product_of(factors: &[(BigReal, BigReal, i32)], digits: u32) -> Result<SeriesResult> {
    let mut numer = SeriesResult::exact(BigReal::one(digits));
    let mut denom = SeriesResult::exact(BigReal::one(digits));
    for (i, (x, base, e)) in factors.iter().enumerate() {
        let p = qpoch_infinite(x, base, digits)?;
        if *e < 0 && p.value.is_zero() {
            return Err(Error::ZeroDenominator { what: "infinite product".into(), index: i });
        }
        let pe = p.powi(e.abs())?;
        if *e >= 0 {
            numer = numer.mul(&pe);
        } else {
            denom = denom.mul(&pe);
        }
    }
    numer.div(&denom)
}
