//! Term-ratio summation with rigorous tail majorants.
//!
//! A series is described by its first term and the rational function
//! `t_{k+1}/t_k = scale * q^(step k) * prod_i (1 - c_i q^(s_i k)) / prod_j (1 - d_j q^(s_j k))`.
//! Every series in the catalog has this shape once fractional powers of q are
//! substituted away.

use crate::error::{Error, Result};
use crate::precision::{ten_pow_neg, BigReal, ErrorBound, Rational, Scalar, BOUND_DIGITS};

use super::SeriesResult;

/// The factor `1 - coeff * q^(step k)` of a term ratio.
#[derive(Clone, Debug)]
pub struct QFactor<T> {
    pub coeff: T,
    pub step: u32,
}

impl<T> QFactor<T> {
    pub fn new(coeff: T, step: u32) -> Self {
        QFactor { coeff, step }
    }
}

#[derive(Clone, Debug)]
pub struct TermRatio<T> {
    pub scale: T,
    pub step: u32,
    pub numer: Vec<QFactor<T>>,
    pub denom: Vec<QFactor<T>>,
}

impl<T: Scalar> TermRatio<T> {
    pub fn new(scale: T, step: u32) -> Self {
        TermRatio { scale, step, numer: Vec::new(), denom: Vec::new() }
    }

    /// Adds the numerator factor `1 - coeff q^(step k)`.
    pub fn up(mut self, coeff: T, step: u32) -> Self {
        self.numer.push(QFactor::new(coeff, step));
        self
    }

    /// Adds the denominator factor `1 - coeff q^(step k)`.
    pub fn down(mut self, coeff: T, step: u32) -> Self {
        self.denom.push(QFactor::new(coeff, step));
        self
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> TermRatio<U> {
        TermRatio {
            scale: f(&self.scale),
            step: self.step,
            numer: self.numer.iter().map(|x| QFactor::new(f(&x.coeff), x.step)).collect(),
            denom: self.denom.iter().map(|x| QFactor::new(f(&x.coeff), x.step)).collect(),
        }
    }
}

/// Incremental state: the current `c q^(s k)` of every factor.
struct Cursor<T> {
    scale: T,
    scale_mult: T,
    numer: Vec<(T, T)>,
    denom: Vec<(T, T)>,
}

impl<T: Scalar> Cursor<T> {
    fn new(ratio: &TermRatio<T>, q: &T) -> Self {
        let pair = |f: &QFactor<T>| (f.coeff.clone(), q.pow_u(f.step));
        Cursor {
            scale: ratio.scale.clone(),
            scale_mult: q.pow_u(ratio.step),
            numer: ratio.numer.iter().map(pair).collect(),
            denom: ratio.denom.iter().map(pair).collect(),
        }
    }

    /// `t_{k+1}/t_k` at the current k, then advances to k+1. Returns `None`
    /// for a vanishing numerator.
    fn step(&mut self, k: usize) -> Result<Option<T>> {
        let mut num = self.scale.clone();
        let mut zero = false;
        for (cur, _) in &self.numer {
            let f = cur.one_minus();
            zero |= f.is_zero();
            num = num.times(&f);
        }
        let mut den = self.scale.one_like();
        for (i, (cur, _)) in self.denom.iter().enumerate() {
            let f = cur.one_minus();
            if f.is_zero() {
                return Err(Error::ZeroDenominator { what: format!("term ratio factor {i}"), index: k });
            }
            den = den.times(&f);
        }
        self.scale = self.scale.times(&self.scale_mult);
        for (cur, m) in self.numer.iter_mut().chain(self.denom.iter_mut()) {
            *cur = cur.times(m);
        }
        if zero {
            return Ok(None);
        }
        Ok(Some(num.over(&den)))
    }
}

impl Cursor<BigReal> {
    /// Upper bound for `|t_{m+1}/t_m|` over all `m >= k` (the cursor sits at k),
    /// or `None` if a denominator factor may still cross zero.
    fn ratio_majorant(&self) -> Option<BigReal> {
        let one = BigReal::one(BOUND_DIGITS);
        let mut bound = self.scale.abs().with_digits(BOUND_DIGITS);
        for (cur, m) in &self.numer {
            let f = cur.one_minus().abs().with_digits(BOUND_DIGITS);
            if *m == 1 {
                bound = &bound * &f;
            } else {
                bound = &bound * &BigReal::max_abs(&f, &one);
            }
        }
        for (cur, m) in &self.denom {
            if *m == 1 {
                bound = &bound / &cur.one_minus().abs().with_digits(BOUND_DIGITS);
                continue;
            }
            if cur.is_negative() || cur.is_zero() {
                continue;
            }
            if *cur >= 1 {
                return None;
            }
            bound = &bound / &cur.one_minus().with_digits(BOUND_DIGITS);
        }
        Some(bound)
    }

    /// Bound on `sup_{m >= k} |A_m| / |A_k|` for weighted sums, or `None`
    /// when the factors do not yet allow one.
    fn growth_majorant(&self) -> Option<BigReal> {
        let mut scale = self.scale.abs().with_digits(BOUND_DIGITS);
        let mut exponent = BigReal::zero(BOUND_DIGITS);
        for (cur, m) in &self.numer {
            if *m == 1 {
                scale = &scale * &cur.one_minus().abs().with_digits(BOUND_DIGITS);
                continue;
            }
            let a = cur.abs().with_digits(BOUND_DIGITS);
            exponent = &exponent + &(&a / &m.one_minus().with_digits(BOUND_DIGITS));
        }
        for (cur, m) in &self.denom {
            if *m == 1 {
                let f = cur.one_minus().abs().with_digits(BOUND_DIGITS);
                scale = &scale / &f;
                continue;
            }
            let a = cur.abs().with_digits(BOUND_DIGITS);
            if a >= 1 {
                return None;
            }
            let d = &m.one_minus().with_digits(BOUND_DIGITS) * &a.one_minus();
            exponent = &exponent + &(&a / &d);
        }
        if scale > 1 {
            return None;
        }
        Some(exponent.exp())
    }
}

/// Controls for [`HyperSeries::sum`] and [`WeightedSeries::sum`].
#[derive(Clone, Copy, Debug)]
pub struct SumOptions {
    /// Hard cap on the number of terms before non-convergence is reported.
    pub max_terms: usize,
    /// Sum exactly this many terms and bound the rest, instead of stopping
    /// adaptively.
    pub fixed_terms: Option<usize>,
}

impl Default for SumOptions {
    fn default() -> Self {
        SumOptions { max_terms: 20_000_000, fixed_terms: None }
    }
}

/// `sum_k t_k` with `t_0 = first` and the term ratio `ratio` in base `q`.
#[derive(Clone, Debug)]
pub struct HyperSeries<T> {
    pub first: T,
    pub ratio: TermRatio<T>,
    pub q: T,
}

impl<T: Scalar> HyperSeries<T> {
    pub fn new(first: T, ratio: TermRatio<T>, q: T) -> Self {
        HyperSeries { first, ratio, q }
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> HyperSeries<U> {
        HyperSeries { first: f(&self.first), ratio: self.ratio.map(&f), q: f(&self.q) }
    }

    /// The first `n` terms.
    pub fn terms(&self, n: usize) -> Result<Vec<T>> {
        let mut out = Vec::with_capacity(n);
        let mut cursor = Cursor::new(&self.ratio, &self.q);
        let mut t = self.first.clone();
        for k in 0..n {
            out.push(t.clone());
            if k + 1 < n {
                t = match cursor.step(k)? {
                    Some(r) => t.times(&r),
                    None => t.zero_like(),
                };
            }
        }
        Ok(out)
    }

    /// `sum_{k<n} t_k`; exact when `T` is [`Rational`].
    pub fn partial_sum(&self, n: usize) -> Result<T> {
        let mut s = self.first.zero_like();
        let mut cursor = Cursor::new(&self.ratio, &self.q);
        let mut t = self.first.clone();
        for k in 0..n {
            s = s.plus(&t);
            if k + 1 < n {
                match cursor.step(k)? {
                    Some(r) => t = t.times(&r),
                    None => return Ok(s),
                }
            }
        }
        Ok(s)
    }
}

impl HyperSeries<Rational> {
    pub fn to_real(&self, digits: u32) -> HyperSeries<BigReal> {
        self.map(|x| BigReal::from_rational(x, digits))
    }
}

impl HyperSeries<BigReal> {
    /// Sums until `|t_k| <= 10^-digits |S_k|` for three consecutive k and the
    /// remaining ratios are certified below 1; the tail bound is
    /// `|t_K| rho / (1 - rho)` with `rho` the ratio majorant.
    pub fn sum(&self, digits: u32, opts: &SumOptions) -> Result<SeriesResult> {
        let eps = BigReal::from_rational(&ten_pow_neg(digits), BOUND_DIGITS);
        let mut cursor = Cursor::new(&self.ratio, &self.q);
        let mut t = self.first.clone();
        let mut s = t.clone();
        let mut small = 0usize;
        let mut k = 0usize;
        let limit = opts.fixed_terms.unwrap_or(opts.max_terms);
        loop {
            let terms_used = k + 1;
            let at_end = opts.fixed_terms.map_or(false, |n| terms_used >= n);
            if opts.fixed_terms.is_none() {
                let ta = t.abs().with_digits(BOUND_DIGITS);
                if ta <= &eps * &s.abs().with_digits(BOUND_DIGITS) {
                    small += 1;
                } else {
                    small = 0;
                }
            }
            if small >= 3 || at_end {
                if let Some(rho) = cursor.ratio_majorant() {
                    if rho < 1 {
                        let tail = &(&t.abs().with_digits(BOUND_DIGITS) * &rho) / &rho.one_minus();
                        return Ok(SeriesResult { value: s, terms_used, bound: ErrorBound::truncation(&tail) });
                    }
                }
                if at_end {
                    return Err(Error::TailNotCertified(format!("ratio majorant not below 1 after {terms_used} terms")));
                }
            }
            if terms_used >= limit {
                return Err(Error::NonConvergence { what: "term-ratio series".into(), terms: terms_used });
            }
            match cursor.step(k)? {
                Some(r) => t *= &r,
                None => {
                    return Ok(SeriesResult { value: s, terms_used, bound: ErrorBound::zero(crate::precision::BoundKind::Truncation) });
                }
            }
            s += &t;
            k += 1;
        }
    }
}

/// `sum_k A_k P(q^k)` where `A_k` is a term-ratio sequence and
/// `P(t) = sum_{j>=1} p_j t^j` has no constant term.
#[derive(Clone, Debug)]
pub struct WeightedSeries<T> {
    pub coefficients: HyperSeries<T>,
    /// `p_1, p_2, ...`
    pub weight: Vec<T>,
}

impl<T: Scalar> WeightedSeries<T> {
    pub fn new(coefficients: HyperSeries<T>, weight: Vec<T>) -> Self {
        WeightedSeries { coefficients, weight }
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> WeightedSeries<U> {
        WeightedSeries { coefficients: self.coefficients.map(&f), weight: self.weight.iter().map(&f).collect() }
    }

    fn weight_at(&self, u: &T) -> T {
        let mut acc = u.zero_like();
        for p in self.weight.iter().rev() {
            acc = acc.plus(p).times(u);
        }
        acc
    }

    /// `sum_{k<n} A_k P(q^k)`; exact for rationals.
    pub fn partial_sum(&self, n: usize) -> Result<T> {
        let a = self.coefficients.terms(n)?;
        let mut s = self.coefficients.first.zero_like();
        let mut u = s.one_like();
        for ak in &a {
            s = s.plus(&ak.times(&self.weight_at(&u)));
            u = u.times(&self.coefficients.q);
        }
        Ok(s)
    }
}

impl WeightedSeries<Rational> {
    pub fn to_real(&self, digits: u32) -> WeightedSeries<BigReal> {
        self.map(|x| BigReal::from_rational(x, digits))
    }
}

impl WeightedSeries<BigReal> {
    /// Tail after `A_K` and `u = q^K` are known: `sup_{m>=K}|A_m|` times
    /// `sum_j |p_j| q^(jK)/(1-q^j)`.
    fn tail_bound(&self, cursor: &Cursor<BigReal>, a: &BigReal, u: &BigReal) -> Option<BigReal> {
        let growth = cursor.growth_majorant()?;
        let q = self.coefficients.q.with_digits(BOUND_DIGITS);
        let u = u.with_digits(BOUND_DIGITS);
        let mut poly = BigReal::zero(BOUND_DIGITS);
        let mut uj = u.clone();
        let mut qj = q.clone();
        for p in &self.weight {
            poly = &poly + &(&(&p.abs().with_digits(BOUND_DIGITS) * &uj) / &qj.one_minus());
            uj = &uj * &u;
            qj = &qj * &q;
        }
        Some(&(&a.abs().with_digits(BOUND_DIGITS) * &growth) * &poly)
    }

    pub fn sum(&self, digits: u32, opts: &SumOptions) -> Result<SeriesResult> {
        let eps = BigReal::from_rational(&ten_pow_neg(digits), BOUND_DIGITS);
        let floor = &eps * &eps;
        let hs = &self.coefficients;
        let mut cursor = Cursor::new(&hs.ratio, &hs.q);
        let mut a = hs.first.clone();
        let mut u = a.one_like();
        let mut s = a.zero_like();
        let mut small = 0usize;
        let limit = opts.fixed_terms.unwrap_or(opts.max_terms);
        let mut k = 0usize;
        loop {
            let term = &a * &self.weight_at(&u);
            s += &term;
            let terms_used = k + 1;
            let at_end = opts.fixed_terms.map_or(false, |n| terms_used >= n);
            let threshold = BigReal::max_abs(&(&eps * &s.abs().with_digits(BOUND_DIGITS)), &floor);
            if term.abs().with_digits(BOUND_DIGITS) <= threshold {
                small += 1;
            } else {
                small = 0;
            }
            // advance to A_{k+1}
            match cursor.step(k)? {
                Some(r) => a *= &r,
                None => {
                    return Ok(SeriesResult { value: s, terms_used, bound: ErrorBound::zero(crate::precision::BoundKind::Truncation) });
                }
            }
            u *= &hs.q;
            if (small >= 3 && opts.fixed_terms.is_none()) || at_end {
                if let Some(tail) = self.tail_bound(&cursor, &a, &u) {
                    if at_end || tail <= threshold {
                        return Ok(SeriesResult { value: s, terms_used, bound: ErrorBound::truncation(&tail) });
                    }
                } else if at_end {
                    return Err(Error::TailNotCertified(format!("weighted tail after {terms_used} terms")));
                }
            }
            if terms_used >= limit {
                return Err(Error::NonConvergence { what: "weighted series".into(), terms: terms_used });
            }
            k += 1;
        }
    }
}
