//! Classical pi-series with certified tails, and the q -> 1 limits that tie
//! each q-identity to its classical counterpart.

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::build::eval;
use crate::catalog::{verify_unchecked, Family, IdentityRecord, ParamPoint, ParamSpec, Registry, Side, VerificationReport};
use crate::error::{Error, Result};
use crate::precision::{ten_pow_neg, to_bigreal, BigReal, ErrorBound, Rational, BOUND_DIGITS};
use crate::qcore::SeriesResult;

fn rat(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

/// Polynomial in k with rational coefficients, constant term first.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Poly(Vec<Rational>);

impl Poly {
    fn constant(c: Rational) -> Self {
        Poly(vec![c])
    }

    /// `k + c`
    fn k_plus(c: Rational) -> Self {
        Poly(vec![c, Rational::from(1)])
    }

    /// `a k + b`
    fn linear(a: i64, b: i64) -> Self {
        Poly(vec![Rational::from(b), Rational::from(a)])
    }

    fn mul(&self, o: &Poly) -> Poly {
        let mut out = vec![Rational::new(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += Rational::from(a * b);
            }
        }
        Poly(out)
    }

    fn sub(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly((0..n).map(|i| self.0.get(i).cloned().unwrap_or_default() - o.0.get(i).cloned().unwrap_or_default()).collect())
    }

    fn pow(&self, n: u32) -> Poly {
        (0..n).fold(Poly::constant(Rational::from(1)), |acc, _| acc.mul(self))
    }

    fn product<'a>(items: impl IntoIterator<Item = &'a Poly>) -> Poly {
        items.into_iter().fold(Poly::constant(Rational::from(1)), |acc, p| acc.mul(p))
    }

    fn eval(&self, k: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::new(), |acc, c| acc * k + c)
    }

    /// `p(k + s)`
    fn shift(&self, s: &Rational) -> Poly {
        let step = Poly::k_plus(s.clone());
        self.0.iter().rev().fold(Poly::constant(Rational::new()), |acc, c| {
            let mut p = acc.mul(&step);
            p.0[0] += c;
            p
        })
    }

    fn coeff(&self, i: usize) -> Rational {
        self.0.get(i).cloned().unwrap_or_default()
    }

    /// Degree, ignoring zero leading coefficients; 0 for the zero polynomial.
    fn degree(&self) -> usize {
        self.0.iter().rposition(|c| c.cmp0() != std::cmp::Ordering::Equal).unwrap_or(0)
    }

    fn scale(&self, c: &Rational) -> Poly {
        Poly(self.0.iter().map(|x| Rational::from(x * c)).collect())
    }

    fn add(&self, o: &Poly) -> Poly {
        self.sub(&o.scale(&Rational::from(-1)))
    }

    fn coefficients_nonnegative(&self) -> bool {
        self.0.iter().all(|c| c.cmp0() != std::cmp::Ordering::Less)
    }
}

/// How the omitted tail of a classical series is bounded.
#[derive(Clone, Debug, PartialEq)]
pub enum TailRule {
    /// `t_{k+1}/t_k <= rho` for all k >= N: tail <= t_N / (1 - rho).
    Geometric(Rational),
    /// Alternating signs with nonincreasing magnitudes: tail <= |t_N|.
    Alternating,
    /// `t_{k+1}/t_k <= (k/(k+1))^(3/2)` for all k >= N: tail <= t_N (1 + 2N).
    PSeries,
    /// As [`TailRule::PSeries`], with the tail estimated by `R(N) t_N` for a
    /// linear `R` chosen so that `t_k - (R(k) t_k - R(k+1) t_(k+1))` is
    /// `O(t_k / k^2)`; the bound covers what that estimate misses.
    PSeriesCorrected,
    /// `t_k = 1/(k+1)^p`; the tail is replaced by `1/((p-1)(N+1/2)^(p-1))`
    /// with error at most `p / (24 (N-1/2)^(p+1))`.
    Midpoint(u32),
}

/// A series `lead + sum_k (+-1)^k t_k` whose term ratio is a rational
/// function of k.
#[derive(Clone, Debug)]
pub struct ClassicalSeries {
    first: Rational,
    /// `|t_{k+1}/t_k| = num(k)/den(k)`, positive for k >= 0.
    num: Poly,
    den: Poly,
    alternating: bool,
    lead: Rational,
    tail: TailRule,
}

impl ClassicalSeries {
    fn new(first: Rational, num: Poly, den: Poly, tail: TailRule) -> Self {
        ClassicalSeries { first, num, den, alternating: false, lead: Rational::new(), tail }
    }

    fn alternating(mut self) -> Self {
        self.alternating = true;
        self
    }

    fn lead(mut self, c: Rational) -> Self {
        self.lead = c;
        self
    }

    pub fn tail_rule(&self) -> &TailRule {
        &self.tail
    }

    /// Exact terms `t_0..t_{n-1}` with their signs.
    pub fn terms(&self, n: usize) -> Vec<Rational> {
        let mut t = self.first.clone();
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let signed = if self.alternating && k % 2 == 1 { -t.clone() } else { t.clone() };
            out.push(signed);
            let kk = Rational::from(k as u64);
            t = t * self.num.eval(&kk) / self.den.eval(&kk);
        }
        out
    }

    /// Checks the hypothesis of the tail rule for every k >= n by expanding
    /// the relevant polynomial around n and requiring nonnegative
    /// coefficients.
    fn certify(&self, n: usize) -> bool {
        let at = Rational::from(n as u64);
        match &self.tail {
            TailRule::Geometric(rho) => {
                let p = Poly(self.den.0.iter().map(|c| Rational::from(c * rho)).collect()).sub(&self.num);
                p.shift(&at).coefficients_nonnegative()
            }
            TailRule::Alternating => self.alternating && self.den.sub(&self.num).shift(&at).coefficients_nonnegative(),
            TailRule::PSeries | TailRule::PSeriesCorrected => {
                if n == 0 || self.alternating {
                    return false;
                }
                let k3 = Poly::k_plus(Rational::new()).pow(3);
                let k13 = Poly::k_plus(Rational::from(1)).pow(3);
                let p = k3.mul(&self.den.pow(2)).sub(&k13.mul(&self.num.pow(2)));
                p.shift(&at).coefficients_nonnegative()
            }
            TailRule::Midpoint(p) => *p >= 2 && n >= 1,
        }
    }

    /// `R(k) = alpha k + beta` and the constant `C` with
    /// `|1 - R(k) + R(k+1) r(k)| <= C / k^2` for all `k >= n`.
    fn tail_corrector(&self, n: usize) -> Option<(Rational, Rational, Rational)> {
        let (num, den) = (&self.num, &self.den);
        let d = den.degree();
        if d < 1 || num.degree() != d || num.coeff(d) != den.coeff(d) {
            return None;
        }
        let k = Poly::k_plus(Rational::new());
        // E = den + alpha A + beta B
        let a = k.mul(den).scale(&Rational::from(-1)).add(&Poly::linear(1, 1).mul(num));
        let b = num.sub(den);
        let det = a.coeff(d) * b.coeff(d - 1) - a.coeff(d - 1) * b.coeff(d);
        if det.cmp0() == std::cmp::Ordering::Equal {
            return None;
        }
        let (r0, r1) = (-den.coeff(d), -den.coeff(d - 1));
        let alpha = (r0.clone() * b.coeff(d - 1) - r1.clone() * b.coeff(d)) / det.clone();
        let beta = (a.coeff(d) * r1 - a.coeff(d - 1) * r0) / det;
        let e = den.add(&a.scale(&alpha)).add(&b.scale(&beta));
        if d < 2 || e.degree() > d - 2 {
            return None;
        }
        let at = Rational::from(n as u64);
        let k2e = k.pow(2).mul(&e);
        let lead = den.coeff(d);
        let mut c = Rational::from((e.coeff(d.saturating_sub(2)).abs() / lead).ceil()) + 1;
        for _ in 0..40 {
            let hi = den.scale(&c).sub(&k2e).shift(&at);
            let lo = den.scale(&c).add(&k2e).shift(&at);
            if hi.coefficients_nonnegative() && lo.coefficients_nonnegative() {
                return Some((alpha, beta, c));
            }
            c *= 2;
        }
        None
    }
}

/// Partial sum of the first `n` terms (plus the integral correction for
/// [`TailRule::Midpoint`]) with a certified bound on the distance to the
/// full sum. The bound includes a rounding allowance.
pub fn classical_sum(series: &ClassicalSeries, n: usize, digits: u32) -> Result<SeriesResult> {
    if n == 0 {
        return Err(Error::Domain("classical_sum needs at least one term".into()));
    }
    if !series.certify(n) {
        return Err(Error::TailNotCertified(format!("{:?} hypothesis fails at N = {n}", series.tail)));
    }
    let corrector = match series.tail {
        TailRule::PSeriesCorrected => Some(
            series
                .tail_corrector(n)
                .ok_or_else(|| Error::TailNotCertified(format!("no first-order tail corrector at N = {n}")))?,
        ),
        _ => None,
    };
    let mut t = to_bigreal(&series.first, digits);
    let mut s = BigReal::zero(digits);
    let mut abs_sum = BigReal::zero(BOUND_DIGITS);
    for k in 0..n {
        if series.alternating && k % 2 == 1 {
            s -= &t;
        } else {
            s += &t;
        }
        abs_sum += &t.abs().with_digits(BOUND_DIGITS);
        let kk = Rational::from(k as u64);
        let r = series.num.eval(&kk) / series.den.eval(&kk);
        t = &t * &r;
    }
    let t_n = t.abs().with_digits(BOUND_DIGITS);
    let nn = n as i64;
    let tail = match &series.tail {
        TailRule::Geometric(rho) => &t_n / &to_bigreal(&(Rational::from(1) - rho), BOUND_DIGITS),
        TailRule::Alternating => t_n,
        TailRule::PSeries => &t_n * (1 + 2 * nn),
        TailRule::PSeriesCorrected => {
            let (alpha, beta, c) = corrector.expect("computed above");
            let r_n = alpha * Rational::from(nn) + beta;
            s += &(&t * &r_n);
            // C t_N (1/N^2 + 2/(5N))
            let nb = BigReal::from_int(nn, BOUND_DIGITS);
            let w = &nb.powi(-2) + &(&(&nb.recip() * 2) / &BigReal::from_int(5, BOUND_DIGITS));
            &(&t_n * &to_bigreal(&c, BOUND_DIGITS)) * &w
        }
        TailRule::Midpoint(p) => {
            let p = *p as i32;
            let mid = to_bigreal(&(rat(2 * nn + 1, 2)), digits);
            s += &(&mid.powi(1 - p) / &BigReal::from_int((p - 1) as i64, digits));
            let lo = to_bigreal(&rat(2 * nn - 1, 2), BOUND_DIGITS);
            &BigReal::from_int(p as i64, BOUND_DIGITS) / &(&lo.powi(p + 1) * 24)
        }
    };
    let rounding = &(&abs_sum * (3 * (nn + 1))) * &to_bigreal(&ten_pow_neg(digits), BOUND_DIGITS);
    s += &to_bigreal(&series.lead, digits);
    Ok(SeriesResult { value: s, terms_used: n, bound: ErrorBound::truncation(&tail).combine(&ErrorBound::rounding(&rounding)) })
}

type Builder = fn(&ParamPoint) -> Result<ClassicalSeries>;
type Target = fn(&ParamPoint, u32) -> Result<BigReal>;

/// One classical formula: its series, closed form and default term count.
#[derive(Clone)]
pub struct ClassicalSpec {
    pub id: &'static str,
    pub anchor: &'static str,
    pub params: &'static [&'static str],
    /// Term count used by the registry record and the desk-scale checks.
    pub default_terms: usize,
    build: Builder,
    target: Target,
}

impl fmt::Debug for ClassicalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClassicalSpec").field("id", &self.id).field("default_terms", &self.default_terms).finish()
    }
}

impl ClassicalSpec {
    pub fn series(&self, point: &ParamPoint) -> Result<ClassicalSeries> {
        (self.build)(point)
    }

    pub fn target(&self, point: &ParamPoint, digits: u32) -> Result<BigReal> {
        (self.target)(point, digits)
    }

    /// Sum of `n` terms with tail bound, at a parameter point.
    pub fn sum(&self, point: &ParamPoint, n: usize, digits: u32) -> Result<SeriesResult> {
        classical_sum(&self.series(point)?, n, digits)
    }
}

fn unit_param(p: &ParamPoint, name: &str) -> Result<Rational> {
    let v = p.get(name)?.clone();
    if v.cmp0() != std::cmp::Ordering::Greater || v >= 1 {
        return Err(Error::Domain(format!("{name} = {v} must lie in (0, 1)")));
    }
    Ok(v)
}

fn pi(d: u32) -> BigReal {
    BigReal::pi(d)
}

fn sin_pi(x: &Rational, d: u32) -> BigReal {
    (&pi(d) * &to_bigreal(x, d)).sin()
}

/// `(k + 1)^p / (k + 2)^p`: consecutive terms of `sum 1/k^p`.
fn zeta_series(p: u32) -> ClassicalSeries {
    ClassicalSeries::new(Rational::from(1), Poly::linear(1, 1).pow(p), Poly::linear(1, 2).pow(p), TailRule::Midpoint(p))
}

/// `(k^2 + k)(x + y - x^2 - y^2) + x y (1 - x)(1 - y)`
fn wei_a_bracket(x: &Rational, y: &Rational) -> Poly {
    let one = Rational::from(1);
    let c = x.clone() + y - x.clone() * x - y.clone() * y;
    let d = x.clone() * y * (one.clone() - x) * (one - y);
    Poly(vec![d, c.clone(), c])
}

/// `(k^2 + 2k)(2 - 2x - 2y + x^2 + y^2) + 1 - x y (2 - x)(2 - y)`
fn wei_b_bracket(x: &Rational, y: &Rational) -> Poly {
    let one = Rational::from(1);
    let two = Rational::from(2);
    let c: Rational = two.clone() - x.clone() * 2 - y.clone() * 2 + x.clone() * x + y.clone() * y;
    let d = one - x.clone() * y * (two.clone() - x) * (two - y);
    Poly(vec![d, c.clone() * 2, c])
}

fn build_wei_a(p: &ParamPoint) -> Result<ClassicalSeries> {
    let (x, y) = (unit_param(p, "x")?, unit_param(p, "y")?);
    let one = Rational::from(1);
    let q = wei_a_bracket(&x, &y);
    let num = Poly::product(&[
        Poly::k_plus(x.clone()),
        Poly::k_plus(one.clone() - &x),
        Poly::k_plus(y.clone()),
        Poly::k_plus(one.clone() - &y),
        q.shift(&one),
    ]);
    let den = Poly::linear(1, 1).pow(2).mul(&Poly::linear(1, 2).pow(2)).mul(&q);
    Ok(ClassicalSeries::new(q.eval(&Rational::new()), num, den, TailRule::PSeries))
}

fn build_wei_b(p: &ParamPoint) -> Result<ClassicalSeries> {
    let (x, y) = (unit_param(p, "x")?, unit_param(p, "y")?);
    let one = Rational::from(1);
    let three = Rational::from(3);
    let q = wei_b_bracket(&x, &y);
    let num = Poly::linear(1, 1).pow(4).mul(&q.shift(&one));
    let den = Poly::product(&[
        Poly::k_plus(one.clone() + &x),
        Poly::k_plus(three.clone() - &x),
        Poly::k_plus(one.clone() + &y),
        Poly::k_plus(three - &y),
        q.clone(),
    ]);
    let two = Rational::from(2);
    let first = q.eval(&Rational::new())
        / (x.clone() * (one.clone() - &x) * (two.clone() - &x) * &y * (one.clone() - &y) * (two - &y));
    let lead = one.clone() / ((one.clone() - &x) * (one - &y));
    Ok(ClassicalSeries::new(first, num, den, TailRule::PSeriesCorrected).lead(lead))
}

/// `sum (1/2)_k^4/(k!^2 (k+1)!^2) (k^2 + k + 1/8)`
fn build_guillera_b(_: &ParamPoint) -> Result<ClassicalSeries> {
    let half = rat(1, 2);
    let q = Poly(vec![rat(1, 8), rat(1, 1), rat(1, 1)]);
    let num = Poly::k_plus(half).pow(4).mul(&q.shift(&Rational::from(1)));
    let den = Poly::linear(1, 1).pow(2).mul(&Poly::linear(1, 2).pow(2)).mul(&q);
    Ok(ClassicalSeries::new(rat(1, 8), num, den, TailRule::PSeries))
}

pub fn classical_specs() -> Vec<ClassicalSpec> {
    let none: &'static [&'static str] = &[];
    vec![
        ClassicalSpec {
            id: "pi-a",
            anchor: "sum_{k>=1} 1/k^2 = pi^2/6",
            params: none,
            default_terms: 100_000,
            build: |_| Ok(zeta_series(2)),
            target: |_, d| Ok(pi(d).powi(2) / 6),
        },
        ClassicalSpec {
            id: "pi-b",
            anchor: "sum (-1)^k/(2k+1)^3 = pi^3/32",
            params: none,
            default_terms: 10_000,
            build: |_| {
                Ok(ClassicalSeries::new(Rational::from(1), Poly::linear(2, 1).pow(3), Poly::linear(2, 3).pow(3), TailRule::Alternating)
                    .alternating())
            },
            target: |_, d| Ok(pi(d).powi(3) / 32),
        },
        ClassicalSpec {
            id: "pi-c",
            anchor: "sum_{k>=1} 1/k^4 = pi^4/90",
            params: none,
            default_terms: 10_000,
            build: |_| Ok(zeta_series(4)),
            target: |_, d| Ok(pi(d).powi(4) / 90),
        },
        ClassicalSpec {
            id: "weisstein-a",
            anchor: "sum k!/((3/2)_k 2^k) = pi/2",
            params: none,
            default_terms: 150,
            build: |_| Ok(ClassicalSeries::new(Rational::from(1), Poly::linear(1, 1), Poly::linear(2, 3), TailRule::Geometric(rat(1, 2)))),
            target: |_, d| Ok(pi(d) / 2),
        },
        ClassicalSpec {
            id: "weisstein-b",
            anchor: "sum k!/((3/2)_k 4^k) = 2 pi/(3 sqrt 3)",
            params: none,
            default_terms: 200,
            build: |_| Ok(ClassicalSeries::new(Rational::from(1), Poly::linear(1, 1), Poly::linear(4, 6), TailRule::Geometric(rat(1, 4)))),
            target: |_, d| Ok(&(pi(d) * 2) / &(BigReal::from_int(3, d).sqrt() * 3)),
        },
        ClassicalSpec {
            id: "guillera-a",
            anchor: "sum k!^3 (3k+2)/((3/2)_k^3 4^k) = pi^2/4",
            params: none,
            default_terms: 200,
            build: |_| {
                let num = Poly::linear(2, 2).mul(&Poly::linear(1, 1).pow(2)).mul(&Poly::linear(3, 5));
                let den = Poly::linear(2, 3).pow(3).mul(&Poly::linear(3, 2));
                Ok(ClassicalSeries::new(Rational::from(2), num, den, TailRule::Geometric(rat(1, 4))))
            },
            target: |_, d| Ok(pi(d).powi(2) / 4),
        },
        ClassicalSpec {
            id: "wei-a",
            anchor: "sum (x)_k (1-x)_k (y)_k (1-y)_k/(k!^2 (k+1)!^2) {(k^2+k)(x+y-x^2-y^2) + xy(1-x)(1-y)} = sin(pi x) sin(pi y)/pi^2",
            params: &["x", "y"],
            default_terms: 100_000,
            build: build_wei_a,
            target: |p, d| {
                let (x, y) = (unit_param(p, "x")?, unit_param(p, "y")?);
                Ok(&(&sin_pi(&x, d) * &sin_pi(&y, d)) / &pi(d).powi(2))
            },
        },
        ClassicalSpec {
            id: "wei-b",
            anchor: "1/((1-x)(1-y)) + sum k!^4/((x)_{k+1} (1-x)_{k+2} (y)_{k+1} (1-y)_{k+2}) {...} = pi^2/(sin(pi x) sin(pi y))",
            params: &["x", "y"],
            default_terms: 100_000,
            build: build_wei_b,
            target: |p, d| {
                let (x, y) = (unit_param(p, "x")?, unit_param(p, "y")?);
                Ok(&pi(d).powi(2) / &(&sin_pi(&x, d) * &sin_pi(&y, d)))
            },
        },
        ClassicalSpec {
            id: "guillera-b",
            anchor: "sum (1/2)_k^4/(k!^2 (k+1)!^2) (k^2+k+1/8) = 2/pi^2",
            params: none,
            default_terms: 100_000,
            build: build_guillera_b,
            target: |_, d| Ok(&BigReal::from_int(2, d) / &pi(d).powi(2)),
        },
        ClassicalSpec {
            id: "ramanujan-a",
            anchor: "sum (6k+1)(1/2)_k^3/(k!^3 4^k) = 4/pi",
            params: none,
            default_terms: 200,
            build: |_| {
                let num = Poly::linear(6, 7).mul(&Poly::linear(2, 1).pow(3));
                let den = Poly::linear(6, 1).mul(&Poly::linear(1, 1).pow(3)).mul(&Poly::constant(Rational::from(32)));
                Ok(ClassicalSeries::new(Rational::from(1), num, den, TailRule::Geometric(rat(1, 4))))
            },
            target: |_, d| Ok(&BigReal::from_int(4, d) / &pi(d)),
        },
        ClassicalSpec {
            id: "ramanujan-b",
            anchor: "sum (-1)^k (6k+1)(1/2)_k^3/(k!^3 8^k) = 2 sqrt(2)/pi",
            params: none,
            default_terms: 200,
            build: |_| {
                let num = Poly::linear(6, 7).mul(&Poly::linear(2, 1).pow(3));
                let den = Poly::linear(6, 1).mul(&Poly::linear(1, 1).pow(3)).mul(&Poly::constant(Rational::from(64)));
                Ok(ClassicalSeries::new(Rational::from(1), num, den, TailRule::Geometric(rat(1, 8))).alternating())
            },
            target: |_, d| Ok(&(BigReal::from_int(2, d).sqrt() * 2) / &pi(d)),
        },
    ]
}

pub fn classical_spec(id: &str) -> Result<ClassicalSpec> {
    classical_specs().into_iter().find(|s| s.id == id).ok_or_else(|| Error::UnknownIdentity(id.to_string()))
}

/// Registry records: the left side is the certified partial sum with the
/// spec's default term count, the right side the closed form.
pub(crate) fn classical_records() -> Vec<IdentityRecord> {
    classical_specs()
        .into_iter()
        .map(|spec| {
            let params: Vec<ParamSpec> = spec.params.iter().map(|n| ParamSpec::unit(n)).collect();
            let points = if spec.params.is_empty() {
                Vec::new()
            } else {
                vec![
                    ParamPoint::from_fractions(&[("x", 1, 2), ("y", 1, 2)]),
                    ParamPoint::from_fractions(&[("x", 1, 3), ("y", 1, 4)]),
                ]
            };
            let (l, r) = (spec.clone(), spec.clone());
            IdentityRecord::new(
                spec.id,
                Family::Classical,
                spec.anchor,
                params,
                eval(move |p, d| l.sum(p, l.default_terms, d)),
                eval(move |p, d| Ok(SeriesResult::exact(r.target(p, d)?))),
            )
            .points(points)
        })
        .collect()
}

/// Which limit of the corollary sums to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SineVariant {
    /// `prod sin(pi x_i)/pi^m`
    Product,
    /// `pi^m / prod sin(pi x_i)`
    Reciprocal,
}

/// The classical series of either variant for `m = xs.len()`.
pub fn sine_product_series(xs: &[Rational], variant: SineVariant) -> Result<ClassicalSeries> {
    if xs.is_empty() {
        return Err(Error::Domain("need at least one x".into()));
    }
    let one = Rational::from(1);
    for (i, x) in xs.iter().enumerate() {
        if x.cmp0() != std::cmp::Ordering::Greater || *x >= 1 {
            return Err(Error::Domain(format!("x_{} = {x} must lie in (0, 1)", i + 1)));
        }
    }
    let m = xs.len() as u32;
    Ok(match variant {
        SineVariant::Product => {
            // prod (k + x_i)(k + 1 - x_i) - k^m (k + 1)^m
            let pairs: Vec<Poly> = xs.iter().map(|x| Poly::k_plus(x.clone()).mul(&Poly::k_plus(one.clone() - x))).collect();
            let b = Poly::product(&pairs).sub(&Poly::k_plus(Rational::new()).pow(m).mul(&Poly::linear(1, 1).pow(m)));
            let num = Poly::product(&pairs).mul(&b.shift(&one));
            let den = Poly::linear(1, 1).pow(m).mul(&Poly::linear(1, 2).pow(m)).mul(&b);
            ClassicalSeries::new(b.eval(&Rational::new()), num, den, TailRule::PSeries)
        }
        SineVariant::Reciprocal => {
            // (k + 1)^(2m) - prod (k + x_i)(k + 2 - x_i)
            let two = Rational::from(2);
            let pairs: Vec<Poly> = xs.iter().map(|x| Poly::k_plus(x.clone()).mul(&Poly::k_plus(two.clone() - x))).collect();
            let b = Poly::linear(1, 1).pow(2 * m).sub(&Poly::product(&pairs));
            let shifted: Vec<Poly> = xs
                .iter()
                .map(|x| Poly::k_plus(one.clone() + x).mul(&Poly::k_plus(Rational::from(3) - x)))
                .collect();
            let num = Poly::linear(1, 1).pow(2 * m).mul(&b.shift(&one));
            let den = Poly::product(&shifted).mul(&b);
            let base = xs.iter().fold(one.clone(), |acc, x| acc * x.clone() * (one.clone() - x) * (two.clone() - x));
            let lead = xs.iter().fold(one.clone(), |acc, x| acc / (one.clone() - x));
            ClassicalSeries::new(b.eval(&Rational::new()) / base, num, den, TailRule::PSeriesCorrected).lead(lead)
        }
    })
}

pub fn sine_product_target(xs: &[Rational], variant: SineVariant, digits: u32) -> BigReal {
    let mut p = BigReal::one(digits);
    for x in xs {
        p = &p * &sin_pi(x, digits);
    }
    let pim = pi(digits).powi(xs.len() as i32);
    match variant {
        SineVariant::Product => &p / &pim,
        SineVariant::Reciprocal => &pim / &p,
    }
}

/// Checks the q -> 1 limit of a corollary: `terms` terms of the classical
/// series with certified tail against the sine-product closed form.
pub fn sine_product_limit(xs: &[Rational], variant: SineVariant, terms: usize, digits: u32) -> Result<VerificationReport> {
    let series = sine_product_series(xs, variant)?;
    let target_xs = xs.to_vec();
    let record = IdentityRecord::new(
        match variant {
            SineVariant::Product => "sine-product-limit",
            SineVariant::Reciprocal => "sine-reciprocal-limit",
        },
        Family::Classical,
        "q -> 1 limit of a corollary sum",
        Vec::new(),
        eval(move |_, d| classical_sum(&series, terms, d)),
        eval(move |_, d| Ok(SeriesResult::exact(sine_product_target(&target_xs, variant, d)))),
    );
    let mut point = ParamPoint::new();
    for (i, x) in xs.iter().enumerate() {
        point.set(&format!("x{}", i + 1), x.clone());
    }
    verify_unchecked(&record, &point, digits, &ten_pow_neg(digits.saturating_sub(10).max(1)))
}

/// Normalization exponent shipped for each q-main identity.
pub fn default_exponent(id: &str) -> Option<u32> {
    Some(match id {
        "sun" => 3,
        "thm-b" => 2,
        "thm-c" | "thm-d" => 1,
        "thm-e" | "q-ramanujan-a" | "q-ramanujan-b" => 0,
        _ => return None,
    })
}

/// Classical value of `lim (1-q)^a LHS(q)` for the shipped exponent.
pub fn limit_target(id: &str, digits: u32) -> Option<BigReal> {
    let p = pi(digits);
    Some(match id {
        "sun" => p.powi(3) / 16,
        "thm-b" => p.powi(2) / 16,
        "thm-c" => p / 2,
        "thm-d" => &(p * 2) / &(BigReal::from_int(3, digits).sqrt() * 3),
        "thm-e" => p.powi(2) / 8,
        "q-ramanujan-a" => &BigReal::from_int(4, digits) / &p,
        "q-ramanujan-b" => &(BigReal::from_int(2, digits).sqrt() * 2) / &p,
        _ => return None,
    })
}

/// Richardson extrapolation of `(1 - q)^a LHS(q)` along
/// `q_j = 1 - h0 2^-j`, `j = j0..=j1`.
#[derive(Clone, Debug)]
pub struct LimitProbe {
    pub id: String,
    pub exponent: u32,
    pub h0: Rational,
    pub j0: u32,
    pub j1: u32,
    pub order: usize,
}

impl LimitProbe {
    /// Default levels `4..=12`, `h0 = 1/16`, order 6.
    pub fn new(id: &str, exponent: u32) -> Self {
        LimitProbe { id: id.to_string(), exponent, h0: rat(1, 16), j0: 4, j1: 12, order: 6 }
    }

    /// Probe with the shipped exponent.
    pub fn shipped(id: &str) -> Result<Self> {
        let a = default_exponent(id).ok_or_else(|| Error::Domain(format!("no shipped normalization exponent for `{id}`")))?;
        Ok(LimitProbe::new(id, a))
    }

    pub fn levels(mut self, j0: u32, j1: u32) -> Self {
        self.j0 = j0;
        self.j1 = j1;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.order == 0 || self.j1 < self.j0 || ((self.j1 - self.j0) as usize) < self.order + 2 {
            return Err(Error::Domain(format!(
                "levels {}..{} too few for extrapolation order {} (need j1 - j0 >= order + 2)",
                self.j0, self.j1, self.order
            )));
        }
        if self.h0.cmp0() != std::cmp::Ordering::Greater || self.h0 >= 1 {
            return Err(Error::Domain(format!("h0 = {} must lie in (0, 1)", self.h0)));
        }
        Ok(())
    }

    pub fn q_at(&self, j: u32) -> Rational {
        Rational::from(1) - self.h0.clone() / Rational::from(rug::Integer::from(1) << j)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LimitFlag {
    Stable,
    /// The extrapolant vanishes relative to the samples: the exponent is
    /// too large.
    Zero,
}

impl fmt::Display for LimitFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LimitFlag::Stable => "stable",
            LimitFlag::Zero => "zero",
        })
    }
}

#[derive(Clone, Debug)]
pub struct LimitReport {
    pub id: String,
    pub exponent: u32,
    pub j0: u32,
    pub j1: u32,
    pub order: usize,
    pub value: BigReal,
    /// `|best_j1 - best_(j1-1)|`, the last-two-level difference.
    pub diagnostic: BigReal,
    /// Differences of successive best extrapolants, one per level after j0.
    pub diagnostics: Vec<BigReal>,
    /// `(q_j, (1 - q_j)^a LHS(q_j))`
    pub samples: Vec<(Rational, BigReal)>,
    pub flag: LimitFlag,
    pub target: Option<BigReal>,
    pub wall_ms: u128,
}

impl LimitReport {
    /// `|value - target|` when a target is known.
    pub fn error(&self) -> Option<BigReal> {
        self.target.as_ref().map(|t| (&self.value - t).abs())
    }
}

/// Richardson table for samples at `h_j = h0 2^-j`; returns the best
/// extrapolant per level, `T(j, min(order, j - j0))`.
pub fn richardson(samples: &[BigReal], order: usize) -> Vec<BigReal> {
    let mut prev: Vec<BigReal> = Vec::new();
    let mut best = Vec::with_capacity(samples.len());
    for (j, s) in samples.iter().enumerate() {
        let mut row = vec![s.clone()];
        for m in 1..=order.min(j) {
            let denom = (1i64 << m) - 1;
            let diff = &row[m - 1] - &prev[m - 1];
            let next = &row[m - 1] + &(&diff / &BigReal::from_int(denom, s.digits()));
            row.push(next);
        }
        best.push(row.last().cloned().unwrap_or_else(|| s.clone()));
        prev = row;
    }
    best
}

/// Evaluates the probe and extrapolates. Fails with [`Error::Instability`]
/// when the differences of successive extrapolants grow over the last three
/// levels.
pub fn q_to_1_limit(registry: &Registry, probe: &LimitProbe, digits: u32) -> Result<LimitReport> {
    probe.validate()?;
    let record = registry.get(&probe.id)?;
    if !record.q_only() {
        return Err(Error::Domain(format!("`{}` has parameters besides q; limits are defined for q-only identities", probe.id)));
    }
    let start = Instant::now();
    let levels: Vec<u32> = (probe.j0..=probe.j1).collect();
    let samples: Vec<(Rational, BigReal)> = levels
        .par_iter()
        .map(|&j| {
            let q = probe.q_at(j);
            let lhs = record.evaluate(Side::Lhs, &ParamPoint::new().with("q", q.clone()), digits)?;
            let h = to_bigreal(&(Rational::from(1) - &q), digits);
            Ok((q, &lhs.value * &h.powi(probe.exponent as i32)))
        })
        .collect::<Result<_>>()?;
    let values: Vec<BigReal> = samples.iter().map(|(_, v)| v.clone()).collect();
    let best = richardson(&values, probe.order);
    let diagnostics: Vec<BigReal> = best.windows(2).map(|w| (&w[1] - &w[0]).abs()).collect();
    let value = best.last().cloned().expect("at least one level");
    let diagnostic = diagnostics.last().cloned().unwrap_or_else(|| BigReal::zero(digits));
    let n = diagnostics.len();
    if n >= 3 && diagnostics[n - 1] > diagnostics[n - 2] && diagnostics[n - 2] > diagnostics[n - 3] {
        return Err(Error::Instability(format!(
            "`{}` with exponent {}: extrapolant differences grow over the last three levels ({}, {}, {})",
            probe.id,
            probe.exponent,
            diagnostics[n - 3].to_decimal(3),
            diagnostics[n - 2].to_decimal(3),
            diagnostics[n - 1].to_decimal(3)
        )));
    }
    let scale = values.iter().fold(BigReal::zero(BOUND_DIGITS), |acc, v| BigReal::max_abs(&acc, v));
    let zero_level = &scale * &to_bigreal(&ten_pow_neg(8), BOUND_DIGITS);
    let flag = if value.abs() <= zero_level { LimitFlag::Zero } else { LimitFlag::Stable };
    let target = if default_exponent(&probe.id) == Some(probe.exponent) { limit_target(&probe.id, digits) } else { None };
    Ok(LimitReport {
        id: probe.id.clone(),
        exponent: probe.exponent,
        j0: probe.j0,
        j1: probe.j1,
        order: probe.order,
        value,
        diagnostic,
        diagnostics,
        samples,
        flag,
        target,
        wall_ms: start.elapsed().as_millis(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::Scalar;
    use crate::catalog::build::q_points;

    fn close(a: &BigReal, b: &BigReal, tol: f64) -> bool {
        (a - b).abs() < BigReal::from_f64(tol, 40)
    }

    #[test]
    fn poly_shift_and_eval() {
        let p = Poly::linear(2, 3).mul(&Poly::linear(1, -1));
        let s = p.shift(&rat(5, 1));
        for k in 0..5 {
            let k = Rational::from(k);
            assert_eq!(s.eval(&k), p.eval(&(k.clone() + 5)));
        }
    }

    #[test]
    fn alternating_cube_series_small_n() {
        let spec = classical_spec("pi-b").unwrap();
        let s = spec.sum(&ParamPoint::new(), 10, 30).unwrap();
        let target = spec.target(&ParamPoint::new(), 30).unwrap();
        let err = (&s.value - &target).abs();
        assert!(err <= *s.bound.magnitude());
        assert!((s.bound.to_f64() - 1.0 / 9261.0).abs() < 1e-9);
    }

    #[test]
    fn weisstein_a_converges() {
        let spec = classical_spec("weisstein-a").unwrap();
        let s = spec.sum(&ParamPoint::new(), 120, 40).unwrap();
        assert!(close(&s.value, &(pi(40) / 2), 1e-30));
    }

    #[test]
    fn geometric_terms_are_exact() {
        // guillera-a: t_k = k!^3 (3k+2)/((3/2)_k^3 4^k)
        let t = classical_spec("guillera-a").unwrap().series(&ParamPoint::new()).unwrap().terms(5);
        let mut fact = Rational::from(1);
        let mut poch = Rational::from(1);
        for (k, tk) in t.iter().enumerate() {
            let expect = fact.clone().pow_u(3) * Rational::from(3 * k as i64 + 2) / (poch.clone().pow_u(3) * Rational::from(4).pow_u(k as u32));
            assert_eq!(*tk, expect);
            fact *= Rational::from(k as i64 + 1);
            poch *= rat(2 * k as i64 + 3, 2);
        }
    }

    #[test]
    fn wei_a_at_half_is_half_of_guillera_b() {
        let p = ParamPoint::from_fractions(&[("x", 1, 2), ("y", 1, 2)]);
        let a = classical_spec("wei-a").unwrap().series(&p).unwrap().terms(30);
        let g = classical_spec("guillera-b").unwrap().series(&ParamPoint::new()).unwrap().terms(30);
        for (x, y) in a.iter().zip(&g) {
            assert_eq!(x.clone() * 2, *y);
        }
    }

    #[test]
    fn wei_forms_match_sine_product_forms() {
        let p = ParamPoint::from_fractions(&[("x", 1, 3), ("y", 1, 4)]);
        let xs = [rat(1, 3), rat(1, 4)];
        let a = classical_spec("wei-a").unwrap().series(&p).unwrap().terms(20);
        let s = sine_product_series(&xs, SineVariant::Product).unwrap().terms(20);
        assert_eq!(a, s);
        let b = classical_spec("wei-b").unwrap().series(&p).unwrap();
        let r = sine_product_series(&xs, SineVariant::Reciprocal).unwrap();
        assert_eq!(b.terms(20), r.terms(20));
        assert_eq!(b.lead, r.lead);
    }

    #[test]
    fn sine_product_single_factor() {
        let rep = sine_product_limit(&[rat(1, 2)], SineVariant::Product, 2000, 30).unwrap();
        assert!(rep.pass);
        assert!(close(rep.rhs.as_ref().unwrap(), &pi(40).recip(), 1e-30));
        let rep = sine_product_limit(&[rat(1, 3), rat(1, 4)], SineVariant::Reciprocal, 2000, 30).unwrap();
        assert!(rep.pass);
    }

    #[test]
    fn corrected_tail_on_basel() {
        // sum 1/(k+1)^2 through the generic corrector: R(k) = k + 1/2
        let s = ClassicalSeries::new(Rational::from(1), Poly::linear(1, 1).pow(2), Poly::linear(1, 2).pow(2), TailRule::PSeriesCorrected);
        let (alpha, beta, _) = s.tail_corrector(100).unwrap();
        assert_eq!((alpha, beta), (Rational::from(1), rat(3, 2)));
        let r = classical_sum(&s, 1000, 40).unwrap();
        let err = (&r.value - &(pi(40).powi(2) / 6)).abs();
        assert!(err <= *r.bound.magnitude());
        assert!(r.bound.to_f64() < 1e-8);
    }

    #[test]
    fn wei_b_reaches_desk_accuracy() {
        let spec = classical_spec("wei-b").unwrap();
        let p = ParamPoint::from_fractions(&[("x", 1, 3), ("y", 1, 4)]);
        let r = spec.sum(&p, 2000, 30).unwrap();
        let err = (&r.value - &spec.target(&p, 30).unwrap()).abs();
        assert!(err <= *r.bound.magnitude());
        assert!(r.bound.to_f64() < 1e-5);
    }

    #[test]
    fn tail_certificate_fails_when_violated() {
        // ratio 1/2 series checked against rho = 1/4
        let s = ClassicalSeries::new(Rational::from(1), Poly::constant(rat(1, 2)), Poly::constant(Rational::from(1)), TailRule::Geometric(rat(1, 4)));
        assert!(matches!(classical_sum(&s, 10, 30), Err(Error::TailNotCertified(_))));
    }

    #[test]
    fn richardson_removes_polynomial_error() {
        // f(h) = 3 + 2h - h^2 + h^3 sampled at h = 2^-j
        let samples: Vec<BigReal> = (0..8)
            .map(|j| {
                let h = BigReal::from_rational(&rat(1, 1 << j), 40);
                &(&(&BigReal::from_int(3, 40) + &(&h * 2)) - &h.powi(2)) + &h.powi(3)
            })
            .collect();
        let best = richardson(&samples, 4);
        assert!(close(best.last().unwrap(), &BigReal::from_int(3, 40), 1e-30));
    }

    /// `(1 - q)^a t_k(q)` at q extremely close to 1 against the classical term.
    #[test]
    fn term_limits_match_classical_terms() {
        let h = ten_pow_neg(15);
        let q = Rational::from(1) - &h;
        let half = |k: usize| (0..k).fold(Rational::from(1), |acc, i| acc * rat(2 * i as i64 + 1, 2));
        let three_half = |k: usize| (0..k).fold(Rational::from(1), |acc, i| acc * rat(2 * i as i64 + 3, 2));
        let fact = |k: usize| (1..=k).fold(Rational::from(1), |acc, i| acc * Rational::from(i as u64));
        let pow = |b: i64, k: usize| Rational::from(b).pow_u(k as u32);
        type Case = (&'static str, u32, Box<dyn Fn(usize) -> Rational>);
        let cases: Vec<Case> = vec![
            ("sun", 3, Box::new(|k| rat(if k % 2 == 0 { 2 } else { -2 }, 1) / Rational::from(2 * k as i64 + 1).pow_u(3))),
            ("thm-b", 2, Box::new(|k| rat(1, 2) / Rational::from(2 * k as i64 + 1).pow_u(2))),
            ("thm-c", 1, Box::new(move |k| fact(k) / (three_half(k) * pow(2, k)))),
            ("thm-d", 1, Box::new(move |k| fact(k) / (three_half(k) * pow(4, k)))),
            ("thm-e", 0, Box::new(move |k| fact(k).pow_u(3) * Rational::from(3 * k as i64 + 2) / (three_half(k).pow_u(3) * pow(4, k) * 2))),
            ("q-ramanujan-a", 0, Box::new(move |k| Rational::from(6 * k as i64 + 1) * half(k).pow_u(3) / (fact(k).pow_u(3) * pow(4, k)))),
            (
                "q-ramanujan-b",
                0,
                Box::new(move |k| {
                    let s = if k % 2 == 0 { 1 } else { -1 };
                    Rational::from(s * (6 * k as i64 + 1)) * half(k).pow_u(3) / (fact(k).pow_u(3) * pow(8, k))
                }),
            ),
        ];
        for (id, a, classical) in cases {
            let series = crate::catalog::qmain_series(id, &q).unwrap();
            assert_eq!(default_exponent(id), Some(a));
            let terms = series.terms(6).unwrap();
            for (k, t) in terms.iter().enumerate() {
                let scaled = t.clone() * h.clone().pow_u(a);
                let diff = (scaled - classical(k)).to_f64().abs();
                assert!(diff < 1e-10, "{id} term {k}: {diff}");
            }
        }
    }

    #[test]
    fn probe_validation() {
        assert!(LimitProbe::new("sun", 3).levels(4, 8).validate().is_err());
        assert!(LimitProbe::new("sun", 3).validate().is_ok());
        assert_eq!(LimitProbe::new("sun", 3).q_at(4), rat(255, 256));
        assert!(LimitProbe::shipped("gr-cubic").is_err());
        let _ = q_points();
    }

    #[test]
    fn fast_limit_thm_d() {
        let reg = Registry::standard();
        let rep = q_to_1_limit(&reg, &LimitProbe::shipped("thm-d").unwrap(), 30).unwrap();
        assert_eq!(rep.flag, LimitFlag::Stable);
        assert!(rep.error().unwrap() < BigReal::from_f64(1e-6, 30), "{}", rep.value);
    }
}
