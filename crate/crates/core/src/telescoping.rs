//! The telescoping family `tau_k = (q x; q)_k / (q y; q)_k`, the summation
//! theorem it yields (finite and infinite forms) and the two corollaries with
//! their named specializations.

use std::cmp::Ordering;

use crate::catalog::build::{eval, exact, from_exact, prod};
use crate::catalog::{verify_unchecked, Family, IdentityRecord, ParamDomain, ParamPoint, ParamSpec, VerificationReport};
use crate::error::{Error, Result};
use crate::precision::{ten_pow_neg, to_bigreal, BigReal, Rational, Scalar};
use crate::qcore::{check_unit_interval_rational, qpoch_multi_exact, HyperSeries, SeriesResult, SumOptions, TermRatio, WeightedSeries};

fn one() -> Rational {
    Rational::from(1)
}

fn is_zero(r: &Rational) -> bool {
    r.cmp0() == Ordering::Equal
}

/// `Some(j)` if `x = q^j` for an integer `j` (`0 < q < 1`).
pub fn power_of_q(x: &Rational, q: &Rational) -> Option<i32> {
    if x.cmp0() != Ordering::Greater {
        return None;
    }
    let lx = to_bigreal(x, 30).ln().to_f64();
    let lq = to_bigreal(q, 30).ln().to_f64();
    let guess = (lx / lq).round();
    if !guess.is_finite() || guess.abs() > 1e6 {
        return None;
    }
    let guess = guess as i32;
    (guess - 1..=guess + 1).find(|&j| q.pow_i(j) == *x)
}

/// `prod (1 - t c_i)` as coefficients in `t`, constant term first.
fn linear_product(cs: &[Rational]) -> Vec<Rational> {
    let mut poly = vec![one()];
    for c in cs {
        let mut next = vec![Rational::new(); poly.len() + 1];
        for (j, p) in poly.iter().enumerate() {
            next[j] += p;
            next[j + 1] -= Rational::from(p * c);
        }
        poly = next;
    }
    poly
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    (0..a.len().max(b.len()))
        .map(|j| {
            let x = a.get(j).cloned().unwrap_or_default();
            let y = b.get(j).cloned().unwrap_or_default();
            x - y
        })
        .collect()
}

/// Drops the constant term, which must vanish.
fn without_constant(poly: Vec<Rational>) -> Vec<Rational> {
    debug_assert!(is_zero(&poly[0]));
    poly.into_iter().skip(1).collect()
}

/// Parameters `x_1..x_s`, `y_1..y_s` and base `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct TelescopeSpec {
    xs: Vec<Rational>,
    ys: Vec<Rational>,
    q: Rational,
}

impl TelescopeSpec {
    /// Requires `|xs| = |ys| >= 1`, `0 < q < 1` and no `y_i = q^(-m-1)`.
    pub fn new(xs: Vec<Rational>, ys: Vec<Rational>, q: Rational) -> Result<Self> {
        if xs.is_empty() || xs.len() != ys.len() {
            return Err(Error::Domain(format!("need s >= 1 values of each of x and y, got {} and {}", xs.len(), ys.len())));
        }
        check_unit_interval_rational(&q)?;
        for (i, y) in ys.iter().enumerate() {
            if let Some(j) = power_of_q(y, &q) {
                if j <= -1 {
                    return Err(Error::ZeroDenominator {
                        what: format!("y_{} = q^{j} makes (q y_{}; q)_k vanish", i + 1, i + 1),
                        index: (-j) as usize,
                    });
                }
            }
        }
        Ok(TelescopeSpec { xs, ys, q })
    }

    pub fn s(&self) -> usize {
        self.xs.len()
    }

    pub fn xs(&self) -> &[Rational] {
        &self.xs
    }

    pub fn ys(&self) -> &[Rational] {
        &self.ys
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    fn times_q(&self, v: &[Rational]) -> Vec<Rational> {
        v.iter().map(|x| Rational::from(x * &self.q)).collect()
    }

    fn one_minus_product(v: &[Rational]) -> Rational {
        v.iter().fold(one(), |acc, x| acc * (one() - x))
    }

    /// `(x; q)_k / (q y; q)_k`
    fn coefficient(&self, k: usize) -> Rational {
        qpoch_multi_exact(&self.xs, &self.q, k) / qpoch_multi_exact(&self.times_q(&self.ys), &self.q, k)
    }

    /// `prod (1 - q^k x_i) - prod (1 - q^k y_i)`
    fn bracket(&self, k: usize) -> Rational {
        let t = self.q.clone().pow_u(k as u32);
        let f = |v: &[Rational]| v.iter().fold(one(), |acc, x| acc * (one() - Rational::from(x * &t)));
        f(&self.xs) - f(&self.ys)
    }

    /// The k-th summand of the theorem.
    pub fn summand(&self, k: usize) -> Rational {
        self.coefficient(k) * self.bracket(k)
    }

    /// Point form `{q, x1.., y1..}` for reports.
    pub fn point(&self) -> ParamPoint {
        let mut p = ParamPoint::new().with("q", self.q.clone());
        for (i, (x, y)) in self.xs.iter().zip(&self.ys).enumerate() {
            p.set(&format!("x{}", i + 1), x.clone());
            p.set(&format!("y{}", i + 1), y.clone());
        }
        p
    }
}

/// `a_j - b_j`, where `prod (1 - t x_i) = 1 + sum a_j t^j` and likewise `b_j`
/// for the y's.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientVector {
    pub deltas: Vec<Rational>,
}

impl CoefficientVector {
    /// Built from signed elementary symmetric functions.
    pub fn of(spec: &TelescopeSpec) -> Self {
        let signed_elementary = |v: &[Rational]| {
            let mut e = vec![Rational::new(); v.len() + 1];
            e[0] = one();
            for x in v {
                for j in (1..e.len()).rev() {
                    let prev = Rational::from(&e[j - 1] * x);
                    e[j] += prev;
                }
            }
            e.into_iter().enumerate().map(|(j, c)| if j % 2 == 1 { -c } else { c }).collect::<Vec<_>>()
        };
        let a = signed_elementary(&spec.xs);
        let b = signed_elementary(&spec.ys);
        CoefficientVector { deltas: (1..a.len()).map(|j| Rational::from(&a[j] - &b[j])).collect() }
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.deltas.iter().rev().fold(Rational::new(), |acc, d| (acc + d) * t)
    }

    /// Checks `prod (1 - t x_i) - prod (1 - t y_i) = sum deltas_j t^j` at the
    /// `s + 1` points `t = 1..=s+1`.
    pub fn check(&self, spec: &TelescopeSpec) -> bool {
        (1..=spec.s() as i64 + 1).all(|t| {
            let t = Rational::from(t);
            let f = |v: &[Rational]| v.iter().fold(one(), |acc, x| acc * (one() - Rational::from(x * &t)));
            f(&spec.xs) - f(&spec.ys) == self.eval(&t)
        })
    }
}

/// `tau_k` for `k >= -1`, with `tau_{-1} = prod (1 - y_i) / prod (1 - x_i)`.
pub fn tau(spec: &TelescopeSpec, k: i64) -> Result<Rational> {
    match k {
        -1 => {
            let den = TelescopeSpec::one_minus_product(&spec.xs);
            if is_zero(&den) {
                return Err(Error::ZeroDenominator { what: "tau_-1: some x_i = 1".into(), index: 0 });
            }
            Ok(TelescopeSpec::one_minus_product(&spec.ys) / den)
        }
        k if k >= 0 => {
            let k = k as usize;
            Ok(qpoch_multi_exact(&spec.times_q(&spec.xs), &spec.q, k) / qpoch_multi_exact(&spec.times_q(&spec.ys), &spec.q, k))
        }
        _ => Err(Error::Domain(format!("tau_k needs k >= -1, got {k}"))),
    }
}

/// `(tau_k - tau_{k-1}) - summand_k / prod (1 - x_i)`; zero when the
/// difference formula holds.
pub fn nabla_check(spec: &TelescopeSpec, k: usize) -> Result<Rational> {
    let direct = tau(spec, k as i64)? - tau(spec, k as i64 - 1)?;
    let closed = spec.summand(k) / TelescopeSpec::one_minus_product(&spec.xs);
    Ok(direct - closed)
}

/// Both sides of the terminating form
/// `sum_{k<=n} summand_k = (x; q)_{n+1}/(q y; q)_n - prod (1 - y_i)` and
/// their difference, all exact.
pub fn finite_sum_identity(spec: &TelescopeSpec, n: usize) -> Result<(Rational, Rational, Rational)> {
    let qx: Vec<Rational> = spec.xs.clone();
    let qy = spec.times_q(&spec.ys);
    let mut coeff = one();
    let mut t = one();
    let mut lhs = Rational::new();
    let f = |v: &[Rational], t: &Rational| v.iter().fold(one(), |acc, x| acc * (one() - Rational::from(x * t)));
    for _ in 0..=n {
        lhs += Rational::from(&coeff * &(f(&spec.xs, &t) - f(&spec.ys, &t)));
        // (x; q)_{k+1}/(q y; q)_{k+1} from (x; q)_k/(q y; q)_k
        let num = f(&qx, &t);
        let den = f(&qy, &t);
        coeff = coeff * num / den;
        t *= &spec.q;
    }
    let rhs = qpoch_multi_exact(&spec.xs, &spec.q, n + 1) / qpoch_multi_exact(&qy, &spec.q, n) - TelescopeSpec::one_minus_product(&spec.ys);
    let residual = Rational::from(&lhs - &rhs);
    Ok((lhs, rhs, residual))
}

/// The infinite sum as `sum_k A_k P(q^k)` with `A_k = (x; q)_k/(q y; q)_k`
/// and `P` given by the coefficient vector.
pub fn theorem_series(spec: &TelescopeSpec) -> WeightedSeries<Rational> {
    let mut ratio = TermRatio::new(one(), 0);
    for x in &spec.xs {
        ratio = ratio.up(x.clone(), 1);
    }
    for y in spec.times_q(&spec.ys) {
        ratio = ratio.down(y, 1);
    }
    WeightedSeries::new(HyperSeries::new(one(), ratio, spec.q.clone()), CoefficientVector::of(spec).deltas)
}

fn sum_weighted(w: &WeightedSeries<Rational>, digits: u32) -> Result<SeriesResult> {
    w.to_real(digits).sum(digits, &SumOptions::default())
}

pub fn theorem_lhs(spec: &TelescopeSpec, digits: u32) -> Result<SeriesResult> {
    sum_weighted(&theorem_series(spec), digits)
}

/// `prod (1 - x_i) (q x; q)_inf/(q y; q)_inf - prod (1 - y_i)`, with x's and
/// y's that appear on both sides cancelled before the products are formed.
pub fn theorem_rhs(spec: &TelescopeSpec, digits: u32) -> Result<SeriesResult> {
    let mut xs = spec.xs.clone();
    let mut ys = Vec::new();
    for y in &spec.ys {
        match xs.iter().position(|x| x == y) {
            Some(i) => {
                xs.swap_remove(i);
            }
            None => ys.push(y.clone()),
        }
    }
    let factors: Vec<(Rational, Rational, i32)> = spec
        .times_q(&xs)
        .into_iter()
        .map(|x| (x, spec.q.clone(), 1))
        .chain(spec.times_q(&ys).into_iter().map(|y| (y, spec.q.clone(), -1)))
        .collect();
    let ratio = if factors.is_empty() { SeriesResult::exact(BigReal::one(digits)) } else { prod(digits, &factors)? };
    let px = to_bigreal(&TelescopeSpec::one_minus_product(&spec.xs), digits);
    let py = to_bigreal(&TelescopeSpec::one_minus_product(&spec.ys), digits);
    Ok(ratio.scale(&px).sub(&SeriesResult::exact(py)))
}

fn default_tolerance(digits: u32) -> Rational {
    ten_pow_neg(digits.saturating_sub(10).max(1))
}

fn adhoc(id: &'static str, anchor: &'static str, lhs: crate::catalog::Evaluator, rhs: crate::catalog::Evaluator) -> IdentityRecord {
    IdentityRecord::new(id, Family::Telescoping, anchor, Vec::new(), lhs, rhs)
}

/// Verifies the infinite form of the theorem at `spec`.
pub fn infinite_identity(spec: &TelescopeSpec, digits: u32) -> Result<VerificationReport> {
    let (l, r) = (spec.clone(), spec.clone());
    let record = adhoc(
        "thm-aa",
        "infinite telescoping sum",
        eval(move |_, d| theorem_lhs(&l, d)),
        eval(move |_, d| theorem_rhs(&r, d)),
    );
    verify_unchecked(&record, &spec.point(), digits, &default_tolerance(digits))
}

/// Rejects `x = 0` and `x = q^j`, where `(x, q/x; q)_inf` vanishes.
fn check_corollary_args(xs: &[Rational], q: &Rational) -> Result<()> {
    check_unit_interval_rational(q)?;
    if xs.is_empty() {
        return Err(Error::Domain("need m >= 1 values of x".into()));
    }
    for (i, x) in xs.iter().enumerate() {
        if is_zero(x) {
            return Err(Error::Domain(format!("x_{} = 0", i + 1)));
        }
        if let Some(j) = power_of_q(x, q) {
            return Err(Error::ZeroDenominator { what: format!("x_{} = q^{j}: (x, q/x; q)_inf vanishes", i + 1), index: j.unsigned_abs() as usize });
        }
    }
    Ok(())
}

fn inverses(xs: &[Rational], c: &Rational) -> Vec<Rational> {
    xs.iter().map(|x| Rational::from(c / x)).collect()
}

/// `sum_k prod (x_i, q/x_i; q)_k / (q, q^2; q)_k^m
///  * {prod (1 - q^k x_i)(1 - q^(k+1)/x_i) - (1 - q^k)^m (1 - q^(k+1))^m}`
pub fn corollary_a_series(xs: &[Rational], q: &Rational) -> WeightedSeries<Rational> {
    let m = xs.len();
    let q2 = q.clone().pow_u(2);
    let qx = inverses(xs, q);
    let mut ratio = TermRatio::new(one(), 0);
    for x in xs.iter().chain(&qx) {
        ratio = ratio.up(x.clone(), 1);
    }
    for _ in 0..m {
        ratio = ratio.down(q.clone(), 1).down(q2.clone(), 1);
    }
    let mut top: Vec<Rational> = xs.to_vec();
    top.extend(qx);
    let bottom: Vec<Rational> = (0..m).flat_map(|_| [one(), q.clone()]).collect();
    let weight = without_constant(poly_sub(&linear_product(&top), &linear_product(&bottom)));
    WeightedSeries::new(HyperSeries::new(one(), ratio, q.clone()), weight)
}

/// `prod (x_i, q/x_i; q)_inf / (q, q^2; q)_inf^m`
pub fn corollary_a_product(xs: &[Rational], q: &Rational, digits: u32) -> Result<SeriesResult> {
    let m = xs.len() as i32;
    let mut f: Vec<(Rational, Rational, i32)> = xs.iter().chain(&inverses(xs, q)).map(|x| (x.clone(), q.clone(), 1)).collect();
    f.push((q.clone(), q.clone(), -m));
    f.push((q.clone().pow_u(2), q.clone(), -m));
    prod(digits, &f)
}

/// `1/prod (1 - q/x_i) + sum_k (q; q)_k^(2m) / prod (x_i; q)_(k+1) (q/x_i; q)_(k+2)
///  * {(1 - q^(k+1))^(2m) - prod (1 - q^k x_i)(1 - q^(k+2)/x_i)}`
pub fn corollary_b_sum(xs: &[Rational], q: &Rational, digits: u32) -> Result<SeriesResult> {
    let m = xs.len();
    let qx = inverses(xs, q);
    let q2x = inverses(xs, &q.clone().pow_u(2));
    let q3x = inverses(xs, &q.clone().pow_u(3));
    let first = xs.iter().chain(&qx).chain(&q2x).fold(one(), |acc, x| acc / (one() - x));
    let mut ratio = TermRatio::new(one(), 0);
    for _ in 0..2 * m {
        ratio = ratio.up(q.clone(), 1);
    }
    for (x, y) in xs.iter().zip(&q3x) {
        ratio = ratio.down(Rational::from(x * q), 1).down(y.clone(), 1);
    }
    let mut bottom: Vec<Rational> = xs.to_vec();
    bottom.extend(q2x);
    let top = vec![q.clone(); 2 * m];
    let weight = without_constant(poly_sub(&linear_product(&top), &linear_product(&bottom)));
    let series = WeightedSeries::new(HyperSeries::new(first, ratio, q.clone()), weight);
    let lead = qx.iter().fold(one(), |acc, x| acc / (one() - x));
    Ok(sum_weighted(&series, digits)?.add(&SeriesResult::exact(to_bigreal(&lead, digits))))
}

/// `(q; q)_inf^(2m) / prod (x_i, q/x_i; q)_inf`
pub fn corollary_b_product(xs: &[Rational], q: &Rational, digits: u32) -> Result<SeriesResult> {
    let m = xs.len() as i32;
    let mut f: Vec<(Rational, Rational, i32)> = xs.iter().chain(&inverses(xs, q)).map(|x| (x.clone(), q.clone(), -1)).collect();
    f.push((q.clone(), q.clone(), 2 * m));
    prod(digits, &f)
}

fn xs_point(xs: &[Rational], q: &Rational) -> ParamPoint {
    let mut p = ParamPoint::new().with("q", q.clone());
    for (i, x) in xs.iter().enumerate() {
        p.set(&format!("x{}", i + 1), x.clone());
    }
    p
}

/// Verifies the first corollary; the product side is reported as lhs.
pub fn corollary_a(xs: &[Rational], q: &Rational, digits: u32) -> Result<VerificationReport> {
    check_corollary_args(xs, q)?;
    let (a, b, c) = (xs.to_vec(), xs.to_vec(), q.clone());
    let d = q.clone();
    let record = adhoc(
        "corl-aa",
        "product (x, q/x; q) over (q, q^2; q)^m as a telescoping sum",
        eval(move |_, dg| corollary_a_product(&a, &c, dg)),
        eval(move |_, dg| sum_weighted(&corollary_a_series(&b, &d), dg)),
    );
    verify_unchecked(&record, &xs_point(xs, q), digits, &default_tolerance(digits))
}

/// Verifies the second corollary; the product side is reported as lhs.
pub fn corollary_b(xs: &[Rational], q: &Rational, digits: u32) -> Result<VerificationReport> {
    check_corollary_args(xs, q)?;
    let (a, b, c) = (xs.to_vec(), xs.to_vec(), q.clone());
    let d = q.clone();
    let record = adhoc(
        "corl-bb",
        "(q; q)^2m over product (x, q/x; q) as a telescoping sum",
        eval(move |_, dg| corollary_b_product(&a, &c, dg)),
        eval(move |_, dg| corollary_b_sum(&b, &d, dg)),
    );
    verify_unchecked(&record, &xs_point(xs, q), digits, &default_tolerance(digits))
}

/// `sum_k (q; q^2)_k^4/(q^2, q^4; q^2)_k^2 {(1 - q^(2k+1))^4 - (1 - q^(2k))^2 (1 - q^(2k+2))^2}`
pub fn guillera_b_series(q: &Rational) -> WeightedSeries<Rational> {
    let q2 = q.clone().pow_u(2);
    let q4 = q.clone().pow_u(4);
    let ratio = TermRatio::new(one(), 0)
        .up(q.clone(), 1)
        .up(q.clone(), 1)
        .up(q.clone(), 1)
        .up(q.clone(), 1)
        .down(q2.clone(), 1)
        .down(q2.clone(), 1)
        .down(q4.clone(), 1)
        .down(q4, 1);
    let top = vec![q.clone(); 4];
    let bottom = vec![one(), one(), q2.clone(), q2.clone()];
    let weight = without_constant(poly_sub(&linear_product(&top), &linear_product(&bottom)));
    WeightedSeries::new(HyperSeries::new(one(), ratio, q2), weight)
}

pub fn guillera_b_product(q: &Rational, digits: u32) -> Result<SeriesResult> {
    let q2 = q.clone().pow_u(2);
    prod(digits, &[(q.clone(), q2.clone(), 4), (q2.clone(), q2.clone(), -2), (q.clone().pow_u(4), q2, -2)])
}

fn xs_of(p: &ParamPoint, names: &[&str]) -> Result<Vec<Rational>> {
    names.iter().map(|n| p.get(n).cloned()).collect()
}

fn spec_of(p: &ParamPoint) -> Result<TelescopeSpec> {
    TelescopeSpec::new(xs_of(p, &["x1", "x2"])?, xs_of(p, &["y1", "y2"])?, p.get("q")?.clone())
}

fn corollary_record(
    id: &'static str,
    anchor: &'static str,
    names: &'static [&'static str],
    second: bool,
    points: Vec<ParamPoint>,
) -> IdentityRecord {
    let mut params = vec![ParamSpec::q()];
    params.extend(names.iter().map(|n| ParamSpec::unit(n)));
    let lhs = eval(move |p, d| {
        let xs = xs_of(p, names)?;
        let q = p.get("q")?;
        check_corollary_args(&xs, q)?;
        if second {
            corollary_b_product(&xs, q, d)
        } else {
            corollary_a_product(&xs, q, d)
        }
    });
    let rhs = eval(move |p, d| {
        let xs = xs_of(p, names)?;
        let q = p.get("q")?;
        check_corollary_args(&xs, q)?;
        if second {
            corollary_b_sum(&xs, q, d)
        } else {
            sum_weighted(&corollary_a_series(&xs, q), d)
        }
    });
    IdentityRecord::new(id, Family::Telescoping, anchor, params, lhs, rhs).points(points)
}

fn pt(items: &[(&str, i64, i64)]) -> ParamPoint {
    ParamPoint::from_fractions(items)
}

pub(crate) fn records() -> Vec<IdentityRecord> {
    let two = |n: &'static str| ParamSpec::unit(n);
    let finite_lhs = exact(|p: &ParamPoint| Ok(finite_sum_identity(&spec_of(p)?, p.count("n")?)?.0));
    let finite_rhs = exact(|p: &ParamPoint| Ok(finite_sum_identity(&spec_of(p)?, p.count("n")?)?.1));
    vec![
        IdentityRecord::new(
            "thm-aa",
            Family::Telescoping,
            "infinite telescoping sum with s = 2 free x's and y's",
            vec![ParamSpec::q(), two("x1"), two("x2"), two("y1"), two("y2")],
            eval(|p, d| theorem_lhs(&spec_of(p)?, d)),
            eval(|p, d| theorem_rhs(&spec_of(p)?, d)),
        )
        .points(vec![
            pt(&[("q", 1, 2), ("x1", 1, 2), ("x2", 1, 3), ("y1", 1, 5), ("y2", 1, 7)]),
            pt(&[("q", 3, 4), ("x1", 2, 5), ("x2", 3, 5), ("y1", 1, 3), ("y2", 1, 2)]),
        ]),
        IdentityRecord::new(
            "terminating-sum",
            Family::Telescoping,
            "terminating telescoping sum up to k = n, s = 2",
            vec![
                ParamSpec::q(),
                two("x1"),
                two("x2"),
                two("y1"),
                two("y2"),
                ParamSpec::free("n", ParamDomain::Count { max: 500 }, "upper summation limit"),
            ],
            from_exact(finite_lhs.clone()),
            from_exact(finite_rhs.clone()),
        )
        .exact_sides(finite_lhs, finite_rhs)
        .points(vec![
            pt(&[("q", 2, 5), ("x1", 1, 2), ("x2", 1, 3), ("y1", 1, 5), ("y2", 1, 7), ("n", 10, 1)]),
            pt(&[("q", 1, 2), ("x1", 3, 5), ("x2", 1, 4), ("y1", 2, 3), ("y2", 1, 6), ("n", 25, 1)]),
        ]),
        corollary_record(
            "corl-aa",
            "first corollary with m = 1",
            &["x1"],
            false,
            vec![pt(&[("q", 1, 4), ("x1", 1, 2)]), pt(&[("q", 1, 2), ("x1", 1, 3)])],
        ),
        corollary_record(
            "corl-bb",
            "second corollary with m = 1",
            &["x1"],
            true,
            vec![pt(&[("q", 1, 3), ("x1", 1, 2)]), pt(&[("q", 1, 2), ("x1", 2, 3)])],
        ),
        corollary_record(
            "q-wei-a",
            "q-analogue of the sine-product series for sin(pi x) sin(pi y)/pi^2",
            &["x", "y"],
            false,
            vec![pt(&[("q", 1, 2), ("x", 1, 3), ("y", 2, 3)]), pt(&[("q", 1, 4), ("x", 1, 2), ("y", 3, 5)])],
        ),
        IdentityRecord::new(
            "q-guillera-b",
            Family::Telescoping,
            "q-analogue of sum (1/2)_k^4/(k!^2 (k+1)!^2) (k^2+k+1/8) = 2/pi^2, stored with q replaced by q^2",
            vec![ParamSpec::q()],
            eval(|p, d| guillera_b_product(p.get("q")?, d)),
            eval(|p, d| sum_weighted(&guillera_b_series(p.get("q")?), d)),
        )
        .points(crate::catalog::build::q_points()),
        corollary_record(
            "q-wei-b",
            "q-analogue of the series for pi^2/(sin(pi x) sin(pi y))",
            &["x", "y"],
            true,
            vec![pt(&[("q", 1, 4), ("x", 1, 2), ("y", 1, 2)]), pt(&[("q", 1, 2), ("x", 1, 3), ("y", 3, 5)])],
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build::rat;

    fn spec(xs: &[(i64, i64)], ys: &[(i64, i64)], q: (i64, i64)) -> TelescopeSpec {
        let v = |s: &[(i64, i64)]| s.iter().map(|&(a, b)| rat(a, b)).collect::<Vec<_>>();
        TelescopeSpec::new(v(xs), v(ys), rat(q.0, q.1)).unwrap()
    }

    #[test]
    fn tau_values() {
        let s = spec(&[(1, 2)], &[(1, 3)], (1, 2));
        assert_eq!(tau(&s, 0).unwrap(), 1);
        // (1/4; 1/2)_2 / (1/6; 1/2)_2
        assert_eq!(tau(&s, 2).unwrap(), rat(3 * 7 * 6 * 12, 4 * 8 * 5 * 11));
        assert_eq!(tau(&s, -1).unwrap(), rat(4, 3));
        let same = spec(&[(1, 2), (2, 7)], &[(2, 7), (1, 2)], (1, 3));
        for k in 0..6 {
            assert_eq!(tau(&same, k).unwrap(), 1);
        }
        assert!(tau(&s, -2).is_err());
    }

    #[test]
    fn tau_minus_one_pole() {
        let s = spec(&[(1, 1)], &[(1, 3)], (1, 2));
        assert!(matches!(tau(&s, -1), Err(Error::ZeroDenominator { .. })));
    }

    #[test]
    fn nabla_example() {
        let s = spec(&[(1, 2), (1, 3)], &[(1, 5), (1, 7)], (2, 5));
        assert_eq!(nabla_check(&s, 3).unwrap(), 0);
        assert_eq!(nabla_check(&s, 0).unwrap(), 0);
    }

    #[test]
    fn finite_sum_trivial_cases() {
        let s = spec(&[(1, 3), (3, 4)], &[(1, 3), (3, 4)], (1, 2));
        let (l, r, res) = finite_sum_identity(&s, 7).unwrap();
        assert_eq!((l, r, res), (rat(0, 1), rat(0, 1), rat(0, 1)));
        let s = spec(&[(1, 2), (1, 3)], &[(1, 5), (1, 7)], (2, 5));
        let (l, _, res) = finite_sum_identity(&s, 0).unwrap();
        assert_eq!(res, 0);
        assert_eq!(l, rat(1, 2) * rat(2, 3) - rat(4, 5) * rat(6, 7));
    }

    #[test]
    fn coefficient_vector() {
        let s = spec(&[(1, 2), (1, 3), (2, 5)], &[(1, 5), (1, 7), (3, 4)], (1, 2));
        let c = CoefficientVector::of(&s);
        assert_eq!(c.deltas.len(), 3);
        assert!(c.check(&s));
        // a_1 - b_1 = -(sum x) + sum y
        assert_eq!(c.deltas[0], -(rat(1, 2) + rat(1, 3) + rat(2, 5)) + rat(1, 5) + rat(1, 7) + rat(3, 4));
        let mut bad = c.clone();
        bad.deltas[1] += 1;
        assert!(!bad.check(&s));
    }

    #[test]
    fn pole_in_y_rejected() {
        let r = TelescopeSpec::new(vec![rat(1, 3)], vec![rat(4, 1)], rat(1, 2));
        assert!(matches!(r, Err(Error::ZeroDenominator { .. })));
        assert!(TelescopeSpec::new(vec![rat(1, 3)], vec![], rat(1, 2)).is_err());
    }

    #[test]
    fn infinite_form_example() {
        let s = spec(&[(1, 2), (1, 3)], &[(1, 5), (1, 7)], (1, 2));
        let rep = infinite_identity(&s, 60).unwrap();
        assert!(rep.pass, "{:?}", rep.residual);
    }

    #[test]
    fn infinite_form_equal_parameters_is_zero() {
        let s = spec(&[(1, 2), (1, 3)], &[(1, 3), (1, 2)], (1, 2));
        let l = theorem_lhs(&s, 40).unwrap();
        let r = theorem_rhs(&s, 40).unwrap();
        assert!(l.value.is_zero() && r.value.is_zero());
    }

    #[test]
    fn infinite_form_degenerate_one_side() {
        // x = q, y = 1: the right side is 1
        let s = spec(&[(1, 2)], &[(1, 1)], (1, 2));
        let r = theorem_rhs(&s, 40).unwrap();
        assert!((&r.value - &BigReal::one(40)).abs() < BigReal::from_f64(1e-35, 40));
        assert!(infinite_identity(&s, 40).unwrap().pass);
    }

    #[test]
    fn corollaries_at_default_points() {
        assert!(corollary_a(&[rat(1, 2)], &rat(1, 4), 60).unwrap().pass);
        assert!(corollary_b(&[rat(1, 2)], &rat(1, 3), 60).unwrap().pass);
        assert!(corollary_b(&[rat(1, 2), rat(1, 2)], &rat(1, 4), 60).unwrap().pass);
        assert!(corollary_a(&[rat(1, 3), rat(1, 4)], &rat(3, 4), 60).unwrap().pass);
    }

    #[test]
    fn corollary_poles_rejected() {
        assert!(corollary_a(&[rat(1, 1)], &rat(1, 2), 40).is_err());
        assert!(corollary_b(&[rat(1, 3)], &rat(1, 3), 40).is_err());
        assert!(corollary_a(&[rat(0, 1)], &rat(1, 3), 40).is_err());
    }

    #[test]
    fn corollary_a_is_the_substituted_theorem() {
        let q = rat(1, 3);
        let xs = [rat(2, 5), rat(1, 7)];
        let s = TelescopeSpec::new(
            vec![xs[0].clone(), xs[1].clone(), q.clone() / &xs[0], q.clone() / &xs[1]],
            vec![rat(1, 1), rat(1, 1), q.clone(), q.clone()],
            q.clone(),
        )
        .unwrap();
        let a = sum_weighted(&corollary_a_series(&xs, &q), 50).unwrap();
        let t = theorem_lhs(&s, 50).unwrap();
        assert!((&a.value - &t.value).abs() < BigReal::from_f64(1e-45, 50));
    }

    #[test]
    fn guillera_b_is_corollary_a_at_root_q() {
        let q = rat(1, 2);
        let g = sum_weighted(&guillera_b_series(&q), 50).unwrap();
        let a = sum_weighted(&corollary_a_series(&[q.clone(), q.clone()], &(q.clone() * &q)), 50).unwrap();
        assert!((&g.value - &a.value).abs() < BigReal::from_f64(1e-45, 50));
        let p = guillera_b_product(&q, 50).unwrap();
        assert!((&g.value - &p.value).abs() < BigReal::from_f64(1e-45, 50));
    }

    #[test]
    fn power_detection() {
        assert_eq!(power_of_q(&rat(1, 8), &rat(1, 2)), Some(3));
        assert_eq!(power_of_q(&rat(4, 1), &rat(1, 2)), Some(-2));
        assert_eq!(power_of_q(&rat(1, 1), &rat(1, 2)), Some(0));
        assert_eq!(power_of_q(&rat(1, 3), &rat(1, 2)), None);
    }
}
