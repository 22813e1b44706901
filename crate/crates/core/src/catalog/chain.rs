//! Summation and transformation formulas used to derive the main identities,
//! stored after the substitutions that remove fractional powers of q.

use super::build::{eval, exact, from_exact, prod, q_points, qp, sum};
use super::qmain::{sun_lhs, thm_b_lhs, thm_e_lhs, thm_e_rhs};
use super::{Family, IdentityRecord, ParamDomain, ParamPoint, ParamSpec};
use crate::error::{Error, Result};
use crate::precision::{to_bigreal, Rational};
use crate::qcore::{phi_series, qpoch_finite, HyperSeries, PhiSeriesSpec, QPoint, SeriesResult, TermRatio};

fn one() -> Rational {
    Rational::from(1)
}

fn get(p: &ParamPoint, name: &str) -> Result<Rational> {
    Ok(p.get(name)?.clone())
}

/// Terms of a `_{1+r}phi_s` series with rational parameters, as a term-ratio
/// series (`s >= r`).
fn phi_rational(upper: &[Rational], lower: &[Rational], z: &Rational, q: &Rational) -> HyperSeries<Rational> {
    let excess = lower.len() as i64 + 1 - upper.len() as i64;
    assert!(excess >= 0);
    let scale = if excess % 2 == 1 { -z.clone() } else { z.clone() };
    let mut ratio = TermRatio::new(scale, excess as u32);
    for a in upper {
        ratio = ratio.up(a.clone(), 1);
    }
    ratio = ratio.down(q.clone(), 1);
    for b in lower {
        ratio = ratio.down(b.clone(), 1);
    }
    HyperSeries::new(one(), ratio, q.clone())
}

// Well-poised 8phi7 summation with c = -w^2, so that sqrt(-c) = w.

fn phi87_sum_lhs(p: &ParamPoint, d: u32) -> Result<SeriesResult> {
    let (q, a, w, dd) = (get(p, "q")?, get(p, "a")?, get(p, "w")?, get(p, "d")?);
    let c = -(w.clone() * &w);
    let upper = [
        -c.clone(),
        q.clone() * &w,
        -(q.clone() * &w),
        a.clone(),
        q.clone() / &a,
        c.clone(),
        -dd.clone(),
        -(q.clone() / &dd),
    ];
    let lower = [
        w.clone(),
        -w.clone(),
        -(c.clone() * &q / &a),
        -(a.clone() * &c),
        -q.clone(),
        c.clone() * &q / &dd,
        c.clone() * &dd,
    ];
    let spec = PhiSeriesSpec::new(
        upper.iter().map(|x| to_bigreal(x, d)).collect(),
        lower.iter().map(|x| to_bigreal(x, d)).collect(),
        to_bigreal(&c, d),
        QPoint::exact(q)?,
    );
    phi_series(&spec, d)
}

fn phi87_sum_rhs(p: &ParamPoint, d: u32) -> Result<SeriesResult> {
    let (q, a, w, dd) = (get(p, "q")?, get(p, "a")?, get(p, "w")?, get(p, "d")?);
    let c = -(w.clone() * &w);
    let q2 = qp(&q, 2);
    prod(
        d,
        &[
            (-c.clone(), q.clone(), 1),
            (-(c.clone() * &q), q.clone(), 1),
            (a.clone() * &c * &dd, q2.clone(), 1),
            (a.clone() * &c * &q / &dd, q2.clone(), 1),
            (c.clone() * &dd * &q / &a, q2.clone(), 1),
            (c.clone() * &q2 / (a.clone() * &dd), q2.clone(), 1),
            (c.clone() * &dd, q.clone(), -1),
            (c.clone() * &q / &dd, q.clone(), -1),
            (-(a.clone() * &c), q.clone(), -1),
            (-(c.clone() * &q / &a), q.clone(), -1),
        ],
    )
}

// The 5phi4 specialization (a = q^(1/2), c = -q, d = -q^(1/2)) after q -> q^2.

fn phi54_lhs(p: &ParamPoint, d: u32) -> Result<SeriesResult> {
    let q = get(p, "q")?;
    let base = qp(&q, 2);
    let s = phi_rational(
        &[qp(&q, 2), -qp(&q, 3), q.clone(), q.clone(), q.clone()],
        &[-q.clone(), qp(&q, 3), qp(&q, 3), qp(&q, 3)],
        &-qp(&q, 2),
        &base,
    );
    sum(&s, d)
}

fn phi54_rhs(p: &ParamPoint, d: u32) -> Result<SeriesResult> {
    let q = get(p, "q")?;
    let q2 = qp(&q, 2);
    let q4 = qp(&q, 4);
    prod(d, &[(q2.clone(), q2.clone(), 1), (q4.clone(), q2.clone(), 1), (q4.clone(), q4.clone(), 4), (qp(&q, 3), q2, -4)])
}

/// Very-well-poised `8W7(a; b, c, d, e, f; q, z)`; the factors
/// `(q sqrt a, -q sqrt a; q)_k / (sqrt a, -sqrt a; q)_k` are merged into
/// `(1 - a q^(2k+2)) / (1 - a q^(2k))` so no square root is needed.
fn vwp87(a: &Rational, others: [&Rational; 5], q: &Rational, z: &Rational) -> HyperSeries<Rational> {
    let mut ratio = TermRatio::new(z.clone(), 0).up(a.clone() * qp(q, 2), 2).down(a.clone(), 2).up(a.clone(), 1).down(q.clone(), 1);
    for x in others {
        ratio = ratio.up(x.clone(), 1).down(a.clone() * q / x, 1);
    }
    HyperSeries::new(one(), ratio, q.clone())
}

struct Transform {
    q: Rational,
    a: Rational,
    b: Rational,
    c: Rational,
    d: Rational,
    e: Rational,
    f: Rational,
}

impl Transform {
    fn from(p: &ParamPoint) -> Result<Self> {
        Ok(Transform {
            q: get(p, "q")?,
            a: get(p, "a")?,
            b: get(p, "b")?,
            c: get(p, "c")?,
            d: get(p, "d")?,
            e: get(p, "e")?,
            f: get(p, "f")?,
        })
    }

    fn lambda(&self) -> Rational {
        self.q.clone() * &self.a * &self.a / (self.b.clone() * &self.c * &self.d)
    }

    fn check(&self) -> Result<()> {
        let z1 = self.a.clone() * &self.a * qp(&self.q, 2) / (self.b.clone() * &self.c * &self.d * &self.e * &self.f);
        let z2 = self.a.clone() * &self.q / (self.e.clone() * &self.f);
        if z1.clone().abs() >= 1 || z2.clone().abs() >= 1 {
            return Err(Error::Domain(format!("8phi7 transformation needs |a^2q^2/bcdef| < 1 and |aq/ef| < 1 (got {z1} and {z2})")));
        }
        Ok(())
    }
}

fn phi87_transform_lhs(p: &ParamPoint, d: u32) -> Result<SeriesResult> {
    let t = Transform::from(p)?;
    t.check()?;
    let z = t.a.clone() * &t.a * qp(&t.q, 2) / (t.b.clone() * &t.c * &t.d * &t.e * &t.f);
    sum(&vwp87(&t.a, [&t.b, &t.c, &t.d, &t.e, &t.f], &t.q, &z), d)
}

fn phi87_transform_rhs(p: &ParamPoint, d: u32) -> Result<SeriesResult> {
    let t = Transform::from(p)?;
    t.check()?;
    let l = t.lambda();
    let q = &t.q;
    let ef = t.e.clone() * &t.f;
    let pre = prod(
        d,
        &[
            (t.a.clone() * q, q.clone(), 1),
            (t.a.clone() * q / &ef, q.clone(), 1),
            (l.clone() * q / &t.e, q.clone(), 1),
            (l.clone() * q / &t.f, q.clone(), 1),
            (t.a.clone() * q / &t.e, q.clone(), -1),
            (t.a.clone() * q / &t.f, q.clone(), -1),
            (l.clone() * q, q.clone(), -1),
            (l.clone() * q / &ef, q.clone(), -1),
        ],
    )?;
    let lb = l.clone() * &t.b / &t.a;
    let lc = l.clone() * &t.c / &t.a;
    let ld = l.clone() * &t.d / &t.a;
    let z = t.a.clone() * q / &ef;
    let series = sum(&vwp87(&l, [&lb, &lc, &ld, &t.e, &t.f], q, &z), d)?;
    Ok(pre.mul(&series))
}

// thm-b left side expressed through the sun series.

fn bridge_rhs(p: &ParamPoint, d: u32) -> Result<SeriesResult> {
    let q = get(p, "q")?;
    let q2 = qp(&q, 2);
    let factor = prod(
        d,
        &[(q.clone(), q2.clone(), 2), (-q2.clone(), q2.clone(), 2), (-q.clone(), q2.clone(), -2), (q2.clone(), q2.clone(), -2)],
    )?;
    Ok(factor.mul(&sum(&sun_lhs(&q), d)?))
}

// 2phi2 summation after q -> q^2.

fn phi22_lhs(p: &ParamPoint, d: u32) -> Result<SeriesResult> {
    let (q, a, b) = (get(p, "q")?, get(p, "a")?, get(p, "b")?);
    let ab = a.clone() * &b * &q;
    let s = phi_rational(&[a.clone() * &a, b.clone() * &b], &[ab.clone(), -ab], &-qp(&q, 2), &qp(&q, 2));
    sum(&s, d)
}

fn phi22_rhs(p: &ParamPoint, d: u32) -> Result<SeriesResult> {
    let (q, a, b) = (get(p, "q")?, get(p, "a")?, get(p, "b")?);
    let q2 = qp(&q, 2);
    let q4 = qp(&q, 4);
    let a2 = a.clone() * &a;
    let b2 = b.clone() * &b;
    prod(
        d,
        &[
            (a2.clone() * &q2, q4.clone(), 1),
            (b2.clone() * &q2, q4.clone(), 1),
            (q2.clone(), q4.clone(), -1),
            (a2 * &b2 * &q2, q4.clone(), -1),
        ],
    )
}

// a = b = q^(1/2) in the 2phi2 summation.

fn phi22_special_lhs(p: &ParamPoint, d: u32) -> Result<SeriesResult> {
    let q = get(p, "q")?;
    let ratio = TermRatio::new(q.clone(), 1).up(q.clone(), 1).down(qp(&q, 3), 2);
    sum(&HyperSeries::new(one(), ratio, q.clone()), d)
}

fn phi22_special_rhs(p: &ParamPoint, d: u32) -> Result<SeriesResult> {
    let q = get(p, "q")?;
    let q2 = qp(&q, 2);
    prod(d, &[(q2.clone(), q2.clone(), 2), (q.clone(), q2.clone(), -1), (qp(&q, 3), q2, -1)])
}

/// Left side of the cubic summation with `A = a^2` and `C = c^3`:
/// `sum (1-Aq^4k)/(1-A) (b,q^2/b;q)_k (A/q;q)_2k (C,Aq^2/C;q^3)_k
///  / ((Aq^3/b,Abq;q^3)_k (q^2;q)_2k (Aq/C,C/q;q)_k) q^k`.
fn cubic_lhs(q: &Rational, big_a: &Rational, b: &Rational, big_c: &Rational) -> HyperSeries<Rational> {
    let ratio = TermRatio::new(q.clone(), 0)
        .up(big_a.clone() * qp(q, 4), 4)
        .down(big_a.clone(), 4)
        .up(b.clone(), 1)
        .up(qp(q, 2) / b, 1)
        .up(big_a.clone() / q, 2)
        .up(big_a.clone(), 2)
        .up(big_c.clone(), 3)
        .up(big_a.clone() * qp(q, 2) / big_c, 3)
        .down(big_a.clone() * qp(q, 3) / b, 3)
        .down(big_a.clone() * b * q, 3)
        .down(qp(q, 2), 2)
        .down(qp(q, 3), 2)
        .down(big_a.clone() * q / big_c, 1)
        .down(big_c.clone() / q, 1);
    HyperSeries::new(one(), ratio, q.clone())
}

fn cubic_params(p: &ParamPoint) -> Result<(Rational, Rational, Rational, Rational)> {
    let q = get(p, "q")?;
    let a = get(p, "a")?;
    let b = get(p, "b")?;
    let c = get(p, "c")?;
    Ok((q, a.clone() * &a, b, c.clone() * &c * &c))
}

fn gr_cubic_lhs(p: &ParamPoint, d: u32) -> Result<SeriesResult> {
    let (q, big_a, b, big_c) = cubic_params(p)?;
    sum(&cubic_lhs(&q, &big_a, &b, &big_c), d)
}

/// Right side exactly as displayed, including the `a^3 q^3 / b` argument in
/// the second denominator.
fn gr_cubic_rhs(p: &ParamPoint, d: u32) -> Result<SeriesResult> {
    let (q, big_a, b, big_c) = cubic_params(p)?;
    let a = get(p, "a")?;
    let q3 = qp(&q, 3);
    let e = |x: Rational, s: i32| (x, q3.clone(), s);
    let first = prod(
        d,
        &[
            e(b.clone() * qp(&q, 2), 1),
            e(qp(&q, 4) / &b, 1),
            e(b.clone() * &big_c / &q, 1),
            e(big_c.clone() * &q / &b, 1),
            e(big_c.clone() / &big_a, 1),
            e(big_c.clone() * qp(&q, 2) / &big_a, 1),
            e(big_a.clone() * &q, 1),
            e(big_a.clone() * &q3, 1),
            e(qp(&q, 2), -1),
            e(qp(&q, 4), -1),
            e(big_c.clone() * &q, -1),
            e(b.clone() * &big_c / &big_a, -1),
            e(big_a.clone() * &q3 / &b, -1),
            e(big_a.clone() * &b * &q, -1),
            e(big_c.clone() * qp(&q, 2) / (big_a.clone() * &b), -1),
        ],
    )?;
    let second = prod(
        d,
        &[
            e(b.clone(), 1),
            e(b.clone() * &q, 1),
            e(b.clone() * qp(&q, 2), 1),
            e(qp(&q, 2) / &b, 1),
            e(q3.clone() / &b, 1),
            e(qp(&q, 4) / &b, 1),
            e(big_a.clone() / &q, 1),
            e(big_a.clone() * &q, 1),
            e(big_a.clone() * &q3, 1),
            e(big_c.clone() / &big_a, 1),
            e(big_c.clone() * &big_c * &q / &big_a, 1),
            e(qp(&q, 2), -1),
            e(qp(&q, 4), -1),
            e(big_c.clone() / &q, -1),
            e(big_c.clone() * &q, -1),
            e(big_a.clone() / &big_c, -1),
            e(big_a.clone() * &q / &big_c, -1),
            e(big_c.clone() * &q3 / &big_a, -1),
            e(big_c.clone() * &q3 / (big_a.clone() * &b), -1),
            e(a.clone() * &a * &a * &q3 / &b, -1),
            e(big_a.clone() * &b * &q, -1),
            e(b.clone() * &q3 / &big_a, -1),
        ],
    )?;
    let upper = [b.clone() * &big_c / &big_a, big_c.clone() * qp(&q, 2) / (big_a.clone() * &b)];
    let lower = [big_c.clone() * &big_c * &q / &big_a];
    let spec = PhiSeriesSpec::new(
        upper.iter().map(|x| to_bigreal(x, d)).collect(),
        lower.iter().map(|x| to_bigreal(x, d)).collect(),
        to_bigreal(&q3, d),
        QPoint::exact(q3.clone())?,
    );
    let phi = phi_series(&spec, d)?;
    Ok(first.sub(&second.mul(&phi)))
}

// Terminating cubic form: C = q^(-3n).

fn cubic_n(p: &ParamPoint) -> Result<(Rational, Rational, Rational, usize)> {
    let q = get(p, "q")?;
    let a = get(p, "a")?;
    let b = get(p, "b")?;
    let n = p.count("n")?;
    Ok((q, a.clone() * &a, b, n))
}

fn chu_cubic_terminating_lhs(p: &ParamPoint) -> Result<Rational> {
    let (q, big_a, b, n) = cubic_n(p)?;
    let big_c = qp(&q, -3 * n as i32);
    cubic_lhs(&q, &big_a, &b, &big_c).partial_sum(n + 1)
}

fn chu_cubic_terminating_rhs(p: &ParamPoint) -> Result<Rational> {
    let (q, big_a, b, n) = cubic_n(p)?;
    let q3 = qp(&q, 3);
    let num = qpoch_finite(&(big_a.clone() * &q), &q, 3 * n)
        * qpoch_finite(&q3, &q3, n)
        * qpoch_finite(&(b.clone() * qp(&q, 2)), &q3, n)
        * qpoch_finite(&(qp(&q, 4) / &b), &q3, n);
    let den = qpoch_finite(&qp(&q, 2), &q, 3 * n)
        * qpoch_finite(&(big_a.clone() * qp(&q, 2)), &q3, n)
        * qpoch_finite(&(big_a.clone() * &q3 / &b), &q3, n)
        * qpoch_finite(&(big_a.clone() * &b * &q), &q3, n);
    if den.cmp0() == std::cmp::Ordering::Equal {
        return Err(Error::ZeroDenominator { what: "terminating cubic right side".into(), index: n });
    }
    Ok(num / den)
}

/// `sum (1-Aq^4k)/(1-A) (b,q^2/b;q)_k (A/q;q)_2k / ((Aq^3/b,Abq;q^3)_k (q^2;q)_2k) q^(k^2+k)`
pub(crate) fn chu_cubic_limit_lhs(q: &Rational, big_a: &Rational, b: &Rational) -> HyperSeries<Rational> {
    let ratio = TermRatio::new(qp(q, 2), 2)
        .up(big_a.clone() * qp(q, 4), 4)
        .down(big_a.clone(), 4)
        .up(b.clone(), 1)
        .up(qp(q, 2) / b, 1)
        .up(big_a.clone() / q, 2)
        .up(big_a.clone(), 2)
        .down(big_a.clone() * qp(q, 3) / b, 3)
        .down(big_a.clone() * b * q, 3)
        .down(qp(q, 2), 2)
        .down(qp(q, 3), 2);
    HyperSeries::new(one(), ratio, q.clone())
}

fn chu_cubic_limit_rhs(q: &Rational, big_a: &Rational, b: &Rational, d: u32) -> Result<SeriesResult> {
    let q3 = qp(q, 3);
    prod(
        d,
        &[
            (big_a.clone() * q, q.clone(), 1),
            (q3.clone(), q3.clone(), 1),
            (b.clone() * qp(q, 2), q3.clone(), 1),
            (qp(q, 4) / b, q3.clone(), 1),
            (qp(q, 2), q.clone(), -1),
            (big_a.clone() * qp(q, 2), q3.clone(), -1),
            (big_a.clone() * &q3 / b, q3.clone(), -1),
            (big_a.clone() * b * q, q3.clone(), -1),
        ],
    )
}

fn quadratic_params(p: &ParamPoint) -> Result<(Rational, Rational, Rational, Rational)> {
    Ok((get(p, "q")?, get(p, "a")?, get(p, "u")?, get(p, "v")?))
}

/// Terminating quadratic summation in base q with `Q = q^2`:
/// `sum_{k<=n} (1-aq^(3k-1))/(1-a/q) (Q^-n, aQ^n, a/q; Q)_k (u/q, v/q, Qa/uv; q)_k
///  / ((Qa/u, Qa/v, uv/q; Q)_k (q, aQ^n, Q^-n; q)_k) q^k`.
fn chu_quadratic_series(q: &Rational, a: &Rational, u: &Rational, v: &Rational, n: usize) -> HyperSeries<Rational> {
    let big_q = qp(q, 2);
    let qn = qp(&big_q, n as i32);
    let qmn = qp(&big_q, -(n as i32));
    let ratio = TermRatio::new(q.clone(), 0)
        .up(a.clone() * qp(q, 2), 3)
        .down(a.clone() / q, 3)
        .up(qmn.clone(), 2)
        .up(a.clone() * &qn, 2)
        .up(a.clone() / q, 2)
        .up(u.clone() / q, 1)
        .up(v.clone() / q, 1)
        .up(big_q.clone() * a / (u.clone() * v), 1)
        .down(big_q.clone() * a / u, 2)
        .down(big_q.clone() * a / v, 2)
        .down(u.clone() * v / q, 2)
        .down(q.clone(), 1)
        .down(a.clone() * &qn, 1)
        .down(qmn, 1);
    HyperSeries::new(one(), ratio, q.clone())
}

fn chu_quadratic_lhs(p: &ParamPoint) -> Result<Rational> {
    let (q, a, u, v) = quadratic_params(p)?;
    let n = p.count("n")?;
    chu_quadratic_series(&q, &a, &u, &v, n).partial_sum(n + 1)
}

fn chu_quadratic_rhs(p: &ParamPoint) -> Result<Rational> {
    let (q, a, u, v) = quadratic_params(p)?;
    let n = p.count("n")?;
    let big_q = qp(&q, 2);
    let f = |x: Rational| qpoch_finite(&x, &big_q, n);
    let num = f(u.clone()) * f(v.clone()) * f(a.clone() * &q) * f(a.clone() * qp(&q, 3) / (u.clone() * &v));
    let den = f(q.clone()) * f(big_q.clone() * &a / &u) * f(big_q.clone() * &a / &v) * f(u.clone() * &v / &q);
    if den.cmp0() == std::cmp::Ordering::Equal {
        return Err(Error::ZeroDenominator { what: "terminating quadratic right side".into(), index: n });
    }
    Ok(num / den)
}

/// `sum (1-aq^(3k-1))/(1-a/q) (a/q;Q)_k (u/q,v/q,Qa/uv;q)_k / ((Qa/u,Qa/v,uv/q;Q)_k (q;q)_k) q^C(k+1,2)`
pub(crate) fn chu_quadratic_limit_lhs(q: &Rational, a: &Rational, u: &Rational, v: &Rational) -> HyperSeries<Rational> {
    let big_q = qp(q, 2);
    let ratio = TermRatio::new(q.clone(), 1)
        .up(a.clone() * qp(q, 2), 3)
        .down(a.clone() / q, 3)
        .up(a.clone() / q, 2)
        .up(u.clone() / q, 1)
        .up(v.clone() / q, 1)
        .up(big_q.clone() * a / (u.clone() * v), 1)
        .down(big_q.clone() * a / u, 2)
        .down(big_q.clone() * a / v, 2)
        .down(u.clone() * v / q, 2)
        .down(q.clone(), 1);
    HyperSeries::new(one(), ratio, q.clone())
}

fn chu_quadratic_limit_rhs(q: &Rational, a: &Rational, u: &Rational, v: &Rational, d: u32) -> Result<SeriesResult> {
    let big_q = qp(q, 2);
    let e = |x: Rational, s: i32| (x, big_q.clone(), s);
    prod(
        d,
        &[
            e(u.clone(), 1),
            e(v.clone(), 1),
            e(a.clone() * q, 1),
            e(a.clone() * qp(q, 3) / (u.clone() * v), 1),
            e(q.clone(), -1),
            e(big_q.clone() * a / u, -1),
            e(big_q.clone() * a / v, -1),
            e(u.clone() * v / q, -1),
        ],
    )
}

fn unit(name: &'static str) -> ParamSpec {
    ParamSpec::unit(name)
}

fn pts(items: &[&[(&str, i64, i64)]]) -> Vec<ParamPoint> {
    items.iter().map(|i| ParamPoint::from_fractions(i)).collect()
}

fn q_record(
    id: &'static str,
    anchor: &'static str,
    lhs: fn(&ParamPoint, u32) -> Result<SeriesResult>,
    rhs: fn(&ParamPoint, u32) -> Result<SeriesResult>,
) -> IdentityRecord {
    IdentityRecord::new(id, Family::QProofChain, anchor, vec![ParamSpec::q()], eval(lhs), eval(rhs)).points(q_points())
}

pub(crate) fn records() -> Vec<IdentityRecord> {
    let count = |max| ParamSpec::free("n", ParamDomain::Count { max }, "number of terms minus one");
    vec![
        IdentityRecord::new(
            "8phi7-sum",
            Family::QProofChain,
            "well-poised 8phi7 summation with argument c, parametrized by c = -w^2",
            vec![ParamSpec::q(), unit("a"), unit("w"), unit("d")],
            eval(phi87_sum_lhs),
            eval(phi87_sum_rhs),
        )
        .points(pts(&[
            &[("q", 1, 2), ("a", 1, 3), ("w", 1, 2), ("d", 2, 5)],
            &[("q", 3, 4), ("a", 2, 5), ("w", 3, 5), ("d", 1, 3)],
        ])),
        q_record(
            "5phi4-special",
            "5phi4 specialization of the 8phi7 summation at a = q^(1/2), c = -q, d = -q^(1/2), stored with q replaced by q^2",
            phi54_lhs,
            phi54_rhs,
        ),
        IdentityRecord::new(
            "8phi7-transform",
            Family::QProofChain,
            "8phi7 very-well-poised transformation with lambda = q a^2/(b c d)",
            vec![ParamSpec::q(), unit("a"), unit("b"), unit("c"), unit("d"), unit("e"), unit("f")],
            eval(phi87_transform_lhs),
            eval(phi87_transform_rhs),
        )
        .points(pts(&[
            &[("q", 1, 2), ("a", 1, 3), ("b", 3, 5), ("c", 1, 2), ("d", 2, 5), ("e", 3, 5), ("f", 1, 2)],
            &[("q", 1, 4), ("a", 1, 2), ("b", 1, 3), ("c", 2, 5), ("d", 1, 2), ("e", 3, 5), ("f", 2, 5)],
        ])),
        q_record(
            "thm-b-bridge",
            "odd-square series as a product multiple of the alternating cubic series",
            |p, d| sum(&thm_b_lhs(p.get("q")?), d),
            bridge_rhs,
        ),
        IdentityRecord::new(
            "2phi2-sum",
            Family::QProofChain,
            "2phi2 summation with argument -q, stored with q replaced by q^2",
            vec![ParamSpec::q(), unit("a"), unit("b")],
            eval(phi22_lhs),
            eval(phi22_rhs),
        )
        .points(pts(&[&[("q", 1, 2), ("a", 1, 3), ("b", 2, 5)], &[("q", 3, 4), ("a", 3, 5), ("b", 1, 2)]])),
        q_record(
            "2phi2-special",
            "2phi2 summation at a = b = q^(1/2)",
            phi22_special_lhs,
            phi22_special_rhs,
        ),
        IdentityRecord::new(
            "gr-cubic",
            Family::QProofChain,
            "nonterminating cubic summation with a 2phi1 correction term, stored verbatim",
            vec![ParamSpec::q(), unit("a"), unit("b"), unit("c")],
            eval(gr_cubic_lhs),
            eval(gr_cubic_rhs),
        )
        .points(pts(&[&[("q", 1, 2), ("a", 1, 3), ("b", 2, 5), ("c", 1, 2)]]))
        .sensitive(),
        {
            let l = exact(chu_cubic_terminating_lhs);
            let r = exact(chu_cubic_terminating_rhs);
            IdentityRecord::new(
                "chu-cubic-terminating",
                Family::QProofChain,
                "terminating cubic summation with c^3 = q^(-3n)",
                vec![ParamSpec::q(), unit("a"), unit("b"), count(40)],
                from_exact(l.clone()),
                from_exact(r.clone()),
            )
            .exact_sides(l, r)
            .points(pts(&[
                &[("q", 2, 5), ("a", 1, 2), ("b", 1, 3), ("n", 6, 1)],
                &[("q", 1, 3), ("a", 3, 5), ("b", 2, 5), ("n", 4, 1)],
            ]))
        },
        IdentityRecord::new(
            "chu-cubic-limit",
            Family::QProofChain,
            "n -> infinity limit of the terminating cubic summation",
            vec![ParamSpec::q(), ParamSpec::free("a", ParamDomain::Open(Rational::from(-1), Rational::from(1)), "a = 0 allowed"), unit("b")],
            eval(|p, d| {
                let (q, a, b) = (get(p, "q")?, get(p, "a")?, get(p, "b")?);
                sum(&chu_cubic_limit_lhs(&q, &(a.clone() * &a), &b), d)
            }),
            eval(|p, d| {
                let (q, a, b) = (get(p, "q")?, get(p, "a")?, get(p, "b")?);
                chu_cubic_limit_rhs(&q, &(a.clone() * &a), &b, d)
            }),
        )
        .points(pts(&[&[("q", 1, 2), ("a", 1, 3), ("b", 2, 5)], &[("q", 3, 4), ("a", 1, 2), ("b", 3, 5)]])),
        {
            let l = exact(chu_quadratic_lhs);
            let r = exact(chu_quadratic_rhs);
            IdentityRecord::new(
                "chu-quadratic",
                Family::QProofChain,
                "terminating quadratic summation, stored with q replaced by q^2",
                vec![ParamSpec::q(), unit("a"), unit("u"), unit("v"), count(40)],
                from_exact(l.clone()),
                from_exact(r.clone()),
            )
            .exact_sides(l, r)
            .points(pts(&[
                &[("q", 1, 2), ("a", 1, 3), ("u", 2, 5), ("v", 1, 2), ("n", 5, 1)],
                &[("q", 2, 3), ("a", 3, 5), ("u", 1, 3), ("v", 2, 5), ("n", 7, 1)],
            ]))
        },
        IdentityRecord::new(
            "chu-quadratic-limit",
            Family::QProofChain,
            "n -> infinity limit of the terminating quadratic summation, stored with q replaced by q^2",
            vec![ParamSpec::q(), unit("a"), unit("u"), unit("v")],
            eval(|p, d| {
                let (q, a, u, v) = quadratic_params(p)?;
                sum(&chu_quadratic_limit_lhs(&q, &a, &u, &v), d)
            }),
            eval(|p, d| {
                let (q, a, u, v) = quadratic_params(p)?;
                chu_quadratic_limit_rhs(&q, &a, &u, &v, d)
            }),
        )
        .points(pts(&[
            &[("q", 1, 2), ("a", 1, 3), ("u", 2, 5), ("v", 1, 2)],
            &[("q", 3, 4), ("a", 3, 5), ("u", 1, 3), ("v", 1, 2)],
        ])),
        q_record(
            "chu-quadratic-special",
            "quadratic summation at a = q^(3/2), u = v = q, stored with q replaced by q^2",
            |p, d| sum(&thm_e_lhs(p.get("q")?), d),
            |p, d| thm_e_rhs(p.get("q")?, d),
        ),
    ]
}
