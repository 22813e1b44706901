//! The seven main q-analogues. Left sides are term-ratio series in q, right
//! sides infinite products.

use super::build::{eval, prod, qp, sum};
use super::{Family, IdentityRecord, ParamPoint, ParamSpec};
use crate::error::Result;
use crate::precision::{to_bigreal, Rational, Scalar};
use crate::qcore::{HyperSeries, SeriesResult, TermRatio};

fn q_of(p: &ParamPoint) -> Result<Rational> {
    Ok(p.get("q")?.clone())
}

fn one() -> Rational {
    Rational::from(1)
}

/// `sum q^(k^2) (1-q^(6k+1))/(1-q) (q;q^2)_k^2 (q^2;q^4)_k / (q^4;q^4)_k^3`
pub(crate) fn ramanujan_a_lhs(q: &Rational) -> HyperSeries<Rational> {
    let ratio = TermRatio::new(q.clone(), 2)
        .up(qp(q, 7), 6)
        .up(q.clone(), 2)
        .up(q.clone(), 2)
        .up(qp(q, 2), 4)
        .down(q.clone(), 6)
        .down(qp(q, 4), 4)
        .down(qp(q, 4), 4)
        .down(qp(q, 4), 4);
    HyperSeries::new(one(), ratio, q.clone())
}

/// `sum (-1)^k q^(3k^2) (1-q^(6k+1))/(1-q) (q;q^2)_k^3 / (q^4;q^4)_k^3`
pub(crate) fn ramanujan_b_lhs(q: &Rational) -> HyperSeries<Rational> {
    let ratio = TermRatio::new(-qp(q, 3), 6)
        .up(qp(q, 7), 6)
        .up(q.clone(), 2)
        .up(q.clone(), 2)
        .up(q.clone(), 2)
        .down(q.clone(), 6)
        .down(qp(q, 4), 4)
        .down(qp(q, 4), 4)
        .down(qp(q, 4), 4);
    HyperSeries::new(one(), ratio, q.clone())
}

/// `sum (-1)^k q^(2k) (1+q^(2k+1)) / (1-q^(2k+1))^3`
pub(crate) fn sun_lhs(q: &Rational) -> HyperSeries<Rational> {
    let first = (one() + q) / (one() - q).pow_u(3);
    let ratio = TermRatio::new(-qp(q, 2), 0)
        .up(-qp(q, 3), 2)
        .up(q.clone(), 2)
        .up(q.clone(), 2)
        .up(q.clone(), 2)
        .down(-q.clone(), 2)
        .down(qp(q, 3), 2)
        .down(qp(q, 3), 2)
        .down(qp(q, 3), 2);
    HyperSeries::new(first, ratio, q.clone())
}

/// `sum (1+q^(4k+2))/(1+q^(2k+1))^2 q^(2k)/(1-q^(2k+1))^2`
pub(crate) fn thm_b_lhs(q: &Rational) -> HyperSeries<Rational> {
    let first = (one() + qp(q, 2)) / ((one() + q).pow_u(2) * (one() - q).pow_u(2));
    let ratio = TermRatio::new(qp(q, 2), 0)
        .up(-qp(q, 6), 4)
        .up(-q.clone(), 2)
        .up(-q.clone(), 2)
        .up(q.clone(), 2)
        .up(q.clone(), 2)
        .down(-qp(q, 2), 4)
        .down(-qp(q, 3), 2)
        .down(-qp(q, 3), 2)
        .down(qp(q, 3), 2)
        .down(qp(q, 3), 2);
    HyperSeries::new(first, ratio, q.clone())
}

/// `sum (q;q)_k / (q;q^2)_(k+1) q^C(k+1,2)`
pub(crate) fn thm_c_lhs(q: &Rational) -> HyperSeries<Rational> {
    let ratio = TermRatio::new(q.clone(), 1).up(q.clone(), 1).down(qp(q, 3), 2);
    HyperSeries::new(one() / (one() - q), ratio, q.clone())
}

/// `sum (q;q)_k^2 / (q;q)_(2k+1) q^(k^2+k)`
pub(crate) fn thm_d_lhs(q: &Rational) -> HyperSeries<Rational> {
    let ratio = TermRatio::new(qp(q, 2), 2)
        .up(q.clone(), 1)
        .up(q.clone(), 1)
        .down(qp(q, 2), 2)
        .down(qp(q, 3), 2);
    HyperSeries::new(one() / (one() - q), ratio, q.clone())
}

/// `sum (1-q^(3k+2))/(1-q^2) (q^2;q^2)_k (q;q)_k^2 / (q^3;q^2)_k^3 q^C(k+1,2)`
pub(crate) fn thm_e_lhs(q: &Rational) -> HyperSeries<Rational> {
    let ratio = TermRatio::new(q.clone(), 1)
        .up(qp(q, 5), 3)
        .up(qp(q, 2), 2)
        .up(q.clone(), 1)
        .up(q.clone(), 1)
        .down(qp(q, 2), 3)
        .down(qp(q, 3), 2)
        .down(qp(q, 3), 2)
        .down(qp(q, 3), 2);
    HyperSeries::new(one(), ratio, q.clone())
}

pub(crate) fn ramanujan_a_rhs(q: &Rational, d: u32) -> Result<SeriesResult> {
    let p = prod(d, &[(qp(q, 2), qp(q, 4), 1), (qp(q, 6), qp(q, 4), 1), (qp(q, 4), qp(q, 4), -2)])?;
    Ok(p.scale(&to_bigreal(&(one() + q), d)))
}

pub(crate) fn ramanujan_b_rhs(q: &Rational, d: u32) -> Result<SeriesResult> {
    prod(d, &[(qp(q, 3), qp(q, 4), 1), (qp(q, 5), qp(q, 4), 1), (qp(q, 4), qp(q, 4), -2)])
}

pub(crate) fn sun_rhs(q: &Rational, d: u32) -> Result<SeriesResult> {
    prod(d, &[(qp(q, 2), qp(q, 4), 2), (qp(q, 4), qp(q, 4), 6), (q.clone(), qp(q, 2), -4)])
}

pub(crate) fn thm_b_rhs(q: &Rational, d: u32) -> Result<SeriesResult> {
    prod(d, &[(-qp(q, 2), qp(q, 2), 2), (qp(q, 4), qp(q, 4), 4), (qp(q, 2), qp(q, 4), -2)])
}

pub(crate) fn thm_c_rhs(q: &Rational, d: u32) -> Result<SeriesResult> {
    prod(d, &[(qp(q, 2), qp(q, 2), 2), (q.clone(), qp(q, 2), -2)])
}

pub(crate) fn thm_d_rhs(q: &Rational, d: u32) -> Result<SeriesResult> {
    prod(d, &[(qp(q, 3), qp(q, 3), 2), (q.clone(), qp(q, 3), -1), (qp(q, 2), qp(q, 3), -1)])
}

pub(crate) fn thm_e_rhs(q: &Rational, d: u32) -> Result<SeriesResult> {
    prod(d, &[(qp(q, 4), qp(q, 2), 1), (qp(q, 2), qp(q, 2), 3), (q.clone(), qp(q, 2), -1), (qp(q, 3), qp(q, 2), -3)])
}

type Lhs = fn(&Rational) -> HyperSeries<Rational>;
type Rhs = fn(&Rational, u32) -> Result<SeriesResult>;

fn record(id: &'static str, anchor: &'static str, lhs: Lhs, rhs: Rhs) -> IdentityRecord {
    IdentityRecord::new(
        id,
        Family::QMain,
        anchor,
        vec![ParamSpec::q()],
        eval(move |p, d| sum(&lhs(&q_of(p)?), d)),
        eval(move |p, d| rhs(&q_of(p)?, d)),
    )
    .points(super::build::q_points())
}

pub(crate) fn records() -> Vec<IdentityRecord> {
    vec![
        record(
            "q-ramanujan-a",
            "q-analogue of Ramanujan's series sum (6k+1)(1/2)_k^3/(k!^3 4^k) = 4/pi",
            ramanujan_a_lhs,
            ramanujan_a_rhs,
        ),
        record(
            "q-ramanujan-b",
            "q-analogue of Ramanujan's alternating series sum (-1)^k (6k+1)(1/2)_k^3/(k!^3 8^k) = 2 sqrt(2)/pi",
            ramanujan_b_lhs,
            ramanujan_b_rhs,
        ),
        record(
            "sun",
            "q-analogue of sum (-1)^k/(2k+1)^3 = pi^3/32 with (q^2;q^4)^2 (q^4;q^4)^6/(q;q^2)^4 on the right",
            sun_lhs,
            sun_rhs,
        ),
        record("thm-b", "q-analogue of sum 1/k^2 = pi^2/6 over odd squares", thm_b_lhs, thm_b_rhs),
        record("thm-c", "q-analogue of sum k!/((3/2)_k 2^k) = pi/2", thm_c_lhs, thm_c_rhs),
        record("thm-d", "q-analogue of sum k!/((3/2)_k 4^k) = 2 pi/(3 sqrt 3)", thm_d_lhs, thm_d_rhs),
        record("thm-e", "q-analogue of sum k!^3 (3k+2)/((3/2)_k^3 4^k) = pi^2/4", thm_e_lhs, thm_e_rhs),
    ]
}
