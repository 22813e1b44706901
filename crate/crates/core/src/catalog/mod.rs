//! Registry of identities with two-sided evaluators, and the verification
//! driver that checks them.

mod chain;
mod qmain;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::precision::{
    eval_escalating, parse_rational, ten_pow_neg, to_bigreal, BigReal, BoundKind, ErrorBound, Rational,
    BOUND_DIGITS,
};
use crate::qcore::SeriesResult;


/// Grouping of the registry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "q-main")]
    QMain,
    #[serde(rename = "q-proof-chain")]
    QProofChain,
    #[serde(rename = "classical")]
    Classical,
    #[serde(rename = "telescoping")]
    Telescoping,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::QMain, Family::QProofChain, Family::Classical, Family::Telescoping];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::QMain => "q-main",
            Family::QProofChain => "q-proof-chain",
            Family::Classical => "classical",
            Family::Telescoping => "telescoping",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::Domain(format!("unknown family `{s}` (expected one of q-main, q-proof-chain, classical, telescoping)")))
    }
}

/// Assignment of rational values to named parameters.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct ParamPoint(BTreeMap<String, Rational>);

impl ParamPoint {
    pub fn new() -> Self {
        ParamPoint::default()
    }

    /// Builder form of [`ParamPoint::set`].
    pub fn with(mut self, name: &str, value: Rational) -> Self {
        self.set(name, value);
        self
    }

    /// Builds a point from `(name, numerator, denominator)` triples.
    pub fn from_fractions(items: &[(&str, i64, i64)]) -> Self {
        items.iter().fold(ParamPoint::new(), |p, (n, a, b)| p.with(n, Rational::from((*a, *b))))
    }

    pub fn set(&mut self, name: &str, value: Rational) {
        self.0.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Result<&Rational> {
        self.0.get(name).ok_or_else(|| Error::MissingParameter(name.to_string()))
    }

    pub fn real(&self, name: &str, digits: u32) -> Result<BigReal> {
        Ok(to_bigreal(self.get(name)?, digits))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Rational)> {
        self.0.iter()
    }

    /// Integer parameter (term counts).
    pub fn count(&self, name: &str) -> Result<usize> {
        let v = self.get(name)?;
        if *v.denom() != 1 || v.numer().cmp0() == std::cmp::Ordering::Less {
            return Err(Error::Domain(format!("{name} = {v} must be a nonnegative integer")));
        }
        v.numer().to_usize().ok_or_else(|| Error::Domain(format!("{name} = {v} is too large")))
    }

    /// Parses `name=value`, with the value a rational or decimal literal.
    pub fn parse_assignment(s: &str) -> Result<(String, Rational)> {
        let (name, value) = s
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("{s} (expected name=value)")))?;
        Ok((name.trim().to_string(), parse_rational(value)?))
    }
}

impl fmt::Display for ParamPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        f.write_str(&parts.join(", "))
    }
}

/// Allowed values of one parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParamDomain {
    /// Open interval `(lo, hi)`.
    Open(Rational, Rational),
    Nonzero,
    /// Integers `0..=max`.
    Count { max: u32 },
}

impl ParamDomain {
    pub fn unit() -> Self {
        ParamDomain::Open(Rational::new(), Rational::from(1))
    }

    fn check(&self, name: &str, v: &Rational) -> Result<()> {
        let ok = match self {
            ParamDomain::Open(lo, hi) => v > lo && v < hi,
            ParamDomain::Nonzero => v.cmp0() != std::cmp::Ordering::Equal,
            ParamDomain::Count { max } => *v.denom() == 1 && v.cmp0() != std::cmp::Ordering::Less && *v <= *max,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("{name} = {v} outside {self}")))
        }
    }
}

impl fmt::Display for ParamDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamDomain::Open(lo, hi) => write!(f, "({lo}, {hi})"),
            ParamDomain::Nonzero => f.write_str("nonzero"),
            ParamDomain::Count { max } => write!(f, "{{0..{max}}}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamRole {
    Free,
    Fixed,
}

#[derive(Clone, Debug)]
pub struct ParamSpec {
    pub name: &'static str,
    pub domain: ParamDomain,
    pub role: ParamRole,
    pub note: &'static str,
}

impl ParamSpec {
    pub fn free(name: &'static str, domain: ParamDomain, note: &'static str) -> Self {
        ParamSpec { name, domain, role: ParamRole::Free, note }
    }

    pub fn q() -> Self {
        ParamSpec::free("q", ParamDomain::unit(), "base, 0 < q < 1")
    }

    pub fn unit(name: &'static str) -> Self {
        ParamSpec::free(name, ParamDomain::unit(), "")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lhs,
    Rhs,
}

impl FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lhs" => Ok(Side::Lhs),
            "rhs" => Ok(Side::Rhs),
            _ => Err(Error::Domain(format!("unknown side `{s}` (expected lhs or rhs)"))),
        }
    }
}

/// Evaluates one side at a parameter point and working precision.
pub type Evaluator = Arc<dyn Fn(&ParamPoint, u32) -> Result<SeriesResult> + Send + Sync>;
/// Exact rational evaluation of one side.
pub type ExactEvaluator = Arc<dyn Fn(&ParamPoint) -> Result<Rational> + Send + Sync>;

/// Default precision and tolerance of a record.
#[derive(Clone, Debug)]
pub struct Policy {
    pub digits: u32,
    pub tolerance: Rational,
}

impl Default for Policy {
    fn default() -> Self {
        Policy { digits: 60, tolerance: ten_pow_neg(50) }
    }
}

/// One catalog entry.
#[derive(Clone)]
pub struct IdentityRecord {
    pub id: &'static str,
    pub family: Family,
    /// Short description of the displayed formula the record encodes.
    pub anchor: &'static str,
    pub params: Vec<ParamSpec>,
    pub policy: Policy,
    /// Residuals below this always pass (slowly converging classical sums).
    pub tolerance_floor: Option<Rational>,
    pub default_points: Vec<ParamPoint>,
    pub lhs: Evaluator,
    pub rhs: Evaluator,
    pub exact: Option<(ExactEvaluator, ExactEvaluator)>,
    /// The stored display is suspected to contain a misprint; failures are
    /// reported as flagged rather than failed.
    pub display_sensitive: bool,
}

impl fmt::Debug for IdentityRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IdentityRecord")
            .field("id", &self.id)
            .field("family", &self.family)
            .field("anchor", &self.anchor)
            .finish_non_exhaustive()
    }
}

impl IdentityRecord {
    pub(crate) fn new(
        id: &'static str,
        family: Family,
        anchor: &'static str,
        params: Vec<ParamSpec>,
        lhs: Evaluator,
        rhs: Evaluator,
    ) -> Self {
        IdentityRecord {
            id,
            family,
            anchor,
            params,
            policy: Policy::default(),
            tolerance_floor: None,
            default_points: Vec::new(),
            lhs,
            rhs,
            exact: None,
            display_sensitive: false,
        }
    }

    pub(crate) fn points(mut self, points: Vec<ParamPoint>) -> Self {
        self.default_points = points;
        self
    }

    pub(crate) fn exact_sides(mut self, lhs: ExactEvaluator, rhs: ExactEvaluator) -> Self {
        self.exact = Some((lhs, rhs));
        self
    }

    pub fn floor(mut self, tol: Rational) -> Self {
        self.tolerance_floor = Some(tol);
        self
    }

    pub(crate) fn sensitive(mut self) -> Self {
        self.display_sensitive = true;
        self
    }

    /// Replaces the right-hand side evaluator.
    pub fn with_rhs(mut self, rhs: Evaluator) -> Self {
        self.rhs = rhs;
        self.exact = None;
        self
    }

    /// True if the only parameter is the base q.
    pub fn q_only(&self) -> bool {
        self.params.len() == 1 && self.params[0].name == "q"
    }

    pub fn param_names(&self) -> Vec<&'static str> {
        self.params.iter().map(|p| p.name).collect()
    }

    /// Checks that every declared parameter is present, in its domain, and
    /// that no undeclared parameter is given.
    pub fn validate(&self, point: &ParamPoint) -> Result<()> {
        for spec in &self.params {
            let v = point.get(spec.name)?;
            spec.domain.check(spec.name, v)?;
        }
        for (name, _) in point.iter() {
            if !self.params.iter().any(|p| p.name == name) {
                return Err(Error::Domain(format!("`{}` takes no parameter `{name}` (parameters: {})", self.id, self.param_names().join(", "))));
            }
        }
        Ok(())
    }

    /// Evaluates one side without domain validation.
    pub fn evaluate(&self, side: Side, point: &ParamPoint, digits: u32) -> Result<SeriesResult> {
        match side {
            Side::Lhs => (self.lhs)(point, digits),
            Side::Rhs => (self.rhs)(point, digits),
        }
    }

    /// Points used by [`Registry::verify_all`].
    pub fn verification_points(&self, q_grid: &[Rational]) -> Vec<ParamPoint> {
        if self.q_only() {
            q_grid.iter().map(|q| ParamPoint::new().with("q", q.clone())).collect()
        } else if self.params.is_empty() {
            vec![ParamPoint::new()]
        } else {
            self.default_points.clone()
        }
    }
}

/// Outcome classes of a verification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Precision escalation exhausted; never counted as a pass.
    Inconclusive,
    /// Failure of a display-sensitive record.
    Flagged,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
            Status::Flagged => "flagged",
        })
    }
}

/// Result of verifying one record at one point.
#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub id: String,
    pub family: Family,
    pub anchor: String,
    pub point: ParamPoint,
    pub lhs: Option<BigReal>,
    pub rhs: Option<BigReal>,
    pub residual: Option<BigReal>,
    pub bound: ErrorBound,
    pub tolerance: Rational,
    pub digits: u32,
    pub terms: usize,
    /// Both sides were evaluated in exact rational arithmetic.
    pub exact: bool,
    pub pass: bool,
    pub status: Status,
    pub wall_ms: u128,
    pub note: Option<String>,
}

impl VerificationReport {
    /// `|residual| <= max(tolerance, 4 * bound)`.
    pub fn passes(residual: &BigReal, bound: &ErrorBound, tolerance: &Rational) -> bool {
        let tol = to_bigreal(tolerance, BOUND_DIGITS);
        let four_b = bound.magnitude() * 4;
        let limit = BigReal::max_abs(&tol, &four_b);
        residual.abs() <= limit
    }

    /// Builds a report from already computed sides.
    pub(crate) fn from_sides(
        record: &IdentityRecord,
        point: &ParamPoint,
        lhs: &SeriesResult,
        rhs: &SeriesResult,
        digits: u32,
        tolerance: &Rational,
        wall_ms: u128,
    ) -> VerificationReport {
        let residual = (&lhs.value - &rhs.value).abs();
        let bound = lhs.bound.combine(&rhs.bound).with_kind(BoundKind::Combined);
        let pass = VerificationReport::passes(&residual, &bound, tolerance);
        let status = if pass {
            Status::Pass
        } else if record.display_sensitive {
            Status::Flagged
        } else {
            Status::Fail
        };
        let note = if record.display_sensitive && !pass {
            Some("display-sensitive record: residual exceeds tolerance; the display is stored verbatim".to_string())
        } else {
            None
        };
        VerificationReport {
            id: record.id.to_string(),
            family: record.family,
            anchor: record.anchor.to_string(),
            point: point.clone(),
            lhs: Some(lhs.value.clone()),
            rhs: Some(rhs.value.clone()),
            residual: Some(residual),
            bound,
            tolerance: tolerance.clone(),
            digits,
            terms: lhs.terms_used + rhs.terms_used,
            exact: false,
            pass,
            status,
            wall_ms,
            note,
        }
    }
}

/// Settings of [`Registry::verify_all`].
#[derive(Clone, Debug)]
pub struct VerifyPolicy {
    pub digits: u32,
    pub tolerance: Rational,
    pub q_grid: Vec<Rational>,
    pub workers: usize,
    /// Restrict to these families; `None` runs everything.
    pub families: Option<Vec<Family>>,
}

impl Default for VerifyPolicy {
    fn default() -> Self {
        VerifyPolicy {
            digits: 60,
            tolerance: ten_pow_neg(50),
            q_grid: default_q_grid(),
            workers: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            families: None,
        }
    }
}

pub fn default_q_grid() -> Vec<Rational> {
    vec![Rational::from((1, 4)), Rational::from((1, 2)), Rational::from((3, 4))]
}

/// The identity registry, ordered by id.
#[derive(Clone, Debug)]
pub struct Registry {
    records: BTreeMap<&'static str, IdentityRecord>,
}

impl Registry {
    pub fn empty() -> Self {
        Registry { records: BTreeMap::new() }
    }

    /// Every identity shipped with the crate.
    pub fn standard() -> Self {
        let mut reg = Registry::empty();
        for r in qmain::records()
            .into_iter()
            .chain(chain::records())
            .chain(crate::telescoping::records())
            .chain(crate::limits::classical_records())
        {
            reg.insert(r);
        }
        reg
    }

    /// Inserts a record, replacing any record with the same id.
    pub fn insert(&mut self, record: IdentityRecord) {
        self.records.insert(record.id, record);
    }

    pub fn get(&self, id: &str) -> Result<&IdentityRecord> {
        self.records.get(id).ok_or_else(|| Error::UnknownIdentity(id.to_string()))
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records in lexicographic id order, optionally restricted to one family.
    pub fn list(&self, family: Option<Family>) -> Vec<&IdentityRecord> {
        self.records.values().filter(|r| family.map_or(true, |f| r.family == f)).collect()
    }

    pub fn eval_side(&self, id: &str, side: Side, point: &ParamPoint, digits: u32) -> Result<SeriesResult> {
        let record = self.get(id)?;
        record.validate(point)?;
        record.evaluate(side, point, digits)
    }

    /// Verifies one record at one point. Both sides go through the guarded
    /// double evaluation; exhausted escalation yields an inconclusive report.
    pub fn verify_identity(&self, id: &str, point: &ParamPoint, digits: u32, tolerance: &Rational) -> Result<VerificationReport> {
        let record = self.get(id)?;
        verify_record(record, point, digits, tolerance)
    }

    /// Runs every selected record over the q-grid (q-only records) or its
    /// default points. Results are ordered by id, then by point.
    pub fn verify_all(&self, policy: &VerifyPolicy) -> Vec<VerificationReport> {
        let jobs: Vec<(&IdentityRecord, ParamPoint)> = self
            .records
            .values()
            .filter(|r| policy.families.as_ref().map_or(true, |fs| fs.contains(&r.family)))
            .flat_map(|r| r.verification_points(&policy.q_grid).into_iter().map(move |p| (r, p)))
            .collect();
        let run = |(record, point): &(&IdentityRecord, ParamPoint)| {
            let tol = effective_tolerance(record, &policy.tolerance);
            verify_record(record, point, policy.digits, &tol).unwrap_or_else(|e| error_report(record, point, policy.digits, &tol, &e))
        };
        let pool = rayon::ThreadPoolBuilder::new().num_threads(policy.workers.max(1)).build();
        match pool {
            Ok(pool) => pool.install(|| jobs.par_iter().map(run).collect()),
            Err(_) => jobs.iter().map(run).collect(),
        }
    }
}

/// Left-side series of a q-main identity at a rational q.
pub fn qmain_series(id: &str, q: &Rational) -> Result<crate::qcore::HyperSeries<Rational>> {
    crate::qcore::check_unit_interval_rational(q)?;
    Ok(match id {
        "q-ramanujan-a" => qmain::ramanujan_a_lhs(q),
        "q-ramanujan-b" => qmain::ramanujan_b_lhs(q),
        "sun" => qmain::sun_lhs(q),
        "thm-b" => qmain::thm_b_lhs(q),
        "thm-c" => qmain::thm_c_lhs(q),
        "thm-d" => qmain::thm_d_lhs(q),
        "thm-e" => qmain::thm_e_lhs(q),
        _ => return Err(Error::UnknownIdentity(id.to_string())),
    })
}

/// `max(requested, record floor)`.
pub fn effective_tolerance(record: &IdentityRecord, requested: &Rational) -> Rational {
    match &record.tolerance_floor {
        Some(f) if f > requested => f.clone(),
        _ => requested.clone(),
    }
}

fn verify_record(record: &IdentityRecord, point: &ParamPoint, digits: u32, tolerance: &Rational) -> Result<VerificationReport> {
    record.validate(point)?;
    verify_unchecked(record, point, digits, tolerance)
}

/// Verification without the parameter-domain check, for callers that build
/// ad hoc records.
pub(crate) fn verify_unchecked(record: &IdentityRecord, point: &ParamPoint, digits: u32, tolerance: &Rational) -> Result<VerificationReport> {
    let start = Instant::now();
    if let Some((lhs, rhs)) = &record.exact {
        let l = lhs(point)?;
        let r = rhs(point)?;
        let residual = Rational::from(&l - &r).abs();
        let pass = residual.cmp0() == std::cmp::Ordering::Equal;
        return Ok(VerificationReport {
            id: record.id.to_string(),
            family: record.family,
            anchor: record.anchor.to_string(),
            point: point.clone(),
            lhs: Some(to_bigreal(&l, digits)),
            rhs: Some(to_bigreal(&r, digits)),
            residual: Some(to_bigreal(&residual, digits)),
            bound: ErrorBound::zero(BoundKind::Combined),
            tolerance: tolerance.clone(),
            digits,
            terms: 0,
            exact: true,
            pass,
            status: if pass { Status::Pass } else if record.display_sensitive { Status::Flagged } else { Status::Fail },
            wall_ms: start.elapsed().as_millis(),
            note: None,
        });
    }
    let side = |s: Side| eval_escalating(|d| record.evaluate(s, point, d), digits);
    let lhs = side(Side::Lhs);
    let rhs = side(Side::Rhs);
    match (lhs, rhs) {
        (Ok(l), Ok(r)) => {
            let ls = SeriesResult { value: l.value, terms_used: l.result.terms_used, bound: l.bound };
            let rs = SeriesResult { value: r.value, terms_used: r.result.terms_used, bound: r.bound };
            Ok(VerificationReport::from_sides(record, point, &ls, &rs, digits, tolerance, start.elapsed().as_millis()))
        }
        (Err(e @ Error::Inconclusive { .. }), _) | (_, Err(e @ Error::Inconclusive { .. })) => {
            let mut rep = error_report(record, point, digits, tolerance, &e);
            rep.wall_ms = start.elapsed().as_millis();
            Ok(rep)
        }
        (Err(e), _) | (_, Err(e)) => Err(e),
    }
}

/// Report for a record whose evaluation raised an error.
fn error_report(record: &IdentityRecord, point: &ParamPoint, digits: u32, tolerance: &Rational, e: &Error) -> VerificationReport {
    let status = match e {
        Error::Inconclusive { .. } | Error::PrecisionEscalation { .. } => Status::Inconclusive,
        _ => Status::Fail,
    };
    VerificationReport {
        id: record.id.to_string(),
        family: record.family,
        anchor: record.anchor.to_string(),
        point: point.clone(),
        lhs: None,
        rhs: None,
        residual: None,
        bound: ErrorBound::zero(BoundKind::Combined),
        tolerance: tolerance.clone(),
        digits,
        terms: 0,
        exact: false,
        pass: false,
        status,
        wall_ms: 0,
        note: Some(e.to_string()),
    }
}

/// Helpers shared by the record modules.
pub(crate) mod build {
    use super::*;
    use crate::qcore::{product_of, HyperSeries, SumOptions};

    #[cfg(test)]
    pub fn rat(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    /// `q^n` for a possibly negative exponent.
    pub fn qp(q: &Rational, n: i32) -> Rational {
        use crate::precision::Scalar;
        q.pow_i(n)
    }

    /// `prod (x; base)_inf^e` with rational arguments.
    pub fn prod(digits: u32, factors: &[(Rational, Rational, i32)]) -> Result<SeriesResult> {
        let f: Vec<(BigReal, BigReal, i32)> = factors
            .iter()
            .map(|(x, b, e)| (to_bigreal(x, digits), to_bigreal(b, digits), *e))
            .collect();
        product_of(&f, digits)
    }

    pub fn sum(series: &HyperSeries<Rational>, digits: u32) -> Result<SeriesResult> {
        series.to_real(digits).sum(digits, &SumOptions::default())
    }

    pub fn eval(f: impl Fn(&ParamPoint, u32) -> Result<SeriesResult> + Send + Sync + 'static) -> Evaluator {
        Arc::new(f)
    }

    pub fn exact(f: impl Fn(&ParamPoint) -> Result<Rational> + Send + Sync + 'static) -> ExactEvaluator {
        Arc::new(f)
    }

    /// Evaluator reporting an exact rational at the requested precision.
    pub fn from_exact(f: ExactEvaluator) -> Evaluator {
        Arc::new(move |p: &ParamPoint, d: u32| Ok(SeriesResult::exact(to_bigreal(&f(p)?, d))))
    }

    pub fn q_points() -> Vec<ParamPoint> {
        default_q_grid().into_iter().map(|q| ParamPoint::new().with("q", q)).collect()
    }
}
