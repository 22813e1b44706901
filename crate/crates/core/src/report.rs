//! Machine-readable run reports (schema version 1). Every number is written
//! as a decimal string; parameter values that have no terminating decimal
//! expansion are written as exact `p/r` literals.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::catalog::{VerificationReport, VerifyPolicy};
use crate::error::{Error, Result};
use crate::limits::LimitReport;
use crate::precision::{BigReal, Rational};

pub const SCHEMA_VERSION: u32 = 1;

/// Significant digits used for residuals, bounds and diagnostics.
const SMALL_DIGITS: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSettings {
    pub digits: u32,
    pub tolerance: String,
    pub q_grid: Vec<String>,
    pub workers: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultEntry {
    pub id: String,
    pub family: String,
    pub anchor: String,
    pub point: BTreeMap<String, String>,
    pub lhs: Option<String>,
    pub rhs: Option<String>,
    pub residual: Option<String>,
    pub bound: String,
    pub digits: u32,
    pub terms: usize,
    pub pass: bool,
    pub status: String,
    pub wall_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitEntry {
    pub id: String,
    pub exponent: u32,
    pub levels: [u32; 2],
    pub order: usize,
    pub value: String,
    pub diagnostic: String,
    pub flag: String,
    pub target: Option<String>,
    pub error: Option<String>,
    pub wall_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: String,
    pub generated_at: String,
    pub config: RunSettings,
    pub results: Vec<ResultEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub limits: Vec<LimitEntry>,
}

/// Exact decimal when the denominator is `2^a 5^b`, otherwise `p/r`.
pub fn rational_string(r: &Rational) -> String {
    let mut d = r.denom().clone();
    let mut counts = [0u32; 2];
    for (i, p) in [2u32, 5].into_iter().enumerate() {
        while d.is_divisible_u(p) {
            d /= p;
            counts[i] += 1;
        }
    }
    if d != 1 {
        return r.to_string();
    }
    let scale = counts[0].max(counts[1]);
    if scale == 0 {
        return r.numer().to_string();
    }
    let scaled = rug::Integer::from(r.numer() * rug::Integer::from(rug::Integer::u_pow_u(10, scale))) / r.denom();
    let neg = scaled < 0;
    let mut s = scaled.abs().to_string();
    while s.len() <= scale as usize {
        s.insert(0, '0');
    }
    s.insert(s.len() - scale as usize, '.');
    if neg {
        s.insert(0, '-');
    }
    s
}

fn big(v: &BigReal, significant: usize) -> String {
    v.to_decimal(significant)
}

impl ResultEntry {
    pub fn from_report(r: &VerificationReport) -> Self {
        let sig = r.digits as usize;
        ResultEntry {
            id: r.id.clone(),
            family: r.family.as_str().to_string(),
            anchor: r.anchor.clone(),
            point: r.point.iter().map(|(k, v)| (k.clone(), rational_string(v))).collect(),
            lhs: r.lhs.as_ref().map(|v| big(v, sig)),
            rhs: r.rhs.as_ref().map(|v| big(v, sig)),
            residual: r.residual.as_ref().map(|v| big(v, SMALL_DIGITS)),
            bound: big(r.bound.magnitude(), SMALL_DIGITS),
            digits: r.digits,
            terms: r.terms,
            pass: r.pass,
            status: r.status.to_string(),
            wall_ms: r.wall_ms as u64,
            note: r.note.clone(),
        }
    }
}

impl LimitEntry {
    pub fn from_report(r: &LimitReport) -> Self {
        LimitEntry {
            id: r.id.clone(),
            exponent: r.exponent,
            levels: [r.j0, r.j1],
            order: r.order,
            value: big(&r.value, 20),
            diagnostic: big(&r.diagnostic, SMALL_DIGITS),
            flag: r.flag.to_string(),
            target: r.target.as_ref().map(|t| big(t, 20)),
            error: r.error().map(|e| big(&e, SMALL_DIGITS)),
            wall_ms: r.wall_ms as u64,
        }
    }
}

impl RunSettings {
    pub fn from_policy(p: &VerifyPolicy) -> Self {
        RunSettings {
            digits: p.digits,
            tolerance: rational_string(&p.tolerance),
            q_grid: p.q_grid.iter().map(rational_string).collect(),
            workers: p.workers,
        }
    }
}

impl Report {
    pub fn new(policy: &VerifyPolicy, results: &[VerificationReport], limits: &[LimitReport], generated_at: String) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            generated_at,
            config: RunSettings::from_policy(policy),
            results: results.iter().map(ResultEntry::from_report).collect(),
            limits: limits.iter().map(LimitEntry::from_report).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Report = serde_json::from_str(text).map_err(|e| Error::Parse(format!("report: {e}")))?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!("unsupported schema_version {}", r.schema_version)));
        }
        Ok(r)
    }

    /// Copy with timestamps and wall-clock timings cleared, for comparing
    /// two runs.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.generated_at.clear();
        r.results.iter_mut().for_each(|e| e.wall_ms = 0);
        r.limits.iter_mut().for_each(|e| e.wall_ms = 0);
        r
    }

    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }
}
