//! The basic hypergeometric series `_{1+r}phi_s`.

use crate::error::{Error, Result};
use crate::precision::{BigReal, Scalar};

use super::series::{HyperSeries, SumOptions, TermRatio};
use super::{check_unit_interval, QPoint, SeriesResult};

/// Parameters `a_0..a_r`, `b_1..b_s`, argument `z` and base `q`.
#[derive(Clone, Debug)]
pub struct PhiSeriesSpec {
    pub upper: Vec<BigReal>,
    pub lower: Vec<BigReal>,
    pub z: BigReal,
    pub q: QPoint,
}

impl PhiSeriesSpec {
    pub fn new(upper: Vec<BigReal>, lower: Vec<BigReal>, z: BigReal, q: QPoint) -> Self {
        PhiSeriesSpec { upper, lower, z, q }
    }

    /// `s - r`, the power of `(-1)^k q^C(k,2)` in the terms.
    fn excess(&self) -> i64 {
        self.lower.len() as i64 - (self.upper.len() as i64 - 1)
    }

    /// Rejects lower parameters of the form `q^-m`, which make a denominator
    /// `(b; q)_k` vanish.
    fn check_poles(&self, q: &BigReal, digits: u32) -> Result<()> {
        let tol = BigReal::from_f64(10f64.powi(-((digits / 2).min(300) as i32)), digits);
        let ln_q = q.ln();
        for (j, b) in self.lower.iter().enumerate() {
            if *b < 1 {
                continue;
            }
            let m = -(&b.ln() / &ln_q);
            let nearest = BigReal::from_f64(m.to_f64().round(), digits);
            if (&m - &nearest).abs() <= tol {
                return Err(Error::ZeroDenominator {
                    what: format!("lower parameter b_{} = q^-{}", j + 1, nearest.to_f64()),
                    index: nearest.to_f64() as usize + 1,
                });
            }
        }
        Ok(())
    }

    /// The series in term-ratio form at `digits` digits.
    pub fn to_hyper(&self, digits: u32) -> Result<HyperSeries<BigReal>> {
        let q = self.q.to_bigreal(digits);
        check_unit_interval(&q)?;
        if self.upper.is_empty() {
            return Err(Error::Domain("phi series needs at least one upper parameter".into()));
        }
        let excess = self.excess();
        if excess < 0 && !self.z.is_zero() {
            return Err(Error::Domain(format!(
                "{} upper and {} lower parameters: the series diverges for z != 0",
                self.upper.len(),
                self.lower.len()
            )));
        }
        self.check_poles(&q, digits)?;
        let excess = excess.max(0) as u32;
        let mut scale = self.z.with_digits(digits);
        if excess % 2 == 1 {
            scale = -scale;
        }
        let mut ratio = TermRatio::new(scale, excess);
        for a in &self.upper {
            ratio = ratio.up(a.with_digits(digits), 1);
        }
        ratio = ratio.down(q.clone(), 1);
        for b in &self.lower {
            ratio = ratio.down(b.with_digits(digits), 1);
        }
        Ok(HyperSeries::new(BigReal::one(digits), ratio, q))
    }
}

/// Sums the series by its term-ratio recurrence with a certified tail bound.
pub fn phi_series(spec: &PhiSeriesSpec, digits: u32) -> Result<SeriesResult> {
    spec.to_hyper(digits)?.sum(digits, &SumOptions::default())
}

/// Cross-check oracle: the first `terms` terms, each built from explicit
/// q-Pochhammer products and powers.
pub fn phi_series_direct(spec: &PhiSeriesSpec, terms: usize, digits: u32) -> Result<BigReal> {
    let q = spec.q.to_bigreal(digits);
    check_unit_interval(&q)?;
    let excess = spec.excess();
    let mut sum = BigReal::zero(digits);
    for k in 0..terms {
        let mut num = BigReal::one(digits);
        for a in &spec.upper {
            num *= &super::qpoch_finite(&a.with_digits(digits), &q, k);
        }
        let mut den = super::qpoch_finite(&q, &q, k);
        for b in &spec.lower {
            den *= &super::qpoch_finite(&b.with_digits(digits), &q, k);
        }
        if den.is_zero() {
            return Err(Error::ZeroDenominator { what: "phi series denominator".into(), index: k });
        }
        let k = k as i64;
        let mut t = &(&num / &den) * &spec.z.with_digits(digits).pow_u(k as u32);
        if excess != 0 {
            let e = (k * (k - 1) / 2 * excess) as i32;
            t = &t * &q.powi(e);
            if (k * excess) % 2 != 0 {
                t = -t;
            }
        }
        sum += &t;
    }
    Ok(sum)
}
