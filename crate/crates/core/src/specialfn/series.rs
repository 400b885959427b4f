use serde::Serialize;

use crate::error::{Error, Result};

/// Refuse a sum whose largest term exceeds its value by more than this.
pub const CANCELLATION_CAP: f64 = 1e12;
/// Hard limit on the number of terms summed.
pub const MAX_TERMS: usize = 100_000;
/// A term is negligible once it is below this fraction of the partial sum.
pub const TERM_RTOL: f64 = 1e-17;

/// A numerically summed quantity together with its error diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    /// Estimated truncation plus roundoff bound.
    pub abs_err: f64,
    /// Largest magnitude among the summed terms.
    pub max_term: f64,
}

impl SeriesValue {
    pub fn exact(value: f64) -> Self {
        SeriesValue {
            value,
            abs_err: f64::EPSILON * value.abs(),
            max_term: value.abs(),
        }
    }

    /// Ratio of the largest term to the result; 1 when no cancellation took place.
    pub fn cancellation(&self) -> f64 {
        if self.max_term == 0.0 {
            1.0
        } else {
            self.max_term / self.value.abs()
        }
    }

    pub fn is_reliable(&self) -> bool {
        self.value.is_finite() && self.cancellation() <= CANCELLATION_CAP
    }

    /// The value, or a precision-loss error if the sum is not trustworthy.
    pub fn checked(&self, func: &'static str) -> Result<f64> {
        if self.is_reliable() {
            Ok(self.value)
        } else {
            Err(Error::PrecisionLoss {
                func,
                ratio: self.cancellation(),
            })
        }
    }
}

/// Running state of an alternating or mixed-sign series.
///
/// Convergence is judged on a caller-supplied magnitude envelope rather than
/// on the term itself, since individual terms can vanish (e.g. a `sin` factor
/// at a multiple of π) long before the series has converged.
pub(crate) struct SeriesSum {
    pub sum: f64,
    pub abs_sum: f64,
    pub max_term: f64,
    pub last_envelope: f64,
    small_run: usize,
    pub n: usize,
}

impl SeriesSum {
    pub fn new() -> Self {
        SeriesSum {
            sum: 0.0,
            abs_sum: 0.0,
            max_term: 0.0,
            last_envelope: f64::INFINITY,
            small_run: 0,
            n: 0,
        }
    }

    /// Adds `term`; returns true once three consecutive envelopes were
    /// negligible and decreasing.
    pub fn push(&mut self, term: f64, envelope: f64) -> bool {
        self.sum += term;
        self.abs_sum += term.abs();
        self.max_term = self.max_term.max(term.abs());
        self.n += 1;
        let decreasing = envelope <= self.last_envelope;
        self.last_envelope = envelope;
        if decreasing && envelope < TERM_RTOL * self.sum.abs() {
            self.small_run += 1;
        } else {
            self.small_run = 0;
        }
        self.small_run >= 3
    }

    pub fn finish(&self) -> SeriesValue {
        // each term carries a few ulps from lgamma, exp and sin
        let roundoff = 8.0 * f64::EPSILON * self.abs_sum;
        let trunc = if self.last_envelope.is_finite() {
            self.last_envelope
        } else {
            0.0
        };
        SeriesValue {
            value: self.sum,
            abs_err: roundoff + trunc,
            max_term: self.max_term,
        }
    }
}
