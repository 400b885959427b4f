//! Numerical checks of the identities satisfied by the constructed
//! subordinators. Every check returns a [`CheckReport`] comparing two
//! independently computed sides.

mod cm;
mod identities;
mod kendall;
mod laplace;
mod properties;
mod suites;

use serde::Serialize;

pub use crate::quad::{integrate_semiaxis, QuadratureResult};
pub use cm::{check_complete_monotonicity, cm_grid, CmFunction, MAX_CM_ORDER};
pub use identities::{
    check_integral_identity, check_stable_closed_forms, check_w_identities, IntegralIdentity, StableCase, WMode,
};
pub use kendall::check_kendall_identity;
pub use laplace::{check_laplace_identity, geom_stable_validated, laplace_grid, validated_limit};
pub use properties::{
    check_closed_form_phi, check_density_consistency, check_ig_closure, check_mean_identity, check_normalization,
    check_small_time_limit, check_tail_asymptote, fit_inverse_gaussian,
};
pub use suites::{
    cm_cases, consistency_families, laplace_families, normalization_families, run_suite, stable_grid, Suite,
    SuiteOptions,
};

use crate::error::Error;

/// How `pass` is decided from the two error measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Absolute,
    Relative,
    #[default]
    Either,
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tol: f64,
    pub pass: bool,
    #[serde(skip)]
    pub detail: String,
    #[serde(skip)]
    pub mode: Mode,
}

impl CheckReport {
    /// Builds a report with `abs_err = |lhs − rhs|`.
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64, mode: Mode) -> Self {
        let abs_err = if lhs == rhs { 0.0 } else { (lhs - rhs).abs() };
        Self::with_error(name, lhs, rhs, abs_err, tol, mode)
    }

    /// Builds a report from an explicit absolute error bound, for checks
    /// whose error includes more than `|lhs − rhs|`.
    pub fn with_error(name: impl Into<String>, lhs: f64, rhs: f64, abs_err: f64, tol: f64, mode: Mode) -> Self {
        let rel_err = if abs_err == 0.0 {
            0.0
        } else if rhs == 0.0 || rhs.is_infinite() {
            f64::INFINITY
        } else {
            abs_err / rhs.abs()
        };
        let ok = |e: f64| e <= tol;
        let pass = match mode {
            Mode::Absolute => ok(abs_err),
            Mode::Relative => ok(rel_err),
            Mode::Either => ok(abs_err) || ok(rel_err),
        };
        CheckReport {
            name: name.into(),
            lhs,
            rhs,
            abs_err,
            rel_err,
            tol,
            pass,
            detail: String::new(),
            mode,
        }
    }

    /// Relative comparison of two positive quantities given by their
    /// logarithms, so that values below the floating-point range still
    /// compare; `rel_err = |e^{ln a − ln b} − 1|`.
    pub fn from_logs(name: impl Into<String>, ln_lhs: f64, ln_rhs: f64, tol: f64) -> Self {
        let (lhs, rhs) = (ln_lhs.exp(), ln_rhs.exp());
        let rel_err = if ln_lhs == ln_rhs {
            0.0
        } else {
            (ln_lhs - ln_rhs).exp_m1().abs()
        };
        CheckReport {
            name: name.into(),
            lhs,
            rhs,
            abs_err: (lhs - rhs).abs(),
            rel_err,
            tol,
            pass: rel_err <= tol,
            detail: String::new(),
            mode: Mode::Relative,
        }
    }

    /// A failed report for a check that could not be evaluated.
    pub fn failed(name: impl Into<String>, tol: f64, err: &Error) -> Self {
        CheckReport {
            name: name.into(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            abs_err: f64::INFINITY,
            rel_err: f64::INFINITY,
            tol,
            pass: false,
            detail: err.to_string(),
            mode: Mode::Either,
        }
    }

    pub fn detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}
