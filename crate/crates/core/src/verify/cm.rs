use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::ln_geom_stable_series;
use crate::specialfn::{bessel_i_scaled, ln_stable_g, log_gamma};

use super::{CheckReport, Mode};

/// Highest divided-difference order accepted.
pub const MAX_CM_ORDER: usize = 8;

/// Functions expected to be completely monotone, plus a control that is not.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CmFunction {
    /// `y^{cy} e^{−y} / Γ(1+cy)`.
    F1 { c: f64 },
    /// `y^{−1/α} g(y^{1−1/α}; α)`, `α ∈ (0,1)`.
    F2 { alpha: f64 },
    /// `y^{−1/α} g(−y^{1−1/α}; α)`, `α ∈ (1,2)`.
    F3 { alpha: f64 },
    /// `e^{−y} I_{cy}(y)`.
    F4 { c: f64 },
    /// `Σ_k (−1)^k (1+cy)_k y^{α(cy+k)} / (Γ(1+α(cy+k)) k!)`, `α ∈ (0,1)`.
    F5 { c: f64, alpha: f64 },
    /// `sin y + 2`.
    NegativeControl,
}

impl CmFunction {
    pub fn name(&self) -> &'static str {
        match self {
            CmFunction::F1 { .. } => "f1",
            CmFunction::F2 { .. } => "f2",
            CmFunction::F3 { .. } => "f3",
            CmFunction::F4 { .. } => "f4",
            CmFunction::F5 { .. } => "f5",
            CmFunction::NegativeControl => "negative_control",
        }
    }

    /// Checks the parameter ranges of the function.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        match *self {
            CmFunction::F1 { c } | CmFunction::F4 { c } if !(c > 0.0) => bad(format!("c must be positive, got {c}")),
            CmFunction::F2 { alpha } if !(alpha > 0.0 && alpha < 1.0) => {
                bad(format!("f2 needs alpha in (0,1), got {alpha}"))
            }
            CmFunction::F3 { alpha } if !(alpha > 1.0 && alpha < 2.0) => {
                bad(format!("f3 needs alpha in (1,2), got {alpha}"))
            }
            CmFunction::F5 { c, alpha } if !(c > 0.0) || !(alpha > 0.0 && alpha < 1.0) => {
                bad(format!("f5 needs c > 0 and alpha in (0,1), got c={c}, alpha={alpha}"))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, y: f64) -> Result<f64> {
        Ok(match *self {
            CmFunction::F1 { c } => (c * y * y.ln() - y - log_gamma(1.0 + c * y)?).exp(),
            CmFunction::F2 { alpha } => (-y.ln() / alpha + ln_stable_g(y.powf(1.0 - 1.0 / alpha), alpha)?).exp(),
            CmFunction::F3 { alpha } => (-y.ln() / alpha + ln_stable_g(-y.powf(1.0 - 1.0 / alpha), alpha)?).exp(),
            CmFunction::F4 { c } => bessel_i_scaled(c * y, y)?,
            CmFunction::F5 { c, alpha } => ln_geom_stable_series(c * y, y, alpha)?.exp(),
            CmFunction::NegativeControl => y.sin() + 2.0,
        })
    }
}

/// `n` log-spaced points from `lo` to `hi`.
pub fn cm_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1).max(1) as f64).exp())
        .collect()
}

/// Tests `(−1)^k f[x_i, …, x_{i+k}] ≥ −tol · scale` for all `k ≤ max_order`,
/// where `scale = Σ_j |f(x_j)| / Π_{l≠j} |x_j − x_l|` bounds the rounding
/// error of the divided difference. `lhs` is the most negative normalised
/// value found.
#[allow(clippy::needless_range_loop)]
pub fn check_complete_monotonicity(f: CmFunction, max_order: usize, grid: &[f64], tol: f64) -> Result<CheckReport> {
    f.validate()?;
    if max_order == 0 || max_order > MAX_CM_ORDER {
        return Err(Error::InvalidParameter(format!(
            "max_order must be in 1..={MAX_CM_ORDER}, got {max_order}"
        )));
    }
    if grid.len() <= max_order || grid.windows(2).any(|w| !(w[1] > w[0])) || !(grid[0] > 0.0) {
        return Err(Error::InvalidParameter(
            "grid must be increasing, positive and longer than max_order".into(),
        ));
    }
    let vals: Vec<f64> = grid.iter().map(|&y| f.eval(y)).collect::<Result<_>>()?;
    let mut dd = vals.clone();
    let mut worst = f64::INFINITY;
    let mut at = (0, 0);
    for k in 1..=max_order {
        for i in 0..grid.len() - k {
            dd[i] = (dd[i + 1] - dd[i]) / (grid[i + k] - grid[i]);
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        for i in 0..grid.len() - k {
            let scale: f64 = (i..=i + k)
                .map(|j| {
                    let denom: f64 = (i..=i + k)
                        .filter(|&l| l != j)
                        .map(|l| (grid[j] - grid[l]).abs())
                        .product();
                    vals[j].abs() / denom
                })
                .sum();
            let v = sign * dd[i] / scale;
            if v < worst {
                worst = v;
                at = (k, i);
            }
        }
    }
    let name = format!(
        "complete_monotonicity[{}, order {max_order}, {} points on [{:.3}, {:.3}]]",
        f.name(),
        grid.len(),
        grid[0],
        grid[grid.len() - 1]
    );
    Ok(
        CheckReport::with_error(name, worst, 0.0, (-worst).max(0.0), tol, Mode::Absolute)
            .detail(format!("worst at order {}, grid index {}", at.0, at.1)),
    )
}
