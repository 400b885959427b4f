//! One-parameter Mittag-Leffler function on the real line.

use std::f64::consts::PI;

use super::series::{SeriesSum, MAX_TERMS};
use crate::error::{domain, Error, Result};
use crate::quad::integrate;

/// Beyond this magnitude of a negative argument the asymptotic expansion is used.
const ASYMPTOTIC_X: f64 = 1e6;
/// Largest cancellation tolerated from the power series before switching
/// to the integral representation.
const SERIES_CANCELLATION: f64 = 1e3;

/// `E_α(x) = Σ_k x^k / Γ(1+αk)` for `α ∈ (0, 1]`.
pub fn mittag_leffler(alpha: f64, x: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) || x.is_nan() {
        return Err(domain(
            "mittag_leffler",
            format!("need alpha in (0, 1], got alpha={alpha}, x={x}"),
        ));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if alpha == 1.0 {
        return Ok(x.exp());
    }
    if x > 0.0 {
        return Ok(series(alpha, x).value);
    }
    if x < -ASYMPTOTIC_X {
        return Ok(asymptotic(alpha, x));
    }
    let s = series(alpha, x);
    if s.is_reliable() && s.cancellation() <= SERIES_CANCELLATION {
        return Ok(s.value);
    }
    negative_integral(alpha, -x)
}

fn series(alpha: f64, x: f64) -> super::SeriesValue {
    let lx = x.abs().ln();
    let mut acc = SeriesSum::new();
    let mut k = 0usize;
    loop {
        let kf = k as f64;
        let ln_mag = kf * lx - libm::lgamma(1.0 + alpha * kf);
        let mag = ln_mag.exp();
        let term = if x < 0.0 && k % 2 == 1 { -mag } else { mag };
        if acc.push(term, mag) || k >= MAX_TERMS || !acc.sum.is_finite() {
            break;
        }
        k += 1;
    }
    acc.finish()
}

fn asymptotic(alpha: f64, x: f64) -> f64 {
    // E_α(x) ~ −Σ_{k≥1} x^{−k} / Γ(1 − αk) as x → −∞
    let mut sum = 0.0;
    for k in 1..=4 {
        let arg = 1.0 - alpha * k as f64;
        if arg <= 0.0 && arg == arg.round() {
            continue;
        }
        sum -= x.powi(-k) / libm::tgamma(arg);
    }
    sum
}

/// `E_α(−X) = (sin απ / 2π) ∫_ℝ exp(−X^{1/α} eᵘ) / (cosh αu + cos απ) du`,
/// a representation with a positive integrand.
fn negative_integral(alpha: f64, big_x: f64) -> Result<f64> {
    let t = big_x.powf(1.0 / alpha);
    let c = (alpha * PI).cos();
    let f = |u: f64| (-t * u.exp()).exp() / ((alpha * u).cosh() + c);
    let u_hi = (50.0 / t).ln().max(1.0);
    let u_lo = -40.0 / alpha;
    let mut total = 0.0;
    let mut pts = vec![u_lo];
    if u_lo < 0.0 && 0.0 < u_hi {
        pts.push(0.0);
    }
    pts.push(u_hi);
    for w in pts.windows(2) {
        total += integrate(f, w[0], w[1], 0.0, 1e-13)?.value;
    }
    // left tail: 1/(cosh αu + cos απ) ≈ 2e^{αu} and the exponential factor ≈ 1
    total += 2.0 * (alpha * u_lo).exp() / alpha;
    let value = (alpha * PI).sin() / (2.0 * PI) * total;
    if !(value.is_finite()) {
        return Err(Error::PrecisionLoss {
            func: "mittag_leffler",
            ratio: f64::INFINITY,
        });
    }
    Ok(value)
}
