//! Whittaker function `W_{a,b}` through Tricomi's `U`.

use crate::error::{domain, Result};
use crate::quad::integrate;

/// `W_{a,b}(x) = e^{−x/2} x^{b+1/2} U(b−a+1/2, 1+2b, x)` for `x > 0` and
/// `b − a + 1/2 > 0`.
pub fn whittaker_w(a: f64, b: f64, x: f64) -> Result<f64> {
    Ok(ln_whittaker_w(a, b, x)?.exp())
}

/// Logarithm of [`whittaker_w`].
pub fn ln_whittaker_w(a: f64, b: f64, x: f64) -> Result<f64> {
    let p = b - a + 0.5;
    if !(p > 0.0) || !(x > 0.0) || !x.is_finite() || !b.is_finite() {
        return Err(domain(
            "whittaker_w",
            format!("need b - a + 1/2 > 0 and x > 0, got a={a}, b={b}, x={x}"),
        ));
    }
    Ok(-0.5 * x + (b + 0.5) * x.ln() + ln_tricomi_u(p, 1.0 + 2.0 * b, x)?)
}

/// `ln U(p, q, x)` from `Γ(p)^{−1} ∫₀^∞ e^{−xt} t^{p−1} (1+t)^{q−p−1} dt`.
///
/// With `t = σ^{1/p}/x` the integrand becomes
/// `e^{−σ^{1/p}} (1 + σ^{1/p}/x)^{q−p−1}` on a bounded σ-range, free of the
/// `t^{p−1}` endpoint singularity.
fn ln_tricomi_u(p: f64, q: f64, x: f64) -> Result<f64> {
    let m = q - p - 1.0;
    let inv_p = 1.0 / p;
    // truncate where e^{−τ}(1+τ/x)^m has dropped 1e−18 below its peak
    let tau_peak = if m > 0.0 { (m - x).max(0.0) } else { 0.0 };
    let log_h = |tau: f64| -tau + m * (tau / x).ln_1p();
    let peak = log_h(tau_peak);
    let mut tau_max = tau_peak + 45.0;
    while log_h(tau_max) > peak - 41.5 {
        tau_max *= 1.5;
    }
    let sigma_max = tau_max.powf(p);
    let f = |s: f64| {
        let tau = s.powf(inv_p);
        (log_h(tau) - peak).exp()
    };
    let mut brk = vec![0.0];
    let s_peak = tau_peak.powf(p);
    if s_peak > 0.0 && s_peak < sigma_max {
        brk.push(s_peak);
    }
    brk.push(sigma_max);
    let mut total = 0.0;
    for w in brk.windows(2) {
        total += integrate(f, w[0], w[1], 0.0, 1e-14)?.value;
    }
    Ok(peak + total.ln() - p * x.ln() - libm::lgamma(p + 1.0))
}
