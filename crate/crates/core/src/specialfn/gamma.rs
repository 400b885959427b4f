use crate::error::{domain, Result};

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain("log_gamma", format!("x must be positive, got {x}")));
    }
    Ok(libm::lgamma(x))
}

/// `ln (a)_k = ln Γ(a+k) − ln Γ(a)`, exactly 0 for `k = 0`.
pub fn pochhammer_log(a: f64, k: u64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(domain("pochhammer_log", format!("a must be positive, got {a}")));
    }
    if k == 0 {
        return Ok(0.0);
    }
    if k < 64 {
        let mut s = 0.0;
        let mut prod = 1.0f64;
        for j in 0..k {
            prod *= a + j as f64;
            if prod > 1e280 {
                s += prod.ln();
                prod = 1.0;
            }
        }
        return Ok(s + prod.ln());
    }
    Ok(libm::lgamma(a + k as f64) - libm::lgamma(a))
}

/// Argument above which [`ln_gamma_kernel`] switches to the Stirling form.
const KERNEL_STIRLING_MIN: f64 = 20.0;

/// `ln Γ(1+x) − (x ln x − x + ½ ln 2πx)` for `x ≥ 20`.
fn stirling_remainder(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))))
}

/// `(s−1) ln u − u − ln Γ(1+s)` for `s ≥ 0`, `u > 0`. For large `s` the
/// leading terms are combined analytically so that nothing cancels when `s`
/// and `u` are large and close.
pub fn ln_gamma_kernel(s: f64, u: f64) -> Result<f64> {
    if !(s >= 0.0) || !(u > 0.0) || !s.is_finite() || !u.is_finite() {
        return Err(domain(
            "ln_gamma_kernel",
            format!("need s >= 0 and u > 0, got s={s}, u={u}"),
        ));
    }
    if s < KERNEL_STIRLING_MIN {
        return Ok((s - 1.0) * u.ln() - u - libm::lgamma(1.0 + s));
    }
    // s ln(u/s) + s − u = u (d − (1+d) ln(1+d)) with s = u(1+d)
    let d = (s - u) / u;
    let core = u * (d - (1.0 + d) * d.ln_1p());
    Ok(core - u.ln() - 0.5 * (2.0 * std::f64::consts::PI * s).ln() - stirling_remainder(s))
}
