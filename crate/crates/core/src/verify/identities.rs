use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exponents::{build_exponent, FamilyParams};
use crate::quad::{integrate_semiaxis, integrate_semiaxis_scaled, integrate_tail, try_integrate_breaks};
use crate::specialfn::{bessel_k, lambert_w0, lambert_wm1, ln_bessel_i_scaled, ln_stable_g, ln_whittaker_w, log_gamma};

use super::{CheckReport, Mode};

/// The two Lambert-W expansions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WMode {
    /// `Σ r(n+r)^{n−1} zⁿ/n! = e^{−rW₀(−z)}` for `|z| < 1/e`.
    SeriesW0,
    /// `−∫_{−r}^∞ r(w+r)^{w−1}/Γ(1+w) t^w dw = e^{−rW₋₁(−t)}` for `r < 0`,
    /// `t ∈ (0, 1/e)`.
    IntegralWm1,
}

/// Checks one of the Lambert-W identities at `(r, z)`.
pub fn check_w_identities(r: f64, z: f64, mode: WMode, tol: f64) -> Result<CheckReport> {
    let inv_e = (-1f64).exp();
    match mode {
        WMode::SeriesW0 => {
            if !(z.abs() < inv_e) || !r.is_finite() {
                return Err(domain(
                    "check_w_identities",
                    format!("series needs |z| < 1/e, got z={z}"),
                ));
            }
            let lhs = w0_series(r, z)?;
            let rhs = (-r * lambert_w0(-z)?).exp();
            Ok(CheckReport::new(
                format!("w0_series[r={r}, z={z}]"),
                lhs,
                rhs,
                tol,
                Mode::Relative,
            ))
        }
        WMode::IntegralWm1 => {
            if !(r < 0.0) || !(z > 0.0 && z < inv_e) {
                return Err(domain(
                    "check_w_identities",
                    format!("integral needs r < 0 and t in (0, 1/e), got r={r}, t={z}"),
                ));
            }
            let ln_t = z.ln();
            // with u = w + r the integrand is |r| u^{w−1} t^w / Γ(1+w), w = u − r
            let f = |u: f64| -> Result<f64> {
                let w = u - r;
                Ok((r.abs().ln() + (w - 1.0) * u.ln() - log_gamma(1.0 + w)? + w * ln_t).exp())
            };
            let q = integrate_semiaxis(f, 1e-3 * tol)?;
            let rhs = (-r * lambert_wm1(-z)?).exp();
            Ok(
                CheckReport::new(format!("wm1_integral[r={r}, t={z}]"), q.value, rhs, tol, Mode::Relative)
                    .detail(format!("quadrature error {:.3e}", q.abs_err_est)),
            )
        }
    }
}

fn w0_series(r: f64, z: f64) -> Result<f64> {
    if r == 0.0 || z == 0.0 {
        return Ok(1.0);
    }
    let mut sum = 1.0;
    let mut prev = f64::INFINITY;
    for n in 1..1_000_000u64 {
        let nf = n as f64;
        let base = nf + r;
        if n == 1 {
            sum += r * z;
            continue;
        }
        if base == 0.0 {
            prev = 0.0;
            continue;
        }
        let mag = (r.abs().ln() + (nf - 1.0) * base.abs().ln() + nf * z.abs().ln() - log_gamma(nf + 1.0)?).exp();
        let mut sign = r.signum();
        if base < 0.0 && n % 2 == 0 {
            sign = -sign;
        }
        if z < 0.0 && n % 2 == 1 {
            sign = -sign;
        }
        sum += sign * mag;
        if mag <= prev && mag < 1e-18 * sum.abs() && base > 0.0 {
            return Ok(sum);
        }
        prev = mag;
    }
    Err(Error::NoConvergence {
        func: "w0_series",
        iterations: 1_000_000,
        lo: r,
        hi: z,
    })
}

/// Integral identities obtained from the Laplace identity of families whose
/// transition density has an explicit special-function form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegralIdentity {
    /// `StableLow(1, 1/3)`, through `K_{1/3}`.
    StableOneThird,
    /// `StableLow(1, 2/3)`, through `W_{1/2,1/6}`.
    StableTwoThirds,
    /// `StableHigh(1, 3/2)`, through `W_{1/2,1/6}`.
    StableThreeHalves,
    /// `Bessel(c, θ)`, through the scaled `I_ν`.
    Bessel { c: f64, theta: f64 },
}

impl IntegralIdentity {
    pub fn name(&self) -> &'static str {
        match self {
            IntegralIdentity::StableOneThird => "stable_one_third",
            IntegralIdentity::StableTwoThirds => "stable_two_thirds",
            IntegralIdentity::StableThreeHalves => "stable_three_halves",
            IntegralIdentity::Bessel { .. } => "bessel",
        }
    }
}

/// Checks an integral identity at time `t` and argument `q`.
pub fn check_integral_identity(identity: IntegralIdentity, t: f64, q: f64, tol: f64) -> Result<CheckReport> {
    if !(t > 0.0) || !(q > 0.0) {
        return Err(Error::InvalidParameter(format!("need t > 0, q > 0; got t={t}, q={q}")));
    }
    let qtol = 1e-3 * tol;
    let name = match identity {
        IntegralIdentity::Bessel { c, theta } => {
            format!("integral_identity[bessel(c={c}, theta={theta}), t={t}, q={q}]")
        }
        i => format!("integral_identity[{}, t={t}, q={q}]", i.name()),
    };
    let (lhs, rhs) = match identity {
        IntegralIdentity::StableOneThird => {
            let phi = build_exponent(FamilyParams::stable_low(1.0, 1.0 / 3.0)?)?
                .invert_phi(q)?
                .value;
            let f = |y: f64| -> Result<f64> {
                let k = bessel_k(1.0 / 3.0, 2.0 / 3.0 * ((t + y).powi(3) / (3.0 * y)).sqrt())?;
                if k == 0.0 {
                    return Ok(0.0);
                }
                Ok(((t + y) / y).sqrt() / y * k * (-q * y).exp())
            };
            let lhs = integrate_semiaxis_scaled(f, t, qtol)?.value;
            (lhs, 3.0 * PI / t * (t * (q - phi)).exp())
        }
        IntegralIdentity::StableTwoThirds => {
            let phi = build_exponent(FamilyParams::stable_low(1.0, 2.0 / 3.0)?)?
                .invert_phi(q)?
                .value;
            let f = |y: f64| -> Result<f64> {
                let a = (t + y).powi(3) / (y * y);
                let lw = ln_whittaker_w(0.5, 1.0 / 6.0, 4.0 / 27.0 * a)?;
                Ok((lw - 2.0 / 27.0 * a - (y * (t + y)).ln() - q * y).exp())
            };
            let lhs = integrate_semiaxis_scaled(f, t, qtol)?.value;
            (lhs, (PI / 3.0).sqrt() / t * (t * (q - phi)).exp())
        }
        IntegralIdentity::StableThreeHalves => {
            let phi = build_exponent(FamilyParams::stable_high(1.0, 1.5)?)?
                .invert_phi(q)?
                .value;
            let lhs = three_halves_lhs(t, q, qtol)?;
            (lhs, (PI / 3.0).sqrt() / t * (-t * phi).exp())
        }
        IntegralIdentity::Bessel { c, theta } => {
            let phi = build_exponent(FamilyParams::bessel(c, theta)?)?.invert_phi(q)?.value;
            let f = |y: f64| -> Result<f64> { Ok((ln_bessel_i_scaled(c * (t + y), y / theta)? - q * y).exp() / y) };
            let lhs = integrate_semiaxis_scaled(f, t, qtol)?.value;
            (lhs, (t * (q - phi)).exp() / (c * t))
        }
    };
    Ok(CheckReport::new(name, lhs, rhs, tol, Mode::Relative))
}

/// Below the Whittaker form's argument floor the integrand is evaluated via
/// `g(·; 3/2)` directly.
const THREE_HALVES_WHITTAKER_MIN: f64 = 0.05;

/// `∫₀^∞ e^{−(2/27)a}/(y(t−y)) W_{1/2,1/6}((4/27)a) e^{−qy} dy`,
/// `a = (t−y)³/y²`; the integrand equals `√(π/3) y^{−5/3} g((t−y)y^{−2/3}; 3/2) e^{−qy}`,
/// which continues it past `y = t`.
fn three_halves_lhs(t: f64, q: f64, qtol: f64) -> Result<f64> {
    let c = (PI / 3.0).sqrt();
    let f = |y: f64| -> Result<f64> {
        let x = (t - y) * y.powf(-2.0 / 3.0);
        if x > THREE_HALVES_WHITTAKER_MIN {
            let a = x.powi(3);
            let lw = ln_whittaker_w(0.5, 1.0 / 6.0, 4.0 / 27.0 * a)?;
            Ok((lw - 2.0 / 27.0 * a - (y * (t - y)).ln() - q * y).exp())
        } else {
            Ok(c * (ln_stable_g(x, 1.5)? - 5.0 / 3.0 * y.ln() - q * y).exp())
        }
    };
    let mut pts: Vec<f64> = (0..60).rev().map(|j| t * 0.5f64.powi(j)).collect();
    pts.insert(0, 0.0);
    let head = try_integrate_breaks(f, &pts, 0.0, qtol)?.value;
    let tail = integrate_tail(f, t, t.max(1.0), qtol)?.value;
    Ok(head + tail)
}

/// The closed-form stable densities that are cross-checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StableCase {
    /// `g(x; 1/3) = x^{−3/2}/(3π) K_{1/3}(2/(3√(3x)))`.
    OneThird,
    /// `g(x; 2/3) = √(3/π) x^{−1} e^{−2/(27x²)} W_{1/2,1/6}(4/(27x²))`.
    TwoThirds,
    /// `x g(x; 3/2) = x^{−3/2} g(x^{−3/2}; 2/3)`.
    Duality,
}

/// Compares the two sides of a stable closed form at every grid point and
/// reports the worst relative deviation.
pub fn check_stable_closed_forms(case: StableCase, x_grid: &[f64], tol: f64) -> Result<CheckReport> {
    if x_grid.is_empty() {
        return Err(Error::InvalidParameter("empty grid".into()));
    }
    let mut worst = CheckReport::from_logs("", 0.0, 0.0, tol);
    for &x in x_grid {
        if !(x > 0.0) {
            return Err(domain(
                "check_stable_closed_forms",
                format!("grid points must be positive, got {x}"),
            ));
        }
        let (ln_lhs, ln_rhs) = match case {
            StableCase::OneThird => (
                ln_stable_g(x, 1.0 / 3.0)?,
                -1.5 * x.ln() - (3.0 * PI).ln() + bessel_k(1.0 / 3.0, 2.0 / (3.0 * (3.0 * x).sqrt()))?.ln(),
            ),
            StableCase::TwoThirds => {
                let u = 1.0 / (x * x);
                (
                    ln_stable_g(x, 2.0 / 3.0)?,
                    0.5 * (3.0 / PI).ln() - x.ln() - 2.0 / 27.0 * u + ln_whittaker_w(0.5, 1.0 / 6.0, 4.0 / 27.0 * u)?,
                )
            }
            StableCase::Duality => (
                x.ln() + ln_stable_g(x, 1.5)?,
                -1.5 * x.ln() + ln_stable_g(x.powf(-1.5), 2.0 / 3.0)?,
            ),
        };
        let r = CheckReport::from_logs(format!("{case:?}"), ln_lhs, ln_rhs, tol).detail(format!("x={x}"));
        if !(r.rel_err <= worst.rel_err) {
            worst = r;
        }
    }
    let label = match case {
        StableCase::OneThird => "one_third",
        StableCase::TwoThirds => "two_thirds",
        StableCase::Duality => "duality",
    };
    worst.name = format!(
        "stable_closed_form[{label}, {} points, worst at {}]",
        x_grid.len(),
        worst.detail
    );
    Ok(worst)
}
