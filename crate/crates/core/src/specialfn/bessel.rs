//! Modified Bessel functions of real order.

use crate::error::{domain, Error, Result};

/// Above this argument the power series is replaced by asymptotic forms.
const SERIES_X_MAX: f64 = 5000.0;
const RESCALE: f64 = 1e250;

/// `e^{−x} I_ν(x)` for `ν ≥ 0`, `x ≥ 0`.
pub fn bessel_i_scaled(nu: f64, x: f64) -> Result<f64> {
    Ok(ln_bessel_i_scaled(nu, x)?.exp())
}

/// `ln(e^{−x} I_ν(x))`; finite wherever `I_ν(x) > 0`, including where the
/// value itself underflows.
pub fn ln_bessel_i_scaled(nu: f64, x: f64) -> Result<f64> {
    if !(nu >= 0.0) || !(x >= 0.0) || nu.is_infinite() || x.is_infinite() {
        return Err(domain(
            "bessel_i_scaled",
            format!("need nu >= 0 and x >= 0, got nu={nu}, x={x}"),
        ));
    }
    if x == 0.0 {
        return Ok(if nu == 0.0 { 0.0 } else { f64::NEG_INFINITY });
    }
    if x <= SERIES_X_MAX {
        return Ok(ln_series(nu, x));
    }
    if 4.0 * nu * nu <= 0.05 * x {
        Ok(ln_hankel(nu, x))
    } else {
        Ok(ln_debye(nu, x))
    }
}

fn ln_series(nu: f64, x: f64) -> f64 {
    // I_ν(x) = (x/2)^ν Σ_k (x²/4)^k / (k! Γ(ν+k+1)); all terms positive
    let q = 0.25 * x * x;
    let lead = nu * (0.5 * x).ln() - libm::lgamma(nu + 1.0) - x;
    let mut log_scale = 0.0;
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut k = 0.0;
    loop {
        term *= q / ((k + 1.0) * (nu + k + 1.0));
        sum += term;
        k += 1.0;
        if sum > RESCALE {
            log_scale += sum.ln();
            term /= sum;
            sum = 1.0;
        }
        if term < 1e-17 * sum && q < (k + 1.0) * (nu + k + 1.0) {
            break;
        }
    }
    lead + log_scale + sum.ln()
}

fn ln_hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut sum = 1.0;
    let mut term = 1.0f64;
    for k in 1..40 {
        let odd = (2 * k - 1) as f64;
        let next = -term * (mu - odd * odd) / (k as f64 * 8.0 * x);
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    -0.5 * (2.0 * std::f64::consts::PI * x).ln() + sum.ln()
}

fn ln_debye(nu: f64, x: f64) -> f64 {
    let z = x / nu;
    let s = (1.0 + z * z).sqrt();
    let eta = s + (z / (1.0 + s)).ln();
    let p = 1.0 / s;
    let p2 = p * p;
    let u1 = p * (3.0 - 5.0 * p2) / 24.0;
    let u2 = p2 * (81.0 - 462.0 * p2 + 385.0 * p2 * p2) / 1152.0;
    let u3 = p * p2 * (30375.0 - 369603.0 * p2 + 765765.0 * p2 * p2 - 425425.0 * p2 * p2 * p2) / 414720.0;
    let u4 = p2
        * p2
        * (4465125.0 - 94121676.0 * p2 + 349922430.0 * p2 * p2 - 446185740.0 * p2 * p2 * p2
            + 185910725.0 * p2 * p2 * p2 * p2)
        / 39813120.0;
    let inv = 1.0 / nu;
    let series = 1.0 + inv * (u1 + inv * (u2 + inv * (u3 + inv * u4)));
    nu * eta - x - 0.5 * (2.0 * std::f64::consts::PI * nu).ln() - 0.25 * (1.0 + z * z).ln() + series.ln()
}

/// `K_ν(x)` for `x > 0` from `∫₀^∞ e^{−x cosh t} cosh(νt) dt`, summed by the
/// trapezoid rule (exponentially convergent for this analytic integrand).
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !nu.is_finite() || x.is_infinite() {
        return Err(domain("bessel_k", format!("need x > 0, got x={x}")));
    }
    let nu = nu.abs();
    // work with the scaled integrand exp(−x(cosh t − 1) + ln cosh νt)
    let log_f = |t: f64| -> f64 {
        let nt = nu * t;
        let ln_cosh = nt + (-2.0 * nt).exp().ln_1p() - std::f64::consts::LN_2;
        -x * (t.cosh() - 1.0) + ln_cosh
    };
    let t_peak = if nu > 0.0 { (nu / x).asinh() } else { 0.0 };
    let peak = log_f(t_peak);
    let cutoff = peak - 41.5;
    let mut h = (0.7 / x.sqrt()).min(0.1).min(1.0 / (nu + 1.0));
    let mut prev = f64::NAN;
    for _ in 0..12 {
        let mut sum = 0.5 * (log_f(0.0) - peak).exp();
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            let lf = log_f(t);
            sum += (lf - peak).exp();
            if t > t_peak && lf < cutoff {
                break;
            }
            k += 1;
        }
        let value = h * sum;
        if (value - prev).abs() <= 1e-14 * value {
            return Ok((peak - x).exp() * value);
        }
        prev = value;
        h *= 0.5;
    }
    Err(Error::NoConvergence {
        func: "bessel_k",
        iterations: 12,
        lo: 0.0,
        hi: h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;

    #[test]
    fn reference_values() {
        assert_eq!(bessel_i_scaled(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i_scaled(1.0, 0.0).unwrap(), 0.0);
        assert!((bessel_i_scaled(0.0, 1.0).unwrap() - 0.4657596075936404).abs() < 1e-15);
        assert!((bessel_i_scaled(1.0, 1.0).unwrap() - 0.2079104153497085).abs() < 1e-15);
        assert!(bessel_i_scaled(-1.0, 1.0).is_err());
        assert!(bessel_i_scaled(1.0, -1.0).is_err());
    }

    #[test]
    fn half_order_closed_form() {
        // I_{1/2}(x) = sqrt(2/(πx)) sinh x
        for &x in &[0.01, 0.5, 3.0, 40.0, 400.0, 4000.0, 6000.0, 2.0e4] {
            let exact = (2.0 / (std::f64::consts::PI * x)).sqrt() * 0.5 * (-(-2.0 * x).exp_m1());
            let got = bessel_i_scaled(0.5, x).unwrap();
            assert!((got - exact).abs() <= 1e-12 * exact, "x={x}: {got} vs {exact}");
        }
    }

    #[test]
    fn asymptotic_branches_match_series_at_the_switch() {
        for &nu in &[0.0, 0.3, 2.0, 8.0, 30.0, 200.0, 1500.0] {
            let a = ln_series(nu, SERIES_X_MAX);
            let b = if 4.0 * nu * nu <= 0.05 * SERIES_X_MAX {
                ln_hankel(nu, SERIES_X_MAX)
            } else {
                ln_debye(nu, SERIES_X_MAX)
            };
            assert!((a - b).abs() < 1e-10, "nu={nu}: {a} vs {b}");
        }
    }

    #[test]
    fn wronskian_three_term_recurrence() {
        // I_{ν−1}(x) − I_{ν+1}(x) = (2ν/x) I_ν(x)
        for &x in &[0.3, 2.0, 25.0, 300.0] {
            for &nu in &[1.0, 2.5, 17.0, 120.0] {
                let lhs = bessel_i_scaled(nu - 1.0, x).unwrap() - bessel_i_scaled(nu + 1.0, x).unwrap();
                let rhs = 2.0 * nu / x * bessel_i_scaled(nu, x).unwrap();
                assert!((lhs - rhs).abs() <= 1e-11 * rhs.abs().max(1e-300), "x={x}, nu={nu}");
            }
        }
    }

    #[test]
    fn k_half_closed_form() {
        let exact = (std::f64::consts::PI / 2.0).sqrt() * (-1f64).exp();
        assert!((bessel_k(0.5, 1.0).unwrap() - exact).abs() < 1e-15);
        assert!((exact - 0.4610685044).abs() < 1e-10);
        for &x in &[0.01, 0.2, 5.0, 80.0, 700.0] {
            let e = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp();
            let g = bessel_k(0.5, x).unwrap();
            assert!((g - e).abs() <= 1e-12 * e, "x={x}");
        }
    }

    #[test]
    fn k_third_matches_simpson_oracle() {
        // independent composite Simpson on a truncated range
        let x: f64 = 1.0;
        let nu = 1.0 / 3.0;
        let n = 20000;
        let b = 6.0;
        let h = b / n as f64;
        let f = |t: f64| (-x * t.cosh()).exp() * (nu * t).cosh();
        let mut s = f(0.0) + f(b);
        for i in 1..n {
            s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let simpson = s * h / 3.0;
        let got = bessel_k(nu, x).unwrap();
        assert!((got - simpson).abs() <= 1e-10 * simpson, "{got} vs {simpson}");
        let gk = integrate(f, 0.0, 8.0, 0.0, 1e-14).unwrap().value;
        assert!((got - gk).abs() <= 1e-12 * gk);
    }

    #[test]
    fn k_is_even_in_order() {
        assert_eq!(bessel_k(-1.0 / 3.0, 2.0).unwrap(), bessel_k(1.0 / 3.0, 2.0).unwrap());
        assert!(bessel_k(0.3, 0.0).is_err());
    }
}
