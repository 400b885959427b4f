//! Real branches of the Lambert W function.

use std::f64::consts::E;

use crate::error::{domain, Result};

const INV_E: f64 = 0.367_879_441_171_442_33;
/// Relative slack accepted below `−1/e` to absorb rounding of the argument.
const BRANCH_SLACK: f64 = 4.0 * f64::EPSILON;
const MAX_ITER: usize = 100;
/// Below this value of 2(ez+1) the branch-point series is used as is.
const NEAR_BRANCH: f64 = 1e-6;

/// Principal branch `W₀` on `[−1/e, ∞)`.
pub fn lambert_w0(z: f64) -> Result<f64> {
    if z.is_nan() {
        return Err(domain("lambert_w0", "NaN argument"));
    }
    if z < -INV_E {
        if z >= -INV_E * (1.0 + BRANCH_SLACK) {
            return Ok(-1.0);
        }
        return Err(domain("lambert_w0", format!("z = {z} is below -1/e")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    let p2 = 2.0 * E.mul_add(z, 1.0);
    if p2 <= BRANCH_SLACK {
        return Ok(-1.0);
    }
    if p2 < NEAR_BRANCH {
        // Halley cannot resolve w + 1 ~ √(ez+1) here; the branch series can
        return Ok(branch_series(p2.sqrt()));
    }
    let guess = if p2 < 0.5 {
        branch_series(p2.sqrt())
    } else if z.abs() < 0.3 {
        z * (1.0 + z * (-1.0 + z * (1.5 - z * 8.0 / 3.0)))
    } else if z < 3.0 {
        let l = z.ln_1p();
        l * (1.0 - l.ln_1p() / (2.0 + l))
    } else {
        let l1 = z.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    let (lo, hi) = if z < 0.0 { (-1.0, z) } else { (0.0, z.ln_1p()) };
    Ok(polish(z, guess, lo, hi, true))
}

/// Lower branch `W₋₁` on `[−1/e, 0)`.
pub fn lambert_wm1(z: f64) -> Result<f64> {
    if z.is_nan() || z >= 0.0 {
        return Err(domain("lambert_wm1", format!("z = {z} must lie in [-1/e, 0)")));
    }
    if z < -INV_E {
        if z >= -INV_E * (1.0 + BRANCH_SLACK) {
            return Ok(-1.0);
        }
        return Err(domain("lambert_wm1", format!("z = {z} is below -1/e")));
    }
    let p2 = 2.0 * E.mul_add(z, 1.0);
    if p2 <= BRANCH_SLACK {
        return Ok(-1.0);
    }
    if p2 < NEAR_BRANCH {
        return Ok(branch_series(-p2.sqrt()));
    }
    let guess = if p2 < 0.5 {
        branch_series(-p2.sqrt())
    } else {
        let l1 = (-z).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    };
    let u = (-(-z).ln() - 1.0).max(0.0);
    let lo = -2.0 - (2.0 * u).sqrt() - u;
    Ok(polish(z, guess, lo, -1.0, false))
}

/// `W = −1 + p − p²/3 + 11p³/72 − 43p⁴/540 + 769p⁵/17280 − …` with
/// `p = ±√(2(ez+1))`, the sign selecting the branch.
fn branch_series(p: f64) -> f64 {
    -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0 + p * 769.0 / 17280.0))))
}

/// Halley iteration on `w e^w − z`, safeguarded by bisection on `[lo, hi]`.
/// `increasing` tells which side of the root the residual is positive on.
fn polish(z: f64, guess: f64, mut lo: f64, mut hi: f64, increasing: bool) -> f64 {
    let mut w = if guess > lo && guess < hi {
        guess
    } else {
        0.5 * (lo + hi)
    };
    let mut best = (f64::INFINITY, w);
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - z;
        if f.abs() < best.0 {
            best = (f.abs(), w);
        }
        if f == 0.0 {
            return w;
        }
        if (f > 0.0) == increasing {
            hi = w;
        } else {
            lo = w;
        }
        let wp1 = w + 1.0;
        let mut next = w - f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let step = (next - w).abs();
        w = next;
        if step <= 2.0 * f64::EPSILON * w.abs() || hi - lo <= 2.0 * f64::EPSILON * w.abs() {
            break;
        }
    }
    let f = w * w.exp() - z;
    if f.abs() <= best.0 {
        w
    } else {
        best.1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(w: f64, z: f64) -> f64 {
        (w * w.exp() - z).abs()
    }

    #[test]
    fn reference_values() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert_eq!(lambert_w0(-INV_E).unwrap(), -1.0);
        assert!((lambert_w0(1.0).unwrap() - 0.5671432904097838).abs() < 1e-15);
        assert_eq!(lambert_wm1(-INV_E).unwrap(), -1.0);
        assert!((lambert_wm1(-0.1).unwrap() - (-3.577152063957297)).abs() < 1e-14);
        let w = lambert_wm1(-0.2).unwrap();
        assert!(residual(w, -0.2) <= 1e-14 * 0.2);
        assert!(w < -1.0);
    }

    #[test]
    fn domain_errors() {
        assert!(lambert_w0(-0.38).is_err());
        assert!(lambert_wm1(0.0).is_err());
        assert!(lambert_wm1(0.5).is_err());
        assert!(lambert_wm1(-0.4).is_err());
        assert!(lambert_w0(f64::NAN).is_err());
    }

    #[test]
    fn near_branch_point() {
        for k in 1..40 {
            let z = -INV_E + 10f64.powi(-k / 3 - 2);
            let w0 = lambert_w0(z).unwrap();
            let wm = lambert_wm1(z).unwrap();
            assert!(w0 >= -1.0 && wm <= -1.0);
            assert!(residual(w0, z) <= 1e-14, "w0 at {z}");
            assert!(residual(wm, z) <= 1e-14 * z.abs(), "wm1 at {z}");
        }
    }

    #[test]
    fn taylor_series_near_zero() {
        // W₀(z) = Σ_{n≥1} (−n)^{n−1} zⁿ / n!
        for i in -30..=30 {
            let z = 0.01 * i as f64;
            let mut sum = 0.0;
            for n in 1..200u32 {
                let nf = n as f64;
                let ln_mag = (nf - 1.0) * nf.ln() + nf * z.abs().ln() - libm::lgamma(nf + 1.0);
                let sign = if (n - 1) % 2 == 0 { 1.0 } else { -1.0 } * if z < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
                if z != 0.0 {
                    sum += sign * ln_mag.exp();
                }
            }
            assert!((sum - lambert_w0(z).unwrap()).abs() <= 1e-10, "z={z}");
        }
    }
}
