use crate::error::{Error, Result};
use crate::exponents::{build_exponent, ExponentHandle, Family, FamilyParams};
use crate::families::{base_density, transition_density, Space};
use crate::quad::try_integrate_breaks;

use super::{CheckReport, Mode};

/// Compares `∫_y^∞ P(τ_x⁺ ≤ t) dx/x` with `∫₀^t P(ξ_s > y) ds/s` for
/// `ξ_s = s − X_s`. The left side uses the transition law of `Y` through
/// `τ_x⁺ = x + Y_x` (killed at rate `φ(0)`), the right side only the base
/// process.
pub fn check_kendall_identity(params: FamilyParams, y: f64, t: f64, tol: f64) -> Result<CheckReport> {
    if !(y > 0.0) || !t.is_finite() || !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "kendall check needs y > 0, finite t and tol > 0; got y={y}, t={t}"
        )));
    }
    let name = format!("kendall[{params}, y={y}, t={t}]");
    if t <= y {
        return Ok(CheckReport::new(name, 0.0, 0.0, tol, Mode::Absolute));
    }
    let h = build_exponent(params)?;
    let qtol = 1e-3 * tol;
    let (lhs, rhs) = match params.family() {
        Family::Poisson => (lhs_lattice(&h, y, t, qtol)?, rhs_lattice(&params, y, t, qtol)?),
        Family::Gamma => (lhs_gamma(&h, y, t, qtol)?, rhs_gamma(&params, y, t, qtol)?),
        f => {
            return Err(Error::Unsupported(format!(
                "kendall check covers poisson and gamma, got {f}"
            )))
        }
    };
    Ok(CheckReport::new(name, lhs, rhs, tol, Mode::Either))
}

/// Interior points `start + k` of `(lo, hi)` together with the endpoints.
fn unit_breaks(lo: f64, hi: f64, start: f64) -> Vec<f64> {
    let mut pts = vec![lo];
    let mut k = ((lo - start).floor() + 1.0).max(0.0);
    while start + k < hi {
        if start + k > lo {
            pts.push(start + k);
        }
        k += 1.0;
    }
    pts.push(hi);
    pts
}

fn lhs_lattice(h: &ExponentHandle, y: f64, t: f64, qtol: f64) -> Result<f64> {
    let k = h.killing();
    let f = |x: f64| -> Result<f64> {
        let mut cdf = 0.0;
        for n in 0..=((t - x).floor() as u64) {
            cdf += transition_density(h, x, Space::Lattice(n))?.value;
        }
        Ok((-k * x).exp() * cdf / x)
    };
    // the floor jumps where t − x crosses an integer
    let mut pts: Vec<f64> = unit_breaks(0.0, t - y, 0.0).into_iter().map(|u| t - u).collect();
    pts.reverse();
    Ok(try_integrate_breaks(f, &pts, 0.0, qtol)?.value)
}

fn rhs_lattice(p: &FamilyParams, y: f64, t: f64, qtol: f64) -> Result<f64> {
    let f = |s: f64| -> Result<f64> {
        // P(N_{cs} < s − y)
        let mut prob = 0.0;
        let mut n = 0u64;
        while (n as f64) < s - y {
            prob += base_density(p, s, Space::Lattice(n))?.value;
            n += 1;
        }
        Ok(prob / s)
    };
    Ok(try_integrate_breaks(f, &unit_breaks(y, t, y), 0.0, qtol)?.value)
}

/// `∫₀^U f(u) du` for `f(u) ~ u^{β−1}` at the origin, after `u = v^{1/β}`.
fn power_integral<F>(mut f: F, upper: f64, beta: f64, qtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if upper <= 0.0 {
        return Ok(0.0);
    }
    let g = |v: f64| -> Result<f64> {
        let u = v.powf(1.0 / beta);
        if u == 0.0 {
            return Ok(0.0);
        }
        Ok(f(u)? * u / (beta * v))
    };
    Ok(try_integrate_breaks(g, &[0.0, upper.powf(beta)], 0.0, qtol)?.value)
}

fn lhs_gamma(h: &ExponentHandle, y: f64, t: f64, qtol: f64) -> Result<f64> {
    let k = h.killing();
    let c = h.params().c();
    let f = |x: f64| -> Result<f64> {
        let cdf = power_integral(
            |u| Ok(transition_density(h, x, Space::Real(u))?.value),
            t - x,
            c * x,
            0.1 * qtol,
        )?;
        Ok((-k * x).exp() * cdf / x)
    };
    Ok(try_integrate_breaks(f, &[y, t], 0.0, qtol)?.value)
}

fn rhs_gamma(p: &FamilyParams, y: f64, t: f64, qtol: f64) -> Result<f64> {
    let c = p.c();
    let f = |s: f64| -> Result<f64> {
        let prob = power_integral(
            |x| Ok(base_density(p, s, Space::Real(x))?.value),
            s - y,
            c * s,
            0.1 * qtol,
        )?;
        Ok(prob / s)
    };
    Ok(try_integrate_breaks(f, &[y, t], 0.0, qtol)?.value)
}
