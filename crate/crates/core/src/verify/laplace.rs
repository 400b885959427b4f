use crate::error::{Error, Result};
use crate::exponents::{build_exponent, ExponentHandle, Family, FamilyParams};
use crate::families::{transition_density, Space};
use crate::quad::{integrate_semiaxis, try_integrate_breaks};
use crate::roots::bisect;

use super::{CheckReport, Mode};

/// The `(t, z)` grid on which the Laplace identity is checked by default.
pub fn laplace_grid() -> Vec<(f64, f64)> {
    let mut g = Vec::with_capacity(12);
    for &t in &[0.5, 1.0, 2.0] {
        for &z in &[0.5, 1.0, 2.0, 5.0] {
            g.push((t, z));
        }
    }
    g
}

/// The geometric-stable parameters whose transition density is evaluable far
/// enough into the tail for the Laplace identity to be checked.
pub fn geom_stable_validated() -> FamilyParams {
    FamilyParams::geom_stable(0.5, 10.0, 0.6).expect("valid parameters")
}

/// Cap on the sum over lattice points.
const MAX_LATTICE_TERMS: u64 = 10_000_000;

/// Compares `∫₀^∞ e^{−zy} p_Y(t,y) dy` (a sum over the lattice for the
/// Poisson family) with `e^{−tΦ_Y(z)}`.
pub fn check_laplace_identity(params: FamilyParams, t: f64, z: f64, tol: f64) -> Result<CheckReport> {
    if !(t > 0.0) || !(z >= 0.0) || !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "laplace check needs t > 0, z >= 0, tol > 0; got t={t}, z={z}, tol={tol}"
        )));
    }
    let h = build_exponent(params)?;
    let rhs = (-t * h.phi_y(z)?).exp();
    let name = format!("laplace[{params}, t={t}, z={z}]");
    let qtol = 1e-3 * tol;
    Ok(match params.family() {
        Family::Poisson => {
            let lhs = lattice_sum(&h, t, z)?;
            CheckReport::new(name, lhs, rhs, tol, Mode::Relative)
        }
        Family::GeomStable => {
            let (lhs, q_err, y_max, bound) = truncated(&h, t, z, qtol)?;
            CheckReport::with_error(name, lhs, rhs, (lhs - rhs).abs() + bound, tol, Mode::Relative).detail(format!(
                "integrated to {y_max:.4}, tail bound {bound:.3e}, quadrature error {q_err:.3e}"
            ))
        }
        _ => {
            let r = integrate_semiaxis(
                |y| Ok((-z * y).exp() * transition_density(&h, t, Space::Real(y))?.value),
                qtol,
            )?;
            CheckReport::new(name, r.value, rhs, tol, Mode::Relative).detail(format!(
                "quadrature error {:.3e}, {} evaluations",
                r.abs_err_est, r.n_evals
            ))
        }
    })
}

fn lattice_sum(h: &ExponentHandle, t: f64, z: f64) -> Result<f64> {
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    for n in 0..MAX_LATTICE_TERMS {
        let term = (-z * n as f64 + transition_density(h, t, Space::Lattice(n))?.log_value).exp();
        sum += term;
        let ratio = term / prev;
        if n > 0 && ratio < 1.0 && term * ratio / (1.0 - ratio) <= 1e-17 * sum {
            return Ok(sum);
        }
        prev = term;
    }
    Err(Error::NoConvergence {
        func: "laplace_lattice_sum",
        iterations: MAX_LATTICE_TERMS as usize,
        lo: 0.0,
        hi: MAX_LATTICE_TERMS as f64,
    })
}

/// Largest `y` on a geometric scan from 0.5 at which the transition density
/// is still evaluated without precision loss.
pub fn validated_limit(h: &ExponentHandle, t: f64) -> Result<f64> {
    let mut y = 0.5;
    let mut last = None;
    while y < 1e4 {
        if transition_density(h, t, Space::Real(y)).is_err() {
            break;
        }
        last = Some(y);
        y *= 1.02;
    }
    last.ok_or_else(|| Error::Unsupported(format!("no evaluable range for {}", h.params())))
}

/// `∫₀^Y e^{−zy} p_Y(t,y) dy` with `Y` the validated limit, its quadrature
/// error, `Y`, and a Chernoff bound on the discarded part `∫_Y^∞`.
fn truncated(h: &ExponentHandle, t: f64, z: f64, qtol: f64) -> Result<(f64, f64, f64, f64)> {
    let y_max = validated_limit(h, t)?;
    let p = h.params();
    // p_Y(t, y) ~ y^{β−1} at the origin; y = v^{1/β} removes the singularity
    let beta = p.al() * p.c() * t;
    let f = |v: f64| -> Result<f64> {
        let y = v.powf(1.0 / beta);
        if y == 0.0 {
            return Ok(0.0);
        }
        if y >= y_max {
            return Ok(0.0);
        }
        let d = transition_density(h, t, Space::Real(y))?;
        Ok((d.log_value - z * y + (y / (beta * v)).ln()).exp())
    };
    let mut pts: Vec<f64> = (0..48).rev().map(|j| (y_max * 0.5f64.powi(j)).powf(beta)).collect();
    pts.insert(0, 0.0);
    *pts.last_mut().expect("non-empty") = y_max.powf(beta);
    let r = try_integrate_breaks(f, &pts, 0.0, qtol)?;
    Ok((r.value, r.abs_err_est, y_max, chernoff_tail(h, t, z, y_max)?))
}

/// `∫_Y^∞ e^{−zy} P(Y_t ∈ dy) ≤ e^{−zY} E[e^{sY_t}] e^{−sY}` minimised over
/// `s ∈ [0, −min ψ)`, where `E[e^{sY_t}] = e^{−t(φ(−s) + s − φ(0))}` and
/// `φ(−s)` is the root of `ψ = −s` below `φ(0)`.
fn chernoff_tail(h: &ExponentHandle, t: f64, z: f64, y: f64) -> Result<f64> {
    let k = h.killing();
    let mut best = (-z * y).exp();
    if k <= 0.0 {
        return Ok(best);
    }
    let z_min = bisect(|u| h.psi_prime(u), 1e-300, k)?;
    let psi_min = h.psi(z_min);
    for j in 1..64 {
        let s = -psi_min * j as f64 / 64.0;
        let r = bisect(|u| h.psi(u) + s, z_min, k)?;
        let b = (-z * y - s * y - t * (r + s - k)).exp();
        best = best.min(b);
    }
    Ok(best)
}
