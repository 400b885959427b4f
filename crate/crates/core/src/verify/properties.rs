use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exponents::{build_exponent, phi_closed_gamma, phi_closed_poisson, ExponentHandle, Family, FamilyParams};
use crate::families::{
    levy_density, levy_density_from_base, tail_asymptotic, transition_density, transition_from_base, DensityPoint,
    Space,
};
use crate::quad::integrate_semiaxis;

use super::laplace::check_laplace_identity;
use super::{CheckReport, Mode};

/// Worst relative gap between the Lambert-W closed form of `φ` and the root
/// finder on `points` values of `q` evenly spread over `[0, q_max]`.
pub fn check_closed_form_phi(params: FamilyParams, q_max: f64, points: usize, tol: f64) -> Result<CheckReport> {
    let h = build_exponent(params)?;
    let closed = |q: f64| match params.family() {
        Family::Poisson => phi_closed_poisson(params.c(), q),
        Family::Gamma => phi_closed_gamma(params.c(), params.th(), q),
        f => Err(Error::Unsupported(format!("no Lambert-W closed form for family {f}"))),
    };
    let mut worst: Option<CheckReport> = None;
    for i in 0..points {
        let q = q_max * i as f64 / (points - 1).max(1) as f64;
        let a = closed(q)?;
        let b = h.invert_phi(q)?.value;
        let r = if b == 0.0 {
            CheckReport::new("", a, b, tol, Mode::Absolute)
        } else {
            CheckReport::new("", a, b, tol, Mode::Relative)
        }
        .detail(format!("q={q}"));
        if worst
            .as_ref()
            .is_none_or(|w| !(r.rel_err.min(r.abs_err) <= w.rel_err.min(w.abs_err)))
        {
            worst = Some(r);
        }
    }
    let mut w = worst.ok_or_else(|| Error::InvalidParameter("need at least one point".into()))?;
    w.name = format!(
        "closed_form_phi[{params}, {points} points on [0, {q_max}], worst at {}]",
        w.detail
    );
    Ok(w)
}

/// Relative distance of two densities, measured on the logarithm when either
/// value underflows.
fn density_gap(a: &DensityPoint, b: &DensityPoint) -> f64 {
    if a.value > 1e-300 && b.value > 1e-300 {
        (a.value - b.value).abs() / b.value
    } else {
        (a.log_value - b.log_value).abs() / b.log_value.abs().max(1.0)
    }
}

/// Compares the closed-form transition and Lévy densities with the generic
/// construction from the base density at `n_points` random points.
/// `t` is log-uniform on `[0.1, 5]` and `y` log-uniform on `[0.01, y_max]`
/// (uniform on `0..=60` for the lattice family).
pub fn check_density_consistency(
    params: FamilyParams,
    n_points: usize,
    y_max: f64,
    seed: u64,
    tol: f64,
) -> Result<CheckReport> {
    let h = build_exponent(params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let log_uniform = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| (lo.ln() + rng.random::<f64>() * (hi / lo).ln()).exp();
    let mut worst = 0.0;
    let mut at = String::new();
    for _ in 0..n_points {
        let t = log_uniform(&mut rng, 0.1, 5.0);
        let s = if params.family().is_lattice() {
            Space::Lattice(rng.random_range(0..=60))
        } else {
            Space::Real(log_uniform(&mut rng, 0.01, y_max))
        };
        let g = density_gap(&transition_density(&h, t, s)?, &transition_from_base(&h, t, s)?);
        if !(g <= worst) {
            worst = g;
            at = format!("p_Y at t={t}, {s:?}");
        }
        if s != Space::Lattice(0) {
            let g = density_gap(&levy_density(&h, s)?, &levy_density_from_base(&h, s)?);
            if !(g <= worst) {
                worst = g;
                at = format!("pi_Y at {s:?}");
            }
        }
    }
    Ok(CheckReport::with_error(
        format!("density_consistency[{params}, {n_points} points]"),
        worst,
        0.0,
        worst,
        tol,
        Mode::Absolute,
    )
    .detail(format!("worst: {at}")))
}

/// Total mass of `p_Y(t, ·)`.
pub fn check_normalization(params: FamilyParams, t: f64, tol: f64) -> Result<CheckReport> {
    let mut r = check_laplace_identity(params, t, 0.0, tol)?;
    r.name = format!("normalization[{params}, t={t}]");
    Ok(r)
}

/// `E[Y₁]` from the exponent, `1/ψ′(φ(0)) − 1` (or `1/ψ′(0)` for
/// `StableHigh`, where `Y_t = τ_t⁺`), against `∫ y π_Y(y) dy`.
pub fn check_mean_identity(params: FamilyParams, tol: f64) -> Result<CheckReport> {
    let h = build_exponent(params)?;
    let lhs = mean_from_exponent(&h);
    let rhs = mean_from_levy(&h, 1e-3 * tol)?;
    Ok(CheckReport::new(
        format!("mean[{params}]"),
        lhs,
        rhs,
        tol,
        Mode::Relative,
    ))
}

fn mean_from_exponent(h: &ExponentHandle) -> f64 {
    if h.params().family() == Family::StableHigh {
        1.0 / h.psi_prime(0.0)
    } else {
        1.0 / h.psi_prime(h.killing()) - 1.0
    }
}

fn mean_from_levy(h: &ExponentHandle, qtol: f64) -> Result<f64> {
    if h.params().family().is_lattice() {
        return Err(Error::Unsupported(
            "mean by quadrature needs a continuous family".into(),
        ));
    }
    Ok(integrate_semiaxis(|y| Ok(y * levy_density(h, Space::Real(y))?.value), qtol)?.value)
}

/// `p_Y(t, y)/t` against `π_Y(y)` at small `t`.
pub fn check_small_time_limit(params: FamilyParams, y: f64, t: f64, tol: f64) -> Result<CheckReport> {
    let h = build_exponent(params)?;
    let s = if params.family().is_lattice() {
        Space::Lattice(y as u64)
    } else {
        Space::Real(y)
    };
    let lhs = transition_density(&h, t, s)?.value / t;
    let rhs = levy_density(&h, s)?.value;
    Ok(CheckReport::new(
        format!("small_time[{params}, y={y}, t={t}]"),
        lhs,
        rhs,
        tol,
        Mode::Relative,
    ))
}

/// Lévy density against its large-`y` asymptote; `lhs` is the ratio and
/// `rhs = 1`.
pub fn check_tail_asymptote(params: FamilyParams, y: f64, tol: f64) -> Result<CheckReport> {
    let h = build_exponent(params)?;
    let s = if params.family().is_lattice() {
        Space::Lattice(y as u64)
    } else {
        Space::Real(y)
    };
    let exact = levy_density(&h, s)?;
    let asym = tail_asymptotic(&params, s.as_f64())?;
    let ratio = (exact.log_value - asym.ln()).exp();
    Ok(CheckReport::new(
        format!("tail_asymptote[{params}, y={y}]"),
        ratio,
        1.0,
        tol,
        Mode::Absolute,
    ))
}

/// Fits `Φ(q) = A(√(1+Θq) − 1)` through `Φ_Y` at `q = 1` and `q = 4` and
/// returns `(A, Θ)`.
pub fn fit_inverse_gaussian(h: &ExponentHandle) -> Result<(f64, f64)> {
    let (z1, z2) = (1.0, 4.0);
    let (v1, v2) = (h.phi_y(z1)?, h.phi_y(z2)?);
    // with a = 1/A: (a v + 1)² = 1 + Θ z, so a² v² + 2 a v = Θ z at both points
    let a = 2.0 * (v2 / z2 - v1 / z1) / (v1 * v1 / z1 - v2 * v2 / z2);
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Unsupported(format!(
            "exponent is not of inverse-Gaussian form (a = {a})"
        )));
    }
    let theta = (a * a * v1 * v1 + 2.0 * a * v1) / z1;
    Ok((1.0 / a, theta))
}

/// The fitted inverse-Gaussian exponent against `Φ_Y` at 20 log-spaced points
/// of `[0.01, 100]`; the worst relative gap is reported.
pub fn check_ig_closure(params: FamilyParams, tol: f64) -> Result<CheckReport> {
    if params.family() != Family::InverseGaussian {
        return Err(Error::Unsupported(format!(
            "closure check is for the inverse-Gaussian family, got {}",
            params.family()
        )));
    }
    let h = build_exponent(params)?;
    let (a, th) = fit_inverse_gaussian(&h)?;
    let mut worst = CheckReport::new("", 0.0, 0.0, tol, Mode::Relative);
    for i in 0..20 {
        let q = 10f64.powf(-2.0 + 4.0 * i as f64 / 19.0);
        let fitted = a * ((th * q).ln_1p() * 0.5).exp_m1();
        let r = CheckReport::new("", fitted, h.phi_y(q)?, tol, Mode::Relative).detail(format!("q={q:.4}"));
        if !(r.rel_err <= worst.rel_err) {
            worst = r;
        }
    }
    worst.name = format!(
        "ig_closure[{params}, A={a:.12}, theta={th:.12}, worst at {}]",
        worst.detail
    );
    Ok(worst)
}
