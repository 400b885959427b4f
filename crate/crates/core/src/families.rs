//! Densities of the base processes, of the first-passage subordinator `Y` and
//! of its Lévy measure, both in closed form per family and through the
//! generic construction from the base density.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exponents::{ExponentHandle, Family, FamilyParams};
use crate::specialfn::{
    lambert_w0, ln_bessel_i_scaled, ln_gamma_kernel, ln_stable_g, log_gamma, pochhammer_log, SeriesValue, MAX_TERMS,
};

/// A point of the state space: a real position or a lattice site.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    Real(f64),
    Lattice(u64),
}

impl Space {
    pub fn as_f64(self) -> f64 {
        match self {
            Space::Real(y) => y,
            Space::Lattice(n) => n as f64,
        }
    }
}

/// A density (or probability mass) evaluated in log-space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityPoint {
    /// Time argument; `None` for Lévy densities.
    pub t: Option<f64>,
    pub space: Space,
    pub value: f64,
    pub log_value: f64,
}

impl DensityPoint {
    fn from_log(t: Option<f64>, space: Space, log_value: f64) -> Result<Self> {
        if log_value.is_nan() || log_value == f64::INFINITY {
            return Err(Error::PrecisionLoss {
                func: "density",
                ratio: f64::INFINITY,
            });
        }
        Ok(DensityPoint {
            t,
            space,
            value: log_value.exp(),
            log_value,
        })
    }
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(domain("density", format!("time must be positive, got {t}")))
    }
}

/// Validates `space` against the family's support and returns its value.
fn support(family: Family, space: Space, allow_negative: bool) -> Result<f64> {
    match (family.is_lattice(), space) {
        (true, Space::Lattice(n)) => Ok(n as f64),
        (false, Space::Real(y)) if y.is_finite() && (y > 0.0 || allow_negative) => Ok(y),
        (true, _) => Err(Error::Unsupported(format!("family {family} is integer-valued"))),
        (false, Space::Lattice(_)) => Err(Error::Unsupported(format!(
            "family {family} has a continuous state space"
        ))),
        (false, Space::Real(y)) => Err(domain("density", format!("point {y} is outside the support"))),
    }
}

/// Cancellation cap for the alternating geometric-stable series; past it the
/// series is refused rather than trusted.
pub const GEOM_SERIES_CAP: f64 = 1e12;

/// `ln Σ_k (−1)^k (1+ν)_k / (Γ(1+α(ν+k)) k!) · w^{α(ν+k)}`.
pub fn ln_geom_stable_series(nu: f64, w: f64, alpha: f64) -> Result<f64> {
    let s = geom_stable_series(nu, w, alpha)?;
    let ratio = if s.1.value > 0.0 {
        s.1.cancellation()
    } else {
        f64::INFINITY
    };
    if !(ratio <= GEOM_SERIES_CAP) {
        return Err(Error::PrecisionLoss {
            func: "geom_stable_series",
            ratio,
        });
    }
    Ok(s.0 + s.1.value.ln())
}

/// The series as `(scale, value)` with terms measured in units of `e^scale`.
fn geom_stable_series(nu: f64, w: f64, alpha: f64) -> Result<(f64, SeriesValue)> {
    let lw = w.ln();
    let ln_term = |k: u64| -> Result<f64> {
        let kf = k as f64;
        Ok(
            pochhammer_log(1.0 + nu, k)? - log_gamma(1.0 + alpha * (nu + kf))? - log_gamma(kf + 1.0)?
                + alpha * (nu + kf) * lw,
        )
    };
    let scale = ln_term(0)?;
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    let mut max_term: f64 = 0.0;
    let mut small = 0;
    let mut last = f64::INFINITY;
    for k in 0..MAX_TERMS as u64 {
        let l = ln_term(k)? - scale;
        if l > 700.0 {
            return Err(Error::PrecisionLoss {
                func: "geom_stable_series",
                ratio: f64::INFINITY,
            });
        }
        let mag = l.exp();
        sum += if k % 2 == 0 { mag } else { -mag };
        abs_sum += mag;
        max_term = max_term.max(mag);
        if mag <= last && mag < 1e-17 * sum.abs() {
            small += 1;
            if small >= 3 {
                let v = SeriesValue {
                    value: sum,
                    abs_err: 8.0 * f64::EPSILON * abs_sum + mag,
                    max_term,
                };
                return Ok((scale, v));
            }
        } else {
            small = 0;
        }
        last = mag;
    }
    Err(Error::NoConvergence {
        func: "geom_stable_series",
        iterations: MAX_TERMS,
        lo: 0.0,
        hi: w,
    })
}

/// Parameters `(|D|, c²θ)` of the inverse-Gaussian subordinator obtained from
/// the inverse-Gaussian base, where `D = c − c²θ/2`.
fn ig_closure(p: &FamilyParams) -> (f64, f64) {
    let (c, th) = (p.c(), p.th());
    ((c - 0.5 * c * c * th).abs(), c * c * th)
}

/// `ln p_X(t, x)` for the base process; for `StableHigh` the density at `x ∈ ℝ`
/// of the spectrally negative process `ξ_t`.
fn ln_base(p: &FamilyParams, t: f64, x: f64) -> Result<f64> {
    let (c, th, a) = (p.c(), p.th(), p.al());
    Ok(match p.family() {
        Family::Poisson => {
            let ct = c * t;
            if x == 0.0 {
                -ct
            } else {
                x * ct.ln() - ct - log_gamma(x + 1.0)?
            }
        }
        Family::Gamma => {
            let ct = c * t;
            (ct - 1.0) * x.ln() - x / th - ct * th.ln() - log_gamma(ct)?
        }
        Family::StableLow => {
            let s = (c * t).powf(-1.0 / a);
            s.ln() + ln_stable_g(x * s, a)?
        }
        Family::StableHigh => {
            let s = (c * t).powf(-1.0 / a);
            s.ln() + ln_stable_g((x - t) * s, a)?
        }
        Family::Bessel => (c * t / x).ln() + ln_bessel_i_scaled(c * t, x / th)?,
        Family::GeomStable => (a * c * t / x).ln() + ln_geom_stable_series(c * t, x / th, a)?,
        Family::InverseGaussian => {
            let mu = 0.5 * c * t * th;
            let lam = 0.5 * (c * t).powi(2) * th;
            0.5 * (lam / (2.0 * PI)).ln() - 1.5 * x.ln() - lam * (x - mu).powi(2) / (2.0 * mu * mu * x)
        }
    })
}

/// Density `p_X(t, x)` of the base process at time `t` (probability mass for
/// the Poisson family). For `StableHigh` this is the density of
/// `ξ_t = t + ξ̃_t` and `x` may be any real number.
pub fn base_density(p: &FamilyParams, t: f64, x: Space) -> Result<DensityPoint> {
    check_time(t)?;
    let v = support(p.family(), x, p.family() == Family::StableHigh)?;
    DensityPoint::from_log(Some(t), x, ln_base(p, t, v)?)
}

/// `p_Y(t, y)` built generically from the base density:
/// `t/(t+y) · e^{φ(0)t} · p_X(t+y, y)`, or `t/y · p_ξ(y, t)` for `StableHigh`.
pub fn transition_from_base(h: &ExponentHandle, t: f64, y: Space) -> Result<DensityPoint> {
    check_time(t)?;
    let p = h.params();
    let yv = support(p.family(), y, false)?;
    let log = if p.family() == Family::StableHigh {
        (t / yv).ln() + ln_base(p, yv, t)?
    } else {
        (t / (t + yv)).ln() + h.killing() * t + ln_base(p, t + yv, yv)?
    };
    DensityPoint::from_log(Some(t), y, log)
}

/// `p_Y(t, y)` from the family's closed form.
pub fn transition_density(h: &ExponentHandle, t: f64, y: Space) -> Result<DensityPoint> {
    check_time(t)?;
    let p = h.params();
    let yv = support(p.family(), y, false)?;
    let (c, th, a) = (p.c(), p.th(), p.al());
    let k = h.killing();
    let log = match p.family() {
        Family::Poisson => {
            let n = yv;
            (c * t).ln() + ln_gamma_kernel(n, c * (n + t))? + k * t
        }
        Family::Gamma => {
            let s = c * (t + yv);
            (c / th).ln() + t.ln() + ln_gamma_kernel(s, yv / th)? + k * t
        }
        Family::StableLow => {
            let s = (c * (t + yv)).powf(-1.0 / a);
            t.ln() + k * t + s.ln() - (t + yv).ln() + ln_stable_g(yv * s, a)?
        }
        Family::StableHigh => {
            -c.ln() / a + t.ln() - (1.0 / a + 1.0) * yv.ln() + ln_stable_g((t - yv) * (c * yv).powf(-1.0 / a), a)?
        }
        Family::Bessel => (c * t / yv).ln() + k * t + ln_bessel_i_scaled(c * (t + yv), yv / th)?,
        Family::GeomStable => k * t + (a * c * t / yv).ln() + ln_geom_stable_series(c * (t + yv), yv / th, a)?,
        Family::InverseGaussian => {
            let (d, s) = ig_closure(p);
            (t * s.sqrt() / (2.0 * PI.sqrt())).ln() - 1.5 * yv.ln() - (d * yv - 0.5 * t * s).powi(2) / (s * yv)
        }
    };
    DensityPoint::from_log(Some(t), y, log)
}

/// `π_Y(y)` (or `Π_Y({n})`) from the family's closed form.
pub fn levy_density(h: &ExponentHandle, y: Space) -> Result<DensityPoint> {
    let p = h.params();
    let yv = support(p.family(), y, false)?;
    let (c, th, a) = (p.c(), p.th(), p.al());
    let log = match p.family() {
        Family::Poisson => {
            let n = yv;
            if n == 0.0 {
                return Err(domain("levy_density", "the Lévy measure charges n >= 1 only"));
            }
            c.ln() + ln_gamma_kernel(n, c * n)?
        }
        Family::Gamma => {
            let s = c * yv;
            (c / th).ln() + ln_gamma_kernel(s, yv / th)?
        }
        Family::StableLow | Family::StableHigh => {
            let sign = if p.family() == Family::StableLow { 1.0 } else { -1.0 };
            let ci = c.powf(-1.0 / a);
            ci.ln() - (1.0 / a + 1.0) * yv.ln() + ln_stable_g(sign * ci * yv.powf(1.0 - 1.0 / a), a)?
        }
        Family::Bessel => (c / yv).ln() + ln_bessel_i_scaled(c * yv, yv / th)?,
        Family::GeomStable => (a * c / yv).ln() + ln_geom_stable_series(c * yv, yv / th, a)?,
        Family::InverseGaussian => {
            let (d, s) = ig_closure(p);
            (s.sqrt() / (2.0 * PI.sqrt())).ln() - 1.5 * yv.ln() - yv * d * d / s
        }
    };
    DensityPoint::from_log(None, y, log)
}

/// `π_Y(y) = p_X(y, y)/y`, or `p_ξ(y, 0)/y` for `StableHigh`.
pub fn levy_density_from_base(h: &ExponentHandle, y: Space) -> Result<DensityPoint> {
    let p = h.params();
    let yv = support(p.family(), y, false)?;
    if p.family().is_lattice() && yv == 0.0 {
        return Err(domain("levy_density", "the Lévy measure charges n >= 1 only"));
    }
    let x = if p.family() == Family::StableHigh { 0.0 } else { yv };
    DensityPoint::from_log(None, y, ln_base(p, yv, x)? - yv.ln())
}

/// Total mass of the Poisson-family Lévy measure, `−W₀(−c e^{−c})`.
pub fn levy_total_mass_poisson(c: f64) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("c must be positive, got {c}")));
    }
    Ok(-lambert_w0(-c * (-c).exp())?)
}

/// Large-`y` asymptote of the Lévy measure for the Poisson and Gamma families.
pub fn tail_asymptotic(p: &FamilyParams, y: f64) -> Result<f64> {
    let c = p.c();
    match p.family() {
        Family::Poisson => Ok((2.0 * PI).powf(-0.5) * y.powf(-1.5) * (-(tail_rate(p)?) * y).exp()),
        Family::Gamma => Ok((c / (2.0 * PI)).sqrt() * y.powf(-1.5) * (-(tail_rate(p)?) * y).exp()),
        f => Err(Error::Unsupported(format!("no tail asymptote for family {f}"))),
    }
}

/// Exponential decay rate of the Lévy tail; zero marks a pure power law.
pub fn tail_rate(p: &FamilyParams) -> Result<f64> {
    let c = p.c();
    match p.family() {
        Family::Poisson => Ok(c - 1.0 - c.ln()),
        Family::Gamma => {
            let tc = p.th() * c;
            Ok((tc.ln() - 1.0 + 1.0 / tc) * c)
        }
        f => Err(Error::Unsupported(format!("no tail asymptote for family {f}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::build_exponent;
    use crate::quad::integrate_semiaxis;

    fn h(p: Result<FamilyParams>) -> ExponentHandle {
        build_exponent(p.unwrap()).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    /// Relative distance of two densities, measured in log-space once the
    /// values underflow.
    fn rel_log(a: &DensityPoint, b: &DensityPoint) -> f64 {
        if a.value > 1e-300 && b.value > 1e-300 {
            rel(a.value, b.value)
        } else {
            (a.log_value - b.log_value).abs() / a.log_value.abs().max(1.0)
        }
    }

    #[test]
    fn base_examples() {
        let r = |p: Result<FamilyParams>, t, x| base_density(&p.unwrap(), t, Space::Real(x)).unwrap().value;
        assert!(rel(r(FamilyParams::gamma(1.0, 1.0), 1.0, 1.0), (-1f64).exp()) < 1e-14);
        assert!(rel(r(FamilyParams::stable_low(1.0, 0.5), 1.0, 1.0), 0.2196956447338612) < 1e-12);
        assert!(rel(r(FamilyParams::bessel(1.0, 1.0), 1.0, 1.0), 0.2079104153497085) < 1e-10);
        let p = FamilyParams::poisson(2.0).unwrap();
        let pm = base_density(&p, 1.5, Space::Lattice(3)).unwrap().value;
        assert!(rel(pm, 27.0 * (-3f64).exp() / 6.0) < 1e-14);
        assert!(base_density(&p, 1.0, Space::Real(1.0)).is_err());
        assert!(base_density(&FamilyParams::gamma(1.0, 1.0).unwrap(), 1.0, Space::Real(-1.0)).is_err());
    }

    #[test]
    fn ig_base_laplace_transform() {
        let p = FamilyParams::inverse_gaussian(1.5, 0.7).unwrap();
        let hh = build_exponent(p).unwrap();
        for &(t, z) in &[(1.0, 0.0), (0.5, 1.0), (2.0, 3.0)] {
            let lt = integrate_semiaxis(
                |x| Ok(base_density(&p, t, Space::Real(x))?.value * (-z * x).exp()),
                1e-11,
            )
            .unwrap();
            assert!(rel(lt.value, (-t * hh.phi_x(z)).exp()) < 1e-9, "t={t} z={z}");
        }
    }

    #[test]
    fn transition_examples() {
        let hp = h(FamilyParams::poisson(1.0));
        assert!(
            rel(
                transition_density(&hp, 1.0, Space::Lattice(0)).unwrap().value,
                (-1f64).exp()
            ) < 1e-15
        );
        let hp = h(FamilyParams::poisson(0.5));
        assert!(
            rel(
                transition_density(&hp, 2.0, Space::Lattice(1)).unwrap().value,
                0.22313016014842982
            ) < 1e-14
        );
        let hg = h(FamilyParams::gamma(1.0, 1.0));
        let want = (-1f64).exp() / 2.0;
        assert!(rel(transition_density(&hg, 1.0, Space::Real(1.0)).unwrap().value, want) < 1e-14);
        assert!(rel(transition_from_base(&hg, 1.0, Space::Real(1.0)).unwrap().value, want) < 1e-14);
        let hs = h(FamilyParams::stable_low(1.0, 0.5));
        let a = transition_density(&hs, 1.0, Space::Real(2.0)).unwrap().value;
        let b = transition_from_base(&hs, 1.0, Space::Real(2.0)).unwrap().value;
        assert!(rel(a, b) < 1e-12);
    }

    #[test]
    fn small_y_is_finite() {
        for p in [
            FamilyParams::gamma(1.0, 1.0),
            FamilyParams::stable_low(1.0, 0.5),
            FamilyParams::stable_high(1.0, 1.5),
            FamilyParams::bessel(1.0, 1.0),
            FamilyParams::geom_stable(1.0, 2.0, 0.5),
            FamilyParams::inverse_gaussian(1.0, 1.0),
        ] {
            let hh = h(p);
            for &y in &[1e-3, 1e-6, 1e-9] {
                let d = transition_from_base(&hh, 1.0, Space::Real(y)).unwrap();
                assert!(d.value.is_finite() && d.log_value.is_finite(), "{} y={y}", hh.params());
            }
        }
    }

    #[test]
    fn levy_examples() {
        for &c in &[0.3, 1.0, 2.0] {
            let hp = h(FamilyParams::poisson(c));
            assert!(rel(levy_density(&hp, Space::Lattice(1)).unwrap().value, c * (-c).exp()) < 1e-14);
        }
        let hg = h(FamilyParams::gamma(1.0, 1.0));
        assert!(rel(levy_density(&hg, Space::Real(1.0)).unwrap().value, (-1f64).exp()) < 1e-14);
        let hs = h(FamilyParams::stable_low(1.0, 0.5));
        assert!(rel(levy_density(&hs, Space::Real(1.0)).unwrap().value, 0.2196956447338612) < 1e-12);
    }

    #[test]
    fn closed_forms_match_generic_construction() {
        let fams = [
            FamilyParams::poisson(0.7),
            FamilyParams::poisson(2.5),
            FamilyParams::gamma(1.3, 0.6),
            FamilyParams::gamma(0.5, 1.0),
            FamilyParams::stable_low(1.2, 0.5),
            FamilyParams::stable_low(0.8, 1.0 / 3.0),
            FamilyParams::stable_low(1.0, 2.0 / 3.0),
            FamilyParams::stable_high(1.0, 1.5),
            FamilyParams::stable_high(0.7, 1.2),
            FamilyParams::bessel(1.0, 1.0),
            FamilyParams::bessel(0.6, 2.0),
            FamilyParams::geom_stable(1.0, 2.0, 0.5),
            FamilyParams::inverse_gaussian(1.0, 1.0),
            FamilyParams::inverse_gaussian(2.0, 3.0),
        ];
        for p in fams {
            let hh = h(p);
            for &t in &[0.2, 1.0, 3.0] {
                for &y in &[0.1, 0.7, 2.0, 5.0] {
                    let s = if hh.params().family().is_lattice() {
                        Space::Lattice((3.0 * y) as u64)
                    } else {
                        Space::Real(y)
                    };
                    let a = transition_density(&hh, t, s).unwrap();
                    let b = transition_from_base(&hh, t, s).unwrap();
                    assert!(rel_log(&a, &b) < 1e-12, "{} t={t} y={y}: {a:?} {b:?}", hh.params());
                    if s != Space::Lattice(0) {
                        let a = levy_density(&hh, s).unwrap();
                        let b = levy_density_from_base(&hh, s).unwrap();
                        assert!(rel_log(&a, &b) < 1e-12, "{} y={y}: {a:?} {b:?}", hh.params());
                    }
                }
            }
        }
    }

    #[test]
    fn poisson_mass() {
        assert!(rel(levy_total_mass_poisson(0.5).unwrap(), 0.5) < 1e-15);
        assert!(rel(levy_total_mass_poisson(1.0).unwrap(), 1.0) < 1e-15);
        let m = levy_total_mass_poisson(2.0).unwrap();
        assert!(rel(m, 0.4063757399599599) < 1e-12);
        let hp = h(FamilyParams::poisson(2.0));
        let s: f64 = (1..400)
            .map(|n| levy_density(&hp, Space::Lattice(n)).unwrap().value)
            .sum();
        assert!(rel(s, m) < 1e-10);
    }

    #[test]
    fn tails() {
        for &c in &[0.5, 1.0, 2.0] {
            let p = FamilyParams::poisson(c).unwrap();
            let hp = build_exponent(p).unwrap();
            let r = levy_density(&hp, Space::Lattice(400)).unwrap().value / tail_asymptotic(&p, 400.0).unwrap();
            assert!((0.99..=1.01).contains(&r), "c={c}: {r}");
        }
        for &(c, th) in &[(1.0, 2.0), (2.0, 0.25), (1.0, 1.0)] {
            let p = FamilyParams::gamma(c, th).unwrap();
            let hg = build_exponent(p).unwrap();
            let r = levy_density(&hg, Space::Real(400.0)).unwrap().value / tail_asymptotic(&p, 400.0).unwrap();
            assert!((0.99..=1.01).contains(&r), "c={c} th={th}: {r}");
        }
        assert_eq!(tail_rate(&FamilyParams::poisson(1.0).unwrap()).unwrap(), 0.0);
        assert_eq!(tail_rate(&FamilyParams::gamma(1.0, 1.0).unwrap()).unwrap(), 0.0);
        assert!(tail_asymptotic(&FamilyParams::bessel(1.0, 1.0).unwrap(), 10.0).is_err());
    }

    #[test]
    fn poisson_pmf_sums_to_one() {
        for &c in &[0.5, 1.0, 2.0] {
            let hp = h(FamilyParams::poisson(c));
            for &t in &[0.5, 1.0, 3.0] {
                let mut s = 0.0;
                let mut n = 0u64;
                loop {
                    let v = transition_density(&hp, t, Space::Lattice(n)).unwrap().value;
                    s += v;
                    n += 1;
                    if (v < 1e-18 * s && n > 10) || n > 20_000_000 {
                        break;
                    }
                }
                if c == 1.0 {
                    // power-law atoms: add the n^{-1/2} tail in closed form
                    s += t * (2.0 / (PI * n as f64)).sqrt();
                }
                assert!((s - 1.0).abs() < 1e-10, "c={c} t={t}: {s}");
            }
        }
    }

    #[test]
    fn small_time_limit() {
        let hg = h(FamilyParams::gamma(1.0, 1.0));
        for &y in &[0.5, 1.0, 2.0] {
            let t = 1e-4;
            let a = transition_density(&hg, t, Space::Real(y)).unwrap().value / t;
            let b = levy_density(&hg, Space::Real(y)).unwrap().value;
            assert!(rel(a, b) < 0.01);
        }
    }

    #[test]
    fn ig_closure_exponent() {
        for p in [
            FamilyParams::inverse_gaussian(1.0, 1.0),
            FamilyParams::inverse_gaussian(2.0, 3.0),
        ] {
            let hh = h(p);
            let (d, s) = ig_closure(hh.params());
            for &z in &[0.1, 1.0, 7.0] {
                let want = (d * d + s * z).sqrt() - d;
                assert!(rel(hh.phi_y(z).unwrap(), want) < 1e-11);
            }
        }
    }
}
