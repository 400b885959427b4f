//! Laplace exponents of the base subordinators, the associated spectrally
//! negative exponent `ψ`, its right inverse `φ` and the exponent `Φ_Y` of the
//! first-passage subordinator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::newton_bracketed;
use crate::specialfn::{lambert_w0, lambert_wm1};

/// The seven base families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `Φ_X(z) = c(1 − e^{−z})`, unit-jump Poisson process of rate `c`.
    Poisson,
    /// `Φ_X(z) = c ln(1 + θz)`.
    Gamma,
    /// `Φ_X(z) = c z^α` with `α ∈ (0, 1)`.
    StableLow,
    /// `ψ(z) = z + c z^α` with `α ∈ (1, 2)`: unit drift plus a spectrally
    /// negative stable process.
    StableHigh,
    /// `Φ_X(z) = c ln(1 + θz + √((1 + θz)² − 1))`.
    Bessel,
    /// `Φ_X(z) = c ln(1 + (θz)^α)` with `α ∈ (0, 1)`.
    GeomStable,
    /// `Φ_X(z) = c(√(1 + θz) − 1)`.
    InverseGaussian,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Poisson,
        Family::Gamma,
        Family::StableLow,
        Family::StableHigh,
        Family::Bessel,
        Family::GeomStable,
        Family::InverseGaussian,
    ];

    /// Command-line name of the family.
    pub fn name(self) -> &'static str {
        match self {
            Family::Poisson => "poisson",
            Family::Gamma => "gamma",
            Family::StableLow => "stable-low",
            Family::StableHigh => "stable-high",
            Family::Bessel => "bessel",
            Family::GeomStable => "geom-stable",
            Family::InverseGaussian => "inverse-gaussian",
        }
    }

    pub fn from_name(name: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn uses_theta(self) -> bool {
        !matches!(self, Family::Poisson | Family::StableLow | Family::StableHigh)
    }

    pub fn uses_alpha(self) -> bool {
        matches!(self, Family::StableLow | Family::StableHigh | Family::GeomStable)
    }

    /// True when `Y` has integer-valued marginals.
    pub fn is_lattice(self) -> bool {
        self == Family::Poisson
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A validated parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    family: Family,
    c: f64,
    theta: Option<f64>,
    alpha: Option<f64>,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

impl FamilyParams {
    /// Validates the parameters for `family`. `theta` and `alpha` must be
    /// given exactly when the family uses them.
    pub fn new(family: Family, c: f64, theta: Option<f64>, alpha: Option<f64>) -> Result<Self> {
        positive("c", c)?;
        let theta = match (family.uses_theta(), theta) {
            (true, Some(t)) => Some(positive("theta", t)?),
            (true, None) => {
                return Err(Error::InvalidParameter(format!("family {family} requires theta")));
            }
            (false, Some(_)) => {
                return Err(Error::InvalidParameter(format!("family {family} takes no theta")));
            }
            (false, None) => None,
        };
        let alpha = match (family.uses_alpha(), alpha) {
            (true, Some(a)) => {
                let ok = match family {
                    Family::StableHigh => a > 1.0 && a < 2.0,
                    _ => a > 0.0 && a < 1.0,
                };
                if !ok {
                    let range = if family == Family::StableHigh {
                        "(1, 2)"
                    } else {
                        "(0, 1)"
                    };
                    return Err(Error::InvalidParameter(format!(
                        "alpha for family {family} must lie in {range}, got {a}"
                    )));
                }
                Some(a)
            }
            (true, None) => {
                return Err(Error::InvalidParameter(format!("family {family} requires alpha")));
            }
            (false, Some(_)) => {
                return Err(Error::InvalidParameter(format!("family {family} takes no alpha")));
            }
            (false, None) => None,
        };
        Ok(FamilyParams {
            family,
            c,
            theta,
            alpha,
        })
    }

    pub fn poisson(c: f64) -> Result<Self> {
        Self::new(Family::Poisson, c, None, None)
    }
    pub fn gamma(c: f64, theta: f64) -> Result<Self> {
        Self::new(Family::Gamma, c, Some(theta), None)
    }
    pub fn stable_low(c: f64, alpha: f64) -> Result<Self> {
        Self::new(Family::StableLow, c, None, Some(alpha))
    }
    pub fn stable_high(c: f64, alpha: f64) -> Result<Self> {
        Self::new(Family::StableHigh, c, None, Some(alpha))
    }
    pub fn bessel(c: f64, theta: f64) -> Result<Self> {
        Self::new(Family::Bessel, c, Some(theta), None)
    }
    pub fn geom_stable(c: f64, theta: f64, alpha: f64) -> Result<Self> {
        Self::new(Family::GeomStable, c, Some(theta), Some(alpha))
    }
    pub fn inverse_gaussian(c: f64, theta: f64) -> Result<Self> {
        Self::new(Family::InverseGaussian, c, Some(theta), None)
    }

    pub fn family(&self) -> Family {
        self.family
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn theta(&self) -> Option<f64> {
        self.theta
    }
    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    /// `θ`, or 1 for families without a scale parameter.
    pub(crate) fn th(&self) -> f64 {
        self.theta.unwrap_or(1.0)
    }

    /// `α`, or 1 for families without an index.
    pub(crate) fn al(&self) -> f64 {
        self.alpha.unwrap_or(1.0)
    }
}

impl std::fmt::Display for FamilyParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}(c={}", self.family, self.c)?;
        if let Some(t) = self.theta {
            write!(f, ", theta={t}")?;
        }
        if let Some(a) = self.alpha {
            write!(f, ", alpha={a}")?;
        }
        f.write_str(")")
    }
}

/// How a value of `φ` was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    RootFind,
}

/// `φ(q)` together with its defining residual and the killing rate `φ(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiResult {
    pub q: f64,
    pub value: f64,
    /// `|ψ(value) − q|`.
    pub residual: f64,
    pub method: Method,
    pub killing: f64,
}

/// Evaluable exponents for one parameter set, with `φ(0)` computed once at
/// construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentHandle {
    params: FamilyParams,
    killing: f64,
    killing_method: Method,
}

/// Builds the handle and computes the killing rate eagerly.
pub fn build_exponent(params: FamilyParams) -> Result<ExponentHandle> {
    ExponentHandle::new(params)
}

impl ExponentHandle {
    pub fn new(params: FamilyParams) -> Result<Self> {
        let mut h = ExponentHandle {
            params,
            killing: 0.0,
            killing_method: Method::ClosedForm,
        };
        let (k, m) = h.compute_killing()?;
        h.killing = k;
        h.killing_method = m;
        Ok(h)
    }

    pub fn params(&self) -> &FamilyParams {
        &self.params
    }

    /// `Φ_X(z)` for `z ≥ 0`. For `StableHigh` this is `z − ψ(z) = −c z^α`.
    pub fn phi_x(&self, z: f64) -> f64 {
        let p = &self.params;
        let (c, th, a) = (p.c, p.th(), p.al());
        match p.family {
            Family::Poisson => -c * (-z).exp_m1(),
            Family::Gamma => c * (th * z).ln_1p(),
            Family::StableLow => c * z.powf(a),
            Family::StableHigh => -c * z.powf(a),
            Family::Bessel => {
                let u = th * z;
                c * (u + (u * (2.0 + u)).sqrt()).ln_1p()
            }
            Family::GeomStable => c * (th * z).powf(a).ln_1p(),
            Family::InverseGaussian => {
                let u = th * z;
                c * u / ((1.0 + u).sqrt() + 1.0)
            }
        }
    }

    /// `Φ_X′(z)`; infinite at `z = 0` for the families with infinite mean jump.
    pub fn phi_x_prime(&self, z: f64) -> f64 {
        let p = &self.params;
        let (c, th, a) = (p.c, p.th(), p.al());
        match p.family {
            Family::Poisson => c * (-z).exp(),
            Family::Gamma => c * th / (1.0 + th * z),
            Family::StableLow => c * a * z.powf(a - 1.0),
            Family::StableHigh => -c * a * z.powf(a - 1.0),
            Family::Bessel => {
                let u = th * z;
                c * th / (u * (2.0 + u)).sqrt()
            }
            Family::GeomStable => {
                let u = (th * z).powf(a);
                c * a * u / (z * (1.0 + u))
            }
            Family::InverseGaussian => 0.5 * c * th / (1.0 + th * z).sqrt(),
        }
    }

    /// `Φ_X′(0⁺)` in closed form.
    pub fn phi_x_prime_at_zero(&self) -> f64 {
        let p = &self.params;
        match p.family {
            Family::Poisson => p.c,
            Family::Gamma => p.c * p.th(),
            Family::InverseGaussian => 0.5 * p.c * p.th(),
            Family::StableHigh => 0.0,
            Family::StableLow | Family::Bessel | Family::GeomStable => f64::INFINITY,
        }
    }

    /// `ψ(z) = z − Φ_X(z)`.
    pub fn psi(&self, z: f64) -> f64 {
        z - self.phi_x(z)
    }

    pub fn psi_prime(&self, z: f64) -> f64 {
        1.0 - self.phi_x_prime(z)
    }

    /// `φ(0)`.
    pub fn killing(&self) -> f64 {
        self.killing
    }

    fn compute_killing(&self) -> Result<(f64, Method)> {
        let p = &self.params;
        if p.family == Family::StableLow {
            return Ok((p.c.powf(1.0 / (1.0 - p.al())), Method::ClosedForm));
        }
        if self.phi_x_prime_at_zero() <= 1.0 {
            return Ok((0.0, Method::ClosedForm));
        }
        let mut hi = 1.0;
        while self.psi(hi) <= 0.0 {
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::NoConvergence {
                    func: "killing_rate",
                    iterations: 0,
                    lo: 0.0,
                    hi,
                });
            }
        }
        let mut lo = 0.5 * hi;
        while self.psi(lo) >= 0.0 {
            lo *= 0.5;
            if lo < f64::MIN_POSITIVE {
                return Err(Error::NoConvergence {
                    func: "killing_rate",
                    iterations: 0,
                    lo,
                    hi,
                });
            }
        }
        let root = newton_bracketed(|z| (self.psi(z), self.psi_prime(z)), lo, hi)?;
        Ok((root, Method::RootFind))
    }

    /// `φ(q)`: the largest root of `ψ(z) = q`.
    pub fn invert_phi(&self, q: f64) -> Result<PhiResult> {
        if !(q >= 0.0) || !q.is_finite() {
            return Err(crate::error::domain(
                "invert_phi",
                format!("q must be finite and >= 0, got {q}"),
            ));
        }
        let value = if q == 0.0 {
            self.killing
        } else {
            let lo = if self.params.family == Family::StableHigh {
                0.0
            } else {
                q.max(self.killing)
            };
            let mut hi = q.max(self.killing).max(1.0);
            while self.psi(hi) < q {
                hi *= 2.0;
                if !hi.is_finite() {
                    return Err(Error::NoConvergence {
                        func: "invert_phi",
                        iterations: 0,
                        lo,
                        hi,
                    });
                }
            }
            newton_bracketed(|z| (self.psi(z) - q, self.psi_prime(z)), lo, hi)?
        };
        let method = if q == 0.0 {
            self.killing_method
        } else {
            Method::RootFind
        };
        Ok(PhiResult {
            q,
            value,
            residual: (self.psi(value) - q).abs(),
            method,
            killing: self.killing,
        })
    }

    /// `Φ_Y(z)`. For the `ψ = z − Φ_X` families this is `φ(z) − φ(0) − z`,
    /// evaluated as `Φ_X(φ(z)) − φ(0)` to avoid cancellation; for
    /// `StableHigh` it is `φ(z)`.
    pub fn phi_y(&self, z: f64) -> Result<f64> {
        if z == 0.0 {
            return Ok(0.0);
        }
        let phi = self.invert_phi(z)?.value;
        if self.params.family == Family::StableHigh {
            return Ok(phi);
        }
        Ok(self.phi_x(phi) - self.killing)
    }

    /// `E[Y₁]`, infinite exactly when `ψ′(φ(0)) = 0`.
    pub fn mean_y(&self) -> f64 {
        let p = &self.params;
        if p.family == Family::StableHigh {
            return 1.0 / self.psi_prime(0.0);
        }
        if p.family == Family::StableLow {
            let a = p.al();
            return a / (1.0 - a);
        }
        if self.killing == 0.0 {
            let d = self.phi_x_prime_at_zero();
            if d == 1.0 {
                return f64::INFINITY;
            }
            return 1.0 / (1.0 - d) - 1.0;
        }
        let dpsi = self.psi_prime(self.killing);
        if dpsi <= 0.0 {
            f64::INFINITY
        } else {
            1.0 / dpsi - 1.0
        }
    }
}

/// `φ(0)` of the handle.
pub fn killing_rate(h: &ExponentHandle) -> f64 {
    h.killing()
}

/// `φ(q)` for the Poisson family: `W₀(−c e^{−c−q}) + c + q`.
pub fn phi_closed_poisson(c: f64, q: f64) -> Result<f64> {
    positive("c", c)?;
    if !(q >= 0.0) {
        return Err(crate::error::domain(
            "phi_closed_poisson",
            format!("q must be >= 0, got {q}"),
        ));
    }
    let w = lambert_w0(-c * (-c - q).exp())?;
    Ok(w + c + q)
}

/// `φ(q)` for the Gamma family: `−1/θ − c W₋₁(−(θc)^{−1} e^{−1/(θc) − q/c})`.
pub fn phi_closed_gamma(c: f64, theta: f64, q: f64) -> Result<f64> {
    positive("c", c)?;
    positive("theta", theta)?;
    if !(q >= 0.0) {
        return Err(crate::error::domain(
            "phi_closed_gamma",
            format!("q must be >= 0, got {q}"),
        ));
    }
    let k = 1.0 / (theta * c);
    let w = lambert_wm1(-k * (-k - q / c).exp())?;
    Ok((-1.0 / theta - c * w).max(0.0))
}
