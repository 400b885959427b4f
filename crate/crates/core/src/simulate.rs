//! Exact Monte Carlo for the Poisson family: first passage of
//! `ξ_t = t − N_{ct}` above a level, and direct compound-Poisson sampling of
//! `Y_t`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Poisson};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::{build_exponent, ExponentHandle, FamilyParams};
use crate::families::{levy_density, levy_total_mass_poisson, transition_density, Space};

/// Empirical law of an integer-valued sample, with censored draws counted
/// separately.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalDist {
    pub support: Vec<u64>,
    pub prob: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n_samples: u64,
    pub n_censored: u64,
}

impl EmpiricalDist {
    fn from_counts(counts: &BTreeMap<u64, u64>, n_samples: u64, n_censored: u64) -> Self {
        let n = n_samples as f64;
        let mut d = EmpiricalDist {
            support: Vec::with_capacity(counts.len()),
            prob: Vec::with_capacity(counts.len()),
            stderr: Vec::with_capacity(counts.len()),
            n_samples,
            n_censored,
        };
        for (&k, &m) in counts {
            let p = m as f64 / n;
            d.support.push(k);
            d.prob.push(p);
            d.stderr.push((p * (1.0 - p) / n).sqrt());
        }
        d
    }

    /// Empirical probability of the atom `k` (zero when never observed).
    pub fn prob_of(&self, k: u64) -> f64 {
        match self.support.binary_search(&k) {
            Ok(i) => self.prob[i],
            Err(_) => 0.0,
        }
    }

    pub fn censored_fraction(&self) -> f64 {
        self.n_censored as f64 / self.n_samples as f64
    }

    /// `(p̂ − p)/√(p(1−p)/n)`, the deviation from `p` in binomial standard
    /// errors under the exact law.
    pub fn z_score(&self, k: u64, p: f64) -> f64 {
        let se = (p * (1.0 - p) / self.n_samples as f64).sqrt();
        if se == 0.0 {
            return if self.prob_of(k) == p { 0.0 } else { f64::INFINITY };
        }
        (self.prob_of(k) - p) / se
    }
}

/// Splits `n_samples` over `workers` streams of one ChaCha seed and merges the
/// per-worker histograms; the result depends only on `(seed, workers)`.
fn run_parallel<F>(n_samples: u64, seed: u64, workers: usize, draw: F) -> (BTreeMap<u64, u64>, u64)
where
    F: Fn(&mut ChaCha8Rng) -> Option<u64> + Sync,
{
    let workers = workers.max(1);
    let per = n_samples / workers as u64;
    let extra = n_samples % workers as u64;
    let parts: Vec<(BTreeMap<u64, u64>, u64)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let draw = &draw;
                let n = per + u64::from((w as u64) < extra);
                s.spawn(move || {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(w as u64);
                    let mut counts = BTreeMap::new();
                    let mut censored = 0;
                    for _ in 0..n {
                        match draw(&mut rng) {
                            Some(k) => *counts.entry(k).or_insert(0) += 1,
                            None => censored += 1,
                        }
                    }
                    (counts, censored)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut counts = BTreeMap::new();
    let mut censored = 0;
    for (c, k) in parts {
        censored += k;
        for (v, m) in c {
            *counts.entry(v).or_insert(0) += m;
        }
    }
    (counts, censored)
}

fn check_samples(n_samples: u64) -> Result<()> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be at least 1".into()));
    }
    Ok(())
}

/// Simulates `τ_x⁺ − x` for `ξ_t = t − N_{ct}` event by event, censoring paths
/// that have not crossed `x` by `horizon`.
pub fn simulate_first_passage_poisson(
    c: f64,
    x: f64,
    horizon: f64,
    n_samples: u64,
    seed: u64,
    workers: usize,
) -> Result<EmpiricalDist> {
    FamilyParams::poisson(c)?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidParameter(format!("level x must be positive, got {x}")));
    }
    if !(horizon >= x) {
        return Err(Error::InvalidParameter(format!(
            "horizon {horizon} must be at least x = {x}"
        )));
    }
    check_samples(n_samples)?;
    let exp = Exp::new(c).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let (counts, censored) = run_parallel(n_samples, seed, workers, |rng| {
        // ξ at the last jump time `t`, and the number of jumps so far
        let mut t = 0.0;
        let mut xi = 0.0;
        let mut jumps = 0u64;
        loop {
            let gap: f64 = exp.sample(rng);
            let need = x - xi;
            if need <= gap {
                let tau = t + need;
                return if tau <= horizon { Some(jumps) } else { None };
            }
            t += gap;
            if t > horizon {
                return None;
            }
            xi += gap - 1.0;
            jumps += 1;
        }
    });
    Ok(EmpiricalDist::from_counts(&counts, n_samples, censored))
}

/// Exact probability `P(τ_x⁺ = x + n)` for the Poisson family.
pub fn first_passage_pmf_poisson(c: f64, x: f64, n: u64) -> Result<f64> {
    let h = build_exponent(FamilyParams::poisson(c)?)?;
    let p = transition_density(&h, x, Space::Lattice(n))?;
    Ok((p.log_value - h.killing() * x).exp())
}

/// Inverse-CDF table for the jump law `Π_Y({n})/λ` with an exact rejection
/// sampler for the part beyond the table.
struct JumpSampler {
    cdf: Vec<f64>,
    tail_start: u64,
    h: ExponentHandle,
}

/// Table size cap for the jump law.
const JUMP_TABLE_MAX: u64 = 1 << 20;

impl JumpSampler {
    fn new(c: f64) -> Result<Self> {
        let h = build_exponent(FamilyParams::poisson(c)?)?;
        let mass = levy_total_mass_poisson(c)?;
        let mut cdf = Vec::new();
        let mut acc = 0.0;
        let mut n = 1u64;
        while n <= JUMP_TABLE_MAX {
            acc += levy_density(&h, Space::Lattice(n))?.value / mass;
            cdf.push(acc);
            if acc >= 1.0 - 1e-12 {
                break;
            }
            n += 1;
        }
        let tail_start = cdf.len() as u64 + 1;
        // the table's own rounding is absorbed by sending the remainder to the tail
        let total = *cdf.last().expect("table is non-empty");
        if total > 1.0 {
            for v in &mut cdf {
                *v /= total;
            }
        }
        Ok(JumpSampler { cdf, tail_start, h })
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        let i = self.cdf.partition_point(|&v| v <= u);
        if i < self.cdf.len() {
            return i as u64 + 1;
        }
        self.sample_tail(rng)
    }

    /// Draws from `Π({n})` restricted to `n ≥ tail_start`. The Stirling bound
    /// `Π({n}) ≤ (2π)^{−1/2} n^{−3/2} ≤ (2π)^{−1/2} ∫_{n−½}^{n+½} x^{−3/2} dx`
    /// makes a rounded Pareto(½) proposal an exact envelope.
    fn sample_tail<R: Rng>(&self, rng: &mut R) -> u64 {
        let lo = self.tail_start as f64 - 0.5;
        loop {
            let u: f64 = 1.0 - rng.random::<f64>();
            let x = lo / (u * u);
            if !(x < 1e18) {
                continue;
            }
            let n = (x + 0.5).floor() as u64;
            let nf = n as f64;
            let cell = 2.0 * (1.0 / (nf - 0.5).sqrt() - 1.0 / (nf + 0.5).sqrt());
            let target = levy_density(&self.h, Space::Lattice(n)).map(|d| d.value).unwrap_or(0.0);
            let bound = (2.0 * std::f64::consts::PI).powf(-0.5) * cell;
            if rng.random::<f64>() * bound <= target {
                return n;
            }
        }
    }
}

/// Samples `Y_t` as a compound Poisson sum with rate `λ = −W₀(−c e^{−c}) = c`
/// and jump law `Π_Y({n})/λ`. Only `c ≤ 1` (no killing) is supported.
pub fn sample_y_poisson(c: f64, t: f64, n_samples: u64, seed: u64, workers: usize) -> Result<EmpiricalDist> {
    FamilyParams::poisson(c)?;
    if c > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "direct sampling needs c <= 1 (no killing), got c = {c}"
        )));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
    }
    check_samples(n_samples)?;
    let lambda = levy_total_mass_poisson(c)?;
    let jumps = JumpSampler::new(c)?;
    let pois = Poisson::new(lambda * t).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let (counts, censored) = run_parallel(n_samples, seed, workers, |rng| {
        let k: f64 = pois.sample(rng);
        let mut y = 0u64;
        for _ in 0..k as u64 {
            y = y.saturating_add(jumps.sample(rng));
        }
        Some(y)
    });
    Ok(EmpiricalDist::from_counts(&counts, n_samples, censored))
}

/// Exact `P(Y_t = n)` for the Poisson family.
pub fn y_pmf_poisson(c: f64, t: f64, n: u64) -> Result<f64> {
    let h = build_exponent(FamilyParams::poisson(c)?)?;
    Ok(transition_density(&h, t, Space::Lattice(n))?.value)
}
