//! Adaptive Gauss–Kronrod quadrature on finite intervals and a panel scheme
//! for the half line.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Error, Result};

/// Outcome of a numerical integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_err_est: f64,
    pub n_evals: usize,
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_650_085_210,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Default cap on the number of interval bisections in [`integrate`].
pub const MAX_SUBDIVISIONS: usize = 4000;
/// Bisection cap for one piece of a split or paneled integral.
const PIECE_SUBDIVISIONS: usize = 400;

fn within_budget(r: QuadratureResult, abs_tol: f64, rel_tol: f64) -> Result<QuadratureResult> {
    // a little slack: pieces are sized against a crude estimate of the total
    if r.abs_err_est <= 2.0 * abs_tol.max(rel_tol * r.value.abs()) {
        Ok(r)
    } else {
        Err(Error::Quadrature {
            value: r.value,
            abs_err: r.abs_err_est,
        })
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn kronrod21<F>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut res_g = 0.0;
    let mut res_k = WGK[10] * fc;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    if !value.is_finite() || !err.is_finite() {
        return Err(Error::Quadrature { value, abs_err: err });
    }
    Ok((value, err))
}

/// Integrates a fallible integrand over `[a, b]` with global adaptive
/// bisection until the error estimate is below `max(abs_tol, rel_tol·|I|)`.
pub fn try_integrate<F>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    try_integrate_capped(&mut f, a, b, abs_tol, rel_tol, MAX_SUBDIVISIONS)
}

/// [`try_integrate`] for an infallible integrand.
pub fn integrate<F>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> f64,
{
    try_integrate(|x| Ok(f(x)), a, b, abs_tol, rel_tol)
}

pub(crate) fn try_integrate_capped<F>(
    f: &mut F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (r, converged) = adaptive(f, a, b, abs_tol, rel_tol, max_subdivisions)?;
    if converged {
        Ok(r)
    } else {
        Err(Error::Quadrature {
            value: r.value,
            abs_err: r.abs_err_est,
        })
    }
}

/// Global adaptive bisection; returns the best estimate and whether the
/// tolerance was met. Errors only on non-finite integrand values.
fn adaptive<F>(
    f: &mut F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Result<(QuadratureResult, bool)>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok((
            QuadratureResult {
                value: 0.0,
                abs_err_est: 0.0,
                n_evals: 0,
            },
            true,
        ));
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "integration limits must be finite, got [{a}, {b}]"
        )));
    }
    let (value, err) = kronrod21(f, a, b)?;
    let mut n_evals = 21;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, err });
    let mut total = value;
    let mut total_err = err;
    let mut splits = 0;
    let mut converged = true;
    // the per-segment error estimate never drops below 50·eps·|segment|
    let rel_tol = rel_tol.max(100.0 * f64::EPSILON);
    loop {
        if total_err <= abs_tol.max(rel_tol * total.abs()) {
            break;
        }
        if splits >= max_subdivisions {
            converged = false;
            break;
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // interval exhausted at machine resolution
            heap.push(Segment { err: 0.0, ..worst });
            total_err = heap.iter().map(|s| s.err).sum();
            if heap.iter().all(|s| s.err == 0.0) {
                break;
            }
            splits += 1;
            continue;
        }
        let (v1, e1) = kronrod21(f, worst.a, mid)?;
        let (v2, e2) = kronrod21(f, mid, worst.b)?;
        n_evals += 42;
        splits += 1;
        total += v1 + v2 - worst.value;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
        });
        if splits % 64 == 0 {
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.err).sum();
        } else {
            total_err += e1 + e2 - worst.err;
        }
    }
    total = heap.iter().map(|s| s.value).sum();
    total_err = heap.iter().map(|s| s.err).sum();
    Ok((
        QuadratureResult {
            value: total,
            abs_err_est: total_err,
            n_evals,
        },
        converged,
    ))
}

/// Integrates over `[points[0], points[last]]` split at the interior points.
/// The tolerance applies to the whole integral, not to each piece.
pub fn try_integrate_breaks<F>(f: F, points: &[f64], abs_tol: f64, rel_tol: f64) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let r = integrate_breaks_estimate(f, points, abs_tol, rel_tol)?;
    within_budget(r, abs_tol, rel_tol.max(100.0 * f64::EPSILON))
}

/// Like [`try_integrate_breaks`] but returns the best estimate even when the
/// tolerance was not met; the caller judges `abs_err_est`.
pub fn integrate_breaks_estimate<F>(mut f: F, points: &[f64], abs_tol: f64, rel_tol: f64) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut out = QuadratureResult {
        value: 0.0,
        abs_err_est: 0.0,
        n_evals: 0,
    };
    let pieces = points.len().saturating_sub(1).max(1) as f64;
    let mut crude = 0.0;
    for w in points.windows(2) {
        crude += kronrod21(&mut f, w[0], w[1])?.0.abs();
        out.n_evals += 21;
    }
    let rel_tol = rel_tol.max(100.0 * f64::EPSILON);
    let piece_tol = abs_tol.max(rel_tol * crude) / pieces;
    for w in points.windows(2) {
        let (r, _) = adaptive(&mut f, w[0], w[1], piece_tol, rel_tol, PIECE_SUBDIVISIONS)?;
        out.value += r.value;
        out.abs_err_est += r.abs_err_est;
        out.n_evals += r.n_evals;
    }
    Ok(out)
}

/// Integrates over `(0, ∞)` using geometric panels `[2^k, 2^(k+1)]` in both
/// directions from 1, stopping on each side once panel contributions become
/// negligible relative to the running total.
pub fn integrate_semiaxis<F>(f: F, tol: f64) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    integrate_semiaxis_scaled(f, 1.0, tol)
}

const MIN_PANELS: usize = 6;
const MAX_PANELS: usize = 1000;

/// [`integrate_semiaxis`] with panels anchored at `scale` instead of 1.
pub fn integrate_semiaxis_scaled<F>(mut f: F, scale: f64, tol: f64) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(scale > 0.0 && scale.is_finite()) || !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "semi-axis quadrature needs scale > 0 and tol > 0, got scale={scale}, tol={tol}"
        )));
    }
    let mut n_evals = 0;
    let mut total = 0.0;
    let mut err = 0.0;
    let mut left = Side::new();
    let mut right = Side::new();
    let mut k = 0usize;
    while !(left.done && right.done) {
        if k >= MAX_PANELS {
            return Err(Error::Quadrature {
                value: total,
                abs_err: err,
            });
        }
        let panel_tol = 0.05 * tol * total.abs();
        if !right.done {
            let a = scale * 2f64.powi(k as i32);
            let (r, _) = adaptive(&mut f, a, 2.0 * a, panel_tol, 0.05 * tol, PIECE_SUBDIVISIONS)?;
            n_evals += r.n_evals;
            total += r.value;
            err += r.abs_err_est;
            right.push(r.value, total, tol, k);
        }
        if !left.done {
            let b = scale * 2f64.powi(-(k as i32));
            let (r, _) = adaptive(&mut f, 0.5 * b, b, panel_tol, 0.05 * tol, PIECE_SUBDIVISIONS)?;
            n_evals += r.n_evals;
            total += r.value;
            err += r.abs_err_est;
            left.push(r.value, total, tol, k);
        }
        k += 1;
    }
    within_budget(
        QuadratureResult {
            value: total,
            abs_err_est: err + left.tail + right.tail,
            n_evals,
        },
        0.0,
        tol,
    )
}

/// Integrates over `[a, ∞)` with panels of doubling width starting at `width`.
pub fn integrate_tail<F>(mut f: F, a: f64, width: f64, tol: f64) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut n_evals = 0;
    let mut total = 0.0;
    let mut err = 0.0;
    let mut side = Side::new();
    let mut lo = a;
    let mut w = width;
    let mut k = 0;
    while !side.done {
        if k >= MAX_PANELS || !lo.is_finite() {
            return Err(Error::Quadrature {
                value: total,
                abs_err: err,
            });
        }
        let panel_tol = 0.05 * tol * total.abs();
        let (r, _) = adaptive(&mut f, lo, lo + w, panel_tol, 0.05 * tol, PIECE_SUBDIVISIONS)?;
        n_evals += r.n_evals;
        total += r.value;
        err += r.abs_err_est;
        side.push(r.value, total, tol, k);
        lo += w;
        w *= 2.0;
        k += 1;
    }
    within_budget(
        QuadratureResult {
            value: total,
            abs_err_est: err + side.tail,
            n_evals,
        },
        0.0,
        tol,
    )
}

struct Side {
    prev: f64,
    quiet: usize,
    done: bool,
    tail: f64,
}

impl Side {
    fn new() -> Self {
        Side {
            prev: f64::NAN,
            quiet: 0,
            done: false,
            tail: 0.0,
        }
    }

    fn push(&mut self, contribution: f64, total: f64, tol: f64, k: usize) {
        let c = contribution.abs();
        let scale = total.abs();
        if scale == 0.0 {
            // nothing found yet on either side
            self.prev = c;
            if k >= 64 {
                self.done = true;
            }
            return;
        }
        let ratio = if self.prev > 0.0 { c / self.prev } else { 0.0 };
        // geometric extrapolation of what the remaining panels could add
        let tail = if ratio < 1.0 {
            c * ratio / (1.0 - ratio)
        } else {
            f64::INFINITY
        };
        if c <= 0.1 * tol * scale && tail <= 0.1 * tol * scale {
            self.quiet += 1;
        } else {
            self.quiet = 0;
        }
        self.prev = c;
        if self.quiet >= 2 && k + 1 >= MIN_PANELS {
            self.done = true;
            self.tail = tail;
        }
    }
}
