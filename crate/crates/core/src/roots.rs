//! Bracketed root finding.

use crate::error::{Error, Result};

/// Iteration cap for the bracketed solvers.
pub const MAX_ITER: usize = 400;

/// Solves `g(x) = 0` on `[lo, hi]` where `g(lo)` and `g(hi)` have opposite
/// signs (or one of them vanishes). `g` returns the value together with its
/// derivative; Newton steps that leave the current bracket are replaced by
/// bisection.
pub fn newton_bracketed<G>(mut g: G, mut lo: f64, mut hi: f64) -> Result<f64>
where
    G: FnMut(f64) -> (f64, f64),
{
    let (glo, _) = g(lo);
    if glo == 0.0 {
        return Ok(lo);
    }
    let (ghi, _) = g(hi);
    if ghi == 0.0 {
        return Ok(hi);
    }
    if glo.signum() == ghi.signum() || glo.is_nan() || ghi.is_nan() {
        return Err(Error::NoConvergence {
            func: "newton_bracketed",
            iterations: 0,
            lo,
            hi,
        });
    }
    let increasing = glo < 0.0;
    let mut x = 0.5 * (lo + hi);
    for _ in 0..MAX_ITER {
        let (gx, dg) = g(x);
        if gx == 0.0 {
            return Ok(x);
        }
        if (gx < 0.0) == increasing {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = x - gx / dg;
        if !(next > lo.min(hi) && next < lo.max(hi)) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let step = (next - x).abs();
        x = next;
        if step <= 2.0 * f64::EPSILON * x.abs()
            || (hi - lo).abs() <= 2.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE)
        {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence {
        func: "newton_bracketed",
        iterations: MAX_ITER,
        lo,
        hi,
    })
}

/// Plain bisection for a sign change of `g` on `[lo, hi]`.
pub fn bisect<G>(mut g: G, mut lo: f64, mut hi: f64) -> Result<f64>
where
    G: FnMut(f64) -> f64,
{
    let glo = g(lo);
    let ghi = g(hi);
    if glo == 0.0 {
        return Ok(lo);
    }
    if ghi == 0.0 {
        return Ok(hi);
    }
    if glo.signum() == ghi.signum() {
        return Err(Error::NoConvergence {
            func: "bisect",
            iterations: 0,
            lo,
            hi,
        });
    }
    let neg_at_lo = glo < 0.0;
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            return Ok(mid);
        }
        let gm = g(mid);
        if gm == 0.0 {
            return Ok(mid);
        }
        if (gm < 0.0) == neg_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
