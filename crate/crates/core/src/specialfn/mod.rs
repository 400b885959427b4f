//! Special functions needed by the density formulas: Lambert W, log-gamma,
//! modified Bessel functions, the Whittaker function, Mittag-Leffler and the
//! one-sided / spectrally negative stable densities.

mod bessel;
mod gamma;
mod lambert;
mod mittag_leffler;
mod series;
mod stable;
mod whittaker;

pub use bessel::{bessel_i_scaled, bessel_k, ln_bessel_i_scaled};
pub use gamma::{ln_gamma_kernel, log_gamma, pochhammer_log};
pub use lambert::{lambert_w0, lambert_wm1};
pub use mittag_leffler::mittag_leffler;
pub use series::{SeriesValue, CANCELLATION_CAP, MAX_TERMS, TERM_RTOL};
pub use stable::{ln_stable_g, stable_g};
pub use whittaker::{ln_whittaker_w, whittaker_w};
