//! Acceptance suite: one PASS/FAIL line per criterion, with timings and the
//! numbers behind each verdict.

use std::time::{Duration, Instant};

use kendall::exponents::{build_exponent, FamilyParams};
use kendall::families::{levy_density, Space};
use kendall::quad::integrate_semiaxis;
use kendall::simulate::{first_passage_pmf_poisson, sample_y_poisson, simulate_first_passage_poisson, y_pmf_poisson};
use kendall::specialfn::{lambert_w0, lambert_wm1};
use kendall::verify::{
    check_closed_form_phi, check_complete_monotonicity, check_density_consistency, check_ig_closure,
    check_integral_identity, check_laplace_identity, check_mean_identity, check_normalization, check_small_time_limit,
    check_stable_closed_forms, check_tail_asymptote, check_w_identities, cm_cases, cm_grid, consistency_families,
    laplace_families, laplace_grid, stable_grid, CheckReport, CmFunction, IntegralIdentity, StableCase, WMode,
    MAX_CM_ORDER,
};

struct Outcome {
    pass: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            pass: true,
            lines: Vec::new(),
        }
    }

    fn expect(&mut self, ok: bool, line: String) {
        self.pass &= ok;
        self.lines.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }

    fn report(&mut self, r: &CheckReport) {
        let line = format!(
            "{}: lhs={:.12e} rhs={:.12e} abs_err={:.2e} rel_err={:.2e} tol={:.0e} {}",
            r.name, r.lhs, r.rhs, r.abs_err, r.rel_err, r.tol, r.detail
        );
        self.expect(r.pass, line);
    }

    fn result(&mut self, name: &str, r: kendall::Result<CheckReport>) {
        match r {
            Ok(r) => self.report(&r),
            Err(e) => self.expect(false, format!("{name}: error {e}")),
        }
    }
}

fn run(id: usize, title: &str, limit: Duration, body: impl FnOnce(&mut Outcome)) -> bool {
    let start = Instant::now();
    let mut o = Outcome::new();
    body(&mut o);
    let elapsed = start.elapsed();
    let in_time = elapsed <= limit;
    let pass = o.pass && in_time;
    println!(
        "{} criterion {id:>2}: {title} ({:.2} s, limit {} s)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    for l in &o.lines {
        println!("        {l}");
    }
    if !in_time {
        println!(
            "        FAIL runtime {:.2} s exceeds {} s",
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    pass
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn lambert_residuals(o: &mut Outcome) {
    let inv_e = (-1f64).exp();
    let n = 10_000;
    let mut worst0: f64 = 0.0;
    let mut worst1: f64 = 0.0;
    for i in 0..n {
        let u = (i as f64 + 0.5) / n as f64;
        // half the W₀ points on [−1/e, 1], half log-spaced on [1, 1e10]
        let z0 = if i < n / 2 {
            -inv_e + 2.0 * u * (1.0 + inv_e)
        } else {
            10f64.powf(10.0 * (2.0 * u - 1.0))
        };
        // W₋₁ points crowd towards both ends of [−1/e, 0)
        let zm = if i % 2 == 0 {
            -inv_e * u.powi(3)
        } else {
            -inv_e * (1.0 - u * u)
        };
        let w = lambert_w0(z0).expect("w0 domain");
        worst0 = worst0.max((w * w.exp() - z0).abs() / z0.abs().max(1.0));
        let w = lambert_wm1(zm).expect("wm1 domain");
        worst1 = worst1.max((w * w.exp() - zm).abs() / zm.abs().max(1.0));
    }
    o.expect(
        worst0 <= 1e-14,
        format!("W0: max |W e^W - z|/max(1,|z|) = {worst0:.2e} over {n} points"),
    );
    o.expect(
        worst1 <= 1e-14,
        format!("W-1: max |W e^W - z|/max(1,|z|) = {worst1:.2e} over {n} points"),
    );
}

fn closed_forms(o: &mut Outcome) {
    for p in [
        FamilyParams::poisson(0.5),
        FamilyParams::poisson(2.0),
        FamilyParams::gamma(1.0, 1.0),
        FamilyParams::gamma(2.0, 1.5),
    ] {
        let p = p.unwrap();
        o.result("closed_form_phi", check_closed_form_phi(p, 50.0, 50, 1e-10));
    }
}

fn laplace(o: &mut Outcome) {
    let jobs: Vec<(FamilyParams, f64, f64, f64)> = laplace_families()
        .into_iter()
        .flat_map(|(p, tol)| laplace_grid().into_iter().map(move |(t, z)| (p, t, z, tol)))
        .collect();
    let results: Vec<kendall::Result<CheckReport>> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .chunks(
                jobs.len()
                    .div_ceil(std::thread::available_parallelism().map_or(1, |n| n.get())),
            )
            .map(|chunk| {
                s.spawn(move || {
                    chunk
                        .iter()
                        .map(|&(p, t, z, tol)| check_laplace_identity(p, t, z, tol))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
    });
    for r in results {
        o.result("laplace", r);
    }
}

fn consistency(o: &mut Outcome) {
    for (p, y_max) in consistency_families() {
        o.result("consistency", check_density_consistency(p, 200, y_max, 7, 1e-12));
    }
}

fn normalization(o: &mut Outcome) {
    for c in [0.5, 2.0] {
        o.result(
            "normalization",
            check_normalization(FamilyParams::poisson(c).unwrap(), 1.0, 1e-10),
        );
    }
    for p in [
        FamilyParams::gamma(1.0, 1.0),
        FamilyParams::stable_low(1.0, 0.5),
        FamilyParams::stable_high(1.0, 1.5),
        FamilyParams::bessel(1.0, 1.0),
        FamilyParams::inverse_gaussian(1.0, 1.0),
    ] {
        o.result("normalization", check_normalization(p.unwrap(), 1.0, 1e-6));
    }
}

fn monte_carlo(o: &mut Outcome) {
    let (c, x, n) = (0.5, 1.0, 1_000_000);
    let workers = 4;
    let d = simulate_first_passage_poisson(c, x, x + 50.0 / (1.0 - c), n, 7, workers).unwrap();
    for k in 0..=5 {
        let p = first_passage_pmf_poisson(c, x, k).unwrap();
        let z = d.z_score(k, p);
        o.expect(
            z.abs() <= 3.0,
            format!(
                "first passage n={k}: empirical {:.6} exact {p:.6} z={z:+.3}",
                d.prob_of(k)
            ),
        );
    }
    o.expect(
        d.censored_fraction() < 1e-4,
        format!("first passage censored fraction {:.2e}", d.censored_fraction()),
    );
    let t = 1.0;
    let d = sample_y_poisson(c, t, n, 7, workers).unwrap();
    for k in 0..=5 {
        let p = y_pmf_poisson(c, t, k).unwrap();
        let z = d.z_score(k, p);
        o.expect(
            z.abs() <= 3.0,
            format!("Y_{t} n={k}: empirical {:.6} exact {p:.6} z={z:+.3}", d.prob_of(k)),
        );
    }
}

fn means(o: &mut Outcome) {
    o.result(
        "mean",
        check_mean_identity(FamilyParams::stable_low(1.0, 0.5).unwrap(), 1e-4),
    );
    let p = FamilyParams::stable_high(1.0, 1.5).unwrap();
    let h = build_exponent(p).unwrap();
    let reported = h.mean_y();
    let levy = integrate_semiaxis(|y| Ok(y * levy_density(&h, Space::Real(y))?.value), 1e-8)
        .unwrap()
        .value;
    o.expect(
        reported == f64::INFINITY,
        format!(
            "{p}: mean reported {reported} (expected +inf); 1/psi'(0) = {}, integral of y*pi_Y = {levy:.10}",
            1.0 / h.psi_prime(0.0)
        ),
    );
}

fn tails(o: &mut Outcome) {
    for p in [
        FamilyParams::poisson(0.5),
        FamilyParams::poisson(2.0),
        FamilyParams::gamma(1.0, 2.0),
        FamilyParams::gamma(2.0, 0.25),
    ] {
        o.result("tail", check_tail_asymptote(p.unwrap(), 400.0, 0.01));
    }
}

fn identities(o: &mut Outcome) {
    o.result("w", check_w_identities(1.0, 0.2, WMode::SeriesW0, 1e-12));
    o.result("w", check_w_identities(0.0, 0.2, WMode::SeriesW0, 1e-12));
    o.result("w", check_w_identities(-1.0, 0.2, WMode::IntegralWm1, 1e-6));
    for id in [
        IntegralIdentity::StableOneThird,
        IntegralIdentity::StableTwoThirds,
        IntegralIdentity::StableThreeHalves,
        IntegralIdentity::Bessel { c: 1.0, theta: 1.0 },
    ] {
        o.result("integral_identity", check_integral_identity(id, 1.0, 1.0, 1e-6));
    }
    for case in [StableCase::OneThird, StableCase::TwoThirds, StableCase::Duality] {
        o.result("stable", check_stable_closed_forms(case, &stable_grid(), 1e-7));
    }
}

fn complete_monotonicity(o: &mut Outcome) {
    for (f, g) in cm_cases() {
        o.result("cm", check_complete_monotonicity(f, MAX_CM_ORDER, &g, 1e-8));
    }
    let r = check_complete_monotonicity(CmFunction::NegativeControl, 4, &cm_grid(0.05, 20.0, 64), 1e-8).unwrap();
    o.expect(
        !r.pass,
        format!(
            "negative control rejected: {} worst={:.3e} ({})",
            r.name, r.lhs, r.detail
        ),
    );
}

fn ig_closure(o: &mut Outcome) {
    o.result(
        "ig",
        check_ig_closure(FamilyParams::inverse_gaussian(1.0, 1.0).unwrap(), 1e-8),
    );
    o.result(
        "ig",
        check_ig_closure(FamilyParams::inverse_gaussian(2.0, 3.0).unwrap(), 1e-8),
    );
}

fn small_time(o: &mut Outcome) {
    for y in [0.5, 1.0, 3.0] {
        o.result(
            "small_time",
            check_small_time_limit(FamilyParams::gamma(1.0, 1.0).unwrap(), y, 1e-4, 0.01),
        );
    }
}

#[test]
fn acceptance_criteria() {
    let results = [
        run(1, "Lambert W residuals on both branches", secs(1), lambert_residuals),
        run(2, "closed-form phi vs root finder", secs(1), closed_forms),
        run(3, "Laplace transform identity on the (t, z) grid", secs(120), laplace),
        run(
            4,
            "closed-form densities vs generic construction",
            secs(10),
            consistency,
        ),
        run(5, "normalization", secs(60), normalization),
        run(6, "Monte Carlo vs exact laws", secs(60), monte_carlo),
        run(7, "mean identities", secs(10), means),
        run(8, "tail asymptotics", secs(1), tails),
        run(
            9,
            "Lambert, integral and stable closed-form identities",
            secs(120),
            identities,
        ),
        run(10, "complete monotonicity", secs(30), complete_monotonicity),
        run(11, "inverse-Gaussian closure", secs(1), ig_closure),
        run(12, "small-time limit", secs(1), small_time),
    ];
    let failed: Vec<usize> = results
        .iter()
        .enumerate()
        .filter(|(_, &p)| !p)
        .map(|(i, _)| i + 1)
        .collect();
    println!("{} of {} criteria pass", results.len() - failed.len(), results.len());
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
