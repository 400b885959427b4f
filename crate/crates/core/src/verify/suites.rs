use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exponents::{Family, FamilyParams};

use super::cm::{check_complete_monotonicity, cm_grid, CmFunction, MAX_CM_ORDER};
use super::identities::{
    check_integral_identity, check_stable_closed_forms, check_w_identities, IntegralIdentity, StableCase, WMode,
};
use super::kendall::check_kendall_identity;
use super::laplace::{check_laplace_identity, geom_stable_validated, laplace_grid};
use super::properties::{
    check_closed_form_phi, check_density_consistency, check_ig_closure, check_mean_identity, check_normalization,
    check_small_time_limit, check_tail_asymptote,
};
use super::CheckReport;

/// Named groups of checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Laplace,
    Kendall,
    Cm,
    Crosscheck,
    Identities,
    IgClosure,
    All,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Laplace,
        Suite::Kendall,
        Suite::Cm,
        Suite::Crosscheck,
        Suite::Identities,
        Suite::IgClosure,
        Suite::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Laplace => "laplace",
            Suite::Kendall => "kendall",
            Suite::Cm => "cm",
            Suite::Crosscheck => "crosscheck",
            Suite::Identities => "identities",
            Suite::IgClosure => "ig-closure",
            Suite::All => "all",
        }
    }

    pub fn from_name(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }
}

/// Narrows a suite to one family (laplace, kendall) or one function (cm).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SuiteOptions {
    pub params: Option<FamilyParams>,
    pub cm: Option<CmFunction>,
}

/// A deferred check: its name (used if it errors), tolerance and body.
type Job = (String, f64, Box<dyn Fn() -> Result<CheckReport> + Send + Sync>);

fn job<F>(name: impl Into<String>, tol: f64, f: F) -> Job
where
    F: Fn() -> Result<CheckReport> + Send + Sync + 'static,
{
    (name.into(), tol, Box::new(f))
}

/// Runs the jobs on all available cores; the output order is the job order.
fn run(jobs: Vec<Job>) -> Vec<CheckReport> {
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(jobs.len().max(1));
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots: Vec<std::sync::Mutex<Option<CheckReport>>> = jobs.iter().map(|_| Default::default()).collect();
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                let Some((name, tol, f)) = jobs.get(i) else { break };
                let r = f().unwrap_or_else(|e| CheckReport::failed(name.clone(), *tol, &e));
                *slots[i].lock().expect("slot poisoned") = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().expect("slot poisoned").expect("every job ran"))
        .collect()
}

/// Families covered by the default Laplace suite with their tolerances.
pub fn laplace_families() -> Vec<(FamilyParams, f64)> {
    let p = |r: Result<FamilyParams>| r.expect("valid parameters");
    vec![
        (p(FamilyParams::poisson(0.5)), 1e-6),
        (p(FamilyParams::gamma(1.0, 1.0)), 1e-6),
        (p(FamilyParams::stable_low(1.0, 0.5)), 1e-6),
        (p(FamilyParams::stable_low(1.0, 1.0 / 3.0)), 1e-6),
        (p(FamilyParams::stable_low(1.0, 2.0 / 3.0)), 1e-6),
        (p(FamilyParams::stable_high(1.0, 1.5)), 1e-6),
        (p(FamilyParams::bessel(1.0, 1.0)), 1e-6),
        (p(FamilyParams::inverse_gaussian(1.0, 1.0)), 1e-6),
        (geom_stable_validated(), 1e-4),
    ]
}

fn laplace_jobs(params: Option<FamilyParams>) -> Vec<Job> {
    let fams = match params {
        Some(p) => vec![(p, if p.family() == Family::GeomStable { 1e-4 } else { 1e-6 })],
        None => laplace_families(),
    };
    let mut jobs = Vec::new();
    for (p, tol) in fams {
        for (t, z) in laplace_grid() {
            jobs.push(job(format!("laplace[{p}, t={t}, z={z}]"), tol, move || {
                check_laplace_identity(p, t, z, tol)
            }));
        }
    }
    jobs
}

fn kendall_jobs(params: Option<FamilyParams>) -> Vec<Job> {
    let cases: Vec<(FamilyParams, f64, f64, f64)> = match params {
        Some(p) => {
            let tol = if p.family() == Family::Poisson { 1e-8 } else { 1e-5 };
            vec![(p, 0.5, 3.0, tol)]
        }
        None => vec![
            (FamilyParams::poisson(0.5).expect("valid"), 0.5, 3.0, 1e-8),
            (FamilyParams::poisson(2.0).expect("valid"), 0.3, 4.2, 1e-8),
            (FamilyParams::gamma(1.0, 1.0).expect("valid"), 0.5, 2.0, 1e-5),
            (FamilyParams::gamma(2.0, 1.5).expect("valid"), 0.5, 2.0, 1e-5),
        ],
    };
    cases
        .into_iter()
        .map(|(p, y, t, tol)| {
            job(format!("kendall[{p}, y={y}, t={t}]"), tol, move || {
                check_kendall_identity(p, y, t, tol)
            })
        })
        .collect()
}

/// The default complete-monotonicity cases with their grids.
pub fn cm_cases() -> Vec<(CmFunction, Vec<f64>)> {
    let g = cm_grid(0.05, 20.0, 64);
    vec![
        (CmFunction::F1 { c: 1.0 }, g.clone()),
        (CmFunction::F2 { alpha: 0.5 }, g.clone()),
        (CmFunction::F3 { alpha: 1.5 }, g.clone()),
        (CmFunction::F4 { c: 1.0 }, g),
        // the alternating series is only usable up to about y = 9 here
        (CmFunction::F5 { c: 1.0, alpha: 0.5 }, cm_grid(0.05, 8.0, 64)),
    ]
}

const CM_TOL: f64 = 1e-8;

fn cm_jobs(f: Option<CmFunction>) -> Vec<Job> {
    let cases = match f {
        Some(f) => {
            let hi = if matches!(f, CmFunction::F5 { .. }) { 8.0 } else { 20.0 };
            vec![(f, cm_grid(0.05, hi, 64))]
        }
        None => cm_cases(),
    };
    let mut jobs: Vec<Job> = cases
        .into_iter()
        .map(|(f, g)| {
            job(format!("complete_monotonicity[{}]", f.name()), CM_TOL, move || {
                check_complete_monotonicity(f, MAX_CM_ORDER, &g, CM_TOL)
            })
        })
        .collect();
    if f.is_none() {
        jobs.push(job("cm_negative_control_rejected", CM_TOL, || {
            let r = check_complete_monotonicity(CmFunction::NegativeControl, 4, &cm_grid(0.05, 20.0, 64), CM_TOL)?;
            let mut out = r.clone();
            out.name = format!("cm_negative_control_rejected[{}]", r.name);
            out.pass = !r.pass;
            Ok(out)
        }));
    }
    jobs
}

fn identity_jobs() -> Vec<Job> {
    let mut jobs = vec![
        job("w0_series[r=1, z=0.2]", 1e-12, || {
            check_w_identities(1.0, 0.2, WMode::SeriesW0, 1e-12)
        }),
        job("w0_series[r=0, z=0.2]", 1e-12, || {
            check_w_identities(0.0, 0.2, WMode::SeriesW0, 1e-12)
        }),
        job("w0_series[r=-2.5, z=0.3]", 1e-10, || {
            check_w_identities(-2.5, 0.3, WMode::SeriesW0, 1e-10)
        }),
        job("wm1_integral[r=-1, t=0.2]", 1e-6, || {
            check_w_identities(-1.0, 0.2, WMode::IntegralWm1, 1e-6)
        }),
        job("wm1_integral[r=-0.4, t=0.1]", 1e-6, || {
            check_w_identities(-0.4, 0.1, WMode::IntegralWm1, 1e-6)
        }),
    ];
    let integrals = [
        IntegralIdentity::StableOneThird,
        IntegralIdentity::StableTwoThirds,
        IntegralIdentity::StableThreeHalves,
        IntegralIdentity::Bessel { c: 1.0, theta: 1.0 },
    ];
    for id in integrals {
        for (t, q) in [(1.0, 1.0), (0.5, 2.0), (2.0, 0.5)] {
            jobs.push(job(
                format!("integral_identity[{}, t={t}, q={q}]", id.name()),
                1e-6,
                move || check_integral_identity(id, t, q, 1e-6),
            ));
        }
    }
    jobs
}

/// Log-spaced grid on `[0.05, 20]` used by the stable closed-form checks.
pub fn stable_grid() -> Vec<f64> {
    cm_grid(0.05, 20.0, 40)
}

fn crosscheck_jobs() -> Vec<Job> {
    let p = |r: Result<FamilyParams>| r.expect("valid parameters");
    let mut jobs = Vec::new();
    for case in [StableCase::OneThird, StableCase::TwoThirds, StableCase::Duality] {
        jobs.push(job(format!("stable_closed_form[{case:?}]"), 1e-7, move || {
            check_stable_closed_forms(case, &stable_grid(), 1e-7)
        }));
    }
    for q in [
        p(FamilyParams::poisson(0.5)),
        p(FamilyParams::poisson(2.0)),
        p(FamilyParams::gamma(1.0, 1.0)),
        p(FamilyParams::gamma(2.0, 1.5)),
    ] {
        jobs.push(job(format!("closed_form_phi[{q}]"), 1e-10, move || {
            check_closed_form_phi(q, 50.0, 50, 1e-10)
        }));
    }
    for (q, y_max) in consistency_families() {
        jobs.push(job(format!("density_consistency[{q}]"), 1e-12, move || {
            check_density_consistency(q, 200, y_max, 2024, 1e-12)
        }));
    }
    for (q, tol) in normalization_families() {
        jobs.push(job(format!("normalization[{q}]"), tol, move || {
            check_normalization(q, 1.0, tol)
        }));
    }
    for q in [
        p(FamilyParams::stable_low(1.0, 0.5)),
        p(FamilyParams::stable_high(1.0, 1.5)),
        p(FamilyParams::gamma(2.0, 1.5)),
    ] {
        jobs.push(job(format!("mean[{q}]"), 1e-4, move || check_mean_identity(q, 1e-4)));
    }
    for (q, y) in [
        (p(FamilyParams::poisson(0.5)), 400.0),
        (p(FamilyParams::poisson(2.0)), 400.0),
        (p(FamilyParams::gamma(1.0, 2.0)), 400.0),
    ] {
        jobs.push(job(format!("tail_asymptote[{q}]"), 0.01, move || {
            check_tail_asymptote(q, y, 0.01)
        }));
    }
    for y in [0.5, 1.0, 3.0] {
        let q = p(FamilyParams::gamma(1.0, 1.0));
        jobs.push(job(format!("small_time[{q}, y={y}]"), 0.01, move || {
            check_small_time_limit(q, y, 1e-4, 0.01)
        }));
    }
    jobs
}

/// One parameter set per family with the upper end of its sampled `y` range.
pub fn consistency_families() -> Vec<(FamilyParams, f64)> {
    let p = |r: Result<FamilyParams>| r.expect("valid parameters");
    vec![
        (p(FamilyParams::poisson(0.7)), 20.0),
        (p(FamilyParams::gamma(1.3, 0.6)), 20.0),
        (p(FamilyParams::stable_low(1.2, 0.5)), 20.0),
        (p(FamilyParams::stable_high(0.8, 1.5)), 20.0),
        (p(FamilyParams::bessel(0.6, 2.0)), 20.0),
        (geom_stable_validated(), 20.0),
        (p(FamilyParams::inverse_gaussian(1.5, 0.7)), 20.0),
    ]
}

/// Families whose total mass is checked, with tolerances.
pub fn normalization_families() -> Vec<(FamilyParams, f64)> {
    let p = |r: Result<FamilyParams>| r.expect("valid parameters");
    vec![
        (p(FamilyParams::poisson(0.5)), 1e-10),
        (p(FamilyParams::poisson(2.0)), 1e-10),
        (p(FamilyParams::gamma(1.0, 1.0)), 1e-6),
        (p(FamilyParams::stable_low(1.0, 0.5)), 1e-6),
        (p(FamilyParams::stable_high(1.0, 1.5)), 1e-6),
        (p(FamilyParams::bessel(1.0, 1.0)), 1e-6),
        (p(FamilyParams::inverse_gaussian(1.0, 1.0)), 1e-6),
    ]
}

fn ig_jobs() -> Vec<Job> {
    [(1.0, 1.0), (1.5, 0.7), (2.0, 3.0)]
        .into_iter()
        .map(|(c, th)| {
            let q = FamilyParams::inverse_gaussian(c, th).expect("valid parameters");
            job(format!("ig_closure[{q}]"), 1e-8, move || check_ig_closure(q, 1e-8))
        })
        .collect()
}

fn jobs(suite: Suite, opts: &SuiteOptions) -> Vec<Job> {
    match suite {
        Suite::Laplace => laplace_jobs(opts.params),
        Suite::Kendall => kendall_jobs(opts.params),
        Suite::Cm => cm_jobs(opts.cm),
        Suite::Crosscheck => crosscheck_jobs(),
        Suite::Identities => identity_jobs(),
        Suite::IgClosure => ig_jobs(),
        Suite::All => [
            Suite::Laplace,
            Suite::Kendall,
            Suite::Cm,
            Suite::Crosscheck,
            Suite::Identities,
            Suite::IgClosure,
        ]
        .into_iter()
        .flat_map(|s| jobs(s, &SuiteOptions::default()))
        .collect(),
    }
}

/// Runs a suite; checks that error out are reported as failures.
pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Vec<CheckReport> {
    run(jobs(suite, opts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::from_name(s.name()), Some(s));
        }
        assert_eq!(Suite::from_name("nope"), None);
    }

    #[test]
    fn laplace_suite_for_one_family_has_twelve_reports() {
        let opts = SuiteOptions {
            params: Some(FamilyParams::bessel(1.0, 1.0).unwrap()),
            cm: None,
        };
        let r = run_suite(Suite::Laplace, &opts);
        assert_eq!(r.len(), 12);
        assert!(r.iter().all(|r| r.pass), "{r:?}");
    }

    #[test]
    fn cm_suite_single_function() {
        let opts = SuiteOptions {
            params: None,
            cm: Some(CmFunction::F1 { c: 1.0 }),
        };
        let r = run_suite(Suite::Cm, &opts);
        assert_eq!(r.len(), 1);
        assert!(r[0].pass);
    }

    #[test]
    fn errors_become_failed_reports() {
        let r = run(vec![job("boom", 1e-6, || {
            Err(crate::error::Error::Unsupported("x".into()))
        })]);
        assert_eq!(r.len(), 1);
        assert!(!r[0].pass && r[0].lhs.is_nan());
    }
}
