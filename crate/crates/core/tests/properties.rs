//! Randomised invariants of the public API.

use kendall::exponents::{build_exponent, phi_closed_gamma, phi_closed_poisson, FamilyParams};
use kendall::families::{transition_density, transition_from_base, Space};
use kendall::simulate::{sample_y_poisson, simulate_first_passage_poisson};
use kendall::specialfn::{lambert_w0, lambert_wm1};
use proptest::prelude::*;

fn family() -> impl Strategy<Value = FamilyParams> {
    prop_oneof![
        (0.1f64..3.0).prop_map(|c| FamilyParams::poisson(c).unwrap()),
        (0.1f64..3.0, 0.2f64..3.0).prop_map(|(c, th)| FamilyParams::gamma(c, th).unwrap()),
        (0.2f64..3.0, 0.1f64..0.9).prop_map(|(c, a)| FamilyParams::stable_low(c, a).unwrap()),
        (0.2f64..3.0, 0.2f64..3.0).prop_map(|(c, th)| FamilyParams::bessel(c, th).unwrap()),
        (0.2f64..3.0, 0.2f64..3.0).prop_map(|(c, th)| FamilyParams::inverse_gaussian(c, th).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn lambert_w0_round_trip(w in -1.0f64..20.0) {
        let z = w * w.exp();
        let back = lambert_w0(z).unwrap();
        prop_assert!((back - w).abs() <= 1e-12 * w.abs().max(1.0), "w={w} back={back}");
    }

    #[test]
    fn lambert_wm1_round_trip(w in -40.0f64..-1.0) {
        let z = w * w.exp();
        let back = lambert_wm1(z).unwrap();
        prop_assert!((back - w).abs() <= 1e-9 * w.abs(), "w={w} back={back}");
    }

    #[test]
    fn phi_inverts_psi(p in family(), q in 0.0f64..50.0) {
        let h = build_exponent(p).unwrap();
        let r = h.invert_phi(q).unwrap();
        prop_assert!(r.value >= h.killing());
        prop_assert!(r.residual <= 1e-10 * q.max(1.0), "{p} q={q}: {r:?}");
    }

    #[test]
    fn phi_y_is_increasing_concave_and_vanishes_at_zero(p in family(), z in 0.05f64..20.0, dz in 0.05f64..5.0) {
        let h = build_exponent(p).unwrap();
        prop_assert_eq!(h.phi_y(0.0).unwrap(), 0.0);
        let (a, b, c) = (h.phi_y(z).unwrap(), h.phi_y(z + dz).unwrap(), h.phi_y(z + 2.0 * dz).unwrap());
        prop_assert!(a > 0.0 && b > a && c > b, "{p}: {a} {b} {c}");
        prop_assert!(c - b <= (b - a) * (1.0 + 1e-9) + 1e-12, "{p}: not concave {a} {b} {c}");
    }

    #[test]
    fn closed_form_phi_matches_root(c in 0.1f64..3.0, th in 0.2f64..3.0, q in 0.0f64..50.0) {
        let hp = build_exponent(FamilyParams::poisson(c).unwrap()).unwrap();
        let a = phi_closed_poisson(c, q).unwrap();
        prop_assert!((a - hp.invert_phi(q).unwrap().value).abs() <= 1e-9 * a.max(1.0));
        let hg = build_exponent(FamilyParams::gamma(c, th).unwrap()).unwrap();
        let b = phi_closed_gamma(c, th, q).unwrap();
        prop_assert!((b - hg.invert_phi(q).unwrap().value).abs() <= 1e-9 * b.max(1.0));
    }

    #[test]
    fn closed_form_density_matches_generic(p in family(), t in 0.1f64..3.0, y in 0.05f64..20.0) {
        let h = build_exponent(p).unwrap();
        let at = if p.family().is_lattice() { Space::Lattice(y.round() as u64) } else { Space::Real(y) };
        let a = transition_density(&h, t, at).unwrap();
        let b = transition_from_base(&h, t, at).unwrap();
        prop_assert!((a.log_value - b.log_value).abs() <= 1e-9 * a.log_value.abs().max(1.0), "{p} t={t} y={y}: {a:?} vs {b:?}");
    }

    #[test]
    fn empirical_distributions_are_normalised(c in 0.1f64..1.0, x in 0.2f64..3.0, seed in any::<u64>(), workers in 1usize..4) {
        let d = simulate_first_passage_poisson(c, x, x + 20.0, 2_000, seed, workers).unwrap();
        let total: f64 = d.prob.iter().sum::<f64>() + d.censored_fraction();
        prop_assert!((total - 1.0).abs() < 1e-12, "{total}");
        prop_assert_eq!(d.n_samples, 2_000);
        let d = sample_y_poisson(c, x, 2_000, seed, workers).unwrap();
        prop_assert!((d.prob.iter().sum::<f64>() + d.censored_fraction() - 1.0).abs() < 1e-12);
        prop_assert!(d.support.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn simulation_is_reproducible(seed in any::<u64>(), workers in 1usize..4) {
        let a = sample_y_poisson(0.5, 1.0, 500, seed, workers).unwrap();
        let b = sample_y_poisson(0.5, 1.0, 500, seed, workers).unwrap();
        prop_assert_eq!(a, b);
    }
}
