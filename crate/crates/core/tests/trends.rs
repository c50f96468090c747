//! Trend-level checks quoted for the figure discussions: cooperation
//! factors, loss-enhanced membership, and metric ranges on random probes.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use catalynet::loss::loss_enhanced_discriminant;
use catalynet::metrics::{cooperation, effective_qfi, success_probability};
use catalynet::probes::{self, mean_photon, ProbeSpec, UncatalyzedFamily};

#[test]
fn partial_cooperation_dominates_global_by_three_orders() {
    // d = 2, s = 1, N = 1; both cooperation factors are positive for
    // theta >= ~1 (the plotted window) and the partial scheme keeps the
    // success probability high enough to win by >= 1e3 there
    let alpha = probes::solve_amplitude_for_resource(1.0, 2, UncatalyzedFamily::Wc).unwrap();
    let reference = ProbeSpec::wc(alpha, 2);
    for m in [5usize, 6, 7] {
        for theta in [1.0, 1.2, 1.4] {
            let r_global = cooperation(&ProbeSpec::cwc(alpha, theta, m, 2), &reference).unwrap();
            let r_partial = cooperation(&ProbeSpec::pcwc(alpha, theta, m, 2, 1), &reference).unwrap();
            assert!(r_global > 0.0 && r_partial > 0.0);
            assert!(
                r_partial >= 1e3 * r_global,
                "m={m} theta={theta}: partial {r_partial:.3e} vs global {r_global:.3e}"
            );
        }
    }
}

#[test]
fn cooperation_decreases_with_catalytic_photons() {
    let alpha = probes::solve_amplitude_for_resource(1.0, 2, UncatalyzedFamily::Wc).unwrap();
    let reference = ProbeSpec::wc(alpha, 2);
    for theta in [1.1, 1.2, 1.3, 1.4] {
        let mut last = f64::INFINITY;
        for m in [5usize, 6, 7] {
            let r = cooperation(&ProbeSpec::cwc(alpha, theta, m, 2), &reference).unwrap();
            assert!(r < last, "R must fall as m grows at theta={theta}");
            last = r;
        }
    }
}

#[test]
fn loss_enhanced_membership_spot_values() {
    let alpha = probes::solve_amplitude_for_resource(0.5, 20, UncatalyzedFamily::Wc).unwrap();
    // inside the m = 5 window (left edge near 1.1)
    assert!(loss_enhanced_discriminant(&ProbeSpec::cwc(alpha, 1.2, 5, 20)).unwrap());
    // outside the m = 15 window
    assert!(!loss_enhanced_discriminant(&ProbeSpec::cwc(alpha, 0.5, 15, 20)).unwrap());
    // plain families are never loss-enhanced
    assert!(!loss_enhanced_discriminant(&ProbeSpec::wc(alpha, 20)).unwrap());
}

#[test]
fn metric_ranges_on_random_probes() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0010);
    for _ in 0..150 {
        let d = rng.gen_range(1usize..=5);
        let theta = rng.gen_range(0.02f64..1.4);
        let m = rng.gen_range(0usize..=5);
        let s = rng.gen_range(0usize..=d);
        let probe = match rng.gen_range(0u8..6) {
            0 => ProbeSpec::wc(rng.gen_range(0.05..1.5), d),
            1 => ProbeSpec::cwc(rng.gen_range(0.05..1.5), theta, m, d),
            2 => ProbeSpec::pcwc(rng.gen_range(0.05..1.5), theta, m, d, s),
            3 => ProbeSpec::ws(rng.gen_range(0.05..1.1), d),
            4 => ProbeSpec::cws(rng.gen_range(0.05..1.1), theta, m, d),
            _ => ProbeSpec::pcws(rng.gen_range(0.05..1.1), theta, m, d, s),
        };
        let p = success_probability(&probe).unwrap();
        assert!(p > 0.0 && p <= 1.0 + 1e-12, "P = {p} for {probe:?}");
        assert!(effective_qfi(&probe).unwrap() >= 0.0);
        assert!(mean_photon(&probe).unwrap() >= 0.0);
    }
}
