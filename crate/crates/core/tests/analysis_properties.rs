//! Cross-checks of the analysis layer against independent solves.

use enaqt_core::analysis::{
    circle_max_enaqt, dephased_efficiency_estimate, efficiency_curve, enaqt_estimate,
    infinite_chain_enaqt, log_grid, max_enaqt, no_enaqt_region, optimize_dephasing, plane_sweep,
    symmetry_split, SweepTarget,
};
use enaqt_core::{SystemSpec, Topology};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn weak_attenuation_estimate_within_twenty_percent() {
    let (kappa, mu) = (1e-3, 1e-2);
    // 0-based (sites, trap, initial).
    for (n, trap, init) in [(3, 0, 1), (4, 0, 2), (5, 0, 2)] {
        let spec = SystemSpec::chain(n, trap, init).with_kappa_mu(kappa, mu);
        let xi = optimize_dephasing(&spec).unwrap().xi;
        let est = enaqt_estimate(Topology::Chain, n, kappa, mu, trap, init).unwrap();
        let rel = (est - xi).abs() / xi;
        assert!(rel < 0.2, "N={n} estimate {est} vs {xi} ({rel:.3})");
    }
}

#[test]
fn dephased_plateau_matches_uniform_mixing() {
    let spec = SystemSpec::chain(3, 0, 1).with_kappa_mu(1e-3, 1e-3);
    let eta = efficiency_curve(&spec, &[1.0]).unwrap()[0].1;
    assert!((eta - dephased_efficiency_estimate(3, 1e-3, 1e-3)).abs() < 0.02);
}

#[test]
fn no_enaqt_region_matches_optimizer() {
    let grid = log_grid(1e-3, 10.0, 20);
    let mut disagreements = Vec::new();
    for &k in &grid {
        for &m in &grid[..10] {
            let xi = optimize_dephasing(&SystemSpec::chain(3, 0, 1).with_kappa_mu(k, m))
                .unwrap()
                .xi;
            if no_enaqt_region(k, m) != (xi < 1e-9) {
                disagreements.push((k, m, xi));
            }
        }
    }
    assert!(disagreements.is_empty(), "{disagreements:?}");
}

#[test]
fn enaqt_result_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..30 {
        let n = rng.gen_range(3..=5);
        let trap = rng.gen_range(0..n);
        let init = (trap + rng.gen_range(1..n)) % n;
        let k = 10f64.powf(rng.gen_range(-3.0..1.0));
        let m = 10f64.powf(rng.gen_range(-3.0..1.0));
        let r = optimize_dephasing(&SystemSpec::chain(n, trap, init).with_kappa_mu(k, m)).unwrap();
        assert!(r.xi >= 0.0 && r.eta_max >= r.eta0);
        assert_eq!(r.xi, r.eta_max - r.eta0);
        assert_eq!(r.xi == 0.0, r.gamma_opt == 0.0);
    }
}

#[test]
fn end_to_end_transfer_has_no_gain() {
    for n in 3..=6 {
        let r = max_enaqt(Topology::Chain, n, 0, n - 1).unwrap();
        assert!(r.xi_max < 1e-6, "N={n}: {}", r.xi_max);
    }
}

#[test]
fn mirror_pair_maxima_agree() {
    for (n, trap) in [(4usize, 0usize), (5, 0), (5, 1)] {
        for init in 0..n {
            let mirror = n - 1 - init;
            if init == trap || mirror == trap || mirror <= init {
                continue;
            }
            let a = max_enaqt(Topology::Chain, n, trap, init).unwrap().xi_max;
            let b = max_enaqt(Topology::Chain, n, trap, mirror).unwrap().xi_max;
            assert!(
                (a - b).abs() < 1e-3,
                "N={n} trap={trap} {init}/{mirror}: {a} vs {b}"
            );
        }
    }
}

#[test]
fn ring_maximum_matches_dichotomy() {
    for d in 1..4 {
        let numeric = max_enaqt(Topology::Ring, 4, 0, d).unwrap().xi_max;
        assert!((numeric - circle_max_enaqt(4, 0, d).unwrap()).abs() < 5e-3);
    }
}

#[test]
fn middle_trap_gain_approaches_one_half() {
    let spec = SystemSpec::chain(5, 2, 0).with_kappa_mu(0.1, 1e-6);
    let split = symmetry_split(&spec).unwrap();
    assert!((split.eta_site - 0.5).abs() < 1e-3);
    let dephased = SystemSpec::chain(3, 1, 0).with_rates(1.0, 1e-6, 1.0);
    let r = optimize_dephasing(&dephased).unwrap();
    assert!(r.eta_max > 0.99 && (r.xi - 0.5).abs() < 1e-2);
}

#[test]
fn sweep_shows_no_gain_when_loss_dominates() {
    let target = SweepTarget::Finite {
        topology: Topology::Chain,
        sites: 3,
        trap: 0,
        init: 1,
    };
    let map = plane_sweep(target, &[1e-4, 1e-3], &[1.0, 10.0]).unwrap();
    for (_, _, cell) in map.iter() {
        assert!(cell.as_ref().unwrap().xi < 1e-4);
    }
}

#[test]
fn farther_start_gains_less_on_the_infinite_chain() {
    let near = infinite_chain_enaqt(6.3, 0.1, 1).unwrap().result.xi;
    let far = infinite_chain_enaqt(6.3, 0.1, 2).unwrap().result.xi;
    assert!(far < near, "offset 2: {far}, offset 1: {near}");
}
