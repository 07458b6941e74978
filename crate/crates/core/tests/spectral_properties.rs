mod common;

use std::collections::HashSet;
use std::path::Path;

use proptest::prelude::*;
use tightprod::covering::verify_covering;
use tightprod::graph::families;
use tightprod::spectral::{
    mu_bound, random_base, random_lift, random_tight_product, run_experiment, spectrum_report,
    ExperimentConfig,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn random_products_cover_and_split(seed in any::<u64>(), d in 1usize..=3, nb in 1usize..=6, n in 1usize..=8) {
        let base = random_base(nb, d, seed);
        let p = random_tight_product(&base, n, seed, 3).unwrap();
        prop_assert_eq!(p.h.vertex_count(), nb * n);
        prop_assert_eq!(p.h.regular_degree(), Some(2 * d));
        prop_assert!(verify_covering(&p.h, &p.g_b, &p.proj_base).unwrap().is_covering());
        prop_assert!(verify_covering(&p.h, &p.g_r, &p.proj_random).unwrap().is_covering());
        let r = spectrum_report(&p, None).unwrap();
        prop_assert_eq!(r.new_eigenvalues.len(), nb * (n - 1));
        prop_assert_eq!(r.mu.is_none(), n == 1);
        prop_assert!(common::spectrum_contains(&r.eigenvalues_h, &r.eigenvalues_random_factor, 1e-6));
        prop_assert!((r.eigenvalues_h.last().unwrap() - 2.0 * d as f64).abs() < 1e-8);
        if n == 1 {
            prop_assert_eq!(p.h.adjacency_counts(), p.g_b.adjacency_counts());
        }
    }

    #[test]
    fn random_lifts_cover(seed in any::<u64>(), n in 1usize..=6) {
        let base = common::random_regular(&mut common::rng(seed, 30), 8, 3).to_multigraph();
        let (lift, map) = random_lift(&base, n, seed, 0).unwrap();
        prop_assert!(verify_covering(&lift, &base, &map).unwrap().is_covering());
        prop_assert_eq!(lift.vertex_count(), base.vertex_count() * n);
    }
}

#[test]
fn two_lifts_of_a_triangle_reach_all_eight() {
    let tri = families::cycle(3);
    let lifts: HashSet<Vec<Vec<u32>>> = (0..200)
        .map(|s| random_lift(&tri, 2, s, 0).unwrap().0.adjacency_counts())
        .collect();
    assert_eq!(lifts.len(), 8);
}

#[test]
fn small_trials_match_closed_walk_counts() {
    let cfg = ExperimentConfig::parse(
        "seed = 3\nd = 4\nn = 5\ntrials = 2\nbase = random:10,8\nkmax = 4\n",
    )
    .unwrap();
    let base = cfg.load_base(Path::new(".")).unwrap();
    let report = run_experiment(&cfg, &base).unwrap();
    assert_eq!(report.trace_checks.len(), 4);
    for check in &report.trace_checks {
        let p = random_tight_product(&base, 5, cfg.seed, check.trial).unwrap();
        assert_eq!(
            check.trace,
            common::trace_of_power(&p.h, check.length),
            "trial {}",
            check.trial
        );
    }
}

#[test]
fn largest_new_eigenvalue_stays_below_threshold_as_n_grows() {
    let cfg = ExperimentConfig::parse(&format!(
        "seed = 5\nd = 4\nn = 50, 100, 200, 400\ntrials = 1\nbase = random:10,8\njobs = {}\n",
        std::thread::available_parallelism().map_or(1, |n| n.get())
    ))
    .unwrap();
    let base = cfg.load_base(Path::new(".")).unwrap();
    let report = run_experiment(&cfg, &base).unwrap();
    for g in &report.groups {
        let max = g.max_mu.unwrap();
        assert!(max <= mu_bound(4) + cfg.slack, "n = {}: max mu {max}", g.n);
    }
}
