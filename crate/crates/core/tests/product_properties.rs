mod common;

use common::*;
use proptest::prelude::*;
use tightprod::factorization::{
    exact_edge_chromatic, is_perfect_matching, max_matching, EdgeChromaticOutcome,
};
use tightprod::graph::MultiGraph;
use tightprod::linalg::{symmetric_eigen, symmetric_eigenvalues};
use tightprod::product::{
    assemble_product, brute_force_tight_product, product_even_regular, product_odd_matching,
    product_via_semicoloring, BruteForceCaps, BruteForceOutcome, TightProduct,
};
use tightprod::rng::{below, Stream};
use tightprod::semicolor::semi_color_subcubic;

/// One product from a randomly chosen construction.
fn random_product(r: &mut Stream) -> TightProduct {
    match below(r, 4) {
        0 => {
            let degree = 2 * (1 + below(r, 2));
            let g1 = random_regular(r, 10, degree).to_multigraph();
            let g2 = random_regular(r, 10, degree).to_multigraph();
            product_even_regular(&g1, &g2).unwrap()
        }
        1 => {
            let g1 = random_regular(r, 10, 3).to_multigraph();
            let g2 = random_regular(r, 10, 3).to_multigraph();
            product_odd_matching(&g1, &g2, None, None).unwrap()
        }
        2 => {
            let g1 = random_regular(r, 10, 3).to_multigraph();
            let (g2, coloring) = colored_cubic(r, 10);
            product_via_semicoloring(&g1, &semi_color_subcubic(&g1).unwrap(), &g2, &coloring)
                .unwrap()
        }
        _ => {
            let degree = 1 + below(r, 4);
            let p1 = random_regular(r, 10, degree);
            let p2 = random_regular(r, 10, degree);
            let family = random_family(&p1, &p2, r);
            assemble_product(&p1.to_multigraph(), &p2.to_multigraph(), &family).unwrap()
        }
    }
}

fn spectrum(g: &MultiGraph) -> Vec<f64> {
    symmetric_eigenvalues(&g.adjacency_matrix()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn factor_spectra_lie_in_the_product(seed in any::<u64>()) {
        let tp = random_product(&mut rng(seed, 10));
        prop_assert!(tp.is_valid());
        let sh = spectrum(&tp.h);
        prop_assert!(spectrum_contains(&sh, &spectrum(&tp.g1), 1e-8));
        prop_assert!(spectrum_contains(&sh, &spectrum(&tp.g2), 1e-8));
    }

    #[test]
    fn bipartition_and_components_propagate(seed in any::<u64>()) {
        let tp = random_product(&mut rng(seed, 11));
        let (c1, c2) = (two_coloring(&tp.g1), two_coloring(&tp.g2));
        if c1.is_some() || c2.is_some() {
            prop_assert!(two_coloring(&tp.h).is_some());
        }
        if component_count(&tp.g1) > 1 || component_count(&tp.g2) > 1 {
            prop_assert!(component_count(&tp.h) > 1);
        }
        if let (Some(s1), Some(s2)) = (c1, c2) {
            let n2 = tp.g2.vertex_count();
            for (x, y) in tp.h.edges() {
                prop_assert_eq!(s1[x / n2] ^ s2[x % n2], s1[y / n2] ^ s2[y % n2]);
            }
            prop_assert!(component_count(&tp.h) > 1);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn eigenfunctions_of_the_first_factor_lift(seed in any::<u64>()) {
        let tp = random_product(&mut rng(seed, 12));
        let (values, vectors) = symmetric_eigen(&tp.g1.adjacency_matrix()).unwrap();
        let ah = tp.h.adjacency_matrix();
        for (i, &lambda) in values.iter().enumerate() {
            let lifted: Vec<f64> = tp.proj1.vertex_map.iter().map(|&v| vectors.get(v, i)).collect();
            let image = ah.mul_vec(&lifted);
            for (a, b) in image.iter().zip(&lifted) {
                prop_assert!((a - lambda * b).abs() < 1e-8);
            }
        }
    }
}

fn has_perfect_matching(g: &MultiGraph) -> bool {
    is_perfect_matching(g, &max_matching(g))
}

/// Constructions whose preconditions hold must succeed, and must agree with
/// the exhaustive search.
fn constructive(g1: &MultiGraph, g2: &MultiGraph) -> Option<TightProduct> {
    let d = g1.regular_degree()?;
    if d % 2 == 0 {
        return Some(product_even_regular(g1, g2).expect("even degree always works"));
    }
    if has_perfect_matching(g1) && has_perfect_matching(g2) {
        return Some(product_odd_matching(g1, g2, None, None).expect("matchings exist"));
    }
    if d == 3 {
        if let EdgeChromaticOutcome::Colorable(c) = exact_edge_chromatic(g2, 3, u64::MAX) {
            let semi = semi_color_subcubic(g1).unwrap();
            return Some(
                product_via_semicoloring(g1, &semi, g2, &c).expect("class-1 second factor"),
            );
        }
    }
    None
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn constructions_agree_with_exhaustive_search(seed in any::<u64>()) {
        let mut r = rng(seed, 13);
        let degree = 1 + below(&mut r, 3);
        let max1 = if degree == 1 { 10 } else { 20 / degree };
        let g1 = random_regular(&mut r, max1.min(10), degree).to_multigraph();
        let g2 = random_regular(&mut r, 6, degree).to_multigraph();
        prop_assume!(g1.edge_count() <= 10);
        let built = constructive(&g1, &g2);
        let caps = BruteForceCaps { node_cap: 2_000_000, ..BruteForceCaps::default() };
        match brute_force_tight_product(&g1, &g2, caps) {
            BruteForceOutcome::Found(tp) => prop_assert!(tp.is_valid()),
            BruteForceOutcome::Exhausted { .. } => prop_assert!(built.is_none()),
            other => prop_assert!(false, "search did not finish: {:?}", other),
        }
        if let Some(tp) = built {
            prop_assert!(tp.is_valid());
        }
    }
}

#[test]
fn exhaustive_search_matches_between_modes() {
    for seed in 0..10 {
        let mut r = rng(seed, 14);
        let g1 = random_regular(&mut r, 6, 3).to_multigraph();
        let g2 = random_regular(&mut r, 6, 3).to_multigraph();
        if g1.edge_count() > 10 {
            continue;
        }
        let serial = brute_force_tight_product(&g1, &g2, BruteForceCaps::default());
        let parallel = brute_force_tight_product(
            &g1,
            &g2,
            BruteForceCaps {
                parallel: true,
                ..BruteForceCaps::default()
            },
        );
        assert_eq!(serial, parallel);
    }
}
