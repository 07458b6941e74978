mod common;

use proptest::prelude::*;
use tightprod::graph::Permutation;
use tightprod::words::{
    closed_path_count, cyclic_core, evaluate_word, reduce, word_order, Letter, Word,
    ENUMERATION_CAP,
};

fn word(d: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..d, any::<bool>()), 0..=max_len)
        .prop_map(|ls| Word::new(ls.into_iter().map(|(g, inv)| Letter::new(g, inv)).collect()))
}

fn permutations(d: usize, n: usize) -> impl Strategy<Value = Vec<Permutation>> {
    prop::collection::vec(
        Just((0..n).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::new(v).unwrap()),
        d,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn reduction_is_idempotent_and_preserves_the_map(w in word(3, 12), perms in permutations(3, 7)) {
        let r = reduce(&w);
        prop_assert!(r.len() <= w.len());
        prop_assert!(r.is_reduced());
        prop_assert_eq!(reduce(&r), r.clone());
        prop_assert_eq!(evaluate_word(&w, &perms).unwrap(), evaluate_word(&r, &perms).unwrap());
    }

    #[test]
    fn order_ignores_reduction_and_scales_with_powers(w in word(3, 10), m in 1usize..5) {
        prop_assert_eq!(word_order(&w), word_order(&reduce(&w)));
        let core = cyclic_core(&w);
        if !core.is_empty() {
            prop_assert_eq!(word_order(&core.power(m)), m * word_order(&core));
        }
    }

    #[test]
    fn conjugation_keeps_the_order(w in word(2, 8), u in word(2, 4)) {
        let conj = u.concat(&w).concat(&u.inverse());
        prop_assert_eq!(word_order(&conj), word_order(&w));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn closed_walks_count_the_trace(seed in any::<u64>(), degree in 1usize..=4, half in 1usize..=3) {
        let mut r = common::rng(seed, 20);
        let pg = common::random_regular(&mut r, 8, degree);
        let length = 2 * half;
        prop_assert_eq!(
            closed_path_count(&pg, length, ENUMERATION_CAP).unwrap(),
            common::trace_of_power(&pg.to_multigraph(), length)
        );
    }
}
