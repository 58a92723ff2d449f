//! Property checks for the formula layer: parse/render round trips, index
//! injectivity, and subformula monotonicity of the canonical enumeration.

use std::collections::BTreeSet;

use nalab_core::formula::{is_proper_subformula, Formula};
use nalab_core::parse::{parse_formula, render_formula};
use proptest::prelude::{prop_oneof, Just, Strategy};
use proptest::{prop_assert, prop_assert_eq, proptest};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn random_formula(rng: &mut impl Rng, depth: u32) -> Formula {
    let vars = ["p", "q", "r", "s1", "longer_name"];
    if depth == 0 || rng.gen_ratio(1, 4) {
        return if rng.gen_ratio(1, 6) {
            Formula::Bot
        } else {
            Formula::var(vars.choose(rng).unwrap())
        };
    }
    match rng.gen_range(0..5) {
        0 => Formula::neg(random_formula(rng, depth - 1)),
        1 => Formula::and(
            random_formula(rng, depth - 1),
            random_formula(rng, depth - 1),
        ),
        2 => Formula::or(
            random_formula(rng, depth - 1),
            random_formula(rng, depth - 1),
        ),
        3 => Formula::imp(
            random_formula(rng, depth - 1),
            random_formula(rng, depth - 1),
        ),
        _ => Formula::boxed(random_formula(rng, depth - 1)),
    }
}

#[test]
fn canonical_index_injective_and_monotone_on_random_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let corpus: Vec<Formula> = (0..1000).map(|_| random_formula(&mut rng, 5)).collect();

    let mut seen = BTreeSet::new();
    for f in &corpus {
        let idx = f.canonical_index();
        if !seen.insert((f.clone(), idx.clone())) {
            continue;
        }
    }
    // injectivity: distinct formulas, distinct indices
    let distinct: BTreeSet<&Formula> = corpus.iter().collect();
    let indices: BTreeSet<_> = distinct.iter().map(|f| f.canonical_index()).collect();
    assert_eq!(distinct.len(), indices.len());

    // subformula monotonicity over every formula in the corpus
    for f in corpus.iter().take(300) {
        let idx = f.canonical_index();
        for sub in f.subformulas() {
            if is_proper_subformula(&sub, f) {
                assert!(sub.canonical_index() < idx, "{:?} within {:?}", sub, f);
            }
        }
    }

    // box-power monotonicity, mirrored by the machines' slot ordering
    for f in corpus.iter().take(100) {
        for m in 1u32..4 {
            for n in (m + 1)..5 {
                assert!(
                    Formula::box_power(m - 1, f.clone()).canonical_index()
                        < Formula::box_power(n - 1, f.clone()).canonical_index()
                );
            }
        }
    }
}

#[test]
fn parse_render_round_trip_seeded() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..2000 {
        let f = random_formula(&mut rng, 8);
        let rendered = render_formula(&f);
        let back = parse_formula(&rendered)
            .unwrap_or_else(|e| panic!("reparse of {:?} failed: {}", rendered, e));
        assert_eq!(back, f, "render was {:?}", rendered);
    }
}

fn formula_strategy() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::Bot),
        "[a-z][a-z0-9_]{0,6}".prop_filter_map("bot is a keyword", |s| {
            (s != "bot").then(|| Formula::var(&s))
        }),
    ];
    leaf.prop_recursive(8, 64, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::neg),
            inner.clone().prop_map(Formula::boxed),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::imp(a, b)),
        ]
    })
}

proptest! {
    #[test]
    fn parse_render_round_trip(f in formula_strategy()) {
        let rendered = render_formula(&f);
        prop_assert_eq!(parse_formula(&rendered).unwrap(), f);
    }

    #[test]
    fn subformulas_bounded_by_node_count(f in formula_strategy()) {
        prop_assert!(f.subformulas().len() <= f.node_count());
    }

    #[test]
    fn box_decompose_reconstructs(f in formula_strategy()) {
        let d = f.box_decompose();
        prop_assert!(!matches!(d.core, Formula::Box(_)));
        prop_assert_eq!(d.reconstruct(), f);
    }
}
