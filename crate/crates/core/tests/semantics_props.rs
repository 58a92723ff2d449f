//! Property checks for the model semantics: the recursive chain relation
//! against an explicit-path oracle, locality of disjoint unions, vacuity
//! of boxes over empty relations, and stability of accessibility verdicts
//! under padding with empty relations.

use std::collections::{BTreeMap, BTreeSet};

use nalab_core::formula::Formula;
use nalab_core::semantics::{disjoint_union, relation_universe, NModel, World};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn random_formula(rng: &mut impl Rng, depth: u32) -> Formula {
    let vars = ["p", "q", "r"];
    if depth == 0 || rng.gen_ratio(1, 4) {
        return if rng.gen_ratio(1, 8) {
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

fn random_model(rng: &mut impl Rng, max_worlds: World, keys: &[Formula]) -> NModel {
    let k = rng.gen_range(1..=max_worlds);
    let worlds: BTreeSet<World> = (1..=k).collect();
    let mut relations: BTreeMap<Formula, BTreeSet<(World, World)>> = BTreeMap::new();
    for key in keys {
        let mut pairs = BTreeSet::new();
        for x in 1..=k {
            for y in 1..=k {
                if rng.gen_ratio(1, 3) {
                    pairs.insert((x, y));
                }
            }
        }
        if !pairs.is_empty() {
            relations.insert(key.clone(), pairs);
        }
    }
    let mut valuation: BTreeMap<World, BTreeSet<String>> = BTreeMap::new();
    for w in 1..=k {
        let mut truths = BTreeSet::new();
        for v in ["p", "q", "r"] {
            if rng.gen_bool(0.5) {
                truths.insert(v.to_string());
            }
        }
        valuation.insert(w, truths);
    }
    NModel::new(worlds, relations, valuation).unwrap()
}

/// Explicit-path oracle for the chain relation: a sequence
/// `x = w_0, ..., w_k = y` with `w_i <_{[]^{k-1-i} b} w_{i+1}`.
fn chain_by_paths(model: &NModel, b: &Formula, k: u32, x: World, y: World) -> bool {
    if k == 0 {
        return x == y;
    }
    let mut frontier = vec![x];
    for i in 0..k {
        let step = Formula::box_power(k - 1 - i, b.clone());
        let empty = BTreeSet::new();
        let pairs = model.relation(&step).unwrap_or(&empty);
        let mut next = Vec::new();
        for &w in &frontier {
            for &(a, c) in pairs {
                if a == w && !next.contains(&c) {
                    next.push(c);
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            return false;
        }
    }
    frontier.contains(&y)
}

#[test]
fn chain_matches_explicit_path_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let b = Formula::var("p");
    let keys: Vec<Formula> = (0..4).map(|j| Formula::box_power(j, b.clone())).collect();
    for _ in 0..300 {
        let model = random_model(&mut rng, 5, &keys);
        for k in 0..4u32 {
            for &x in model.worlds() {
                for &y in model.worlds() {
                    let recursive = model.chain(&b, k, x, y).unwrap();
                    let by_path = chain_by_paths(&model, &b, k, x, y);
                    assert_eq!(recursive, by_path, "k={} x={} y={}", k, x, y);
                    if recursive {
                        let path = model.chain_path(&b, k, x, y).unwrap();
                        assert_eq!(path.len() as u32, k + 1);
                        assert_eq!((path[0], *path.last().unwrap()), (x, y));
                    }
                }
            }
        }
    }
}

#[test]
fn boxes_over_empty_relations_are_vacuously_true() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..200 {
        let a = random_formula(&mut rng, 4);
        let model = random_model(&mut rng, 4, &[]);
        for sub in a.subformulas() {
            if let Formula::Box(_) = sub {
                for &w in model.worlds() {
                    assert!(model.forces(w, &sub).unwrap());
                }
            }
        }
    }
}

#[test]
fn forcing_is_local_to_union_components() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let keys: Vec<Formula> = ["p", "q"]
        .iter()
        .flat_map(|v| (0..2).map(move |j| Formula::box_power(j, Formula::var(v))))
        .collect();
    for _ in 0..100 {
        let left = random_model(&mut rng, 3, &keys);
        let right = random_model(&mut rng, 3, &keys);
        let union = disjoint_union(&[left.clone(), right.clone()]).unwrap();
        let a = random_formula(&mut rng, 4);
        for &w in left.worlds() {
            assert_eq!(
                union.forces(w, &a).unwrap(),
                left.forces(w, &a).unwrap(),
                "world {} formula {:?}",
                w,
                a
            );
        }
    }
}

#[test]
fn union_of_accessible_models_stays_accessible() {
    // empty-relation models are (1,2)-accessible; identity-loop models are
    // (1,0)-accessible; unions must preserve both verdicts
    let a = Formula::imp(Formula::boxed(Formula::var("p")), Formula::var("p"));
    let u12 = relation_universe(&a, 1, 2);
    let left = NModel::singleton(1, &["p"]);
    let right = NModel::singleton(7, &[]);
    let union = disjoint_union(&[left, right]).unwrap();
    assert!(union.is_mn_accessible(1, 2, &u12).accessible);

    let u10 = relation_universe(&a, 1, 0);
    let looped = |w: World| {
        NModel::new(
            [w].into_iter().collect(),
            u10.iter()
                .map(|b| (b.clone(), [(w, w)].into_iter().collect()))
                .collect(),
            BTreeMap::new(),
        )
        .unwrap()
    };
    let union = disjoint_union(&[looped(1), looped(2)]).unwrap();
    assert!(union.is_mn_accessible(1, 0, &u10).accessible);
}

#[test]
fn padding_with_empty_relations_never_changes_accessibility() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let a = Formula::imp(Formula::boxed(Formula::var("p")), Formula::var("p"));
    for (m, n) in [(1u32, 2u32), (2, 1), (1, 0)] {
        let universe = relation_universe(&a, m, n);
        let keys: Vec<Formula> = universe.iter().cloned().collect();
        for _ in 0..100 {
            let model = random_model(&mut rng, 3, &keys);
            let before = model.is_mn_accessible(m, n, &universe).accessible;
            let mut relations = model.relations().clone();
            for j in 0..3 {
                relations
                    .entry(Formula::box_power(j, Formula::var("zzz")))
                    .or_default();
            }
            let padded = NModel::new(
                model.worlds().clone(),
                relations,
                model.valuation().clone(),
            )
            .unwrap();
            assert_eq!(
                padded.is_mn_accessible(m, n, &universe).accessible,
                before
            );
        }
    }
}

#[test]
fn forcing_ignores_variables_absent_from_the_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for _ in 0..100 {
        let a = random_formula(&mut rng, 4);
        let model = random_model(&mut rng, 3, &[]);
        // flip a variable that does not occur in the formula
        let mut valuation = model.valuation().clone();
        for (_, truths) in valuation.iter_mut() {
            if !truths.insert("zzz".to_string()) {
                truths.remove("zzz");
            }
        }
        let flipped = NModel::new(
            model.worlds().clone(),
            model.relations().clone(),
            valuation,
        )
        .unwrap();
        for &w in model.worlds() {
            assert_eq!(model.forces(w, &a).unwrap(), flipped.forces(w, &a).unwrap());
        }
    }
}
