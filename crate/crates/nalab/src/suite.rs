//! Curated verdict corpus, scenario builders, and randomized stress
//! generators. The `corpus` subcommand and the acceptance suite both run
//! from here so that one command reproduces the full table.

use std::collections::BTreeMap;

use rand::prelude::*;

use nalab_core::decide::{decide, verify_countermodel, Budget, Decision};
use nalab_core::formula::Formula;
use nalab_core::hilbert::{check_proof, is_tautology, Proof, ProofStep, Rule};
use nalab_core::parse::parse_formula;
use nalab_core::semantics::{relation_universe, NModel, World};
use nalab_core::sim::{
    f_interp, phi_b_at, sentence_index, ArithScenario, Branch, FamilyEntry, HorizonSpec, IllVia,
    MachineKind, ModelFamily, ProofEvent, Sentence,
};

// ------------------------------------------------------------ the corpus

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expected {
    Provable,
    Refuted,
}

#[derive(Clone, Debug)]
pub struct CorpusItem {
    pub name: &'static str,
    pub formula: &'static str,
    pub m: u32,
    pub n: u32,
    pub expected: Expected,
    pub max_worlds: u32,
}

#[derive(Clone, Debug)]
pub struct CorpusOutcome {
    pub item: CorpusItem,
    pub decision: Decision,
    /// The certificate re-verified through the independent checker.
    pub verified: bool,
    pub pass: bool,
}

/// The paper-derived verdict table: the axiom scheme instances across
/// parameter pairs, the necessitated tautology, and the standard
/// non-theorems with small countermodels.
pub fn curated_corpus() -> Vec<CorpusItem> {
    let acc = |name, formula, m, n| CorpusItem {
        name,
        formula,
        m,
        n,
        expected: Expected::Provable,
        max_worlds: 4,
    };
    let refuted = |name, formula, m, n, max_worlds| CorpusItem {
        name,
        formula,
        m,
        n,
        expected: Expected::Refuted,
        max_worlds,
    };
    vec![
        acc("acc-1-2", "[]^2 p -> []p", 1, 2),
        acc("acc-2-1", "[]p -> []^2 p", 2, 1),
        acc("acc-1-3", "[]^3 p -> []p", 1, 3),
        acc("acc-3-1", "[]p -> []^3 p", 3, 1),
        acc("acc-2-3", "[]^3 p -> []^2 p", 2, 3),
        acc("boxed-taut", "[](p -> p)", 1, 2),
        refuted("box-bot-1-0", "[]bot", 1, 0, 2),
        refuted("box-box-bot-2-0", "[]^2 bot", 2, 0, 2),
        refuted("k-axiom-1-1", "[](p -> q) -> ([]p -> []q)", 1, 1, 2),
        refuted("box-t-1-2", "[]p -> p", 1, 2, 3),
        refuted("intro-2-1", "p -> []p", 2, 1, 3),
    ]
}

pub fn run_corpus_item(item: &CorpusItem) -> CorpusOutcome {
    let formula = parse_formula(item.formula).expect("corpus formulas parse");
    let decision = decide(
        &formula,
        item.m,
        item.n,
        Budget::with_max_worlds(item.max_worlds),
    );
    let (verified, matches) = match (&decision, item.expected) {
        (Decision::Provable(pf), Expected::Provable) => {
            (check_proof(pf).is_accepted(), true)
        }
        (Decision::Refuted { model, world }, Expected::Refuted) => (
            verify_countermodel(&formula, item.m, item.n, model, *world),
            true,
        ),
        _ => (false, false),
    };
    CorpusOutcome {
        item: item.clone(),
        decision,
        verified,
        pass: matches && verified,
    }
}

pub fn run_corpus() -> Vec<CorpusOutcome> {
    curated_corpus().iter().map(run_corpus_item).collect()
}

// -------------------------------------------------- certified refutations

/// Decides `formula` and demands a verified refutation.
pub fn certified_countermodel(formula: &str, m: u32, n: u32) -> (Formula, NModel, World) {
    let f = parse_formula(formula).expect("pool formulas parse");
    match decide(&f, m, n, Budget::with_max_worlds(3)) {
        Decision::Refuted { model, world } => {
            assert!(verify_countermodel(&f, m, n, &model, world));
            (f, model, world)
        }
        other => panic!(
            "expected a refutation for {:?} at ({},{}), got {:?}",
            formula, m, n, other
        ),
    }
}

/// Non-theorem pools per parameter regime; every entry is refutable within
/// three worlds under the regime's accessibility condition.
pub fn countermodel_pool(m: u32, n: u32) -> Vec<&'static str> {
    if n > m {
        // no m-chains can exist: countermodels keep box towers below m
        if m == 1 {
            vec![
                "[]p -> p",
                "[]^2 p -> q",
                "p | q -> p & q",
                "[]bot -> p",
                "[]^3 p -> q",
                "~p",
                "p -> q",
                "[]p & []q -> q & p",
                "[]^4 r -> q",
                "[](p -> q) -> q",
            ]
        } else {
            vec![
                "[]p",
                "[]p -> p",
                "[](p -> q) -> ([]p -> []q)",
                "[]q -> []p",
                "p -> []p",
                "[]^3 p -> q",
                "~[]p -> p",
                "[]p | []q -> []q",
                "[]^4 p -> q",
                "[]r",
            ]
        }
    } else if n >= 1 {
        // m > n >= 1: anything below an m-chain is realizable
        vec![
            "[]p",
            "[]p -> p",
            "[](p -> q) -> ([]p -> []q)",
            "[]q -> []p",
            "p -> []p",
            "[]^2 p -> []p",
            "~[]p -> p",
            "[]p | []q -> []q",
            "[]r",
            "[]p & []q -> p",
        ]
    } else {
        // n = 0: relations stay inside the diagonal
        vec![
            "[]p",
            "[]p -> p",
            "p",
            "~[]p",
            "[](p -> q) -> ([]p -> []q)",
            "[]q -> []p",
            "[]^2 p",
            "p | q",
            "[]r",
            "[]p & []q -> p",
        ]
    }
}

/// Shifts each model into its own world-id range and returns the entries.
pub fn disjoint_family(models: Vec<(Formula, NModel, World)>) -> Vec<FamilyEntry> {
    let mut entries = Vec::new();
    let mut offset: World = 0;
    for (formula, model, refuting_world) in models {
        let shifted = model.shift_worlds(offset);
        let refuting_world = refuting_world + offset;
        offset = shifted.max_world();
        entries.push(FamilyEntry {
            formula,
            model: shifted,
            refuting_world,
        });
    }
    entries
}

// ---------------------------------------------------- scenario builders

/// Options for the ill-branch scenario builder.
pub struct IllScenarioSpec {
    pub kind: MachineKind,
    pub m: u32,
    pub n: u32,
    /// Certified countermodels; world ranges are made disjoint here.
    pub countermodels: Vec<(Formula, NModel, World)>,
    /// Which entry's refuting world the monitor is scripted to reach.
    pub target_entry: usize,
    /// `None` scripts a direct `~S(i)` proof; `Some(b)` scripts the
    /// quantified trigger for `b` (family monitor only).
    pub via_phi: Option<Formula>,
    /// Benign sentences proved at early codes.
    pub filler: Vec<Sentence>,
    /// Inject the implication lemmas relating the monitor to refuted
    /// images, the way the constructions assume them provable.
    pub inject_lemmas: bool,
}

pub fn build_ill_scenario(spec: IllScenarioSpec) -> ArithScenario {
    let entries = disjoint_family(spec.countermodels);
    let target = &entries[spec.target_entry];
    let target_world = target.refuting_world;

    let mut sentences: Vec<Sentence> = spec.filler;
    if spec.inject_lemmas {
        let mut lemmas = Vec::new();
        for b in target.formula.subformulas() {
            for &w in target.model.worlds() {
                if matches!(target.model.forces(w, &b), Ok(false)) {
                    lemmas.push(Sentence::imp(
                        Sentence::SHat(w),
                        Sentence::neg(f_interp(&b)),
                    ));
                }
            }
        }
        lemmas.truncate(6);
        sentences.extend(lemmas);
    }

    let mut events: Vec<ProofEvent> = sentences
        .into_iter()
        .enumerate()
        .map(|(i, sentence)| ProofEvent {
            code: i as u64 + 1,
            sentence,
        })
        .collect();
    let trigger_base = events.len() as u64 + target_world as u64 + 2;
    let via = match spec.via_phi {
        None => {
            events.push(ProofEvent {
                code: trigger_base,
                sentence: Sentence::neg(Sentence::SHat(target_world)),
            });
            IllVia::DirectNegS
        }
        Some(b) => {
            events.push(ProofEvent {
                code: trigger_base,
                sentence: Sentence::AuxForAllPhi(b.clone()),
            });
            events.push(ProofEvent {
                code: trigger_base + 1,
                sentence: Sentence::imp(
                    phi_b_at(&b, target_world),
                    Sentence::neg(Sentence::SHat(target_world)),
                ),
            });
            IllVia::PhiTrigger {
                family_index: spec.target_entry,
                formula: b,
            }
        }
    };

    ArithScenario {
        machine: spec.kind,
        family: ModelFamily {
            entries,
            m: spec.m,
            n: spec.n,
        },
        events,
        repeat: true,
        sigma_witness: BTreeMap::new(),
        branch: Branch::IllAt {
            world: target_world,
            via,
        },
        horizon: HorizonSpec::Auto,
    }
}

/// Deterministic ladder cases: a forced tower `[]^{m'} D` inside the
/// registered formula, across parameter regimes with `n > m >= 1` and
/// `m' >= n`.
pub fn ladder_cases() -> Vec<(ArithScenario, Formula)> {
    let mut cases = Vec::new();
    let regimes: [(u32, u32, &[u32]); 4] = [
        (1, 2, &[2, 3, 4, 5, 6]),
        (1, 3, &[3, 4, 5, 6]),
        (2, 3, &[3, 4, 5, 6]),
        (2, 4, &[4, 5, 6]),
    ];
    for (m, n, heights) in regimes {
        for (i, &height) in heights.iter().enumerate() {
            for core in [Formula::var("p"), Formula::neg(Formula::var("r"))] {
                let tower = Formula::box_power(height, core.clone());
                let a = Formula::imp(tower.clone(), Formula::var("q"));
                let (f, model, world) =
                    certified_refutation_of(&a, m, n).expect("tower formulas are refutable");
                let spec = IllScenarioSpec {
                    kind: MachineKind::G2,
                    m,
                    n,
                    countermodels: vec![(f, model, world)],
                    target_entry: 0,
                    via_phi: if i % 2 == 0 { None } else { Some(a.clone()) },
                    filler: vec![],
                    inject_lemmas: false,
                };
                cases.push((build_ill_scenario(spec), tower));
            }
        }
    }
    cases
}

fn certified_refutation_of(f: &Formula, m: u32, n: u32) -> Option<(Formula, NModel, World)> {
    match decide(f, m, n, Budget::with_max_worlds(3)) {
        Decision::Refuted { model, world } => {
            assert!(verify_countermodel(f, m, n, &model, world));
            Some((f.clone(), model, world))
        }
        _ => None,
    }
}

// ------------------------------------------------ random stress material

/// Variable pool shared by the random generators.
const VARS: [&str; 3] = ["p", "q", "r"];

pub fn random_formula(rng: &mut impl Rng, depth: u32) -> Formula {
    if depth == 0 || rng.gen_ratio(1, 4) {
        return if rng.gen_ratio(1, 8) {
            Formula::Bot
        } else {
            Formula::var(VARS.choose(rng).unwrap())
        };
    }
    match rng.gen_range(0..5) {
        0 => Formula::neg(random_formula(rng, depth - 1)),
        1 => Formula::and(random_formula(rng, depth - 1), random_formula(rng, depth - 1)),
        2 => Formula::or(random_formula(rng, depth - 1), random_formula(rng, depth - 1)),
        3 => Formula::imp(random_formula(rng, depth - 1), random_formula(rng, depth - 1)),
        _ => Formula::boxed(random_formula(rng, depth - 1)),
    }
}

/// Random proof accepted by the checker: tautology templates, axiom
/// instances, necessitation, and modus ponens over earlier steps.
pub fn random_accepted_proof(rng: &mut impl Rng, m: u32, n: u32) -> Proof {
    let mut steps: Vec<ProofStep> = Vec::new();
    let target_len = rng.gen_range(2..=8);
    while steps.len() < target_len {
        let choice = rng.gen_range(0..10);
        if choice < 4 {
            let a = random_formula(rng, 2);
            let b = random_formula(rng, 2);
            let taut = match rng.gen_range(0..5) {
                0 => Formula::imp(a.clone(), a.clone()),
                1 => Formula::imp(a.clone(), Formula::imp(b.clone(), a.clone())),
                2 => Formula::imp(Formula::and(a.clone(), b.clone()), a.clone()),
                3 => Formula::imp(a.clone(), Formula::or(a.clone(), b.clone())),
                _ => Formula::or(a.clone(), Formula::neg(a.clone())),
            };
            debug_assert!(is_tautology(&taut).unwrap());
            steps.push(ProofStep {
                formula: taut,
                rule: Rule::Taut,
            });
        } else if choice < 6 {
            let a = random_formula(rng, 2);
            steps.push(ProofStep {
                formula: Formula::imp(
                    Formula::box_power(n, a.clone()),
                    Formula::box_power(m, a.clone()),
                ),
                rule: Rule::Acc,
            });
        } else if choice < 8 && !steps.is_empty() {
            let i = rng.gen_range(0..steps.len());
            let boxed = Formula::boxed(steps[i].formula.clone());
            steps.push(ProofStep {
                formula: boxed,
                rule: Rule::Nec(i),
            });
        } else {
            // look for an applicable modus ponens pair
            let mut candidates = Vec::new();
            for (j, s) in steps.iter().enumerate() {
                if let Formula::Imp(x, y) = &s.formula {
                    for (i, t) in steps.iter().enumerate() {
                        if t.formula == **x {
                            candidates.push((i, j, (**y).clone()));
                        }
                    }
                }
            }
            if let Some((i, j, conclusion)) = candidates.into_iter().choose(rng) {
                steps.push(ProofStep {
                    formula: conclusion,
                    rule: Rule::Mp(i, j),
                });
            }
        }
    }
    let proof = Proof { m, n, steps };
    debug_assert!(check_proof(&proof).is_accepted());
    proof
}

/// Random finite model satisfying the `(m,n)` condition over the closure
/// universe of `target`. Accessible shapes are constructed rather than
/// filtered: empty relations when `n > m` (the only shape a finite support
/// allows), diagonal loops when `n = 0`, and for `m > n >= 1` either
/// alternating tower levels (no run of `m` consecutive nonempty levels, so
/// no m-chains at all) or full diagonal-loop towers (every chain is a
/// self-loop, matched at every length).
pub fn random_accessible_model(
    rng: &mut impl Rng,
    m: u32,
    n: u32,
    target: &Formula,
) -> NModel {
    let universe = relation_universe(target, m, n);
    let k: World = rng.gen_range(1..=4);
    let worlds: std::collections::BTreeSet<World> = (1..=k).collect();
    let valuation: BTreeMap<World, std::collections::BTreeSet<String>> = (1..=k)
        .map(|w| {
            (
                w,
                VARS.iter()
                    .filter(|_| rng.gen_bool(0.5))
                    .map(|v| v.to_string())
                    .collect(),
            )
        })
        .collect();
    let mut relations: BTreeMap<Formula, std::collections::BTreeSet<(World, World)>> =
        BTreeMap::new();
    if n > m {
        // any nonempty relation would start an unbounded tower of chains
    } else if n == 0 {
        for b in &universe {
            let mut pairs = std::collections::BTreeSet::new();
            for w in 1..=k {
                if rng.gen_ratio(1, 3) {
                    pairs.insert((w, w));
                }
            }
            if !pairs.is_empty() {
                relations.insert(b.clone(), pairs);
            }
        }
    } else {
        for b in &universe {
            let decomp = b.box_decompose();
            if rng.gen_bool(0.5) {
                // alternating levels: no two adjacent tower levels carry
                // relations, hence no chains of length >= 2 at all
                if decomp.prefix_len % 2 == 0 {
                    let mut pairs = std::collections::BTreeSet::new();
                    for x in 1..=k {
                        for y in 1..=k {
                            if rng.gen_ratio(1, 4) {
                                pairs.insert((x, y));
                            }
                        }
                    }
                    if !pairs.is_empty() {
                        relations.insert(b.clone(), pairs);
                    }
                }
            } else {
                // diagonal loops at every level: chains of every length
                // exist exactly as self-loops
                let mut pairs = std::collections::BTreeSet::new();
                for w in 1..=k {
                    if rng.gen_ratio(2, 3) {
                        pairs.insert((w, w));
                    }
                }
                if !pairs.is_empty() {
                    relations.insert(b.clone(), pairs);
                }
            }
        }
        // loop towers can break when levels are missing; drop to the
        // verified subset by clearing anything that witnesses a violation
        loop {
            let model = NModel::new(worlds.clone(), relations.clone(), valuation.clone()).unwrap();
            let report = model.is_mn_accessible(m, n, &universe);
            match report.witness {
                None => break,
                Some(w) => {
                    relations.remove(&w.formula);
                }
            }
        }
    }
    let model = NModel::new(worlds, relations, valuation).unwrap();
    debug_assert!(model.is_mn_accessible(m, n, &universe).accessible);
    model
}

// random sentence material for the monitor and machine suites

fn random_base_pool(rng: &mut impl Rng) -> Vec<Sentence> {
    let mut pool = vec![
        Sentence::base("a", false),
        Sentence::base("b", false),
        Sentence::base("c", false),
        Sentence::base("s1", true),
        Sentence::base("s2", true),
        Sentence::f_atom("p"),
        Sentence::f_atom("q"),
    ];
    pool.shuffle(rng);
    pool.truncate(rng.gen_range(4..=pool.len()));
    pool
}

fn random_sentence_over(rng: &mut impl Rng, pool: &[Sentence], depth: u32) -> Sentence {
    if depth == 0 || rng.gen_ratio(1, 3) {
        return pool.choose(rng).unwrap().clone();
    }
    match rng.gen_range(0..4) {
        0 => Sentence::neg(random_sentence_over(rng, pool, depth - 1)),
        1 => Sentence::and(
            random_sentence_over(rng, pool, depth - 1),
            random_sentence_over(rng, pool, depth - 1),
        ),
        2 => Sentence::or(
            random_sentence_over(rng, pool, depth - 1),
            random_sentence_over(rng, pool, depth - 1),
        ),
        _ => Sentence::imp(
            random_sentence_over(rng, pool, depth - 1),
            random_sentence_over(rng, pool, depth - 1),
        ),
    }
}

/// Evaluates a sentence skeleton under a fixed assignment of its atomic
/// constituents, used to keep generated streams jointly satisfiable.
fn eval_under(s: &Sentence, assignment: &BTreeMap<Sentence, bool>) -> bool {
    match s {
        Sentence::Neg(x) => !eval_under(x, assignment),
        Sentence::And(a, b) => eval_under(a, assignment) && eval_under(b, assignment),
        Sentence::Or(a, b) => eval_under(a, assignment) || eval_under(b, assignment),
        Sentence::Imp(a, b) => !eval_under(a, assignment) || eval_under(b, assignment),
        atom => *assignment.get(atom).unwrap_or(&false),
    }
}

/// A scripted stream that is propositionally satisfiable by construction
/// (every sentence holds under a hidden assignment) and never mentions the
/// monitor atoms, so a consistent-branch run can never fire.
pub fn random_consistent_scenario(
    rng: &mut impl Rng,
    kind: MachineKind,
    m: u32,
    n: u32,
) -> ArithScenario {
    let pool = random_base_pool(rng);
    let mut assignment: BTreeMap<Sentence, bool> = BTreeMap::new();
    for atom in &pool {
        assignment.insert(atom.clone(), rng.gen_bool(0.5));
    }

    let mut sentences: Vec<Sentence> = Vec::new();
    let n_plain = rng.gen_range(2..=6);
    for _ in 0..n_plain {
        let mut s = random_sentence_over(rng, &pool, 2);
        if !eval_under(&s, &assignment) {
            s = Sentence::neg(s);
        }
        sentences.push(s);
    }
    // a PR chain over a true non-Σ1 core, complete or broken
    let core_atom = Sentence::base("core", false);
    assignment.insert(core_atom.clone(), true);
    let core = if rng.gen_bool(0.5) {
        core_atom.clone()
    } else {
        Sentence::neg(Sentence::base("ncore", false))
    };
    let chain_len = rng.gen_range(1..=3);
    let skip_link = rng.gen_bool(0.4);
    for i in 0..=chain_len {
        if skip_link && i == 0 {
            continue;
        }
        sentences.push(nalab_core::sim::pr_power(&core, i));
    }

    let mut sigma_witness = BTreeMap::new();
    for atom in &pool {
        if let Sentence::BaseAtom { name, sigma1: true } = atom {
            match rng.gen_range(0..3) {
                0 => {
                    sigma_witness.insert(name.clone(), rng.gen_range(0..4));
                }
                1 => {
                    sigma_witness.insert(name.clone(), rng.gen_range(10..30));
                }
                _ => {}
            }
        }
    }

    sentences.shuffle(rng);
    let mut code = 0u64;
    let events: Vec<ProofEvent> = sentences
        .into_iter()
        .map(|sentence| {
            code += rng.gen_range(1..=3);
            ProofEvent { code, sentence }
        })
        .collect();

    let pool_formula = random_formula(rng, 2);
    let family_formula = Formula::imp(Formula::boxed(pool_formula), Formula::var("zz"));
    let entry = match certified_refutation_of(&family_formula, m, n) {
        Some((f, model, w)) => FamilyEntry {
            formula: f,
            model,
            refuting_world: w,
        },
        None => FamilyEntry {
            formula: Formula::imp(Formula::boxed(Formula::var("p")), Formula::var("p")),
            model: NModel::singleton(1, &[]),
            refuting_world: 1,
        },
    };

    ArithScenario {
        machine: kind,
        family: ModelFamily {
            entries: vec![entry],
            m,
            n,
        },
        events,
        repeat: rng.gen_bool(0.8),
        sigma_witness,
        branch: Branch::Consistent,
        horizon: HorizonSpec::Auto,
    }
}

/// Random monitor-only scenario: half the streams carry no trigger
/// sentences at all, the rest script a direct or family trigger.
pub fn random_monitor_scenario(
    rng: &mut impl Rng,
    with_trigger: bool,
) -> (ArithScenario, bool) {
    let kind = *[
        MachineKind::G0,
        MachineKind::G1,
        MachineKind::G2,
        MachineKind::G3,
    ]
    .choose(rng)
    .unwrap();
    let (m, n) = if kind.uses_family_monitor() {
        *[(1, 2), (2, 3), (1, 0), (2, 0)].choose(rng).unwrap()
    } else {
        *[(1, 2), (2, 1), (1, 0)].choose(rng).unwrap()
    };
    let mut sc = random_consistent_scenario(rng, kind, m, n);
    if with_trigger {
        let world = sc.family.entries[0].refuting_world;
        let code = sc.max_listed_code().unwrap_or(0) + world as u64 + rng.gen_range(1..4);
        if kind.uses_family_monitor() && rng.gen_bool(0.5) {
            let b = sc.family.entries[0].formula.clone();
            sc.events.push(ProofEvent {
                code,
                sentence: Sentence::AuxForAllPhi(b.clone()),
            });
            sc.events.push(ProofEvent {
                code: code + 1,
                sentence: Sentence::imp(phi_b_at(&b, world), Sentence::neg(Sentence::SHat(world))),
            });
            sc.branch = Branch::IllAt {
                world,
                via: IllVia::PhiTrigger {
                    family_index: 0,
                    formula: b,
                },
            };
        } else {
            sc.events.push(ProofEvent {
                code,
                sentence: Sentence::neg(Sentence::SHat(world)),
            });
            sc.branch = Branch::IllAt {
                world,
                via: IllVia::DirectNegS,
            };
        }
    }
    (sc, with_trigger)
}

/// Checks that the relevant enumeration of a run is strictly increasing in
/// the sentence index and monotone along direct subsentences.
pub fn relevant_set_well_ordered(relevant: &[Sentence]) -> bool {
    for pair in relevant.windows(2) {
        if sentence_index(&pair[0]) >= sentence_index(&pair[1]) {
            return false;
        }
    }
    let in_set =
        |s: &Sentence| relevant.binary_search(s).is_ok();
    for s in relevant {
        let idx = sentence_index(s);
        let children: Vec<&Sentence> = match s {
            Sentence::PRg(x) | Sentence::Neg(x) => vec![x],
            Sentence::And(a, b) | Sentence::Or(a, b) | Sentence::Imp(a, b) => vec![a, b],
            _ => vec![],
        };
        for child in children {
            if in_set(child) && sentence_index(child) >= idx {
                return false;
            }
        }
    }
    true
}
