//! Stage-by-stage execution of the four output machines.
//!
//! Every machine transcribes the scripted proof stream while its monitor
//! stays at 0 (Procedure 1); `G0` additionally filters Σ1 sentences, passing
//! a Σ1 non-`PR` sentence only once its witness stage lies strictly below
//! the proof code, and a `PR`-form sentence only once every strictly
//! smaller `PR`-power of its core has been output.
//!
//! When the monitor first moves — at stage `s` with value `i`, a world of
//! family entry `k` — the machine switches to Procedure 2 and fills output
//! slots `s+t` by rank `t` over the scenario's relevant sentence set:
//!
//! * `G0`: output the sentence exactly when it is the image `f(B)` of a
//!   subformula with `[]B` forced at `i`;
//! * `G1`: as `G0`, or when the sentence is `PR^{m-1}(x)` and `PR^{n-1}(x)`
//!   was output at an earlier slot;
//! * `G2`: output everything except images `f(B)` of refuted boxes and
//!   sentences `PR^{n-1}(f(B))` whose `PR^{m-1}(f(B))` slot was suppressed
//!   earlier;
//! * `G3`: output everything except images of refuted boxes.
//!
//! Each clause consults strictly earlier outputs only, which keeps the
//! self-referential definitions well founded in stage order.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::formula::Formula;
use crate::semantics::World;
use crate::sim::monitor::{run_h, run_h_prime, switch_point};
use crate::sim::scenario::{
    ArithScenario, Branch, HorizonSpec, IllVia, MachineKind, ScenarioError,
};
use crate::sim::sentence::{
    f_interp, invert_f, is_tc_sentences, phi_b_at, pr_power, pr_strip, pr_strip_exact, Sentence,
};
use crate::hilbert::DEFAULT_ATOM_GUARD;

/// Monitor switch: at `stage` the monitor moved to `world`, which belongs
/// to family entry `family_index`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Switch {
    pub stage: u64,
    pub world: World,
    pub family_index: usize,
}

/// Full record of one machine run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimTrace {
    pub kind: MachineKind,
    /// Monitor value per stage, `0..=horizon`.
    pub h_values: Vec<World>,
    pub switch: Option<Switch>,
    /// Machine output per stage, `0..horizon`; `None` is the 0 output.
    pub outputs: Vec<Option<Sentence>>,
    pub horizon: u64,
    /// The enumeration Procedure 2 ranges over, ascending.
    pub relevant: Vec<Sentence>,
}

impl SimTrace {
    /// Distinct sentences the run ever output.
    pub fn output_set(&self) -> BTreeSet<Sentence> {
        self.outputs.iter().flatten().cloned().collect()
    }

    /// The frozen monitor value, or 0 when the monitor never fired.
    pub fn monitor_value(&self) -> World {
        self.switch.map(|s| s.world).unwrap_or(0)
    }
}

/// The finite sentence set Procedure 2 enumerates: images of all registered
/// subformulas, the event and monitor-trigger sentences, with every
/// `PR`-tower extended `max(m,n)+1` levels above its deepest occurrence.
pub fn relevant_set(sc: &ArithScenario) -> Vec<Sentence> {
    let margin = sc.family.m.max(sc.family.n) + 1;
    let mut bases: BTreeSet<Sentence> = BTreeSet::new();
    for entry in &sc.family.entries {
        for b in entry.formula.subformulas() {
            bases.insert(f_interp(&b));
        }
        for b in entry.formula.subformulas() {
            bases.insert(Sentence::AuxForAllPhi(b.clone()));
            bases.insert(Sentence::AuxExistsNegPhi(b.clone()));
            for &j in entry.model.worlds() {
                bases.insert(phi_b_at(&b, j));
                bases.insert(Sentence::imp(
                    phi_b_at(&b, j),
                    Sentence::neg(Sentence::SHat(j)),
                ));
            }
        }
        for &j in entry.model.worlds() {
            bases.insert(Sentence::SHat(j));
            bases.insert(Sentence::neg(Sentence::SHat(j)));
        }
    }
    for ev in &sc.events {
        bases.insert(ev.sentence.clone());
    }
    let mut towers: BTreeMap<Sentence, u32> = BTreeMap::new();
    for base in &bases {
        let (depth, core) = pr_strip(base);
        let entry = towers.entry(core).or_insert(0);
        *entry = (*entry).max(depth);
    }
    let mut out: BTreeSet<Sentence> = BTreeSet::new();
    for (core, depth) in towers {
        for j in 0..=(depth + margin) {
            out.insert(pr_power(&core, j));
        }
    }
    out.into_iter().collect()
}

fn max_shat_index(s: &Sentence) -> World {
    match s {
        Sentence::SHat(j) => *j,
        Sentence::PRg(x) | Sentence::Neg(x) => max_shat_index(x),
        Sentence::And(a, b) | Sentence::Or(a, b) | Sentence::Imp(a, b) => {
            max_shat_index(a).max(max_shat_index(b))
        }
        _ => 0,
    }
}

/// Stage bound past which the monitor can no longer fire: the proved set
/// stops changing after the last listed code, and a firing world is either
/// mentioned in the stream or belongs to a registered model.
fn probe_bound(sc: &ArithScenario) -> u64 {
    let max_code = sc.max_listed_code().unwrap_or(0);
    let max_shat: World = sc
        .events
        .iter()
        .map(|e| max_shat_index(&e.sentence))
        .max()
        .unwrap_or(0);
    let max_world: World = sc
        .family
        .entries
        .iter()
        .map(|e| e.model.max_world())
        .max()
        .unwrap_or(0);
    max_code.max(max_shat as u64).max(max_world as u64) + 2
}

fn run_monitor_for(sc: &ArithScenario, horizon: u64) -> Result<Vec<World>, ScenarioError> {
    if sc.machine.uses_family_monitor() {
        run_h_prime(sc, horizon)
    } else {
        run_h(sc, horizon)
    }
}

fn prefix_at(sc: &ArithScenario, stage: u64) -> Vec<Sentence> {
    let mut set: BTreeSet<Sentence> = BTreeSet::new();
    for code in 0..=stage {
        if let Some(s) = sc.proved_at(code) {
            set.insert(s.clone());
        }
    }
    set.into_iter().collect()
}

fn check_declared_route(
    sc: &ArithScenario,
    switch_stage: u64,
    world: World,
) -> Result<(), ScenarioError> {
    let Branch::IllAt { via, .. } = &sc.branch else {
        return Ok(());
    };
    let prefix = prefix_at(sc, switch_stage);
    let holds = |target: &Sentence| {
        is_tc_sentences(&prefix, target, DEFAULT_ATOM_GUARD)
            .map_err(|e| ScenarioError::AtomGuard(alloc::format!("{}", e)))
    };
    let ok = match via {
        IllVia::DirectNegS => holds(&Sentence::neg(Sentence::SHat(world)))?,
        IllVia::PhiTrigger { formula, .. } => {
            holds(&Sentence::AuxForAllPhi(formula.clone()))?
                && holds(&Sentence::imp(
                    phi_b_at(formula, world),
                    Sentence::neg(Sentence::SHat(world)),
                ))?
        }
    };
    if ok {
        Ok(())
    } else {
        Err(ScenarioError::TriggerRouteMismatch {
            stage: switch_stage,
        })
    }
}

/// Runs the machine for `sc` to its horizon (`Auto` resolves to the switch
/// stage plus the relevant-set size, or to a bound covering all listed
/// codes and witness stages on the consistent branch).
pub fn run_machine(sc: &ArithScenario) -> Result<SimTrace, ScenarioError> {
    sc.validate()?;
    let relevant = relevant_set(sc);
    let probe = probe_bound(sc);
    let probe_values = run_monitor_for(sc, probe)?;
    let switch = switch_point(&probe_values);

    match (&sc.branch, switch) {
        (Branch::Consistent, Some((stage, world))) => {
            return Err(ScenarioError::MonitorFiredOnConsistent { stage, world });
        }
        (Branch::IllAt { .. }, None) => return Err(ScenarioError::TriggerAbsent),
        (Branch::IllAt { world, .. }, Some((stage, got))) => {
            if got != *world {
                return Err(ScenarioError::TriggerWorldMismatch {
                    expected: *world,
                    got,
                    stage,
                });
            }
            if sc.family.entry_of_world(got).is_none() {
                return Err(ScenarioError::SwitchWorldUnregistered { world: got, stage });
            }
            check_declared_route(sc, stage, got)?;
        }
        (Branch::Consistent, None) => {}
    }

    let horizon = match (sc.horizon, switch) {
        (HorizonSpec::Fixed(h), Some((stage, _))) if h <= stage => {
            return Err(ScenarioError::HorizonBelowSwitch {
                horizon: h,
                switch_stage: stage,
            });
        }
        (HorizonSpec::Fixed(h), _) => h.max(1),
        (HorizonSpec::Auto, Some((stage, _))) => stage + relevant.len() as u64,
        (HorizonSpec::Auto, None) => {
            let max_code = sc.max_listed_code().unwrap_or(0);
            let max_witness = sc.sigma_witness.values().max().copied().unwrap_or(0);
            2 * (max_code + 1) + max_witness + 2
        }
    };

    let h_values = run_monitor_for(sc, horizon)?;
    debug_assert_eq!(h_values[0], 0);
    debug_assert!(
        h_values
            .iter()
            .filter(|&&v| v != 0)
            .collect::<BTreeSet<_>>()
            .len()
            <= 1,
        "monitor value must freeze"
    );
    let switch = switch_point(&h_values).map(|(stage, world)| Switch {
        stage,
        world,
        family_index: sc
            .family
            .entry_of_world(world)
            .expect("validated against the family"),
    });

    let mut outputs: Vec<Option<Sentence>> = Vec::with_capacity(horizon as usize);
    let mut first_output: BTreeMap<Sentence, u64> = BTreeMap::new();

    // forcing of each boxed subformula at the switch world, keyed by the
    // image of the formula under the box
    let forced_images: BTreeMap<Sentence, bool> = match switch {
        Some(sw) => {
            let entry = &sc.family.entries[sw.family_index];
            entry
                .formula
                .subformulas()
                .into_iter()
                .filter_map(|sub| match &sub {
                    Formula::Box(inner) => {
                        let forced = entry
                            .model
                            .forces(sw.world, &sub)
                            .expect("switch world belongs to the entry model");
                        Some((f_interp(inner), forced))
                    }
                    _ => None,
                })
                .collect()
        }
        None => BTreeMap::new(),
    };

    for stage in 0..horizon {
        let produced: Option<Sentence> = match switch {
            Some(sw) if stage >= sw.stage => {
                let t = (stage - sw.stage) as usize;
                if t < relevant.len() {
                    procedure_two(
                        sc,
                        &relevant,
                        t,
                        sw,
                        &forced_images,
                        &first_output,
                        &outputs,
                    )
                } else {
                    None
                }
            }
            _ => procedure_one(sc, stage, &first_output),
        };
        if let Some(s) = &produced {
            first_output.entry(s.clone()).or_insert(stage);
        }
        outputs.push(produced);
    }

    Ok(SimTrace {
        kind: sc.machine,
        h_values,
        switch,
        outputs,
        horizon,
        relevant,
    })
}

fn procedure_one(
    sc: &ArithScenario,
    stage: u64,
    first_output: &BTreeMap<Sentence, u64>,
) -> Option<Sentence> {
    let sentence = sc.proved_at(stage)?;
    match sc.machine {
        MachineKind::G1 | MachineKind::G2 | MachineKind::G3 => Some(sentence.clone()),
        MachineKind::G0 => {
            if !sentence.is_sigma1() {
                return Some(sentence.clone());
            }
            let (depth, core) = pr_strip(sentence);
            if depth == 0 {
                // Σ1 and not PR-formed: pass only with a strictly earlier
                // witness; the witness table is the truth oracle here
                let witnessed = match sentence {
                    Sentence::BaseAtom { name, .. } => sc
                        .sigma_witness
                        .get(name)
                        .is_some_and(|&w| w < stage),
                    _ => false,
                };
                witnessed.then(|| sentence.clone())
            } else {
                // PR-formed: every strictly smaller power of the core must
                // already be out
                let complete = (0..depth).all(|i| {
                    first_output
                        .get(&pr_power(&core, i))
                        .is_some_and(|&l| l < stage)
                });
                complete.then(|| sentence.clone())
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn procedure_two(
    sc: &ArithScenario,
    relevant: &[Sentence],
    t: usize,
    sw: Switch,
    forced_images: &BTreeMap<Sentence, bool>,
    first_output: &BTreeMap<Sentence, u64>,
    outputs_so_far: &[Option<Sentence>],
) -> Option<Sentence> {
    let xi = &relevant[t];
    let m = sc.family.m;
    let n = sc.family.n;
    match sc.machine {
        MachineKind::G0 => forced_images
            .get(xi)
            .copied()
            .unwrap_or(false)
            .then(|| xi.clone()),
        MachineKind::G1 => {
            if forced_images.get(xi).copied().unwrap_or(false) {
                return Some(xi.clone());
            }
            if m >= 1 && n >= 1 {
                if let Some(stripped) = pr_strip_exact(xi, m - 1) {
                    let premise = pr_power(stripped, n.saturating_sub(1));
                    if first_output.contains_key(&premise) {
                        return Some(xi.clone());
                    }
                }
            }
            None
        }
        MachineKind::G2 => {
            if *forced_images.get(xi).unwrap_or(&true) {
                // not a registered refuted image; try the power clause
                if m >= 1 && n >= 1 {
                    if let Some(stripped) = pr_strip_exact(xi, n - 1) {
                        if invert_f(stripped).is_some() {
                            let lower = pr_power(stripped, m - 1);
                            if let Ok(u) = relevant.binary_search(&lower) {
                                if u < t {
                                    let slot = sw.stage as usize + u;
                                    debug_assert!(slot < outputs_so_far.len());
                                    if outputs_so_far[slot].is_none() {
                                        return None;
                                    }
                                }
                            }
                        }
                    }
                }
                Some(xi.clone())
            } else {
                None
            }
        }
        MachineKind::G3 => {
            if *forced_images.get(xi).unwrap_or(&true) {
                Some(xi.clone())
            } else {
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::NModel;
    use crate::sim::scenario::{FamilyEntry, ModelFamily, ProofEvent};
    use alloc::collections::BTreeMap as Map;
    use alloc::vec;

    fn p() -> Formula {
        Formula::var("p")
    }

    fn q() -> Formula {
        Formula::var("q")
    }

    /// []p -> p refuted by the one-world empty-relation model.
    fn empty_entry(world: World) -> FamilyEntry {
        FamilyEntry {
            formula: Formula::imp(Formula::boxed(p()), p()),
            model: NModel::singleton(world, &[]),
            refuting_world: world,
        }
    }

    fn base_scenario(machine: MachineKind, m: u32, n: u32) -> ArithScenario {
        ArithScenario {
            machine,
            family: ModelFamily {
                entries: vec![empty_entry(1)],
                m,
                n,
            },
            events: vec![],
            repeat: true,
            sigma_witness: Map::new(),
            branch: Branch::Consistent,
            horizon: HorizonSpec::Auto,
        }
    }

    fn ev(code: u64, sentence: Sentence) -> ProofEvent {
        ProofEvent { code, sentence }
    }

    #[test]
    fn consistent_g1_transcribes_the_stream() {
        let mut sc = base_scenario(MachineKind::G1, 2, 1);
        sc.events = vec![
            ev(2, Sentence::base("x", false)),
            ev(5, Sentence::imp(Sentence::base("x", false), Sentence::base("y", false))),
        ];
        let tr = run_machine(&sc).unwrap();
        assert!(tr.switch.is_none());
        assert_eq!(tr.output_set(), sc.proved_sentences_below(tr.horizon));
        assert_eq!(tr.outputs[2], Some(Sentence::base("x", false)));
        assert_eq!(tr.outputs[3], None);
    }

    #[test]
    fn g0_witness_gating() {
        let sigma = Sentence::base("sig", true);
        let mut sc = base_scenario(MachineKind::G0, 1, 2);
        sc.events = vec![ev(5, sigma.clone())];
        sc.sigma_witness.insert("sig".into(), 2);
        let tr = run_machine(&sc).unwrap();
        assert_eq!(tr.outputs[5], Some(sigma.clone()));

        // witness arrives only at stage 9: the first emission is skipped,
        // the re-emission at code 11 (period 6) passes
        let mut late = base_scenario(MachineKind::G0, 1, 2);
        late.events = vec![ev(5, sigma.clone())];
        late.sigma_witness.insert("sig".into(), 9);
        let tr = run_machine(&late).unwrap();
        assert_eq!(tr.outputs[5], None);
        assert_eq!(tr.outputs[11], Some(sigma.clone()));

        // never witnessed: never output
        let mut never = base_scenario(MachineKind::G0, 1, 2);
        never.events = vec![ev(5, sigma.clone())];
        let tr = run_machine(&never).unwrap();
        assert!(!tr.output_set().contains(&sigma));
    }

    #[test]
    fn g0_pr_chain_gating() {
        let mut sc = base_scenario(MachineKind::G0, 1, 2);
        // a non-Σ1 core passes straight through Procedure 1; its PR image
        // must wait for the core to be out first
        let core = Sentence::neg(Sentence::base("c", false));
        sc.events = vec![
            ev(2, Sentence::pr(core.clone())),
            ev(4, core.clone()),
        ];
        let tr = run_machine(&sc).unwrap();
        assert_eq!(tr.outputs[2], None, "core not yet output");
        assert_eq!(tr.outputs[4], Some(core.clone()));
        // period 5: PR(core) re-emitted at 7, now its core is out
        assert_eq!(tr.outputs[7], Some(Sentence::pr(core.clone())));
        assert!(tr.output_set().contains(&Sentence::pr(core)));
    }

    #[test]
    fn ill_g1_outputs_forced_images() {
        // K-axiom countermodel: 1 <_q 2, nothing else; world 1 forces []p
        // and [](p->q) but not []q
        let k = Formula::imp(
            Formula::boxed(Formula::imp(p(), q())),
            Formula::imp(Formula::boxed(p()), Formula::boxed(q())),
        );
        let model = NModel::new(
            [1, 2].into_iter().collect(),
            [(q(), [(1, 2)].into_iter().collect())].into_iter().collect(),
            Map::new(),
        )
        .unwrap();
        let mut sc = base_scenario(MachineKind::G1, 2, 1);
        sc.family.entries = vec![FamilyEntry {
            formula: k,
            model,
            refuting_world: 1,
        }];
        sc.events = vec![ev(6, Sentence::neg(Sentence::SHat(1)))];
        sc.branch = Branch::IllAt {
            world: 1,
            via: IllVia::DirectNegS,
        };
        let tr = run_machine(&sc).unwrap();
        let sw = tr.switch.unwrap();
        assert_eq!(sw.stage, 6);
        assert_eq!(sw.world, 1);
        let out = tr.output_set();
        assert!(out.contains(&f_interp(&p())));
        assert!(out.contains(&f_interp(&Formula::imp(p(), q()))));
        assert!(!out.contains(&f_interp(&q())));
    }

    #[test]
    fn consistent_branch_rejects_firing_stream() {
        let mut sc = base_scenario(MachineKind::G1, 2, 1);
        sc.events = vec![ev(3, Sentence::neg(Sentence::SHat(1)))];
        assert!(matches!(
            run_machine(&sc),
            Err(ScenarioError::MonitorFiredOnConsistent { stage: 3, world: 1 })
        ));
    }

    #[test]
    fn ill_branch_requires_a_trigger() {
        let mut sc = base_scenario(MachineKind::G1, 2, 1);
        sc.branch = Branch::IllAt {
            world: 1,
            via: IllVia::DirectNegS,
        };
        assert_eq!(run_machine(&sc), Err(ScenarioError::TriggerAbsent));
    }

    #[test]
    fn fixed_horizon_below_switch_is_rejected() {
        let mut sc = base_scenario(MachineKind::G3, 1, 0);
        sc.events = vec![ev(4, Sentence::neg(Sentence::SHat(1)))];
        sc.branch = Branch::IllAt {
            world: 1,
            via: IllVia::DirectNegS,
        };
        sc.horizon = HorizonSpec::Fixed(3);
        assert!(matches!(
            run_machine(&sc),
            Err(ScenarioError::HorizonBelowSwitch { .. })
        ));
    }

    #[test]
    fn g3_suppresses_refuted_images_only() {
        let mut sc = base_scenario(MachineKind::G3, 1, 0);
        sc.events = vec![ev(4, Sentence::neg(Sentence::SHat(1)))];
        sc.branch = Branch::IllAt {
            world: 1,
            via: IllVia::DirectNegS,
        };
        let tr = run_machine(&sc).unwrap();
        let out = tr.output_set();
        // []p refuted nowhere: the empty model forces []p at 1, so f(p)
        // must be output; the image of p itself is not a forced-box image
        // but G3 outputs everything not refuted
        assert!(out.contains(&f_interp(&p())));
        // every relevant sentence except none is out: no refuted boxes here
        for s in &tr.relevant {
            assert!(out.contains(s), "missing {:?}", s);
        }
    }

    #[test]
    fn g2_power_clause_suppresses_up_the_tower() {
        // family formula [][][]p -> q at (1,2): world forces every box;
        // no suppression at all, so the full relevant set is output
        let a = Formula::imp(Formula::box_power(3, p()), q());
        let mut sc = base_scenario(MachineKind::G2, 1, 2);
        sc.family.entries = vec![FamilyEntry {
            formula: a,
            model: NModel::singleton(1, &[]),
            refuting_world: 1,
        }];
        sc.events = vec![ev(5, Sentence::neg(Sentence::SHat(1)))];
        sc.branch = Branch::IllAt {
            world: 1,
            via: IllVia::DirectNegS,
        };
        let tr = run_machine(&sc).unwrap();
        let out = tr.output_set();
        for j in 0..=3 {
            assert!(
                out.contains(&f_interp(&Formula::box_power(j, p()))),
                "ladder rung {} missing",
                j
            );
        }
    }

    #[test]
    fn relevant_set_is_sorted_and_closed() {
        let sc = base_scenario(MachineKind::G1, 2, 1);
        let rs = relevant_set(&sc);
        for pair in rs.windows(2) {
            assert!(pair[0] < pair[1]);
        }
        // closed downwards along PR-stripping
        for s in &rs {
            if let Sentence::PRg(inner) = s {
                assert!(rs.binary_search(inner).is_ok());
            }
        }
        // images of all subformulas present
        for b in sc.family.entries[0].formula.subformulas() {
            assert!(rs.binary_search(&f_interp(&b)).is_ok());
        }
    }
}
