//! The stage monitors that drive the output machines.
//!
//! Both monitors start at 0 and can move to a nonzero world at most once.
//! At stage `s` the value for `s+1` is the least world `j` in `1..=s+1`
//! (the bound keeps the stage recursion total) such that the scripted
//! proof prefix `P_s` — every sentence proved at a code `<= s` — yields
//! the trigger as a tautological consequence:
//!
//! * plain monitor: `~S(j)` is a t.c. of `P_s`;
//! * family monitor: additionally, for some registered entry `k` with
//!   `j` among its worlds and some subformula `B` of its formula, both
//!   the quantified trigger for `B` and `phi_B(j) -> ~S(j)` are t.c.'s
//!   of `P_s`.
//!
//! The proved set only changes at listed event codes (re-emissions add
//! nothing new), so the entailment sweep is cached per prefix version.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::hilbert::{visit_satisfying, AtomInterner, Skeleton, DEFAULT_ATOM_GUARD};
use crate::semantics::World;
use crate::sim::scenario::{ArithScenario, ScenarioError};
use crate::sim::sentence::{
    i_translate_sentence, is_tc_sentences, phi_b_at, Sentence,
};

/// What a fixed proved-set prefix entails, precomputed once per prefix.
struct PrefixTriggers {
    /// The prefix is propositionally unsatisfiable; every trigger holds,
    /// so the monitor fires at 1.
    unsat: bool,
    /// Worlds `j` with `~S(j)` entailed directly.
    direct: BTreeSet<World>,
    /// Worlds reachable through a family trigger.
    family: BTreeSet<World>,
}

impl PrefixTriggers {
    fn least_fired(&self, stage: u64) -> Option<World> {
        if self.unsat {
            return Some(1);
        }
        self.direct
            .iter()
            .chain(self.family.iter())
            .copied()
            .filter(|&j| (j as u64) <= stage + 1)
            .min()
    }
}

fn sweep_prefix(
    premises: &BTreeSet<Sentence>,
    sc: &ArithScenario,
    family_route: bool,
) -> Result<PrefixTriggers, ScenarioError> {
    let mut interner = AtomInterner::default();
    let skels: Vec<Skeleton> = premises
        .iter()
        .map(|p| i_translate_sentence(p, &mut interner))
        .collect();
    let n_atoms = interner.len();
    if n_atoms > DEFAULT_ATOM_GUARD {
        return Err(ScenarioError::AtomGuard(format!(
            "proof prefix has {} atoms, guard is {}",
            n_atoms, DEFAULT_ATOM_GUARD
        )));
    }
    let refs: Vec<&Skeleton> = skels.iter().collect();
    let mut ever_true = vec![false; n_atoms];
    let mut ever_false = vec![false; n_atoms];
    let mut satisfiable = false;
    visit_satisfying(&refs, n_atoms, &mut |assignment| {
        satisfiable = true;
        for (i, (t, f)) in ever_true.iter_mut().zip(ever_false.iter_mut()).enumerate() {
            if assignment & (1 << i) != 0 {
                *t = true;
            } else {
                *f = true;
            }
        }
        true
    });

    if !satisfiable {
        return Ok(PrefixTriggers {
            unsat: true,
            direct: BTreeSet::new(),
            family: BTreeSet::new(),
        });
    }

    // ~S(j) is entailed exactly when the S(j) atom occurs in the prefix and
    // is false in every satisfying assignment; an atom outside the prefix
    // is unconstrained.
    let mut direct = BTreeSet::new();
    let mut entailed_aux: BTreeSet<Sentence> = BTreeSet::new();
    for (id, atom) in interner.atoms().iter().enumerate() {
        match atom {
            Sentence::SHat(j) if !ever_true[id] => {
                direct.insert(*j);
            }
            Sentence::AuxForAllPhi(_) if !ever_false[id] => {
                entailed_aux.insert(atom.clone());
            }
            _ => {}
        }
    }

    let mut family = BTreeSet::new();
    if family_route && !entailed_aux.is_empty() {
        let premise_vec: Vec<Sentence> = premises.iter().cloned().collect();
        for entry in &sc.family.entries {
            for b in entry.formula.subformulas() {
                if !entailed_aux.contains(&Sentence::AuxForAllPhi(b.clone())) {
                    continue;
                }
                for &j in entry.model.worlds() {
                    if family.contains(&j) {
                        continue;
                    }
                    let target = Sentence::imp(phi_b_at(&b, j), Sentence::neg(Sentence::SHat(j)));
                    let holds = is_tc_sentences(&premise_vec, &target, DEFAULT_ATOM_GUARD)
                        .map_err(|e| ScenarioError::AtomGuard(format!("{}", e)))?;
                    if holds {
                        family.insert(j);
                    }
                }
            }
        }
    }

    Ok(PrefixTriggers {
        unsat: false,
        direct,
        family,
    })
}

fn run_monitor(
    sc: &ArithScenario,
    horizon: u64,
    family_route: bool,
) -> Result<Vec<World>, ScenarioError> {
    let mut values = vec![0 as World; horizon as usize + 1];
    let mut premises: BTreeSet<Sentence> = BTreeSet::new();
    let mut triggers: Option<PrefixTriggers> = None;
    for stage in 0..horizon {
        let s = stage as usize;
        if values[s] != 0 {
            values[s + 1] = values[s];
            continue;
        }
        if let Some(sentence) = sc.proved_at(stage) {
            if premises.insert(sentence.clone()) {
                triggers = None;
            }
        }
        let prefix = match &triggers {
            Some(t) => t,
            None => {
                triggers = Some(sweep_prefix(&premises, sc, family_route)?);
                triggers.as_ref().unwrap()
            }
        };
        values[s + 1] = prefix.least_fired(stage).unwrap_or(0);
    }
    Ok(values)
}

/// Stage values of the plain monitor over `0..=horizon`.
pub fn run_h(sc: &ArithScenario, horizon: u64) -> Result<Vec<World>, ScenarioError> {
    run_monitor(sc, horizon, false)
}

/// Stage values of the family-triggered monitor over `0..=horizon`.
pub fn run_h_prime(sc: &ArithScenario, horizon: u64) -> Result<Vec<World>, ScenarioError> {
    run_monitor(sc, horizon, true)
}

/// First stage `s` with `h(s+1) != 0`, together with that value.
pub fn switch_point(values: &[World]) -> Option<(u64, World)> {
    values
        .iter()
        .position(|&v| v != 0)
        .map(|i| ((i - 1) as u64, values[i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Formula;
    use crate::semantics::NModel;
    use crate::sim::scenario::{
        Branch, FamilyEntry, HorizonSpec, MachineKind, ModelFamily, ProofEvent,
    };
    use alloc::collections::BTreeMap;
    use alloc::vec;
    use alloc::vec::Vec;

    fn scenario(events: Vec<ProofEvent>, machine: MachineKind) -> ArithScenario {
        ArithScenario {
            machine,
            family: ModelFamily {
                entries: vec![FamilyEntry {
                    formula: Formula::imp(Formula::boxed(Formula::var("p")), Formula::var("p")),
                    model: NModel::singleton(2, &[]),
                    refuting_world: 2,
                }],
                m: 1,
                n: 2,
            },
            events,
            repeat: true,
            sigma_witness: BTreeMap::new(),
            branch: Branch::Consistent,
            horizon: HorizonSpec::Auto,
        }
    }

    #[test]
    fn empty_stream_never_fires() {
        let sc = scenario(vec![], MachineKind::G0);
        let h = run_h(&sc, 12).unwrap();
        assert!(h.iter().all(|&v| v == 0));
        assert_eq!(switch_point(&h), None);
    }

    #[test]
    fn direct_trigger_fires_at_next_stage() {
        let sc = scenario(
            vec![ProofEvent {
                code: 4,
                sentence: Sentence::neg(Sentence::SHat(2)),
            }],
            MachineKind::G0,
        );
        let h = run_h(&sc, 10).unwrap();
        assert_eq!(h[4], 0);
        assert_eq!(h[5], 2);
        assert!(h[5..].iter().all(|&v| v == 2));
        assert_eq!(switch_point(&h), Some((4, 2)));
    }

    #[test]
    fn firing_value_respects_stage_bound() {
        // ~S(9) proved at code 1 cannot fire before stage 8
        let sc = scenario(
            vec![ProofEvent {
                code: 1,
                sentence: Sentence::neg(Sentence::SHat(9)),
            }],
            MachineKind::G0,
        );
        let h = run_h(&sc, 12).unwrap();
        assert_eq!(switch_point(&h), Some((8, 9)));
        let (s, j) = switch_point(&h).unwrap();
        assert!((j as u64) <= s + 1);
    }

    #[test]
    fn unsatisfiable_prefix_fires_at_one() {
        let x = Sentence::base("x", false);
        let sc = scenario(
            vec![
                ProofEvent {
                    code: 2,
                    sentence: x.clone(),
                },
                ProofEvent {
                    code: 3,
                    sentence: Sentence::neg(x),
                },
            ],
            MachineKind::G0,
        );
        let h = run_h(&sc, 8).unwrap();
        assert_eq!(switch_point(&h), Some((3, 1)));
    }

    #[test]
    fn modus_ponens_style_trigger() {
        let x = Sentence::base("x", false);
        let sc = scenario(
            vec![
                ProofEvent {
                    code: 2,
                    sentence: x.clone(),
                },
                ProofEvent {
                    code: 5,
                    sentence: Sentence::imp(x, Sentence::neg(Sentence::SHat(3))),
                },
            ],
            MachineKind::G0,
        );
        let h = run_h(&sc, 10).unwrap();
        assert_eq!(switch_point(&h), Some((5, 3)));
    }

    #[test]
    fn family_trigger_fires_only_with_both_parts() {
        let b = Formula::imp(Formula::boxed(Formula::var("p")), Formula::var("p"));
        let only_aux = scenario(
            vec![ProofEvent {
                code: 3,
                sentence: Sentence::AuxForAllPhi(b.clone()),
            }],
            MachineKind::G2,
        );
        let h = run_h_prime(&only_aux, 10).unwrap();
        assert_eq!(switch_point(&h), None);

        let both = scenario(
            vec![
                ProofEvent {
                    code: 3,
                    sentence: Sentence::AuxForAllPhi(b.clone()),
                },
                ProofEvent {
                    code: 4,
                    sentence: Sentence::imp(
                        phi_b_at(&b, 2),
                        Sentence::neg(Sentence::SHat(2)),
                    ),
                },
            ],
            MachineKind::G2,
        );
        let h = run_h_prime(&both, 10).unwrap();
        assert_eq!(switch_point(&h), Some((4, 2)));
        // the plain monitor ignores the family route
        let plain = run_h(&both, 10).unwrap();
        assert_eq!(switch_point(&plain), None);
    }

    #[test]
    fn quantified_trigger_does_not_instantiate() {
        // the universal trigger alone says nothing about other worlds: the
        // instance at world 2 is an opaque implication under the atom
        // translation
        let b = Formula::var("p");
        let sc = scenario(
            vec![ProofEvent {
                code: 2,
                sentence: Sentence::AuxForAllPhi(b.clone()),
            }],
            MachineKind::G2,
        );
        let h = run_h_prime(&sc, 9).unwrap();
        assert_eq!(switch_point(&h), None);
    }

    #[test]
    fn monitor_freezes_after_firing() {
        let sc = scenario(
            vec![
                ProofEvent {
                    code: 2,
                    sentence: Sentence::neg(Sentence::SHat(1)),
                },
                ProofEvent {
                    code: 5,
                    sentence: Sentence::neg(Sentence::SHat(4)),
                },
            ],
            MachineKind::G0,
        );
        let h = run_h(&sc, 12).unwrap();
        let nonzero: BTreeSet<World> = h.iter().copied().filter(|&v| v != 0).collect();
        assert_eq!(nonzero.len(), 1);
        assert_eq!(switch_point(&h), Some((2, 1)));
    }
}
