//! Scenario descriptions: a registered countermodel family, a scripted
//! proof stream, the witness table for Σ1 atoms, and the branch the run
//! is meant to exercise.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::formula::Formula;
use crate::semantics::{relation_universe, NModel, World};
use crate::sim::sentence::Sentence;

/// One registered countermodel: a formula together with a finite
/// `(m,n)`-accessible model refuting it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyEntry {
    pub formula: Formula,
    pub model: NModel,
    pub refuting_world: World,
}

/// The registered family, with the `(m,n)` parameters all entries must
/// satisfy. World-id ranges are pairwise disjoint and exclude 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelFamily {
    pub entries: Vec<FamilyEntry>,
    pub m: u32,
    pub n: u32,
}

impl ModelFamily {
    /// Index of the entry whose model contains `w`.
    pub fn entry_of_world(&self, w: World) -> Option<usize> {
        self.entries
            .iter()
            .position(|e| e.model.worlds().contains(&w))
    }
}

/// One scripted proof: `code` is the proof, `sentence` its conclusion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofEvent {
    pub code: u64,
    pub sentence: Sentence,
}

/// How the monitor is scripted to fire in an ill branch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IllVia {
    /// The stream proves `~S(i)` outright.
    DirectNegS,
    /// The stream proves the quantified trigger for `formula` together
    /// with its instance at the target world (family-triggered monitor
    /// only).
    PhiTrigger { family_index: usize, formula: Formula },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Branch {
    Consistent,
    IllAt { world: World, via: IllVia },
}

impl Branch {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Branch::Consistent)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HorizonSpec {
    Auto,
    Fixed(u64),
}

/// Which output machine a scenario drives. `G0` and `G1` consult the plain
/// monitor, `G2` and `G3` the family-triggered one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MachineKind {
    G0,
    G1,
    G2,
    G3,
}

impl MachineKind {
    pub fn uses_family_monitor(self) -> bool {
        matches!(self, MachineKind::G2 | MachineKind::G3)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArithScenario {
    pub machine: MachineKind,
    pub family: ModelFamily,
    pub events: Vec<ProofEvent>,
    /// Re-emit every proved sentence at ever larger codes.
    pub repeat: bool,
    /// Witness stage for Σ1 base atoms that are true; absent means never
    /// witnessed.
    pub sigma_witness: BTreeMap<String, u64>,
    pub branch: Branch,
    pub horizon: HorizonSpec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScenarioError {
    OverlappingWorldRanges(World),
    EntryNotAccessible { index: usize },
    EntryNotRefuted { index: usize },
    NonIncreasingCodes { index: usize },
    BadSHatIndex,
    IllWorldUnregistered(World),
    PhiTriggerOutOfRange { family_index: usize },
    PhiTriggerFormulaNotSub { family_index: usize },
    PhiTriggerWorldMismatch { world: World },
    PhiTriggerOnPlainMonitor,
    MonitorFiredOnConsistent { stage: u64, world: World },
    TriggerAbsent,
    TriggerWorldMismatch { expected: World, got: World, stage: u64 },
    TriggerRouteMismatch { stage: u64 },
    HorizonBelowSwitch { horizon: u64, switch_stage: u64 },
    AtomGuard(String),
    SwitchWorldUnregistered { world: World, stage: u64 },
}

impl core::fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ScenarioError::OverlappingWorldRanges(w) => {
                write!(f, "world {} appears in two family entries", w)
            }
            ScenarioError::EntryNotAccessible { index } => {
                write!(f, "family entry {} is not (m,n)-accessible", index)
            }
            ScenarioError::EntryNotRefuted { index } => write!(
                f,
                "family entry {} does not refute its formula at the declared world",
                index
            ),
            ScenarioError::NonIncreasingCodes { index } => {
                write!(f, "event {} breaks the strictly increasing code order", index)
            }
            ScenarioError::BadSHatIndex => write!(f, "S(.) indices must be positive"),
            ScenarioError::IllWorldUnregistered(w) => {
                write!(f, "ill-branch world {} is in no registered model", w)
            }
            ScenarioError::PhiTriggerOutOfRange { family_index } => {
                write!(f, "trigger family index {} out of range", family_index)
            }
            ScenarioError::PhiTriggerFormulaNotSub { family_index } => write!(
                f,
                "trigger formula is not a subformula of entry {}",
                family_index
            ),
            ScenarioError::PhiTriggerWorldMismatch { world } => write!(
                f,
                "ill-branch world {} is not in the trigger entry's model",
                world
            ),
            ScenarioError::PhiTriggerOnPlainMonitor => {
                write!(f, "phi triggers only drive the family monitor (G2/G3)")
            }
            ScenarioError::MonitorFiredOnConsistent { stage, world } => write!(
                f,
                "monitor fired at stage {} world {} on a consistent branch",
                stage, world
            ),
            ScenarioError::TriggerAbsent => {
                write!(f, "ill branch declared but the monitor never fires")
            }
            ScenarioError::TriggerWorldMismatch {
                expected,
                got,
                stage,
            } => write!(
                f,
                "monitor fired at world {} (stage {}), expected {}",
                got, stage, expected
            ),
            ScenarioError::TriggerRouteMismatch { stage } => write!(
                f,
                "declared trigger route did not hold at the firing stage {}",
                stage
            ),
            ScenarioError::HorizonBelowSwitch {
                horizon,
                switch_stage,
            } => write!(
                f,
                "horizon {} does not reach past the switch stage {}",
                horizon, switch_stage
            ),
            ScenarioError::AtomGuard(msg) => write!(f, "{}", msg),
            ScenarioError::SwitchWorldUnregistered { world, stage } => write!(
                f,
                "monitor fired at stage {} world {} which is in no registered model",
                stage, world
            ),
        }
    }
}

fn check_shat_positive(s: &Sentence) -> Result<(), ScenarioError> {
    match s {
        Sentence::SHat(0) => Err(ScenarioError::BadSHatIndex),
        Sentence::PRg(x) | Sentence::Neg(x) => check_shat_positive(x),
        Sentence::And(a, b) | Sentence::Or(a, b) | Sentence::Imp(a, b) => {
            check_shat_positive(a)?;
            check_shat_positive(b)
        }
        _ => Ok(()),
    }
}

impl ArithScenario {
    /// Structural validation: family invariants, code order, trigger
    /// declaration sanity. Monitor-dependent conditions (the trigger
    /// actually fires, at the declared world, via the declared route) are
    /// checked by `run_machine`.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let mut seen: BTreeSet<World> = BTreeSet::new();
        for (index, entry) in self.family.entries.iter().enumerate() {
            for &w in entry.model.worlds() {
                if !seen.insert(w) {
                    return Err(ScenarioError::OverlappingWorldRanges(w));
                }
            }
            let universe = relation_universe(&entry.formula, self.family.m, self.family.n);
            if !entry
                .model
                .is_mn_accessible(self.family.m, self.family.n, &universe)
                .accessible
            {
                return Err(ScenarioError::EntryNotAccessible { index });
            }
            match entry.model.forces(entry.refuting_world, &entry.formula) {
                Ok(false) => {}
                _ => return Err(ScenarioError::EntryNotRefuted { index }),
            }
        }
        let mut last_code: Option<u64> = None;
        for (index, ev) in self.events.iter().enumerate() {
            if let Some(prev) = last_code {
                if ev.code <= prev {
                    return Err(ScenarioError::NonIncreasingCodes { index });
                }
            }
            last_code = Some(ev.code);
            check_shat_positive(&ev.sentence)?;
        }
        if let Branch::IllAt { world, via } = &self.branch {
            let Some(owner) = self.family.entry_of_world(*world) else {
                return Err(ScenarioError::IllWorldUnregistered(*world));
            };
            if let IllVia::PhiTrigger {
                family_index,
                formula,
            } = via
            {
                if !self.machine.uses_family_monitor() {
                    return Err(ScenarioError::PhiTriggerOnPlainMonitor);
                }
                let Some(entry) = self.family.entries.get(*family_index) else {
                    return Err(ScenarioError::PhiTriggerOutOfRange {
                        family_index: *family_index,
                    });
                };
                if !entry.formula.subformulas().contains(formula) {
                    return Err(ScenarioError::PhiTriggerFormulaNotSub {
                        family_index: *family_index,
                    });
                }
                if owner != *family_index {
                    return Err(ScenarioError::PhiTriggerWorldMismatch { world: *world });
                }
            }
        }
        Ok(())
    }

    pub fn max_listed_code(&self) -> Option<u64> {
        self.events.last().map(|e| e.code)
    }

    /// The sentence proved at `code`, if any. With `repeat`, every listed
    /// proof at code `c` re-occurs at `c + t*(max+1)` for every `t >= 1` —
    /// one sentence per code, unboundedly often.
    pub fn proved_at(&self, code: u64) -> Option<&Sentence> {
        let lookup = |c: u64| {
            self.events
                .binary_search_by_key(&c, |e| e.code)
                .ok()
                .map(|i| &self.events[i].sentence)
        };
        if let Some(s) = lookup(code) {
            return Some(s);
        }
        if self.repeat {
            if let Some(max) = self.max_listed_code() {
                let period = max + 1;
                if code >= period {
                    return lookup(code % period);
                }
            }
        }
        None
    }

    /// Emission codes of a listed sentence, ascending, below `horizon`.
    pub fn emissions_below(&self, sentence: &Sentence, horizon: u64) -> Vec<u64> {
        let mut out = Vec::new();
        let listed: Vec<u64> = self
            .events
            .iter()
            .filter(|e| &e.sentence == sentence)
            .map(|e| e.code)
            .collect();
        out.extend(listed.iter().copied().filter(|&c| c < horizon));
        if self.repeat {
            if let Some(max) = self.max_listed_code() {
                let period = max + 1;
                let mut round = 1u64;
                loop {
                    let base = match round.checked_mul(period) {
                        Some(b) if b < horizon => b,
                        _ => break,
                    };
                    for &c in &listed {
                        let code = base + c;
                        if code < horizon {
                            out.push(code);
                        }
                    }
                    round += 1;
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Distinct sentences proved at some code below `horizon`.
    pub fn proved_sentences_below(&self, horizon: u64) -> BTreeSet<Sentence> {
        self.events
            .iter()
            .filter(|e| e.code < horizon)
            .map(|e| e.sentence.clone())
            .collect()
    }

    pub fn describe(&self) -> String {
        format!(
            "{:?} scenario: {} family entries, {} events, repeat={}",
            self.machine,
            self.family.entries.len(),
            self.events.len(),
            self.repeat
        )
    }
}
