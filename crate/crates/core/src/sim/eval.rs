//! Operational truth of sentences over a finished run.
//!
//! Truth is read off the trace and the registered family: `S(i)` holds
//! when the monitor reached `i`, `f(p)` when the reached world forces `p`,
//! `PR(x)` when `x` appears among the outputs, the refutation and trigger
//! atoms by quantifying over the registered models, and the connectives
//! classically.

use alloc::collections::BTreeSet;

use crate::formula::Formula;
use crate::semantics::World;
use crate::sim::machine::SimTrace;
use crate::sim::scenario::ArithScenario;
use crate::sim::sentence::Sentence;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalError {
    OutsideRelevantSet(Sentence),
}

impl core::fmt::Display for EvalError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            EvalError::OutsideRelevantSet(s) => {
                write!(f, "sentence {:?} is outside the relevant set", s)
            }
        }
    }
}

/// Evaluation context for one (trace, scenario) pair.
pub struct TraceCtx<'a> {
    pub trace: &'a SimTrace,
    pub scenario: &'a ArithScenario,
    outputs: BTreeSet<Sentence>,
}

impl<'a> TraceCtx<'a> {
    pub fn new(trace: &'a SimTrace, scenario: &'a ArithScenario) -> TraceCtx<'a> {
        TraceCtx {
            trace,
            scenario,
            outputs: trace.output_set(),
        }
    }

    pub fn output_set(&self) -> &BTreeSet<Sentence> {
        &self.outputs
    }

    fn reached(&self, w: World) -> bool {
        self.trace.monitor_value() == w
    }

    /// Does some registered entry list `w`, contain `b` as a subformula of
    /// its formula, and refute `b` at `w`?
    fn family_refutes_at(&self, b: &Formula, w: World) -> bool {
        self.scenario.family.entries.iter().any(|entry| {
            entry.model.worlds().contains(&w)
                && entry.formula.subformulas().contains(b)
                && matches!(entry.model.forces(w, b), Ok(false))
        })
    }

    /// `exists w` with the refutation condition for `b` and `S'(w)` true.
    fn some_reached_refuter(&self, b: &Formula) -> bool {
        self.scenario.family.entries.iter().any(|entry| {
            entry.formula.subformulas().contains(b)
                && entry.model.worlds().iter().any(|&w| {
                    self.reached(w) && matches!(entry.model.forces(w, b), Ok(false))
                })
        })
    }

    /// Total evaluation; the public entry point checks relevance first.
    pub fn eval(&self, s: &Sentence) -> bool {
        match s {
            Sentence::BaseAtom { name, .. } => self.scenario.sigma_witness.contains_key(name),
            Sentence::Falsum01 => false,
            Sentence::SHat(j) => self.reached(*j),
            Sentence::FAtom(p) => match self.trace.switch {
                Some(sw) => {
                    let entry = &self.scenario.family.entries[sw.family_index];
                    matches!(entry.model.forces(sw.world, &Formula::var(p)), Ok(true))
                }
                None => false,
            },
            Sentence::PRg(x) => self.outputs.contains(x),
            Sentence::NeqZero(i) => *i != 0,
            Sentence::RefutesAtom { formula, world } => self.family_refutes_at(formula, *world),
            Sentence::AuxForAllPhi(b) => !self.some_reached_refuter(b),
            Sentence::AuxExistsNegPhi(b) => self.some_reached_refuter(b),
            Sentence::Neg(x) => !self.eval(x),
            Sentence::And(a, b) => self.eval(a) && self.eval(b),
            Sentence::Or(a, b) => self.eval(a) || self.eval(b),
            Sentence::Imp(a, b) => !self.eval(a) || self.eval(b),
        }
    }
}

/// Evaluates `s` over the run, requiring `s` to belong to the run's
/// relevant sentence set.
pub fn eval_sentence(
    trace: &SimTrace,
    scenario: &ArithScenario,
    s: &Sentence,
) -> Result<bool, EvalError> {
    if trace.relevant.binary_search(s).is_err() {
        return Err(EvalError::OutsideRelevantSet(s.clone()));
    }
    Ok(TraceCtx::new(trace, scenario).eval(s))
}
