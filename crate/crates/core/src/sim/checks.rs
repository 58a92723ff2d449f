//! Checkers for the trace-level invariants the constructions rest on.
//!
//! Each checker produces a verdict with a reproducible witness on failure:
//!
//! * truth transfer — forcing at the switch world coincides with
//!   operational truth of the image, over every subformula of the entry's
//!   formula;
//! * closure under the accessibility scheme — `PR^n` truth implies `PR^m`
//!   truth for every relevant sentence whose powers stay in range;
//! * consistent-branch equivalence — the output set equals the scripted
//!   stream, via an independent event-indexed oracle for the Σ1-filtered
//!   machine;
//! * the quotient/remainder ladder of intermediate images a suppressing
//!   machine must still output.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::formula::Formula;
use crate::sim::eval::TraceCtx;
use crate::sim::machine::SimTrace;
use crate::sim::scenario::{ArithScenario, MachineKind, ScenarioError};
use crate::sim::sentence::{f_interp, pr_power, pr_strip, Sentence};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClaimKind {
    TruthTransfer,
    AccClosure,
    ConsistentEquivalence,
    PowerLadder,
}

impl core::fmt::Display for ClaimKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let name = match self {
            ClaimKind::TruthTransfer => "truth-transfer",
            ClaimKind::AccClosure => "acc-closure",
            ClaimKind::ConsistentEquivalence => "consistent-equivalence",
            ClaimKind::PowerLadder => "power-ladder",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClaimWitness {
    Subformula {
        formula: Formula,
        forced: bool,
        evaluated: bool,
    },
    ClosureFailure {
        sentence: Sentence,
    },
    OutputMismatch {
        sentence: Sentence,
        in_outputs: bool,
        in_expected: bool,
    },
    MissingRung {
        sentence: Sentence,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClaimEntry {
    pub claim: ClaimKind,
    pub pass: bool,
    pub witness: Option<ClaimWitness>,
}

impl ClaimEntry {
    fn pass(claim: ClaimKind) -> ClaimEntry {
        ClaimEntry {
            claim,
            pass: true,
            witness: None,
        }
    }

    fn fail(claim: ClaimKind, witness: ClaimWitness) -> ClaimEntry {
        ClaimEntry {
            claim,
            pass: false,
            witness: Some(witness),
        }
    }
}

/// Verdicts of one batch of checks.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TraceReport {
    pub entries: Vec<ClaimEntry>,
}

impl TraceReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckError {
    NoSwitch,
    WrongBranch,
    InsufficientHorizon { needed: u64, horizon: u64 },
    Scenario(ScenarioError),
    BadLadderCase(&'static str),
}

impl core::fmt::Display for CheckError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CheckError::NoSwitch => write!(f, "the trace has no monitor switch"),
            CheckError::WrongBranch => write!(f, "check applies to the other branch"),
            CheckError::InsufficientHorizon { needed, horizon } => write!(
                f,
                "horizon {} does not cover all relevant slots (need {})",
                horizon, needed
            ),
            CheckError::Scenario(e) => write!(f, "{}", e),
            CheckError::BadLadderCase(msg) => write!(f, "{}", msg),
        }
    }
}

fn require_full_coverage(trace: &SimTrace) -> Result<(), CheckError> {
    if let Some(sw) = trace.switch {
        let needed = sw.stage + trace.relevant.len() as u64;
        if trace.horizon < needed {
            return Err(CheckError::InsufficientHorizon {
                needed,
                horizon: trace.horizon,
            });
        }
    }
    Ok(())
}

/// Forcing at the switch world against operational truth of the image, for
/// every subformula of the switch entry's formula, in both directions.
pub fn check_truth_transfer(
    trace: &SimTrace,
    scenario: &ArithScenario,
) -> Result<ClaimEntry, CheckError> {
    let Some(sw) = trace.switch else {
        return Err(CheckError::NoSwitch);
    };
    require_full_coverage(trace)?;
    let ctx = TraceCtx::new(trace, scenario);
    let entry = &scenario.family.entries[sw.family_index];
    for b in entry.formula.subformulas() {
        let forced = entry
            .model
            .forces(sw.world, &b)
            .expect("switch world belongs to the model");
        let evaluated = ctx.eval(&f_interp(&b));
        if forced != evaluated {
            return Ok(ClaimEntry::fail(
                ClaimKind::TruthTransfer,
                ClaimWitness::Subformula {
                    formula: b,
                    forced,
                    evaluated,
                },
            ));
        }
    }
    Ok(ClaimEntry::pass(ClaimKind::TruthTransfer))
}

/// `PR^n` truth implies `PR^m` truth for every relevant sentence whose
/// `n`- and `m`-th powers are themselves in the relevant set (the horizon
/// bounds what is checkable; sentences whose powers escape it are skipped).
pub fn check_acc_closure(
    trace: &SimTrace,
    scenario: &ArithScenario,
    m: u32,
    n: u32,
) -> Result<ClaimEntry, CheckError> {
    require_full_coverage(trace)?;
    let ctx = TraceCtx::new(trace, scenario);
    for phi in &trace.relevant {
        let up_n = pr_power(phi, n);
        let up_m = pr_power(phi, m);
        if trace.relevant.binary_search(&up_n).is_err()
            || trace.relevant.binary_search(&up_m).is_err()
        {
            continue;
        }
        if ctx.eval(&up_n) && !ctx.eval(&up_m) {
            return Ok(ClaimEntry::fail(
                ClaimKind::AccClosure,
                ClaimWitness::ClosureFailure {
                    sentence: phi.clone(),
                },
            ));
        }
    }
    Ok(ClaimEntry::pass(ClaimKind::AccClosure))
}

/// Acceptance codes of the Σ1-filtered stream, computed as a fixpoint over
/// the event list rather than by running the machine: a non-Σ1 sentence is
/// accepted at its first emission, a Σ1 non-`PR` sentence at its first
/// emission strictly after its witness stage, and a `PR`-form sentence at
/// its first emission preceded by acceptances of every smaller power of
/// its core.
pub fn oracle_sigma_filtered(sc: &ArithScenario, horizon: u64) -> BTreeSet<Sentence> {
    let sentences: BTreeSet<Sentence> = sc
        .events
        .iter()
        .map(|e| e.sentence.clone())
        .collect();
    let mut accepted: alloc::collections::BTreeMap<Sentence, u64> =
        alloc::collections::BTreeMap::new();
    loop {
        let mut changed = false;
        for s in &sentences {
            if accepted.contains_key(s) {
                continue;
            }
            let emissions = sc.emissions_below(s, horizon);
            let code = if !s.is_sigma1() {
                emissions.first().copied()
            } else {
                let (depth, core) = pr_strip(s);
                if depth == 0 {
                    let witness = match s {
                        Sentence::BaseAtom { name, .. } => sc.sigma_witness.get(name).copied(),
                        _ => None,
                    };
                    witness.and_then(|w| emissions.into_iter().find(|&c| c > w))
                } else {
                    let ready_after: Option<u64> = (0..depth)
                        .map(|i| accepted.get(&pr_power(&core, i)).copied())
                        .try_fold(0u64, |acc, c| c.map(|c| acc.max(c)));
                    ready_after
                        .and_then(|after| emissions.into_iter().find(|&c| c > after))
                }
            };
            if let Some(c) = code {
                accepted.insert(s.clone(), c);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    accepted.into_keys().collect()
}

/// Consistent-branch output characterization: for the unfiltered machines
/// the output set is exactly the scripted stream below the horizon; for
/// the Σ1-filtered machine it matches the independent oracle.
pub fn check_consistent_equivalence(
    trace: &SimTrace,
    scenario: &ArithScenario,
) -> Result<ClaimEntry, CheckError> {
    if !scenario.branch.is_consistent() || trace.switch.is_some() {
        return Err(CheckError::WrongBranch);
    }
    let outputs = trace.output_set();
    let expected: BTreeSet<Sentence> = match scenario.machine {
        MachineKind::G0 => oracle_sigma_filtered(scenario, trace.horizon),
        _ => scenario
            .events
            .iter()
            .filter(|e| !scenario.emissions_below(&e.sentence, trace.horizon).is_empty())
            .map(|e| e.sentence.clone())
            .collect(),
    };
    for s in outputs.symmetric_difference(&expected) {
        return Ok(ClaimEntry::fail(
            ClaimKind::ConsistentEquivalence,
            ClaimWitness::OutputMismatch {
                sentence: s.clone(),
                in_outputs: outputs.contains(s),
                in_expected: expected.contains(s),
            },
        ));
    }
    Ok(ClaimEntry::pass(ClaimKind::ConsistentEquivalence))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QrError {
    BadParameters { m_prime: u32, m: u32, n: u32 },
}

impl core::fmt::Display for QrError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            QrError::BadParameters { m_prime, m, n } => write!(
                f,
                "need n > m >= 1 and m' >= n, got m'={} m={} n={}",
                m_prime, m, n
            ),
        }
    }
}

/// The unique `q >= 1`, `0 <= r < n-m` with `m' - m = q(n-m) + r`.
pub fn decompose_qr(m_prime: u32, m: u32, n: u32) -> Result<(u32, u32), QrError> {
    if !(n > m && m >= 1 && m_prime >= n) {
        return Err(QrError::BadParameters { m_prime, m, n });
    }
    let d = n - m;
    let q = (m_prime - m) / d;
    let r = (m_prime - m) % d;
    debug_assert!(q >= 1 && r < d && m_prime - m == q * d + r);
    Ok((q, r))
}

/// For a forced tower `[]^{m'} D` with `m' >= n`, the suppressing machine
/// must still output every intermediate image
/// `f([]^{j(n-m)} []^{m-1} E)` for `0 <= j <= q`, where `E = []^r D`.
pub fn check_power_ladder(
    trace: &SimTrace,
    scenario: &ArithScenario,
    boxed_tower: &Formula,
) -> Result<ClaimEntry, CheckError> {
    let Some(sw) = trace.switch else {
        return Err(CheckError::NoSwitch);
    };
    require_full_coverage(trace)?;
    let m = scenario.family.m;
    let n = scenario.family.n;
    let decomp = boxed_tower.box_decompose();
    let (q, r) = decompose_qr(decomp.prefix_len, m, n)
        .map_err(|_| CheckError::BadLadderCase("tower shorter than n or bad (m,n)"))?;
    let entry = &scenario.family.entries[sw.family_index];
    if !matches!(entry.model.forces(sw.world, boxed_tower), Ok(true)) {
        return Err(CheckError::BadLadderCase("tower not forced at the switch world"));
    }
    let stem = Formula::box_power(m - 1, Formula::box_power(r, decomp.core.clone()));
    let outputs = trace.output_set();
    for j in 0..=q {
        let rung = f_interp(&Formula::box_power(j * (n - m), stem.clone()));
        if !outputs.contains(&rung) {
            return Ok(ClaimEntry::fail(
                ClaimKind::PowerLadder,
                ClaimWitness::MissingRung { sentence: rung },
            ));
        }
    }
    Ok(ClaimEntry::pass(ClaimKind::PowerLadder))
}
