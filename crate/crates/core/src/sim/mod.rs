//! Desk-scale simulation of the arithmetical-completeness constructions:
//! the stage monitors, the four output machines, operational truth over a
//! run, and checkers for the trace-level invariants.

pub mod checks;
pub mod eval;
pub mod machine;
pub mod monitor;
pub mod scenario;
pub mod sentence;

pub use checks::{
    check_acc_closure, check_consistent_equivalence, check_power_ladder, check_truth_transfer,
    decompose_qr, oracle_sigma_filtered, CheckError, ClaimEntry, ClaimKind, ClaimWitness,
    QrError, TraceReport,
};
pub use eval::{eval_sentence, EvalError, TraceCtx};
pub use machine::{relevant_set, run_machine, SimTrace, Switch};
pub use monitor::{run_h, run_h_prime, switch_point};
pub use scenario::{
    ArithScenario, Branch, FamilyEntry, HorizonSpec, IllVia, MachineKind, ModelFamily,
    ProofEvent, ScenarioError,
};
pub use sentence::{
    f_interp, i_translate_sentence, invert_f, is_tc_sentences, phi_b_at, pr_power, pr_strip,
    pr_strip_exact, sentence_index, Sentence,
};
