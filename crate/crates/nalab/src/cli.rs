//! Command-line front end. Machine-readable JSON goes to stdout,
//! diagnostics to stderr.
//!
//! Exit codes: 0 positive verdict / all checks pass, 1 negative verdict,
//! 2 inconclusive, 64 usage errors, 65 input errors. The environment
//! variable `NALAB_MAX_WORLDS` overrides the default search bound; an
//! explicit `--max-worlds` wins over both.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use nalab_core::decide::{decide, verify_countermodel, Budget, Decision};
use nalab_core::formula::Formula;
use nalab_core::hilbert::{check_proof, Verdict};
use nalab_core::parse::{parse_formula, render_formula};
use nalab_core::semantics::relation_universe;
use nalab_core::sim::{
    check_acc_closure, check_consistent_equivalence, check_truth_transfer, run_machine,
    ClaimEntry, ClaimWitness,
};

use crate::format::{self, model_to_file, proof_to_file};
use crate::suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_INPUT: i32 = 65;

#[derive(Parser)]
#[command(
    name = "nalab",
    about = "Workbench for the pure logic of necessitation and its NA extensions",
    disable_help_subcommand = true
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and print its canonical rendering.
    Parse { formula: String },
    /// Evaluate a formula at a world of a model.
    Modelcheck {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        world: u32,
        formula: String,
    },
    /// Check the (m,n)-accessibility condition of a model over the
    /// closure universe of a formula.
    Accessible {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        params: SystemArgs,
        formula: String,
    },
    /// Decide provability: proof, countermodel, or unknown.
    Decide {
        #[command(flatten)]
        params: SystemArgs,
        #[arg(long)]
        max_worlds: Option<u32>,
        formula: String,
    },
    /// Check a proof file.
    Checkproof {
        #[arg(long)]
        proof: PathBuf,
    },
    /// Run a scenario and its trace checks.
    Sim {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value = "all")]
        report: ReportKind,
    },
    /// Run the curated verdict corpus and print the table.
    Corpus,
}

#[derive(Args)]
struct SystemArgs {
    #[arg(short)]
    m: u32,
    #[arg(short)]
    n: u32,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum ReportKind {
    All,
    Truth,
    Closure,
    Equiv,
}

pub fn main_with(args: impl IntoIterator<Item = String>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("{}", err.message);
            err.code
        }
    }
}

struct CliError {
    code: i32,
    message: String,
}

fn input_err(message: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

fn parse_arg_formula(text: &str) -> Result<Formula, CliError> {
    parse_formula(text).map_err(|e| input_err(format!("formula: {}", e)))
}

fn emit(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("json"));
}

fn search_budget(max_worlds: Option<u32>) -> Budget {
    let from_env = std::env::var("NALAB_MAX_WORLDS")
        .ok()
        .and_then(|v| v.parse::<u32>().ok());
    let mut budget = Budget::default();
    if let Some(k) = max_worlds.or(from_env) {
        budget.max_worlds = k;
    }
    budget
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Parse { formula } => {
            let f = parse_arg_formula(&formula)?;
            emit(&json!({
                "formula": render_formula(&f),
                "nodes": f.node_count(),
                "variables": f.vars().into_iter().collect::<Vec<_>>(),
            }));
            Ok(EXIT_OK)
        }
        Command::Modelcheck {
            model,
            world,
            formula,
        } => {
            let f = parse_arg_formula(&formula)?;
            let model =
                format::load_model(&model).map_err(|e| input_err(e.to_string()))?;
            let forces = model
                .forces(world, &f)
                .map_err(|e| input_err(e.to_string()))?;
            emit(&json!({ "forces": forces }));
            Ok(if forces { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Accessible {
            model,
            params,
            formula,
        } => {
            let f = parse_arg_formula(&formula)?;
            let model =
                format::load_model(&model).map_err(|e| input_err(e.to_string()))?;
            let universe = relation_universe(&f, params.m, params.n);
            let report = model.is_mn_accessible(params.m, params.n, &universe);
            let witness = report.witness.as_ref().map(|w| {
                json!({
                    "formula": render_formula(&w.formula),
                    "from": w.x,
                    "to": w.y,
                    "m_chain": w.m_chain,
                })
            });
            emit(&json!({
                "accessible": report.accessible,
                "witness": witness,
            }));
            Ok(if report.accessible {
                EXIT_OK
            } else {
                EXIT_NEGATIVE
            })
        }
        Command::Decide {
            params,
            max_worlds,
            formula,
        } => {
            let f = parse_arg_formula(&formula)?;
            let budget = search_budget(max_worlds);
            match decide(&f, params.m, params.n, budget) {
                Decision::Provable(proof) => {
                    assert!(check_proof(&proof).is_accepted());
                    emit(&json!({
                        "verdict": "provable",
                        "proof": serde_json::to_value(proof_to_file(&proof)).unwrap(),
                    }));
                    Ok(EXIT_OK)
                }
                Decision::Refuted { model, world } => {
                    assert!(verify_countermodel(&f, params.m, params.n, &model, world));
                    emit(&json!({
                        "verdict": "refuted",
                        "world": world,
                        "model": serde_json::to_value(model_to_file(&model)).unwrap(),
                    }));
                    Ok(EXIT_NEGATIVE)
                }
                Decision::Unknown(report) => {
                    emit(&json!({
                        "verdict": "unknown",
                        "sizes_exhausted": report.sizes_exhausted,
                        "candidates_tried": report.candidates_tried,
                        "cap_hit": report.cap_hit,
                    }));
                    Ok(EXIT_UNKNOWN)
                }
            }
        }
        Command::Checkproof { proof } => {
            let proof = format::load_proof(&proof).map_err(|e| input_err(e.to_string()))?;
            match check_proof(&proof) {
                Verdict::Accepted { theorem } => {
                    emit(&json!({
                        "accepted": true,
                        "theorem": render_formula(&theorem),
                        "system": { "m": proof.m, "n": proof.n },
                    }));
                    Ok(EXIT_OK)
                }
                Verdict::Rejected { step, reason } => {
                    emit(&json!({
                        "accepted": false,
                        "step": step,
                        "reason": reason,
                    }));
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::Sim { scenario, report } => {
            let sc = format::load_scenario(&scenario).map_err(|e| input_err(e.to_string()))?;
            let trace = run_machine(&sc).map_err(|e| input_err(e.to_string()))?;
            let ill = trace.switch.is_some();
            let wants = |kind: ReportKind| report == ReportKind::All || report == kind;
            if !ill && (report == ReportKind::Truth || report == ReportKind::Closure) {
                return Err(CliError {
                    code: EXIT_USAGE,
                    message: "truth/closure reports need an ill-branch scenario".into(),
                });
            }
            let mut entries: Vec<ClaimEntry> = Vec::new();
            if ill {
                if wants(ReportKind::Truth) {
                    entries.push(
                        check_truth_transfer(&trace, &sc)
                            .map_err(|e| input_err(e.to_string()))?,
                    );
                }
                if wants(ReportKind::Closure) {
                    entries.push(
                        check_acc_closure(&trace, &sc, sc.family.m, sc.family.n)
                            .map_err(|e| input_err(e.to_string()))?,
                    );
                }
            } else if wants(ReportKind::Equiv) {
                entries.push(
                    check_consistent_equivalence(&trace, &sc)
                        .map_err(|e| input_err(e.to_string()))?,
                );
            }
            let all_pass = entries.iter().all(|e| e.pass);
            emit(&json!({
                "machine": format!("{:?}", trace.kind).to_lowercase(),
                "switch": trace.switch.map(|sw| json!({
                    "stage": sw.stage,
                    "world": sw.world,
                    "family_index": sw.family_index,
                })),
                "horizon": trace.horizon,
                "outputs": trace.output_set().len(),
                "checks": entries.iter().map(claim_to_json).collect::<Vec<_>>(),
                "all_pass": all_pass,
            }));
            Ok(if all_pass { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Corpus => {
            let outcomes = suite::run_corpus();
            let rows: Vec<Value> = outcomes
                .iter()
                .map(|o| {
                    json!({
                        "name": o.item.name,
                        "formula": o.item.formula,
                        "m": o.item.m,
                        "n": o.item.n,
                        "expected": match o.item.expected {
                            suite::Expected::Provable => "provable",
                            suite::Expected::Refuted => "refuted",
                        },
                        "verdict": match &o.decision {
                            Decision::Provable(_) => "provable",
                            Decision::Refuted { .. } => "refuted",
                            Decision::Unknown(_) => "unknown",
                        },
                        "verified": o.verified,
                        "pass": o.pass,
                    })
                })
                .collect();
            let all_pass = outcomes.iter().all(|o| o.pass);
            for o in &outcomes {
                eprintln!(
                    "{:<18} ({},{})  {:<28} {}",
                    o.item.name,
                    o.item.m,
                    o.item.n,
                    o.item.formula,
                    if o.pass { "pass" } else { "FAIL" }
                );
            }
            emit(&json!({ "results": rows, "all_pass": all_pass }));
            Ok(if all_pass { EXIT_OK } else { EXIT_NEGATIVE })
        }
    }
}

fn claim_to_json(entry: &ClaimEntry) -> Value {
    let witness = entry.witness.as_ref().map(|w| match w {
        ClaimWitness::Subformula {
            formula,
            forced,
            evaluated,
        } => json!({
            "kind": "subformula",
            "formula": render_formula(formula),
            "forced": forced,
            "evaluated": evaluated,
        }),
        ClaimWitness::ClosureFailure { sentence } => json!({
            "kind": "closure",
            "sentence": serde_json::to_value(format::sentence_to_file(sentence)).unwrap(),
        }),
        ClaimWitness::OutputMismatch {
            sentence,
            in_outputs,
            in_expected,
        } => json!({
            "kind": "output-mismatch",
            "sentence": serde_json::to_value(format::sentence_to_file(sentence)).unwrap(),
            "in_outputs": in_outputs,
            "in_expected": in_expected,
        }),
        ClaimWitness::MissingRung { sentence } => json!({
            "kind": "missing-rung",
            "sentence": serde_json::to_value(format::sentence_to_file(sentence)).unwrap(),
        }),
    });
    json!({
        "claim": entry.claim.to_string(),
        "pass": entry.pass,
        "witness": witness,
    })
}
