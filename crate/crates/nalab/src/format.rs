//! On-disk JSON formats: models, proofs, and scenario files.
//!
//! Formulas appear as strings in the concrete grammar (`"[]p -> p"`), so
//! relation maps directly encode the formula-indexed relation family.
//! Loading always produces a fully validated domain value; every invariant
//! of the target type is checked here, with a path into the document on
//! failure.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use nalab_core::formula::Formula;
use nalab_core::hilbert::{Proof, ProofStep, Rule};
use nalab_core::parse::{parse_formula, render_formula};
use nalab_core::semantics::{NModel, World};
use nalab_core::sim::{
    ArithScenario, Branch, FamilyEntry, HorizonSpec, IllVia, MachineKind, ModelFamily,
    ProofEvent, Sentence,
};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
}

fn schema_err<T>(path: impl Into<String>, message: impl Into<String>) -> Result<T, LoadError> {
    Err(LoadError::Schema {
        path: path.into(),
        message: message.into(),
    })
}

fn parse_formula_at(text: &str, path: &str) -> Result<Formula, LoadError> {
    parse_formula(text)
        .map_err(|e| LoadError::Schema {
            path: path.to_string(),
            message: format!("bad formula {:?}: {}", text, e),
        })
}

// ---------------------------------------------------------------- models

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub worlds: Vec<World>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<(World, World)>>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
}

pub fn model_from_file(file: &ModelFile) -> Result<NModel, LoadError> {
    let worlds: std::collections::BTreeSet<World> = file.worlds.iter().copied().collect();
    let mut relations = BTreeMap::new();
    for (key, pairs) in &file.relations {
        let formula = parse_formula_at(key, &format!("relations.{}", key))?;
        let set: std::collections::BTreeSet<(World, World)> = pairs.iter().copied().collect();
        for &(x, y) in &set {
            for w in [x, y] {
                if !worlds.contains(&w) {
                    return schema_err(format!("relations.{}", key), format!("unknown world {}", w));
                }
            }
        }
        relations.insert(formula, set);
    }
    let mut valuation = BTreeMap::new();
    for (key, vars) in &file.valuation {
        let world: World = key.parse().map_err(|_| LoadError::Schema {
            path: format!("valuation.{}", key),
            message: "world keys must be positive integers".into(),
        })?;
        if !worlds.contains(&world) {
            return schema_err(format!("valuation.{}", key), format!("unknown world {}", world));
        }
        valuation.insert(world, vars.iter().cloned().collect());
    }
    NModel::new(worlds, relations, valuation).map_err(|e| LoadError::Schema {
        path: "worlds".into(),
        message: e.to_string(),
    })
}

pub fn model_to_file(model: &NModel) -> ModelFile {
    ModelFile {
        worlds: model.worlds().iter().copied().collect(),
        relations: model
            .relations()
            .iter()
            .map(|(b, pairs)| (render_formula(b), pairs.iter().copied().collect()))
            .collect(),
        valuation: model
            .valuation()
            .iter()
            .filter(|(_, vars)| !vars.is_empty())
            .map(|(w, vars)| (w.to_string(), vars.iter().cloned().collect()))
            .collect(),
    }
}

pub fn load_model(path: impl AsRef<Path>) -> Result<NModel, LoadError> {
    model_from_str(&read(path)?)
}

pub fn model_from_str(text: &str) -> Result<NModel, LoadError> {
    model_from_file(&serde_json::from_str(text)?)
}

// ---------------------------------------------------------------- proofs

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProofFile {
    pub system: SystemParams,
    pub steps: Vec<StepFile>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SystemParams {
    pub m: u32,
    pub n: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StepFile {
    pub formula: String,
    pub rule: RuleFile,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RuleFile {
    Named(String),
    Acc { acc: bool },
    Mp { mp: [usize; 2] },
    Nec { nec: usize },
    Ros { ros: usize },
}

pub fn proof_from_file(file: &ProofFile) -> Result<Proof, LoadError> {
    let mut steps = Vec::new();
    for (i, step) in file.steps.iter().enumerate() {
        let at = format!("steps[{}]", i);
        let formula = parse_formula_at(&step.formula, &at)?;
        let rule = match &step.rule {
            RuleFile::Named(name) if name == "taut" => Rule::Taut,
            RuleFile::Named(name) => {
                return schema_err(at, format!("unknown rule {:?}", name));
            }
            RuleFile::Acc { acc: true } => Rule::Acc,
            RuleFile::Acc { acc: false } => {
                return schema_err(at, "\"acc\" must be true");
            }
            RuleFile::Mp { mp: [a, b] } => Rule::Mp(*a, *b),
            RuleFile::Nec { nec } => Rule::Nec(*nec),
            RuleFile::Ros { ros } => Rule::Ros(*ros),
        };
        for cited in cited_indices(&rule) {
            if cited >= i {
                return schema_err(at, format!("step {} cites missing step {}", i, cited));
            }
        }
        steps.push(ProofStep { formula, rule });
    }
    Ok(Proof {
        m: file.system.m,
        n: file.system.n,
        steps,
    })
}

fn cited_indices(rule: &Rule) -> Vec<usize> {
    match rule {
        Rule::Taut | Rule::Acc => vec![],
        Rule::Mp(a, b) => vec![*a, *b],
        Rule::Nec(i) | Rule::Ros(i) => vec![*i],
    }
}

pub fn proof_to_file(proof: &Proof) -> ProofFile {
    ProofFile {
        system: SystemParams {
            m: proof.m,
            n: proof.n,
        },
        steps: proof
            .steps
            .iter()
            .map(|s| StepFile {
                formula: render_formula(&s.formula),
                rule: match &s.rule {
                    Rule::Taut => RuleFile::Named("taut".into()),
                    Rule::Acc => RuleFile::Acc { acc: true },
                    Rule::Mp(a, b) => RuleFile::Mp { mp: [*a, *b] },
                    Rule::Nec(i) => RuleFile::Nec { nec: *i },
                    Rule::Ros(i) => RuleFile::Ros { ros: *i },
                },
            })
            .collect(),
    }
}

pub fn load_proof(path: impl AsRef<Path>) -> Result<Proof, LoadError> {
    proof_from_str(&read(path)?)
}

pub fn proof_from_str(text: &str) -> Result<Proof, LoadError> {
    proof_from_file(&serde_json::from_str(text)?)
}

// ------------------------------------------------------------- sentences

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum SentenceFile {
    #[serde(rename = "base_atom")]
    BaseAtom { name: String, sigma1: bool },
    #[serde(rename = "falsum01")]
    Falsum01,
    #[serde(rename = "s_hat")]
    SHat(World),
    #[serde(rename = "f_atom")]
    FAtom(String),
    #[serde(rename = "pr")]
    Pr(Box<SentenceFile>),
    #[serde(rename = "neq_zero")]
    NeqZero(World),
    #[serde(rename = "refutes")]
    Refutes { b: String, i: World },
    #[serde(rename = "for_all_phi")]
    ForAllPhi(String),
    #[serde(rename = "exists_neg_phi")]
    ExistsNegPhi(String),
    #[serde(rename = "neg")]
    Neg(Box<SentenceFile>),
    #[serde(rename = "and")]
    And(Box<SentenceFile>, Box<SentenceFile>),
    #[serde(rename = "or")]
    Or(Box<SentenceFile>, Box<SentenceFile>),
    #[serde(rename = "imp")]
    Imp(Box<SentenceFile>, Box<SentenceFile>),
}

pub fn sentence_from_file(file: &SentenceFile, path: &str) -> Result<Sentence, LoadError> {
    Ok(match file {
        SentenceFile::BaseAtom { name, sigma1 } => Sentence::BaseAtom {
            name: name.clone(),
            sigma1: *sigma1,
        },
        SentenceFile::Falsum01 => Sentence::Falsum01,
        SentenceFile::SHat(i) => Sentence::SHat(*i),
        SentenceFile::FAtom(p) => Sentence::FAtom(p.clone()),
        SentenceFile::Pr(x) => Sentence::pr(sentence_from_file(x, path)?),
        SentenceFile::NeqZero(i) => Sentence::NeqZero(*i),
        SentenceFile::Refutes { b, i } => Sentence::RefutesAtom {
            formula: parse_formula_at(b, path)?,
            world: *i,
        },
        SentenceFile::ForAllPhi(b) => Sentence::AuxForAllPhi(parse_formula_at(b, path)?),
        SentenceFile::ExistsNegPhi(b) => Sentence::AuxExistsNegPhi(parse_formula_at(b, path)?),
        SentenceFile::Neg(x) => Sentence::neg(sentence_from_file(x, path)?),
        SentenceFile::And(a, b) => Sentence::and(
            sentence_from_file(a, path)?,
            sentence_from_file(b, path)?,
        ),
        SentenceFile::Or(a, b) => Sentence::or(
            sentence_from_file(a, path)?,
            sentence_from_file(b, path)?,
        ),
        SentenceFile::Imp(a, b) => Sentence::imp(
            sentence_from_file(a, path)?,
            sentence_from_file(b, path)?,
        ),
    })
}

pub fn sentence_to_file(s: &Sentence) -> SentenceFile {
    match s {
        Sentence::BaseAtom { name, sigma1 } => SentenceFile::BaseAtom {
            name: name.clone(),
            sigma1: *sigma1,
        },
        Sentence::Falsum01 => SentenceFile::Falsum01,
        Sentence::SHat(i) => SentenceFile::SHat(*i),
        Sentence::FAtom(p) => SentenceFile::FAtom(p.clone()),
        Sentence::PRg(x) => SentenceFile::Pr(Box::new(sentence_to_file(x))),
        Sentence::NeqZero(i) => SentenceFile::NeqZero(*i),
        Sentence::RefutesAtom { formula, world } => SentenceFile::Refutes {
            b: render_formula(formula),
            i: *world,
        },
        Sentence::AuxForAllPhi(b) => SentenceFile::ForAllPhi(render_formula(b)),
        Sentence::AuxExistsNegPhi(b) => SentenceFile::ExistsNegPhi(render_formula(b)),
        Sentence::Neg(x) => SentenceFile::Neg(Box::new(sentence_to_file(x))),
        Sentence::And(a, b) => SentenceFile::And(
            Box::new(sentence_to_file(a)),
            Box::new(sentence_to_file(b)),
        ),
        Sentence::Or(a, b) => SentenceFile::Or(
            Box::new(sentence_to_file(a)),
            Box::new(sentence_to_file(b)),
        ),
        Sentence::Imp(a, b) => SentenceFile::Imp(
            Box::new(sentence_to_file(a)),
            Box::new(sentence_to_file(b)),
        ),
    }
}

// ------------------------------------------------------------- scenarios

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub machine: String,
    pub m: u32,
    pub n: u32,
    pub family: Vec<FamilyEntryFile>,
    #[serde(default)]
    pub events: Vec<EventFile>,
    pub repeat: bool,
    #[serde(default)]
    pub sigma_witness: BTreeMap<String, u64>,
    pub branch: BranchFile,
    pub horizon: HorizonFile,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyEntryFile {
    #[serde(rename = "A")]
    pub formula: String,
    pub model: ModelFile,
    pub refuting_world: World,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EventFile {
    pub code: u64,
    pub sentence: SentenceFile,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BranchFile {
    Named(String),
    Ill { ill_at: IllAtFile },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IllAtFile {
    pub world: World,
    pub via: ViaFile,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ViaFile {
    Named(String),
    Phi { phi_trigger: PhiTriggerFile },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PhiTriggerFile {
    pub k: usize,
    #[serde(rename = "B")]
    pub formula: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HorizonFile {
    Fixed(u64),
    Named(String),
}

pub fn scenario_from_file(file: &ScenarioFile) -> Result<ArithScenario, LoadError> {
    let machine = match file.machine.as_str() {
        "g0" => MachineKind::G0,
        "g1" => MachineKind::G1,
        "g2" => MachineKind::G2,
        "g3" => MachineKind::G3,
        other => return schema_err("machine", format!("unknown machine {:?}", other)),
    };
    let mut entries = Vec::new();
    for (i, entry) in file.family.iter().enumerate() {
        let at = format!("family[{}]", i);
        entries.push(FamilyEntry {
            formula: parse_formula_at(&entry.formula, &at)?,
            model: model_from_file(&entry.model).map_err(|e| match e {
                LoadError::Schema { path, message } => LoadError::Schema {
                    path: format!("{}.model.{}", at, path),
                    message,
                },
                other => other,
            })?,
            refuting_world: entry.refuting_world,
        });
    }
    let mut events = Vec::new();
    for (i, ev) in file.events.iter().enumerate() {
        let at = format!("events[{}]", i);
        events.push(ProofEvent {
            code: ev.code,
            sentence: sentence_from_file(&ev.sentence, &at)?,
        });
    }
    let branch = match &file.branch {
        BranchFile::Named(name) if name == "consistent" => Branch::Consistent,
        BranchFile::Named(name) => {
            return schema_err("branch", format!("unknown branch {:?}", name));
        }
        BranchFile::Ill { ill_at } => {
            let via = match &ill_at.via {
                ViaFile::Named(name) if name == "neg_s" => IllVia::DirectNegS,
                ViaFile::Named(name) => {
                    return schema_err("branch.ill_at.via", format!("unknown route {:?}", name));
                }
                ViaFile::Phi { phi_trigger } => IllVia::PhiTrigger {
                    family_index: phi_trigger.k,
                    formula: parse_formula_at(&phi_trigger.formula, "branch.ill_at.via")?,
                },
            };
            Branch::IllAt {
                world: ill_at.world,
                via,
            }
        }
    };
    let horizon = match &file.horizon {
        HorizonFile::Fixed(h) => HorizonSpec::Fixed(*h),
        HorizonFile::Named(name) if name == "auto" => HorizonSpec::Auto,
        HorizonFile::Named(name) => {
            return schema_err("horizon", format!("expected a number or \"auto\", got {:?}", name));
        }
    };
    let scenario = ArithScenario {
        machine,
        family: ModelFamily {
            entries,
            m: file.m,
            n: file.n,
        },
        events,
        repeat: file.repeat,
        sigma_witness: file.sigma_witness.clone(),
        branch,
        horizon,
    };
    scenario.validate().map_err(|e| LoadError::Schema {
        path: "scenario".into(),
        message: e.to_string(),
    })?;
    Ok(scenario)
}

pub fn scenario_to_file(sc: &ArithScenario) -> ScenarioFile {
    ScenarioFile {
        machine: match sc.machine {
            MachineKind::G0 => "g0",
            MachineKind::G1 => "g1",
            MachineKind::G2 => "g2",
            MachineKind::G3 => "g3",
        }
        .into(),
        m: sc.family.m,
        n: sc.family.n,
        family: sc
            .family
            .entries
            .iter()
            .map(|e| FamilyEntryFile {
                formula: render_formula(&e.formula),
                model: model_to_file(&e.model),
                refuting_world: e.refuting_world,
            })
            .collect(),
        events: sc
            .events
            .iter()
            .map(|e| EventFile {
                code: e.code,
                sentence: sentence_to_file(&e.sentence),
            })
            .collect(),
        repeat: sc.repeat,
        sigma_witness: sc.sigma_witness.clone(),
        branch: match &sc.branch {
            Branch::Consistent => BranchFile::Named("consistent".into()),
            Branch::IllAt { world, via } => BranchFile::Ill {
                ill_at: IllAtFile {
                    world: *world,
                    via: match via {
                        IllVia::DirectNegS => ViaFile::Named("neg_s".into()),
                        IllVia::PhiTrigger {
                            family_index,
                            formula,
                        } => ViaFile::Phi {
                            phi_trigger: PhiTriggerFile {
                                k: *family_index,
                                formula: render_formula(formula),
                            },
                        },
                    },
                },
            },
        },
        horizon: match sc.horizon {
            HorizonSpec::Auto => HorizonFile::Named("auto".into()),
            HorizonSpec::Fixed(h) => HorizonFile::Fixed(h),
        },
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<ArithScenario, LoadError> {
    scenario_from_str(&read(path)?)
}

pub fn scenario_from_str(text: &str) -> Result<ArithScenario, LoadError> {
    scenario_from_file(&serde_json::from_str(text)?)
}

fn read(path: impl AsRef<Path>) -> Result<String, LoadError> {
    let path = path.as_ref();
    std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })
}
