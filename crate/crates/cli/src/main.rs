//! Command-line front end: every capability of the library behind one
//! binary with machine-readable output.
//!
//! Exit codes: 0 success, 2 malformed formula or rule text, 3 invalid
//! model or profile, 4 capacity budget exceeded, 5 unsupported construct.
//! Verdicts go to standard output (one JSON document in `--json` mode),
//! diagnostics to standard error; outcomes such as SAT versus UNSAT are
//! never encoded in the exit code.

use clap::{Parser, Subcommand, ValueEnum};
use pastltl::admissibility::{self, SearchBudget};
use pastltl::decision::{self, DEFAULT_NODE_BUDGET};
use pastltl::error::Error;
use pastltl::knowledge::AgentProfile;
use pastltl::normal_form::{self, DEFAULT_DISJUNCT_BUDGET};
use pastltl::semantics::{self, PeriodicModel, TruthVector};
use pastltl::{parse_formula, parse_rule};
use serde_json::{json, Value};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "pastltl",
    version,
    about = "Past-directed temporal logic with a bounded Since"
)]
struct Cli {
    /// Emit a single JSON document on standard output.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EvalMode {
    Bounded,
    Unbounded,
}

fn m_arg() -> clap::builder::RangedI64ValueParser<u32> {
    clap::value_parser!(u32).range(1..)
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a formula at a position of a model file.
    Eval {
        formula: String,
        /// Path to the model (JSON).
        #[arg(long)]
        model: PathBuf,
        /// Position to evaluate at.
        #[arg(long, default_value_t = 0)]
        pos: usize,
        /// Bounded-window or unbounded reading of Since.
        #[arg(long, value_enum, default_value_t = EvalMode::Bounded)]
        mode: EvalMode,
    },
    /// Decide satisfiability of a formula; prints a witness model when SAT.
    Sat {
        formula: String,
        #[arg(long, default_value_t = 1, value_parser = m_arg())]
        m: u32,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        node_budget: u64,
    },
    /// Decide theoremhood of a formula; prints a countermodel when false.
    Theorem {
        formula: String,
        #[arg(long, default_value_t = 1, value_parser = m_arg())]
        m: u32,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        node_budget: u64,
    },
    /// Compile a rule to reduced normal form.
    Rnf {
        rule: String,
        #[arg(long, default_value_t = DEFAULT_DISJUNCT_BUDGET)]
        disjunct_budget: u64,
    },
    /// Check frame validity of a rule; prints a countermodel when invalid.
    RuleValid {
        rule: String,
        #[arg(long, default_value_t = 1, value_parser = m_arg())]
        m: u32,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        node_budget: u64,
    },
    /// Classify a rule as admissible, not admissible, or unknown.
    Admissible {
        rule: String,
        #[arg(long, default_value_t = 1, value_parser = m_arg())]
        m: u32,
        /// Maximum depth of substituted formulas in the witness search.
        #[arg(long, default_value_t = 2)]
        depth: u32,
        /// Fresh letters available to the witness search.
        #[arg(long, default_value_t = 1)]
        letters: u32,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        node_budget: u64,
        /// Cap on tried substitutions.
        #[arg(long, default_value_t = 5000)]
        max_candidates: usize,
    },
    /// Multi-agent knowledge over an agent profile file.
    Know {
        #[command(subcommand)]
        sub: KnowCommand,
    },
}

#[derive(Subcommand)]
enum KnowCommand {
    /// Print the voted model of a profile.
    Vote {
        #[arg(long)]
        profile: PathBuf,
    },
    /// Evaluate a formula over the voted valuation.
    VotedEval {
        formula: String,
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, default_value_t = 0)]
        pos: usize,
    },
    /// Shared parameterized knowledge: phi S psi under every agent.
    Shared {
        /// Trigger formula psi.
        #[arg(long)]
        psi: String,
        /// Body formula phi.
        #[arg(long)]
        phi: String,
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, default_value_t = 0)]
        pos: usize,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Syntax { .. } | Error::UnknownOperator { .. } | Error::EmptyPremises => 2,
        Error::InvalidModel(_)
        | Error::UnknownAtom(_)
        | Error::IncompatibleAgents(_)
        | Error::NonUniformShift => 3,
        Error::CapacityExceeded { .. } => 4,
        Error::NestedKnowledgeUnsupported => 5,
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}

fn read_model(path: &PathBuf) -> Result<PeriodicModel, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidModel(format!("{}: {e}", path.display())))?;
    PeriodicModel::from_json_str(&text)
}

fn read_profile(path: &PathBuf) -> Result<AgentProfile, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidModel(format!("{}: {e}", path.display())))?;
    AgentProfile::from_json_str(&text)
}

fn truth_vector_json(tv: &TruthVector) -> Value {
    json!({
        "prefix_truth": tv.prefix_truth,
        "loop_truth": tv.loop_truth,
        "offset": tv.offset,
    })
}

fn emit(json_mode: bool, doc: Value, human: String) {
    if json_mode {
        println!(
            "{}",
            serde_json::to_string_pretty(&doc).expect("serialisable")
        );
    } else {
        println!("{human}");
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let json_mode = cli.json;
    match cli.command {
        Command::Eval {
            formula,
            model,
            pos,
            mode,
        } => {
            let f = parse_formula(&formula)?;
            let model = read_model(&model)?;
            let (value, tv) = match mode {
                EvalMode::Bounded => (
                    semantics::eval(&model, &f, pos)?,
                    semantics::truth_vector(&model, &f)?,
                ),
                EvalMode::Unbounded => {
                    let tv = semantics::truth_vector_unbounded(&model, &f)?;
                    (tv.get(pos), tv)
                }
            };
            emit(
                json_mode,
                json!({
                    "value": value,
                    "position": pos,
                    "mode": match mode {
                        EvalMode::Bounded => "bounded",
                        EvalMode::Unbounded => "unbounded",
                    },
                    "truth_vector": truth_vector_json(&tv),
                }),
                value.to_string(),
            );
        }
        Command::Sat {
            formula,
            m,
            node_budget,
        } => {
            let f = parse_formula(&formula)?;
            match decision::satisfiable_budgeted(&f, m, node_budget)? {
                Some(w) => emit(
                    json_mode,
                    json!({ "satisfiable": true, "m": m, "witness": w.to_json() }),
                    format!("SAT\n{}", w.to_json()),
                ),
                None => emit(
                    json_mode,
                    json!({ "satisfiable": false, "m": m }),
                    "UNSAT".to_string(),
                ),
            }
        }
        Command::Theorem {
            formula,
            m,
            node_budget,
        } => {
            let f = parse_formula(&formula)?;
            match decision::is_theorem_budgeted(&f, m, node_budget)? {
                decision::Theoremhood::Theorem => emit(
                    json_mode,
                    json!({ "theorem": true, "m": m }),
                    "true".to_string(),
                ),
                decision::Theoremhood::NotTheorem(w) => emit(
                    json_mode,
                    json!({ "theorem": false, "m": m, "countermodel": w.to_json() }),
                    format!("false\n{}", w.to_json()),
                ),
            }
        }
        Command::Rnf {
            rule,
            disjunct_budget,
        } => {
            let r = parse_rule(&rule)?;
            let nf = normal_form::rnf_transform_budgeted(&r, disjunct_budget)?;
            let count = nf.disjuncts().len();
            emit(
                json_mode,
                json!({ "disjunct_count": count, "rnf": nf.to_json() }),
                format!("{count} disjuncts\n{}", nf.to_json()),
            );
        }
        Command::RuleValid {
            rule,
            m,
            node_budget,
        } => {
            let r = parse_rule(&rule)?;
            match decision::frame_valid_rule_budgeted(&r, m, node_budget)? {
                None => emit(
                    json_mode,
                    json!({ "valid": true, "m": m }),
                    "valid".to_string(),
                ),
                Some(w) => emit(
                    json_mode,
                    json!({ "valid": false, "m": m, "countermodel": w.to_json() }),
                    format!("invalid\n{}", w.to_json()),
                ),
            }
        }
        Command::Admissible {
            rule,
            m,
            depth,
            letters,
            node_budget,
            max_candidates,
        } => {
            let r = parse_rule(&rule)?;
            let budget = SearchBudget {
                max_depth: depth,
                extra_letters: letters,
                m,
                node_budget,
                max_candidates,
            };
            let verdict = admissibility::admissible_status(&r, &budget)?;
            let doc = verdict.to_json();
            let human = serde_json::to_string_pretty(&doc).expect("serialisable");
            emit(json_mode, doc, human);
        }
        Command::Know { sub } => match sub {
            KnowCommand::Vote { profile } => {
                let profile = read_profile(&profile)?;
                let voted = profile.vote_model();
                emit(
                    json_mode,
                    json!({ "voted_model": voted.to_json() }),
                    voted.to_json().to_string(),
                );
            }
            KnowCommand::VotedEval {
                formula,
                profile,
                pos,
            } => {
                let f = parse_formula(&formula)?;
                let profile = read_profile(&profile)?;
                let value = profile.eval_voted_knowledge(&f, pos)?;
                emit(
                    json_mode,
                    json!({ "value": value, "position": pos }),
                    value.to_string(),
                );
            }
            KnowCommand::Shared {
                psi,
                phi,
                profile,
                pos,
            } => {
                let psi = parse_formula(&psi)?;
                let phi = parse_formula(&phi)?;
                let profile = read_profile(&profile)?;
                let value = profile.eval_shared_knowledge(&psi, &phi, pos)?;
                emit(
                    json_mode,
                    json!({ "value": value, "position": pos }),
                    value.to_string(),
                );
            }
        },
    }
    Ok(())
}
