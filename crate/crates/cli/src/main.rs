use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use resolvere::cnf::problem_clauses;
use resolvere::corpus::{self, CorpusVariant};
use resolvere::engine::TraceDocument;
use resolvere::induction::{check_expansion_equiv, expand, InductionError, InductionSchema};
use resolvere::oracle::{check_model, OracleError};
use resolvere::parser::{parse_model, parse_term};
use resolvere::{parse_problem, saturate, verify_trace, Clause, Problem, SaturationConfig, SaturationResult};

const EXIT_OK: u8 = 0;
const EXIT_NEGATIVE: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;

#[derive(Parser)]
#[command(name = "resolvere", version, about = "Saturation-based resolution prover")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the clause normal form of a problem
    Clausify { file: PathBuf },
    /// Search for a refutation of the axioms plus the negated conjecture
    Prove {
        file: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        max_clauses: usize,
        #[arg(long, default_value_t = 10_000)]
        timeout_ms: u64,
        /// Write the JSON proof trace here instead of to stdout
        #[arg(long)]
        trace_out: Option<PathBuf>,
        #[arg(long)]
        no_subsumption: bool,
        /// Print the proof in human-readable form
        #[arg(long)]
        pretty: bool,
    },
    /// Re-check a JSON proof trace against a problem
    Verify { trace: PathBuf, file: PathBuf },
    /// Unfold an induction schema over a finite domain
    ExpandInduction {
        #[arg(long)]
        pred: String,
        #[arg(long)]
        base: String,
        #[arg(long)]
        step: String,
        #[arg(long)]
        depth: usize,
        /// Also check the unfolding against the base and step premises
        #[arg(long)]
        check: bool,
    },
    /// Check a model certificate against the ground instances of a problem
    CheckModel {
        model: PathBuf,
        file: PathBuf,
        #[arg(long)]
        depth: usize,
    },
    /// Replay the undecidability derivation step by step
    ReplayGoedel {
        #[arg(long, value_enum, default_value_t = Variant::Faithful)]
        variant: Variant,
    },
    /// Drop clauses 33 and 34 and show the contradiction disappears
    AblateGoedel {
        #[arg(long, value_enum, default_value_t = Variant::Faithful)]
        variant: Variant,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Faithful,
    Rederived,
}

impl From<Variant> for CorpusVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Faithful => CorpusVariant::Faithful,
            Variant::Rederived => CorpusVariant::Rederived,
        }
    }
}

/// Failure carrying its exit status; the message goes to stderr.
struct Failure(u8, String);

impl Failure {
    fn data(msg: impl Into<String>) -> Self {
        Failure(EXIT_DATA, msg.into())
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

fn load_problem(path: &Path) -> Result<Problem, Failure> {
    parse_problem(&read(path)?).map_err(|e| Failure::data(format!("{}:{e}", path.display())))
}

fn problem_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn oracle_failure(e: OracleError) -> Failure {
    let code = match e {
        OracleError::AtomBudget { .. } | OracleError::InstanceBudget { .. } => EXIT_BUDGET,
        _ => EXIT_DATA,
    };
    Failure(code, e.to_string())
}

fn clausify(file: &Path) -> Outcome {
    let problem = load_problem(file)?;
    let clauses = Problem { formulas: Vec::new(), clauses: problem_clauses(&problem) };
    print!("{clauses}");
    Ok(EXIT_OK)
}

fn prove(file: &Path, cfg: &SaturationConfig, trace_out: Option<&Path>, pretty: bool) -> Outcome {
    let problem = load_problem(file)?;
    let clauses: Vec<Clause> = problem_clauses(&problem);
    let result = saturate(&clauses, cfg);
    eprintln!("{result}");
    let code = match &result {
        SaturationResult::Refutation { .. } => EXIT_OK,
        SaturationResult::Saturated { .. } => EXIT_NEGATIVE,
        SaturationResult::ResourceOut { .. } => EXIT_BUDGET,
    };
    let Some(trace) = result.trace() else {
        println!("result: {}", result.label());
        return Ok(code);
    };
    let json = trace.to_json(&problem_name(file));
    if let Some(path) = trace_out {
        fs::write(path, &json).map_err(|e| Failure(EXIT_DATA, format!("{}: {e}", path.display())))?;
    }
    if pretty {
        println!("result: {}", result.label());
        print!("{trace}");
    } else if trace_out.is_some() {
        println!("result: {}", result.label());
    } else {
        print!("{json}");
    }
    Ok(code)
}

fn verify(trace_file: &Path, file: &Path) -> Outcome {
    let doc = TraceDocument::from_json(&read(trace_file)?)
        .map_err(|e| Failure::data(format!("{}: {e}", trace_file.display())))?;
    let trace = doc.to_trace().map_err(|e| Failure::data(format!("{}: {e}", trace_file.display())))?;
    let clauses = problem_clauses(&load_problem(file)?);
    match verify_trace(&trace, &clauses) {
        Ok(()) => {
            println!("verified: {} steps, result {}", trace.steps.len(), doc.result);
            Ok(EXIT_OK)
        }
        Err(e) => {
            println!("rejected: {e}");
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn expand_induction(pred: &str, base: &str, step: &str, depth: usize, check: bool) -> Outcome {
    let term =
        |what: &str, text: &str| parse_term(text).map_err(|e| Failure(EXIT_USAGE, format!("--{what} `{text}`: {e}")));
    let schema = InductionSchema::new(pred, term("base", base)?, term("step", step)?)
        .map_err(|e| Failure(EXIT_USAGE, e.to_string()))?;
    println!("{}", expand(&schema, depth));
    if check {
        match check_expansion_equiv(&schema, depth) {
            Ok(equiv) => {
                println!("equivalence: {equiv}");
                return Ok(if equiv { EXIT_OK } else { EXIT_NEGATIVE });
            }
            Err(e @ InductionError::Depth { .. }) => return Err(Failure(EXIT_BUDGET, e.to_string())),
            Err(InductionError::Oracle(e)) => return Err(oracle_failure(e)),
            Err(e) => return Err(Failure(EXIT_USAGE, e.to_string())),
        }
    }
    Ok(EXIT_OK)
}

fn check_model_cmd(model: &Path, file: &Path, depth: usize) -> Outcome {
    let interpretation = parse_model(&read(model)?).map_err(|e| Failure::data(format!("{}:{e}", model.display())))?;
    let clauses = problem_clauses(&load_problem(file)?);
    let verdict = check_model(&interpretation, &clauses, depth).map_err(oracle_failure)?;
    println!("{verdict}");
    Ok(if verdict.is_satisfied() { EXIT_OK } else { EXIT_NEGATIVE })
}

fn replay_goedel(variant: CorpusVariant) -> Outcome {
    let report = corpus::replay(variant);
    print!("{report}");
    match report.check() {
        Ok(()) => {
            println!("\nreplay: ok");
            Ok(EXIT_OK)
        }
        Err(e) => {
            println!("\nreplay: FAILED ({e})");
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn ablate_goedel(variant: CorpusVariant) -> Outcome {
    let report = corpus::ablation(variant, &SaturationConfig::default());
    println!("{report}");
    Ok(if report.is_success() { EXIT_OK } else { EXIT_NEGATIVE })
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Clausify { file } => clausify(&file),
        Command::Prove { file, max_clauses, timeout_ms, trace_out, no_subsumption, pretty } => {
            let cfg = SaturationConfig {
                max_clauses,
                timeout_ms,
                forward_subsumption: !no_subsumption,
                ..SaturationConfig::default()
            };
            prove(&file, &cfg, trace_out.as_deref(), pretty)
        }
        Command::Verify { trace, file } => verify(&trace, &file),
        Command::ExpandInduction { pred, base, step, depth, check } => {
            expand_induction(&pred, &base, &step, depth, check)
        }
        Command::CheckModel { model, file, depth } => check_model_cmd(&model, &file, depth),
        Command::ReplayGoedel { variant } => replay_goedel(variant.into()),
        Command::AblateGoedel { variant } => ablate_goedel(variant.into()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            eprintln!("resolvere: {msg}");
            code
        }
    };
    let _ = std::io::stdout().flush();
    ExitCode::from(code)
}
