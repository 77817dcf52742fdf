//! Batch command-line front end: formula generation, embedding and
//! abstraction checks, concretization enumeration, evaluation, and
//! supervaluation queries over structure files.
//!
//! Exit codes: 0 success or definite verdict, 1 indefinite (1/2) verdict,
//! 2 input or validation failure, 3 unmet precondition (not bounded, not
//! an abstraction image, empty concretization), 4 budget exhausted.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hat_core::abstraction::{canonical_abstraction, canonical_name, find_embedding};
use hat_core::charform::{gamma_hat, gamma_hat_c, gamma_hat_np, NodeFormulaMap};
use hat_core::semantics::{eval3_closed, eval_mso_closed};
use hat_core::structures::{
    parse_structure_file, predicted_structure_count, StructureFile, StructureStream,
};
use hat_core::supervaluation::{supervaluate, BoundedVerdict, QueryBounds};
use hat_core::{
    print_formula, Error, Formula, ThreeValuedStructure, TruthValue, TwoValuedStructure,
    Vocabulary,
};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "hat", version, about = "Heap-abstraction toolkit: characteristic formulas and bounded supervaluation over logical structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// First-order characteristic formulas (bounded structures).
    Fo,
    /// Tightened formulas for canonical abstraction (abstraction images).
    Canonical,
    /// Existential monadic second-order formulas (arbitrary structures).
    Np,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    JsonReport,
}

#[derive(Args)]
struct OutputOpts {
    /// Write the result here instead of stdout.
    #[arg(long, env = "HAT_OUT")]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value = "text", env = "HAT_FORMAT")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the characteristic formula of one or more 3-valued
    /// structures, conjoined with the integrity formula.
    GammaHat {
        /// 3-valued structure files.
        #[arg(required = true)]
        structs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "fo", env = "HAT_MODE")]
        mode: Mode,
        /// Closed integrity formula file; defaults to `1`.
        #[arg(long, env = "HAT_INTEGRITY")]
        integrity: Option<PathBuf>,
        /// Node-formula override file (fo mode, single structure).
        #[arg(long, env = "HAT_NODEFORMULAS")]
        nodeformulas: Option<PathBuf>,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Most-precise verdict of a closed query over the concretization of
    /// the given structures, by bounded model enumeration.
    Supervaluate {
        #[arg(required = true)]
        structs: Vec<PathBuf>,
        /// Closed query formula file.
        #[arg(long)]
        query: PathBuf,
        #[arg(long, env = "HAT_INTEGRITY")]
        integrity: Option<PathBuf>,
        /// Maximum universe size; defaults to the largest abstract
        /// universe plus two.
        #[arg(long, env = "HAT_BOUND")]
        bound: Option<usize>,
        /// Enumeration budget in candidate steps.
        #[arg(long, default_value_t = 1_000_000_000, env = "HAT_BUDGET")]
        budget: u64,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Check that a query holds in every represented admissible structure
    /// (a supervaluation specialized to invariant checking).
    Invariant {
        #[arg(required = true)]
        structs: Vec<PathBuf>,
        #[arg(long)]
        query: PathBuf,
        #[arg(long, env = "HAT_INTEGRITY")]
        integrity: Option<PathBuf>,
        #[arg(long, env = "HAT_BOUND")]
        bound: Option<usize>,
        #[arg(long, default_value_t = 1_000_000_000, env = "HAT_BUDGET")]
        budget: u64,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Search for an embedding of a 2-valued structure into a 3-valued one.
    Embed {
        concrete: PathBuf,
        abstracted: PathBuf,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Canonically abstract a 2-valued structure; prints the abstraction
    /// and the canonical-name table.
    Abstract {
        concrete: PathBuf,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Stream the members of a structure's concretization up to a bound.
    Enumerate {
        abstracted: PathBuf,
        #[arg(long, env = "HAT_INTEGRITY")]
        integrity: Option<PathBuf>,
        #[arg(long, env = "HAT_BOUND")]
        bound: Option<usize>,
        #[arg(long, default_value_t = 1_000_000_000, env = "HAT_BUDGET")]
        budget: u64,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Evaluate a closed formula on a structure (Tarskian on 2-valued
    /// inputs, Kleene on 3-valued inputs).
    Eval {
        structure: PathBuf,
        #[arg(long)]
        query: PathBuf,
        #[arg(long, value_enum, default_value = "fo", env = "HAT_MODE")]
        mode: Mode,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Check the structural invariants of structure files.
    Validate {
        #[arg(required = true)]
        structs: Vec<PathBuf>,
    },
    /// Write a named built-in structure in the file format.
    Fixture {
        /// One of the built-in names; see `--list`.
        name: Option<String>,
        /// Size parameter for the chain, cycle and clique families.
        #[arg(long)]
        k: Option<usize>,
        /// List the available fixture names.
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        output: OutputOpts,
    },
}

enum CliError {
    Core(Error),
    Io(PathBuf, std::io::Error),
    Usage(String),
    Validation(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(path, e) => write!(f, "{}: {e}", path.display()),
            CliError::Usage(msg) | CliError::Validation(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

fn exit_code(err: &CliError) -> ExitCode {
    let code = match err {
        CliError::Usage(_) | CliError::Io(..) | CliError::Validation(_) => 2,
        CliError::Core(e) => match e {
            Error::BudgetExceeded { .. } | Error::TableTooLarge { .. } | Error::UniverseTooLarge { .. } => 4,
            Error::NotBounded { .. }
            | Error::IcaViolations(_)
            | Error::MissingNodeFormula { .. }
            | Error::EmptyConcretization { .. } => 3,
            _ => 2,
        },
    };
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn write_out(output: &OutputOpts, text: &str) -> Result<(), CliError> {
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(path.clone(), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Loads a structure file and rejects invalid ones with a violation listing.
fn load_structure(path: &Path) -> Result<StructureFile, CliError> {
    let parsed = parse_structure_file(&read(path)?)?;
    let violations = match &parsed {
        StructureFile::Two(s) => s.validate(),
        StructureFile::Three(s) => s.validate(),
    };
    if violations.is_empty() {
        Ok(parsed)
    } else {
        let listing: Vec<String> = violations.iter().map(|v| format!("  {v}")).collect();
        Err(CliError::Validation(format!(
            "{} is not a valid structure:\n{}",
            path.display(),
            listing.join("\n")
        )))
    }
}

fn load_three(path: &Path) -> Result<ThreeValuedStructure, CliError> {
    match load_structure(path)? {
        StructureFile::Three(s) => Ok(s),
        StructureFile::Two(_) => Err(CliError::Usage(format!(
            "{}: expected a 3-valued structure (kind three)",
            path.display()
        ))),
    }
}

fn load_two(path: &Path) -> Result<TwoValuedStructure, CliError> {
    match load_structure(path)? {
        StructureFile::Two(s) => Ok(s),
        StructureFile::Three(_) => Err(CliError::Usage(format!(
            "{}: expected a 2-valued structure (kind two)",
            path.display()
        ))),
    }
}

fn load_three_set(paths: &[PathBuf]) -> Result<Vec<ThreeValuedStructure>, CliError> {
    let structures: Vec<ThreeValuedStructure> =
        paths.iter().map(|p| load_three(p)).collect::<Result<_, _>>()?;
    for s in &structures[1..] {
        if s.vocabulary() != structures[0].vocabulary() {
            return Err(CliError::Usage("structure files use different vocabularies".into()));
        }
    }
    Ok(structures)
}

fn parse_query(path: &Path, voc: &Vocabulary, np: bool) -> Result<Formula, CliError> {
    let text = read(path)?;
    let formula = if np {
        hat_core::parse_formula_np(&text, voc)
    } else {
        hat_core::parse_formula(&text, voc)
    }
    .map_err(Error::from)?;
    Ok(formula)
}

fn load_integrity(
    path: &Option<PathBuf>,
    voc: &Vocabulary,
    np: bool,
) -> Result<Formula, CliError> {
    match path {
        Some(p) => parse_query(p, voc, np),
        None => Ok(Formula::True),
    }
}

#[derive(Serialize)]
struct VerdictReport {
    value: String,
    bound: usize,
    witness_satisfying: Option<String>,
    witness_refuting: Option<String>,
}

#[derive(Serialize)]
struct EmbedReport {
    witness: Option<Vec<[String; 2]>>,
}

#[derive(Serialize)]
struct AbstractReport {
    structure: String,
    canonical_names: Vec<[String; 2]>,
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::GammaHat { structs, mode, integrity, nodeformulas, output } => {
            let structures = load_three_set(&structs)?;
            let voc = structures[0].vocabulary().clone();
            let integrity = load_integrity(&integrity, &voc, mode == Mode::Np)?;
            let formula = match mode {
                Mode::Fo => {
                    let maps = node_maps(&structures, &nodeformulas)?;
                    gamma_hat(&structures, &maps, &integrity)?
                }
                Mode::Canonical => gamma_hat_c(&structures, &integrity)?,
                Mode::Np => gamma_hat_np(&structures, &integrity)?,
            };
            let text = match output.format {
                Format::Text => format!("{}\n", print_formula(&formula)),
                Format::JsonReport => {
                    let report =
                        serde_json::json!({ "formula": print_formula(&formula) });
                    format!("{report}\n")
                }
            };
            write_out(&output, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Supervaluate { structs, query, integrity, bound, budget, output }
        | Command::Invariant { structs, query, integrity, bound, budget, output } => {
            let structures = load_three_set(&structs)?;
            let voc = structures[0].vocabulary().clone();
            let integrity = load_integrity(&integrity, &voc, false)?;
            let query = parse_query(&query, &voc, false)?;
            let mut bounds = match bound {
                Some(n) => QueryBounds::nodes(n),
                None => QueryBounds::default_for(&structures),
            };
            bounds = bounds.with_budget(budget);
            let verdict = supervaluate(&query, &structures, &integrity, &bounds)?;
            report_verdict(&verdict, &output)
        }
        Command::Embed { concrete, abstracted, output } => {
            let concrete = load_two(&concrete)?;
            let abstracted = load_three(&abstracted)?;
            let witness = find_embedding(&concrete, &abstracted)?;
            let pairs = witness.map(|w| {
                w.pairs(&concrete, &abstracted)
                    .into_iter()
                    .map(|(c, a)| [c.to_string(), a.to_string()])
                    .collect::<Vec<_>>()
            });
            let text = match output.format {
                Format::Text => match &pairs {
                    None => "none\n".to_string(),
                    Some(pairs) => pairs
                        .iter()
                        .map(|[c, a]| format!("{c} -> {a}\n"))
                        .collect::<String>(),
                },
                Format::JsonReport => {
                    format!("{}\n", serde_json::to_string(&EmbedReport { witness: pairs.clone() }).unwrap())
                }
            };
            write_out(&output, &text)?;
            Ok(if pairs.is_some() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Abstract { concrete, output } => {
            let concrete = load_two(&concrete)?;
            let (abstracted, _) = canonical_abstraction(&concrete);
            let names: Vec<[String; 2]> = (0..abstracted.node_count())
                .map(|u| {
                    let name = canonical_name(&abstracted, u).expect("node in range");
                    [abstracted.node_ids()[u].clone(), name.to_string()]
                })
                .collect();
            let text = match output.format {
                Format::Text => {
                    let mut out = abstracted.to_file_text();
                    for [node, name] in &names {
                        out.push_str(&format!("# {node}: {name}\n"));
                    }
                    out
                }
                Format::JsonReport => {
                    let report = AbstractReport {
                        structure: abstracted.to_file_text(),
                        canonical_names: names,
                    };
                    format!("{}\n", serde_json::to_string(&report).unwrap())
                }
            };
            write_out(&output, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Enumerate { abstracted, integrity, bound, budget, output } => {
            let abstracted = load_three(&abstracted)?;
            let voc = abstracted.vocabulary().clone();
            let integrity = load_integrity(&integrity, &voc, false)?;
            let bounds = match bound {
                Some(n) => QueryBounds::nodes(n),
                None => QueryBounds::default_for(std::slice::from_ref(&abstracted)),
            };
            let maps = node_maps(std::slice::from_ref(&abstracted), &None)?;
            let gamma = gamma_hat(std::slice::from_ref(&abstracted), &maps, &integrity)?;
            // The pruned walk usually stays far below the raw space, so a
            // budget under the analytic count is a warning, not an error.
            match predicted_structure_count(&voc, bounds.max_nodes) {
                Some(count) if count > budget as u128 => eprintln!(
                    "note: {count} structures below the bound; relying on filter pruning within the budget of {budget}"
                ),
                _ => {}
            }
            let mut stream =
                StructureStream::new(&voc, bounds.max_nodes, Some(&gamma))?.with_budget(budget);
            let mut members = Vec::new();
            while let Some(member) = stream.next_structure().map_err(CliError::from)? {
                members.push(member.to_file_text());
            }
            let text = match output.format {
                Format::Text => members
                    .iter()
                    .map(|m| format!("{m}---\n"))
                    .collect::<String>(),
                Format::JsonReport => {
                    let report = serde_json::json!({
                        "count": members.len(),
                        "structures": members,
                    });
                    format!("{report}\n")
                }
            };
            write_out(&output, &text)?;
            eprintln!("{} member(s) up to {} node(s)", members.len(), bounds.max_nodes);
            Ok(ExitCode::SUCCESS)
        }
        Command::Eval { structure, query, mode, output } => {
            let structure = load_structure(&structure)?;
            let voc = structure.vocabulary().clone();
            let query = parse_query(&query, &voc, mode == Mode::Np)?;
            if !query.free_variables().is_empty() {
                return Err(CliError::Usage("query must be closed".into()));
            }
            let value = match &structure {
                StructureFile::Two(s) => {
                    if mode == Mode::Np {
                        TruthValue::from_bool(eval_mso_closed(s, &query)?)
                    } else {
                        TruthValue::from_bool(hat_core::eval2_closed(s, &query)?)
                    }
                }
                StructureFile::Three(s) => eval3_closed(s, &query)?,
            };
            let text = match output.format {
                Format::Text => format!("{value}\n"),
                Format::JsonReport => format!("{}\n", serde_json::json!({ "value": value.to_string() })),
            };
            write_out(&output, &text)?;
            Ok(if value == TruthValue::Unknown { ExitCode::from(1) } else { ExitCode::SUCCESS })
        }
        Command::Validate { structs } => {
            for path in &structs {
                load_structure(path)?;
                println!("{}: ok", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Fixture { name, k, list, output } => {
            if list {
                for name in hat_core::fixtures::fixture_names() {
                    println!("{name}");
                }
                return Ok(ExitCode::SUCCESS);
            }
            let name = name.ok_or_else(|| CliError::Usage("missing fixture name".into()))?;
            let fixture = hat_core::fixtures::build(&name, k)?;
            let text = hat_core::structures::write_structure_file(&fixture);
            write_out(&output, &text)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn node_maps(
    structures: &[ThreeValuedStructure],
    overrides: &Option<PathBuf>,
) -> Result<Vec<NodeFormulaMap>, CliError> {
    match overrides {
        None => Ok(structures
            .iter()
            .map(NodeFormulaMap::bounded)
            .collect::<Result<_, _>>()?),
        Some(path) => {
            if structures.len() != 1 {
                return Err(CliError::Usage(
                    "--nodeformulas applies to a single structure".into(),
                ));
            }
            let text = read(path)?;
            Ok(vec![NodeFormulaMap::from_lines(&text, &structures[0])?])
        }
    }
}

fn report_verdict(verdict: &BoundedVerdict, output: &OutputOpts) -> Result<ExitCode, CliError> {
    let witnesses = verdict
        .witnesses
        .as_ref()
        .map(|w| (w.satisfying.to_file_text(), w.refuting.to_file_text()));
    match output.format {
        Format::Text => {
            let mut text = format!("value: {}\nbound: {}\n", verdict.value, verdict.max_nodes);
            if let Some((sat, refut)) = &witnesses {
                match &output.out {
                    Some(base) => {
                        let sat_path = with_suffix(base, ".sat");
                        let refut_path = with_suffix(base, ".refut");
                        fs::write(&sat_path, sat).map_err(|e| CliError::Io(sat_path.clone(), e))?;
                        fs::write(&refut_path, refut)
                            .map_err(|e| CliError::Io(refut_path.clone(), e))?;
                        text.push_str(&format!(
                            "witnesses: {} {}\n",
                            sat_path.display(),
                            refut_path.display()
                        ));
                        print!("{text}");
                        return Ok(ExitCode::from(1));
                    }
                    None => {
                        text.push_str("satisfying witness:\n");
                        text.push_str(sat);
                        text.push_str("refuting witness:\n");
                        text.push_str(refut);
                    }
                }
            }
            write_out(output, &text)?;
        }
        Format::JsonReport => {
            let report = VerdictReport {
                value: verdict.value.to_string(),
                bound: verdict.max_nodes,
                witness_satisfying: witnesses.as_ref().map(|(s, _)| s.clone()),
                witness_refuting: witnesses.as_ref().map(|(_, r)| r.clone()),
            };
            write_out(output, &format!("{}\n", serde_json::to_string(&report).unwrap()))?;
        }
    }
    Ok(if verdict.value == TruthValue::Unknown {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn with_suffix(base: &Path, suffix: &str) -> PathBuf {
    let mut name = base.as_os_str().to_os_string();
    name.push(suffix);
    PathBuf::from(name)
}
