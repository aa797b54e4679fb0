//! `whittaker`: JSON front end for the exact computations in `whittaker-core`.
//!
//! Exit codes: 0 on success, 1 when a verification reports a mismatch,
//! 2 on domain errors (a JSON error object is printed), 64 on usage errors.

mod input;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use whittaker_core::exactlin::jordan_type;
use whittaker_core::grading::{deligne_ez_filtration, heisenberg_data, Deligne};
use whittaker_core::gln::jordan_matrix;
use whittaker_core::partitions::dominance_leq;
use whittaker_core::principal::principal_dominator;
use whittaker_core::suites::{self, SuiteReport};
use whittaker_core::whittaker::{critical_numbers, gl_same_example, gl_small_example, ChainInput, WhittakerPair};
use whittaker_core::{glmain, mirabolic, Composition, Error, Partition, QMatrix};

use input::{parse_parts, parse_rationals, InputError, Parts, Rationals};

const EXIT_MISMATCH: u8 = 1;
const EXIT_DOMAIN: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "whittaker", version, about = "Exact Whittaker pair and nilpotent orbit computations in gl_n")]
#[command(args_conflicts_with_subcommands = true, arg_required_else_help = true)]
struct Cli {
    /// Run every acceptance suite with sweeps capped at this n and print a summary table.
    #[arg(long, value_name = "N")]
    sweep: Option<usize>,

    /// Write the JSON result to this file instead of standard output.
    #[arg(long, short, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dominance order: is mu <= lam?
    OrbitOrder {
        #[arg(long, value_parser = parse_parts)]
        mu: Parts,
        #[arg(long, value_parser = parse_parts)]
        lam: Parts,
    },
    /// Jordan type of a nilpotent matrix.
    JordanType {
        /// Matrix as a JSON file or inline JSON.
        #[arg(long)]
        matrix: String,
    },
    /// Deformation chain between two Whittaker pairs.
    Chain(ChainArgs),
    /// Critical numbers of S + tZ for diagonal S and Z.
    Critical {
        #[arg(long, value_parser = parse_rationals, allow_hyphen_values = true)]
        s: Rationals,
        #[arg(long, value_parser = parse_rationals, allow_hyphen_values = true)]
        z: Rationals,
    },
    /// Degeneration witness for mu <= lam, or the two-block case.
    Glmain {
        #[arg(long, value_parser = parse_parts, requires = "mu", conflicts_with = "two_blocks")]
        lam: Option<Parts>,
        #[arg(long, value_parser = parse_parts, requires = "lam")]
        mu: Option<Parts>,
        /// p,q,r for the two-block lemma.
        #[arg(long, value_parser = parse_parts, required_unless_present = "lam")]
        two_blocks: Option<Parts>,
    },
    /// Deligne filtration of a nilpotent e, optionally refined by a diagonal Z.
    Deligne {
        #[command(flatten)]
        e: ElementArgs,
        /// Single step k; all nonzero steps when omitted.
        #[arg(long, allow_hyphen_values = true)]
        k: Option<i64>,
        /// Diagonal entries of Z; requires --t.
        #[arg(long, value_parser = parse_rationals, allow_hyphen_values = true, requires = "t", conflicts_with = "k")]
        z: Option<Rationals>,
        #[arg(long, allow_hyphen_values = true, requires = "z")]
        t: Option<String>,
    },
    /// Heisenberg quotient attached to a nilpotent e.
    Heisenberg {
        #[command(flatten)]
        e: ElementArgs,
        #[arg(long, value_parser = parse_rationals, allow_hyphen_values = true)]
        z: Option<Rationals>,
    },
    /// Principal Whittaker pair dominating (S, f).
    Principal {
        /// Diagonal of S.
        #[arg(long, value_parser = parse_rationals, allow_hyphen_values = true)]
        s: Rationals,
        /// f as a JSON file or inline JSON.
        #[arg(long)]
        f: String,
    },
    /// Mirabolic suite and final-stage shape for a composition.
    Mirabolic {
        #[arg(long, value_parser = parse_parts)]
        eta: Parts,
    },
    /// Re-run the worked examples; exits 1 on any mismatch.
    VerifyPaperExamples,
}

#[derive(Args, Debug)]
struct ChainArgs {
    /// Built-in example.
    #[arg(long, value_parser = ["glsame", "glsmall"], conflicts_with = "input", required_unless_present = "input")]
    example: Option<String>,
    /// JSON object with keys S, f, S_tilde, f_tilde and optional f_prime.
    #[arg(long)]
    input: Option<String>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct ElementArgs {
    /// e as a JSON file or inline JSON.
    #[arg(long)]
    e: Option<String>,
    /// Use the upper-triangular Jordan matrix of this partition.
    #[arg(long, value_parser = parse_parts)]
    lam: Option<Parts>,
}

enum Failure {
    Usage(String),
    Domain(Error),
    Mismatch(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Usage(e.0)
    }
}

type Outcome = Result<Value, Failure>;

fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

impl ElementArgs {
    fn element(&self) -> Result<QMatrix, Failure> {
        match (&self.e, &self.lam) {
            (Some(path), _) => Ok(input::load_matrix(path)?),
            (None, Some(lam)) => {
                let lam = Partition::new(lam.0.clone())?;
                Ok(jordan_matrix(&lam.as_composition()).transpose())
            }
            (None, None) => Err(Failure::Usage("one of --e or --lam is required".into())),
        }
    }
}

fn chain(args: &ChainArgs) -> Outcome {
    let input = match (&args.example, &args.input) {
        (Some(name), _) if name == "glsame" => gl_same_example(),
        (Some(_), _) => gl_small_example(),
        (None, Some(path)) => {
            let obj = input::load_json(path)?;
            let pair = WhittakerPair::new(input::required_matrix(&obj, "S")?, input::required_matrix(&obj, "f")?)?;
            let tilde =
                WhittakerPair::new(input::required_matrix(&obj, "S_tilde")?, input::required_matrix(&obj, "f_tilde")?)?;
            ChainInput { pair, tilde, f_prime: input::field_matrix(&obj, "f_prime")? }
        }
        (None, None) => return Err(Failure::Usage("one of --example or --input is required".into())),
    };
    Ok(to_json(&input.build()?))
}

fn glmain_cmd(lam: &Option<Parts>, mu: &Option<Parts>, two: &Option<Parts>) -> Outcome {
    let witness = match (lam, mu, two) {
        (Some(lam), Some(mu), _) => glmain::construct(&Partition::new(lam.0.clone())?, &Partition::new(mu.0.clone())?)?,
        (_, _, Some(pqr)) => match pqr.0[..] {
            [p, q, r] => glmain::two_blocks(p, q, r)?,
            _ => return Err(Failure::Usage("--two-blocks takes exactly three integers p,q,r".into())),
        },
        _ => return Err(Failure::Usage("give --lam and --mu, or --two-blocks".into())),
    };
    let mut v = to_json(&witness);
    v["conjugators"] = to_json(&witness.conjugators());
    Ok(v)
}

fn deligne_cmd(e: &QMatrix, k: Option<i64>, z: &Option<Rationals>, t: &Option<String>) -> Outcome {
    if let (Some(z), Some(t)) = (z, t) {
        let t = whittaker_core::parse_rational(t).map_err(|e| Failure::Usage(e.to_string()))?;
        let space = deligne_ez_filtration(e, &QMatrix::diag(&z.0), &t)?;
        return Ok(json!({ "t": t.to_string(), "space": to_json(&space) }));
    }
    let d = Deligne::new(e)?;
    if let Some(k) = k {
        return Ok(json!({ "k": k, "space": to_json(&d.step(k)) }));
    }
    // g_{>= k} for k from the top nonzero step down to the first full one
    let bound = 2 * e.rows() as i64;
    let full = e.rows() * e.rows();
    let mut steps = Vec::new();
    for k in (-bound..=bound).rev() {
        let space = d.step(k);
        if space.is_zero() {
            continue;
        }
        let dim = space.dim();
        steps.push(json!({ "k": k, "dim": dim, "space": to_json(&space) }));
        if dim == full {
            break;
        }
    }
    Ok(json!({ "steps": steps }))
}

fn report_json(r: &SuiteReport) -> Value {
    let mut v = to_json(r);
    v["ok"] = json!(r.ok());
    v
}

fn verify_examples() -> Outcome {
    let reports =
        [suites::same_functional_example(), suites::different_functional_example(), suites::levi_remark()];
    let ok = reports.iter().all(SuiteReport::ok);
    let v = json!({ "ok": ok, "examples": reports.iter().map(report_json).collect::<Vec<_>>() });
    if ok {
        Ok(v)
    } else {
        Err(Failure::Mismatch(v))
    }
}

fn execute(cmd: &Command) -> Outcome {
    match cmd {
        Command::OrbitOrder { mu, lam } => {
            let leq = dominance_leq(&Partition::new(mu.0.clone())?, &Partition::new(lam.0.clone())?)?;
            Ok(json!({ "leq": leq }))
        }
        Command::JordanType { matrix } => {
            let p = jordan_type(&input::load_matrix(matrix)?)?;
            Ok(json!({ "partition": p.parts() }))
        }
        Command::Chain(args) => chain(args),
        Command::Critical { s, z } => {
            let (s, z) = (&s.0, &z.0);
            if s.len() != z.len() {
                return Err(Error::DimensionMismatch(format!("S has {} entries and Z has {}", s.len(), z.len())).into());
            }
            let crit: Vec<String> = critical_numbers(s, z).iter().map(|c| c.to_string()).collect();
            Ok(json!({ "critical": crit }))
        }
        Command::Glmain { lam, mu, two_blocks } => glmain_cmd(lam, mu, two_blocks),
        Command::Deligne { e, k, z, t } => deligne_cmd(&e.element()?, *k, z, t),
        Command::Heisenberg { e, z } => {
            let z = z.as_ref().map(|z| QMatrix::diag(&z.0));
            let data = heisenberg_data(&e.element()?, z.as_ref())?;
            let mut v = to_json(&data);
            v["all_checks_pass"] = json!(data.all_checks_pass());
            Ok(v)
        }
        Command::Principal { s, f } => {
            let pair = WhittakerPair::new(QMatrix::diag(&s.0), input::load_matrix(f)?)?;
            let dom = principal_dominator(&pair)?;
            let mut v = to_json(&dom);
            v["all_pass"] = json!(dom.all_pass());
            Ok(v)
        }
        Command::Mirabolic { eta } => {
            let eta = Composition::new(eta.0.clone())?;
            let report = mirabolic::verify_suite(&eta)?;
            let last = mirabolic::final_stage_shape(&eta)?;
            Ok(json!({
                "all_pass": report.all_pass(),
                "failures": report.failures(),
                "report": to_json(&report),
                "final_stage": to_json(&last),
            }))
        }
        Command::VerifyPaperExamples => verify_examples(),
    }
}

fn emit(v: &Value, output: &Option<PathBuf>) -> Result<(), String> {
    let mut text = serde_json::to_string_pretty(v).expect("serializable");
    text.push('\n');
    match output {
        Some(path) => fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn sweep(n: usize) -> ExitCode {
    let reports = suites::run_all_up_to(n);
    let w = reports.iter().map(|r| r.name.len()).max().unwrap_or(5);
    println!("{:>9}  {:<w$} {:>7} {:>7} {:>9}  status", "criterion", "suite", "passed", "cases", "ms");
    for r in &reports {
        println!(
            "{:>9}  {:<w$} {:>7} {:>7} {:>9}  {}",
            r.criterion,
            r.name,
            r.passed,
            r.cases,
            r.elapsed_ms,
            if r.ok() { "PASS" } else { "FAIL" }
        );
        for note in &r.notes {
            println!("{:>9}  note: {note}", "");
        }
    }
    let failed = reports.iter().filter(|r| !r.ok()).count();
    println!("{} of {} suites passed", reports.len() - failed, reports.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_MISMATCH)
    }
}

fn run(argv: impl IntoIterator<Item = std::ffi::OsString>) -> ExitCode {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.sweep {
        return sweep(n);
    }
    let Some(cmd) = &cli.command else {
        eprintln!("error: a subcommand or --sweep is required");
        return ExitCode::from(EXIT_USAGE);
    };
    let (value, code) = match execute(cmd) {
        Ok(v) => (v, ExitCode::SUCCESS),
        Err(Failure::Mismatch(v)) => (v, ExitCode::from(EXIT_MISMATCH)),
        Err(Failure::Domain(e)) => {
            (json!({ "error": { "kind": e.kind(), "message": e.to_string() } }), ExitCode::from(EXIT_DOMAIN))
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    if let Err(msg) = emit(&value, &cli.output) {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_USAGE);
    }
    code
}

fn main() -> ExitCode {
    run(std::env::args_os())
}
