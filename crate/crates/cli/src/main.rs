//! `tccp`: batch front end for the tccp workbench.
//!
//! Exit status 0 means the check held, 1 that it failed with a reported
//! witness, 2 that the input could not be loaded or failed a static check.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use tccp::checker::{
    check_equivalence, check_proof, check_sat, parse_proof_script, prepare, CheckResult, EquivalenceReport, NodeStatus,
    ProofError, ProofReport,
};
use tccp::constraint::{
    check_cylindric_axioms, AxiomReport, CylindricSystem, HerbrandEqSystem, IdentityCylinder, Lattice, SingletonSystem,
};
use tccp::denotational::{sem_eval, Environment};
use tccp::logic::valid_bounded;
use tccp::operational::reactive_sequences;
use tccp::sequence::{export_json, export_text, SequenceSet};
use tccp::syntax::{parse_formula, parse_program, Program};

const LAWS: [(&str, &str); 4] = [
    (
        "entailment-antitone",
        "forall p. forall q. forall X. p <= q -> (X(q) -> X(p))",
    ),
    ("monotone-columns", "forall p. forall X. X(p) -> always X(p)"),
    ("input-below-output", "forall p. I(p) -> O(p)"),
    ("output-below-next-input", "forall p. O(p) -> next I(p)"),
];

#[derive(Parser)]
#[command(
    name = "tccp",
    version,
    about = "Check, trace and prove timed concurrent constraint programs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Length bound for sequences and models.
    #[arg(long, short = 'k', global = true, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    bound: u32,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    workers: Option<u32>,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check `main sat φ` over the lifted reactive sequences.
    Check {
        #[arg(long)]
        program: PathBuf,
        /// File holding the formula.
        #[arg(long)]
        formula: PathBuf,
    },
    /// Export the reactive sequences of `main`.
    Trace {
        #[arg(long)]
        program: PathBuf,
        /// Export the compositional semantics instead.
        #[arg(long, conflicts_with = "compare")]
        denotational: bool,
        /// Compare both semantics and report the symmetric difference.
        #[arg(long)]
        compare: bool,
    },
    /// Replay a proof script against a program.
    Prove {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        proof: PathBuf,
    },
    /// Check the cylindric axioms and the basic validity laws.
    Selftest {
        #[arg(long, value_enum, default_value_t = SystemKind::Herbrand)]
        system: SystemKind,
        /// Variables of the constraint system.
        #[arg(long, value_delimiter = ',', default_value = "x,y")]
        vars: Vec<String>,
        /// Constants of the constraint system.
        #[arg(long, value_delimiter = ',', default_value = "a")]
        consts: Vec<String>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SystemKind {
    Herbrand,
    /// The one-element system.
    Degenerate,
    /// Herbrand with identity cylindrification.
    Broken,
}

/// A failure that prevents the command from producing a verdict.
struct Fatal(String);

impl<E: std::fmt::Display> From<E> for Fatal {
    fn from(e: E) -> Self {
        Fatal(e.to_string())
    }
}

struct Outcome {
    ok: bool,
    text: String,
    json: Value,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let c = &cli.common;
    let workers = c
        .workers
        .map(|w| w as usize)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let k = c.bound as usize;
    let result = match &cli.command {
        Command::Check { program, formula } => cmd_check(program, formula, k, workers),
        Command::Trace {
            program,
            denotational,
            compare,
        } => cmd_trace(program, k, *denotational, *compare, c.format),
        Command::Prove { program, proof } => cmd_prove(program, proof, k, workers),
        Command::Selftest { system, vars, consts } => cmd_selftest(*system, vars, consts, k, workers),
    };
    match result {
        Ok(o) => {
            let body = match c.format {
                Format::Text => o.text,
                Format::Json => format!("{:#}\n", o.json),
            };
            if let Err(e) = emit(c.out.as_deref(), &body) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(if o.ok { 0 } else { 1 })
        }
        Err(Fatal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn emit(out: Option<&Path>, body: &str) -> std::io::Result<()> {
    match out {
        Some(p) => std::fs::write(p, body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String, Fatal> {
    std::fs::read_to_string(path).map_err(|e| Fatal(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Program, Fatal> {
    let prog = parse_program(&read(path)?).map_err(|e| Fatal(format!("{}: {e}", path.display())))?;
    prepare(&prog)?;
    Ok(prog)
}

fn cmd_check(program: &Path, formula: &Path, k: usize, workers: usize) -> Result<Outcome, Fatal> {
    let prog = load(program)?;
    let src = read(formula)?;
    let phi = parse_formula(prog.lat(), src.trim()).map_err(|e| Fatal(format!("{}: {e}", formula.display())))?;
    let r = check_sat(&prog, &prog.main, &phi, k, workers)?;
    let lat = prog.lat();
    let mut text = String::new();
    let claim = format!("main sat {}", phi.display(lat));
    writeln!(
        text,
        "{}: {claim} (k={k}, {} sequences, {} models examined)",
        if r.is_valid() { "valid" } else { "refuted" },
        r.sequences,
        r.examined
    )
    .unwrap();
    text.push_str(&counterexample_text(lat, &r));
    Ok(Outcome {
        ok: r.is_valid(),
        json: json!({
            "claim": claim,
            "valid": r.is_valid(),
            "bound": k,
            "sequences": r.sequences,
            "examined": r.examined,
            "counterexample": counterexample_json(lat, &r),
        }),
        text,
    })
}

fn counterexample_text(lat: &Lattice, r: &CheckResult) -> String {
    let Some(cx) = &r.counterexample else {
        return String::new();
    };
    let mut s = format!("sequence: {}\n", cx.sequence.display(lat));
    if !cx.gamma.is_empty() {
        let g: Vec<String> = cx
            .gamma
            .iter()
            .map(|(p, c)| format!("{p} = {}", lat.show(*c)))
            .collect();
        writeln!(s, "assignment: {}", g.join(", ")).unwrap();
    }
    write!(s, "{}", cx.model.table(lat)).unwrap();
    s
}

fn counterexample_json(lat: &Lattice, r: &CheckResult) -> Value {
    match &r.counterexample {
        None => Value::Null,
        Some(cx) => json!({
            "sequence": cx.sequence.to_record(lat),
            "gamma": cx.gamma.iter().map(|(p, c)| (p.clone(), json!(lat.name(*c)))).collect::<serde_json::Map<_, _>>(),
            "columns": cx.model.preds,
            "rows": cx.model.steps.iter().map(|row| row.iter().map(|c| lat.name(*c)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        }),
    }
}

fn cmd_trace(program: &Path, k: usize, denotational: bool, compare: bool, format: Format) -> Result<Outcome, Fatal> {
    let prog = prepare(&load(program)?)?;
    let lat = prog.lat();
    if compare {
        let r = check_equivalence(&prog, k)?;
        return Ok(compare_outcome(lat, &r));
    }
    let seqs: SequenceSet = if denotational {
        sem_eval(&prog, &Environment::new(), k)?
    } else {
        reactive_sequences(&prog, k)?
    };
    let json = serde_json::to_value(export_json(lat, &seqs))?;
    Ok(Outcome {
        ok: true,
        text: match format {
            Format::Text => export_text(lat, &seqs),
            Format::Json => String::new(),
        },
        json,
    })
}

fn compare_outcome(lat: &Lattice, r: &EquivalenceReport) -> Outcome {
    let mut text = format!(
        "{}: {} operational, {} denotational sequences (k={})\n",
        if r.passed() { "agree" } else { "differ" },
        r.operational,
        r.denotational,
        r.bound
    );
    let side = |name: &str, ds: &[tccp::checker::Discrepancy], text: &mut String| -> Vec<Value> {
        ds.iter()
            .map(|d| {
                writeln!(text, "{name} only: {} ({:?})", d.sequence.display(lat), d.kind).unwrap();
                json!({ "sequence": d.sequence.to_record(lat), "kind": format!("{:?}", d.kind) })
            })
            .collect()
    };
    let op = side("operational", &r.only_operational, &mut text);
    let den = side("denotational", &r.only_denotational, &mut text);
    Outcome {
        ok: r.passed(),
        json: json!({
            "agree": r.passed(),
            "bound": r.bound,
            "operational": r.operational,
            "denotational": r.denotational,
            "only_operational": op,
            "only_denotational": den,
        }),
        text,
    }
}

fn cmd_prove(program: &Path, proof: &Path, k: usize, workers: usize) -> Result<Outcome, Fatal> {
    let prog = load(program)?;
    let tree = parse_proof_script(prog.lat(), &read(proof)?).map_err(|e| Fatal(format!("{}: {e}", proof.display())))?;
    let report = match check_proof(&prog, &tree, k, workers) {
        Ok(r) => r,
        Err(e @ (ProofError::Check(_) | ProofError::Logic(_))) => return Err(e.into()),
        Err(e) => return Err(Fatal(format!("{}: {e}", proof.display()))),
    };
    Ok(proof_outcome(prog.lat(), &report))
}

fn proof_outcome(lat: &Lattice, r: &ProofReport) -> Outcome {
    let mut text = String::new();
    let mut nodes = Vec::new();
    for n in &r.nodes {
        let (status, reason) = match &n.status {
            NodeStatus::Accepted => ("ok", None),
            NodeStatus::Rejected(why) => ("rejected", Some(why.as_str())),
        };
        let concl = n
            .conclusion
            .as_ref()
            .map(|(a, f)| format!("{} sat {}", a.display(lat), f.display(lat)));
        write!(text, "{:<10} {:<8} {status}", n.id, n.rule.to_string()).unwrap();
        if n.bounded_oracle {
            text.push_str(" [bounded-oracle]");
        }
        if let Some(why) = reason {
            write!(text, ": {why}").unwrap();
        } else if let Some(c) = &concl {
            write!(text, ": {c}").unwrap();
        }
        text.push('\n');
        nodes.push(json!({
            "id": n.id,
            "rule": n.rule.to_string(),
            "status": status,
            "reason": reason,
            "bounded_oracle": n.bounded_oracle,
            "conclusion": concl,
        }));
    }
    if let Some(e) = &r.root_error {
        writeln!(text, "root: {e}").unwrap();
    }
    if let Some(check) = &r.root_check {
        writeln!(
            text,
            "root check (k={}): {}",
            r.bound,
            if check.is_valid() { "valid" } else { "refuted" }
        )
        .unwrap();
        text.push_str(&counterexample_text(lat, check));
    }
    writeln!(text, "{}", if r.passed() { "proof accepted" } else { "proof rejected" }).unwrap();
    Outcome {
        ok: r.passed(),
        json: json!({
            "accepted": r.accepted,
            "passed": r.passed(),
            "bound": r.bound,
            "nodes": nodes,
            "root_error": r.root_error,
            "root_valid": r.root_check.as_ref().map(CheckResult::is_valid),
            "counterexample": r.root_check.as_ref().map_or(Value::Null, |c| counterexample_json(lat, c)),
        }),
        text,
    }
}

fn cmd_selftest(
    system: SystemKind,
    vars: &[String],
    consts: &[String],
    k: usize,
    workers: usize,
) -> Result<Outcome, Fatal> {
    match system {
        SystemKind::Herbrand => selftest(&HerbrandEqSystem::new(vars, consts), k, workers),
        SystemKind::Degenerate => selftest(&SingletonSystem::new(vars), k, workers),
        SystemKind::Broken => selftest(&IdentityCylinder(HerbrandEqSystem::new(vars, consts)), k, workers),
    }
}

fn selftest<S: CylindricSystem>(sys: &S, k: usize, workers: usize) -> Result<Outcome, Fatal> {
    let axioms: AxiomReport = check_cylindric_axioms(sys)?;
    let lat = Lattice::from_system(sys)?;
    let mut text = format!(
        "constraint system: {} elements, {} axiom instances{}\n",
        axioms.elements,
        axioms.instances_checked,
        if axioms.diagonals_checked {
            ""
        } else {
            " (no diagonals)"
        }
    );
    let mut ok = axioms.passed();
    let mut axiom_rows = Vec::new();
    for v in &axioms.violations {
        writeln!(text, "  violates {}: {}", v.axiom, v.instance).unwrap();
        axiom_rows.push(json!({ "axiom": v.axiom.to_string(), "instance": v.instance }));
    }
    writeln!(text, "{:<26} {}", "cylindric axioms", verdict(axioms.passed())).unwrap();
    let mut laws = Vec::new();
    for (name, src) in LAWS {
        let phi = parse_formula(&lat, src)?;
        let v = valid_bounded(&lat, &phi, k, workers)?;
        ok &= v.is_valid();
        writeln!(
            text,
            "{name:<26} {} ({} models, k={k})",
            verdict(v.is_valid()),
            v.checked
        )
        .unwrap();
        if let Some(cx) = &v.counterexample {
            write!(text, "{}", cx.model.table(&lat)).unwrap();
        }
        laws.push(json!({ "law": name, "formula": src, "valid": v.is_valid(), "models": v.checked }));
    }
    Ok(Outcome {
        ok,
        json: json!({
            "elements": axioms.elements,
            "instances_checked": axioms.instances_checked,
            "diagonals_checked": axioms.diagonals_checked,
            "axioms_pass": axioms.passed(),
            "violations": axiom_rows,
            "laws": laws,
            "bound": k,
        }),
        text,
    })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}
