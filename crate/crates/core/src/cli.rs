//! The `crashlens` command line: argument parsing and the four commands.
//!
//! `run` writes to caller-supplied streams and returns the exit code, so the
//! whole front end is testable in-process.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::infer::{infer, Typing};
use crate::semantics::{evaluate, EvalOutcome, DEFAULT_FUEL};
use crate::solver::{find_crashing_inputs, verdict_of, Verdict, DEFAULT_K};
use crate::syntax::{parse_program, print_expr, CtorName, Expr, ParseError, Program};
use crate::testkit::{run_property, with_big_stack, CheckOptions, GenConfig, Property};
use crate::types::{erase_guards, erase_guards_cc, render_cc, render_type, Type, TypeEnv};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DEFINITE_ERROR: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_RUNTIME_ERROR: i32 = 3;
pub const EXIT_FUEL: i32 = 4;
pub const EXIT_PROPERTY: i32 = 5;

pub const DEFAULT_WITNESS_DEPTH: usize = 3;

/// Human output lists this many witnesses; JSON lists all of them.
const SHOWN_WITNESSES: usize = 8;

#[derive(Parser, Debug)]
#[command(
    name = "crashlens",
    version,
    about = "Find definite crashes in constructor-language programs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the type, crash condition, verdict and crashing inputs of every
    /// definition and of `main`.
    Analyze {
        /// Source files, reported in the order given.
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        budget: Budget,
        /// Emit one JSON array of per-file reports.
        #[arg(long)]
        json: bool,
        /// Height of the ground inputs tried as witnesses.
        #[arg(long, default_value_t = DEFAULT_WITNESS_DEPTH)]
        witness_depth: usize,
    },
    /// Run `main` and print its value.
    Eval {
        file: PathBuf,
        /// Maximum number of reduction steps.
        #[arg(long, default_value_t = DEFAULT_FUEL, value_parser = clap::value_parser!(u64).range(1..))]
        fuel: u64,
    },
    /// Exit with status 1 if any program definitely crashes or diverges.
    Check {
        /// Source files; `main` is checked when present, otherwise every definition.
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        budget: Budget,
    },
    /// Run the randomized property suites.
    Fuzz {
        /// Cases per property.
        #[arg(long, default_value_t = 1000)]
        cases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Evaluation fuel for properties that run programs.
        #[arg(long, default_value_t = DEFAULT_FUEL, value_parser = clap::value_parser!(u64).range(1..))]
        fuel: u64,
        #[command(flatten)]
        budget: Budget,
        /// Run only this property.
        #[arg(long)]
        property: Option<Property>,
        /// Where shrunk counterexamples are written.
        #[arg(long, default_value = "crashlens-failures")]
        out: PathBuf,
    },
}

#[derive(Args, Debug, Clone, Copy)]
pub struct Budget {
    /// Unfolding budget for the solver.
    #[arg(short = 'k', env = "CRASHLENS_K", default_value_t = DEFAULT_K)]
    pub k: u32,
}

/// One analyzed definition, as printed by `analyze --json`.
#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct DefReport {
    pub def: String,
    #[serde(rename = "type")]
    pub ty: String,
    pub crash_condition: String,
    pub verdict: String,
    pub k: u32,
    pub witnesses: Vec<String>,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct FileReport {
    pub file: String,
    pub definitions: Vec<DefReport>,
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Analyze {
            files,
            budget,
            json,
            witness_depth,
        } => analyze(&files, budget.k, json, witness_depth, out, err),
        Command::Eval { file, fuel } => eval(&file, fuel, out, err),
        Command::Check { files, budget } => check(&files, budget.k, out, err),
        Command::Fuzz {
            cases,
            seed,
            fuel,
            budget,
            property,
            out: dir,
        } => fuzz(cases, seed, fuel, budget.k, property, &dir, out, err),
    };
    result.unwrap_or_else(|e| {
        let _ = writeln!(err, "crashlens: {e}");
        EXIT_PARSE
    })
}

/// A file that failed to load, rendered as `file:line:col: message`.
struct LoadError(String);

fn load(path: &Path) -> Result<Program, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|e| LoadError(format!("{}: {e}", path.display())))?;
    parse_program(&text).map_err(|e: ParseError| LoadError(format!("{}:{e}", path.display())))
}

/// Loads every file in parallel, keeping input order.
fn load_all(files: &[PathBuf]) -> Vec<Result<Program, LoadError>> {
    std::thread::scope(|s| {
        let handles: Vec<_> = files.iter().map(|f| s.spawn(move || load(f))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("loader panicked"))
            .collect()
    })
}

/// Runs `f` on every item in parallel on large stacks; results keep input
/// order.
fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let f = &f;
    std::thread::scope(|s| {
        let handles: Vec<_> = items
            .iter()
            .map(|item| {
                std::thread::Builder::new()
                    .stack_size(crate::testkit::WORKER_STACK)
                    .spawn_scoped(s, move || f(item))
                    .expect("spawn")
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

/// Definitions first, in source order, then `main` with everything inlined.
fn targets(p: &Program) -> Vec<(String, Expr)> {
    let mut out = p.inlined_defs();
    if let Some(main) = p.inlined_main() {
        out.push(("main".to_string(), main));
    }
    out
}

fn analyze_expr(name: &str, e: &Expr, alphabet: &[CtorName], k: u32, witness_depth: usize) -> DefReport {
    let Typing { ty, crash } = infer(&TypeEnv::new(), e).expect("inlined definitions are closed");
    let verdict = verdict_of(&crash, k);
    let witnesses = match &ty {
        Type::Fun(_) if witness_depth > 0 => find_crashing_inputs(&ty, alphabet, witness_depth, k)
            .iter()
            .map(render_type)
            .collect(),
        _ => Vec::new(),
    };
    DefReport {
        def: name.to_string(),
        ty: render_type(&erase_guards(&ty)),
        crash_condition: render_cc(&erase_guards_cc(&crash)),
        verdict: verdict.label().to_string(),
        k,
        witnesses,
    }
}

fn verdict_label(v: &Verdict) -> String {
    match v {
        Verdict::DefiniteCrashOrDiverge { .. } => v.label().to_string(),
        Verdict::NoCrashAtBound(k) | Verdict::Unknown(k) => format!("{}({k})", v.label()),
    }
}

pub fn analyze_program(file: &str, p: &Program, k: u32, witness_depth: usize) -> FileReport {
    let alphabet = p.alphabet.ctors();
    let definitions = targets(p)
        .iter()
        .map(|(name, e)| analyze_expr(name, e, &alphabet, k, witness_depth))
        .collect();
    FileReport {
        file: file.to_string(),
        definitions,
    }
}

fn analyze(
    files: &[PathBuf],
    k: u32,
    json: bool,
    witness_depth: usize,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::io::Result<i32> {
    let loaded = load_all(files);
    let jobs: Vec<(String, &Program)> = files
        .iter()
        .zip(&loaded)
        .filter_map(|(f, p)| p.as_ref().ok().map(|p| (f.display().to_string(), p)))
        .collect();
    let reports = par_map(&jobs, |(name, p)| analyze_program(name, p, k, witness_depth));
    let mut code = EXIT_OK;
    for r in &loaded {
        if let Err(LoadError(msg)) = r {
            writeln!(err, "{msg}")?;
            code = EXIT_PARSE;
        }
    }
    if json {
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&reports).expect("reports serialize")
        )?;
        return Ok(code);
    }
    for report in &reports {
        writeln!(out, "== {}", report.file)?;
        for d in &report.definitions {
            writeln!(out, "{} : {}", d.def, d.ty)?;
            writeln!(out, "  crash:   {}", d.crash_condition)?;
            if d.verdict == "crash" {
                writeln!(out, "  verdict: crash")?;
            } else {
                writeln!(out, "  verdict: {}({})", d.verdict, d.k)?;
            }
            if !d.witnesses.is_empty() {
                let shown = &d.witnesses[..d.witnesses.len().min(SHOWN_WITNESSES)];
                let more = d.witnesses.len() - shown.len();
                let tail = if more > 0 {
                    format!(" (+{more} more)")
                } else {
                    String::new()
                };
                writeln!(out, "  crashes on: {}{tail}", shown.join(", "))?;
            }
        }
    }
    Ok(code)
}

fn eval(file: &Path, fuel: u64, out: &mut dyn Write, err: &mut dyn Write) -> std::io::Result<i32> {
    let p = match load(file) {
        Ok(p) => p,
        Err(LoadError(msg)) => {
            writeln!(err, "{msg}")?;
            return Ok(EXIT_PARSE);
        }
    };
    let Some(main) = p.inlined_main() else {
        writeln!(err, "{}: no main expression", file.display())?;
        return Ok(EXIT_PARSE);
    };
    match with_big_stack(|| evaluate(&main, fuel)) {
        EvalOutcome::Value(v) => {
            writeln!(out, "{}", print_expr(&v))?;
            Ok(EXIT_OK)
        }
        EvalOutcome::Error => {
            writeln!(out, "err")?;
            Ok(EXIT_RUNTIME_ERROR)
        }
        EvalOutcome::FuelExhausted { steps, .. } => {
            writeln!(out, "fuel exhausted after {steps} steps")?;
            Ok(EXIT_FUEL)
        }
    }
}

/// `main` decides the outcome when present; a file without one is checked
/// definition by definition.
fn check(files: &[PathBuf], k: u32, out: &mut dyn Write, err: &mut dyn Write) -> std::io::Result<i32> {
    let loaded = load_all(files);
    let mut parse_failed = false;
    let mut crashed = false;
    for (file, p) in files.iter().zip(&loaded) {
        let p = match p {
            Ok(p) => p,
            Err(LoadError(msg)) => {
                writeln!(err, "{msg}")?;
                parse_failed = true;
                continue;
            }
        };
        let mut checked = targets(p);
        if p.main.is_some() {
            checked.retain(|(name, _)| name == "main");
        }
        let verdicts = par_map(&checked, |(name, e)| {
            let t = infer(&TypeEnv::new(), e).expect("inlined definitions are closed");
            (name.clone(), verdict_of(&t.crash, k), t.crash)
        });
        for (name, verdict, crash) in verdicts {
            if verdict.is_crash() {
                crashed = true;
                writeln!(
                    out,
                    "{}: {name}: definite error: {}",
                    file.display(),
                    render_cc(&erase_guards_cc(&crash))
                )?;
            } else {
                writeln!(out, "{}: {name}: {}", file.display(), verdict_label(&verdict))?;
            }
        }
    }
    Ok(if parse_failed {
        EXIT_PARSE
    } else if crashed {
        EXIT_DEFINITE_ERROR
    } else {
        EXIT_OK
    })
}

#[allow(clippy::too_many_arguments)]
fn fuzz(
    cases: usize,
    seed: u64,
    fuel: u64,
    k: u32,
    property: Option<Property>,
    dir: &Path,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::io::Result<i32> {
    let cfg = GenConfig {
        seed,
        ..GenConfig::default()
    };
    let opts = CheckOptions {
        fuel,
        k,
        ..CheckOptions::default()
    };
    let chosen: Vec<Property> = property.map_or_else(|| Property::ALL.to_vec(), |p| vec![p]);
    let mut failed = false;
    for p in chosen {
        let report = run_property(p, &cfg, cases, &opts);
        writeln!(
            out,
            "{}: {} cases, {} failures",
            p.name(),
            report.cases,
            report.failures.len()
        )?;
        if report.failures.is_empty() {
            continue;
        }
        failed = true;
        std::fs::create_dir_all(dir)?;
        for f in &report.failures {
            let path = dir.join(format!("{}-{}-{}.lc", p.name(), f.seed, f.case));
            let body = format!(
                "-- {} failure, seed {} case {}\n-- expected: {}\n-- actual: {}\n{}\n",
                p.name(),
                f.seed,
                f.case,
                one_line(&f.expected),
                one_line(&f.actual),
                print_expr(&closed_repro(&f.shrunk))
            );
            std::fs::write(&path, body)?;
            writeln!(err, "  wrote {}", path.display())?;
        }
    }
    Ok(if failed { EXIT_PROPERTY } else { EXIT_OK })
}

/// Open counterexamples become functions of their free variable so the repro
/// file parses on its own.
fn closed_repro(e: &Expr) -> Expr {
    e.free_vars()
        .into_iter()
        .fold(e.clone(), |body, x| Expr::rec("repro", &x, body))
}

fn one_line(s: &str) -> String {
    s.replace('\n', " ")
}
