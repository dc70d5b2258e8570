use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use closure_core::corpus::{verify_corpus, CorpusReport, Status};
use closure_core::error::Error;
use closure_core::facttree::{build_tree, extract_stable_factor, validate_tree_with, StabilityRule};
use closure_core::instance::{dump_automaton, oracle_for, run_pipeline, InstanceFile, Report, RunOptions, Which};
use closure_core::lang::theta;

#[derive(Parser)]
#[command(name = "closure", version, about = "Degree-bounded vanishing ideals of matrix images of one-counter languages")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and cross-check it against the enumeration oracle.
    Run {
        /// Instance JSON file.
        file: PathBuf,
        /// Weight threshold to use instead of the default 2^(d(d+3))+1.
        #[arg(long)]
        eta_override: Option<u64>,
        /// Length bound for the oracle cross-check.
        #[arg(long)]
        oracle_max_len: Option<usize>,
        /// Skip the oracle cross-check.
        #[arg(long)]
        no_oracle: bool,
        /// Human-readable output instead of JSON.
        #[arg(long)]
        text: bool,
    },
    /// Run every entry of a corpus directory.
    VerifyCorpus {
        /// Corpus directory; defaults to $CLOSURE_CORPUS, then ./corpus.
        #[arg(long)]
        dir: Option<PathBuf>,
        /// Human-readable output instead of JSON.
        #[arg(long)]
        text: bool,
    },
    /// Factorization tree of the images of the instance's `word`.
    Tree {
        /// Instance JSON file.
        file: PathBuf,
        /// Also extract a stable factor of positive (+1) or negative (-1) weight.
        #[arg(long, allow_hyphen_values = true)]
        sign: Option<i32>,
        /// Human-readable output instead of JSON.
        #[arg(long)]
        text: bool,
    },
    /// Dump one of the counter automata built from the instance.
    Automaton {
        /// Instance JSON file.
        file: PathBuf,
        /// Which automaton to build.
        #[arg(long, value_enum)]
        which: WhichArg,
        /// Weight threshold to use instead of the default 2^(d(d+3))+1.
        #[arg(long)]
        eta_override: Option<u64>,
    },
    /// Vanishing space of the images of all words up to a length bound.
    Oracle {
        /// Instance JSON file.
        file: PathBuf,
        #[arg(long)]
        max_len: usize,
        /// Weight threshold to use instead of the default 2^(d(d+3))+1.
        #[arg(long)]
        eta_override: Option<u64>,
        /// Human-readable output instead of JSON.
        #[arg(long)]
        text: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichArg {
    Cover,
    Reach,
    Zero,
    Bz,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn load(path: &Path) -> Result<InstanceFile, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
    InstanceFile::from_json_value(value)
}

fn print_json(v: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn dispatch(command: Command) -> Result<u8, Error> {
    match command {
        Command::Run { file, eta_override, oracle_max_len, no_oracle, text } => {
            let instance = load(&file)?;
            let opts = RunOptions { eta_override, oracle_max_len, skip_oracle: no_oracle };
            let report = run_pipeline(&instance, &opts)?;
            if text {
                print!("{}", render_report(&report));
            } else {
                print_json(&report);
            }
            Ok(0)
        }
        Command::VerifyCorpus { dir, text } => {
            let dir = dir
                .or_else(|| std::env::var_os("CLOSURE_CORPUS").map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("corpus"));
            let report = verify_corpus(&dir)?;
            if text {
                print!("{}", render_corpus(&report));
            } else {
                print_json(&report);
            }
            Ok(if report.failures() > 0 { 1 } else { 0 })
        }
        Command::Tree { file, sign, text } => {
            let instance = load(&file)?;
            let problem = instance.validate(&RunOptions::default())?;
            let mp = &problem.letters;
            let letters = instance.word.as_ref().ok_or_else(|| Error::Schema("tree needs a `word` field".into()))?;
            let word = mp.parse_word(letters)?;
            let images: Vec<_> = word.iter().map(|&a| mp.phi(a).clone()).collect();
            let tree = build_tree(&images)?;
            let valid = validate_tree_with(&tree, &images, StabilityRule::NodeLabel);
            let factor = match sign {
                Some(s) => {
                    let (i, j) = extract_stable_factor(&word, mp, s)?;
                    Some(json!({ "span": [i, j], "letters": mp.render_word(&word[i..j]), "weight": mp.weight(&word[i..j]) }))
                }
                None => None,
            };
            if text {
                print!("{}", tree.render_text());
                println!("height {} (bound {}), valid: {}", tree.height(), theta(mp.dim()), valid.is_ok());
                if let Some(f) = factor {
                    println!("stable factor: {f}");
                }
            } else {
                print_json(&json!({
                    "length": word.len(),
                    "height": tree.height(),
                    "height_bound": theta(mp.dim()),
                    "nodes": tree.node_count(),
                    "valid": valid.is_ok(),
                    "validation_error": valid.err(),
                    "stable_factor": factor,
                    "tree": tree,
                }));
            }
            Ok(0)
        }
        Command::Automaton { file, which, eta_override } => {
            let instance = load(&file)?;
            let problem = instance.validate(&RunOptions { eta_override, ..RunOptions::default() })?;
            let which = match which {
                WhichArg::Cover => Which::Cover,
                WhichArg::Reach => Which::Reach,
                WhichArg::Zero => Which::Zero,
                WhichArg::Bz => Which::Bz,
            };
            print_json(&dump_automaton(&problem, which)?);
            Ok(0)
        }
        Command::Oracle { file, max_len, eta_override, text } => {
            let instance = load(&file)?;
            let problem = instance.validate(&RunOptions { eta_override, ..RunOptions::default() })?;
            let report = oracle_for(&problem, max_len)?;
            let generators = report.space.generators();
            if text {
                println!(
                    "oracle to length {} of {} ({} configurations), stabilized: {}",
                    report.achieved_len, report.requested_len, report.configurations, report.stabilized
                );
                for g in &generators {
                    println!("  {g}");
                }
            } else {
                print_json(&json!({
                    "mode": problem.mode,
                    "degree": problem.degree,
                    "max_len": report.requested_len,
                    "achieved_len": report.achieved_len,
                    "capped": report.capped,
                    "stabilized": report.stabilized,
                    "dims_by_len": report.dims_by_len,
                    "configurations": report.configurations,
                    "generators": generators,
                }));
            }
            Ok(0)
        }
    }
}

fn render_report(r: &Report) -> String {
    let mut out = format!(
        "mode {} at degree {} (d = {}, eta = {}{})\nmethod: {}\n",
        r.mode.name(),
        r.degree,
        r.dimension,
        r.eta_used,
        if r.eta_overridden { ", overridden" } else { "" },
        r.method
    );
    let n = r.generators.len();
    out.push_str(&format!("{n} generator{}:\n", if n == 1 { "" } else { "s" }));
    for g in &r.generators {
        out.push_str(&format!("  {g}\n"));
    }
    match (r.oracle_achieved_len, r.oracle_stabilized) {
        (Some(len), Some(st)) => out.push_str(&format!("oracle: consistent to length {len}, stabilized: {st}\n")),
        _ => out.push_str("oracle: not run\n"),
    }
    out.push_str(&format!("time: {} ms pipeline, {} ms oracle\n", r.timings.pipeline_ms, r.timings.oracle_ms));
    out
}

fn render_corpus(r: &CorpusReport) -> String {
    let mut out = String::new();
    for e in &r.entries {
        let tag = match e.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Discrepancy => "DISCREPANCY",
        };
        out.push_str(&format!("{tag:<12} {:<28} {:>7} ms  {}\n", e.name, e.elapsed_ms, e.detail));
    }
    out.push_str(&format!("{} entries, {} failures\n", r.entries.len(), r.failures()));
    out
}
