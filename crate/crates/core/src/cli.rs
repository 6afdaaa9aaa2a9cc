//! The `ordlog` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand};

use crate::dot::{to_dot, DotOptions};
use crate::format::{read_structure, write_structure};
use crate::grammar::{load_grammar, Grammar};
use crate::linearizer::{linearize, Tree};
use crate::parser::{check_structure, parse, Forced, ParseTask, SearchLimits};
use crate::structure::DependencyStructure;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO_PARSE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_TRUNCATED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ordlog", version, about = "Dependency grammar with word order domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a structure file for well-formedness and, given a grammar,
    /// for licensing.
    Check {
        structure: PathBuf,
        grammar: Option<PathBuf>,
    },
    /// Print every structure the grammar assigns to a sentence.
    Parse {
        grammar: PathBuf,
        sentence: String,
        /// Print only the number of structures.
        #[arg(long)]
        count_only: bool,
        /// Stop after N structures.
        #[arg(long, value_name = "N")]
        max: Option<usize>,
        /// Stop after MS milliseconds.
        #[arg(long, value_name = "MS")]
        timeout: Option<u64>,
        /// Stop after N search steps.
        #[arg(long, value_name = "N")]
        max_steps: Option<u64>,
        /// Require the word at position I (0-based) to carry FEAT.
        #[arg(long, value_name = "I:FEAT")]
        force: Vec<String>,
    },
    /// Print every word order in which the grammar allows the structure's
    /// dependency tree, one per line.
    Linearize { grammar: PathBuf, structure: PathBuf },
    /// Print a structure as a Graphviz digraph.
    ExportDot {
        structure: PathBuf,
        /// Also draw one-word domains of words without dependents.
        #[arg(long)]
        all_domains: bool,
    },
}

struct Failed(i32);

type Outcome = Result<i32, Failed>;

fn input_error(err: &mut dyn Write, what: &Path, msg: impl std::fmt::Display) -> Failed {
    let _ = writeln!(err, "{}: {}", what.display(), msg);
    Failed(EXIT_INPUT)
}

fn read_file(err: &mut dyn Write, path: &Path) -> Result<String, Failed> {
    std::fs::read_to_string(path).map_err(|e| input_error(err, path, e))
}

fn grammar_file(err: &mut dyn Write, path: &Path) -> Result<Grammar, Failed> {
    let text = read_file(err, path)?;
    load_grammar(&text).map_err(|e| input_error(err, path, e))
}

fn structure_file(err: &mut dyn Write, path: &Path) -> Result<DependencyStructure, Failed> {
    let text = read_file(err, path)?;
    read_structure(&text).map_err(|e| input_error(err, path, e))
}

/// Runs the command line `args` (program name first) and returns the exit
/// status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Check { structure, grammar } => check(&structure, grammar.as_deref(), out, err),
        Command::Parse {
            grammar,
            sentence,
            count_only,
            max,
            timeout,
            max_steps,
            force,
        } => {
            let limits = SearchLimits {
                max_structures: max,
                max_steps,
                timeout: timeout.map(Duration::from_millis),
            };
            parse_cmd(&grammar, &sentence, limits, &force, count_only, out, err)
        }
        Command::Linearize { grammar, structure } => linearize_cmd(&grammar, &structure, out, err),
        Command::ExportDot { structure, all_domains } => export_dot(&structure, all_domains, out, err),
    };
    match outcome {
        Ok(code) | Err(Failed(code)) => code,
    }
}

fn check(structure: &Path, grammar: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let s = structure_file(err, structure)?;
    let g = grammar.map(|p| grammar_file(err, p)).transpose()?;
    let violations = s.validate();
    for v in &violations {
        let _ = writeln!(out, "{v}");
    }
    if violations.is_empty() {
        if let Some(g) = g {
            let failures = check_structure(&g, &s, &Forced::new()).map_err(|e| input_error(err, structure, e))?;
            for f in &failures {
                match f.word {
                    Some(w) => writeln!(out, "word {w} ({}): {}", s.word(w).surface, f.message),
                    None => writeln!(out, "{f}"),
                }
                .ok();
            }
            if !failures.is_empty() {
                return Ok(EXIT_NO_PARSE);
            }
        }
        let _ = writeln!(out, "ok");
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_NO_PARSE)
    }
}

fn parse_force(spec: &str) -> Option<(usize, &str)> {
    let (i, feat) = spec.split_once(':')?;
    let feat = feat.trim();
    if feat.is_empty() {
        return None;
    }
    Some((i.trim().parse().ok()?, feat))
}

fn parse_cmd(
    grammar: &Path,
    sentence: &str,
    limits: SearchLimits,
    force: &[String],
    count_only: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let g = grammar_file(err, grammar)?;
    let mut task = ParseTask::new(&g, sentence).with_limits(limits);
    for spec in force {
        let Some((i, feat)) = parse_force(spec) else {
            let _ = writeln!(err, "--force expects POSITION:FEATURE, got '{spec}'");
            return Err(Failed(EXIT_INPUT));
        };
        task = task.force(i, feat);
    }
    let result = match parse(&task) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            return Err(Failed(EXIT_INPUT));
        }
    };
    if count_only {
        let _ = writeln!(out, "{}", result.structures.len());
    } else {
        for (i, s) in result.structures.iter().enumerate() {
            if i > 0 {
                let _ = writeln!(out);
            }
            let _ = out.write_all(write_structure(s).as_bytes());
        }
    }
    if !result.exhausted {
        let _ = writeln!(err, "search stopped at a limit; results are partial");
        Ok(EXIT_TRUNCATED)
    } else if result.structures.is_empty() {
        Ok(EXIT_NO_PARSE)
    } else {
        Ok(EXIT_OK)
    }
}

fn linearize_cmd(grammar: &Path, structure: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let g = grammar_file(err, grammar)?;
    let s = structure_file(err, structure)?;
    let orders = linearize(&g, &Tree::of_structure(&s)).map_err(|e| input_error(err, structure, e))?;
    for o in &orders {
        let _ = writeln!(out, "{}", o.join(" "));
    }
    Ok(if orders.is_empty() { EXIT_NO_PARSE } else { EXIT_OK })
}

fn export_dot(structure: &Path, all_domains: bool, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let s = structure_file(err, structure)?;
    let dot = to_dot(&s, DotOptions { all_domains }).map_err(|e| {
        for v in s.validate() {
            let _ = writeln!(err, "{v}");
        }
        input_error(err, structure, e)
    })?;
    let _ = out.write_all(dot.as_bytes());
    Ok(EXIT_OK)
}
