//! Grammar-driven parsing: all structures a grammar assigns to a sentence.

mod brute;
pub mod licensing;
mod search;

use std::time::Duration;

use thiserror::Error;

use crate::grammar::Grammar;
use crate::logic::EvalError;
use crate::structure::DependencyStructure;

pub use brute::{brute_force_parse, BRUTE_FORCE_MAX_TOKENS};
pub use licensing::{check_structure, license, Failure, FailureKind, Forced};

/// Longest sentence the search accepts.
pub const MAX_TOKENS: usize = 64;

/// `None` means unlimited.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_structures: Option<usize>,
    pub max_steps: Option<u64>,
    pub timeout: Option<Duration>,
}

/// The head a token must get, used to parse against a fixed tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PinnedHead {
    Root,
    Word { head: usize, dep_type: String },
}

#[derive(Clone, Debug)]
pub struct ParseTask<'g> {
    pub grammar: &'g Grammar,
    pub tokens: Vec<String>,
    pub limits: SearchLimits,
    pub forced: Forced,
}

impl<'g> ParseTask<'g> {
    /// Splits `sentence` on whitespace.
    pub fn new(grammar: &'g Grammar, sentence: &str) -> Self {
        Self::from_tokens(grammar, sentence.split_whitespace().map(str::to_string).collect())
    }

    pub fn from_tokens(grammar: &'g Grammar, tokens: Vec<String>) -> Self {
        ParseTask {
            grammar,
            tokens,
            limits: SearchLimits::default(),
            forced: Forced::new(),
        }
    }

    pub fn with_limits(mut self, limits: SearchLimits) -> Self {
        self.limits = limits;
        self
    }

    /// Requires the word at `position` to carry `feature`.
    pub fn force(mut self, position: usize, feature: &str) -> Self {
        self.forced.entry(position).or_default().push(feature.to_string());
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParseStats {
    pub nodes: u64,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct ParseResult {
    /// Distinct structures in canonical order.
    pub structures: Vec<DependencyStructure>,
    /// False if a limit stopped the search early.
    pub exhausted: bool,
    pub stats: ParseStats,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("empty input")]
    EmptyInput,
    #[error("no lexical entry for token {position} \"{token}\"")]
    UnknownToken { position: usize, token: String },
    #[error("{len} tokens exceed the limit of {max}")]
    TooLong { len: usize, max: usize },
    #[error("forced feature on token {0}, which does not exist")]
    ForcedPosition(usize),
    #[error("bad pinned tree: {0}")]
    PinnedTree(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Halt {
    Limit,
    First,
    Error,
}

fn check_tokens(tokens: &[String], max: usize) -> Result<(), ParseError> {
    if tokens.is_empty() {
        return Err(ParseError::EmptyInput);
    }
    if tokens.len() > max {
        return Err(ParseError::TooLong { len: tokens.len(), max });
    }
    Ok(())
}

fn check_forced(task: &ParseTask) -> Result<(), ParseError> {
    match task.forced.keys().find(|&&p| p >= task.tokens.len()) {
        Some(&p) => Err(ParseError::ForcedPosition(p)),
        None => Ok(()),
    }
}

/// All structures for the task's sentence, up to its limits.
pub fn parse(task: &ParseTask) -> Result<ParseResult, ParseError> {
    check_forced(task)?;
    search::Search::new(task, None, false)?.run()
}

/// Like [`parse`], restricted to structures with the given heads.
pub fn parse_with_tree(task: &ParseTask, heads: &[PinnedHead]) -> Result<ParseResult, ParseError> {
    check_forced(task)?;
    search::Search::new(task, Some(heads), false)?.run()
}

/// Whether the sentence has a structure with the given heads.
pub fn recognize_with_tree(task: &ParseTask, heads: &[PinnedHead]) -> Result<bool, ParseError> {
    check_forced(task)?;
    Ok(!search::Search::new(task, Some(heads), true)?.run()?.structures.is_empty())
}

/// Whether the sentence has at least one structure. Limits other than the
/// structure count still apply; a search cut short by them counts as false.
pub fn recognize(task: &ParseTask) -> Result<bool, ParseError> {
    check_forced(task)?;
    Ok(!search::Search::new(task, None, true)?.run()?.structures.is_empty())
}

/// The heads of a structure, in the form [`parse_with_tree`] takes.
pub fn heads_of(s: &DependencyStructure) -> Vec<PinnedHead> {
    (0..s.len())
        .map(|w| match s.head(w) {
            None => PinnedHead::Root,
            Some((head, t)) => PinnedHead::Word {
                head,
                dep_type: t.to_string(),
            },
        })
        .collect()
}
