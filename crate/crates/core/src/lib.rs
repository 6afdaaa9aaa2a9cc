//! Dependency grammar with word order domains.
//!
//! A [`structure::DependencyStructure`] pairs a dependency tree with a nested
//! structure of order domains. [`logic`] evaluates modal constraints on such
//! structures, [`grammar`] holds lexicalized grammars written in those
//! constraints, and [`parser`] and [`linearizer`] search for the structures
//! and word orders a grammar allows.

pub mod cli;
pub mod dot;
pub mod format;
pub mod grammar;
pub mod linearizer;
pub mod logic;
pub mod parser;
pub mod sexpr;
pub mod structure;

pub use format::{read_structure, write_structure};
pub use grammar::{load_grammar, Grammar};
pub use logic::{satisfies, Formula};
pub use parser::{brute_force_parse, parse, recognize, ParseResult, ParseTask, SearchLimits};
pub use structure::{DependencyStructure, DomainId, Word};
