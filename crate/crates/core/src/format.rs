//! The structure file format.
//!
//! ```text
//! (structure
//!   (words ("Den" :class Det :feats (acc)) ...)
//!   (root 2)
//!   (edges (1 det 0) ...)
//!   (domains (0 1 (0)) ...))
//! ```
//!
//! Word ids are 0-based positions. Edges read `(head type dependent)`, domains
//! `(owner index (members...))`. A word owns as many domains as the highest
//! index listed for it; `:domains n` on a word overrides that. The writer
//! lists every domain, empty ones included.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::sexpr::{self, keyword_args, Pos, Sexp, SyntaxError};
use crate::structure::{DependencyEdge, DependencyStructure, DomainId, DomainNode, MalformedError, Word};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
    #[error("malformed structure: {0}")]
    Malformed(#[from] MalformedError),
}

fn err(pos: Pos, msg: impl Into<String>) -> FormatError {
    FormatError::Syntax(SyntaxError::new(pos, msg))
}

pub fn read_structure(text: &str) -> Result<DependencyStructure, FormatError> {
    let top = sexpr::parse_one(text)?;
    if top.head() != Some("structure") {
        return Err(err(top.pos(), "expected (structure ...)"));
    }
    let mut words = Vec::new();
    let mut explicit_counts = BTreeMap::new();
    let mut root = None;
    let mut edges = Vec::new();
    let mut domains = Vec::new();
    for section in &top.as_list().unwrap()[1..] {
        let items = section.expect_list("structure section")?;
        match section.head() {
            Some("words") => {
                for (i, w) in items[1..].iter().enumerate() {
                    let (word, count) = read_word(w)?;
                    if let Some(n) = count {
                        explicit_counts.insert(i, n);
                    }
                    words.push(word);
                }
            }
            Some("root") => {
                let r = items.get(1).ok_or_else(|| err(section.pos(), "(root <i>)"))?;
                root = Some(r.expect_usize("root word id")?);
            }
            Some("edges") => {
                for e in &items[1..] {
                    match e.expect_list("edge")? {
                        [h, t, d] => edges.push(DependencyEdge {
                            head: h.expect_usize("head id")?,
                            dep_type: t.expect_symbol("dependency type")?.to_string(),
                            dependent: d.expect_usize("dependent id")?,
                        }),
                        _ => return Err(err(e.pos(), "edge is (<head> <type> <dependent>)")),
                    }
                }
            }
            Some("domains") => {
                for d in &items[1..] {
                    match d.expect_list("domain")? {
                        [o, i, m] => domains.push(DomainNode {
                            id: DomainId::of(o.expect_usize("owner id")?, i.expect_usize("domain index")?),
                            members: m
                                .expect_list("member list")?
                                .iter()
                                .map(|x| x.expect_usize("member id"))
                                .collect::<Result<BTreeSet<_>, _>>()?,
                        }),
                        _ => return Err(err(d.pos(), "domain is (<owner> <index> (<member> ...))")),
                    }
                }
            }
            _ => return Err(err(section.pos(), "unknown structure section")),
        }
    }
    let root = root.ok_or_else(|| err(top.pos(), "missing (root ...)"))?;
    for (w, word) in words.iter_mut().enumerate() {
        word.domain_count = match explicit_counts.get(&w) {
            Some(&n) => n,
            None => domains
                .iter()
                .filter(|d| d.id.owner.word() == Some(w))
                .map(|d| d.id.index)
                .max()
                .unwrap_or(0),
        };
    }
    Ok(DependencyStructure::new(words, root, edges, domains)?)
}

fn read_word(e: &Sexp) -> Result<(Word, Option<usize>), FormatError> {
    let items = e.expect_list("word")?;
    let surface = match items.first() {
        Some(Sexp::Str(s, _)) => s.clone(),
        _ => return Err(err(e.pos(), "word is (\"<surface>\" :class <c> :feats (...))")),
    };
    let (pairs, rest) = keyword_args(&items[1..])?;
    if let Some(x) = rest.first() {
        return Err(err(x.pos(), "unexpected item in word"));
    }
    let mut class = None;
    let mut features = BTreeSet::new();
    let mut count = None;
    for (k, v) in pairs {
        match k {
            ":class" => class = Some(v.expect_symbol("word class")?.to_string()),
            ":feats" => {
                features = v
                    .expect_list("feature list")?
                    .iter()
                    .map(|f| f.expect_symbol("feature").map(str::to_string))
                    .collect::<Result<_, _>>()?
            }
            ":domains" => count = Some(v.expect_usize("domain count")?),
            _ => return Err(err(v.pos(), format!("unknown word keyword {k}"))),
        }
    }
    let class = class.ok_or_else(|| err(e.pos(), "word without :class"))?;
    Ok((
        Word {
            surface,
            class,
            features,
            domain_count: 0,
        },
        count,
    ))
}

pub fn write_structure(s: &DependencyStructure) -> String {
    let mut out = String::from("(structure\n  (words");
    for w in s.words() {
        let feats: Vec<_> = w.features.iter().map(String::as_str).collect();
        let _ = write!(
            out,
            "\n    ({} :class {} :feats ({}))",
            sexpr::quote(&w.surface),
            w.class,
            feats.join(" ")
        );
    }
    let _ = write!(out, ")\n  (root {})\n  (edges", s.root());
    for e in s.edges() {
        let _ = write!(out, "\n    ({} {} {})", e.head, e.dep_type, e.dependent);
    }
    out.push_str(")\n  (domains");
    for d in s.domains() {
        let members: Vec<_> = d.members.iter().map(usize::to_string).collect();
        let owner = d.id.owner.word().expect("word-owned");
        let _ = write!(out, "\n    ({} {} ({}))", owner, d.id.index, members.join(" "));
    }
    out.push_str("))\n");
    out
}
