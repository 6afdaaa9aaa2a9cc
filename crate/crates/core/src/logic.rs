//! The description language over dependency structures and its model checker.
//!
//! Concrete syntax (s-expressions):
//!
//! ```text
//! (class Vfin)  (feat middle)  middle          word class / feature atoms
//! (dep vpart φ)                                some vpart dependent satisfies φ
//! (first) (last)                               first / last in the containing domain
//! (prec subj obj) (foll subj obj)              no subj/obj co-member precedes / follows
//! (float vpart ...)  (float)                   positional head reached via these types
//! (single i) (filled i) (all i feat ...)       properties of the i-th own domain
//! (and ...) (not φ) (or ...) (implies φ ψ) (equiv φ ψ) true false
//! ```
//!
//! `or`, `implies`, `equiv`, `true` and `false` are desugared into `and`/`not`
//! when read.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::sexpr::{self, Sexp, SyntaxError};
use crate::structure::{DependencyStructure, DomainId, QueryError, WordId};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Class(String),
    Feature(String),
    Dep(String, Box<Formula>),
    /// Nothing in the containing domain precedes the word.
    First,
    /// Nothing in the containing domain follows the word.
    Last,
    /// No co-member bearing one of these dependency types precedes the word.
    Prec(BTreeSet<String>),
    /// No co-member bearing one of these dependency types follows the word.
    Foll(BTreeSet<String>),
    /// The positional head reaches the direct head along these types only.
    Float(BTreeSet<String>),
    Single(usize),
    Filled(usize),
    /// Every member of the i-th domain carries all listed features.
    All(usize, Vec<String>),
    And(Vec<Formula>),
    Not(Box<Formula>),
}

impl Formula {
    pub fn truth() -> Formula {
        Formula::And(Vec::new())
    }

    pub fn falsity() -> Formula {
        Formula::not(Formula::truth())
    }

    pub fn feat(a: &str) -> Formula {
        Formula::Feature(a.to_string())
    }

    pub fn class(c: &str) -> Formula {
        Formula::Class(c.to_string())
    }

    pub fn dep(d: &str, f: Formula) -> Formula {
        Formula::Dep(d.to_string(), Box::new(f))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(fs: impl IntoIterator<Item = Formula>) -> Formula {
        Formula::And(fs.into_iter().collect())
    }

    pub fn or(fs: impl IntoIterator<Item = Formula>) -> Formula {
        Formula::not(Formula::and(fs.into_iter().map(Formula::not)))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and([a, Formula::not(b)]))
    }

    pub fn equiv(a: Formula, b: Formula) -> Formula {
        Formula::and([Formula::implies(a.clone(), b.clone()), Formula::implies(b, a)])
    }

    pub fn types<'a>(ts: impl IntoIterator<Item = &'a str>) -> BTreeSet<String> {
        ts.into_iter().map(str::to_string).collect()
    }

    pub fn parse(text: &str) -> Result<Formula, SyntaxError> {
        Formula::from_sexp(&sexpr::parse_one(text)?)
    }

    pub fn from_sexp(e: &Sexp) -> Result<Formula, SyntaxError> {
        let items = match e {
            Sexp::Symbol(s, _) => {
                return Ok(match s.as_str() {
                    "true" => Formula::truth(),
                    "false" => Formula::falsity(),
                    _ => Formula::Feature(s.clone()),
                })
            }
            Sexp::Str(_, p) => return Err(SyntaxError::new(*p, "unexpected string in formula")),
            Sexp::List(items, _) => items,
        };
        let head = e.head().ok_or_else(|| SyntaxError::new(e.pos(), "expected formula operator"))?;
        let args = &items[1..];
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(SyntaxError::new(
                    e.pos(),
                    format!("({head} ...) takes {n} argument(s), got {}", args.len()),
                ))
            }
        };
        let symbols = |what: &str| -> Result<Vec<String>, SyntaxError> {
            args.iter()
                .map(|a| a.expect_symbol(what).map(str::to_string))
                .collect()
        };
        let index = |a: &Sexp| -> Result<usize, SyntaxError> {
            match a.expect_usize("domain index")? {
                0 => Err(SyntaxError::new(a.pos(), "domain indices start at 1")),
                i => Ok(i),
            }
        };
        let subformulas = || args.iter().map(Formula::from_sexp).collect::<Result<Vec<_>, _>>();
        Ok(match head {
            "class" => {
                arity(1)?;
                Formula::Class(args[0].expect_symbol("word class")?.to_string())
            }
            "feat" => {
                arity(1)?;
                Formula::Feature(args[0].expect_symbol("feature")?.to_string())
            }
            "dep" => {
                arity(2)?;
                Formula::dep(args[0].expect_symbol("dependency type")?, Formula::from_sexp(&args[1])?)
            }
            "first" => {
                arity(0)?;
                Formula::First
            }
            "last" => {
                arity(0)?;
                Formula::Last
            }
            "prec" => Formula::Prec(symbols("dependency type")?.into_iter().collect()),
            "foll" => Formula::Foll(symbols("dependency type")?.into_iter().collect()),
            "float" => Formula::Float(symbols("dependency type")?.into_iter().collect()),
            "single" => {
                arity(1)?;
                Formula::Single(index(&args[0])?)
            }
            "filled" => {
                arity(1)?;
                Formula::Filled(index(&args[0])?)
            }
            "all" => {
                let (first, rest) = args
                    .split_first()
                    .ok_or_else(|| SyntaxError::new(e.pos(), "(all i feat ...) needs an index"))?;
                let feats = rest
                    .iter()
                    .map(|a| match a {
                        Sexp::Symbol(s, _) => Ok(s.clone()),
                        Sexp::List(_, _) if a.head() == Some("feat") && a.as_list().unwrap().len() == 2 => {
                            Ok(a.as_list().unwrap()[1].expect_symbol("feature")?.to_string())
                        }
                        _ => Err(SyntaxError::new(a.pos(), "only features may appear under (all ...)")),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Formula::All(index(first)?, feats)
            }
            "and" => Formula::And(subformulas()?),
            "or" => Formula::or(subformulas()?),
            "not" => {
                arity(1)?;
                Formula::not(Formula::from_sexp(&args[0])?)
            }
            "implies" => {
                arity(2)?;
                let mut fs = subformulas()?;
                let b = fs.pop().unwrap();
                Formula::implies(fs.pop().unwrap(), b)
            }
            "equiv" => {
                arity(2)?;
                let mut fs = subformulas()?;
                let b = fs.pop().unwrap();
                Formula::equiv(fs.pop().unwrap(), b)
            }
            other => {
                return Err(SyntaxError::new(e.pos(), format!("unknown formula operator '{other}'")))
            }
        })
    }

    /// Every (kind, symbol) occurrence, in left-to-right order.
    pub fn symbols(&self) -> Vec<(SymbolKind, &str)> {
        let mut out = Vec::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols<'a>(&'a self, out: &mut Vec<(SymbolKind, &'a str)>) {
        match self {
            Formula::Class(c) => out.push((SymbolKind::Class, c)),
            Formula::Feature(a) => out.push((SymbolKind::Feature, a)),
            Formula::Dep(d, f) => {
                out.push((SymbolKind::DepType, d));
                f.collect_symbols(out);
            }
            Formula::Prec(ts) | Formula::Foll(ts) | Formula::Float(ts) => {
                out.extend(ts.iter().map(|t| (SymbolKind::DepType, t.as_str())))
            }
            Formula::All(_, fs) => out.extend(fs.iter().map(|a| (SymbolKind::Feature, a.as_str()))),
            Formula::And(fs) => fs.iter().for_each(|f| f.collect_symbols(out)),
            Formula::Not(f) => f.collect_symbols(out),
            Formula::First | Formula::Last | Formula::Single(_) | Formula::Filled(_) => {}
        }
    }

    /// Largest domain index mentioned at the top level (not under `dep`).
    pub fn max_local_index(&self) -> usize {
        match self {
            Formula::Single(i) | Formula::Filled(i) | Formula::All(i, _) => *i,
            Formula::And(fs) => fs.iter().map(Formula::max_local_index).max().unwrap_or(0),
            Formula::Not(f) => f.max_local_index(),
            _ => 0,
        }
    }
}

fn write_types(f: &mut fmt::Formatter<'_>, op: &str, ts: &BTreeSet<String>) -> fmt::Result {
    write!(f, "({op}")?;
    for t in ts {
        write!(f, " {t}")?;
    }
    write!(f, ")")
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Class(c) => write!(f, "(class {c})"),
            Formula::Feature(a) if a == "true" || a == "false" => write!(f, "(feat {a})"),
            Formula::Feature(a) => write!(f, "{a}"),
            Formula::Dep(d, g) => write!(f, "(dep {d} {g})"),
            Formula::First => write!(f, "(first)"),
            Formula::Last => write!(f, "(last)"),
            Formula::Prec(ts) => write_types(f, "prec", ts),
            Formula::Foll(ts) => write_types(f, "foll", ts),
            Formula::Float(ts) => write_types(f, "float", ts),
            Formula::Single(i) => write!(f, "(single {i})"),
            Formula::Filled(i) => write!(f, "(filled {i})"),
            Formula::All(i, fs) => {
                write!(f, "(all {i}")?;
                for a in fs {
                    if a == "true" || a == "false" {
                        write!(f, " (feat {a})")?;
                    } else {
                        write!(f, " {a}")?;
                    }
                }
                write!(f, ")")
            }
            Formula::And(fs) if fs.is_empty() => write!(f, "true"),
            Formula::And(fs) => {
                write!(f, "(and")?;
                for g in fs {
                    write!(f, " {g}")?;
                }
                write!(f, ")")
            }
            Formula::Not(g) => write!(f, "(not {g})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Class,
    Feature,
    DepType,
}

/// The declared word classes, features and dependency types of a grammar.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub classes: BTreeSet<String>,
    pub features: BTreeSet<String>,
    pub deps: BTreeSet<String>,
}

impl Signature {
    pub fn declares(&self, kind: SymbolKind, name: &str) -> bool {
        match kind {
            SymbolKind::Class => self.classes.contains(name),
            SymbolKind::Feature => self.features.contains(name),
            SymbolKind::DepType => self.deps.contains(name),
        }
    }
}

/// Symbols of `formula` that `signature` does not declare, each reported once.
pub fn free_variables_check(formula: &Formula, signature: &Signature) -> Vec<String> {
    let mut seen = BTreeSet::new();
    formula
        .symbols()
        .into_iter()
        .filter(|(k, s)| !signature.declares(*k, s))
        .filter(|(_, s)| seen.insert(s.to_string()))
        .map(|(_, s)| s.to_string())
        .collect()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("word {word} has {count} domain(s); formula asks for domain {index}")]
    DomainIndex {
        word: WordId,
        index: usize,
        count: usize,
    },
    #[error(transparent)]
    Structure(#[from] QueryError),
}

/// Whether word `w` of `s` satisfies `formula`.
pub fn satisfies(s: &DependencyStructure, w: WordId, formula: &Formula) -> Result<bool, EvalError> {
    if w >= s.len() {
        return Err(QueryError::UnknownWord(w).into());
    }
    let own_domain = |i: usize| -> Result<&BTreeSet<WordId>, EvalError> {
        let count = s.word(w).domain_count;
        if i == 0 || i > count {
            return Err(EvalError::DomainIndex { word: w, index: i, count });
        }
        Ok(s.members(DomainId::of(w, i)).expect("declared domain exists"))
    };
    Ok(match formula {
        Formula::Class(c) => s.word(w).class == *c,
        Formula::Feature(a) => s.word(w).features.contains(a),
        Formula::Dep(d, f) => {
            for e in s.dependents(w).filter(|e| e.dep_type == *d) {
                if satisfies(s, e.dependent, f)? {
                    return Ok(true);
                }
            }
            false
        }
        Formula::First => {
            let m = s.members(s.containing_domain(w)?).expect("exists");
            m.iter().all(|&v| v >= w)
        }
        Formula::Last => {
            let m = s.members(s.containing_domain(w)?).expect("exists");
            m.iter().all(|&v| v <= w)
        }
        Formula::Prec(types) => !scope_has_typed(s, w, types, |v| v < w)?,
        Formula::Foll(types) => !scope_has_typed(s, w, types, |v| v > w)?,
        Formula::Float(types) => {
            if w == s.root() {
                return Ok(false);
            }
            let (positional, _) = s.places(w)?;
            let (mut cur, _) = s.head(w).expect("non-root word of a valid tree has a head");
            while cur != positional {
                match s.head(cur) {
                    Some((h, t)) if types.contains(t) => cur = h,
                    _ => return Ok(false),
                }
            }
            true
        }
        Formula::Single(i) => {
            own_domain(*i)?;
            s.maximal_members(DomainId::of(w, *i))?.len() <= 1
        }
        Formula::Filled(i) => !own_domain(*i)?.is_empty(),
        Formula::All(i, feats) => own_domain(*i)?
            .iter()
            .all(|&v| feats.iter().all(|a| s.word(v).features.contains(a))),
        Formula::And(fs) => {
            for f in fs {
                if !satisfies(s, w, f)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Not(f) => !satisfies(s, w, f)?,
    })
}

/// The domain a precedence predicate at `w` ranges over: the domain `w` is
/// placed into, or for the dependency root its own containing domain.
pub fn precedence_scope(s: &DependencyStructure, w: WordId) -> Result<DomainId, QueryError> {
    if w == s.root() {
        s.containing_domain(w)
    } else {
        Ok(s.placement(w).1)
    }
}

fn scope_has_typed(
    s: &DependencyStructure,
    w: WordId,
    types: &BTreeSet<String>,
    side: impl Fn(WordId) -> bool,
) -> Result<bool, QueryError> {
    let scope = s.members(precedence_scope(s, w)?).expect("exists");
    Ok(scope
        .iter()
        .any(|&v| v != w && side(v) && s.head(v).is_some_and(|(_, t)| types.contains(t))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::fixtures::golden;

    const DEN: WordId = 0;
    const MANN: WordId = 1;
    const HAT: WordId = 2;
    const GESEHEN: WordId = 5;

    fn sat(w: WordId, text: &str) -> bool {
        satisfies(&golden(), w, &Formula::parse(text).unwrap()).unwrap()
    }

    #[test]
    fn precedence_predicates_on_golden() {
        assert!(sat(HAT, "(first)"));
        assert!(!sat(HAT, "(last)"));
        assert!(sat(GESEHEN, "(foll subj obj)"));
        assert!(!sat(GESEHEN, "(prec subj)"));
        assert!(sat(GESEHEN, "(prec obj)"));
        assert!(sat(MANN, "(last)"));
        assert!(sat(DEN, "(first)"));
    }

    #[test]
    fn float_on_golden() {
        assert!(sat(MANN, "(float vpart)"));
        assert!(!sat(MANN, "(float)"));
        assert!(!sat(MANN, "(float subj)"));
        assert!(sat(GESEHEN, "(float)"));
        assert!(sat(DEN, "(float)"));
        assert!(!sat(HAT, "(float subj vpart obj det)"));
    }

    #[test]
    fn domain_propositions_on_golden() {
        assert!(sat(HAT, "(single 1)"));
        assert!(sat(HAT, "(filled 1)"));
        assert!(!sat(HAT, "(filled 3)"));
        assert!(sat(HAT, "(single 3)"));
        assert!(sat(HAT, "(single 2)"));
        assert!(sat(HAT, "(all 1 initial norel)"));
        assert!(sat(HAT, "(all 2 middle norel)"));
        assert!(sat(HAT, "(all 3 final)"));
        assert!(!sat(HAT, "(all 2 initial)"));
    }

    #[test]
    fn finite_verb_description_holds_for_hat() {
        let vfin = "(and (single 1) (filled 1) (all 1 initial)
                         (all 2 middle norel)
                         (single 3) (all 3 final norel)
                         (equiv V2 (and middle (first) (all 1 norel)))
                         (equiv VEnd (and middle (last)))
                         (equiv V1 (and initial norel)))";
        assert!(sat(HAT, vfin));
    }

    #[test]
    fn hierarchical_description_holds_for_hat() {
        let f = "(and (class Vfin)
                      (dep subj (and (class N) (float)))
                      (dep vpart (and (class Vpart) (float) (not final) (foll subj obj)
                                      (dep obj (and (class N) (float vpart))))))";
        assert!(sat(HAT, f));
    }

    #[test]
    fn empty_conjunction_is_true() {
        for w in 0..6 {
            assert!(satisfies(&golden(), w, &Formula::truth()).unwrap());
        }
    }

    #[test]
    fn out_of_range_index_is_an_error() {
        let err = satisfies(&golden(), GESEHEN, &Formula::Single(2)).unwrap_err();
        assert_eq!(err, EvalError::DomainIndex { word: GESEHEN, index: 2, count: 1 });
        assert!(satisfies(&golden(), 9, &Formula::First).is_err());
    }

    #[test]
    fn derived_connectives_desugar() {
        assert_eq!(
            Formula::parse("(or a b)").unwrap(),
            Formula::not(Formula::and([Formula::not(Formula::feat("a")), Formula::not(Formula::feat("b"))]))
        );
        assert_eq!(Formula::parse("true").unwrap(), Formula::And(vec![]));
        assert!(sat(HAT, "(implies V2 middle)"));
        assert!(!sat(HAT, "(equiv V2 VEnd)"));
        assert!(!sat(HAT, "false"));
    }

    #[test]
    fn rejects_bad_syntax() {
        assert!(Formula::parse("(single 0)").is_err());
        assert!(Formula::parse("(all 1 (dep subj a))").is_err());
        assert!(Formula::parse("(bogus)").is_err());
        assert!(Formula::parse("(not a b)").is_err());
        assert!(Formula::parse("\"str\"").is_err());
    }

    #[test]
    fn display_round_trips() {
        let text = "(and (class Vfin) (dep vpart (and (not final) (foll obj subj))) (float) (all 2 middle (feat true)) (or a b))";
        let f = Formula::parse(text).unwrap();
        assert_eq!(Formula::parse(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn free_variables() {
        let sig = Signature {
            classes: ["Vfin".to_string()].into(),
            features: ["middle".to_string()].into(),
            deps: ["subj".to_string()].into(),
        };
        let f = Formula::parse("(and (class Vfin) topic (dep subj topic) (prec obj))").unwrap();
        assert_eq!(free_variables_check(&f, &sig), vec!["topic".to_string(), "obj".to_string()]);
        assert!(free_variables_check(&Formula::truth(), &Signature::default()).is_empty());
    }
}
