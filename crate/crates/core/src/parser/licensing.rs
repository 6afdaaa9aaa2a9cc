//! Checks a complete structure against a grammar under a fixed choice of
//! lexical entries. This is the defining condition for a parse; the search
//! and the brute-force enumerator both filter through it.

use std::collections::BTreeMap;
use std::fmt;

use crate::grammar::{Grammar, LexEntry};
use crate::logic::{satisfies, EvalError, Formula};
use crate::structure::{DependencyStructure, WordId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum FailureKind {
    /// The word does not match any lexical entry of its surface.
    Entry,
    /// A well-formedness clause of the structure is violated.
    Structure,
    /// Dependents do not realize the entry's slots.
    Slot,
    /// A dependent fails its slot's filler constraint.
    Filler,
    /// A dependent floats across a dependency type its slot does not license.
    Float,
    /// The word fails its entry's constraint (class axiom included).
    Constraint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub word: Option<WordId>,
    pub kind: FailureKind,
    pub message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.word {
            Some(w) => write!(f, "word {w}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

fn fail(word: Option<WordId>, kind: FailureKind, message: String) -> Failure {
    Failure { word, kind, message }
}

/// Features a task requires at given token positions.
pub type Forced = BTreeMap<WordId, Vec<String>>;

/// The constraint the word at `w` must satisfy: the entry's effective
/// constraint plus any forced features.
pub fn word_constraint(grammar: &Grammar, entry: &LexEntry, forced: &Forced, w: WordId) -> Formula {
    let base = grammar.effective_constraint(entry);
    match forced.get(&w) {
        Some(fs) if !fs.is_empty() => {
            let mut parts = vec![base];
            parts.extend(fs.iter().map(|a| Formula::feat(a)));
            Formula::And(parts)
        }
        _ => base,
    }
}

/// Whether `entry` could have produced `word` (class, domain count, features).
pub fn entry_matches(entry: &LexEntry, s: &DependencyStructure, w: WordId) -> bool {
    let word = s.word(w);
    word.class == entry.class
        && word.domain_count == entry.domain_count
        && entry.fixed.is_subset(&word.features)
        && word
            .features
            .iter()
            .all(|a| entry.fixed.contains(a) || entry.free.contains(a))
}

/// All failures of `s` under the entry assignment `entries` (one per word).
pub fn license(
    grammar: &Grammar,
    s: &DependencyStructure,
    entries: &[&LexEntry],
    forced: &Forced,
) -> Result<Vec<Failure>, EvalError> {
    let mut out: Vec<Failure> = s
        .validate()
        .into_iter()
        .map(|v| fail(v.words.first().copied(), FailureKind::Structure, v.to_string()))
        .collect();
    if !out.is_empty() {
        return Ok(out);
    }
    for (w, entry) in entries.iter().enumerate() {
        if !entry_matches(entry, s, w) {
            out.push(fail(
                Some(w),
                FailureKind::Entry,
                format!("does not match entry \"{}\" of class {}", entry.surface, entry.class),
            ));
            continue;
        }
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for e in s.dependents(w) {
            *counts.entry(&e.dep_type).or_default() += 1;
            let Some(slot) = entry.slot(&e.dep_type) else {
                out.push(fail(
                    Some(w),
                    FailureKind::Slot,
                    format!("no {} slot for dependent {}", e.dep_type, e.dependent),
                ));
                continue;
            };
            if !satisfies(s, e.dependent, &slot.filler)? {
                out.push(fail(
                    Some(e.dependent),
                    FailureKind::Filler,
                    format!("fails the {} filler constraint {}", e.dep_type, slot.filler),
                ));
            }
            if !satisfies(s, e.dependent, &Formula::Float(slot.float.clone()))? {
                out.push(fail(
                    Some(e.dependent),
                    FailureKind::Float,
                    format!("placement is not licensed by the {} slot", e.dep_type),
                ));
            }
        }
        for slot in &entry.slots {
            let n = counts.get(slot.dep_type.as_str()).copied().unwrap_or(0);
            if n < slot.min || n > slot.max {
                out.push(fail(
                    Some(w),
                    FailureKind::Slot,
                    format!("{} {} dependents, slot allows {}..={}", n, slot.dep_type, slot.min, slot.max),
                ));
            }
        }
        let constraint = word_constraint(grammar, entry, forced, w);
        if !satisfies(s, w, &constraint)? {
            out.push(fail(
                Some(w),
                FailureKind::Constraint,
                format!("fails its constraint: {}", describe_failure(s, w, &constraint)?),
            ));
        }
    }
    Ok(out)
}

/// The first top-level conjunct that fails, or the whole formula.
fn describe_failure(s: &DependencyStructure, w: WordId, f: &Formula) -> Result<String, EvalError> {
    if let Formula::And(parts) = f {
        for p in parts {
            if !satisfies(s, w, p)? {
                return describe_failure(s, w, p);
            }
        }
    }
    Ok(f.to_string())
}

/// Checks `s` against `grammar`, trying every combination of matching lexical
/// entries. Returns no failures iff some combination licenses the structure;
/// otherwise the failures of the combination with the fewest.
pub fn check_structure(grammar: &Grammar, s: &DependencyStructure, forced: &Forced) -> Result<Vec<Failure>, EvalError> {
    let candidates: Vec<Vec<&LexEntry>> = (0..s.len())
        .map(|w| {
            let word = s.word(w);
            grammar
                .token_entries(w, &word.surface)
                .into_iter()
                .filter(|e| entry_matches(e, s, w))
                .collect()
        })
        .collect();
    let missing: Vec<Failure> = candidates
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_empty())
        .map(|(w, _)| {
            let word = s.word(w);
            fail(
                Some(w),
                FailureKind::Entry,
                format!("no lexical entry for \"{}\" as {} with features {:?}", word.surface, word.class, word.features),
            )
        })
        .collect();
    if !missing.is_empty() {
        let mut out: Vec<Failure> = s
            .validate()
            .into_iter()
            .map(|v| fail(v.words.first().copied(), FailureKind::Structure, v.to_string()))
            .collect();
        out.extend(missing);
        return Ok(out);
    }
    let mut best: Option<Vec<Failure>> = None;
    let mut choice = vec![0usize; s.len()];
    loop {
        let entries: Vec<&LexEntry> = choice.iter().enumerate().map(|(w, &i)| candidates[w][i]).collect();
        let failures = license(grammar, s, &entries, forced)?;
        if failures.is_empty() {
            return Ok(failures);
        }
        if best.as_ref().is_none_or(|b| failures.len() < b.len()) {
            best = Some(failures);
        }
        // next combination, last position fastest
        let mut k = s.len();
        loop {
            if k == 0 {
                return Ok(best.unwrap_or_default());
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < candidates[k].len() {
                break;
            }
            choice[k] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::fixtures::golden;

    #[test]
    fn golden_is_licensed_by_the_demo_grammar() {
        let g = Grammar::german_demo();
        assert_eq!(check_structure(&g, &golden(), &Forced::new()).unwrap(), vec![]);
    }

    #[test]
    fn forcing_a_feature_the_word_lacks_fails() {
        let g = Grammar::german_demo();
        let forced: Forced = [(2, vec!["VEnd".to_string()])].into();
        let f = check_structure(&g, &golden(), &forced).unwrap();
        assert!(f.iter().any(|f| f.kind == FailureKind::Constraint && f.word == Some(2)));
    }

    #[test]
    fn unknown_word_is_an_entry_failure() {
        let g = load_tiny();
        let f = check_structure(&g, &golden(), &Forced::new()).unwrap();
        assert!(f.iter().all(|f| f.kind == FailureKind::Entry));
        assert_eq!(f.len(), 6);
    }

    fn load_tiny() -> Grammar {
        crate::grammar::load_grammar("(grammar (classes X) (word \"x\" :class X))").unwrap()
    }
}
