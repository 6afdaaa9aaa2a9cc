//! Exhaustive enumeration without pruning, for checking the search.

use std::collections::BTreeSet;
use std::time::Instant;

use crate::grammar::LexEntry;
use crate::logic::{satisfies, Formula};
use crate::structure::{DependencyEdge, DependencyStructure, DomainId, DomainNode, Owner, Word};

use super::licensing::license;
use super::{check_forced, check_tokens, ParseError, ParseResult, ParseStats, ParseTask};

pub const BRUTE_FORCE_MAX_TOKENS: usize = 7;

/// Advances a mixed-radix counter, last digit fastest. False after the last
/// combination.
fn next(digits: &mut [usize], radix: impl Fn(usize) -> usize) -> bool {
    for k in (0..digits.len()).rev() {
        digits[k] += 1;
        if digits[k] < radix(k) {
            return true;
        }
        digits[k] = 0;
    }
    false
}

/// Every combination of one choice per position; empty if some position has
/// no choice.
fn product<T: Clone>(choices: &[Vec<T>]) -> Vec<Vec<T>> {
    if choices.iter().any(Vec::is_empty) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut digits = vec![0; choices.len()];
    loop {
        out.push(digits.iter().enumerate().map(|(k, &d)| choices[k][d].clone()).collect());
        if !next(&mut digits, |k| choices[k].len()) {
            return out;
        }
    }
}

/// Enumerates every dependency tree, labeling, placement and feature
/// assignment, keeping the structures that validate and satisfy the grammar.
pub fn brute_force_parse(task: &ParseTask) -> Result<ParseResult, ParseError> {
    let start = Instant::now();
    check_tokens(&task.tokens, BRUTE_FORCE_MAX_TOKENS)?;
    check_forced(task)?;
    let n = task.tokens.len();
    let lexicon: Vec<Vec<&LexEntry>> = task
        .tokens
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let e = task.grammar.token_entries(i, t);
            if e.is_empty() {
                Err(ParseError::UnknownToken {
                    position: i,
                    token: t.clone(),
                })
            } else {
                Ok(e)
            }
        })
        .collect::<Result<_, _>>()?;

    let mut found = BTreeSet::new();
    let mut nodes = 0u64;
    for entries in product(&lexicon) {
        // heads: n means ROOT
        let mut heads = vec![0usize; n];
        loop {
            nodes += 1;
            if let Some(root) = tree_root(&heads) {
                let label_choices: Vec<Vec<String>> = (0..n)
                    .map(|v| {
                        if v == root {
                            vec![String::new()]
                        } else {
                            entries[heads[v]].slots.iter().map(|s| s.dep_type.clone()).collect()
                        }
                    })
                    .collect();
                for labels in product(&label_choices) {
                    if slots_realized(&entries, &heads, &labels) {
                        skeletons(task, &entries, &heads, &labels, root, &mut found, &mut nodes)?;
                    }
                }
            }
            if !next(&mut heads, |_| n + 1) {
                break;
            }
        }
    }
    Ok(ParseResult {
        structures: found.into_iter().collect(),
        exhausted: true,
        stats: ParseStats {
            nodes,
            elapsed: start.elapsed(),
        },
    })
}

/// The root if `heads` (with `n` for ROOT) is a tree.
fn tree_root(heads: &[usize]) -> Option<usize> {
    let n = heads.len();
    let roots: Vec<usize> = (0..n).filter(|&v| heads[v] == n).collect();
    if roots.len() != 1 || (0..n).any(|v| heads[v] == v) {
        return None;
    }
    for v in 0..n {
        let mut cur = v;
        let mut steps = 0;
        while heads[cur] != n {
            cur = heads[cur];
            steps += 1;
            if steps > n {
                return None;
            }
        }
    }
    Some(roots[0])
}

fn slots_realized(entries: &[&LexEntry], heads: &[usize], labels: &[String]) -> bool {
    let n = heads.len();
    entries.iter().enumerate().all(|(h, e)| {
        e.slots.iter().all(|s| {
            let c = (0..n).filter(|&v| heads[v] == h && labels[v] == s.dep_type).count();
            s.min <= c && c <= s.max
        })
    })
}

fn is_proper_ancestor(heads: &[usize], a: usize, v: usize) -> bool {
    let n = heads.len();
    let mut cur = v;
    while heads[cur] != n {
        cur = heads[cur];
        if cur == a {
            return true;
        }
    }
    false
}

/// Enumerates containing domains and placements for a labeled tree, then
/// feature assignments for each valid skeleton.
fn skeletons(
    task: &ParseTask,
    entries: &[&LexEntry],
    heads: &[usize],
    labels: &[String],
    root: usize,
    found: &mut BTreeSet<DependencyStructure>,
    nodes: &mut u64,
) -> Result<(), ParseError> {
    let n = heads.len();
    let contain_choices: Vec<Vec<usize>> = entries.iter().map(|e| (1..=e.domain_count).collect()).collect();
    let place_choices: Vec<Vec<DomainId>> = (0..n)
        .map(|w| {
            if w == root {
                vec![DomainId::ROOT]
            } else {
                (0..n)
                    .filter(|&o| is_proper_ancestor(heads, o, w))
                    .flat_map(|o| (1..=entries[o].domain_count).map(move |i| DomainId::of(o, i)))
                    .collect()
            }
        })
        .collect();
    let edges: Vec<DependencyEdge> = (0..n)
        .filter(|&v| v != root)
        .map(|v| DependencyEdge::new(heads[v], &labels[v], v))
        .collect();
    for contain in product(&contain_choices) {
        for place in product(&place_choices) {
            *nodes += 1;
            let domains = memberships(entries, &contain, &place);
            let words: Vec<Word> = (0..n)
                .map(|w| Word {
                    surface: task.tokens[w].clone(),
                    class: entries[w].class.clone(),
                    features: entries[w].fixed.clone(),
                    domain_count: entries[w].domain_count,
                })
                .collect();
            let Ok(skeleton) = DependencyStructure::new(words, root, edges.clone(), domains.clone()) else {
                continue;
            };
            if !skeleton.is_valid() || !floats_licensed(&skeleton, entries)? {
                continue;
            }
            features(task, entries, &skeleton, &edges, &domains, found, nodes)?;
        }
    }
    Ok(())
}

/// Memberships implied by containing domains and placements: each domain
/// holds its owner (if it is the owner's containing domain) and everything
/// whose chain of placements passes through it.
fn memberships(entries: &[&LexEntry], contain: &[usize], place: &[DomainId]) -> Vec<DomainNode> {
    let n = entries.len();
    let mut out: Vec<DomainNode> = (0..n)
        .flat_map(|x| {
            (1..=entries[x].domain_count).map(move |i| DomainNode {
                id: DomainId::of(x, i),
                members: BTreeSet::new(),
            })
        })
        .collect();
    let slot = |d: DomainId| -> usize {
        let x = d.owner.word().expect("word domain");
        entries[..x].iter().map(|e| e.domain_count).sum::<usize>() + d.index - 1
    };
    for v in 0..n {
        out[slot(DomainId::of(v, contain[v]))].members.insert(v);
        let mut cur = v;
        for _ in 0..=n {
            let d = place[cur];
            match d.owner {
                Owner::Root => break,
                Owner::Word(a) => {
                    out[slot(d)].members.insert(v);
                    cur = a;
                }
            }
        }
    }
    out
}

fn floats_licensed(s: &DependencyStructure, entries: &[&LexEntry]) -> Result<bool, ParseError> {
    for e in s.edges() {
        let slot = entries[e.head].slot(&e.dep_type).expect("labels come from slots");
        if !satisfies(s, e.dependent, &Formula::Float(slot.float.clone()))? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn features(
    task: &ParseTask,
    entries: &[&LexEntry],
    skeleton: &DependencyStructure,
    edges: &[DependencyEdge],
    domains: &[DomainNode],
    found: &mut BTreeSet<DependencyStructure>,
    nodes: &mut u64,
) -> Result<(), ParseError> {
    let n = entries.len();
    let free: Vec<Vec<&String>> = entries.iter().map(|e| e.free.iter().collect()).collect();
    let mut masks = vec![0usize; n];
    loop {
        *nodes += 1;
        let words: Vec<Word> = (0..n)
            .map(|w| {
                let mut word = skeleton.word(w).clone();
                word.features
                    .extend(free[w].iter().enumerate().filter(|(i, _)| masks[w] & (1 << i) != 0).map(|(_, a)| (*a).clone()));
                word
            })
            .collect();
        let s = DependencyStructure::new(words, skeleton.root(), edges.to_vec(), domains.to_vec())
            .expect("skeleton was resolvable");
        if license(task.grammar, &s, entries, &task.forced)?.is_empty() {
            found.insert(s);
        }
        if !next(&mut masks, |w| 1 << free[w].len()) {
            return Ok(());
        }
    }
}
