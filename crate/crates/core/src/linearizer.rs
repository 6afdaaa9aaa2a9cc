//! Word orders a grammar allows for a fixed dependency tree.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::grammar::{capitalize, Grammar};
use crate::parser::{heads_of, recognize_with_tree, ParseError, ParseTask, PinnedHead};
use crate::structure::DependencyStructure;

pub const LINEARIZE_MAX_TOKENS: usize = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinearizeError {
    #[error("{0} tokens exceed the limit of {LINEARIZE_MAX_TOKENS}")]
    TooLong(usize),
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// A dependency tree over tokens: `heads[i]` is the head of `tokens[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    pub tokens: Vec<String>,
    pub heads: Vec<PinnedHead>,
}

impl Tree {
    pub fn of_structure(s: &DependencyStructure) -> Tree {
        Tree {
            tokens: s.words().iter().map(|w| w.surface.clone()).collect(),
            heads: heads_of(s),
        }
    }

    fn head(&self, v: usize) -> Option<usize> {
        match &self.heads[v] {
            PinnedHead::Root => None,
            PinnedHead::Word { head, .. } => Some(*head),
        }
    }

    fn check(&self) -> Result<(), LinearizeError> {
        let n = self.tokens.len();
        if self.heads.len() != n {
            return Err(LinearizeError::NotATree(format!("{} heads for {} tokens", self.heads.len(), n)));
        }
        if self.heads.iter().filter(|h| **h == PinnedHead::Root).count() != 1 {
            return Err(LinearizeError::NotATree("exactly one token must be the root".into()));
        }
        for v in 0..n {
            let mut cur = v;
            for _ in 0..=n {
                match self.head(cur) {
                    None => break,
                    Some(h) if h >= n => return Err(LinearizeError::NotATree(format!("head {h} out of range"))),
                    Some(h) => cur = h,
                }
            }
            if self.head(cur).is_some() {
                return Err(LinearizeError::NotATree(format!("token {v} is on a cycle")));
            }
        }
        Ok(())
    }

    fn is_descendant(&self, v: usize, w: usize) -> bool {
        let mut cur = v;
        loop {
            if cur == w {
                return true;
            }
            match self.head(cur) {
                Some(h) => cur = h,
                None => return false,
            }
        }
    }

    /// The tree with tokens rearranged so that position `p` holds `order[p]`.
    pub fn permuted(&self, order: &[usize]) -> Tree {
        let mut position = vec![0; order.len()];
        for (p, &t) in order.iter().enumerate() {
            position[t] = p;
        }
        Tree {
            tokens: order.iter().map(|&t| self.tokens[t].clone()).collect(),
            heads: order
                .iter()
                .map(|&t| match &self.heads[t] {
                    PinnedHead::Root => PinnedHead::Root,
                    PinnedHead::Word { head, dep_type } => PinnedHead::Word {
                        head: position[*head],
                        dep_type: dep_type.clone(),
                    },
                })
                .collect(),
        }
    }
}

/// Lowercases tokens that only have entries in their lowercase form, so a
/// sentence-initial capital does not travel with the word.
pub fn normalize_tokens(grammar: &Grammar, tokens: &[String]) -> Vec<String> {
    tokens
        .iter()
        .map(|t| {
            if !grammar.lookup(t).is_empty() {
                return t.clone();
            }
            let mut chars = t.chars();
            let lower: String = match chars.next() {
                Some(c) => c.to_lowercase().chain(chars).collect(),
                None => return t.clone(),
            };
            if grammar.lookup(&lower).is_empty() {
                t.clone()
            } else {
                lower
            }
        })
        .collect()
}

/// The sentence for a token order, with the first word capitalized.
pub fn render(tokens: &[String], order: &[usize]) -> Vec<String> {
    order
        .iter()
        .enumerate()
        .map(|(p, &t)| if p == 0 { capitalize(&tokens[t]) } else { tokens[t].clone() })
        .collect()
}

/// Words that must share a single domain with `w` under every entry, paired
/// with `w`'s subtree. Their positions have to form a block inside the subtree.
struct Block {
    members: Vec<usize>,
    subtree: Vec<bool>,
}

fn blocks(grammar: &Grammar, tree: &Tree) -> Vec<Block> {
    let n = tree.tokens.len();
    let entries: Vec<_> = (0..n).map(|t| grammar.lookup(&tree.tokens[t])).collect();
    let single_domain = |w: usize| !entries[w].is_empty() && entries[w].iter().all(|e| e.domain_count == 1);
    // every ancestor `v` may float up to, over all entries of its head
    let reach: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            let Some(h) = tree.head(v) else { return Vec::new() };
            let PinnedHead::Word { dep_type, .. } = &tree.heads[v] else { unreachable!() };
            let mut out = BTreeSet::from([h]);
            for e in &entries[h] {
                let Some(slot) = e.slot(dep_type) else { continue };
                let mut cur = h;
                while let (Some(up), PinnedHead::Word { dep_type: t, .. }) = (tree.head(cur), &tree.heads[cur]) {
                    if !slot.float.contains(t) {
                        break;
                    }
                    out.insert(up);
                    cur = up;
                }
            }
            out.into_iter().collect()
        })
        .collect();
    // v is kept in w's domain if every positional head it can take is w or
    // is itself kept there
    fn kept(v: usize, w: usize, tree: &Tree, reach: &[Vec<usize>]) -> bool {
        reach[v]
            .iter()
            .all(|&a| a == w || (a != v && tree.is_descendant(a, w) && kept(a, w, tree, reach)))
    }
    (0..n)
        .filter(|&w| single_domain(w))
        .map(|w| Block {
            members: (0..n)
                .filter(|&v| v == w || (tree.is_descendant(v, w) && kept(v, w, tree, &reach)))
                .collect(),
            subtree: (0..n).map(|v| tree.is_descendant(v, w)).collect(),
        })
        .filter(|b| b.members.len() > 1)
        .collect()
}

/// Whether a prefix of an order can still be completed with every block
/// contiguous inside its subtree.
fn prefix_ok(blocks: &[Block], prefix: &[usize]) -> bool {
    blocks.iter().all(|b| {
        let Some(first) = prefix.iter().position(|t| b.members.contains(t)) else {
            return true;
        };
        let placed = prefix.iter().filter(|t| b.members.contains(t)).count();
        let end = if placed == b.members.len() {
            prefix.iter().rposition(|t| b.members.contains(t)).unwrap()
        } else {
            prefix.len() - 1
        };
        prefix[first..=end].iter().all(|&t| b.subtree[t])
    })
}

/// All word orders for which the grammar assigns `tree` some structure,
/// rendered as sentences and sorted.
pub fn linearize(grammar: &Grammar, tree: &Tree) -> Result<Vec<Vec<String>>, LinearizeError> {
    let n = tree.tokens.len();
    if n > LINEARIZE_MAX_TOKENS {
        return Err(LinearizeError::TooLong(n));
    }
    if n == 0 {
        return Err(ParseError::EmptyInput.into());
    }
    tree.check()?;
    let tree = Tree {
        tokens: normalize_tokens(grammar, &tree.tokens),
        heads: tree.heads.clone(),
    };
    if let Some(t) = (0..n).find(|&t| grammar.token_entries(1, &tree.tokens[t]).is_empty()) {
        return Err(ParseError::UnknownToken {
            position: t,
            token: tree.tokens[t].clone(),
        }
        .into());
    }
    let blocks = blocks(grammar, &tree);
    let mut out = BTreeSet::new();
    let mut order = Vec::with_capacity(n);
    let mut used = vec![false; n];
    extend(grammar, &tree, &blocks, &mut order, &mut used, &mut out)?;
    Ok(out.into_iter().collect())
}

fn extend(
    grammar: &Grammar,
    tree: &Tree,
    blocks: &[Block],
    order: &mut Vec<usize>,
    used: &mut [bool],
    out: &mut BTreeSet<Vec<String>>,
) -> Result<(), LinearizeError> {
    let n = tree.tokens.len();
    if order.len() == n {
        let sentence = render(&tree.tokens, order);
        if out.contains(&sentence) {
            return Ok(());
        }
        let permuted = tree.permuted(order);
        let task = ParseTask::from_tokens(grammar, sentence.clone());
        if recognize_with_tree(&task, &permuted.heads)? {
            out.insert(sentence);
        }
        return Ok(());
    }
    for t in 0..n {
        if used[t] {
            continue;
        }
        order.push(t);
        if prefix_ok(blocks, order) {
            used[t] = true;
            extend(grammar, tree, blocks, order, used, out)?;
            used[t] = false;
        }
        order.pop();
    }
    Ok(())
}

/// Every order of the tree's tokens that parses to a structure with exactly
/// the tree's edges, found by parsing each permutation without the tree.
pub fn linearize_blind(grammar: &Grammar, tree: &Tree) -> Result<Vec<Vec<String>>, LinearizeError> {
    let n = tree.tokens.len();
    if n > LINEARIZE_MAX_TOKENS {
        return Err(LinearizeError::TooLong(n));
    }
    tree.check()?;
    let tokens = normalize_tokens(grammar, &tree.tokens);
    let mut out = BTreeSet::new();
    let mut order: Vec<usize> = (0..n).collect();
    loop {
        let sentence = render(&tokens, &order);
        if !out.contains(&sentence) {
            let wanted = tree.permuted(&order).heads;
            let r = crate::parser::parse(&ParseTask::from_tokens(grammar, sentence.clone()))?;
            if r.structures.iter().any(|s| heads_of(s) == wanted) {
                out.insert(sentence);
            }
        }
        if !next_permutation(&mut order) {
            break;
        }
    }
    Ok(out.into_iter().collect())
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
