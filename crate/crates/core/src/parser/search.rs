//! Backtracking search for all structures of a sentence.
//!
//! Choices are made in stages: lexical entries left to right, then one head
//! per token, then (deepest words first) each word's containing domain and
//! the domain it is placed into, and finally the free features. Domain
//! memberships are never chosen; they follow from the placements. After every
//! choice the constraints are evaluated in three-valued logic over the partial
//! structure and the branch is cut as soon as one is definitely false.

use std::collections::BTreeSet;
use std::time::Instant;

use crate::grammar::{Grammar, LexEntry};
use crate::logic::Formula;
use crate::structure::{DependencyEdge, DependencyStructure, DomainId, DomainNode, Word};

use super::licensing::{license, word_constraint};
use super::{Halt, ParseError, ParseResult, ParseStats, ParseTask, PinnedHead};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Truth {
    False,
    Unknown,
    True,
}

impl Truth {
    fn from_bool(b: bool) -> Truth {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }

    fn not(self) -> Truth {
        match self {
            Truth::False => Truth::True,
            Truth::Unknown => Truth::Unknown,
            Truth::True => Truth::False,
        }
    }
}

struct Candidate<'g> {
    entry: &'g LexEntry,
    constraint: Formula,
    free: Vec<&'g str>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum HeadRef {
    Root,
    Word { head: usize, slot: usize },
}

/// Domains of the ROOT token are written with owner `None`.
type Placement = (Option<usize>, usize);

fn bit(w: usize) -> u64 {
    1u64 << w
}

fn span(mask: u64) -> (usize, usize) {
    (mask.trailing_zeros() as usize, 63 - mask.leading_zeros() as usize)
}

pub(crate) struct Search<'g> {
    grammar: &'g Grammar,
    tokens: &'g [String],
    n: usize,
    options: Vec<Vec<Candidate<'g>>>,
    pinned: Option<&'g [PinnedHead]>,
    limits: super::SearchLimits,
    forced: &'g super::Forced,
    stop_at_first: bool,

    choice: Vec<usize>,
    head: Vec<Option<HeadRef>>,
    root: Option<usize>,
    slot_count: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    assigned: usize,
    tree_done: bool,
    depth: Vec<usize>,
    contain: Vec<Option<usize>>,
    place: Vec<Option<Placement>>,
    yields: Vec<u64>,
    known: Vec<Vec<u64>>,
    feats: Vec<Option<u64>>,

    found: Vec<DependencyStructure>,
    seen: BTreeSet<DependencyStructure>,
    nodes: u64,
    start: Instant,
    halt: Option<Halt>,
    error: Option<ParseError>,
}

impl<'g> Search<'g> {
    pub(crate) fn new(
        task: &'g ParseTask<'g>,
        pinned: Option<&'g [PinnedHead]>,
        stop_at_first: bool,
    ) -> Result<Self, ParseError> {
        let grammar = task.grammar;
        let tokens = task.tokens.as_slice();
        let n = tokens.len();
        super::check_tokens(tokens, super::MAX_TOKENS)?;
        if let Some(p) = pinned {
            if p.len() != n {
                return Err(ParseError::PinnedTree(format!("{} heads for {} tokens", p.len(), n)));
            }
            if let Some(w) = p.iter().position(|h| matches!(h, PinnedHead::Word { head, .. } if *head >= n)) {
                return Err(ParseError::PinnedTree(format!("head of token {w} out of range")));
            }
        }
        let mut options = Vec::with_capacity(n);
        for (i, t) in tokens.iter().enumerate() {
            let entries = grammar.token_entries(i, t);
            if entries.is_empty() {
                return Err(ParseError::UnknownToken {
                    position: i,
                    token: t.clone(),
                });
            }
            options.push(
                entries
                    .into_iter()
                    .map(|entry| Candidate {
                        entry,
                        constraint: word_constraint(grammar, entry, &task.forced, i),
                        free: entry.free.iter().map(String::as_str).collect(),
                    })
                    .collect(),
            );
        }
        Ok(Search {
            grammar,
            tokens,
            n,
            options,
            pinned,
            limits: task.limits.clone(),
            forced: &task.forced,
            stop_at_first,
            choice: vec![0; n],
            head: vec![None; n],
            root: None,
            slot_count: vec![Vec::new(); n],
            children: vec![Vec::new(); n],
            assigned: 0,
            tree_done: false,
            depth: vec![0; n],
            contain: vec![None; n],
            place: vec![None; n],
            yields: vec![0; n],
            known: vec![Vec::new(); n],
            feats: vec![None; n],
            found: Vec::new(),
            seen: BTreeSet::new(),
            nodes: 0,
            start: Instant::now(),
            halt: None,
            error: None,
        })
    }

    pub(crate) fn run(mut self) -> Result<ParseResult, ParseError> {
        self.choose_entries(0);
        if let Some(e) = self.error {
            return Err(e);
        }
        let exhausted = !matches!(self.halt, Some(Halt::Limit));
        let mut structures = self.found;
        structures.sort();
        Ok(ParseResult {
            structures,
            exhausted,
            stats: ParseStats {
                nodes: self.nodes,
                elapsed: self.start.elapsed(),
            },
        })
    }

    fn cand(&self, w: usize) -> &Candidate<'g> {
        &self.options[w][self.choice[w]]
    }

    fn entry(&self, w: usize) -> &'g LexEntry {
        self.options[w][self.choice[w]].entry
    }

    fn dep_type(&self, v: usize) -> Option<&'g str> {
        match self.head[v]? {
            HeadRef::Root => None,
            HeadRef::Word { head, slot } => Some(self.entry(head).slots[slot].dep_type.as_str()),
        }
    }

    fn head_word(&self, v: usize) -> Option<usize> {
        match self.head[v]? {
            HeadRef::Root => None,
            HeadRef::Word { head, .. } => Some(head),
        }
    }

    /// Counts a node and reports whether the search must stop.
    fn tick(&mut self) -> bool {
        if self.halt.is_some() {
            return true;
        }
        self.nodes += 1;
        let over_steps = self.limits.max_steps.is_some_and(|m| self.nodes > m);
        let over_time = || {
            self.nodes.is_multiple_of(256) && self.limits.timeout.is_some_and(|t| self.start.elapsed() > t)
        };
        if over_steps || over_time() {
            self.halt = Some(Halt::Limit);
        }
        self.halt.is_some()
    }

    // ---- stage 1: lexical entries

    fn choose_entries(&mut self, i: usize) {
        if i == self.n {
            self.choose_head(0);
            return;
        }
        for k in 0..self.options[i].len() {
            if self.tick() {
                return;
            }
            self.choice[i] = k;
            self.slot_count[i] = vec![0; self.entry(i).slots.len()];
            self.choose_entries(i + 1);
        }
    }

    // ---- stage 2: the dependency tree

    fn reaches(&self, from: usize, target: usize) -> bool {
        let mut cur = from;
        for _ in 0..=self.n {
            if cur == target {
                return true;
            }
            match self.head[cur] {
                Some(HeadRef::Word { head, .. }) => cur = head,
                _ => return false,
            }
        }
        true
    }

    fn head_options(&self, t: usize) -> Vec<HeadRef> {
        if let Some(pinned) = self.pinned {
            return match &pinned[t] {
                PinnedHead::Root if self.root.is_none() => vec![HeadRef::Root],
                PinnedHead::Root => vec![],
                PinnedHead::Word { head, dep_type } => self
                    .entry(*head)
                    .slots
                    .iter()
                    .position(|s| s.dep_type == *dep_type)
                    .filter(|&slot| *head != t && self.slot_count[*head][slot] < self.entry(*head).slots[slot].max)
                    .filter(|_| !self.reaches(*head, t))
                    .map(|slot| HeadRef::Word { head: *head, slot })
                    .into_iter()
                    .collect(),
            };
        }
        let mut out = Vec::new();
        if self.root.is_none() {
            out.push(HeadRef::Root);
        }
        for h in (0..self.n).filter(|&h| h != t) {
            if self.reaches(h, t) {
                continue;
            }
            for (slot, s) in self.entry(h).slots.iter().enumerate() {
                if self.slot_count[h][slot] < s.max {
                    out.push(HeadRef::Word { head: h, slot });
                }
            }
        }
        out
    }

    fn choose_head(&mut self, t: usize) {
        if t == self.n {
            self.tree_done = true;
            if self.slots_feasible() {
                self.start_placement();
            }
            self.tree_done = false;
            return;
        }
        for option in self.head_options(t) {
            if self.tick() {
                return;
            }
            self.head[t] = Some(option);
            self.assigned += 1;
            match option {
                HeadRef::Root => self.root = Some(t),
                HeadRef::Word { head, slot } => {
                    self.slot_count[head][slot] += 1;
                    self.children[head].push(t);
                }
            }
            if self.slots_feasible() && self.constraints_possible() {
                self.choose_head(t + 1);
            }
            match option {
                HeadRef::Root => self.root = None,
                HeadRef::Word { head, slot } => {
                    self.slot_count[head][slot] -= 1;
                    self.children[head].pop();
                }
            }
            self.assigned -= 1;
            self.head[t] = None;
            if self.halt.is_some() {
                return;
            }
        }
    }

    /// Unfilled obligatory slots (and a missing root) must not outnumber the
    /// tokens still without a head.
    fn slots_feasible(&self) -> bool {
        let unmet: usize = (0..self.n)
            .map(|w| {
                self.entry(w)
                    .slots
                    .iter()
                    .zip(&self.slot_count[w])
                    .map(|(s, &c)| s.min.saturating_sub(c))
                    .sum::<usize>()
            })
            .sum();
        let need_root = usize::from(self.root.is_none());
        unmet + need_root <= self.n - self.assigned
    }

    // ---- stage 3: containing domains and placements

    fn start_placement(&mut self) {
        let root = self.root.expect("complete tree has a root");
        for w in 0..self.n {
            let mut d = 0;
            let mut cur = w;
            while let Some(h) = self.head_word(cur) {
                d += 1;
                cur = h;
            }
            self.depth[w] = d;
            self.known[w] = vec![0; self.entry(w).domain_count];
        }
        debug_assert_eq!(self.depth[root], 0);
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&w| (std::cmp::Reverse(self.depth[w]), w));
        if self.constraints_possible() {
            self.choose_placement(&order, 0);
        }
    }

    /// Positional head candidates for `w`: its direct head and every ancestor
    /// reachable through dependency types its slot lets it float across.
    fn positional_heads(&self, w: usize) -> Vec<usize> {
        let HeadRef::Word { head, slot } = self.head[w].expect("tree complete") else {
            return Vec::new();
        };
        let float = &self.entry(head).slots[slot].float;
        let mut out = vec![head];
        let mut cur = head;
        while let Some(t) = self.dep_type(cur) {
            if !float.contains(t) {
                break;
            }
            cur = self.head_word(cur).expect("typed edge has a head");
            out.push(cur);
        }
        out
    }

    fn choose_placement(&mut self, order: &[usize], k: usize) {
        if k == order.len() {
            self.choose_features(0);
            return;
        }
        let w = order[k];
        for c in 1..=self.entry(w).domain_count {
            if self.tick() {
                return;
            }
            self.contain[w] = Some(c);
            self.known[w][c - 1] |= bit(w);
            self.yields[w] = self.known[w].iter().fold(0, |acc, m| acc | m);
            if self.domains_consistent() && self.constraints_possible() {
                let targets: Vec<Placement> = if Some(w) == self.root {
                    vec![(None, 1)]
                } else {
                    self.positional_heads(w)
                        .into_iter()
                        .flat_map(|a| (1..=self.entry(a).domain_count).map(move |j| (Some(a), j)))
                        .collect()
                };
                for target in targets {
                    if self.tick() {
                        break;
                    }
                    self.place[w] = Some(target);
                    if let (Some(a), j) = target {
                        self.known[a][j - 1] |= self.yields[w];
                    }
                    if self.domains_consistent() && self.constraints_possible() {
                        self.choose_placement(order, k + 1);
                    }
                    if let (Some(a), j) = target {
                        self.known[a][j - 1] &= !self.yields[w];
                    }
                    self.place[w] = None;
                }
            }
            self.known[w][c - 1] &= !bit(w);
            self.yields[w] = 0;
            self.contain[w] = None;
            if self.halt.is_some() {
                return;
            }
        }
    }

    fn is_ancestor(&self, a: usize, v: usize) -> bool {
        let mut cur = v;
        while let Some(h) = self.head_word(cur) {
            if h == a {
                return true;
            }
            cur = h;
        }
        false
    }

    /// Whether `v` ends up in domain `i` of `x`, as far as decided.
    fn in_domain(&self, v: usize, x: usize, i: usize) -> Truth {
        if v == x {
            return match self.contain[x] {
                Some(c) => Truth::from_bool(c == i),
                None => Truth::Unknown,
            };
        }
        if !self.tree_done || !self.is_ancestor(x, v) {
            return if self.tree_done { Truth::False } else { Truth::Unknown };
        }
        let mut cur = v;
        loop {
            match self.place[cur] {
                None => return Truth::Unknown,
                Some((None, _)) => return Truth::False,
                Some((Some(a), j)) if a == x => return Truth::from_bool(j == i),
                Some((Some(a), _)) if self.depth[a] <= self.depth[x] => return Truth::False,
                Some((Some(a), _)) => cur = a,
            }
        }
    }

    /// Convexity and domain order, checked on what is known of each domain.
    fn domains_consistent(&self) -> bool {
        for x in 0..self.n {
            let complete = self.contain[x].is_some();
            let mut prev_hi: Option<usize> = None;
            for (idx, &mask) in self.known[x].iter().enumerate() {
                if mask == 0 {
                    continue;
                }
                let (lo, hi) = span(mask);
                for u in lo..hi {
                    if mask & bit(u) != 0 {
                        continue;
                    }
                    if complete || self.in_domain(u, x, idx + 1) == Truth::False {
                        return false;
                    }
                }
                if prev_hi.is_some_and(|p| p > lo) {
                    return false;
                }
                prev_hi = Some(prev_hi.map_or(hi, |p| p.max(hi)));
            }
        }
        true
    }

    // ---- stage 4: free features

    fn choose_features(&mut self, w: usize) {
        if w == self.n {
            self.leaf();
            return;
        }
        let count = self.cand(w).free.len();
        for mask in 0..(1u64 << count) {
            if self.tick() {
                return;
            }
            self.feats[w] = Some(mask);
            if self.constraints_possible() {
                self.choose_features(w + 1);
            }
            self.feats[w] = None;
            if self.halt.is_some() {
                return;
            }
        }
    }

    fn build(&self) -> DependencyStructure {
        let words = (0..self.n)
            .map(|w| {
                let c = self.cand(w);
                let mask = self.feats[w].unwrap_or(0);
                let mut features = c.entry.fixed.clone();
                features.extend(
                    c.free
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask & (1 << i) != 0)
                        .map(|(_, a)| a.to_string()),
                );
                Word {
                    surface: self.tokens[w].clone(),
                    class: c.entry.class.clone(),
                    features,
                    domain_count: c.entry.domain_count,
                }
            })
            .collect();
        let edges = (0..self.n)
            .filter_map(|v| {
                let h = self.head_word(v)?;
                Some(DependencyEdge::new(h, self.dep_type(v)?, v))
            })
            .collect();
        let domains = (0..self.n)
            .flat_map(|x| {
                self.known[x].iter().enumerate().map(move |(i, &mask)| DomainNode {
                    id: DomainId::of(x, i + 1),
                    members: (0..self.n).filter(|&u| mask & bit(u) != 0).collect(),
                })
            })
            .collect();
        DependencyStructure::new(words, self.root.expect("root"), edges, domains)
            .expect("search builds resolvable structures")
    }

    fn leaf(&mut self) {
        let s = self.build();
        let entries: Vec<&LexEntry> = (0..self.n).map(|w| self.entry(w)).collect();
        match license(self.grammar, &s, &entries, self.forced) {
            Err(e) => {
                self.error = Some(ParseError::Eval(e));
                self.halt = Some(Halt::Error);
            }
            Ok(failures) if failures.is_empty() => {
                if self.seen.insert(s.clone()) {
                    self.found.push(s);
                    if self.stop_at_first {
                        self.halt = Some(Halt::First);
                    } else if self.limits.max_structures.is_some_and(|m| self.found.len() > m) {
                        self.found.pop();
                        self.halt = Some(Halt::Limit);
                    }
                }
            }
            Ok(_) => {}
        }
    }

    // ---- three-valued evaluation over the partial structure

    fn constraints_possible(&self) -> bool {
        for w in 0..self.n {
            if self.eval(w, &self.cand(w).constraint) == Truth::False {
                return false;
            }
            if let Some(HeadRef::Word { head, slot }) = self.head[w] {
                if self.eval(w, &self.entry(head).slots[slot].filler) == Truth::False {
                    return false;
                }
            }
        }
        true
    }

    fn feature(&self, v: usize, a: &str) -> Truth {
        let c = self.cand(v);
        if c.entry.fixed.contains(a) {
            return Truth::True;
        }
        match c.free.iter().position(|f| *f == a) {
            None => Truth::False,
            Some(i) => match self.feats[v] {
                None => Truth::Unknown,
                Some(mask) => Truth::from_bool(mask & (1 << i) != 0),
            },
        }
    }

    fn dependents_complete(&self, w: usize, d: &str) -> bool {
        if self.tree_done || self.assigned == self.n {
            return true;
        }
        let entry = self.entry(w);
        match entry.slots.iter().position(|s| s.dep_type == d) {
            None => true,
            Some(slot) => self.slot_count[w][slot] == entry.slots[slot].max,
        }
    }

    /// Known members of domain `i` of `w`, whether that set is final, or
    /// `None` if `i` is out of range.
    fn own_domain(&self, w: usize, i: usize) -> Option<(u64, bool)> {
        if i == 0 || i > self.entry(w).domain_count {
            return None;
        }
        let mask = self.known[w].get(i - 1).copied().unwrap_or(0);
        Some((mask, self.contain[w].is_some()))
    }

    fn members(mask: u64) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&u| mask & bit(u) != 0)
    }

    fn eval(&self, w: usize, f: &Formula) -> Truth {
        match f {
            Formula::Class(c) => Truth::from_bool(self.entry(w).class == *c),
            Formula::Feature(a) => self.feature(w, a),
            Formula::Dep(d, g) => {
                let mut acc = Truth::False;
                for &v in &self.children[w] {
                    if self.dep_type(v) != Some(d.as_str()) {
                        continue;
                    }
                    match self.eval(v, g) {
                        Truth::True => return Truth::True,
                        Truth::Unknown => acc = Truth::Unknown,
                        Truth::False => {}
                    }
                }
                if acc == Truth::False && !self.dependents_complete(w, d) {
                    Truth::Unknown
                } else {
                    acc
                }
            }
            Formula::First | Formula::Last => match self.contain[w] {
                None => Truth::Unknown,
                Some(c) => {
                    let mask = self.known[w][c - 1];
                    let ok = Self::members(mask).all(|v| if *f == Formula::First { v >= w } else { v <= w });
                    Truth::from_bool(ok)
                }
            },
            Formula::Prec(types) | Formula::Foll(types) => {
                let scope = if self.head[w] == Some(HeadRef::Root) {
                    self.contain[w].map(|c| (self.known[w][c - 1], true))
                } else {
                    match self.place[w] {
                        Some((Some(a), j)) => Some((self.known[a][j - 1], self.contain[a].is_some())),
                        _ => None,
                    }
                };
                let Some((mask, complete)) = scope else {
                    return Truth::Unknown;
                };
                let before = matches!(f, Formula::Prec(_));
                let blocked = Self::members(mask).any(|v| {
                    v != w && (if before { v < w } else { v > w }) && self.dep_type(v).is_some_and(|t| types.contains(t))
                });
                if blocked {
                    Truth::False
                } else if complete {
                    Truth::True
                } else {
                    Truth::Unknown
                }
            }
            Formula::Float(types) => {
                if self.head[w] == Some(HeadRef::Root) {
                    return Truth::False;
                }
                let Some((Some(positional), _)) = self.place[w] else {
                    return Truth::Unknown;
                };
                let mut cur = self.head_word(w).expect("placed word has a head");
                while cur != positional {
                    match self.dep_type(cur) {
                        Some(t) if types.contains(t) => cur = self.head_word(cur).expect("typed edge"),
                        _ => return Truth::False,
                    }
                }
                Truth::True
            }
            Formula::Single(i) => {
                let Some((mask, complete)) = self.own_domain(w, *i) else {
                    return Truth::Unknown;
                };
                let definitely_maximal = Self::members(mask)
                    .filter(|&v| match self.head[v] {
                        Some(HeadRef::Root) => true,
                        Some(HeadRef::Word { head, .. }) => {
                            if complete {
                                mask & bit(head) == 0
                            } else {
                                self.in_domain(head, w, *i) == Truth::False
                            }
                        }
                        None => false,
                    })
                    .count();
                if definitely_maximal > 1 {
                    Truth::False
                } else if complete {
                    Truth::True
                } else {
                    Truth::Unknown
                }
            }
            Formula::Filled(i) => match self.own_domain(w, *i) {
                None => Truth::Unknown,
                Some((mask, _)) if mask != 0 => Truth::True,
                Some((_, true)) => Truth::False,
                Some((_, false)) => Truth::Unknown,
            },
            Formula::All(i, feats) => {
                let Some((mask, complete)) = self.own_domain(w, *i) else {
                    return Truth::Unknown;
                };
                let mut acc = Truth::True;
                for v in Self::members(mask) {
                    for a in feats {
                        match self.feature(v, a) {
                            Truth::False => return Truth::False,
                            Truth::Unknown => acc = Truth::Unknown,
                            Truth::True => {}
                        }
                    }
                }
                if complete {
                    acc
                } else {
                    Truth::Unknown
                }
            }
            Formula::And(parts) => {
                let mut acc = Truth::True;
                for p in parts {
                    match self.eval(w, p) {
                        Truth::False => return Truth::False,
                        Truth::Unknown => acc = Truth::Unknown,
                        Truth::True => {}
                    }
                }
                acc
            }
            Formula::Not(g) => self.eval(w, g).not(),
        }
    }
}
