//! Dependency structures: a dependency tree over the words of a sentence linked
//! to an order domain structure, plus the well-formedness checker.
//!
//! Word ids are positions in the sentence, so the precedence order on words is
//! just `<` on ids. Every structure carries an implicit `ROOT` token owning one
//! domain that spans the whole sentence; the dependency root is placed there.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub type WordId = usize;

/// One token of the sentence.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    pub surface: String,
    pub class: String,
    pub features: BTreeSet<String>,
    /// Length of the word's domain sequence.
    pub domain_count: usize,
}

impl Word {
    pub fn new<I, S>(surface: &str, class: &str, features: I, domain_count: usize) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Word {
            surface: surface.to_string(),
            class: class.to_string(),
            features: features.into_iter().map(Into::into).collect(),
            domain_count,
        }
    }
}

/// Owner of a domain: a word, or the implicit sentence-level `ROOT` token.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Owner {
    Root,
    Word(WordId),
}

impl Owner {
    pub fn word(self) -> Option<WordId> {
        match self {
            Owner::Root => None,
            Owner::Word(w) => Some(w),
        }
    }
}

/// Identity of a domain: its owner and 1-based position in the owner's sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DomainId {
    pub owner: Owner,
    pub index: usize,
}

impl DomainId {
    pub const ROOT: DomainId = DomainId {
        owner: Owner::Root,
        index: 1,
    };

    pub fn of(owner: WordId, index: usize) -> Self {
        DomainId {
            owner: Owner::Word(owner),
            index,
        }
    }
}

impl fmt::Display for DomainId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.owner {
            Owner::Root => write!(f, "ROOT"),
            Owner::Word(w) => write!(f, "{}.{}", w, self.index),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DomainNode {
    pub id: DomainId,
    pub members: BTreeSet<WordId>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DependencyEdge {
    pub head: WordId,
    pub dep_type: String,
    pub dependent: WordId,
}

impl DependencyEdge {
    pub fn new(head: WordId, dep_type: &str, dependent: WordId) -> Self {
        DependencyEdge {
            head,
            dep_type: dep_type.to_string(),
            dependent,
        }
    }
}

/// Input that cannot be interpreted as a structure at all (as opposed to a
/// structure that violates a well-formedness clause).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MalformedError {
    #[error("empty sentence")]
    Empty,
    #[error("root {0} is not a word of the sentence")]
    BadRoot(WordId),
    #[error("edge {head} -{dep_type}-> {dependent} refers to a missing word")]
    BadEdge {
        head: WordId,
        dep_type: String,
        dependent: WordId,
    },
    #[error("domain {0} has an unknown owner")]
    BadOwner(DomainId),
    #[error("domain {0}: index outside 1..={1}")]
    BadIndex(DomainId, usize),
    #[error("domain {0} lists missing word {1}")]
    BadMember(DomainId, WordId),
    #[error("domain {0} given twice")]
    DuplicateDomain(DomainId),
}

/// The well-formedness clauses a structure is checked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Clause {
    /// Edges form a tree over the words rooted in the root word.
    DependencyTree,
    /// Every domain is convex w.r.t. word order.
    Convexity,
    /// Any two domains are disjoint or one includes the other.
    Nesting,
    /// Condition (1): a word sits in exactly one of its own domains.
    OwnDomain,
    /// Condition (2): a word's own domains are pairwise disjoint.
    DisjointDomains,
    /// Condition (3): a non-root word is also in a domain of a transitive head.
    Placement,
    /// Condition (4): a word's domain sequence agrees with word order.
    DomainOrder,
}

impl Clause {
    pub const ALL: [Clause; 7] = [
        Clause::DependencyTree,
        Clause::Convexity,
        Clause::Nesting,
        Clause::OwnDomain,
        Clause::DisjointDomains,
        Clause::Placement,
        Clause::DomainOrder,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Clause::DependencyTree => "dependency-tree",
            Clause::Convexity => "convexity",
            Clause::Nesting => "nesting",
            Clause::OwnDomain => "own-domain",
            Clause::DisjointDomains => "disjoint-domains",
            Clause::Placement => "placement",
            Clause::DomainOrder => "domain-order",
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub clause: Clause,
    pub message: String,
    pub words: Vec<WordId>,
    pub domains: Vec<DomainId>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.clause, self.message)
    }
}

fn violation(clause: Clause, message: String, words: Vec<WordId>, domains: Vec<DomainId>) -> Violation {
    Violation {
        clause,
        message,
        words,
        domains,
    }
}

/// Errors from queries that need a well-formed structure.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("word {0} does not exist")]
    UnknownWord(WordId),
    #[error("word {0} is the dependency root and has no positional head")]
    TopWord(WordId),
    #[error("domain {0} does not exist")]
    UnknownDomain(DomainId),
    #[error("{0}")]
    Violation(Violation),
    #[error("structure is not well-formed ({} violations)", .0.len())]
    Invalid(Vec<Violation>),
}

/// A dependency tree linked to an order domain structure. Immutable once built.
#[derive(Clone, Debug)]
pub struct DependencyStructure {
    words: Vec<Word>,
    root: WordId,
    edges: Vec<DependencyEdge>,
    domains: BTreeMap<DomainId, BTreeSet<WordId>>,
    all_words: BTreeSet<WordId>,
    // derived indexes
    incoming: Vec<Vec<usize>>,
    outgoing: Vec<Vec<usize>>,
    depth: Vec<Option<usize>>,
}

impl PartialEq for DependencyStructure {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for DependencyStructure {}

impl PartialOrd for DependencyStructure {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DependencyStructure {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

impl std::hash::Hash for DependencyStructure {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.key().hash(state)
    }
}

type StructureKey<'a> = (
    &'a [Word],
    WordId,
    &'a [DependencyEdge],
    &'a BTreeMap<DomainId, BTreeSet<WordId>>,
);

impl DependencyStructure {
    /// Builds a structure, checking that every id resolves. Domains of a word
    /// that are not listed (index up to its `domain_count`) are created empty.
    pub fn new(
        words: Vec<Word>,
        root: WordId,
        edges: Vec<DependencyEdge>,
        domains: Vec<DomainNode>,
    ) -> Result<Self, MalformedError> {
        let n = words.len();
        if n == 0 {
            return Err(MalformedError::Empty);
        }
        if root >= n {
            return Err(MalformedError::BadRoot(root));
        }
        for e in &edges {
            if e.head >= n || e.dependent >= n {
                return Err(MalformedError::BadEdge {
                    head: e.head,
                    dep_type: e.dep_type.clone(),
                    dependent: e.dependent,
                });
            }
        }
        let mut map = BTreeMap::new();
        for d in domains {
            let owner = match d.id.owner {
                Owner::Word(w) if w < n => w,
                _ => return Err(MalformedError::BadOwner(d.id)),
            };
            let count = words[owner].domain_count;
            if d.id.index == 0 || d.id.index > count {
                return Err(MalformedError::BadIndex(d.id, count));
            }
            if let Some(&m) = d.members.iter().find(|&&m| m >= n) {
                return Err(MalformedError::BadMember(d.id, m));
            }
            if map.insert(d.id, d.members).is_some() {
                return Err(MalformedError::DuplicateDomain(d.id));
            }
        }
        for (w, word) in words.iter().enumerate() {
            for i in 1..=word.domain_count {
                map.entry(DomainId::of(w, i)).or_default();
            }
        }
        let mut edges = edges;
        edges.sort_by(|a, b| (a.dependent, a.head, &a.dep_type).cmp(&(b.dependent, b.head, &b.dep_type)));

        let mut incoming = vec![Vec::new(); n];
        let mut outgoing = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            incoming[e.dependent].push(i);
            outgoing[e.head].push(i);
        }
        let mut s = DependencyStructure {
            words,
            root,
            edges,
            domains: map,
            all_words: (0..n).collect(),
            incoming,
            outgoing,
            depth: vec![None; n],
        };
        s.depth = (0..n).map(|w| s.compute_depth(w)).collect();
        Ok(s)
    }

    fn compute_depth(&self, w: WordId) -> Option<usize> {
        let mut cur = w;
        let mut steps = 0;
        while cur != self.root {
            cur = self.edges[*self.incoming[cur].first()?].head;
            steps += 1;
            if steps > self.words.len() {
                return None;
            }
        }
        Some(steps)
    }

    fn key(&self) -> StructureKey<'_> {
        (&self.words, self.root, &self.edges, &self.domains)
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn word(&self, w: WordId) -> &Word {
        &self.words[w]
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn root(&self) -> WordId {
        self.root
    }

    /// Edges ordered by dependent.
    pub fn edges(&self) -> &[DependencyEdge] {
        &self.edges
    }

    /// All word-owned domains, in `(owner, index)` order. The root domain is
    /// not included.
    pub fn domains(&self) -> impl Iterator<Item = DomainNode> + '_ {
        self.domains.iter().map(|(id, m)| DomainNode {
            id: *id,
            members: m.clone(),
        })
    }

    pub fn domain_ids(&self) -> impl Iterator<Item = DomainId> + '_ {
        std::iter::once(DomainId::ROOT).chain(self.domains.keys().copied())
    }

    pub fn members(&self, d: DomainId) -> Option<&BTreeSet<WordId>> {
        match d.owner {
            Owner::Root if d.index == 1 => Some(&self.all_words),
            Owner::Root => None,
            Owner::Word(_) => self.domains.get(&d),
        }
    }

    /// The direct head of `w` and the type of the edge, if `w` has exactly one.
    pub fn head(&self, w: WordId) -> Option<(WordId, &str)> {
        match self.incoming.get(w)?.as_slice() {
            [i] => Some((self.edges[*i].head, &self.edges[*i].dep_type)),
            _ => None,
        }
    }

    pub fn dependents(&self, w: WordId) -> impl Iterator<Item = &DependencyEdge> + '_ {
        self.outgoing[w].iter().map(move |&i| &self.edges[i])
    }

    pub fn depth(&self, w: WordId) -> Option<usize> {
        self.depth[w]
    }

    /// Whether `a` is a proper ancestor of `w` in the dependency tree.
    pub fn is_proper_ancestor(&self, a: WordId, w: WordId) -> bool {
        let mut cur = w;
        for _ in 0..self.words.len() {
            match self.head(cur) {
                Some((h, _)) if h == a => return true,
                Some((h, _)) => cur = h,
                None => return false,
            }
        }
        false
    }

    fn rank_depth(&self, owner: Owner) -> isize {
        match owner {
            Owner::Root => -1,
            Owner::Word(w) => self.depth[w].map_or(0, |d| d as isize),
        }
    }

    /// Orders candidate enclosing domains: smaller extension first, then the
    /// owner that is deeper in the dependency tree.
    fn enclosing_rank(&self, d: DomainId) -> (usize, std::cmp::Reverse<isize>, DomainId) {
        let size = self.members(d).map_or(0, BTreeSet::len);
        (size, std::cmp::Reverse(self.rank_depth(d.owner)), d)
    }

    /// The own domains of `w` that contain `w`.
    fn own_containing(&self, w: WordId) -> Vec<DomainId> {
        (1..=self.words[w].domain_count)
            .map(|i| DomainId::of(w, i))
            .filter(|d| self.domains[d].contains(&w))
            .collect()
    }

    /// The smallest domain containing `w` that `w` does not own. This is the
    /// domain `w` is placed into.
    fn placement_domain(&self, w: WordId) -> DomainId {
        self.domain_ids()
            .filter(|d| d.owner != Owner::Word(w))
            .filter(|d| self.members(*d).is_some_and(|m| m.contains(&w)))
            .min_by_key(|d| self.enclosing_rank(*d))
            .unwrap_or(DomainId::ROOT)
    }

    /// Checks every well-formedness clause and reports all violations.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let tree_ok = self.check_tree(&mut out);
        self.check_convexity(&mut out);
        let nesting_ok = self.check_nesting(&mut out);
        self.check_own_domains(&mut out);
        if tree_ok && nesting_ok {
            self.check_placement(&mut out);
        }
        self.check_domain_order(&mut out);
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    fn check_tree(&self, out: &mut Vec<Violation>) -> bool {
        let before = out.len();
        let n = self.words.len();
        for e in &self.edges {
            if e.head == e.dependent {
                out.push(violation(
                    Clause::DependencyTree,
                    format!("word {} depends on itself", e.head),
                    vec![e.head],
                    vec![],
                ));
            }
        }
        for w in 0..n {
            let heads = self.incoming[w].len();
            if w == self.root && heads > 0 {
                out.push(violation(
                    Clause::DependencyTree,
                    format!("root word {w} has a head"),
                    vec![w],
                    vec![],
                ));
            } else if w != self.root && heads != 1 {
                out.push(violation(
                    Clause::DependencyTree,
                    format!("word {w} has {heads} heads, expected 1"),
                    vec![w],
                    vec![],
                ));
            }
        }
        if out.len() == before {
            for w in 0..n {
                if self.depth[w].is_none() {
                    out.push(violation(
                        Clause::DependencyTree,
                        format!("word {w} is not connected to the root"),
                        vec![w],
                        vec![],
                    ));
                }
            }
        }
        out.len() == before
    }

    fn check_convexity(&self, out: &mut Vec<Violation>) {
        for (id, m) in &self.domains {
            let (Some(&lo), Some(&hi)) = (m.first(), m.last()) else {
                continue;
            };
            let gaps: Vec<WordId> = (lo..=hi).filter(|w| !m.contains(w)).collect();
            if !gaps.is_empty() {
                out.push(violation(
                    Clause::Convexity,
                    format!("domain {id} spans {lo}..{hi} but lacks {gaps:?}"),
                    gaps,
                    vec![*id],
                ));
            }
        }
    }

    fn check_nesting(&self, out: &mut Vec<Violation>) -> bool {
        let before = out.len();
        let ds: Vec<_> = self.domains.iter().collect();
        for (i, (a, ma)) in ds.iter().enumerate() {
            for (b, mb) in &ds[i + 1..] {
                if ma.is_disjoint(mb) || ma.is_subset(mb) || mb.is_subset(ma) {
                    continue;
                }
                let shared: Vec<_> = ma.intersection(mb).copied().collect();
                out.push(violation(
                    Clause::Nesting,
                    format!("domains {a} and {b} overlap on {shared:?} without inclusion"),
                    shared,
                    vec![**a, **b],
                ));
            }
        }
        out.len() == before
    }

    fn check_own_domains(&self, out: &mut Vec<Violation>) {
        for w in 0..self.words.len() {
            let containing = self.own_containing(w);
            if containing.len() != 1 {
                out.push(violation(
                    Clause::OwnDomain,
                    format!(
                        "word {w} is contained in {} of its own domains, expected 1",
                        containing.len()
                    ),
                    vec![w],
                    containing,
                ));
            }
            let count = self.words[w].domain_count;
            for i in 1..=count {
                for j in i + 1..=count {
                    let (a, b) = (DomainId::of(w, i), DomainId::of(w, j));
                    let shared: Vec<_> = self.domains[&a]
                        .intersection(&self.domains[&b])
                        .copied()
                        .collect();
                    if !shared.is_empty() {
                        out.push(violation(
                            Clause::DisjointDomains,
                            format!("domains {a} and {b} of word {w} share {shared:?}"),
                            shared,
                            vec![a, b],
                        ));
                    }
                }
            }
        }
    }

    fn check_placement(&self, out: &mut Vec<Violation>) {
        for w in 0..self.words.len() {
            let p = self.placement_domain(w);
            if w == self.root {
                if p != DomainId::ROOT {
                    out.push(violation(
                        Clause::Placement,
                        format!("root word {w} lies inside domain {p} of another word"),
                        vec![w],
                        vec![p],
                    ));
                }
                continue;
            }
            match p.owner {
                Owner::Root => out.push(violation(
                    Clause::Placement,
                    format!("word {w} is in no domain of a transitive head"),
                    vec![w],
                    vec![],
                )),
                Owner::Word(h) if !self.is_proper_ancestor(h, w) => out.push(violation(
                    Clause::Placement,
                    format!("word {w} is placed in domain {p} of {h}, which is not a transitive head"),
                    vec![w, h],
                    vec![p],
                )),
                Owner::Word(_) => {}
            }
            let outer = self.members(p).expect("placement domain exists");
            for i in 1..=self.words[w].domain_count {
                let d = DomainId::of(w, i);
                if !self.domains[&d].is_subset(outer) {
                    out.push(violation(
                        Clause::Placement,
                        format!("domain {d} of word {w} is not inside its placement {p}"),
                        vec![w],
                        vec![d, p],
                    ));
                }
            }
        }
    }

    fn check_domain_order(&self, out: &mut Vec<Violation>) {
        for (w, word) in self.words.iter().enumerate() {
            let seq: Vec<_> = (1..=word.domain_count)
                .map(|i| (DomainId::of(w, i), &self.domains[&DomainId::of(w, i)]))
                .filter(|(_, m)| !m.is_empty())
                .collect();
            for (i, (a, ma)) in seq.iter().enumerate() {
                for (b, mb) in &seq[i + 1..] {
                    if ma.last() > mb.first() {
                        out.push(violation(
                            Clause::DomainOrder,
                            format!("domain {a} of word {w} does not precede {b}"),
                            vec![w],
                            vec![*a, *b],
                        ));
                    }
                }
            }
        }
    }

    fn require_valid(&self) -> Result<(), QueryError> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(QueryError::Invalid(v))
        }
    }

    /// The unique own domain of `w` that contains `w`.
    pub fn containing_domain(&self, w: WordId) -> Result<DomainId, QueryError> {
        if w >= self.words.len() {
            return Err(QueryError::UnknownWord(w));
        }
        match self.own_containing(w).as_slice() {
            [d] => Ok(*d),
            other => Err(QueryError::Violation(violation(
                Clause::OwnDomain,
                format!("word {w} is contained in {} of its own domains", other.len()),
                vec![w],
                other.to_vec(),
            ))),
        }
    }

    /// Positional head of `w` and the domain `w` is placed into.
    pub fn places(&self, w: WordId) -> Result<(WordId, DomainId), QueryError> {
        if w >= self.words.len() {
            return Err(QueryError::UnknownWord(w));
        }
        if w == self.root {
            return Err(QueryError::TopWord(w));
        }
        let p = self.placement_domain(w);
        match p.owner {
            Owner::Word(h) if self.is_proper_ancestor(h, w) => Ok((h, p)),
            _ => Err(QueryError::Violation(violation(
                Clause::Placement,
                format!("word {w} is not placed in a domain of a transitive head"),
                vec![w],
                vec![p],
            ))),
        }
    }

    /// Like [`places`](Self::places) but total: the dependency root is placed
    /// in the root domain.
    pub fn placement(&self, w: WordId) -> (Owner, DomainId) {
        let p = self.placement_domain(w);
        (p.owner, p)
    }

    /// Members of `d` whose direct head lies outside `d`: the phrases of `d`.
    pub fn maximal_members(&self, d: DomainId) -> Result<BTreeSet<WordId>, QueryError> {
        let m = self.members(d).ok_or(QueryError::UnknownDomain(d))?;
        Ok(m.iter()
            .copied()
            .filter(|&w| !self.head(w).is_some_and(|(h, _)| m.contains(&h)))
            .collect())
    }

    /// The tree over domains induced by inclusion. Requires a well-formed
    /// structure.
    pub fn domain_tree(&self) -> Result<DomainTree, QueryError> {
        self.require_valid()?;
        let mut parent = BTreeMap::new();
        let mut children: BTreeMap<DomainId, Vec<DomainId>> = BTreeMap::new();
        children.insert(DomainId::ROOT, Vec::new());
        for &d in self.domains.keys() {
            let w = d.owner.word().expect("word-owned");
            let p = self.placement_domain(w);
            parent.insert(d, p);
            children.entry(p).or_default().push(d);
            children.entry(d).or_default();
        }
        Ok(DomainTree { parent, children })
    }
}

/// Parent/child links between domains; the root domain is the tree's root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainTree {
    parent: BTreeMap<DomainId, DomainId>,
    children: BTreeMap<DomainId, Vec<DomainId>>,
}

impl DomainTree {
    pub fn parent(&self, d: DomainId) -> Option<DomainId> {
        self.parent.get(&d).copied()
    }

    /// Children in `(owner, index)` order.
    pub fn children(&self, d: DomainId) -> &[DomainId] {
        self.children.get(&d).map_or(&[], Vec::as_slice)
    }

    pub fn nodes(&self) -> impl Iterator<Item = DomainId> + '_ {
        self.children.keys().copied()
    }

    pub fn node_count(&self) -> usize {
        self.children.len()
    }

    pub fn edge_count(&self) -> usize {
        self.parent.len()
    }
}
