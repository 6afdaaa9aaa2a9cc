//! Graphviz export: dependency edges as solid arrows, domains as nested
//! dashed clusters.

use std::fmt::Write as _;

use crate::structure::{DependencyStructure, DomainId, DomainTree, Owner, QueryError};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DotOptions {
    /// Also draw the domains of words without dependents that hold only
    /// their owner.
    pub all_domains: bool,
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn cluster_name(d: DomainId) -> String {
    match d.owner {
        Owner::Root => "cluster_root".into(),
        Owner::Word(w) => format!("cluster_d{}_{}", w, d.index),
    }
}

fn domain_label(s: &DependencyStructure, d: DomainId) -> String {
    match d.owner {
        Owner::Root => "ROOT".into(),
        Owner::Word(w) => format!("{}.{}", s.word(w).surface, d.index),
    }
}

/// A leaf word's domain that holds nothing but the word.
fn is_trivial(s: &DependencyStructure, d: DomainId) -> bool {
    match d.owner {
        Owner::Root => false,
        Owner::Word(w) => {
            s.dependents(w).next().is_none() && s.members(d).is_some_and(|m| m.len() == 1 && m.contains(&w))
        }
    }
}

struct Writer<'a> {
    s: &'a DependencyStructure,
    tree: DomainTree,
    options: DotOptions,
    out: String,
}

impl Writer<'_> {
    fn shown(&self, d: DomainId) -> bool {
        self.options.all_domains || !is_trivial(self.s, d)
    }

    /// Words whose innermost drawn domain is `d`.
    fn words_in(&self, d: DomainId) -> Vec<usize> {
        (0..self.s.len())
            .filter(|&w| {
                let mut c = self.s.containing_domain(w).expect("valid structure");
                while !self.shown(c) {
                    c = self.tree.parent(c).expect("ROOT is always shown");
                }
                c == d
            })
            .collect()
    }

    fn cluster(&mut self, d: DomainId, depth: usize) {
        let pad = "  ".repeat(depth);
        let _ = writeln!(self.out, "{pad}subgraph {} {{", cluster_name(d));
        let _ = writeln!(self.out, "{pad}  label={}; style=dashed;", quote(&domain_label(self.s, d)));
        let words = self.words_in(d);
        for &w in &words {
            let _ = writeln!(self.out, "{pad}  w{w} [label={}];", quote(&self.s.word(w).surface));
        }
        let children: Vec<DomainId> = self.tree.children(d).iter().copied().filter(|&c| self.shown(c)).collect();
        if words.is_empty() && children.is_empty() {
            if let Owner::Word(x) = d.owner {
                let _ = writeln!(self.out, "{pad}  e{}_{} [shape=point, label=\"\"];", x, d.index);
            }
        }
        for c in children {
            self.cluster(c, depth + 1);
        }
        let _ = writeln!(self.out, "{pad}}}");
    }
}

/// Writes `s` as a DOT digraph. Fails if the structure is not valid.
pub fn to_dot(s: &DependencyStructure, options: DotOptions) -> Result<String, QueryError> {
    let tree = s.domain_tree()?;
    let mut w = Writer {
        s,
        tree,
        options,
        out: String::new(),
    };
    w.out.push_str("digraph structure {\n  node [shape=plaintext];\n  root [label=\"ROOT\"];\n");
    w.cluster(DomainId::ROOT, 1);
    let _ = writeln!(w.out, "  root -> w{};", s.root());
    for e in s.edges() {
        let _ = writeln!(w.out, "  w{} -> w{} [label={}];", e.head, e.dependent, quote(&e.dep_type));
    }
    w.out.push_str("}\n");
    Ok(w.out)
}
