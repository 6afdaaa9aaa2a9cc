//! Random structures, formulas and grammars shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use ordlog::logic::Formula;
use ordlog::structure::{DependencyEdge, DependencyStructure, DomainId, DomainNode, Owner, Word};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const CLASSES: [&str; 2] = ["A", "B"];
pub const FEATURES: [&str; 3] = ["f", "g", "h"];
pub const DEPS: [&str; 2] = ["d", "e"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn golden() -> DependencyStructure {
    ordlog::read_structure(include_str!("../../examples/golden.struct")).unwrap()
}

/// Renumbers words so that old word `i` sits at position `perm[i]`.
pub fn permute(s: &DependencyStructure, perm: &[usize]) -> DependencyStructure {
    let mut words = s.words().to_vec();
    for (i, w) in s.words().iter().enumerate() {
        words[perm[i]] = w.clone();
    }
    let edges = s
        .edges()
        .iter()
        .map(|e| DependencyEdge::new(perm[e.head], &e.dep_type, perm[e.dependent]))
        .collect();
    let domains = s
        .domains()
        .map(|d| DomainNode {
            id: DomainId::of(perm[d.id.owner.word().unwrap()], d.id.index),
            members: d.members.iter().map(|&m| perm[m]).collect(),
        })
        .collect();
    DependencyStructure::new(words, perm[s.root()], edges, domains).unwrap()
}

fn pick<'a, R: Rng>(rng: &mut R, xs: &[&'a str]) -> &'a str {
    xs.choose(rng).unwrap()
}

fn subset<R: Rng>(rng: &mut R, xs: &[&str], p: f64) -> Vec<String> {
    xs.iter().filter(|_| rng.gen_bool(p)).map(|s| s.to_string()).collect()
}

/// A random tree with domains built from random containing indices and
/// placements. May be ill-formed.
pub fn random_candidate<R: Rng>(rng: &mut R, n: usize) -> DependencyStructure {
    let words: Vec<Word> = (0..n)
        .map(|i| {
            let feats = subset(rng, &FEATURES, 0.5);
            let count = if rng.gen_bool(0.7) { 1 } else { 2 };
            Word::new(&format!("w{i}"), pick(rng, &CLASSES), feats, count)
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let root = order[0];
    let mut head = vec![None; n];
    for k in 1..n {
        head[order[k]] = Some(order[rng.gen_range(0..k)]);
    }
    let ancestors = |w: usize| {
        let mut out = Vec::new();
        let mut cur = w;
        while let Some(h) = head[cur] {
            out.push(h);
            cur = h;
        }
        out
    };
    let contain: Vec<usize> = words.iter().map(|w| rng.gen_range(1..=w.domain_count)).collect();
    let place: Vec<DomainId> = (0..n)
        .map(|w| {
            let anc = ancestors(w);
            if anc.is_empty() {
                return DomainId::ROOT;
            }
            // mostly the direct head
            let a = if rng.gen_bool(0.6) { anc[0] } else { *anc.choose(rng).unwrap() };
            DomainId::of(a, rng.gen_range(1..=words[a].domain_count))
        })
        .collect();
    let mut domains: Vec<DomainNode> = (0..n)
        .flat_map(|x| {
            (1..=words[x].domain_count).map(move |i| DomainNode {
                id: DomainId::of(x, i),
                members: BTreeSet::new(),
            })
        })
        .collect();
    let mut add = |d: DomainId, v: usize| {
        domains.iter_mut().find(|n| n.id == d).unwrap().members.insert(v);
    };
    for (v, &c) in contain.iter().enumerate() {
        add(DomainId::of(v, c), v);
        let mut cur = v;
        while let Owner::Word(a) = place[cur].owner {
            add(place[cur], v);
            cur = a;
        }
    }
    let edges = (0..n)
        .filter_map(|v| head[v].map(|h| DependencyEdge::new(h, pick(rng, &DEPS), v)))
        .collect();
    DependencyStructure::new(words, root, edges, domains).unwrap()
}

/// A random well-formed structure of 1 to `max_words` words.
pub fn random_structure<R: Rng>(rng: &mut R, max_words: usize) -> DependencyStructure {
    loop {
        let n = rng.gen_range(1..=max_words);
        let s = random_candidate(rng, n);
        if s.is_valid() {
            return s;
        }
    }
}

fn types<R: Rng>(rng: &mut R, deps: &[&str]) -> BTreeSet<String> {
    subset(rng, deps, 0.5).into_iter().collect()
}

/// A random formula over the given symbols with domain indices up to
/// `max_index`.
pub fn random_formula<R: Rng>(
    rng: &mut R,
    depth: usize,
    max_index: usize,
    classes: &[&str],
    features: &[&str],
    deps: &[&str],
) -> Formula {
    if depth == 0 || rng.gen_bool(0.4) {
        let i = rng.gen_range(1..=max_index);
        return match rng.gen_range(0..10) {
            0 => Formula::class(pick(rng, classes)),
            1 => Formula::feat(pick(rng, features)),
            2 => Formula::First,
            3 => Formula::Last,
            4 => Formula::Prec(types(rng, deps)),
            5 => Formula::Foll(types(rng, deps)),
            6 => Formula::Float(types(rng, deps)),
            7 => Formula::Single(i),
            8 => Formula::Filled(i),
            _ => Formula::All(i, subset(rng, features, 0.5)),
        };
    }
    let sub = |rng: &mut R| random_formula(rng, depth - 1, max_index, classes, features, deps);
    match rng.gen_range(0..5) {
        0 => Formula::not(sub(rng)),
        1 => Formula::and([sub(rng), sub(rng)]),
        2 => Formula::or([sub(rng), sub(rng)]),
        3 => Formula::Dep(pick(rng, deps).to_string(), Box::new(sub(rng))),
        _ => Formula::implies(sub(rng), sub(rng)),
    }
}

/// Formula over the symbols of [`random_structure`], indices 1 and 2.
pub fn random_logic_formula<R: Rng>(rng: &mut R, depth: usize) -> Formula {
    random_formula(rng, depth, 2, &CLASSES, &FEATURES, &DEPS)
}

fn symbols(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn list(xs: &[String]) -> String {
    format!("({})", xs.join(" "))
}

/// A small random grammar and sentence: at most 4 classes, 3 dependency
/// types, 3 features and 5 tokens.
pub struct MiniCase {
    pub grammar: String,
    pub tokens: Vec<String>,
}

pub fn mini_case(seed: u64) -> MiniCase {
    let mut rng = rng(seed);
    let classes = symbols("C", rng.gen_range(1..=4));
    let deps = symbols("d", rng.gen_range(1..=3));
    let features = symbols("f", 3);
    let cs: Vec<&str> = classes.iter().map(String::as_str).collect();
    let ds: Vec<&str> = deps.iter().map(String::as_str).collect();
    let fs: Vec<&str> = features.iter().map(String::as_str).collect();
    let mut text = format!(
        "(grammar\n  (classes {})\n  (features {})\n  (deps {})\n",
        cs.join(" "),
        fs.join(" "),
        ds.join(" ")
    );
    for c in &cs {
        if rng.gen_bool(0.25) {
            let f = random_formula(&mut rng, 1, 1, &cs, &fs, &ds);
            text += &format!("  (axiom {c} {f})\n");
        }
    }
    let vocab = rng.gen_range(2..=3);
    for w in 0..vocab {
        let mut entry_classes = cs.clone();
        entry_classes.shuffle(&mut rng);
        let n_entries = if rng.gen_bool(0.3) { 2.min(cs.len()) } else { 1 };
        for class in &entry_classes[..n_entries] {
            let domains = if rng.gen_bool(0.15) { 2 } else { 1 };
            let fixed = subset(&mut rng, &fs, 0.3);
            let mut free: Vec<String> = fs.iter().filter(|f| !fixed.contains(&f.to_string())).map(|f| f.to_string()).collect();
            free.shuffle(&mut rng);
            free.truncate(rng.gen_range(0..=2));
            let constraint = if rng.gen_bool(0.4) {
                Formula::truth()
            } else {
                random_formula(&mut rng, 2, domains, &cs, &fs, &ds)
            };
            text += &format!(
                "  (word \"w{w}\" :class {class} :fixed {} :free {} :domains {domains} :constraint {constraint}",
                list(&fixed),
                list(&free)
            );
            let mut slot_deps = ds.clone();
            slot_deps.shuffle(&mut rng);
            for d in &slot_deps[..rng.gen_range(0..=2.min(ds.len()))] {
                let min = rng.gen_range(0..=1);
                let max = rng.gen_range(min.max(1)..=2);
                let filler = match rng.gen_range(0..4) {
                    0 | 1 => Formula::truth(),
                    2 => Formula::class(pick(&mut rng, &cs)),
                    _ => Formula::not(Formula::feat(pick(&mut rng, &fs))),
                };
                let float = subset(&mut rng, &ds, 0.3);
                text += &format!(
                    "\n    (slot {d} :min {min} :max {max} :filler {filler} :float {})",
                    list(&float)
                );
            }
            text += ")\n";
        }
    }
    text += ")\n";
    let len = rng.gen_range(1..=5);
    let tokens = (0..len).map(|_| format!("w{}", rng.gen_range(0..vocab))).collect();
    MiniCase { grammar: text, tokens }
}

/// Membership in a^n b^n c^n, n >= 1.
pub fn in_anbncn(s: &str) -> bool {
    let n = s.len() / 3;
    n >= 1 && s.len() == 3 * n && *s == format!("{}{}{}", "a".repeat(n), "b".repeat(n), "c".repeat(n))
}
