//! Grammars: declarations, word-class axioms and lexical entries with valency
//! slots.
//!
//! ```text
//! (grammar
//!   (classes Vfin N ...) (features middle ...) (deps subj ...)
//!   (axiom Vfin <formula>)
//!   (word "hat" :class Vfin :fixed (norel) :free (V2 ...) :domains 3
//!         :constraint <formula>
//!         (slot subj :min 1 :max 1 :filler <formula> :float (vpart))))
//! ```
//!
//! Omitted keywords default to: no features, one domain, constraint `true`,
//! `:min 1 :max 1`, filler `true`, empty float set.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::logic::{free_variables_check, Formula, Signature};
use crate::sexpr::{self, keyword_args, Pos, Sexp, SyntaxError};

/// Upper bound on slot cardinalities.
pub const MAX_SLOT_FILLERS: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slot {
    pub dep_type: String,
    pub min: usize,
    pub max: usize,
    pub filler: Formula,
    /// Dependency types a dependent in this slot may float across.
    pub float: BTreeSet<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexEntry {
    pub surface: String,
    pub class: String,
    pub fixed: BTreeSet<String>,
    /// Features the parser may or may not assign.
    pub free: BTreeSet<String>,
    pub domain_count: usize,
    pub constraint: Formula,
    pub slots: Vec<Slot>,
}

impl LexEntry {
    pub fn slot(&self, dep_type: &str) -> Option<&Slot> {
        self.slots.iter().find(|s| s.dep_type == dep_type)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Grammar {
    pub signature: Signature,
    pub axioms: BTreeMap<String, Formula>,
    pub entries: Vec<LexEntry>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GrammarError {
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
    #[error("{pos}: undeclared symbol '{name}'")]
    Undeclared { name: String, pos: Pos },
    #[error("{pos}: duplicate entry for \"{surface}\" of class {class}")]
    DuplicateEntry {
        surface: String,
        class: String,
        pos: Pos,
    },
    #[error("{pos}: {msg}")]
    Invalid { pos: Pos, msg: String },
}

fn invalid(pos: Pos, msg: impl Into<String>) -> GrammarError {
    GrammarError::Invalid {
        pos,
        msg: msg.into(),
    }
}

const DEMO: &str = include_str!("../grammars/german-v2.gr");

impl Grammar {
    /// The shipped German demo grammar.
    pub fn german_demo() -> Grammar {
        load_grammar(DEMO).expect("demo grammar loads")
    }

    pub fn demo_source() -> &'static str {
        DEMO
    }

    pub fn lookup(&self, surface: &str) -> Vec<&LexEntry> {
        self.entries.iter().filter(|e| e.surface == surface).collect()
    }

    /// Entries for the token at `position`. A sentence-initial token with no
    /// entry of its own falls back to its decapitalized form.
    pub fn token_entries(&self, position: usize, token: &str) -> Vec<&LexEntry> {
        let exact = self.lookup(token);
        if !exact.is_empty() || position != 0 {
            return exact;
        }
        match decapitalize(token) {
            Some(lower) => self.lookup(&lower),
            None => exact,
        }
    }

    /// The class axiom conjoined with the entry's own constraint.
    pub fn effective_constraint(&self, entry: &LexEntry) -> Formula {
        match self.axioms.get(&entry.class) {
            None => entry.constraint.clone(),
            Some(axiom) if entry.constraint == Formula::truth() => axiom.clone(),
            Some(axiom) => Formula::and([axiom.clone(), entry.constraint.clone()]),
        }
    }

    /// Writes the grammar back in the file syntax.
    pub fn serialize(&self) -> String {
        let mut out = String::from("(grammar\n");
        let list = |xs: &BTreeSet<String>| xs.iter().cloned().collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "  (classes {})", list(&self.signature.classes));
        let _ = writeln!(out, "  (features {})", list(&self.signature.features));
        let _ = writeln!(out, "  (deps {})", list(&self.signature.deps));
        for (class, f) in &self.axioms {
            let _ = writeln!(out, "  (axiom {class} {f})");
        }
        for e in &self.entries {
            let _ = write!(
                out,
                "  (word {} :class {} :fixed ({}) :free ({}) :domains {} :constraint {}",
                sexpr::quote(&e.surface),
                e.class,
                list(&e.fixed),
                list(&e.free),
                e.domain_count,
                e.constraint
            );
            for s in &e.slots {
                let _ = write!(
                    out,
                    "\n    (slot {} :min {} :max {} :filler {} :float ({}))",
                    s.dep_type,
                    s.min,
                    s.max,
                    s.filler,
                    list(&s.float)
                );
            }
            out.push_str(")\n");
        }
        out.push(')');
        out.push('\n');
        out
    }
}

fn decapitalize(token: &str) -> Option<String> {
    let mut chars = token.chars();
    let first = chars.next()?;
    if !first.is_uppercase() {
        return None;
    }
    Some(first.to_lowercase().chain(chars).collect())
}

/// Uppercases the first character of `token`.
pub fn capitalize(token: &str) -> String {
    let mut chars = token.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn symbol_set(e: &Sexp, what: &str) -> Result<BTreeSet<String>, SyntaxError> {
    e.expect_list(&format!("list of {what}"))?
        .iter()
        .map(|x| x.expect_symbol(what).map(str::to_string))
        .collect()
}

fn check_formula(f: &Formula, sig: &Signature, pos: Pos) -> Result<(), GrammarError> {
    match free_variables_check(f, sig).into_iter().next() {
        Some(name) => Err(GrammarError::Undeclared { name, pos }),
        None => Ok(()),
    }
}

fn check_symbols<'a>(
    names: impl IntoIterator<Item = &'a String>,
    declared: &BTreeSet<String>,
    pos: Pos,
) -> Result<(), GrammarError> {
    match names.into_iter().find(|n| !declared.contains(*n)) {
        Some(name) => Err(GrammarError::Undeclared {
            name: name.clone(),
            pos,
        }),
        None => Ok(()),
    }
}

/// Parses and checks a grammar file.
pub fn load_grammar(text: &str) -> Result<Grammar, GrammarError> {
    let top = sexpr::parse_one(text)?;
    if top.head() != Some("grammar") {
        return Err(invalid(top.pos(), "expected (grammar ...)"));
    }
    let forms = &top.as_list().unwrap()[1..];
    let mut g = Grammar::default();

    // Declarations first so that their order in the file does not matter.
    for form in forms {
        let items = form.expect_list("grammar form")?;
        let target = match form.head() {
            Some("classes") => &mut g.signature.classes,
            Some("features") => &mut g.signature.features,
            Some("deps") => &mut g.signature.deps,
            _ => continue,
        };
        for item in &items[1..] {
            target.insert(item.expect_symbol("symbol")?.to_string());
        }
    }

    let mut axiom_pos = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for form in forms {
        let items = form.as_list().unwrap();
        match form.head() {
            Some("classes" | "features" | "deps") => {}
            Some("axiom") => {
                if items.len() != 3 {
                    return Err(invalid(form.pos(), "(axiom <class> <formula>)"));
                }
                let class = items[1].expect_symbol("word class")?.to_string();
                check_symbols([&class], &g.signature.classes, items[1].pos())?;
                let f = Formula::from_sexp(&items[2])?;
                check_formula(&f, &g.signature, items[2].pos())?;
                if g.axioms.insert(class.clone(), f).is_some() {
                    return Err(invalid(form.pos(), format!("second axiom for class {class}")));
                }
                axiom_pos.insert(class, form.pos());
            }
            Some("word") => {
                let entry = read_entry(form, &g.signature)?;
                if !seen.insert((entry.surface.clone(), entry.class.clone())) {
                    return Err(GrammarError::DuplicateEntry {
                        surface: entry.surface,
                        class: entry.class,
                        pos: form.pos(),
                    });
                }
                g.entries.push(entry);
            }
            Some(other) => return Err(invalid(form.pos(), format!("unknown grammar form '{other}'"))),
            None => return Err(invalid(form.pos(), "expected a grammar form")),
        }
    }

    for e in &g.entries {
        let needed = g.effective_constraint(e).max_local_index();
        if needed > e.domain_count {
            let pos = axiom_pos.get(&e.class).copied().unwrap_or(top.pos());
            return Err(invalid(
                pos,
                format!(
                    "entry \"{}\" has {} domain(s) but its constraint uses domain {needed}",
                    e.surface, e.domain_count
                ),
            ));
        }
    }
    Ok(g)
}

fn read_entry(form: &Sexp, sig: &Signature) -> Result<LexEntry, GrammarError> {
    let items = form.as_list().unwrap();
    let surface = match items.get(1) {
        Some(Sexp::Str(s, _)) => s.clone(),
        Some(Sexp::Symbol(s, _)) if !s.starts_with(':') => s.clone(),
        _ => return Err(invalid(form.pos(), "(word \"<surface>\" ...)")),
    };
    let (pairs, rest) = keyword_args(&items[2..])?;
    let mut entry = LexEntry {
        surface,
        class: String::new(),
        fixed: BTreeSet::new(),
        free: BTreeSet::new(),
        domain_count: 1,
        constraint: Formula::truth(),
        slots: Vec::new(),
    };
    let mut has_class = false;
    for (key, value) in pairs {
        match key {
            ":class" => {
                entry.class = value.expect_symbol("word class")?.to_string();
                check_symbols([&entry.class], &sig.classes, value.pos())?;
                has_class = true;
            }
            ":fixed" => {
                entry.fixed = symbol_set(value, "features")?;
                check_symbols(&entry.fixed, &sig.features, value.pos())?;
            }
            ":free" => {
                entry.free = symbol_set(value, "features")?;
                check_symbols(&entry.free, &sig.features, value.pos())?;
            }
            ":domains" => {
                entry.domain_count = value.expect_usize("domain count")?;
                if entry.domain_count == 0 {
                    return Err(invalid(value.pos(), "a word owns at least one domain"));
                }
            }
            ":constraint" => {
                entry.constraint = Formula::from_sexp(value)?;
                check_formula(&entry.constraint, sig, value.pos())?;
            }
            other => return Err(invalid(value.pos(), format!("unknown word keyword {other}"))),
        }
    }
    if !has_class {
        return Err(invalid(form.pos(), "word entry without :class"));
    }
    if let Some(a) = entry.fixed.intersection(&entry.free).next() {
        return Err(invalid(form.pos(), format!("feature {a} is both fixed and free")));
    }
    for s in rest {
        if s.head() != Some("slot") {
            return Err(invalid(s.pos(), "expected (slot ...)"));
        }
        let slot = read_slot(s, sig)?;
        if entry.slot(&slot.dep_type).is_some() {
            return Err(invalid(s.pos(), format!("second slot for {}", slot.dep_type)));
        }
        entry.slots.push(slot);
    }
    Ok(entry)
}

fn read_slot(form: &Sexp, sig: &Signature) -> Result<Slot, GrammarError> {
    let items = form.as_list().unwrap();
    let dep = items
        .get(1)
        .ok_or_else(|| invalid(form.pos(), "(slot <dep> ...)"))?;
    let dep_type = dep.expect_symbol("dependency type")?.to_string();
    check_symbols([&dep_type], &sig.deps, dep.pos())?;
    let (pairs, rest) = keyword_args(&items[2..])?;
    if let Some(x) = rest.first() {
        return Err(invalid(x.pos(), "unexpected item in slot"));
    }
    let mut slot = Slot {
        dep_type,
        min: 1,
        max: 1,
        filler: Formula::truth(),
        float: BTreeSet::new(),
    };
    for (key, value) in pairs {
        match key {
            ":min" => slot.min = value.expect_usize("cardinality")?,
            ":max" => slot.max = value.expect_usize("cardinality")?,
            ":filler" => {
                slot.filler = Formula::from_sexp(value)?;
                check_formula(&slot.filler, sig, value.pos())?;
            }
            ":float" => {
                slot.float = symbol_set(value, "dependency types")?;
                check_symbols(&slot.float, &sig.deps, value.pos())?;
            }
            other => return Err(invalid(value.pos(), format!("unknown slot keyword {other}"))),
        }
    }
    if slot.max == 0 || slot.min > slot.max || slot.max > MAX_SLOT_FILLERS {
        return Err(invalid(
            form.pos(),
            format!("slot bounds need 0 <= min <= max, 1 <= max <= {MAX_SLOT_FILLERS}"),
        ));
    }
    Ok(slot)
}
