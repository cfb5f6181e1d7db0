//! Symbolic representation of definite programs: interned atoms, rules,
//! interpretations and constraints, plus the immediate-consequence
//! reference solver every matrix engine is checked against.

mod parse;
mod print;
mod semantics;

pub use parse::{parse_constraints_only, parse_program, ParseError, ParseErrorKind};
pub use print::{serialize_constraints, serialize_program};
pub use semantics::{
    check_constraints_symbolic, is_model, tp_least_model, tp_step, ConstraintOutcome,
};

use std::collections::HashMap;
use std::fmt;

/// Dense index of a propositional atom within one program's atom table.
///
/// Ids are contiguous `0..n-1`; atoms introduced by the non-SD
/// transformation always come after every original atom.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct AtomId(u32);

impl AtomId {
    pub fn new(index: usize) -> Self {
        AtomId(u32::try_from(index).expect("atom index exceeds u32"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Interning table mapping atom names to dense ids and back.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AtomTable {
    names: Vec<String>,
    ids: HashMap<String, AtomId>,
}

impl AtomTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id for `name`, interning it if unseen.
    pub fn intern(&mut self, name: &str) -> AtomId {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = AtomId::new(self.names.len());
        self.names.push(name.to_string());
        self.ids.insert(name.to_string(), id);
        id
    }

    pub fn lookup(&self, name: &str) -> Option<AtomId> {
        self.ids.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.ids.contains_key(name)
    }

    pub fn name(&self, id: AtomId) -> &str {
        &self.names[id.index()]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (AtomId, &str)> {
        self.names
            .iter()
            .enumerate()
            .map(|(i, n)| (AtomId::new(i), n.as_str()))
    }
}

/// Which connective joins the body atoms of a rule.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub enum RuleKind {
    Conjunctive,
    Disjunctive,
}

/// A single rule `head :- body`. The body is kept sorted and free of
/// duplicates; an empty body makes the rule a fact (always conjunctive).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Rule {
    head: AtomId,
    body: Vec<AtomId>,
    kind: RuleKind,
}

impl Rule {
    pub fn new(head: AtomId, mut body: Vec<AtomId>, kind: RuleKind) -> Self {
        body.sort_unstable();
        body.dedup();
        // A disjunction over fewer than two atoms is the conjunctive rule;
        // canonicalizing keeps serialization unambiguous.
        let kind = if body.len() < 2 {
            RuleKind::Conjunctive
        } else {
            kind
        };
        Rule { head, body, kind }
    }

    pub fn fact(head: AtomId) -> Self {
        Rule::new(head, Vec::new(), RuleKind::Conjunctive)
    }

    pub fn head(&self) -> AtomId {
        self.head
    }

    pub fn body(&self) -> &[AtomId] {
        &self.body
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }
}

/// A finite set of rules over an interned atom table.
///
/// The table may contain atoms that no rule mentions (for instance atoms
/// that only occur in constraints); they simply never become derivable.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DefiniteProgram {
    atoms: AtomTable,
    rules: Vec<Rule>,
    facts: Interpretation,
}

impl DefiniteProgram {
    /// Builds a program, collapsing duplicate rules and caching the fact set.
    ///
    /// Panics if a rule references an atom outside the table.
    pub fn from_rules(atoms: AtomTable, rules: Vec<Rule>) -> Self {
        let n = atoms.len();
        let mut seen = std::collections::HashSet::new();
        let mut kept = Vec::with_capacity(rules.len());
        let mut facts = Interpretation::empty(n);
        for rule in rules {
            assert!(rule.head().index() < n, "rule head outside atom table");
            assert!(
                rule.body().iter().all(|a| a.index() < n),
                "rule body outside atom table"
            );
            if seen.insert(rule.clone()) {
                if rule.is_fact() {
                    facts.insert(rule.head());
                }
                kept.push(rule);
            }
        }
        DefiniteProgram {
            atoms,
            rules: kept,
            facts,
        }
    }

    pub fn empty() -> Self {
        DefiniteProgram::from_rules(AtomTable::new(), Vec::new())
    }

    pub fn atoms(&self) -> &AtomTable {
        &self.atoms
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Atoms defined by an empty-body rule.
    pub fn facts(&self) -> &Interpretation {
        &self.facts
    }

    /// Sorted atom names of an interpretation over this program's table.
    pub fn atom_names(&self, i: &Interpretation) -> Vec<String> {
        let mut names: Vec<String> = i.iter().map(|a| self.atoms.name(a).to_string()).collect();
        names.sort();
        names
    }

    /// True when the two programs have the same atom table and the same
    /// rules regardless of rule order.
    pub fn same_rules(&self, other: &DefiniteProgram) -> bool {
        if self.atoms != other.atoms {
            return false;
        }
        let mut a = self.rules.clone();
        let mut b = other.rules.clone();
        let key = |r: &Rule| {
            (
                r.head(),
                r.body().to_vec(),
                r.kind() == RuleKind::Disjunctive,
            )
        };
        a.sort_by_key(key);
        b.sort_by_key(key);
        a == b
    }
}

/// A set of atoms, represented densely over a program's atom table.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Interpretation {
    bits: Vec<bool>,
}

impl Interpretation {
    pub fn empty(universe: usize) -> Self {
        Interpretation {
            bits: vec![false; universe],
        }
    }

    pub fn from_atoms(universe: usize, atoms: impl IntoIterator<Item = AtomId>) -> Self {
        let mut i = Interpretation::empty(universe);
        for a in atoms {
            i.insert(a);
        }
        i
    }

    /// Size of the underlying atom table, not the number of members.
    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn contains(&self, a: AtomId) -> bool {
        self.bits[a.index()]
    }

    pub fn insert(&mut self, a: AtomId) {
        self.bits[a.index()] = true;
    }

    pub fn size(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty_set(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn iter(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| AtomId::new(i))
    }

    pub fn is_subset(&self, other: &Interpretation) -> bool {
        assert_eq!(self.universe(), other.universe());
        self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    pub fn union(&self, other: &Interpretation) -> Interpretation {
        assert_eq!(self.universe(), other.universe());
        Interpretation {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(&a, &b)| a || b)
                .collect(),
        }
    }

    /// Members with id below `n`, over a universe of size `n`.
    pub fn restrict(&self, n: usize) -> Interpretation {
        Interpretation {
            bits: self.bits[..n.min(self.bits.len())].to_vec(),
        }
    }

    pub fn as_bools(&self) -> &[bool] {
        &self.bits
    }
}

/// Constraints `:- b1, ..., bk` held apart from the program they guard.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ConstraintSet {
    bodies: Vec<Vec<AtomId>>,
}

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds one constraint body; duplicate atoms are dropped. Empty bodies
    /// are rejected by the parser before reaching this point.
    pub fn push(&mut self, mut body: Vec<AtomId>) {
        assert!(!body.is_empty(), "constraint body must be nonempty");
        body.sort_unstable();
        body.dedup();
        self.bodies.push(body);
    }

    pub fn bodies(&self) -> &[Vec<AtomId>] {
        &self.bodies
    }

    pub fn len(&self) -> usize {
        self.bodies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bodies.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_body_is_deduplicated_and_sorted() {
        let r = Rule::new(
            AtomId::new(0),
            vec![AtomId::new(3), AtomId::new(1), AtomId::new(3)],
            RuleKind::Conjunctive,
        );
        assert_eq!(r.body(), &[AtomId::new(1), AtomId::new(3)]);
    }

    #[test]
    fn empty_body_forces_conjunctive_kind() {
        let r = Rule::new(AtomId::new(2), vec![], RuleKind::Disjunctive);
        assert_eq!(r.kind(), RuleKind::Conjunctive);
        assert!(r.is_fact());
    }

    #[test]
    fn duplicate_rules_collapse() {
        let mut t = AtomTable::new();
        let p = t.intern("p");
        let q = t.intern("q");
        let rules = vec![
            Rule::new(p, vec![q], RuleKind::Conjunctive),
            Rule::new(p, vec![q], RuleKind::Conjunctive),
            Rule::fact(q),
        ];
        let prog = DefiniteProgram::from_rules(t, rules);
        assert_eq!(prog.rules().len(), 2);
        assert!(prog.facts().contains(q));
        assert!(!prog.facts().contains(p));
    }

    #[test]
    fn interpretation_set_operations() {
        let a = Interpretation::from_atoms(4, [AtomId::new(1), AtomId::new(3)]);
        let b = Interpretation::from_atoms(4, [AtomId::new(1)]);
        assert!(b.is_subset(&a));
        assert!(!a.is_subset(&b));
        assert_eq!(a.union(&b), a);
        assert_eq!(a.restrict(2).size(), 1);
        assert_eq!(a.size(), 2);
    }
}
