//! Program transformations: splitting multiply-defined heads into a
//! singly-defined core plus disjunctive collector rules, and symbolic
//! partial evaluation by parallel rule unfolding.

use std::collections::HashMap;
use std::fmt;

use crate::program::{AtomId, DefiniteProgram, Interpretation, Rule, RuleKind};

/// True when no two rules of `p` share a head.
pub fn is_sd(p: &DefiniteProgram) -> bool {
    let mut seen = vec![false; p.atom_count()];
    for rule in p.rules() {
        let h = rule.head().index();
        if seen[h] {
            return false;
        }
        seen[h] = true;
    }
    true
}

/// A program split into a singly-defined conjunctive part `q` and a set of
/// disjunctive collector rules `d` over an extended atom table.
///
/// Atom ids below `original_base` are the input program's; ids from
/// `original_base` up to `q`'s table size name individual rules of
/// multiply-defined atoms.
#[derive(Clone, Debug)]
pub struct DProgram {
    q: DefiniteProgram,
    d: Vec<Rule>,
    original_base: usize,
    origin: Vec<usize>,
}

impl DProgram {
    /// Singly-defined conjunctive part.
    pub fn q(&self) -> &DefiniteProgram {
        &self.q
    }

    /// Disjunctive collector rules; their heads are original atoms.
    pub fn d(&self) -> &[Rule] {
        &self.d
    }

    /// Size of the input program's atom table (`n`).
    pub fn original_base(&self) -> usize {
        self.original_base
    }

    /// Size of the extended atom table (`m`).
    pub fn extended_base(&self) -> usize {
        self.q.atom_count()
    }

    /// Index of the rule a new atom stands for, counted over the input's
    /// conjunctive expansion; `new_atom` must be at or above
    /// `original_base`.
    pub fn origin_rule(&self, new_atom: AtomId) -> usize {
        self.origin[new_atom.index() - self.original_base]
    }

    /// Heads of the disjunctive rules, each an original atom.
    pub fn d_heads(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.d.iter().map(|r| r.head())
    }

    /// The whole d-program as one rule set over the extended table, for
    /// symbolic evaluation.
    pub fn to_program(&self) -> DefiniteProgram {
        let mut rules = self.q.rules().to_vec();
        rules.extend(self.d.iter().cloned());
        DefiniteProgram::from_rules(self.q.atoms().clone(), rules)
    }
}

/// Splits every multiply-defined atom: each of its rules gets a fresh head
/// naming that rule, and one disjunctive rule collects the fresh atoms back
/// into the original head. Input disjunctive rules are first expanded into
/// their one-rule-per-disjunct shorthand.
///
/// Fresh atoms are named `<head>__<ordinal>` in rule order, with trailing
/// underscores appended on collision with existing names.
pub fn to_d_program(p: &DefiniteProgram) -> DProgram {
    let n = p.atom_count();

    // Disjunctive rules are shorthand for one rule per body atom; expanding
    // them first lets the split treat every rule uniformly.
    let mut expanded: Vec<Rule> = Vec::with_capacity(p.rules().len());
    let mut seen = std::collections::HashSet::new();
    for rule in p.rules() {
        match rule.kind() {
            RuleKind::Conjunctive => {
                if seen.insert(rule.clone()) {
                    expanded.push(rule.clone());
                }
            }
            RuleKind::Disjunctive => {
                for &b in rule.body() {
                    let r = Rule::new(rule.head(), vec![b], RuleKind::Conjunctive);
                    if seen.insert(r.clone()) {
                        expanded.push(r);
                    }
                }
            }
        }
    }

    let mut head_count = vec![0usize; n];
    for rule in &expanded {
        head_count[rule.head().index()] += 1;
    }

    let mut table = p.atoms().clone();
    let mut q_rules = Vec::with_capacity(expanded.len());
    let mut origin = Vec::new();
    let mut ordinals = vec![0usize; n];
    let mut collectors: HashMap<AtomId, Vec<AtomId>> = HashMap::new();
    let mut collector_order: Vec<AtomId> = Vec::new();

    for (rule_idx, rule) in expanded.iter().enumerate() {
        let head = rule.head();
        if head_count[head.index()] < 2 {
            q_rules.push(rule.clone());
            continue;
        }
        ordinals[head.index()] += 1;
        let mut name = format!("{}__{}", table.name(head), ordinals[head.index()]);
        while table.contains(&name) {
            name.push('_');
        }
        let fresh = table.intern(&name);
        q_rules.push(Rule::new(
            fresh,
            rule.body().to_vec(),
            RuleKind::Conjunctive,
        ));
        origin.push(rule_idx);
        if !collectors.contains_key(&head) {
            collector_order.push(head);
        }
        collectors.entry(head).or_default().push(fresh);
    }

    let d: Vec<Rule> = collector_order
        .into_iter()
        .map(|head| {
            Rule::new(
                head,
                collectors.remove(&head).unwrap(),
                RuleKind::Disjunctive,
            )
        })
        .collect();

    DProgram {
        q: DefiniteProgram::from_rules(table, q_rules),
        d,
        original_base: n,
        origin,
    }
}

/// Drops every member at or above `n`, shrinking the universe to `n`.
pub fn restrict_model(i: &Interpretation, n: usize) -> Interpretation {
    i.restrict(n)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TransformError {
    /// Two rules share a head.
    NotSd,
    /// A disjunctive rule where only plain conjunctive rules are meaningful.
    DisjunctiveRule,
}

impl fmt::Display for TransformError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransformError::NotSd => write!(f, "program is not singly defined"),
            TransformError::DisjunctiveRule => {
                write!(f, "partial evaluation requires conjunctive rules only")
            }
        }
    }
}

impl std::error::Error for TransformError {}

/// Unfolding context over a singly-defined program: the unique defining
/// rule per defined atom.
pub struct UnfoldContext<'a> {
    defs: Vec<Option<&'a Rule>>,
}

impl<'a> UnfoldContext<'a> {
    pub fn new(p: &'a DefiniteProgram) -> Result<Self, TransformError> {
        if !is_sd(p) {
            return Err(TransformError::NotSd);
        }
        if p.rules().iter().any(|r| r.kind() == RuleKind::Disjunctive) {
            return Err(TransformError::DisjunctiveRule);
        }
        let mut defs = vec![None; p.atom_count()];
        for rule in p.rules() {
            defs[rule.head().index()] = Some(rule);
        }
        Ok(UnfoldContext { defs })
    }

    pub fn is_defined(&self, a: AtomId) -> bool {
        self.defs[a.index()].is_some()
    }

    pub fn definition(&self, a: AtomId) -> Option<&'a Rule> {
        self.defs[a.index()]
    }
}

/// Replaces every body atom by its definition's body, or returns `None`
/// when some body atom has no defining rule at all (such a rule can never
/// fire and is dropped). Facts unfold to themselves.
pub fn unfold_rule(r: &Rule, ctx: &UnfoldContext<'_>) -> Option<Rule> {
    if r.body().iter().any(|&a| !ctx.is_defined(a)) {
        return None;
    }
    let mut body = Vec::new();
    for &a in r.body() {
        body.extend_from_slice(ctx.definition(a).unwrap().body());
    }
    Some(Rule::new(r.head(), body, RuleKind::Conjunctive))
}

/// Unfolds every rule of an SD program in parallel against the original
/// definitions, dropping rules that mention undefined atoms. The result is
/// again SD and has the same least model.
pub fn peval_symbolic(p: &DefiniteProgram) -> Result<DefiniteProgram, TransformError> {
    let ctx = UnfoldContext::new(p)?;
    let rules: Vec<Rule> = p
        .rules()
        .iter()
        .filter_map(|r| unfold_rule(r, &ctx))
        .collect();
    Ok(DefiniteProgram::from_rules(p.atoms().clone(), rules))
}

/// `k`-fold partial evaluation; `k = 0` returns the input unchanged.
pub fn peval_symbolic_iter(
    p: &DefiniteProgram,
    k: usize,
) -> Result<DefiniteProgram, TransformError> {
    let mut current = p.clone();
    for _ in 0..k {
        current = peval_symbolic(&current)?;
    }
    Ok(current)
}
