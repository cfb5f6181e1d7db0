//! The immediate-consequence operator and the model checks built on it.
//! This is the symbolic reference implementation every matrix engine is
//! validated against.

use super::{ConstraintSet, DefiniteProgram, Interpretation, RuleKind};

/// One application of the immediate-consequence operator: heads of
/// conjunctive rules whose whole body holds, plus heads of disjunctive
/// rules with at least one true body atom. Facts fire unconditionally.
pub fn tp_step(p: &DefiniteProgram, i: &Interpretation) -> Interpretation {
    assert_eq!(i.universe(), p.atom_count());
    let mut next = Interpretation::empty(p.atom_count());
    for rule in p.rules() {
        let fires = match rule.kind() {
            RuleKind::Conjunctive => rule.body().iter().all(|&a| i.contains(a)),
            RuleKind::Disjunctive => rule.body().iter().any(|&a| i.contains(a)),
        };
        if fires {
            next.insert(rule.head());
        }
    }
    next
}

/// Iterates `tp_step` from the fact set until it stabilizes. Returns the
/// least model and the number of operator applications, counting the final
/// application that certifies the fixpoint.
pub fn tp_least_model(p: &DefiniteProgram) -> (Interpretation, usize) {
    let mut current = p.facts().clone();
    let mut iterations = 0;
    loop {
        let next = tp_step(p, &current);
        iterations += 1;
        if next == current {
            return (next, iterations);
        }
        current = next;
    }
}

/// True when `i` is closed under every rule of `p`.
pub fn is_model(p: &DefiniteProgram, i: &Interpretation) -> bool {
    assert_eq!(i.universe(), p.atom_count());
    p.rules().iter().all(|rule| {
        let applicable = match rule.kind() {
            RuleKind::Conjunctive => rule.body().iter().all(|&a| i.contains(a)),
            RuleKind::Disjunctive => rule.body().iter().any(|&a| i.contains(a)),
        };
        !applicable || i.contains(rule.head())
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstraintOutcome {
    Consistent,
    /// Indices into the constraint set whose bodies are fully contained in
    /// the interpretation.
    Violated(Vec<usize>),
}

/// Checks constraints against an interpretation: a constraint is violated
/// exactly when its whole body holds.
pub fn check_constraints_symbolic(c: &ConstraintSet, i: &Interpretation) -> ConstraintOutcome {
    let violated: Vec<usize> = c
        .bodies()
        .iter()
        .enumerate()
        .filter(|(_, body)| {
            body.iter()
                .all(|&a| a.index() < i.universe() && i.contains(a))
        })
        .map(|(idx, _)| idx)
        .collect();
    if violated.is_empty() {
        ConstraintOutcome::Consistent
    } else {
        ConstraintOutcome::Violated(violated)
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_program;
    use super::*;

    const EXAMPLE_1: &str = "p :- q.\nq :- p, r.\nr :- s.\ns.\n";
    const EXAMPLE_3: &str = "p :- q.\nq :- p, r.\nq :- s.\ns.\n";

    fn interp(p: &DefiniteProgram, names: &[&str]) -> Interpretation {
        Interpretation::from_atoms(
            p.atom_count(),
            names.iter().map(|n| p.atoms().lookup(n).unwrap()),
        )
    }

    #[test]
    fn tp_step_fires_only_facts_on_empty() {
        let (p, _) = parse_program(EXAMPLE_1).unwrap();
        let out = tp_step(&p, &Interpretation::empty(p.atom_count()));
        assert_eq!(out, interp(&p, &["s"]));
    }

    #[test]
    fn tp_step_from_fact_set() {
        let (p, _) = parse_program(EXAMPLE_1).unwrap();
        let out = tp_step(&p, &interp(&p, &["s"]));
        assert_eq!(out, interp(&p, &["r", "s"]));
    }

    #[test]
    fn tp_step_reaches_fixpoint() {
        let (p, _) = parse_program(EXAMPLE_1).unwrap();
        let fix = interp(&p, &["r", "s"]);
        assert_eq!(tp_step(&p, &fix), fix);
    }

    #[test]
    fn least_model_of_example_1() {
        let (p, _) = parse_program(EXAMPLE_1).unwrap();
        let (m, iters) = tp_least_model(&p);
        assert_eq!(m, interp(&p, &["r", "s"]));
        assert_eq!(iters, 2);
    }

    #[test]
    fn least_model_of_example_3() {
        let (p, _) = parse_program(EXAMPLE_3).unwrap();
        let (m, _) = tp_least_model(&p);
        assert_eq!(m, interp(&p, &["p", "q", "s"]));
    }

    #[test]
    fn least_model_without_facts_is_empty() {
        let (p, _) = parse_program("p :- q.\nq :- p.\n").unwrap();
        let (m, iters) = tp_least_model(&p);
        assert!(m.is_empty_set());
        assert_eq!(iters, 1);
    }

    #[test]
    fn disjunctive_rule_fires_on_intersection() {
        let (p, _) = parse_program("q :- t ; u.\nt.\n").unwrap();
        let (m, _) = tp_least_model(&p);
        assert_eq!(m, interp(&p, &["q", "t"]));
    }

    #[test]
    fn model_checks() {
        let (p, _) = parse_program(EXAMPLE_1).unwrap();
        assert!(is_model(&p, &interp(&p, &["r", "s"])));
        assert!(!is_model(&p, &interp(&p, &["s"])));
        assert!(is_model(&p, &interp(&p, &["p", "q", "r", "s"])));
    }

    #[test]
    fn constraint_checks() {
        let (p, c) = parse_program(&format!("{EXAMPLE_1}:- r.\n")).unwrap();
        let fix = interp(&p, &["r", "s"]);
        assert_eq!(
            check_constraints_symbolic(&c, &fix),
            ConstraintOutcome::Violated(vec![0])
        );
        assert_eq!(
            check_constraints_symbolic(&ConstraintSet::new(), &fix),
            ConstraintOutcome::Consistent
        );
        let (p2, c2) = parse_program("p.\nq :- p.\n:- p, q2.\nq2.\n").unwrap();
        let only_p = interp(&p2, &["p"]);
        assert_eq!(
            check_constraints_symbolic(&c2, &only_p),
            ConstraintOutcome::Consistent
        );
    }
}
