//! Textual output in the same format the parser accepts.

use std::fmt::Write;

use super::{ConstraintSet, DefiniteProgram, RuleKind};

/// Serializes a program, one rule per line. Parsing the output yields a
/// structurally equal program (atom ids follow rule order, bodies are
/// already sorted and deduplicated).
pub fn serialize_program(p: &DefiniteProgram) -> String {
    let mut out = String::new();
    for rule in p.rules() {
        let head = p.atoms().name(rule.head());
        if rule.is_fact() {
            writeln!(out, "{head}.").unwrap();
            continue;
        }
        let sep = match rule.kind() {
            RuleKind::Conjunctive => ", ",
            RuleKind::Disjunctive => " ; ",
        };
        let body: Vec<&str> = rule.body().iter().map(|&a| p.atoms().name(a)).collect();
        writeln!(out, "{head} :- {}.", body.join(sep)).unwrap();
    }
    out
}

/// Serializes constraints as `:- b1, b2.` lines, using the given program's
/// atom table for names.
pub fn serialize_constraints(c: &ConstraintSet, p: &DefiniteProgram) -> String {
    let mut out = String::new();
    for body in c.bodies() {
        let names: Vec<&str> = body.iter().map(|&a| p.atoms().name(a)).collect();
        writeln!(out, ":- {}.", names.join(", ")).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::parse_program;
    use super::*;

    #[test]
    fn round_trip_is_identity() {
        let text = "p :- q.\nq :- p, r.\nr :- s.\ns.\n";
        let (p, _) = parse_program(text).unwrap();
        assert_eq!(serialize_program(&p), text);
        let (p2, _) = parse_program(&serialize_program(&p)).unwrap();
        assert_eq!(p, p2);
    }

    #[test]
    fn empty_program_serializes_to_empty_string() {
        let (p, _) = parse_program("").unwrap();
        assert_eq!(serialize_program(&p), "");
    }

    #[test]
    fn disjunctive_rule_uses_semicolons() {
        let (p, _) = parse_program("h :- t ; u.").unwrap();
        assert_eq!(serialize_program(&p), "h :- t ; u.\n");
    }

    #[test]
    fn constraints_round_trip() {
        let text = "p.\nq :- p.\n:- p, q.\n";
        let (p, c) = parse_program(text).unwrap();
        let merged = format!("{}{}", serialize_program(&p), serialize_constraints(&c, &p));
        let (p2, c2) = parse_program(&merged).unwrap();
        assert_eq!(p, p2);
        assert_eq!(c, c2);
    }
}
