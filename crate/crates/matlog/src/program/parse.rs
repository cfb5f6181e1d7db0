//! Line-oriented text format for programs and constraints.
//!
//! `%` starts a comment, facts are `p.`, conjunctive rules
//! `h :- b1, b2.`, disjunctive rules `h :- b1 ; b2.` and constraints
//! `:- b1, b2.`. Atom names match `[a-z][A-Za-z0-9_]*`. Mixing `,` and
//! `;` within one body is rejected.

use std::fmt;

use super::{AtomTable, ConstraintSet, DefiniteProgram, Rule, RuleKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// A character that cannot start any token, or an identifier that does
    /// not start with a lowercase letter.
    UnknownToken(String),
    /// A statement beginning with `.`: there is neither head nor body.
    EmptyHead,
    /// `,` and `;` mixed within a single rule body.
    MixedSeparators,
    /// Anything else: what was expected versus what was found.
    Expected(&'static str, String),
}

/// Parse failure with 1-based line and column of the offending token.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.line, self.col)?;
        match &self.kind {
            ParseErrorKind::UnknownToken(t) => write!(f, "unknown token `{t}`"),
            ParseErrorKind::EmptyHead => write!(f, "statement has no head atom"),
            ParseErrorKind::MixedSeparators => {
                write!(f, "`,` and `;` cannot be mixed in one body")
            }
            ParseErrorKind::Expected(what, got) => {
                write!(f, "expected {what}, found `{got}`")
            }
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Ident(String),
    Arrow, // :-
    Comma,
    Semicolon,
    Dot,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Ident(s) => s.clone(),
            Token::Arrow => ":-".into(),
            Token::Comma => ",".into(),
            Token::Semicolon => ";".into(),
            Token::Dot => ".".into(),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn err(&self, kind: ParseErrorKind, line: usize, col: usize) -> ParseError {
        ParseError { line, col, kind }
    }

    /// Next token with its source position, or `None` at end of input.
    fn next_token(&mut self) -> Result<Option<(Token, usize, usize)>, ParseError> {
        loop {
            match self.chars.peek() {
                None => return Ok(None),
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('%') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                Some(_) => break,
            }
        }
        let line = self.line;
        let col = self.col;
        let c = self.bump().unwrap();
        let token = match c {
            '.' => Token::Dot,
            ',' => Token::Comma,
            ';' => Token::Semicolon,
            ':' => {
                if self.chars.peek() == Some(&'-') {
                    self.bump();
                    Token::Arrow
                } else {
                    let got = match self.chars.peek() {
                        Some(&c2) => format!(":{c2}"),
                        None => ":".into(),
                    };
                    return Err(self.err(ParseErrorKind::UnknownToken(got), line, col));
                }
            }
            'a'..='z' => {
                let mut name = String::new();
                name.push(c);
                while let Some(&c2) = self.chars.peek() {
                    if c2.is_ascii_alphanumeric() || c2 == '_' {
                        name.push(c2);
                        self.bump();
                    } else {
                        break;
                    }
                }
                Token::Ident(name)
            }
            other => {
                let mut tok = String::new();
                tok.push(other);
                // Gather the rest of a malformed word so the message shows it whole.
                while let Some(&c2) = self.chars.peek() {
                    if c2.is_ascii_alphanumeric() || c2 == '_' {
                        tok.push(c2);
                        self.bump();
                    } else {
                        break;
                    }
                }
                return Err(self.err(ParseErrorKind::UnknownToken(tok), line, col));
            }
        };
        Ok(Some((token, line, col)))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    table: AtomTable,
    rules: Vec<Rule>,
    constraints: ConstraintSet,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, table: AtomTable) -> Self {
        Parser {
            lexer: Lexer::new(text),
            table,
            rules: Vec::new(),
            constraints: ConstraintSet::new(),
        }
    }

    fn expect_err(&self, what: &'static str, tok: Option<&(Token, usize, usize)>) -> ParseError {
        match tok {
            Some((t, line, col)) => ParseError {
                line: *line,
                col: *col,
                kind: ParseErrorKind::Expected(what, t.describe()),
            },
            None => ParseError {
                line: self.lexer.line,
                col: self.lexer.col,
                kind: ParseErrorKind::Expected(what, "end of input".into()),
            },
        }
    }

    /// Body after `:-`: one or more atoms joined consistently by `,` or `;`.
    /// Returns the atom ids and the kind implied by the separator.
    fn parse_body(&mut self) -> Result<(Vec<super::AtomId>, RuleKind), ParseError> {
        let mut atoms = Vec::new();
        let mut kind = RuleKind::Conjunctive;
        let mut separator: Option<Token> = None;
        loop {
            let tok = self.lexer.next_token()?;
            match tok {
                Some((Token::Ident(name), _, _)) => atoms.push(self.table.intern(&name)),
                other => return Err(self.expect_err("an atom", other.as_ref())),
            }
            let tok = self.lexer.next_token()?;
            match tok {
                Some((Token::Dot, _, _)) => return Ok((atoms, kind)),
                Some((sep @ (Token::Comma | Token::Semicolon), line, col)) => match &separator {
                    None => {
                        kind = if sep == Token::Semicolon {
                            RuleKind::Disjunctive
                        } else {
                            RuleKind::Conjunctive
                        };
                        separator = Some(sep);
                    }
                    Some(first) if *first != sep => {
                        return Err(ParseError {
                            line,
                            col,
                            kind: ParseErrorKind::MixedSeparators,
                        })
                    }
                    Some(_) => {}
                },
                other => return Err(self.expect_err("`,`, `;` or `.`", other.as_ref())),
            }
        }
    }

    /// One statement. Returns false at end of input.
    fn parse_statement(&mut self) -> Result<bool, ParseError> {
        let tok = match self.lexer.next_token()? {
            None => return Ok(false),
            Some(t) => t,
        };
        match tok {
            (Token::Ident(head), _, _) => {
                let head = self.table.intern(&head);
                match self.lexer.next_token()? {
                    Some((Token::Dot, _, _)) => self.rules.push(Rule::fact(head)),
                    Some((Token::Arrow, _, _)) => {
                        let (body, kind) = self.parse_body()?;
                        self.rules.push(Rule::new(head, body, kind));
                    }
                    other => return Err(self.expect_err("`.` or `:-`", other.as_ref())),
                }
            }
            (Token::Arrow, line, col) => {
                let (body, kind) = self.parse_body()?;
                if kind == RuleKind::Disjunctive {
                    // A disjunctive constraint would be shorthand for several
                    // constraints; the format does not admit it.
                    return Err(ParseError {
                        line,
                        col,
                        kind: ParseErrorKind::Expected("a conjunctive constraint body", ";".into()),
                    });
                }
                self.constraints.push(body);
            }
            (Token::Dot, line, col) => {
                return Err(ParseError {
                    line,
                    col,
                    kind: ParseErrorKind::EmptyHead,
                })
            }
            (t, line, col) => {
                return Err(ParseError {
                    line,
                    col,
                    kind: ParseErrorKind::Expected("an atom or `:-`", t.describe()),
                })
            }
        }
        Ok(true)
    }

    fn run(mut self) -> Result<(DefiniteProgram, ConstraintSet), ParseError> {
        while self.parse_statement()? {}
        Ok((
            DefiniteProgram::from_rules(self.table, self.rules),
            self.constraints,
        ))
    }
}

/// Parses a program file. Atom ids follow first appearance in the text;
/// duplicate body atoms and duplicate rules are collapsed.
pub fn parse_program(text: &str) -> Result<(DefiniteProgram, ConstraintSet), ParseError> {
    Parser::new(text, AtomTable::new()).run()
}

/// Parses a constraints-only file against an existing atom table, extending
/// the table with any new atoms. Rules or facts in the text are rejected.
pub fn parse_constraints_only(
    text: &str,
    table: AtomTable,
) -> Result<(AtomTable, ConstraintSet), ParseError> {
    let mut parser = Parser::new(text, table);
    loop {
        let (line, col) = (parser.lexer.line, parser.lexer.col);
        if !parser.parse_statement()? {
            break;
        }
        if !parser.rules.is_empty() {
            return Err(ParseError {
                line,
                col,
                kind: ParseErrorKind::Expected("a constraint", "a rule".into()),
            });
        }
    }
    Ok((parser.table, parser.constraints))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(prog: &DefiniteProgram, names: &[&str]) -> Vec<super::super::AtomId> {
        names
            .iter()
            .map(|n| prog.atoms().lookup(n).expect("atom interned"))
            .collect()
    }

    #[test]
    fn parses_fact_and_rule() {
        let (p, c) = parse_program("s.\nr :- s.\n").unwrap();
        assert!(c.is_empty());
        assert_eq!(p.atom_count(), 2);
        assert_eq!(p.rules().len(), 2);
        let v = ids(&p, &["s", "r"]);
        assert!(p.facts().contains(v[0]));
        assert_eq!(p.rules()[1].head(), v[1]);
        assert_eq!(p.rules()[1].body(), &[v[0]]);
    }

    #[test]
    fn parses_four_rule_program_in_text_order() {
        let (p, _) = parse_program("p :- q.\nq :- p, r.\nr :- s.\ns.\n").unwrap();
        assert_eq!(p.atom_count(), 4);
        assert_eq!(p.rules().len(), 4);
        // Interning follows first appearance: p, q, r, s.
        assert_eq!(p.atoms().name(super::super::AtomId::new(0)), "p");
        assert_eq!(p.atoms().name(super::super::AtomId::new(3)), "s");
    }

    #[test]
    fn deduplicates_body_atoms() {
        let (p, _) = parse_program("p :- q, q.").unwrap();
        assert_eq!(p.rules()[0].body().len(), 1);
    }

    #[test]
    fn parses_disjunctive_rule() {
        let (p, _) = parse_program("h :- t ; u.").unwrap();
        assert_eq!(p.rules()[0].kind(), RuleKind::Disjunctive);
        assert_eq!(p.rules()[0].body().len(), 2);
    }

    #[test]
    fn parses_constraint_with_shared_table() {
        let (p, c) = parse_program("p.\n:- p, q.\n").unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(p.atom_count(), 2); // q interned even though unused by rules
        assert_eq!(c.bodies()[0].len(), 2);
    }

    #[test]
    fn comments_are_ignored() {
        let (p, _) = parse_program("% a comment\np. % trailing\n% another\n").unwrap();
        assert_eq!(p.rules().len(), 1);
    }

    #[test]
    fn mixed_separators_are_rejected_with_position() {
        let err = parse_program("h :- a, b ; c.").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::MixedSeparators);
        assert_eq!((err.line, err.col), (1, 11));
    }

    #[test]
    fn uppercase_start_is_unknown_token() {
        let err = parse_program("p :- Q.").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::UnknownToken(ref t) if t == "Q"));
        assert_eq!((err.line, err.col), (1, 6));
    }

    #[test]
    fn lone_dot_reports_empty_head() {
        let err = parse_program("p.\n.\n").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::EmptyHead);
        assert_eq!(err.line, 2);
    }

    #[test]
    fn missing_dot_reports_position() {
        let err = parse_program("p :- q").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Expected(_, _)));
    }

    #[test]
    fn empty_constraint_body_is_rejected() {
        assert!(parse_program(":- .").is_err());
    }

    #[test]
    fn constraints_only_rejects_rules() {
        let (p, _) = parse_program("p.").unwrap();
        let err = parse_constraints_only("q :- p.", p.atoms().clone()).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Expected(_, _)));
        let (_, c) = parse_constraints_only(":- p.", p.atoms().clone()).unwrap();
        assert_eq!(c.len(), 1);
    }
}
