//! The formula language: AST, parser and printer.
//!
//! Surface syntax, loosest binding first:
//!
//! ```text
//! formula := iff
//! iff     := imp ("<->" imp)*                      left-assoc
//! imp     := or ("->" imp)?                        right-assoc
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := ("~" | "[]" | "<>" | "[a]" | "<a>" | "Oa" | "Oi") unary
//!          | "O" "(" formula "|" formula ")"
//!          | "viol" "(" formula ")"
//!          | "true" | "false" | ident | "(" formula ")"
//! ```
//!
//! Inside `O( … | … )` the first `|` at parenthesis depth zero separates the
//! consequent from the antecedent, so a disjunctive consequent must be
//! parenthesized: `O((A | B) | C)`.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Nesting bound for the parser; deeper input is rejected rather than
/// risking stack exhaustion.
pub const MAX_DEPTH: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(String),
    Top,
    Bottom,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    /// `[]A`: true on every potentially possible world.
    BoxStrong(Box<Formula>),
    /// `<>A`
    DiaStrong(Box<Formula>),
    /// `[a]A`: true on every actually possible world.
    BoxActual(Box<Formula>),
    /// `<a>A`
    DiaActual(Box<Formula>),
    /// `Oa A`, actual obligation.
    OblActual(Box<Formula>),
    /// `Oi A`, ideal obligation.
    OblIdeal(Box<Formula>),
    /// `O(B|A)`: consequent first, antecedent second.
    OblCond(Box<Formula>, Box<Formula>),
    /// `viol(A)`, shorthand for `Oi A & ~A`.
    Viol(Box<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn obl_cond(consequent: Formula, antecedent: Formula) -> Formula {
        Formula::OblCond(Box::new(consequent), Box::new(antecedent))
    }

    /// Atom names occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        use Formula::*;
        match self {
            Atom(name) => {
                out.insert(name.clone());
            }
            Top | Bottom => {}
            Not(f) | BoxStrong(f) | DiaStrong(f) | BoxActual(f) | DiaActual(f) | OblActual(f)
            | OblIdeal(f) | Viol(f) => f.collect_atoms(out),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) | OblCond(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        use Formula::*;
        match self {
            Iff(..) => 1,
            Implies(..) => 2,
            Or(..) => 3,
            And(..) => 4,
            _ => 5,
        }
    }
}

/// Exactly the atom names of `f`.
pub fn atoms_of(f: &Formula) -> BTreeSet<String> {
    f.atoms()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    #[error("unknown token at byte {position}")]
    UnknownToken { position: usize },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { position, .. } | ParseError::UnknownToken { position } => {
                *position
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Not,
    And,
    Or,
    Arrow,
    DoubleArrow,
    BoxStrong,
    DiaStrong,
    BoxActual,
    DiaActual,
    Oa,
    Oi,
    O,
    Viol,
    True,
    False,
    LParen,
    RParen,
    Ident(String),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(name) => format!("identifier {name}"),
            Tok::Eof => "end of input".into(),
            other => format!("{other:?}"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let rest = &bytes[i..];
        let (tok, len) = match c {
            b'~' => (Tok::Not, 1),
            b'&' => (Tok::And, 1),
            b'|' => (Tok::Or, 1),
            b'(' => (Tok::LParen, 1),
            b')' => (Tok::RParen, 1),
            b'-' if rest.starts_with(b"->") => (Tok::Arrow, 2),
            b'<' if rest.starts_with(b"<->") => (Tok::DoubleArrow, 3),
            b'<' if rest.starts_with(b"<>") => (Tok::DiaStrong, 2),
            b'<' if rest.starts_with(b"<a>") => (Tok::DiaActual, 3),
            b'[' if rest.starts_with(b"[]") => (Tok::BoxStrong, 2),
            b'[' if rest.starts_with(b"[a]") => (Tok::BoxActual, 3),
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let len = rest
                    .iter()
                    .take_while(|b| b.is_ascii_alphanumeric() || **b == b'_' || **b == b'\'')
                    .count();
                let word = &src[i..i + len];
                let tok = match word {
                    "Oa" => Tok::Oa,
                    "Oi" => Tok::Oi,
                    "O" => Tok::O,
                    "viol" => Tok::Viol,
                    "true" => Tok::True,
                    "false" => Tok::False,
                    _ => Tok::Ident(word.to_string()),
                };
                (tok, len)
            }
            _ => return Err(ParseError::UnknownToken { position: start }),
        };
        toks.push((tok, start));
        i += len;
    }
    toks.push((Tok::Eof, src.len()));
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    nesting: usize,
}

/// A parsed subtree with its height.
type Parsed = (Formula, usize);

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.pos].0.clone();
        if tok != Tok::Eof {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError::Syntax {
            position: self.offset(),
            expected: format!("{expected}, found {}", self.peek().describe()),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(what))
        }
    }

    fn check_depth(&self, depth: usize) -> Result<usize, ParseError> {
        if depth > MAX_DEPTH {
            Err(ParseError::Syntax {
                position: self.offset(),
                expected: format!("nesting depth at most {MAX_DEPTH}"),
            })
        } else {
            Ok(depth)
        }
    }

    fn binary(
        &self,
        build: fn(Formula, Formula) -> Formula,
        lhs: Parsed,
        rhs: Parsed,
    ) -> Result<Parsed, ParseError> {
        let depth = self.check_depth(1 + lhs.1.max(rhs.1))?;
        Ok((build(lhs.0, rhs.0), depth))
    }

    // `bare_or` is false while parsing the consequent of `O(…|…)`, where a
    // top-level `|` ends the consequent instead of forming a disjunction.
    fn iff(&mut self, bare_or: bool) -> Result<Parsed, ParseError> {
        let mut lhs = self.imp(bare_or)?;
        while *self.peek() == Tok::DoubleArrow {
            self.bump();
            let rhs = self.imp(bare_or)?;
            lhs = self.binary(Formula::iff, lhs, rhs)?;
        }
        Ok(lhs)
    }

    fn imp(&mut self, bare_or: bool) -> Result<Parsed, ParseError> {
        let lhs = self.or(bare_or)?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            self.enter()?;
            let rhs = self.imp(bare_or)?;
            self.nesting -= 1;
            self.binary(Formula::implies, lhs, rhs)
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self, bare_or: bool) -> Result<Parsed, ParseError> {
        let mut lhs = self.and()?;
        while bare_or && *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.and()?;
            lhs = self.binary(Formula::or, lhs, rhs)?;
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Parsed, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = self.binary(Formula::and, lhs, rhs)?;
        }
        Ok(lhs)
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.nesting += 1;
        self.check_depth(self.nesting).map(|_| ())
    }

    fn unary(&mut self) -> Result<Parsed, ParseError> {
        self.enter()?;
        let parsed = self.unary_inner()?;
        self.nesting -= 1;
        Ok(parsed)
    }

    fn unary_inner(&mut self) -> Result<Parsed, ParseError> {
        let wrap: Option<fn(Box<Formula>) -> Formula> = match self.peek() {
            Tok::Not => Some(Formula::Not),
            Tok::BoxStrong => Some(Formula::BoxStrong),
            Tok::DiaStrong => Some(Formula::DiaStrong),
            Tok::BoxActual => Some(Formula::BoxActual),
            Tok::DiaActual => Some(Formula::DiaActual),
            Tok::Oa => Some(Formula::OblActual),
            Tok::Oi => Some(Formula::OblIdeal),
            _ => None,
        };
        if let Some(wrap) = wrap {
            self.bump();
            let (inner, depth) = self.unary()?;
            return Ok((wrap(Box::new(inner)), self.check_depth(depth + 1)?));
        }
        if *self.peek() == Tok::Eof {
            return Err(self.error("a formula"));
        }
        match self.bump() {
            Tok::O => {
                self.expect(Tok::LParen, "'(' after O")?;
                let consequent = self.iff(false)?;
                self.expect(Tok::Or, "'|' in O(B|A)")?;
                let antecedent = self.iff(true)?;
                self.expect(Tok::RParen, "')' closing O(B|A)")?;
                self.binary(Formula::obl_cond, consequent, antecedent)
            }
            Tok::Viol => {
                self.expect(Tok::LParen, "'(' after viol")?;
                let (inner, depth) = self.iff(true)?;
                self.expect(Tok::RParen, "')' closing viol(…)")?;
                Ok((Formula::Viol(Box::new(inner)), self.check_depth(depth + 1)?))
            }
            Tok::True => Ok((Formula::Top, 1)),
            Tok::False => Ok((Formula::Bottom, 1)),
            Tok::Ident(name) => Ok((Formula::Atom(name), 1)),
            Tok::LParen => {
                let inner = self.iff(true)?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            _ => {
                self.pos -= 1;
                Err(self.error("a formula"))
            }
        }
    }
}

/// Parses a formula. Whitespace between tokens is ignored.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        nesting: 0,
    };
    let (f, _) = parser.iff(true)?;
    if *parser.peek() != Tok::Eof {
        return Err(parser.error("end of input"));
    }
    Ok(f)
}

/// Canonical text with the fewest parentheses the grammar allows.
pub fn render_formula(f: &Formula) -> String {
    let mut out = String::new();
    render_into(f, &mut out);
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_formula(self))
    }
}

fn render_into(f: &Formula, out: &mut String) {
    use Formula::*;
    match f {
        Atom(name) => out.push_str(name),
        Top => out.push_str("true"),
        Bottom => out.push_str("false"),
        Not(g) => prefix("~", g, out),
        BoxStrong(g) => prefix("[]", g, out),
        DiaStrong(g) => prefix("<>", g, out),
        BoxActual(g) => prefix("[a]", g, out),
        DiaActual(g) => prefix("<a>", g, out),
        OblActual(g) => keyword_prefix("Oa", g, out),
        OblIdeal(g) => keyword_prefix("Oi", g, out),
        OblCond(b, a) => {
            out.push_str("O(");
            let consequent = render_formula(b);
            if has_bare_bar(&consequent) {
                out.push('(');
                out.push_str(&consequent);
                out.push(')');
            } else {
                out.push_str(&consequent);
            }
            out.push('|');
            render_into(a, out);
            out.push(')');
        }
        Viol(g) => {
            out.push_str("viol(");
            render_into(g, out);
            out.push(')');
        }
        And(a, b) => infix(f, a, b, " & ", false, out),
        Or(a, b) => infix(f, a, b, " | ", false, out),
        Implies(a, b) => infix(f, a, b, " -> ", true, out),
        Iff(a, b) => infix(f, a, b, " <-> ", false, out),
    }
}

fn prefix(op: &str, operand: &Formula, out: &mut String) {
    out.push_str(op);
    child(operand, operand.precedence() < 5, out);
}

// Keyword operators need a separator so `Oa A` does not lex as `OaA`.
fn keyword_prefix(op: &str, operand: &Formula, out: &mut String) {
    out.push_str(op);
    if operand.precedence() < 5 {
        child(operand, true, out);
    } else {
        out.push(' ');
        render_into(operand, out);
    }
}

fn infix(
    node: &Formula,
    lhs: &Formula,
    rhs: &Formula,
    op: &str,
    right_assoc: bool,
    out: &mut String,
) {
    let p = node.precedence();
    let (lp, rp) = (lhs.precedence(), rhs.precedence());
    let (lhs_parens, rhs_parens) = if right_assoc {
        (lp <= p, rp < p)
    } else {
        (lp < p, rp <= p)
    };
    child(lhs, lhs_parens, out);
    out.push_str(op);
    child(rhs, rhs_parens, out);
}

fn child(f: &Formula, parens: bool, out: &mut String) {
    if parens {
        out.push('(');
        render_into(f, out);
        out.push(')');
    } else {
        render_into(f, out);
    }
}

fn has_bare_bar(text: &str) -> bool {
    let mut depth = 0usize;
    for c in text.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            '|' if depth == 0 => return true,
            _ => {}
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: &str) -> Formula {
        Formula::atom(n)
    }

    #[test]
    fn parses_counter_model_formula() {
        let f = parse_formula("O(B|A) & <>A & []~B").unwrap();
        let expected = Formula::and(
            Formula::and(
                Formula::obl_cond(a("B"), a("A")),
                Formula::DiaStrong(Box::new(a("A"))),
            ),
            Formula::BoxStrong(Box::new(Formula::not(a("B")))),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn parses_constants() {
        assert_eq!(parse_formula("true").unwrap(), Formula::Top);
        assert_eq!(parse_formula(" false ").unwrap(), Formula::Bottom);
    }

    #[test]
    fn implication_is_right_associative() {
        let f = parse_formula("A -> B -> C").unwrap();
        assert_eq!(
            f,
            Formula::implies(a("A"), Formula::implies(a("B"), a("C")))
        );
    }

    #[test]
    fn iff_is_left_associative() {
        let f = parse_formula("A <-> B <-> C").unwrap();
        assert_eq!(f, Formula::iff(Formula::iff(a("A"), a("B")), a("C")));
    }

    #[test]
    fn precedence_ladder() {
        let f = parse_formula("A | B & C -> D <-> E").unwrap();
        let expected = Formula::iff(
            Formula::implies(Formula::or(a("A"), Formula::and(a("B"), a("C"))), a("D")),
            a("E"),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn modalities_bind_tightest() {
        let f = parse_formula("[a]A & <a>~B | Oa C").unwrap();
        let expected = Formula::or(
            Formula::and(
                Formula::BoxActual(Box::new(a("A"))),
                Formula::DiaActual(Box::new(Formula::not(a("B")))),
            ),
            Formula::OblActual(Box::new(a("C"))),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn conditional_splits_at_first_bar() {
        let f = parse_formula("O(A | B | C)").unwrap();
        assert_eq!(f, Formula::obl_cond(a("A"), Formula::or(a("B"), a("C"))));
        let g = parse_formula("O((A | B) | C)").unwrap();
        assert_eq!(g, Formula::obl_cond(Formula::or(a("A"), a("B")), a("C")));
    }

    #[test]
    fn renders_canonically() {
        assert_eq!(render_formula(&Formula::obl_cond(a("B"), a("A"))), "O(B|A)");
        assert_eq!(
            render_formula(&Formula::not(Formula::and(a("A"), a("B")))),
            "~(A & B)"
        );
        assert_eq!(
            render_formula(&Formula::Viol(Box::new(Formula::not(a("A"))))),
            "viol(~A)"
        );
        assert_eq!(
            render_formula(&Formula::OblActual(Box::new(a("Fence")))),
            "Oa Fence"
        );
        assert_eq!(
            render_formula(&Formula::OblIdeal(Box::new(Formula::and(a("A"), a("B"))))),
            "Oi(A & B)"
        );
        assert_eq!(
            render_formula(&Formula::obl_cond(Formula::or(a("A"), a("B")), a("C"))),
            "O((A | B)|C)"
        );
        assert_eq!(
            render_formula(&Formula::implies(Formula::implies(a("A"), a("B")), a("C"))),
            "(A -> B) -> C"
        );
    }

    #[test]
    fn atoms_collects_names() {
        let names =
            |s: &str| -> Vec<String> { atoms_of(&parse_formula(s).unwrap()).into_iter().collect() };
        assert_eq!(names("O(B|A)"), vec!["A", "B"]);
        assert!(names("true").is_empty());
        assert_eq!(names("viol(~D) & Oa F"), vec!["D", "F"]);
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse_formula("A & $").unwrap_err(),
            ParseError::UnknownToken { position: 4 }
        );
        let err = parse_formula("A &").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { position: 3, .. }));
        let err = parse_formula("O(A)").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { position: 3, .. }));
        assert!(parse_formula("A B").is_err());
        assert!(parse_formula("").is_err());
        assert!(parse_formula(")").is_err());
    }

    #[test]
    fn deep_nesting_is_rejected_not_overflowed() {
        let deep = format!("{}A{}", "(".repeat(10_000), ")".repeat(10_000));
        assert!(parse_formula(&deep).is_err());
        let negs = format!("{}A", "~".repeat(10_000));
        assert!(parse_formula(&negs).is_err());
        let chain = "A & ".repeat(100_000) + "A";
        assert!(parse_formula(&chain).is_err());
        let chain = "O(".repeat(1000) + "A";
        assert!(parse_formula(&chain).is_err());
        let arrows = "A -> ".repeat(10_000) + "A";
        assert!(parse_formula(&arrows).is_err());
    }
}
