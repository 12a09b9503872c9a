//! Reader for the problem format.
//!
//! ```text
//! % comment
//! formula(step, axiom, ![X]: (p(X) => p(s(X)))).
//! clause(c36, ~bew(X) | ~bew(not(X))).
//! model(bew, head(0, r)).
//! ```
//!
//! Binding strength, tightest first: `~` and quantifiers, `&`, `|`, `=>`,
//! `<=>`. The last two associate to the right.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::formula::Formula;
use crate::oracle::{Interpretation, Rule};
use crate::syntax::{Clause, Literal, Term, EMPTY_CLAUSE_TEXT};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("{line}:{col}: {kind} `{symbol}` used with arity {found}, previously {expected}")]
    Arity { line: usize, col: usize, kind: SymbolKind, symbol: String, expected: usize, found: usize },
    #[error("{line}:{col}: duplicate statement name `{name}`")]
    NameCollision { line: usize, col: usize, name: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SymbolKind {
    Predicate,
    Functor,
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymbolKind::Predicate => "predicate",
            SymbolKind::Functor => "functor",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Axiom,
    Conjecture,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Axiom => "axiom",
            Role::Conjecture => "conjecture",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedFormula {
    pub name: String,
    pub role: Role,
    pub formula: Formula,
}

/// Parsed problem: annotated formulas and clauses, in file order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Problem {
    pub formulas: Vec<NamedFormula>,
    pub clauses: Vec<Clause>,
}

impl Problem {
    pub fn axioms(&self) -> impl Iterator<Item = &NamedFormula> {
        self.formulas.iter().filter(|f| f.role == Role::Axiom)
    }

    pub fn conjectures(&self) -> impl Iterator<Item = &NamedFormula> {
        self.formulas.iter().filter(|f| f.role == Role::Conjecture)
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty() && self.clauses.is_empty()
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for nf in &self.formulas {
            writeln!(f, "formula({}, {}, {}).", nf.name, nf.role, nf.formula)?;
        }
        for c in &self.clauses {
            writeln!(f, "clause({}, {}).", c.name().unwrap_or("_"), c.text())?;
        }
        Ok(())
    }
}

pub fn parse_problem(text: &str) -> Result<Problem, ParseError> {
    let mut p = Parser::new(text)?;
    let mut problem = Problem::default();
    let mut names = BTreeSet::new();
    while !p.at_end() {
        let (line, col) = p.position();
        let keyword = p.lower_ident("statement keyword")?;
        p.expect(Tok::LParen)?;
        let name = p.name()?;
        if !names.insert(name.clone()) {
            return Err(ParseError::NameCollision { line, col, name });
        }
        p.expect(Tok::Comma)?;
        match keyword.as_str() {
            "formula" => {
                let role = match p.lower_ident("role")?.as_str() {
                    "axiom" => Role::Axiom,
                    "conjecture" => Role::Conjecture,
                    other => return Err(p.error_here(format!("unknown role `{other}`"))),
                };
                p.expect(Tok::Comma)?;
                let formula = p.formula()?;
                problem.formulas.push(NamedFormula { name, role, formula });
            }
            "clause" => {
                let literals = p.clause()?;
                let id = problem.clauses.len();
                problem.clauses.push(Clause::input(id, name, literals));
            }
            other => return Err(ParseError::Syntax { line, col, message: format!("unknown statement `{other}`") }),
        }
        p.expect(Tok::RParen)?;
        p.expect(Tok::Dot)?;
    }
    Ok(problem)
}

/// Reads `model(pred, rule).` statements into an interpretation.
pub fn parse_model(text: &str) -> Result<Interpretation, ParseError> {
    let mut p = Parser::new(text)?;
    let mut rules = BTreeMap::new();
    while !p.at_end() {
        let (line, col) = p.position();
        let keyword = p.lower_ident("statement keyword")?;
        if keyword != "model" {
            return Err(ParseError::Syntax { line, col, message: format!("expected `model`, found `{keyword}`") });
        }
        p.expect(Tok::LParen)?;
        let (line, col) = p.position();
        let pred = p.lower_ident("predicate")?;
        if rules.contains_key(&pred) {
            return Err(ParseError::NameCollision { line, col, name: pred });
        }
        p.expect(Tok::Comma)?;
        let rule = p.rule()?;
        p.expect(Tok::RParen)?;
        p.expect(Tok::Dot)?;
        rules.insert(pred, rule);
    }
    Ok(Interpretation::from_rules(rules))
}

/// Parses a single term, e.g. `s(s(X))`.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

/// Parses clause text (`lit | lit | ...`, or `$false` for the empty clause).
pub fn parse_clause_text(text: &str) -> Result<Vec<Literal>, ParseError> {
    let mut p = Parser::new(text)?;
    let lits = p.clause()?;
    p.finish()?;
    Ok(lits)
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Lower(String),
    Upper(String),
    Number(String),
    False,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Dot,
    Colon,
    Bang,
    Question,
    Tilde,
    Amp,
    Pipe,
    Implies,
    Iff,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Lower(s) | Tok::Upper(s) | Tok::Number(s) => write!(f, "`{s}`"),
            Tok::False => write!(f, "`{EMPTY_CLAUSE_TEXT}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrack => f.write_str("`[`"),
            Tok::RBrack => f.write_str("`]`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Question => f.write_str("`?`"),
            Tok::Tilde => f.write_str("`~`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Pipe => f.write_str("`|`"),
            Tok::Implies => f.write_str("`=>`"),
            Tok::Iff => f.write_str("`<=>`"),
        }
    }
}

struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<(Vec<Spanned>, (usize, usize)), ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let is_ident = |c: char| c.is_ascii_alphanumeric() || c == '_';
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            _ => {}
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBrack),
            ']' => Some(Tok::RBrack),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            ':' => Some(Tok::Colon),
            '!' => Some(Tok::Bang),
            '?' => Some(Tok::Question),
            '~' => Some(Tok::Tilde),
            '&' => Some(Tok::Amp),
            '|' => Some(Tok::Pipe),
            _ => None,
        };
        let starts = |s: &str| chars[i..].iter().take(s.len()).copied().eq(s.chars());
        let (tok, len) = if let Some(t) = single {
            (t, 1)
        } else if starts("=>") {
            (Tok::Implies, 2)
        } else if starts("<=>") {
            (Tok::Iff, 3)
        } else if starts(EMPTY_CLAUSE_TEXT) && !chars.get(i + EMPTY_CLAUSE_TEXT.len()).copied().is_some_and(is_ident) {
            (Tok::False, EMPTY_CLAUSE_TEXT.len())
        } else if is_ident(c) {
            let len = chars[i..].iter().take_while(|&&c| is_ident(c)).count();
            let word: String = chars[i..i + len].iter().collect();
            let tok = if c.is_ascii_uppercase() {
                Tok::Upper(word)
            } else if c.is_ascii_digit() {
                Tok::Number(word)
            } else if c == '_' {
                return Err(ParseError::Syntax {
                    line: l0,
                    col: c0,
                    message: "identifier may not start with `_`".into(),
                });
            } else {
                Tok::Lower(word)
            };
            (tok, len)
        } else {
            return Err(ParseError::Syntax { line: l0, col: c0, message: format!("unexpected character `{c}`") });
        };
        i += len;
        col += len;
        out.push(Spanned { tok, line: l0, col: c0 });
    }
    Ok((out, (line, col)))
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    eof: (usize, usize),
    arities: BTreeMap<(SymbolKind, String), usize>,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        let (toks, eof) = lex(text)?;
        Ok(Parser { toks, pos: 0, eof, arities: BTreeMap::new() })
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn position(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|t| (t.line, t.col)).unwrap_or(self.eof)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn error_here(&self, message: String) -> ParseError {
        let (line, col) = self.position();
        ParseError::Syntax { line, col, message }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(t) => self.error_here(format!("expected {wanted}, found {t}")),
            None => self.error_here(format!("expected {wanted}, found end of input")),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn lower_ident(&mut self, wanted: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Lower(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    fn name(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Lower(s) | Tok::Upper(s) | Tok::Number(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected("statement name")),
        }
    }

    fn check_arity(
        &mut self,
        kind: SymbolKind,
        symbol: &str,
        arity: usize,
        at: (usize, usize),
    ) -> Result<(), ParseError> {
        match self.arities.get(&(kind, symbol.to_string())) {
            Some(&expected) if expected != arity => Err(ParseError::Arity {
                line: at.0,
                col: at.1,
                kind,
                symbol: symbol.to_string(),
                expected,
                found: arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.arities.insert((kind, symbol.to_string()), arity);
                Ok(())
            }
        }
    }

    fn args(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) {
            loop {
                args.push(self.term()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::RParen)?;
        }
        Ok(args)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let at = self.position();
        match self.peek().cloned() {
            Some(Tok::Upper(v)) => {
                self.pos += 1;
                Ok(Term::Var(v))
            }
            Some(Tok::Lower(f) | Tok::Number(f)) => {
                self.pos += 1;
                let args = self.args()?;
                self.check_arity(SymbolKind::Functor, &f, args.len(), at)?;
                Ok(Term::App(f, args))
            }
            _ => Err(self.unexpected("term")),
        }
    }

    fn atom(&mut self) -> Result<(String, Vec<Term>), ParseError> {
        let at = self.position();
        let pred = self.lower_ident("atom")?;
        let args = self.args()?;
        self.check_arity(SymbolKind::Predicate, &pred, args.len(), at)?;
        Ok((pred, args))
    }

    fn clause(&mut self) -> Result<Vec<Literal>, ParseError> {
        if self.eat(&Tok::False) {
            return Ok(Vec::new());
        }
        let mut lits = Vec::new();
        loop {
            let positive = !self.eat(&Tok::Tilde);
            let (pred, args) = self.atom()?;
            lits.push(Literal::new(positive, pred, args));
            if !self.eat(&Tok::Pipe) {
                break;
            }
        }
        Ok(lits)
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.implication()?;
        if self.eat(&Tok::Iff) {
            Ok(Formula::iff(lhs, self.formula()?))
        } else {
            Ok(lhs)
        }
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Implies) {
            Ok(Formula::implies(lhs, self.implication()?))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conjunction()?;
        while self.eat(&Tok::Pipe) {
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while self.eat(&Tok::Amp) {
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Bang | Tok::Question) => {
                let universal = self.peek() == Some(&Tok::Bang);
                self.pos += 1;
                self.expect(Tok::LBrack)?;
                let mut vars = Vec::new();
                loop {
                    match self.peek().cloned() {
                        Some(Tok::Upper(v)) => {
                            self.pos += 1;
                            vars.push(v);
                        }
                        _ => return Err(self.unexpected("variable")),
                    }
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(Tok::RBrack)?;
                self.expect(Tok::Colon)?;
                let body = self.unary()?;
                Ok(vars.into_iter().rev().fold(body, |acc, v| {
                    if universal {
                        Formula::forall(v, acc)
                    } else {
                        Formula::exists(v, acc)
                    }
                }))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Some(Tok::Lower(_)) => {
                let (pred, args) = self.atom()?;
                Ok(Formula::Atom(pred, args))
            }
            _ => Err(self.unexpected("formula")),
        }
    }

    fn rule(&mut self) -> Result<Rule, ParseError> {
        let mut r = self.rule_conj()?;
        while self.eat(&Tok::Pipe) {
            r = Rule::Or(Box::new(r), Box::new(self.rule_conj()?));
        }
        Ok(r)
    }

    fn rule_conj(&mut self) -> Result<Rule, ParseError> {
        let mut r = self.rule_unary()?;
        while self.eat(&Tok::Amp) {
            r = Rule::And(Box::new(r), Box::new(self.rule_unary()?));
        }
        Ok(r)
    }

    fn rule_unary(&mut self) -> Result<Rule, ParseError> {
        if self.eat(&Tok::Tilde) {
            return Ok(Rule::Not(Box::new(self.rule_unary()?)));
        }
        if self.eat(&Tok::LParen) {
            let r = self.rule()?;
            self.expect(Tok::RParen)?;
            return Ok(r);
        }
        match self.lower_ident("model rule")?.as_str() {
            "true" => Ok(Rule::True),
            "false" => Ok(Rule::False),
            "head" => {
                self.expect(Tok::LParen)?;
                let index = match self.peek().cloned() {
                    Some(Tok::Number(n)) => {
                        self.pos += 1;
                        n.parse::<usize>().map_err(|_| self.error_here(format!("bad argument index `{n}`")))?
                    }
                    _ => return Err(self.unexpected("argument index")),
                };
                self.expect(Tok::Comma)?;
                let functor = match self.peek().cloned() {
                    Some(Tok::Lower(f) | Tok::Number(f)) => {
                        self.pos += 1;
                        f
                    }
                    _ => return Err(self.unexpected("functor")),
                };
                self.expect(Tok::RParen)?;
                Ok(Rule::HeadIs { index, functor })
            }
            other => Err(self.error_here(format!("unknown model rule `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn induction_step_formula() {
        let p = parse_problem("formula(step, axiom, ![X]: (p(X) => p(s(X)))).").unwrap();
        assert_eq!(p.formulas.len(), 1);
        let f = &p.formulas[0];
        assert_eq!(f.role, Role::Axiom);
        match &f.formula {
            Formula::ForAll(v, body) => {
                assert_eq!(v, "X");
                assert!(matches!(**body, Formula::Implies(..)));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn consistency_clause() {
        let p = parse_problem("clause(c36, ~bew(X) | ~bew(not(X))).").unwrap();
        assert_eq!(p.clauses.len(), 1);
        assert_eq!(p.clauses[0].len(), 2);
        assert_eq!(p.clauses[0].name(), Some("c36"));
        assert_eq!(p.clauses[0].text(), "~bew(X) | ~bew(not(X))");
    }

    #[test]
    fn arity_conflict() {
        let err = parse_problem("clause(bad, p(X) | p(X, Y)).").unwrap_err();
        assert!(matches!(err, ParseError::Arity { ref symbol, expected: 1, found: 2, .. } if symbol == "p"), "{err}");
    }

    #[test]
    fn arity_conflict_spans_statements() {
        let err = parse_problem("clause(a, p(f(X))).\nclause(b, p(f)).").unwrap_err();
        assert!(matches!(err, ParseError::Arity { line: 2, .. }), "{err}");
    }

    #[test]
    fn name_collision() {
        let err = parse_problem("clause(a, p).\nformula(a, axiom, q).").unwrap_err();
        assert!(matches!(err, ParseError::NameCollision { line: 2, col: 1, .. }), "{err}");
    }

    #[test]
    fn syntax_error_position() {
        let err = parse_problem("% header\nclause(a, p(X) |).").unwrap_err();
        assert_eq!(err, ParseError::Syntax { line: 2, col: 17, message: "expected atom, found `)`".into() });
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse_formula("a | b & c => d => e <=> f").unwrap();
        assert_eq!(f.to_string(), "a | b & c => d => e <=> f");
        let g = parse_formula("(a => b) => c").unwrap();
        assert!(matches!(g, Formula::Implies(ref l, _) if matches!(**l, Formula::Implies(..))));
        let h = parse_formula("a <=> b <=> c").unwrap();
        assert!(matches!(h, Formula::Iff(_, ref r) if matches!(**r, Formula::Iff(..))));
    }

    #[test]
    fn quantifier_binds_unary() {
        let f = parse_formula("![X]: p(X) & q").unwrap();
        assert!(matches!(f, Formula::And(..)));
        let g = parse_formula("![X, Y]: b(X, Y)").unwrap();
        assert_eq!(g.to_string(), "![X]: ![Y]: b(X,Y)");
    }

    #[test]
    fn numerals_are_constants() {
        assert_eq!(parse_term("s(s(0))").unwrap(), Term::app("s", vec![Term::app("s", vec![Term::constant("0")])]));
    }

    #[test]
    fn empty_clause_text() {
        assert!(parse_clause_text("$false").unwrap().is_empty());
        assert!(parse_clause_text("").is_err());
    }

    #[test]
    fn model_statements() {
        let m = parse_model("model(bew, head(0, r)).\nmodel(b, head(0, n) & head(1, r)).\nmodel(q, ~(true | false)).")
            .unwrap();
        assert_eq!(m.rule("bew"), Some(&Rule::HeadIs { index: 0, functor: "r".into() }));
        assert!(matches!(m.rule("b"), Some(Rule::And(..))));
        assert!(matches!(m.rule("q"), Some(Rule::Not(..))));
        assert!(parse_model("model(bew, false).\nmodel(bew, true).").is_err());
        assert!(parse_model("clause(a, p).").is_err());
    }

    #[test]
    fn problem_prints_back() {
        let text = "formula(f16, axiom, ![X]: (bew(X) <=> ?[Y]: b(Y,X))).\nclause(c31, ~bew(X) | b(n,X)).\n";
        let p = parse_problem(text).unwrap();
        assert_eq!(p.to_string(), text);
        assert_eq!(parse_problem(&p.to_string()).unwrap(), p);
    }
}
