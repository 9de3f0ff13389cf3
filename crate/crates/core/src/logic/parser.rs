//! Concrete syntax.
//!
//! ```text
//! formula := disj
//! disj    := conj ('|' conj)*
//! conj    := unary ('&' unary)*
//! unary   := '!' unary | ('exists' | 'forall' | 'existsN') IDENT unary | primary
//! primary := term CMP term | REL '(' vars ')' | PRED '(' terms ')' | '(' formula ')'
//! term    := prod ('+' prod)*
//! prod    := atom ('*' atom)*
//! atom    := INT | '-' INT | IDENT | '#' '(' vars ')' '.' unary | '(' term ')'
//! CMP     := '>=' | '<=' | '=' | '<' | '>' | '!='
//! ```
//!
//! `a = b` between two bare identifiers is structure equality unless one of
//! them is a known number variable (bound by an enclosing `existsN` or
//! declared through [`Parser::number_vars`]).

use std::collections::BTreeSet;

use thiserror::Error;

use super::{Formula, PredicateCollection, Term};
use crate::structure::Signature;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("syntax error at {pos}: {message}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(i128),
    LParen,
    RParen,
    Comma,
    Dot,
    Hash,
    And,
    Or,
    Bang,
    Cmp(&'static str),
    Plus,
    Star,
    Minus,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let two = text.get(i..i + 2).unwrap_or("");
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '#' => Tok::Hash,
            '&' => Tok::And,
            '|' => Tok::Or,
            '+' => Tok::Plus,
            '*' => Tok::Star,
            '-' => Tok::Minus,
            '!' if two == "!=" => {
                i += 1;
                Tok::Cmp("!=")
            }
            '!' => Tok::Bang,
            '>' if two == ">=" => {
                i += 1;
                Tok::Cmp(">=")
            }
            '<' if two == "<=" => {
                i += 1;
                Tok::Cmp("<=")
            }
            '>' => Tok::Cmp(">"),
            '<' => Tok::Cmp("<"),
            '=' => Tok::Cmp("="),
            c if c.is_ascii_digit() => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let value = text[start..i].parse().map_err(|_| ParseError {
                    pos: start,
                    message: "integer literal out of range".into(),
                })?;
                out.push((Tok::Int(value), start));
                continue;
            }
            c if c.is_alphabetic() || c == '_' => {
                while i < bytes.len() && ((bytes[i] as char).is_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                return Err(ParseError {
                    pos: start,
                    message: format!("unexpected character {c:?}"),
                })
            }
        };
        i += 1;
        out.push((tok, start));
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

/// Failure inside the descent. Soft failures allow backtracking to another
/// alternative; hard ones (unknown names, repeated count variables) do not.
struct Fail {
    err: ParseError,
    hard: bool,
}

type PResult<T> = Result<T, Fail>;

/// Configurable parser bound to a signature and a predicate collection.
pub struct Parser<'a> {
    signature: &'a Signature,
    predicates: &'a PredicateCollection,
    declared_numbers: BTreeSet<String>,
}

impl<'a> Parser<'a> {
    pub fn new(signature: &'a Signature, predicates: &'a PredicateCollection) -> Self {
        Parser {
            signature,
            predicates,
            declared_numbers: BTreeSet::new(),
        }
    }

    /// Declares free number variables so that `k = j` parses numerically.
    pub fn number_vars<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.declared_numbers.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn parse_formula(&self, text: &str) -> Result<Formula, ParseError> {
        let mut st = State::new(self, text)?;
        let f = st.disj().map_err(|f| f.err)?;
        st.expect_end()?;
        f.check_variable_kinds()
            .map_err(|message| ParseError { pos: 0, message })?;
        Ok(f)
    }

    pub fn parse_term(&self, text: &str) -> Result<Term, ParseError> {
        let mut st = State::new(self, text)?;
        let t = st.term().map_err(|f| f.err)?;
        st.expect_end()?;
        let probe = Formula::Pred("=".into(), vec![t.clone(), Term::Int(0)]);
        probe
            .check_variable_kinds()
            .map_err(|message| ParseError { pos: 0, message })?;
        Ok(t)
    }
}

pub fn parse_formula(
    text: &str,
    signature: &Signature,
    predicates: &PredicateCollection,
) -> Result<Formula, ParseError> {
    Parser::new(signature, predicates).parse_formula(text)
}

pub fn parse_term(
    text: &str,
    signature: &Signature,
    predicates: &PredicateCollection,
) -> Result<Term, ParseError> {
    Parser::new(signature, predicates).parse_term(text)
}

struct State<'p, 'a> {
    cfg: &'p Parser<'a>,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    numbers: Vec<String>,
}

impl<'p, 'a> State<'p, 'a> {
    fn new(cfg: &'p Parser<'a>, text: &str) -> Result<Self, ParseError> {
        Ok(State {
            cfg,
            toks: lex(text)?,
            pos: 0,
            numbers: Vec::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn soft<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(Fail {
            err: ParseError {
                pos: self.offset(),
                message: message.into(),
            },
            hard: false,
        })
    }

    fn hard<T>(&self, pos: usize, message: impl Into<String>) -> PResult<T> {
        Err(Fail {
            err: ParseError {
                pos,
                message: message.into(),
            },
            hard: true,
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.soft(format!("expected {what}"))
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(ParseError {
                pos: self.offset(),
                message: "unexpected trailing input".into(),
            })
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_keyword(&s) => {
                self.bump();
                Ok(s)
            }
            _ => self.soft("expected identifier"),
        }
    }

    fn is_number_var(&self, name: &str) -> bool {
        self.numbers.iter().any(|n| n == name) || self.cfg.declared_numbers.contains(name)
    }

    fn disj(&mut self) -> PResult<Formula> {
        let mut f = self.conj()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let g = self.conj()?;
            f = Formula::or(f, g);
        }
        Ok(f)
    }

    fn conj(&mut self) -> PResult<Formula> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let g = self.unary()?;
            f = Formula::and(f, g);
        }
        Ok(f)
    }

    fn unary(&mut self) -> PResult<Formula> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(k) if k == "exists" || k == "forall" => {
                self.bump();
                let at = self.offset();
                let x = self.ident()?;
                if self.is_number_var(&x) {
                    return self.hard(at, format!("{x} is a number variable"));
                }
                let body = self.unary()?;
                Ok(if k == "exists" {
                    Formula::exists(&x, body)
                } else {
                    Formula::forall(&x, body)
                })
            }
            Tok::Ident(k) if k == "existsN" => {
                self.bump();
                let x = self.ident()?;
                self.numbers.push(x.clone());
                let body = self.unary();
                self.numbers.pop();
                Ok(Formula::ExistsNum(x, Box::new(body?)))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> PResult<Formula> {
        let start = self.pos;
        let comparison = self.comparison();
        let first_err = match comparison {
            Ok(f) => return Ok(f),
            Err(e) if e.hard => return Err(e),
            Err(e) => e,
        };
        self.pos = start;
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = match self.disj() {
                    Ok(f) => f,
                    Err(e) if e.hard => return Err(e),
                    Err(e) => return Err(furthest(first_err, e)),
                };
                match self.expect(Tok::RParen, "`)`") {
                    Ok(()) => Ok(f),
                    Err(e) => Err(furthest(first_err, e)),
                }
            }
            Tok::Ident(name) if !is_keyword(&name) && *self.peek_at(1) == Tok::LParen => {
                let at = self.offset();
                if let Some(rel) = self.cfg.signature.index_of(&name) {
                    self.bump();
                    self.bump();
                    let args = self.ident_list()?;
                    let arity = self.cfg.signature.arity(rel);
                    if args.len() != arity {
                        return self.hard(
                            at,
                            format!("relation {name} expects {arity} arguments, got {}", args.len()),
                        );
                    }
                    for a in &args {
                        if self.is_number_var(a) {
                            return self.hard(at, format!("{a} is a number variable"));
                        }
                    }
                    Ok(Formula::Atom(name, args))
                } else if let Some(pred) = self.cfg.predicates.get(&name) {
                    let arity = pred.arity;
                    self.bump();
                    self.bump();
                    let mut args = vec![self.term()?];
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        args.push(self.term()?);
                    }
                    self.expect(Tok::RParen, "`)`")?;
                    if args.len() != arity {
                        return self.hard(
                            at,
                            format!("predicate {name} expects {arity} arguments, got {}", args.len()),
                        );
                    }
                    Ok(Formula::Pred(name, args))
                } else {
                    self.hard(at, format!("unknown relation or predicate {name}"))
                }
            }
            _ => Err(first_err),
        }
    }

    fn ident_list(&mut self) -> PResult<Vec<String>> {
        let mut out = vec![self.ident()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            out.push(self.ident()?);
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(out)
    }

    fn comparison(&mut self) -> PResult<Formula> {
        let lhs = self.term()?;
        let op = match self.peek() {
            Tok::Cmp(op) => *op,
            _ => return self.soft("expected comparison operator"),
        };
        self.bump();
        let rhs = self.term()?;
        if op == "=" || op == "!=" {
            if let (Term::Var(a), Term::Var(b)) = (&lhs, &rhs) {
                if !self.is_number_var(a) && !self.is_number_var(b) {
                    let eq = Formula::eq(a, b);
                    return Ok(if op == "=" { eq } else { Formula::not(eq) });
                }
            }
        }
        if self.cfg.predicates.get(op).is_none() {
            return self.hard(self.offset(), format!("comparison {op} is not a registered predicate"));
        }
        Ok(Formula::Pred(op.to_string(), vec![lhs, rhs]))
    }

    fn term(&mut self) -> PResult<Term> {
        let mut t = self.product()?;
        while *self.peek() == Tok::Plus {
            self.bump();
            let u = self.product()?;
            t = Term::Add(Box::new(t), Box::new(u));
        }
        Ok(t)
    }

    fn product(&mut self) -> PResult<Term> {
        let mut t = self.term_atom()?;
        while *self.peek() == Tok::Star {
            self.bump();
            let u = self.term_atom()?;
            t = Term::Mul(Box::new(t), Box::new(u));
        }
        Ok(t)
    }

    fn term_atom(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Int(i) => {
                self.bump();
                Ok(Term::Int(i))
            }
            Tok::Minus => {
                self.bump();
                match self.peek().clone() {
                    Tok::Int(i) => {
                        self.bump();
                        Ok(Term::Int(-i))
                    }
                    _ => self.soft("expected integer after `-`"),
                }
            }
            Tok::Hash => {
                let at = self.offset();
                self.bump();
                self.expect(Tok::LParen, "`(` after `#`")?;
                let vars = self.ident_list()?;
                for (i, v) in vars.iter().enumerate() {
                    if vars[..i].contains(v) {
                        return self.hard(at, format!("count variable {v} repeated"));
                    }
                    if self.is_number_var(v) {
                        return self.hard(at, format!("{v} is a number variable"));
                    }
                }
                self.expect(Tok::Dot, "`.` after count variables")?;
                let body = self.unary()?;
                Ok(Term::Count(vars, Box::new(body)))
            }
            Tok::Ident(name) if !is_keyword(&name) && *self.peek_at(1) != Tok::LParen => {
                self.bump();
                Ok(Term::Var(name))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => self.soft("expected term"),
        }
    }
}

fn furthest(a: Fail, b: Fail) -> Fail {
    if b.err.pos >= a.err.pos {
        b
    } else {
        a
    }
}

fn is_keyword(s: &str) -> bool {
    matches!(s, "exists" | "forall" | "existsN")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::from_relations([("L", 2), ("C", 1), ("T", 3)]).unwrap()
    }

    fn p(text: &str) -> Result<Formula, ParseError> {
        parse_formula(text, &sig(), &PredicateCollection::builtin())
    }

    #[test]
    fn example_formula_ast() {
        let f = p("C(c) & (L(c,p) | exists x (L(c,x) & #(y).(L(x,y) & L(p,y)) >= 2))").unwrap();
        let count = Term::count(
            &["y"],
            Formula::and(Formula::atom("L", &["x", "y"]), Formula::atom("L", &["p", "y"])),
        );
        let expected = Formula::and(
            Formula::atom("C", &["c"]),
            Formula::or(
                Formula::atom("L", &["c", "p"]),
                Formula::exists(
                    "x",
                    Formula::and(
                        Formula::atom("L", &["c", "x"]),
                        Formula::pred(">=", vec![count, Term::Int(2)]),
                    ),
                ),
            ),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn equality() {
        assert_eq!(p("x = x").unwrap(), Formula::eq("x", "x"));
        assert_eq!(p("x != y").unwrap(), Formula::not(Formula::eq("x", "y")));
    }

    #[test]
    fn repeated_count_variable_is_rejected() {
        let err = p("#(y,y).(L(y,y)) >= 1").unwrap_err();
        assert!(err.message.contains("repeated"), "{err}");
        let err = p("#(y,y).(L(y,y))");
        assert!(err.is_err());
    }

    #[test]
    fn unknown_names() {
        let err = p("R(x,y)").unwrap_err();
        assert!(err.message.contains("unknown"), "{err}");
        assert!(p("L(x)").unwrap_err().message.contains("expects 2"));
    }

    #[test]
    fn syntax_error_position() {
        let err = p("C(x) & & C(y)").unwrap_err();
        assert_eq!(err.pos, 7);
        assert!(p("C(x) C(y)").is_err());
        assert!(p("").is_err());
    }

    #[test]
    fn number_variables() {
        let f = p("existsN k (k = j)").unwrap();
        // j is not known to be numeric but k is, so the comparison is numeric.
        assert!(matches!(f, Formula::ExistsNum(_, ref b) if matches!(**b, Formula::Pred(..))));
        let declared = Parser::new(&sig(), &PredicateCollection::builtin())
            .number_vars(["a", "b"])
            .parse_formula("a = b")
            .unwrap();
        assert!(matches!(declared, Formula::Pred(..)));
        assert!(p("existsN k exists k C(k)").is_err());
        assert!(p("C(k) & k >= 1").is_err(), "mixed kinds");
    }

    #[test]
    fn precedence_and_quantifier_scope() {
        let f = p("!C(x) & C(y) | C(z)").unwrap();
        assert_eq!(
            f,
            Formula::or(
                Formula::and(Formula::not(Formula::atom("C", &["x"])), Formula::atom("C", &["y"])),
                Formula::atom("C", &["z"])
            )
        );
        let g = p("exists x C(x) & C(y)").unwrap();
        assert!(matches!(g, Formula::And(..)));
    }

    #[test]
    fn arithmetic_terms() {
        let t = parse_term(
            "(1 + k) * -7 + #(a,b).(T(a,b,a))",
            &sig(),
            &PredicateCollection::builtin(),
        )
        .unwrap();
        assert_eq!(t.to_string(), "(1 + k) * -7 + #(a,b).(T(a,b,a))");
        let f = p("P_exists(#(y).(C(y)))").unwrap();
        assert_eq!(f.to_string(), "P_exists(#(y).(C(y)))");
    }

    #[test]
    fn parenthesized_comparison_and_formula() {
        assert!(matches!(p("(x = y)").unwrap(), Formula::Eq(..)));
        assert!(matches!(p("(1 + 2) >= 3").unwrap(), Formula::Pred(..)));
        assert!(matches!(p("((C(x)))").unwrap(), Formula::Atom(..)));
    }
}
