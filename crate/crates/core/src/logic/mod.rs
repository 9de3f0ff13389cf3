//! First-order logic with counting terms and numerical predicates.
//!
//! Formulas are plain trees over named variables. Structure variables and
//! number variables share one namespace at the syntax level; the parser and
//! [`Formula::check_variable_kinds`] keep the two kinds disjoint.

mod eval;
mod parser;
mod predicates;

use std::collections::BTreeSet;
use std::fmt;

pub use eval::{evaluate_formula, evaluate_term, EvalError, Interpretation};
pub use parser::{parse_formula, parse_term, ParseError, Parser};
pub use predicates::{Predicate, PredicateCollection, INFIX_PREDICATES};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Eq(String, String),
    Atom(String, Vec<String>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
    /// Numerical predicate applied to counting terms.
    Pred(String, Vec<Term>),
    /// Quantifier over a number variable, ranging over {0, ..., |U|}.
    ExistsNum(String, Box<Formula>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    /// `#(x1, ..., xs).φ` over pairwise distinct structure variables.
    Count(Vec<String>, Box<Formula>),
    Int(i128),
    Add(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Var(String),
}

/// Free variables of an expression, split by kind.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreeVariables {
    pub structure: BTreeSet<String>,
    pub number: BTreeSet<String>,
}

impl Formula {
    pub fn eq(a: &str, b: &str) -> Formula {
        Formula::Eq(a.into(), b.into())
    }

    pub fn atom(rel: &str, args: &[&str]) -> Formula {
        Formula::Atom(rel.into(), args.iter().map(|s| s.to_string()).collect())
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

    pub fn exists(x: &str, f: Formula) -> Formula {
        Formula::Exists(x.into(), Box::new(f))
    }

    pub fn forall(x: &str, f: Formula) -> Formula {
        Formula::Forall(x.into(), Box::new(f))
    }

    pub fn pred(name: &str, args: Vec<Term>) -> Formula {
        Formula::Pred(name.into(), args)
    }

    /// Left-nested conjunction; `None` for an empty list.
    pub fn conjunction(parts: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        parts.into_iter().reduce(Formula::and)
    }

    pub fn disjunction(parts: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        parts.into_iter().reduce(Formula::or)
    }

    /// Maximal nesting depth of ∃x, ∀x and #x̄ binders. Number quantifiers do
    /// not count.
    pub fn binding_rank(&self) -> usize {
        match self {
            Formula::Eq(..) | Formula::Atom(..) => 0,
            Formula::Not(f) | Formula::ExistsNum(_, f) => f.binding_rank(),
            Formula::And(a, b) | Formula::Or(a, b) => a.binding_rank().max(b.binding_rank()),
            Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + f.binding_rank(),
            Formula::Pred(_, ts) => ts.iter().map(Term::binding_rank).max().unwrap_or(0),
        }
    }

    /// Maximal arity of a counting binder; without one, 1 if the formula has
    /// a structure quantifier and 0 otherwise.
    pub fn binding_width(&self) -> usize {
        let mut count_width = None;
        let mut quantifier = false;
        self.scan_binders(&mut count_width, &mut quantifier);
        match count_width {
            Some(w) => w,
            None => usize::from(quantifier),
        }
    }

    fn scan_binders(&self, count_width: &mut Option<usize>, quantifier: &mut bool) {
        match self {
            Formula::Eq(..) | Formula::Atom(..) => {}
            Formula::Not(f) | Formula::ExistsNum(_, f) => f.scan_binders(count_width, quantifier),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.scan_binders(count_width, quantifier);
                b.scan_binders(count_width, quantifier);
            }
            Formula::Exists(_, f) | Formula::Forall(_, f) => {
                *quantifier = true;
                f.scan_binders(count_width, quantifier);
            }
            Formula::Pred(_, ts) => {
                for t in ts {
                    t.scan_binders(count_width, quantifier);
                }
            }
        }
    }

    pub fn free_variables(&self) -> FreeVariables {
        let mut free = FreeVariables::default();
        self.collect_free(&mut Vec::new(), &mut Vec::new(), &mut free);
        free
    }

    fn collect_free<'a>(
        &'a self,
        bound: &mut Vec<&'a str>,
        bound_num: &mut Vec<&'a str>,
        free: &mut FreeVariables,
    ) {
        let mut mark = |x: &str, bound: &[&str]| {
            if !bound.contains(&x) {
                free.structure.insert(x.to_string());
            }
        };
        match self {
            Formula::Eq(a, b) => {
                mark(a, bound);
                mark(b, bound);
            }
            Formula::Atom(_, args) => {
                for a in args {
                    mark(a, bound);
                }
            }
            Formula::Not(f) => f.collect_free(bound, bound_num, free),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_free(bound, bound_num, free);
                b.collect_free(bound, bound_num, free);
            }
            Formula::Exists(x, f) | Formula::Forall(x, f) => {
                bound.push(x);
                f.collect_free(bound, bound_num, free);
                bound.pop();
            }
            Formula::ExistsNum(k, f) => {
                bound_num.push(k);
                f.collect_free(bound, bound_num, free);
                bound_num.pop();
            }
            Formula::Pred(_, ts) => {
                for t in ts {
                    t.collect_free(bound, bound_num, free);
                }
            }
        }
    }

    /// Every variable name used as a structure variable and as a number variable.
    pub(crate) fn variable_kinds(&self) -> (BTreeSet<String>, BTreeSet<String>) {
        let mut s = BTreeSet::new();
        let mut n = BTreeSet::new();
        self.kinds(&mut s, &mut n);
        (s, n)
    }

    fn kinds(&self, s: &mut BTreeSet<String>, n: &mut BTreeSet<String>) {
        match self {
            Formula::Eq(a, b) => {
                s.insert(a.clone());
                s.insert(b.clone());
            }
            Formula::Atom(_, args) => s.extend(args.iter().cloned()),
            Formula::Not(f) => f.kinds(s, n),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.kinds(s, n);
                b.kinds(s, n);
            }
            Formula::Exists(x, f) | Formula::Forall(x, f) => {
                s.insert(x.clone());
                f.kinds(s, n);
            }
            Formula::ExistsNum(k, f) => {
                n.insert(k.clone());
                f.kinds(s, n);
            }
            Formula::Pred(_, ts) => {
                for t in ts {
                    t.kinds(s, n);
                }
            }
        }
    }

    /// Structure and number variables must be disjoint.
    pub fn check_variable_kinds(&self) -> Result<(), String> {
        let (s, n) = self.variable_kinds();
        match s.intersection(&n).next() {
            Some(x) => Err(format!("{x} is used both as a structure and a number variable")),
            None => Ok(()),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Or(..) => 1,
            Formula::And(..) => 2,
            Formula::Pred(name, args) if is_infix(name, args) => 3,
            Formula::Eq(..) => 3,
            _ => 4,
        }
    }
}

impl Term {
    pub fn count(vars: &[&str], body: Formula) -> Term {
        Term::Count(vars.iter().map(|s| s.to_string()).collect(), Box::new(body))
    }

    pub fn var(name: &str) -> Term {
        Term::Var(name.into())
    }

    pub fn binding_rank(&self) -> usize {
        match self {
            Term::Count(_, f) => 1 + f.binding_rank(),
            Term::Int(_) | Term::Var(_) => 0,
            Term::Add(a, b) | Term::Mul(a, b) => a.binding_rank().max(b.binding_rank()),
        }
    }

    pub fn binding_width(&self) -> usize {
        let mut count_width = None;
        let mut quantifier = false;
        self.scan_binders(&mut count_width, &mut quantifier);
        count_width.unwrap_or(usize::from(quantifier))
    }

    fn scan_binders(&self, count_width: &mut Option<usize>, quantifier: &mut bool) {
        match self {
            Term::Count(xs, f) => {
                *count_width = Some(count_width.unwrap_or(0).max(xs.len()));
                f.scan_binders(count_width, quantifier);
            }
            Term::Int(_) | Term::Var(_) => {}
            Term::Add(a, b) | Term::Mul(a, b) => {
                a.scan_binders(count_width, quantifier);
                b.scan_binders(count_width, quantifier);
            }
        }
    }

    pub fn free_variables(&self) -> FreeVariables {
        let mut free = FreeVariables::default();
        self.collect_free(&mut Vec::new(), &mut Vec::new(), &mut free);
        free
    }

    fn collect_free<'a>(
        &'a self,
        bound: &mut Vec<&'a str>,
        bound_num: &mut Vec<&'a str>,
        free: &mut FreeVariables,
    ) {
        match self {
            Term::Count(xs, f) => {
                let before = bound.len();
                bound.extend(xs.iter().map(String::as_str));
                f.collect_free(bound, bound_num, free);
                bound.truncate(before);
            }
            Term::Int(_) => {}
            Term::Add(a, b) | Term::Mul(a, b) => {
                a.collect_free(bound, bound_num, free);
                b.collect_free(bound, bound_num, free);
            }
            Term::Var(k) => {
                if !bound_num.contains(&k.as_str()) {
                    free.number.insert(k.clone());
                }
            }
        }
    }

    fn kinds(&self, s: &mut BTreeSet<String>, n: &mut BTreeSet<String>) {
        match self {
            Term::Count(xs, f) => {
                s.extend(xs.iter().cloned());
                f.kinds(s, n);
            }
            Term::Int(_) => {}
            Term::Add(a, b) | Term::Mul(a, b) => {
                a.kinds(s, n);
                b.kinds(s, n);
            }
            Term::Var(k) => {
                n.insert(k.clone());
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Term::Add(..) => 1,
            Term::Mul(..) => 2,
            _ => 3,
        }
    }
}

fn is_infix(name: &str, args: &[Term]) -> bool {
    args.len() == 2 && INFIX_PREDICATES.contains(&name)
}

fn write_formula(f: &mut fmt::Formatter<'_>, phi: &Formula, min: u8) -> fmt::Result {
    if phi.precedence() < min {
        write!(f, "(")?;
        write_formula(f, phi, 0)?;
        return write!(f, ")");
    }
    match phi {
        Formula::Eq(a, b) => write!(f, "{a} = {b}"),
        Formula::Atom(r, args) => write!(f, "{r}({})", args.join(",")),
        Formula::Not(g) => {
            write!(f, "!")?;
            write_formula(f, g, 4)
        }
        Formula::And(a, b) => {
            write_formula(f, a, 2)?;
            write!(f, " & ")?;
            write_formula(f, b, 3)
        }
        Formula::Or(a, b) => {
            write_formula(f, a, 1)?;
            write!(f, " | ")?;
            write_formula(f, b, 2)
        }
        Formula::Exists(x, g) => {
            write!(f, "exists {x} ")?;
            write_formula(f, g, 4)
        }
        Formula::Forall(x, g) => {
            write!(f, "forall {x} ")?;
            write_formula(f, g, 4)
        }
        Formula::ExistsNum(k, g) => {
            write!(f, "existsN {k} ")?;
            write_formula(f, g, 4)
        }
        Formula::Pred(name, args) if is_infix(name, args) => {
            write_term(f, &args[0], 1)?;
            write!(f, " {name} ")?;
            write_term(f, &args[1], 1)
        }
        Formula::Pred(name, args) => {
            write!(f, "{name}(")?;
            for (i, t) in args.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write_term(f, t, 1)?;
            }
            write!(f, ")")
        }
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, t: &Term, min: u8) -> fmt::Result {
    if t.precedence() < min {
        write!(f, "(")?;
        write_term(f, t, 0)?;
        return write!(f, ")");
    }
    match t {
        Term::Count(xs, body) => {
            write!(f, "#({}).(", xs.join(","))?;
            write_formula(f, body, 0)?;
            write!(f, ")")
        }
        Term::Int(i) => write!(f, "{i}"),
        Term::Var(k) => write!(f, "{k}"),
        Term::Add(a, b) => {
            write_term(f, a, 1)?;
            write!(f, " + ")?;
            write_term(f, b, 2)
        }
        Term::Mul(a, b) => {
            write_term(f, a, 2)?;
            write!(f, " * ")?;
            write_term(f, b, 3)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, 0)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::Signature;

    fn sig() -> Signature {
        Signature::from_relations([("L", 2), ("C", 1)]).unwrap()
    }

    fn p(text: &str) -> Formula {
        parse_formula(text, &sig(), &PredicateCollection::builtin()).unwrap()
    }

    const PHI: &str = "C(c) & (L(c,p) | exists x (L(c,x) & #(y).(L(x,y) & L(p,y)) >= 2))";

    #[test]
    fn rank_and_width_of_example() {
        let phi = p(PHI);
        assert_eq!(phi.binding_rank(), 2);
        assert_eq!(phi.binding_width(), 1);
    }

    #[test]
    fn rank_and_width_fallbacks() {
        let atom = p("L(x,y)");
        assert_eq!((atom.binding_rank(), atom.binding_width()), (0, 0));
        let pair = p("#(y1,y2).(L(y1,y2)) >= 1");
        assert_eq!((pair.binding_rank(), pair.binding_width()), (1, 2));
        let q = p("exists x L(x,x)");
        assert_eq!((q.binding_rank(), q.binding_width()), (1, 1));
        let n = p("existsN k (#(y).(C(y)) = k)");
        assert_eq!((n.binding_rank(), n.binding_width()), (1, 1));
    }

    #[test]
    fn free_variables_split_by_kind() {
        let phi = p("C(c) & (L(c,p) | exists x (L(c,x) & #(y).(L(x,y) & L(p,y)) >= kappa))");
        let fv = phi.free_variables();
        assert_eq!(fv.structure.into_iter().collect::<Vec<_>>(), ["c", "p"]);
        assert_eq!(fv.number.into_iter().collect::<Vec<_>>(), ["kappa"]);

        let closed = p("exists x forall y (L(x,y) | x = y)");
        assert_eq!(closed.free_variables(), FreeVariables::default());

        let open = p("exists x L(x,y)");
        assert_eq!(open.free_variables().structure.len(), 1);
        assert!(open.free_variables().number.is_empty());
    }

    #[test]
    fn existsn_binds_number_variables() {
        let f = p("existsN k (#(y).(C(y)) >= k & k >= 1)");
        assert!(f.free_variables().number.is_empty());
    }

    #[test]
    fn display_is_minimal_and_reparses() {
        let phi = p(PHI);
        assert_eq!(phi.to_string(), PHI);
        let nested = Formula::and(
            Formula::atom("C", &["x"]),
            Formula::and(Formula::atom("C", &["y"]), Formula::atom("C", &["z"])),
        );
        assert_eq!(nested.to_string(), "C(x) & (C(y) & C(z))");
        assert_eq!(p(&nested.to_string()), nested);
        let neg = Formula::not(Formula::eq("x", "y"));
        assert_eq!(neg.to_string(), "!(x = y)");
        assert_eq!(p(&neg.to_string()), neg);
    }

    #[test]
    fn term_display() {
        let t = Term::Mul(
            Box::new(Term::Add(Box::new(Term::Int(1)), Box::new(Term::var("k")))),
            Box::new(Term::Int(-7)),
        );
        assert_eq!(t.to_string(), "(1 + k) * -7");
    }
}
