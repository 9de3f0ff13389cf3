//! Exact evaluation over the whole structure.
//!
//! Quantifiers and counting terms range over the full universe, so this is a
//! global procedure. It reads the structure without touching the access
//! counters; learners never call it.

use thiserror::Error;

use super::{Formula, PredicateCollection, Term};
use crate::structure::{Element, Structure};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("free variable {0} is not assigned")]
    Unassigned(String),
    #[error("unknown relation {0}")]
    UnknownRelation(String),
    #[error("unknown predicate {0}")]
    UnknownPredicate(String),
    #[error("{name} expects {expected} arguments, got {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("integer overflow while evaluating a term")]
    Overflow,
    #[error("{0} is used both as a structure and a number variable")]
    VariableKind(String),
}

#[derive(Clone, Copy, Debug)]
enum Value {
    Elem(Element),
    Num(i128),
}

/// A structure together with an assignment of free variables.
#[derive(Clone, Debug)]
pub struct Interpretation<'a> {
    structure: &'a Structure,
    predicates: &'a PredicateCollection,
    elems: Vec<(String, Element)>,
    nums: Vec<(String, i128)>,
}

impl<'a> Interpretation<'a> {
    pub fn new(structure: &'a Structure, predicates: &'a PredicateCollection) -> Self {
        Interpretation {
            structure,
            predicates,
            elems: Vec::new(),
            nums: Vec::new(),
        }
    }

    pub fn bind(mut self, var: &str, e: Element) -> Self {
        self.elems.push((var.to_string(), e));
        self
    }

    pub fn bind_number(mut self, var: &str, value: i128) -> Self {
        self.nums.push((var.to_string(), value));
        self
    }

    pub fn structure(&self) -> &'a Structure {
        self.structure
    }

    fn env(&self) -> Vec<(&str, Value)> {
        let mut env: Vec<(&str, Value)> = Vec::new();
        env.extend(self.elems.iter().map(|(x, e)| (x.as_str(), Value::Elem(*e))));
        env.extend(self.nums.iter().map(|(k, v)| (k.as_str(), Value::Num(*v))));
        env
    }

    fn check_assigned(&self, structure: &[String], number: &[String]) -> Result<(), EvalError> {
        for x in structure {
            if !self.elems.iter().any(|(y, _)| y == x) {
                return Err(EvalError::Unassigned(x.clone()));
            }
        }
        for k in number {
            if !self.nums.iter().any(|(y, _)| y == k) {
                return Err(EvalError::Unassigned(k.clone()));
            }
        }
        Ok(())
    }
}

pub fn evaluate_formula(interp: &Interpretation<'_>, phi: &Formula) -> Result<bool, EvalError> {
    let fv = phi.free_variables();
    interp.check_assigned(
        &fv.structure.into_iter().collect::<Vec<_>>(),
        &fv.number.into_iter().collect::<Vec<_>>(),
    )?;
    phi.check_variable_kinds().map_err(EvalError::VariableKind)?;
    let mut env = interp.env();
    formula(interp, phi, &mut env)
}

pub fn evaluate_term(interp: &Interpretation<'_>, t: &Term) -> Result<i128, EvalError> {
    let fv = t.free_variables();
    interp.check_assigned(
        &fv.structure.into_iter().collect::<Vec<_>>(),
        &fv.number.into_iter().collect::<Vec<_>>(),
    )?;
    let mut env = interp.env();
    term(interp, t, &mut env)
}

fn lookup_elem(env: &[(&str, Value)], x: &str) -> Result<Element, EvalError> {
    match env.iter().rev().find(|(y, _)| *y == x) {
        Some((_, Value::Elem(e))) => Ok(*e),
        Some((_, Value::Num(_))) => Err(EvalError::VariableKind(x.to_string())),
        None => Err(EvalError::Unassigned(x.to_string())),
    }
}

fn lookup_num(env: &[(&str, Value)], k: &str) -> Result<i128, EvalError> {
    match env.iter().rev().find(|(y, _)| *y == k) {
        Some((_, Value::Num(v))) => Ok(*v),
        Some((_, Value::Elem(_))) => Err(EvalError::VariableKind(k.to_string())),
        None => Err(EvalError::Unassigned(k.to_string())),
    }
}

fn formula<'f>(
    interp: &Interpretation<'_>,
    phi: &'f Formula,
    env: &mut Vec<(&'f str, Value)>,
) -> Result<bool, EvalError> {
    let s = interp.structure;
    Ok(match phi {
        Formula::Eq(a, b) => lookup_elem(env, a)? == lookup_elem(env, b)?,
        Formula::Atom(r, args) => {
            let rel = s
                .signature()
                .index_of(r)
                .ok_or_else(|| EvalError::UnknownRelation(r.clone()))?;
            let arity = s.signature().arity(rel);
            if arity != args.len() {
                return Err(EvalError::Arity {
                    name: r.clone(),
                    expected: arity,
                    found: args.len(),
                });
            }
            let tuple = args
                .iter()
                .map(|x| lookup_elem(env, x))
                .collect::<Result<Vec<_>, _>>()?;
            s.contains_global(rel, &tuple)
        }
        Formula::Not(f) => !formula(interp, f, env)?,
        Formula::And(a, b) => formula(interp, a, env)? && formula(interp, b, env)?,
        Formula::Or(a, b) => formula(interp, a, env)? || formula(interp, b, env)?,
        Formula::Exists(x, f) | Formula::Forall(x, f) => {
            let want = matches!(phi, Formula::Exists(..));
            let mut result = !want;
            for e in s.elements() {
                env.push((x, Value::Elem(e)));
                let v = formula(interp, f, env);
                env.pop();
                if v? == want {
                    result = want;
                    break;
                }
            }
            result
        }
        Formula::ExistsNum(k, f) => {
            let mut result = false;
            for v in 0..=s.len() as i128 {
                env.push((k, Value::Num(v)));
                let r = formula(interp, f, env);
                env.pop();
                if r? {
                    result = true;
                    break;
                }
            }
            result
        }
        Formula::Pred(name, args) => {
            let p = interp
                .predicates
                .get(name)
                .ok_or_else(|| EvalError::UnknownPredicate(name.clone()))?;
            if p.arity != args.len() {
                return Err(EvalError::Arity {
                    name: name.clone(),
                    expected: p.arity,
                    found: args.len(),
                });
            }
            let values = args
                .iter()
                .map(|t| term(interp, t, env))
                .collect::<Result<Vec<_>, _>>()?;
            p.holds(&values)
        }
    })
}

fn term<'f>(
    interp: &Interpretation<'_>,
    t: &'f Term,
    env: &mut Vec<(&'f str, Value)>,
) -> Result<i128, EvalError> {
    match t {
        Term::Int(i) => Ok(*i),
        Term::Var(k) => lookup_num(env, k),
        Term::Add(a, b) => term(interp, a, env)?
            .checked_add(term(interp, b, env)?)
            .ok_or(EvalError::Overflow),
        Term::Mul(a, b) => term(interp, a, env)?
            .checked_mul(term(interp, b, env)?)
            .ok_or(EvalError::Overflow),
        Term::Count(xs, body) => {
            let n = interp.structure.len();
            let s = xs.len();
            if n == 0 {
                return Ok(0);
            }
            let base = env.len();
            for x in xs {
                env.push((x, Value::Elem(Element(0))));
            }
            let mut idx = vec![0usize; s];
            let mut count: i128 = 0;
            let outcome = loop {
                for (j, &i) in idx.iter().enumerate() {
                    env[base + j].1 = Value::Elem(Element(i as u32));
                }
                match formula(interp, body, env) {
                    Ok(true) => count += 1,
                    Ok(false) => {}
                    Err(e) => break Err(e),
                }
                // odometer step
                let mut j = s;
                loop {
                    if j == 0 {
                        break;
                    }
                    j -= 1;
                    idx[j] += 1;
                    if idx[j] < n {
                        break;
                    }
                    idx[j] = 0;
                }
                if j == 0 && idx.iter().all(|&i| i == 0) {
                    break Ok(count);
                }
            };
            env.truncate(base);
            outcome
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;
    use crate::logic::parse_term;

    const ENC: &str = "signature\nrelation L 2\nrelation C 1\ntuples\n\
        element 1\nelement 2\nelement 3\nelement 4\nelement 5\nelement 6\nelement 7\nelement 8\n\
        C 1\nC 7\nL 1 2\nL 2 3\nL 2 4\nL 2 5\nL 5 4\nL 6 4\nL 6 5\nL 7 6\nL 8 3\nL 8 4\nL 8 5\nL 8 6\n";
    const PHI: &str = "C(c) & (L(c,p) | exists x (L(c,x) & #(y).(L(x,y) & L(p,y)) >= 2))";

    fn setup() -> (Structure, PredicateCollection) {
        (Structure::parse(ENC).unwrap(), PredicateCollection::builtin())
    }

    #[test]
    fn example_formula_pairs() {
        let (s, p) = setup();
        let phi = parse_formula(PHI, s.signature(), &p).unwrap();
        let mut got = Vec::new();
        for c in s.elements() {
            for q in s.elements() {
                let i = Interpretation::new(&s, &p).bind("c", c).bind("p", q);
                if evaluate_formula(&i, &phi).unwrap() {
                    got.push(format!("{}{}", s.name(c), s.name(q)));
                }
            }
        }
        assert_eq!(got, ["12", "16", "18", "72", "76", "78"]);
    }

    #[test]
    fn counting_terms() {
        let (s, p) = setup();
        let t = parse_term("#(y).(L(x,y) & L(p,y))", s.signature(), &p).unwrap();
        let i = Interpretation::new(&s, &p)
            .bind("x", s.lookup("2").unwrap())
            .bind("p", s.lookup("8").unwrap());
        assert_eq!(evaluate_term(&i, &t).unwrap(), 3);
        let all = parse_term("#(y1,y2).(y1 = y1 & y2 = y2)", s.signature(), &p).unwrap();
        assert_eq!(evaluate_term(&i, &all).unwrap(), 64);
        assert_eq!(evaluate_term(&i, &Term::Int(-7)).unwrap(), -7);
    }

    #[test]
    fn unassigned_variable() {
        let (s, p) = setup();
        let phi = parse_formula("L(x,y)", s.signature(), &p).unwrap();
        let i = Interpretation::new(&s, &p).bind("x", Element(0));
        assert_eq!(evaluate_formula(&i, &phi), Err(EvalError::Unassigned("y".into())));
        let k = parse_formula("#(y).(C(y)) >= k", s.signature(), &p).unwrap();
        assert!(matches!(evaluate_formula(&i, &k), Err(EvalError::Unassigned(_))));
    }

    #[test]
    fn overflow_is_reported() {
        let (s, p) = setup();
        let big = Term::Mul(Box::new(Term::Int(i128::MAX)), Box::new(Term::Int(2)));
        let i = Interpretation::new(&s, &p);
        assert_eq!(evaluate_term(&i, &big), Err(EvalError::Overflow));
    }

    #[test]
    fn number_quantifier_ranges_to_universe_size() {
        let (s, p) = setup();
        let i = Interpretation::new(&s, &p);
        let yes = parse_formula("existsN k k = 8", s.signature(), &p).unwrap();
        let no = parse_formula("existsN k k = 9", s.signature(), &p).unwrap();
        assert!(evaluate_formula(&i, &yes).unwrap());
        assert!(!evaluate_formula(&i, &no).unwrap());
        let count = parse_formula("existsN k (#(y).(C(y)) = k & k = 2)", s.signature(), &p).unwrap();
        assert!(evaluate_formula(&i, &count).unwrap());
        let with_free = parse_formula("#(y).(C(y)) >= kappa", s.signature(), &p).unwrap();
        assert!(evaluate_formula(&i.clone().bind_number("kappa", 2), &with_free).unwrap());
        assert!(!evaluate_formula(&i.bind_number("kappa", 3), &with_free).unwrap());
    }

    #[test]
    fn quantifiers() {
        let (s, p) = setup();
        let i = Interpretation::new(&s, &p);
        let f = parse_formula("forall x exists y (L(x,y) | L(y,x))", s.signature(), &p).unwrap();
        assert!(evaluate_formula(&i, &f).unwrap());
        let g = parse_formula("exists x forall y !L(y,x)", s.signature(), &p).unwrap();
        assert!(evaluate_formula(&i, &g).unwrap());
    }
}
