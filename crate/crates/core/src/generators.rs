//! Builders for fixed example structures, lower-bound gadgets, random
//! bounded-degree structures and planted targets.
//!
//! Every bundle re-derives its expected facts by evaluation before it is
//! returned; a mismatch is an error.

use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::learner::{LearnError, TrainingSequence};
use crate::logic::{
    evaluate_formula, parse_formula, EvalError, Formula, Interpretation, ParseError, PredicateCollection, Term,
};
use crate::structure::{Element, Signature, Structure, StructureBuilder, StructureError};

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error("t must be even and positive, got {0}")]
    OddBlockCount(usize),
    #[error("blocks need at least two vertices, got {0}")]
    BlockTooSmall(usize),
    #[error("clique size must be at least 2, got {0}")]
    CliqueTooSmall(usize),
    #[error("clique size {q} exceeds graph size {n}")]
    CliqueTooLarge { q: usize, n: usize },
    #[error("graph edge ({0}, {1}) is out of range or a loop")]
    BadEdge(usize, usize),
    #[error("cannot place {requested} tuples with degree at most {degree} on {n} elements")]
    Infeasible {
        requested: usize,
        degree: usize,
        n: usize,
    },
    #[error("free variable {0} has no value")]
    Unassignable(String),
    #[error("generated fact {0} does not hold")]
    FactMismatch(String),
}

/// A structure with named formulas, training sequences and checked facts.
#[derive(Debug)]
pub struct GadgetBundle {
    pub structure: Structure,
    pub formulas: BTreeMap<String, String>,
    pub trainings: BTreeMap<String, TrainingSequence>,
    pub facts: BTreeMap<String, String>,
}

pub const ENCYCLOPEDIA_DOCUMENT: &str = "\
# eight pages; C marks category pages, L(a,b) a link from a to b
signature
relation L 2
relation C 1
tuples
element 1
element 2
element 3
element 4
element 5
element 6
element 7
element 8
C 1
C 7
L 1 2
L 2 3
L 2 4
L 2 5
L 5 4
L 6 4
L 6 5
L 7 6
L 8 3
L 8 4
L 8 5
L 8 6
";

/// A category page c and a page p: c links to p, or c links to a page
/// sharing at least two out-links with p.
pub const ENCYCLOPEDIA_FORMULA: &str =
    "C(c) & (L(c,p) | exists x (L(c,x) & #(y).(L(x,y) & L(p,y)) >= 2))";

pub const ENCYCLOPEDIA_TRAINING: &str = "1 2 1\n1 8 1\n7 6 1\n1 5 0\n8 2 0\n";

pub const ENCYCLOPEDIA_RELATION: [(&str, &str); 6] =
    [("1", "2"), ("1", "6"), ("1", "8"), ("7", "2"), ("7", "6"), ("7", "8")];

pub fn encyclopedia_structure() -> Structure {
    Structure::parse(ENCYCLOPEDIA_DOCUMENT).expect("fixed document parses")
}

pub fn gen_encyclopedia() -> Result<GadgetBundle, GeneratorError> {
    let s = encyclopedia_structure();
    let preds = PredicateCollection::builtin();
    let phi = parse_formula(ENCYCLOPEDIA_FORMULA, s.signature(), &preds)?;
    let mut relation = Vec::new();
    for c in s.elements() {
        for p in s.elements() {
            let i = Interpretation::new(&s, &preds).bind("c", c).bind("p", p);
            if evaluate_formula(&i, &phi)? {
                relation.push((s.name(c).to_string(), s.name(p).to_string()));
            }
        }
    }
    let expected: Vec<(String, String)> = ENCYCLOPEDIA_RELATION
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    if relation != expected {
        return Err(GeneratorError::FactMismatch("encyclopedia relation".into()));
    }
    let t = TrainingSequence::parse(ENCYCLOPEDIA_TRAINING, &s, 2)?;
    for (u, c) in t.examples() {
        let i = Interpretation::new(&s, &preds).bind("c", u[0]).bind("p", u[1]);
        if evaluate_formula(&i, &phi)? != *c {
            return Err(GeneratorError::FactMismatch("training label".into()));
        }
    }
    let mut facts = BTreeMap::new();
    facts.insert(
        "relation".into(),
        relation.iter().map(|(a, b)| format!("({a},{b})")).collect::<Vec<_>>().join(" "),
    );
    facts.insert("size".into(), s.len().to_string());
    facts.insert("max_degree".into(), s.max_degree().to_string());
    Ok(GadgetBundle {
        structure: s,
        formulas: BTreeMap::from([("phi".to_string(), ENCYCLOPEDIA_FORMULA.to_string())]),
        trainings: BTreeMap::from([("T".to_string(), t)]),
        facts,
    })
}

/// Whether block G_ij of the lower-bound gadget carries its single edge.
pub fn thm2_block_has_edge(i: usize, j: usize) -> bool {
    match j {
        1 => false,
        2 => true,
        _ => (j - i) % 2 == 1,
    }
}

/// Lower-bound gadget with t blocks per side, each of size n.
///
/// Formula `phi` is the displayed one with each conjunct moved under the
/// innermost quantifier it needs; `phi_prenex` is the literal form.
pub fn gen_thm2(t: usize, n: usize) -> Result<GadgetBundle, GeneratorError> {
    if t == 0 || t % 2 == 1 {
        return Err(GeneratorError::OddBlockCount(t));
    }
    if n < 2 {
        return Err(GeneratorError::BlockTooSmall(n));
    }
    let sig = Signature::from_relations([("E", 2), ("R", 2), ("S", 2)])?;
    let mut b = StructureBuilder::new(sig);
    for j in 1..=t {
        b.element(&format!("x{j}"));
    }
    b.element("y1");
    b.element("y2");
    for i in 1..=2 {
        for j in 1..=t {
            let block: Vec<String> = (1..=n).map(|s| format!("g{i}_{j}_{s}")).collect();
            for v in &block {
                b.tuple("R", &[&format!("x{j}"), v])?;
                b.tuple("S", &[&format!("y{i}"), v])?;
            }
            if thm2_block_has_edge(i, j) {
                b.tuple("E", &[&block[0], &block[1]])?;
                b.tuple("E", &[&block[1], &block[0]])?;
            }
        }
    }
    let s = b.build();
    let preds = PredicateCollection::builtin();
    let nested = "exists v1 (R(x,v1) & S(y,v1) & exists v2 (R(x,v2) & S(y,v2) & E(v1,v2)))";
    let prenex = "exists v1 exists v2 (R(x,v1) & R(x,v2) & S(y,v1) & S(y,v2) & E(v1,v2))";
    let phi = parse_formula(nested, s.signature(), &preds)?;

    let mut facts = BTreeMap::new();
    let mut labels = vec![vec![false; t + 1]; 3];
    for i in 1..=2 {
        let y = s.lookup(&format!("y{i}"))?;
        for j in 1..=t {
            let x = s.lookup(&format!("x{j}"))?;
            let interp = Interpretation::new(&s, &preds).bind("x", x).bind("y", y);
            let c = evaluate_formula(&interp, &phi)?;
            if c != thm2_block_has_edge(i, j) {
                return Err(GeneratorError::FactMismatch(format!("c_{i}_{j}")));
            }
            labels[i][j] = c;
            facts.insert(format!("c_{i}_{j}"), u8::from(c).to_string());
        }
    }
    if t >= 3 && (labels[1][3] || !labels[2][3]) {
        return Err(GeneratorError::FactMismatch("c_1_3 = 0, c_2_3 = 1".into()));
    }
    if s.len() != t * (2 * n + 1) + 2 {
        return Err(GeneratorError::FactMismatch("universe size".into()));
    }
    facts.insert("size".into(), s.len().to_string());

    let x = |j: usize| s.lookup(&format!("x{j}")).expect("declared");
    let mut t1 = TrainingSequence::new(1);
    for j in 1..=t {
        t1.push(vec![x(j)], labels[1][j])?;
    }
    let mut t2 = TrainingSequence::new(1);
    t2.push(vec![x(1)], labels[2][1])?;
    t2.push(vec![x(2)], labels[2][2])?;
    let mut j = 3;
    while j < t {
        t2.push(vec![x(j + 1)], labels[2][j + 1])?;
        t2.push(vec![x(j)], labels[2][j])?;
        j += 2;
    }
    Ok(GadgetBundle {
        structure: s,
        formulas: BTreeMap::from([
            ("phi".to_string(), nested.to_string()),
            ("phi_prenex".to_string(), prenex.to_string()),
        ]),
        trainings: BTreeMap::from([("T1".to_string(), t1), ("T2".to_string(), t2)]),
        facts,
    })
}

/// Simple undirected graph on vertices 0..n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl SimpleGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self, GeneratorError> {
        let mut set = HashSet::new();
        for &(a, b) in &edges {
            if a >= n || b >= n || a == b {
                return Err(GeneratorError::BadEdge(a, b));
            }
            set.insert((a.min(b), a.max(b)));
        }
        let mut edges: Vec<_> = set.into_iter().collect();
        edges.sort_unstable();
        Ok(SimpleGraph { n, edges })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        SimpleGraph { n, edges }
    }

    pub fn edgeless(n: usize) -> Self {
        SimpleGraph { n, edges: Vec::new() }
    }

    /// G(n, p), seeded.
    pub fn random(n: usize, p: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen_bool(p) {
                    edges.push((a, b));
                }
            }
        }
        SimpleGraph { n, edges }
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }
}

/// The ψ_ij disjunct, with the clique constraints pushed inward.
fn eth_psi(i: usize, j: usize, q: usize) -> String {
    let mut inner = String::new();
    for s in (1..=q).rev() {
        let mut parts = vec![format!("X{i}(v{s})"), format!("Y{j}(v{s})")];
        for s1 in 1..s {
            parts.push(format!("E(v{s1},v{s})"));
        }
        if !inner.is_empty() {
            parts.push(inner);
        }
        inner = format!("exists v{s} ({})", parts.join(" & "));
    }
    format!("X{i}(x) & Y{j}(y) & {inner}")
}

/// Clique gadget: v = y1 is a consistent parameter iff G has a q-clique.
pub fn gen_eth(g: &SimpleGraph, q: usize) -> Result<GadgetBundle, GeneratorError> {
    if q < 2 {
        return Err(GeneratorError::CliqueTooSmall(q));
    }
    if q > g.n {
        return Err(GeneratorError::CliqueTooLarge { q, n: g.n });
    }
    let sig = Signature::from_relations([
        ("E", 2),
        ("X", 1),
        ("Y", 1),
        ("X1", 1),
        ("X2", 1),
        ("Y1", 1),
        ("Y2", 1),
    ])?;
    let mut b = StructureBuilder::new(sig);
    for name in ["x1", "x2", "y1", "y2"] {
        b.element(name);
    }
    let n = g.n;
    let hplus = SimpleGraph::complete(q);
    // (prefix, graph edges, X side, Y side)
    let blocks: [(&str, &[(usize, usize)], &str, &str); 4] = [
        ("g", &g.edges, "X1", "Y1"),
        ("gc", &g.edges, "X2", "Y2"),
        ("hp", &hplus.edges, "X1", "Y2"),
        ("hm", &[], "X2", "Y1"),
    ];
    for (prefix, edges, xr, yr) in blocks {
        for v in 0..n {
            let name = format!("{prefix}{v}");
            b.element(&name);
            b.tuple(xr, &[&name])?;
            b.tuple(yr, &[&name])?;
        }
        for &(a, c) in edges {
            let (a, c) = (format!("{prefix}{a}"), format!("{prefix}{c}"));
            b.tuple("E", &[&a, &c])?;
            b.tuple("E", &[&c, &a])?;
        }
    }
    for (rel, e) in [("X", "x1"), ("X", "x2"), ("Y", "y1"), ("Y", "y2")] {
        b.tuple(rel, &[e])?;
    }
    for (rel, e) in [("X1", "x1"), ("X2", "x2"), ("Y1", "y1"), ("Y2", "y2")] {
        b.tuple(rel, &[e])?;
    }
    let s = b.build();
    if s.len() != 4 + 4 * n {
        return Err(GeneratorError::FactMismatch("universe size".into()));
    }
    let mut formulas = BTreeMap::new();
    let mut disjuncts = Vec::new();
    for i in 1..=2 {
        for j in 1..=2 {
            let psi = eth_psi(i, j, q);
            formulas.insert(format!("psi_{i}{j}"), psi.clone());
            disjuncts.push(format!("({psi})"));
        }
    }
    let phi_text = format!("X(x) & Y(y) & ({})", disjuncts.join(" | "));
    formulas.insert("phi".into(), phi_text.clone());

    let preds = PredicateCollection::builtin();
    let phi = parse_formula(&phi_text, s.signature(), &preds)?;
    let mut t = TrainingSequence::new(1);
    t.push(vec![s.lookup("x1")?], true)?;
    t.push(vec![s.lookup("x2")?], false)?;
    let clique = has_clique(g, q);
    let mut facts = BTreeMap::new();
    facts.insert("clique".into(), u8::from(clique).to_string());
    for v in ["y1", "y2"] {
        let consistent = parameter_consistent(&s, &phi, &t, s.lookup(v)?, &preds)?;
        let expected = (v == "y1") == clique;
        if consistent != expected {
            return Err(GeneratorError::FactMismatch(format!("consistency of {v}")));
        }
        facts.insert(format!("consistent_{v}"), u8::from(consistent).to_string());
    }
    Ok(GadgetBundle {
        structure: s,
        formulas,
        trainings: BTreeMap::from([("T".to_string(), t)]),
        facts,
    })
}

/// Does φ(x; v) label every example of `t` correctly?
pub fn parameter_consistent(
    s: &Structure,
    phi: &Formula,
    t: &TrainingSequence,
    v: Element,
    preds: &PredicateCollection,
) -> Result<bool, GeneratorError> {
    for (u, c) in t.examples() {
        let i = Interpretation::new(s, preds).bind("x", u[0]).bind("y", v);
        if evaluate_formula(&i, phi)? != *c {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Straightforward backtracking clique search used for the build-time check.
fn has_clique(g: &SimpleGraph, q: usize) -> bool {
    fn grow(g: &SimpleGraph, chosen: &mut Vec<usize>, from: usize, q: usize) -> bool {
        if chosen.len() == q {
            return true;
        }
        for v in from..g.n {
            if chosen.iter().all(|&u| g.has_edge(u, v)) {
                chosen.push(v);
                if grow(g, chosen, v + 1, q) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    grow(g, &mut Vec::new(), 0, q)
}

/// Parameters of a random structure.
#[derive(Clone, Debug)]
pub struct RandomSpec {
    pub n: usize,
    pub max_degree: usize,
    pub signature: Signature,
    /// Attempted tuples per relation of arity at least 2.
    pub tuples_per_relation: usize,
    /// Membership probability for unary relations.
    pub unary_probability: f64,
}

impl RandomSpec {
    pub fn graph(n: usize, max_degree: usize, edges: usize) -> Self {
        RandomSpec {
            n,
            max_degree,
            signature: Signature::from_relations([("E", 2)]).expect("valid"),
            tuples_per_relation: edges,
            unary_probability: 0.0,
        }
    }
}

/// Seeded random structure with Gaifman degree at most `max_degree`.
///
/// Tuples that would push a degree over the bound are redrawn a bounded
/// number of times and then skipped, so fewer tuples than requested may be
/// placed. Elements are `v0..v{n-1}`.
pub fn gen_random(spec: &RandomSpec, seed: u64) -> Result<Structure, GeneratorError> {
    let n = spec.n;
    let d = spec.max_degree;
    let wide: Vec<usize> = (0..spec.signature.len())
        .filter(|&r| spec.signature.arity(r) >= 2)
        .collect();
    let requested = spec.tuples_per_relation * wide.len();
    if d > 0 && requested > n * d / 2 {
        return Err(GeneratorError::Infeasible {
            requested,
            degree: d,
            n,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = StructureBuilder::new(spec.signature.clone());
    let ids: Vec<Element> = (0..n).map(|i| b.element(&format!("v{i}"))).collect();
    let mut adj: Vec<HashSet<usize>> = vec![HashSet::new(); n];
    for rel in 0..spec.signature.len() {
        let arity = spec.signature.arity(rel);
        if arity == 1 {
            for &e in &ids {
                if rng.gen_bool(spec.unary_probability) {
                    b.tuple_ids(rel, vec![e])?;
                }
            }
            continue;
        }
        if d == 0 || n == 0 {
            continue;
        }
        for _ in 0..spec.tuples_per_relation {
            for _attempt in 0..50 {
                let t: Vec<usize> = (0..arity).map(|_| rng.gen_range(0..n)).collect();
                let mut added: Vec<(usize, usize)> = Vec::new();
                for &a in &t {
                    for &c in &t {
                        if a != c && !adj[a].contains(&c) && !added.contains(&(a, c)) {
                            added.push((a, c));
                        }
                    }
                }
                let fits = (0..n).all(|v| {
                    let extra = added.iter().filter(|&&(a, _)| a == v).count();
                    adj[v].len() + extra <= d
                });
                if fits {
                    for (a, c) in added {
                        adj[a].insert(c);
                    }
                    b.tuple_ids(rel, t.iter().map(|&i| ids[i]).collect())?;
                    break;
                }
            }
        }
    }
    Ok(b.build())
}

/// Shape of random formulas.
#[derive(Clone, Debug)]
pub struct FormulaSpec {
    pub signature: Signature,
    /// Free structure variables, all of which may occur.
    pub free: Vec<String>,
    /// Free number variables that may occur in comparisons.
    pub number_params: Vec<String>,
    pub max_rank: usize,
    pub max_width: usize,
    /// Allow `existsN` subformulas.
    pub number_quantifiers: bool,
    /// Rough bound on the number of connectives.
    pub size: usize,
}

/// Random formula with binding rank ≤ `max_rank` and width ≤ `max_width`.
pub fn random_formula(spec: &FormulaSpec, rng: &mut impl Rng) -> Formula {
    let mut g = FormulaGen {
        spec,
        fresh: 0,
        numbers: 0,
    };
    let scope = spec.free.clone();
    let budget = spec.size.max(1);
    g.formula(rng, &scope, spec.max_rank, budget)
}

struct FormulaGen<'a> {
    spec: &'a FormulaSpec,
    fresh: usize,
    numbers: usize,
}

impl FormulaGen<'_> {
    fn var(&mut self) -> String {
        self.fresh += 1;
        format!("q{}", self.fresh)
    }

    fn atomic(&mut self, rng: &mut impl Rng, scope: &[String]) -> Formula {
        let sig = &self.spec.signature;
        if scope.is_empty() {
            let c = rng.gen_range(0..2);
            return Formula::pred(">=", vec![Term::Int(c), Term::Int(1)]);
        }
        let pick = |rng: &mut dyn rand::RngCore| scope[rng.gen_range(0..scope.len())].clone();
        if sig.is_empty() || rng.gen_bool(0.15) {
            return Formula::Eq(pick(rng), pick(rng));
        }
        let rel = rng.gen_range(0..sig.len());
        let args = (0..sig.arity(rel)).map(|_| pick(rng)).collect();
        Formula::Atom(sig.relations()[rel].name.clone(), args)
    }

    fn formula(&mut self, rng: &mut impl Rng, scope: &[String], rank: usize, budget: usize) -> Formula {
        let w = self.spec.max_width;
        let can_bind = rank > 0 && w > 0;
        if budget <= 1 {
            if can_bind && rng.gen_bool(0.3) {
                return self.binder(rng, scope, rank, 1);
            }
            return self.atomic(rng, scope);
        }
        match rng.gen_range(0..10) {
            0 | 1 => Formula::not(self.formula(rng, scope, rank, budget - 1)),
            2 | 3 => {
                let left = budget / 2;
                Formula::and(
                    self.formula(rng, scope, rank, left),
                    self.formula(rng, scope, rank, budget - 1 - left),
                )
            }
            4 | 5 => {
                let left = budget / 2;
                Formula::or(
                    self.formula(rng, scope, rank, left),
                    self.formula(rng, scope, rank, budget - 1 - left),
                )
            }
            _ if can_bind => self.binder(rng, scope, rank, budget - 1),
            _ => self.atomic(rng, scope),
        }
    }

    fn binder(&mut self, rng: &mut impl Rng, scope: &[String], rank: usize, budget: usize) -> Formula {
        let choice = rng.gen_range(0..4);
        if choice < 2 {
            let x = self.var();
            let mut inner = scope.to_vec();
            inner.push(x.clone());
            let body = self.formula(rng, &inner, rank - 1, budget);
            return if choice == 0 {
                Formula::exists(&x, body)
            } else {
                Formula::forall(&x, body)
            };
        }
        let count = self.count(rng, scope, rank, budget);
        let ops = ["<=", ">=", "=", "<", ">", "!="];
        let op = ops[rng.gen_range(0..ops.len())];
        let numbers = &self.spec.number_params;
        if self.spec.number_quantifiers && rng.gen_bool(0.25) {
            self.numbers += 1;
            let k = format!("n{}", self.numbers);
            let c = rng.gen_range(0..4);
            return Formula::ExistsNum(
                k.clone(),
                Box::new(Formula::and(
                    Formula::pred("=", vec![count, Term::Var(k.clone())]),
                    Formula::pred(op, vec![Term::Var(k), Term::Int(c)]),
                )),
            );
        }
        let rhs = if !numbers.is_empty() && rng.gen_bool(0.4) {
            Term::Var(numbers[rng.gen_range(0..numbers.len())].clone())
        } else if rng.gen_bool(0.2) {
            return Formula::pred("P_exists", vec![count]);
        } else {
            Term::Int(rng.gen_range(0..4))
        };
        let lhs = if rng.gen_bool(0.2) {
            Term::Add(Box::new(count), Box::new(Term::Int(rng.gen_range(-1..2))))
        } else {
            count
        };
        Formula::pred(op, vec![lhs, rhs])
    }

    fn count(&mut self, rng: &mut impl Rng, scope: &[String], rank: usize, budget: usize) -> Term {
        let s = rng.gen_range(1..=self.spec.max_width);
        let xs: Vec<String> = (0..s).map(|_| self.var()).collect();
        let mut inner = scope.to_vec();
        inner.extend(xs.iter().cloned());
        let body = self.formula(rng, &inner, rank - 1, budget);
        Term::Count(xs, Box::new(body))
    }
}

/// A planted target φ(x̄; v̄, λ̄) on a fixed structure.
#[derive(Clone, Debug)]
pub struct Target {
    pub formula: Formula,
    pub instance_vars: Vec<String>,
    pub param_vars: Vec<String>,
    pub params: Vec<Element>,
    pub numbers: Vec<(String, i128)>,
}

impl Target {
    pub fn label(&self, s: &Structure, preds: &PredicateCollection, tuple: &[Element]) -> Result<bool, GeneratorError> {
        let mut i = Interpretation::new(s, preds);
        for (x, &e) in self.instance_vars.iter().zip(tuple) {
            i = i.bind(x, e);
        }
        for (y, &e) in self.param_vars.iter().zip(&self.params) {
            i = i.bind(y, e);
        }
        for (k, v) in &self.numbers {
            i = i.bind_number(k, *v);
        }
        Ok(evaluate_formula(&i, &self.formula)?)
    }

    fn check(&self) -> Result<(), GeneratorError> {
        let fv = self.formula.free_variables();
        for x in &fv.structure {
            if !self.instance_vars.contains(x) && !self.param_vars.contains(x) {
                return Err(GeneratorError::Unassignable(x.clone()));
            }
        }
        for k in &fv.number {
            if !self.numbers.iter().any(|(n, _)| n == k) {
                return Err(GeneratorError::Unassignable(k.clone()));
            }
        }
        if self.param_vars.len() != self.params.len() {
            return Err(GeneratorError::Unassignable(
                self.param_vars.get(self.params.len()).cloned().unwrap_or_default(),
            ));
        }
        Ok(())
    }
}

/// `count` uniformly drawn k-tuples labeled by the target.
pub fn plant_target(
    s: &Structure,
    target: &Target,
    preds: &PredicateCollection,
    count: usize,
    seed: u64,
) -> Result<TrainingSequence, GeneratorError> {
    target.check()?;
    let k = target.instance_vars.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = TrainingSequence::new(k);
    let elements: Vec<Element> = s.elements().collect();
    if elements.is_empty() && count > 0 && k > 0 {
        return Err(GeneratorError::Unassignable(target.instance_vars[0].clone()));
    }
    for _ in 0..count {
        let u: Vec<Element> = (0..k)
            .map(|_| *elements.choose(&mut rng).expect("nonempty universe"))
            .collect();
        let c = target.label(s, preds, &u)?;
        t.push(u, c)?;
    }
    Ok(t)
}
