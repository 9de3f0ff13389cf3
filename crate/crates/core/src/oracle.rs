//! Slow reference implementations.
//!
//! Nothing here is clever: isomorphism by trying every permutation, spheres
//! by global breadth-first search over all tuples, and hypothesis search by
//! enumerating every parameter tuple of the full universe and every union of
//! realized types. Each oracle refuses inputs beyond its budget.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::time::{Duration, Instant};

use itertools::Itertools;
use num_rational::Ratio;
use thiserror::Error;

use crate::generators::SimpleGraph;
use crate::learner::{ErrorRate, Hypothesis, LearnError, LearnerConfig, TrainingSequence};
use crate::locality::{evaluate_sphere_formula, spheres_isomorphic, Sphere, SphereError};
use crate::structure::{Element, Structure, StructureError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle budget exceeded: {0}")]
    Budget(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Sphere(#[from] SphereError),
    #[error(transparent)]
    Learn(#[from] LearnError),
}

#[derive(Clone, Debug)]
pub struct OracleBudget {
    pub max_universe: usize,
    pub max_candidates: u64,
    pub wall_clock: Option<Duration>,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_universe: 64,
            max_candidates: 1 << 20,
            wall_clock: Some(Duration::from_secs(60)),
        }
    }
}

struct Clock {
    start: Instant,
    cap: Option<Duration>,
}

impl Clock {
    fn new(budget: &OracleBudget) -> Self {
        Clock {
            start: Instant::now(),
            cap: budget.wall_clock,
        }
    }

    fn check(&self) -> Result<(), OracleError> {
        match self.cap {
            Some(cap) if self.start.elapsed() > cap => Err(OracleError::Budget("wall clock".into())),
            _ => Ok(()),
        }
    }
}

/// All-permutations isomorphism test for local universes of at most 8.
pub fn brute_force_iso(a: &Sphere, b: &Sphere) -> Result<bool, OracleError> {
    if a.size() > 8 || b.size() > 8 {
        return Err(OracleError::Budget(format!(
            "spheres of size {} and {}",
            a.size(),
            b.size()
        )));
    }
    if a.signature() != b.signature() {
        return Err(SphereError::SignatureMismatch.into());
    }
    if a.centers().len() != b.centers().len() {
        return Err(SphereError::CenterCount(a.centers().len(), b.centers().len()).into());
    }
    if a.radius() != b.radius() {
        return Err(SphereError::Radius(a.radius(), b.radius()).into());
    }
    if a.size() != b.size() {
        return Ok(false);
    }
    let n = a.size();
    let rels = a.signature().len();
    let b_sets: Vec<HashSet<&Vec<u32>>> = (0..rels).map(|r| b.tuples(r).iter().collect()).collect();
    'perm: for perm in (0..n as u32).permutations(n) {
        for (x, y) in a.centers().iter().zip(b.centers()) {
            if perm[*x as usize] != *y {
                continue 'perm;
            }
        }
        for r in 0..rels {
            if a.tuples(r).len() != b.tuples(r).len() {
                return Ok(false);
            }
            for t in a.tuples(r) {
                let image: Vec<u32> = t.iter().map(|&u| perm[u as usize]).collect();
                if !b_sets[r].contains(&image) {
                    continue 'perm;
                }
            }
        }
        return Ok(true);
    }
    Ok(false)
}

/// Gaifman graph rebuilt from the tuple lists.
fn gaifman(s: &Structure) -> Vec<HashSet<Element>> {
    let mut adj = vec![HashSet::new(); s.len()];
    for rel in 0..s.signature().len() {
        for t in s.tuples(rel) {
            for &a in t {
                for &b in t {
                    if a != b {
                        adj[a.index()].insert(b);
                    }
                }
            }
        }
    }
    adj
}

fn distances_from(adj: &[HashSet<Element>], src: Element) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[src.index()] = Some(0);
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        let d = dist[u.index()].unwrap();
        for &v in &adj[u.index()] {
            if dist[v.index()].is_none() {
                dist[v.index()] = Some(d + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// N_r(ū) from full single-source distances, ordered by (distance, id).
pub fn brute_force_ball(s: &Structure, tuple: &[Element], radius: usize) -> Vec<Element> {
    let adj = gaifman(s);
    ball_from(&adj, s.len(), tuple, radius)
}

fn ball_from(adj: &[HashSet<Element>], n: usize, tuple: &[Element], radius: usize) -> Vec<Element> {
    let mut best = vec![None::<usize>; n];
    for &u in tuple {
        for (v, d) in distances_from(adj, u).into_iter().enumerate() {
            if let Some(d) = d {
                best[v] = Some(best[v].map_or(d, |b: usize| b.min(d)));
            }
        }
    }
    let mut ball: Vec<(usize, Element)> = best
        .iter()
        .enumerate()
        .filter_map(|(v, d)| d.filter(|&d| d <= radius).map(|d| (d, Element(v as u32))))
        .collect();
    ball.sort_unstable();
    ball.into_iter().map(|(_, e)| e).collect()
}

/// 𝒩_r(ū) by global search: all-pairs distances, then a scan over every
/// tuple of every relation.
pub fn brute_force_sphere(s: &Structure, tuple: &[Element], radius: usize) -> Result<Sphere, OracleError> {
    for &e in tuple {
        if e.index() >= s.len() {
            return Err(StructureError::UnknownElement(e.to_string()).into());
        }
    }
    let adj = gaifman(s);
    let ball = ball_from(&adj, s.len(), tuple, radius);
    let local: HashMap<Element, u32> = ball.iter().enumerate().map(|(i, &e)| (e, i as u32)).collect();
    let relations = (0..s.signature().len())
        .map(|rel| {
            s.tuples(rel)
                .iter()
                .filter_map(|t| t.iter().map(|e| local.get(e).copied()).collect::<Option<Vec<u32>>>())
                .collect()
        })
        .collect();
    let centers = tuple.iter().map(|e| local[e]).collect();
    Ok(Sphere::new(s.signature_arc().clone(), radius, ball.len(), centers, relations)?)
}

/// Classes of the examples under sphere isomorphism, in first-seen order.
struct Classes {
    reps: Vec<Sphere>,
    pos: Vec<usize>,
    neg: Vec<usize>,
}

fn classify(s: &Structure, t: &TrainingSequence, radius: usize, params: &[Element]) -> Result<Classes, OracleError> {
    let mut classes = Classes {
        reps: Vec::new(),
        pos: Vec::new(),
        neg: Vec::new(),
    };
    for (u, c) in t.examples() {
        let mut centers = u.clone();
        centers.extend_from_slice(params);
        let sphere = brute_force_sphere(s, &centers, radius)?;
        let mut found = None;
        for (i, rep) in classes.reps.iter().enumerate() {
            if spheres_isomorphic(rep, &sphere)? {
                found = Some(i);
                break;
            }
        }
        let i = match found {
            Some(i) => i,
            None => {
                classes.reps.push(sphere);
                classes.pos.push(0);
                classes.neg.push(0);
                classes.reps.len() - 1
            }
        };
        if *c {
            classes.pos[i] += 1;
        } else {
            classes.neg[i] += 1;
        }
    }
    Ok(classes)
}

fn all_parameter_tuples(n: usize, ell: usize) -> impl Iterator<Item = Vec<Element>> {
    (0..=ell).flat_map(move |m| {
        (0..m)
            .map(|_| (0..n as u32).map(Element))
            .multi_cartesian_product()
            .chain(std::iter::once(Vec::new()).filter(move |_| m == 0))
    })
}

fn check_space(s: &Structure, cfg: &LearnerConfig, budget: &OracleBudget) -> Result<(), OracleError> {
    if s.len() > budget.max_universe {
        return Err(OracleError::Budget(format!("universe of size {}", s.len())));
    }
    let count: u64 = (0..=cfg.ell as u32)
        .map(|m| (s.len() as u64).saturating_pow(m))
        .fold(0u64, |a, b| a.saturating_add(b));
    if count > budget.max_candidates {
        return Err(OracleError::Budget(format!("{count} parameter tuples")));
    }
    Ok(())
}

fn hypothesis_of(cfg: &LearnerConfig, radius: usize, params: &[Element], classes: &Classes, chosen: u64) -> Hypothesis {
    let mut h = Hypothesis::empty(cfg.k, radius);
    h.params = params.to_vec();
    for (i, rep) in classes.reps.iter().enumerate() {
        if chosen >> i & 1 == 1 {
            let (key, canon) = rep.canonical_form();
            h.positive.insert(key, canon);
        }
    }
    h
}

/// Subsets of the example classes, as bit masks. Capped at 2^20.
fn unions(count: usize) -> Result<std::ops::Range<u64>, OracleError> {
    if count > 20 {
        return Err(OracleError::Budget(format!("{count} realized types")));
    }
    Ok(0..1u64 << count)
}

fn union_errors(classes: &Classes, mask: u64) -> usize {
    (0..classes.reps.len())
        .map(|i| if mask >> i & 1 == 1 { classes.neg[i] } else { classes.pos[i] })
        .sum()
}

/// Any hypothesis over U^m (m ≤ ℓ) and unions of realized types that
/// classifies all of `t` correctly.
pub fn brute_force_consistent(
    s: &Structure,
    t: &TrainingSequence,
    cfg: &LearnerConfig,
    budget: &OracleBudget,
) -> Result<Option<Hypothesis>, OracleError> {
    check_space(s, cfg, budget)?;
    let clock = Clock::new(budget);
    let radius = cfg.radius()?;
    for params in all_parameter_tuples(s.len(), cfg.ell) {
        clock.check()?;
        let classes = classify(s, t, radius, &params)?;
        for mask in unions(classes.reps.len())? {
            if union_errors(&classes, mask) == 0 {
                return Ok(Some(hypothesis_of(cfg, radius, &params, &classes, mask)));
            }
        }
    }
    Ok(None)
}

/// Minimum training error over the same space; first minimum wins.
pub fn brute_force_min_error(
    s: &Structure,
    t: &TrainingSequence,
    cfg: &LearnerConfig,
    budget: &OracleBudget,
) -> Result<(Hypothesis, ErrorRate), OracleError> {
    if t.is_empty() {
        return Err(LearnError::EmptyTraining.into());
    }
    check_space(s, cfg, budget)?;
    let clock = Clock::new(budget);
    let radius = cfg.radius()?;
    let mut best: Option<(usize, Hypothesis)> = None;
    for params in all_parameter_tuples(s.len(), cfg.ell) {
        clock.check()?;
        let classes = classify(s, t, radius, &params)?;
        for mask in unions(classes.reps.len())? {
            let errors = union_errors(&classes, mask);
            if best.as_ref().map_or(true, |(e, _)| errors < *e) {
                best = Some((errors, hypothesis_of(cfg, radius, &params, &classes, mask)));
            }
        }
    }
    let (errors, h) = best.expect("at least the empty parameter tuple");
    Ok((h, Ratio::new(errors as u64, t.len() as u64)))
}

/// Exhaustive q-subset scan.
pub fn brute_force_clique(g: &SimpleGraph, q: usize) -> Result<bool, OracleError> {
    if g.n > 20 || q > 6 {
        return Err(OracleError::Budget(format!("graph of size {} with q = {q}", g.n)));
    }
    Ok((0..g.n)
        .combinations(q)
        .any(|c| c.iter().tuple_combinations().all(|(&a, &b)| g.has_edge(a, b))))
}

/// Outcome of a literal walk over Boolean combinations of sphere atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiStarReport {
    /// Realized types among all k-tuples, as witnesses.
    pub types: usize,
    /// Normalized formulas visited.
    pub formulas: u64,
    /// Every normalized formula was visited before the budget ran out.
    pub exhausted: bool,
    /// Distinct classification functions on U^k, sorted.
    pub functions: Vec<Vec<bool>>,
    /// Every function is constant on each realized type.
    pub all_unions: bool,
}

/// Enumerates every CNF over (possibly negated) realized sphere atoms for
/// the given parameters, evaluating each on all k-tuples.
pub fn phi_star_walk(
    s: &Structure,
    cfg: &LearnerConfig,
    params: &[Element],
    budget: &OracleBudget,
) -> Result<PhiStarReport, OracleError> {
    if s.len() > budget.max_universe {
        return Err(OracleError::Budget(format!("universe of size {}", s.len())));
    }
    let clock = Clock::new(budget);
    let radius = cfg.radius()?;
    let tuples: Vec<Vec<Element>> = (0..cfg.k)
        .map(|_| (0..s.len() as u32).map(Element))
        .multi_cartesian_product()
        .collect();
    let tuples = if cfg.k == 0 { vec![Vec::new()] } else { tuples };
    // realized types and the type index of each tuple
    let mut reps: Vec<Sphere> = Vec::new();
    let mut type_of = Vec::with_capacity(tuples.len());
    for u in &tuples {
        let mut centers = u.clone();
        centers.extend_from_slice(params);
        let sphere = brute_force_sphere(s, &centers, radius)?;
        let mut found = None;
        for (i, rep) in reps.iter().enumerate() {
            if brute_force_iso(rep, &sphere)? {
                found = Some(i);
                break;
            }
        }
        type_of.push(found.unwrap_or_else(|| {
            reps.push(sphere);
            reps.len() - 1
        }));
    }
    let t = reps.len();
    if t > 12 {
        return Err(OracleError::Budget(format!("{t} realized types")));
    }
    // atom values: sph_τ(ū v̄) through the local evaluation route
    let mut atoms = vec![vec![false; tuples.len()]; t];
    for (j, u) in tuples.iter().enumerate() {
        let mut centers = u.clone();
        centers.extend_from_slice(params);
        for (i, rep) in reps.iter().enumerate() {
            atoms[i][j] = evaluate_sphere_formula(s, rep, &centers)?;
        }
    }
    // clauses: for each atom, absent / positive / negative
    let clause_count = 3u64.pow(t as u32);
    if clause_count > 1 << 16 {
        return Err(OracleError::Budget(format!("{clause_count} clauses")));
    }
    let clause_values: Vec<Vec<bool>> = (0..clause_count)
        .map(|mut c| {
            let mut lits = Vec::new();
            for i in 0..t {
                match c % 3 {
                    1 => lits.push((i, true)),
                    2 => lits.push((i, false)),
                    _ => {}
                }
                c /= 3;
            }
            (0..tuples.len())
                .map(|j| lits.iter().any(|&(i, pos)| atoms[i][j] == pos))
                .collect()
        })
        .collect();
    let mut functions: HashSet<Vec<bool>> = HashSet::new();
    // masks past 64 clauses are never reached inside any sane budget
    let total = if clause_count >= 64 { u64::MAX } else { 1u64 << clause_count };
    let visited = total.min(budget.max_candidates);
    for mask in 0..visited {
        if mask % 4096 == 0 {
            clock.check()?;
        }
        let mut f = vec![true; tuples.len()];
        for (c, values) in clause_values.iter().enumerate().take(64) {
            if mask >> c & 1 == 1 {
                for (x, &v) in f.iter_mut().zip(values) {
                    *x &= v;
                }
            }
        }
        functions.insert(f);
    }
    let mut functions: Vec<Vec<bool>> = functions.into_iter().collect();
    functions.sort();
    let all_unions = functions.iter().all(|f| {
        let mut seen: BTreeMap<usize, bool> = BTreeMap::new();
        f.iter()
            .zip(&type_of)
            .all(|(&v, &ty)| *seen.entry(ty).or_insert(v) == v)
    });
    Ok(PhiStarReport {
        types: t,
        formulas: visited,
        exhausted: visited == total,
        functions,
        all_unions,
    })
}
