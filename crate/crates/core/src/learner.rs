//! Learning unions of sphere types from labeled tuples.
//!
//! A candidate parameter tuple v̄ partitions the training examples by the
//! isomorphism type of 𝒩_ρ(ū v̄). The consistent learner accepts the first
//! candidate whose partition never mixes labels; the error minimizer takes
//! majority labels per class and keeps the best candidate. All structure
//! access goes through the metered local interface.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use rayon::prelude::*;
use thiserror::Error;

use crate::locality::{extract_sphere, spheres_isomorphic, CanonicalKey, Sphere, SphereError};
use crate::structure::{AccessReceipt, Element, Signature, Structure, StructureError};

/// Exact error rates.
pub type ErrorRate = Ratio<u64>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LearnError {
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Sphere(#[from] SphereError),
    #[error("expected tuples of arity {expected}, got {found}")]
    Arity { expected: usize, found: usize },
    #[error("structure degree {degree} exceeds the bound {bound}")]
    DegreeBound { degree: usize, bound: usize },
    #[error("bounded-degree learning needs a degree bound")]
    MissingDegreeBound,
    #[error("locality radius overflows for r={r}, w={w}")]
    RadiusOverflow { r: u32, w: usize },
    #[error("training sequence is empty")]
    EmptyTraining,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Ordered labeled k-tuples.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TrainingSequence {
    k: usize,
    examples: Vec<(Vec<Element>, bool)>,
}

impl TrainingSequence {
    pub fn new(k: usize) -> Self {
        TrainingSequence {
            k,
            examples: Vec::new(),
        }
    }

    pub fn push(&mut self, tuple: Vec<Element>, label: bool) -> Result<(), LearnError> {
        if tuple.len() != self.k {
            return Err(LearnError::Arity {
                expected: self.k,
                found: tuple.len(),
            });
        }
        self.examples.push((tuple, label));
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn examples(&self) -> &[(Vec<Element>, bool)] {
        &self.examples
    }

    /// Lines `u1 … uk label`; blank lines and `#` comments are skipped.
    pub fn parse(text: &str, s: &Structure, k: usize) -> Result<TrainingSequence, LearnError> {
        let mut t = TrainingSequence::new(k);
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let err = |message: String| LearnError::Parse { line: i + 1, message };
            if parts.len() != k + 1 {
                return Err(err(format!("expected {k} elements and a label")));
            }
            let label = match parts[k] {
                "0" => false,
                "1" => true,
                other => return Err(err(format!("label must be 0 or 1, got {other:?}"))),
            };
            let tuple = s
                .lookup_all(&parts[..k])
                .map_err(|e| err(e.to_string()))?;
            t.push(tuple, label)?;
        }
        Ok(t)
    }

    pub fn to_text(&self, s: &Structure) -> String {
        let mut out = String::new();
        for (u, c) in &self.examples {
            for e in u {
                out.push_str(s.name(*e));
                out.push(' ');
            }
            out.push_str(if *c { "1\n" } else { "0\n" });
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Consistent,
    MinError,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LearnerConfig {
    pub k: usize,
    pub ell: usize,
    pub r: u32,
    pub w: usize,
    pub mode: Mode,
    pub bounded_degree: Option<usize>,
    /// Δ of the background structure, supplied by the caller.
    pub degree: usize,
    /// Worker threads for the candidate loop; 1 runs sequentially.
    pub jobs: usize,
}

impl LearnerConfig {
    pub fn new(k: usize, ell: usize, r: u32, w: usize) -> Self {
        LearnerConfig {
            k,
            ell,
            r,
            w,
            mode: Mode::Consistent,
            bounded_degree: None,
            degree: 0,
            jobs: 1,
        }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_degree(mut self, degree: usize) -> Self {
        self.degree = degree;
        self
    }

    pub fn with_bound(mut self, d: usize) -> Self {
        self.bounded_degree = Some(d);
        self
    }

    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs.max(1);
        self
    }

    /// ρ = (2w+1)^r − 1.
    pub fn radius(&self) -> Result<usize, LearnError> {
        (2 * self.w + 1)
            .checked_pow(self.r)
            .map(|p| p - 1)
            .ok_or(LearnError::RadiusOverflow { r: self.r, w: self.w })
    }

    /// Radius of the parameter neighborhood N around the training tuples:
    /// ℓ·(2ρ+1), the reach of a chain of ℓ parameters each within 2ρ+1 of
    /// the previous ones.
    pub fn search_radius(&self) -> Result<usize, LearnError> {
        let rho = self.radius()?;
        rho.checked_mul(2)
            .and_then(|x| x.checked_add(1))
            .and_then(|x| x.checked_mul(self.ell))
            .ok_or(LearnError::RadiusOverflow { r: self.r, w: self.w })
    }
}

/// A union of (k+m)-center sphere types of radius ρ, with parameters v̄.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypothesis {
    pub(crate) k: usize,
    pub(crate) radius: usize,
    pub(crate) params: Vec<Element>,
    /// Positive types with a canonical witness each.
    pub(crate) positive: BTreeMap<CanonicalKey, Sphere>,
}

impl Hypothesis {
    pub fn empty(k: usize, radius: usize) -> Self {
        Hypothesis {
            k,
            radius,
            params: Vec::new(),
            positive: BTreeMap::new(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn params(&self) -> &[Element] {
        &self.params
    }

    pub fn positive_types(&self) -> impl Iterator<Item = (&CanonicalKey, &Sphere)> {
        self.positive.iter()
    }

    pub fn contains_type(&self, key: &CanonicalKey) -> bool {
        self.positive.contains_key(key)
    }

    /// Parameter tuple padded to arity `ell` by repeating its last entry (or
    /// `filler` when it is empty). Padding changes no classification.
    pub fn padded_params(&self, ell: usize, filler: Element) -> Vec<Element> {
        let mut p = self.params.clone();
        let last = p.last().copied().unwrap_or(filler);
        while p.len() < ell {
            p.push(last);
        }
        p
    }

    pub fn to_text(&self, s: &Structure) -> String {
        let mut out = format!(
            "hypothesis k {} m {} radius {}\nparams",
            self.k,
            self.params.len(),
            self.radius
        );
        for p in &self.params {
            out.push(' ');
            out.push_str(s.name(*p));
        }
        out.push_str(&format!("\ntypes {}\n", self.positive.len()));
        for sphere in self.positive.values() {
            out.push_str(&sphere.to_text());
        }
        out
    }

    pub fn parse(text: &str, s: &Structure) -> Result<Hypothesis, LearnError> {
        let sig: Arc<Signature> = s.signature_arc().clone();
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let err = |line: usize, message: &str| LearnError::Parse {
            line,
            message: message.to_string(),
        };
        let (line, header) = lines.next().ok_or_else(|| err(1, "empty hypothesis"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 7 || h[0] != "hypothesis" || h[1] != "k" || h[3] != "m" || h[5] != "radius" {
            return Err(err(line, "malformed header"));
        }
        let num = |x: &str| x.parse::<usize>().map_err(|_| err(line, "expected a number"));
        let (k, m, radius) = (num(h[2])?, num(h[4])?, num(h[6])?);
        let (line, pl) = lines.next().ok_or_else(|| err(line, "missing params line"))?;
        let mut parts = pl.split_whitespace();
        if parts.next() != Some("params") {
            return Err(err(line, "expected params line"));
        }
        let names: Vec<&str> = parts.collect();
        if names.len() != m {
            return Err(err(line, "parameter count does not match header"));
        }
        let params = s.lookup_all(&names).map_err(|e| err(line, &e.to_string()))?;
        let (line, tl) = lines.next().ok_or_else(|| err(line, "missing types line"))?;
        let count = match tl.split_whitespace().collect::<Vec<_>>()[..] {
            ["types", n] => n.parse::<usize>().map_err(|_| err(line, "bad type count"))?,
            _ => return Err(err(line, "expected types line")),
        };
        let mut positive = BTreeMap::new();
        for _ in 0..count {
            let sphere = Sphere::from_lines(sig.clone(), &mut lines)?;
            if sphere.centers().len() != k + m || sphere.radius() != radius {
                return Err(err(line, "type shape does not match header"));
            }
            let (key, canon) = sphere.canonical_form();
            positive.insert(key, canon);
        }
        Ok(Hypothesis {
            k,
            radius,
            params,
            positive,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Hypothesis(Hypothesis),
    Reject,
}

#[derive(Clone, Debug)]
pub struct LearnOutcome {
    pub verdict: Verdict,
    pub candidates_examined: usize,
    /// Local-access queries spent by this run.
    pub receipt: AccessReceipt,
    /// Misclassified training examples of the returned hypothesis.
    pub training_errors: usize,
}

impl LearnOutcome {
    pub fn hypothesis(&self) -> Option<&Hypothesis> {
        match &self.verdict {
            Verdict::Hypothesis(h) => Some(h),
            Verdict::Reject => None,
        }
    }

    pub fn is_reject(&self) -> bool {
        matches!(self.verdict, Verdict::Reject)
    }
}

fn check_arity(t: &TrainingSequence, cfg: &LearnerConfig) -> Result<(), LearnError> {
    if t.k() != cfg.k {
        return Err(LearnError::Arity {
            expected: cfg.k,
            found: t.k(),
        });
    }
    Ok(())
}

fn odometer(n: usize, m: usize, mut f: impl FnMut(&[usize])) {
    if m > 0 && n == 0 {
        return;
    }
    let mut idx = vec![0usize; m];
    loop {
        f(&idx);
        let mut j = m;
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < n {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// The empty tuple, then N^1, …, N^ℓ in lexicographic ball order, where N is
/// the search-radius ball around all training tuples. Bounded-degree mode
/// keeps only N^ℓ (or the empty tuple when N is empty).
pub fn candidate_parameters(
    s: &Structure,
    t: &TrainingSequence,
    cfg: &LearnerConfig,
) -> Result<Vec<Vec<Element>>, LearnError> {
    let n = neighborhood(s, t, cfg)?;
    Ok(candidates_over(&n, cfg.ell, cfg.bounded_degree.is_some()))
}

fn neighborhood(s: &Structure, t: &TrainingSequence, cfg: &LearnerConfig) -> Result<Vec<Element>, LearnError> {
    let entries: Vec<Element> = t.examples().iter().flat_map(|(u, _)| u.iter().copied()).collect();
    if entries.is_empty() {
        return Ok(Vec::new());
    }
    Ok(s.ball(&entries, cfg.search_radius()?)?)
}

fn candidates_over(n: &[Element], ell: usize, bounded: bool) -> Vec<Vec<Element>> {
    let mut out = Vec::new();
    let lengths = if bounded { ell..=ell } else { 0..=ell };
    for m in lengths {
        odometer(n.len(), m, |idx| out.push(idx.iter().map(|&i| n[i]).collect()));
    }
    if out.is_empty() {
        out.push(Vec::new());
    }
    out
}

struct Bucket {
    pos: usize,
    neg: usize,
    witness: Sphere,
}

/// Partition of the training examples for one candidate.
struct Partition {
    buckets: HashMap<CanonicalKey, Bucket>,
    mixed: bool,
}

fn partition(
    s: &Structure,
    t: &TrainingSequence,
    radius: usize,
    params: &[Element],
    stop_on_mix: bool,
) -> Result<Partition, LearnError> {
    let mut seen: HashMap<&[Element], CanonicalKey> = HashMap::new();
    let mut buckets: HashMap<CanonicalKey, Bucket> = HashMap::new();
    let mut mixed = false;
    for (u, c) in t.examples() {
        let key = match seen.get(u.as_slice()) {
            Some(k) => k.clone(),
            None => {
                let mut centers = u.clone();
                centers.extend_from_slice(params);
                let sphere = extract_sphere(s, &centers, radius)?;
                let key = sphere.canonical_key();
                buckets.entry(key.clone()).or_insert(Bucket {
                    pos: 0,
                    neg: 0,
                    witness: sphere,
                });
                seen.insert(u, key.clone());
                key
            }
        };
        let b = buckets.get_mut(&key).expect("bucket exists");
        if *c {
            b.pos += 1;
        } else {
            b.neg += 1;
        }
        if b.pos > 0 && b.neg > 0 {
            mixed = true;
            if stop_on_mix {
                break;
            }
        }
    }
    Ok(Partition { buckets, mixed })
}

fn hypothesis_from(p: Partition, k: usize, radius: usize, params: &[Element], mode: Mode) -> (Hypothesis, usize) {
    let mut positive = BTreeMap::new();
    let mut errors = 0;
    for (_, b) in p.buckets {
        let take = match mode {
            Mode::Consistent => b.pos > 0,
            Mode::MinError => b.pos >= b.neg,
        };
        errors += if take { b.neg } else { b.pos };
        if take {
            let (key, canon) = b.witness.canonical_form();
            positive.insert(key, canon);
        }
    }
    (
        Hypothesis {
            k,
            radius,
            params: params.to_vec(),
            positive,
        },
        errors,
    )
}

fn min_error_score(p: &Partition) -> usize {
    p.buckets.values().map(|b| b.pos.min(b.neg)).sum()
}

fn receipt_since(s: &Structure, before: AccessReceipt) -> AccessReceipt {
    let now = s.access_receipt();
    AccessReceipt {
        neighbor_queries: now.neighbor_queries - before.neighbor_queries,
        tuple_queries: now.tuple_queries - before.tuple_queries,
    }
}

fn run(
    s: &Structure,
    t: &TrainingSequence,
    cfg: &LearnerConfig,
    mode: Mode,
    bounded: bool,
) -> Result<LearnOutcome, LearnError> {
    check_arity(t, cfg)?;
    let before = s.access_receipt();
    let radius = cfg.radius()?;
    let n = neighborhood(s, t, cfg)?;
    let candidates = candidates_over(&n, cfg.ell, bounded);

    let chosen: Option<(usize, Partition)> = match mode {
        Mode::Consistent => {
            let test = |i: usize| -> Result<Option<Partition>, LearnError> {
                let p = partition(s, t, radius, &candidates[i], true)?;
                Ok((!p.mixed).then_some(p))
            };
            if cfg.jobs > 1 {
                let pool = pool(cfg.jobs);
                let found = pool.install(|| {
                    (0..candidates.len())
                        .into_par_iter()
                        .map(|i| test(i).map(|p| p.map(|p| (i, p))))
                        .find_first(|r| !matches!(r, Ok(None)))
                });
                match found {
                    Some(Ok(Some(hit))) => Some(hit),
                    Some(Err(e)) => return Err(e),
                    _ => None,
                }
            } else {
                let mut hit = None;
                for i in 0..candidates.len() {
                    if let Some(p) = test(i)? {
                        hit = Some((i, p));
                        break;
                    }
                }
                hit
            }
        }
        Mode::MinError => {
            let score = |i: usize| -> Result<(usize, usize), LearnError> {
                let p = partition(s, t, radius, &candidates[i], false)?;
                Ok((min_error_score(&p), i))
            };
            let best = if cfg.jobs > 1 {
                let pool = pool(cfg.jobs);
                let scored: Result<Vec<(usize, usize)>, LearnError> =
                    pool.install(|| (0..candidates.len()).into_par_iter().map(score).collect());
                scored?.into_iter().min()
            } else {
                let mut best: Option<(usize, usize)> = None;
                for i in 0..candidates.len() {
                    let sc = score(i)?;
                    if best.map_or(true, |b| sc < b) {
                        best = Some(sc);
                    }
                    if sc.0 == 0 {
                        break;
                    }
                }
                best
            };
            match best {
                Some((_, i)) => Some((i, partition(s, t, radius, &candidates[i], false)?)),
                None => None,
            }
        }
    };

    let examined = chosen.as_ref().map_or(candidates.len(), |(i, _)| i + 1);
    let (verdict, training_errors) = match chosen {
        Some((i, p)) => {
            let (h, errors) = hypothesis_from(p, cfg.k, radius, &candidates[i], mode);
            (Verdict::Hypothesis(h), errors)
        }
        None => (Verdict::Reject, 0),
    };
    Ok(LearnOutcome {
        verdict,
        candidates_examined: examined,
        receipt: receipt_since(s, before),
        training_errors,
    })
}

fn pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool")
}

/// First candidate whose type partition separates the labels, or Reject.
pub fn learn_consistent(s: &Structure, t: &TrainingSequence, cfg: &LearnerConfig) -> Result<LearnOutcome, LearnError> {
    run(s, t, cfg, Mode::Consistent, false)
}

/// Majority label per type (ties go to 1), best candidate by training error,
/// first one on ties. Never rejects.
pub fn learn_min_error(s: &Structure, t: &TrainingSequence, cfg: &LearnerConfig) -> Result<LearnOutcome, LearnError> {
    run(s, t, cfg, Mode::MinError, false)
}

/// Bounded-degree variant: parameters of full arity ℓ only. Runs in the
/// configured mode.
pub fn learn_bounded(s: &Structure, t: &TrainingSequence, cfg: &LearnerConfig) -> Result<LearnOutcome, LearnError> {
    let bound = cfg.bounded_degree.ok_or(LearnError::MissingDegreeBound)?;
    if cfg.degree > bound {
        return Err(LearnError::DegreeBound {
            degree: cfg.degree,
            bound,
        });
    }
    run(s, t, cfg, cfg.mode, true)
}

/// Dispatches on the bounded-degree flag and the mode.
pub fn learn(s: &Structure, t: &TrainingSequence, cfg: &LearnerConfig) -> Result<LearnOutcome, LearnError> {
    match (cfg.bounded_degree, cfg.mode) {
        (Some(_), _) => learn_bounded(s, t, cfg),
        (None, Mode::Consistent) => learn_consistent(s, t, cfg),
        (None, Mode::MinError) => learn_min_error(s, t, cfg),
    }
}

/// 1 iff the type of 𝒩_ρ(ū v̄) is one of the positive types.
pub fn evaluate_hypothesis(s: &Structure, h: &Hypothesis, tuple: &[Element]) -> Result<bool, LearnError> {
    if tuple.len() != h.k {
        return Err(LearnError::Arity {
            expected: h.k,
            found: tuple.len(),
        });
    }
    let mut centers = tuple.to_vec();
    centers.extend_from_slice(&h.params);
    let sphere = extract_sphere(s, &centers, h.radius)?;
    if h.positive.is_empty() {
        return Ok(false);
    }
    Ok(h.positive.contains_key(&sphere.canonical_key()))
}

/// err_T(H) as an exact fraction.
pub fn training_error(s: &Structure, h: &Hypothesis, t: &TrainingSequence) -> Result<ErrorRate, LearnError> {
    if t.is_empty() {
        return Err(LearnError::EmptyTraining);
    }
    let mut wrong = 0u64;
    for (u, c) in t.examples() {
        if evaluate_hypothesis(s, h, u)? != *c {
            wrong += 1;
        }
    }
    Ok(Ratio::new(wrong, t.len() as u64))
}

/// The pairwise test of the consistent learner, literally: some positive
/// and some negative example have isomorphic spheres.
pub fn pairwise_consistent(
    s: &Structure,
    t: &TrainingSequence,
    radius: usize,
    params: &[Element],
) -> Result<bool, LearnError> {
    let spheres = t
        .examples()
        .iter()
        .map(|(u, _)| {
            let mut centers = u.clone();
            centers.extend_from_slice(params);
            extract_sphere(s, &centers, radius)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let ex = t.examples();
    for i in 0..ex.len() {
        for j in i + 1..ex.len() {
            if ex[i].1 != ex[j].1 && spheres_isomorphic(&spheres[i], &spheres[j])? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The partition-based test used by the learner, exposed for comparison with
/// [`pairwise_consistent`].
pub fn bucket_consistent(
    s: &Structure,
    t: &TrainingSequence,
    radius: usize,
    params: &[Element],
) -> Result<bool, LearnError> {
    Ok(!partition(s, t, radius, params, true)?.mixed)
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Consistent => "consistent",
            Mode::MinError => "minerr",
        })
    }
}
