//! Sample sizes, finite distributions and the agnostic PAC experiment.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::learner::{
    evaluate_hypothesis, learn_bounded, training_error, ErrorRate, Hypothesis, LearnError, LearnerConfig, Mode,
    TrainingSequence,
};
use crate::locality::extract_sphere_global;
use crate::oracle::OracleBudget;
use crate::structure::{Element, Signature, Structure, StructureError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PacError {
    #[error("{name} = {value} is out of range")]
    OutOfRange { name: &'static str, value: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("distribution weights sum to {0}, not 1")]
    NotNormalized(String),
    #[error("weight {0} is not positive")]
    NonPositiveWeight(String),
    #[error("support tuple has {found} entries, expected {expected}")]
    Arity { expected: usize, found: usize },
    #[error("empty support")]
    EmptySupport,
    #[error("common denominator {0} too large for exact sampling")]
    Denominator(String),
    #[error("class minimum infeasible: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Learn(#[from] LearnError),
}

fn unit_interval(name: &'static str, x: f64) -> Result<(), PacError> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(PacError::OutOfRange {
            name,
            value: x.to_string(),
        })
    }
}

/// ⌈ln(2|H|/δ) / (2ε²)⌉.
pub fn uc_sample_size(class_size: u64, eps: f64, delta: f64) -> Result<u64, PacError> {
    if class_size == 0 {
        return Err(PacError::OutOfRange {
            name: "class size",
            value: "0".into(),
        });
    }
    uc_sample_size_ln((class_size as f64).ln(), eps, delta)
}

/// Same, from ln |H| directly, for classes too large to count in a word.
pub fn uc_sample_size_ln(ln_class_size: f64, eps: f64, delta: f64) -> Result<u64, PacError> {
    unit_interval("eps", eps)?;
    unit_interval("delta", delta)?;
    if !(ln_class_size >= 0.0) || !ln_class_size.is_finite() {
        return Err(PacError::OutOfRange {
            name: "ln class size",
            value: ln_class_size.to_string(),
        });
    }
    let t = ((2f64.ln() + ln_class_size - delta.ln()) / (2.0 * eps * eps)).ceil();
    Ok(t.max(1.0) as u64)
}

/// s·⌈ln(n/δ) / ε²⌉.
pub fn pac_sample_size(n: u64, ell: usize, s: u64, eps: f64, delta: f64) -> Result<u64, PacError> {
    let _ = ell;
    if n == 0 {
        return Err(PacError::OutOfRange {
            name: "n",
            value: "0".into(),
        });
    }
    if s == 0 {
        return Err(PacError::OutOfRange {
            name: "s",
            value: "0".into(),
        });
    }
    unit_interval("eps", eps)?;
    unit_interval("delta", delta)?;
    let inner = ((n as f64 / delta).ln() / (eps * eps)).ceil().max(1.0) as u64;
    s.checked_mul(inner).ok_or(PacError::OutOfRange {
        name: "s",
        value: s.to_string(),
    })
}

/// ν_d(r) = 1 + d·Σ_{i<r} (d−1)^i, the size bound for a radius-r ball
/// around one element in degree d.
pub fn nu(d: u64, r: u64) -> BigUint {
    let d = BigUint::from(d);
    let base = if d.is_zero() {
        BigUint::zero()
    } else {
        &d - 1u32
    };
    let mut sum = BigUint::zero();
    let mut power = BigUint::one();
    for _ in 0..r {
        sum += &power;
        power *= &base;
        if base.is_zero() {
            break;
        }
    }
    BigUint::one() + d * sum
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhiStarBounds {
    /// ρ = (2w+1)^r − 1.
    pub radius: BigUint,
    /// ν_d(ρ).
    pub nu: BigUint,
    /// (k+ℓ)·ν_d(ρ), elements in a (k+ℓ)-center type.
    pub e: BigUint,
    /// log₂ F = Σ_R E^ar(R), where F bounds the number of types.
    pub log2_f: BigUint,
    /// log₂ log₂ log₂ of the bound 2^(2^(2F·2^k·k!)) on normalized
    /// formulas, i.e. 1 + log₂F + k + log₂ k!. Infinite past f64 range.
    pub log3_phi_star: f64,
}

/// Bounds on type sizes, type counts and normalized formula counts.
///
/// The radius ρ must fit in a u64; beyond that ν alone has more bits than
/// memory holds.
pub fn phi_star_bounds(d: u64, k: usize, ell: usize, r: u32, w: u64, sig: &Signature) -> PhiStarBounds {
    let radius = BigUint::from(2 * w + 1).pow(r) - 1u32;
    let nu = nu(d, radius.to_u64().expect("radius fits in u64"));
    let e = BigUint::from(k + ell) * &nu;
    let mut log2_f = BigUint::zero();
    for rel in sig.relations() {
        log2_f += e.pow(rel.arity as u32);
    }
    let log2_fact: f64 = (2..=k).map(|i| (i as f64).log2()).sum();
    let log3_phi_star = 1.0 + log2_f.to_f64().unwrap_or(f64::INFINITY) + k as f64 + log2_fact;
    PhiStarBounds {
        radius,
        nu,
        e,
        log2_f,
        log3_phi_star,
    }
}

/// A finitely supported distribution on labeled k-tuples.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    k: usize,
    support: Vec<(Vec<Element>, bool, BigRational)>,
}

fn parse_weight(text: &str) -> Option<BigRational> {
    let (num, den) = match text.split_once('/') {
        Some((a, b)) => (a, b),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

impl Distribution {
    pub fn new(k: usize, support: Vec<(Vec<Element>, bool, BigRational)>) -> Result<Self, PacError> {
        if support.is_empty() {
            return Err(PacError::EmptySupport);
        }
        let mut total = BigRational::zero();
        for (u, _, weight) in &support {
            if u.len() != k {
                return Err(PacError::Arity {
                    expected: k,
                    found: u.len(),
                });
            }
            if *weight <= BigRational::zero() {
                return Err(PacError::NonPositiveWeight(weight.to_string()));
            }
            total += weight;
        }
        if !total.is_one() {
            return Err(PacError::NotNormalized(total.to_string()));
        }
        Ok(Distribution { k, support })
    }

    /// Equal weight on every point.
    pub fn uniform(k: usize, points: Vec<(Vec<Element>, bool)>) -> Result<Self, PacError> {
        let w = BigRational::new(BigInt::one(), BigInt::from(points.len().max(1)));
        Distribution::new(k, points.into_iter().map(|(u, c)| (u, c, w.clone())).collect())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn support(&self) -> &[(Vec<Element>, bool, BigRational)] {
        &self.support
    }

    /// Lines `u1 … uk label num/den`; `#` starts a comment.
    pub fn parse(text: &str, s: &Structure, k: usize) -> Result<Self, PacError> {
        let mut support = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| PacError::Parse { line: i + 1, message };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != k + 2 {
                return Err(err(format!("expected {} fields, found {}", k + 2, fields.len())));
            }
            let mut tuple = Vec::with_capacity(k);
            for name in &fields[..k] {
                tuple.push(
                    s.lookup(name)
                        .map_err(|_| err(format!("unknown element {name}")))?,
                );
            }
            let label = match fields[k] {
                "0" => false,
                "1" => true,
                other => return Err(err(format!("label must be 0 or 1, found {other}"))),
            };
            let weight = parse_weight(fields[k + 1]).ok_or_else(|| err(format!("bad weight {}", fields[k + 1])))?;
            support.push((tuple, label, weight));
        }
        Distribution::new(k, support)
    }

    pub fn to_text(&self, s: &Structure) -> String {
        let mut out = String::new();
        for (u, c, w) in &self.support {
            for e in u {
                out.push_str(s.name(*e));
                out.push(' ');
            }
            out.push_str(&format!("{} {}\n", u8::from(*c), w));
        }
        out
    }

    /// Total weight of positively labeled points.
    pub fn positive_weight(&self) -> BigRational {
        self.support
            .iter()
            .filter(|(_, c, _)| *c)
            .fold(BigRational::zero(), |acc, (_, _, w)| acc + w)
    }

    /// Integer weights over the common denominator, which must fit in a u64.
    fn integer_weights(&self) -> Result<(Vec<u64>, u64), PacError> {
        let mut lcm = BigInt::one();
        for (_, _, w) in &self.support {
            let den = w.denom();
            lcm = num_integer_lcm(&lcm, den);
        }
        let total = lcm.to_u64().ok_or_else(|| PacError::Denominator(lcm.to_string()))?;
        let weights = self
            .support
            .iter()
            .map(|(_, _, w)| (w.numer() * (&lcm / w.denom())).to_u64().expect("bounded by the total"))
            .collect();
        Ok((weights, total))
    }

    /// t i.i.d. draws. Deterministic in the generator state.
    pub fn sample(&self, t: usize, rng: &mut impl Rng) -> Result<TrainingSequence, PacError> {
        let (weights, total) = self.integer_weights()?;
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = 0u64;
        for w in weights {
            acc += w;
            cumulative.push(acc);
        }
        let mut out = TrainingSequence::new(self.k);
        for _ in 0..t {
            let x = rng.gen_range(0..total);
            let i = cumulative.partition_point(|&c| c <= x);
            let (u, c, _) = &self.support[i];
            out.push(u.clone(), *c)?;
        }
        Ok(out)
    }

    pub fn sample_seeded(&self, t: usize, seed: u64) -> Result<TrainingSequence, PacError> {
        self.sample(t, &mut ChaCha8Rng::seed_from_u64(seed))
    }
}

fn num_integer_lcm(a: &BigInt, b: &BigInt) -> BigInt {
    let mut x = a.clone();
    let mut y = b.clone();
    while !y.is_zero() {
        let r = &x % &y;
        x = y;
        y = r;
    }
    a / x * b
}

/// err_D(H): the exact weight of misclassified support points.
pub fn generalization_error(s: &Structure, h: &Hypothesis, d: &Distribution) -> Result<BigRational, PacError> {
    let mut err = BigRational::zero();
    for (u, c, w) in &d.support {
        if evaluate_hypothesis(s, h, u)? != *c {
            err += w;
        }
    }
    Ok(err)
}

/// The realized class restricted to the support of a distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct RealizedClass {
    /// Distinct type partitions of the support, over all v̄ ∈ U^m, m ≤ ℓ.
    pub partitions: usize,
    /// Exact number of distinct classification functions, when counted.
    pub exact_size: Option<u64>,
    /// ln of the class size, or of the upper bound Σ 2^(types) when the
    /// exact count was out of reach.
    pub ln_size: f64,
    /// min over the class of err_D.
    pub min_error: BigRational,
}

/// Partitions the support by the type of 𝒩_ρ(ū v̄) for every parameter
/// tuple of the universe, then counts and minimizes over type unions.
pub fn realized_class(
    s: &Structure,
    d: &Distribution,
    cfg: &LearnerConfig,
    budget: &OracleBudget,
) -> Result<RealizedClass, PacError> {
    if s.len() > budget.max_universe {
        return Err(PacError::Infeasible(format!("universe of size {}", s.len())));
    }
    let tuples: u64 = (0..=cfg.ell as u32)
        .map(|m| (s.len() as u64).saturating_pow(m))
        .fold(0u64, |a, b| a.saturating_add(b));
    let work = tuples.saturating_mul(d.support.len() as u64);
    if work > budget.max_candidates {
        return Err(PacError::Infeasible(format!("{work} sphere extractions")));
    }
    let radius = cfg.radius()?;
    let mut params: Vec<Vec<Element>> = vec![Vec::new()];
    let mut layer: Vec<Vec<Element>> = vec![Vec::new()];
    for _ in 0..cfg.ell {
        layer = layer
            .iter()
            .flat_map(|p| {
                s.elements().map(move |e| {
                    let mut q = p.clone();
                    q.push(e);
                    q
                })
            })
            .collect();
        params.extend(layer.iter().cloned());
    }
    let partitions: Vec<Vec<usize>> = params
        .par_iter()
        .map(|v| {
            let mut ids = HashMap::new();
            let mut labels = Vec::with_capacity(d.support.len());
            for (u, _, _) in &d.support {
                let mut centers = u.clone();
                centers.extend_from_slice(v);
                let key = extract_sphere_global(s, &centers, radius)?.canonical_key();
                let next = ids.len();
                labels.push(*ids.entry(key).or_insert(next));
            }
            Ok(labels)
        })
        .collect::<Result<_, PacError>>()?;
    let distinct: HashSet<Vec<usize>> = partitions.into_iter().collect();
    let mut distinct: Vec<Vec<usize>> = distinct.into_iter().collect();
    distinct.sort();

    let mut min_error: Option<BigRational> = None;
    let mut bound_terms = Vec::new();
    for p in &distinct {
        let classes = p.iter().max().map_or(0, |&m| m + 1);
        bound_terms.push(classes);
        let mut pos = vec![BigRational::zero(); classes];
        let mut neg = vec![BigRational::zero(); classes];
        for (&c, (_, label, w)) in p.iter().zip(&d.support) {
            if *label {
                pos[c] += w;
            } else {
                neg[c] += w;
            }
        }
        let err = pos
            .into_iter()
            .zip(neg)
            .fold(BigRational::zero(), |acc, (a, b)| acc + a.min(b));
        if min_error.as_ref().map_or(true, |m| err < *m) {
            min_error = Some(err);
        }
    }
    let exact_size = count_functions(&distinct, &bound_terms, d.support.len(), budget.max_candidates);
    let ln_size = match exact_size {
        Some(c) => (c as f64).ln(),
        None => {
            let top = *bound_terms.iter().max().unwrap_or(&0) as f64;
            let sum: f64 = bound_terms.iter().map(|&c| (c as f64 - top).exp2()).sum();
            (top + sum.log2()) * 2f64.ln()
        }
    };
    Ok(RealizedClass {
        partitions: distinct.len(),
        exact_size,
        ln_size,
        min_error: min_error.unwrap_or_else(BigRational::zero),
    })
}

fn count_functions(partitions: &[Vec<usize>], classes: &[usize], points: usize, cap: u64) -> Option<u64> {
    let total: u64 = classes
        .iter()
        .map(|&c| if c >= 63 { u64::MAX } else { 1u64 << c })
        .fold(0u64, |a, b| a.saturating_add(b));
    if total > cap.min(1 << 22) {
        return None;
    }
    let words = points.div_ceil(64);
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    for (p, &c) in partitions.iter().zip(classes) {
        for mask in 0..1u64 << c {
            let mut f = vec![0u64; words];
            for (i, &cls) in p.iter().enumerate() {
                if mask >> cls & 1 == 1 {
                    f[i / 64] |= 1 << (i % 64);
                }
            }
            seen.insert(f);
        }
    }
    Some(seen.len() as u64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialResult {
    pub err_t: ErrorRate,
    pub err_d: BigRational,
    pub class_min: BigRational,
    pub success: bool,
    /// |err_D − err_T| > ε for the returned hypothesis.
    pub uc_violation: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PacReport {
    pub trials: usize,
    pub sample_size: u64,
    pub eps: f64,
    pub delta: f64,
    pub class: RealizedClass,
    pub per_trial: Vec<TrialResult>,
    pub success_frequency: f64,
    pub uc_violation_frequency: f64,
}

/// Draws t = uc_sample_size(|realized class|, ε, δ) examples per trial from
/// `d`, runs the bounded-degree error minimizer and scores it exactly.
/// Trial i uses the generator seeded with `seed ^ i`.
#[allow(clippy::too_many_arguments)]
pub fn run_pac_experiment(
    s: &Structure,
    d: &Distribution,
    cfg: &LearnerConfig,
    eps: f64,
    delta: f64,
    trials: usize,
    seed: u64,
) -> Result<PacReport, PacError> {
    run_pac_experiment_with(s, d, cfg, eps, delta, trials, seed, &OracleBudget::default())
}

#[allow(clippy::too_many_arguments)]
pub fn run_pac_experiment_with(
    s: &Structure,
    d: &Distribution,
    cfg: &LearnerConfig,
    eps: f64,
    delta: f64,
    trials: usize,
    seed: u64,
    budget: &OracleBudget,
) -> Result<PacReport, PacError> {
    if trials == 0 {
        return Err(PacError::OutOfRange {
            name: "trials",
            value: "0".into(),
        });
    }
    if d.k() != cfg.k {
        return Err(PacError::Arity {
            expected: cfg.k,
            found: d.k(),
        });
    }
    unit_interval("eps", eps)?;
    unit_interval("delta", delta)?;
    let degree = s.max_degree();
    let mut cfg = cfg.clone().with_mode(Mode::MinError).with_degree(degree).with_jobs(1);
    if cfg.bounded_degree.is_none() {
        cfg = cfg.with_bound(degree);
    }
    let class = realized_class(s, d, &cfg, budget)?;
    let t = uc_sample_size_ln(class.ln_size, eps, delta)?;
    let eps_q = BigRational::from_float(eps).expect("finite");
    let per_trial: Vec<TrialResult> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ i as u64);
            let sample = d.sample(t as usize, &mut rng)?;
            let outcome = learn_bounded(s, &sample, &cfg)?;
            let h = outcome.hypothesis().expect("error minimization never rejects");
            let err_t = training_error(s, h, &sample)?;
            let err_d = generalization_error(s, h, d)?;
            let err_t_q = BigRational::new(BigInt::from(*err_t.numer()), BigInt::from(*err_t.denom()));
            let gap = if err_d > err_t_q {
                &err_d - &err_t_q
            } else {
                &err_t_q - &err_d
            };
            Ok(TrialResult {
                err_t,
                success: &err_d - &class.min_error <= eps_q,
                uc_violation: gap > eps_q,
                err_d,
                class_min: class.min_error.clone(),
            })
        })
        .collect::<Result<_, PacError>>()?;
    let successes = per_trial.iter().filter(|r| r.success).count();
    let violations = per_trial.iter().filter(|r| r.uc_violation).count();
    Ok(PacReport {
        trials,
        sample_size: t,
        eps,
        delta,
        success_frequency: successes as f64 / trials as f64,
        uc_violation_frequency: violations as f64 / trials as f64,
        class,
        per_trial,
    })
}

impl fmt::Display for PacReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "eps {} delta {} trials {} t {}", self.eps, self.delta, self.trials, self.sample_size)?;
        match self.class.exact_size {
            Some(c) => writeln!(f, "class size {c} ({} partitions)", self.class.partitions)?,
            None => writeln!(
                f,
                "class size <= e^{:.3} ({} partitions)",
                self.class.ln_size, self.class.partitions
            )?,
        }
        writeln!(f, "class min err_D {}", self.class.min_error)?;
        writeln!(f, "{:>6} {:>12} {:>12} {:>8}", "trial", "err_T", "err_D", "success")?;
        for (i, r) in self.per_trial.iter().enumerate() {
            writeln!(
                f,
                "{:>6} {:>12} {:>12} {:>8}",
                i,
                r.err_t.to_string(),
                r.err_d.to_string(),
                if r.success { "yes" } else { "no" }
            )?;
        }
        writeln!(f, "success frequency {:.4}", self.success_frequency)?;
        write!(f, "uc violation frequency {:.4}", self.uc_violation_frequency)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{encyclopedia_structure, gen_random, RandomSpec};

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn uc_examples() {
        assert_eq!(uc_sample_size(100, 0.1, 0.1).unwrap(), 381);
        assert_eq!(uc_sample_size(2, 0.5, 0.5).unwrap(), 5);
        assert_eq!(uc_sample_size(100, 0.05, 0.1).unwrap(), 1521);
        assert!(uc_sample_size(0, 0.1, 0.1).is_err());
        assert!(uc_sample_size(1, 1.0, 0.1).is_err());
        assert!(uc_sample_size(1, 0.1, 0.0).is_err());
    }

    #[test]
    fn pac_examples() {
        assert_eq!(pac_sample_size(8, 1, 4, 0.5, 0.5).unwrap(), 48);
        // n/δ = e
        assert_eq!(pac_sample_size(1, 1, 1, 0.99, 1.0 / std::f64::consts::E).unwrap(), 2);
        let t1 = pac_sample_size(50, 2, 3, 0.2, 0.1).unwrap();
        let t2 = pac_sample_size(50, 2, 6, 0.2, 0.1).unwrap();
        assert_eq!(t2, 2 * t1);
    }

    #[test]
    fn nu_examples() {
        assert_eq!(nu(3, 2), BigUint::from(10u32));
        for d in 0..6 {
            assert_eq!(nu(d, 0), BigUint::one());
        }
        assert_eq!(nu(2, 5), BigUint::from(11u32));
        assert_eq!(nu(1, 7), BigUint::from(2u32));
        assert_eq!(nu(0, 7), BigUint::one());
    }

    #[test]
    fn phi_star_example() {
        let sig = Signature::from_relations([("E", 2)]).unwrap();
        let b = phi_star_bounds(2, 1, 1, 1, 1, &sig);
        assert_eq!(b.radius, BigUint::from(2u32));
        assert_eq!(b.nu, BigUint::from(5u32));
        assert_eq!(b.e, BigUint::from(10u32));
        assert_eq!(b.log2_f, BigUint::from(100u32));
        assert!((b.log3_phi_star - 102.0).abs() < 1e-9);
    }

    #[test]
    fn distribution_parse_and_errors() {
        let s = encyclopedia_structure();
        let d = Distribution::parse("1 2 1 1/2\n7 6 0 1/4\n1 5 1 1/4\n", &s, 2).unwrap();
        assert_eq!(d.support().len(), 3);
        assert_eq!(d.positive_weight(), q(3, 4));
        assert_eq!(Distribution::parse(&d.to_text(&s), &s, 2).unwrap(), d);
        assert!(matches!(
            Distribution::parse("1 2 1 1/2\n", &s, 2),
            Err(PacError::NotNormalized(_))
        ));
        assert!(matches!(
            Distribution::parse("1 2 1 0\n1 5 1 1\n", &s, 2),
            Err(PacError::NonPositiveWeight(_))
        ));
        assert!(matches!(
            Distribution::parse("1 9 1 1\n", &s, 2),
            Err(PacError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn sampling_is_deterministic_and_on_support() {
        let s = encyclopedia_structure();
        let d = Distribution::parse("1 2 1 1/3\n7 6 0 2/3\n", &s, 2).unwrap();
        let a = d.sample_seeded(100, 5).unwrap();
        let b = d.sample_seeded(100, 5).unwrap();
        assert_eq!(a, b);
        let negatives = a.examples().iter().filter(|(_, c)| !c).count();
        assert!(negatives > 40 && negatives < 90);
    }

    #[test]
    fn generalization_error_examples() {
        let s = encyclopedia_structure();
        let e = |n: &str| s.lookup(n).unwrap();
        let empty = Hypothesis::empty(1, 0);
        let d = Distribution::uniform(
            1,
            vec![(vec![e("1")], true), (vec![e("2")], false), (vec![e("3")], false), (vec![e("4")], false)],
        )
        .unwrap();
        assert_eq!(generalization_error(&s, &empty, &d).unwrap(), q(1, 4));
        assert_eq!(generalization_error(&s, &empty, &d).unwrap(), d.positive_weight());
        let point = Distribution::new(1, vec![(vec![e("2")], false, q(1, 1))]).unwrap();
        assert_eq!(generalization_error(&s, &empty, &point).unwrap(), q(0, 1));
    }

    #[test]
    fn small_experiment_succeeds() {
        let s = gen_random(&RandomSpec::graph(12, 2, 8), 3).unwrap();
        let cfg = LearnerConfig::new(1, 1, 0, 0);
        // label: adjacent to v0
        let v0 = s.lookup("v0").unwrap();
        let points = s
            .elements()
            .map(|u| (vec![u], s.neighbors_global(u).contains(&v0)))
            .collect();
        let d = Distribution::uniform(1, points).unwrap();
        let report = run_pac_experiment(&s, &d, &cfg, 0.2, 0.2, 20, 11).unwrap();
        assert_eq!(report.class.min_error, q(0, 1));
        assert!(report.success_frequency >= 0.8, "{report}");
        let again = run_pac_experiment(&s, &d, &cfg, 0.2, 0.2, 20, 11).unwrap();
        assert_eq!(report, again);
        let loose = run_pac_experiment(&s, &d, &cfg, 0.99, 0.2, 5, 1).unwrap();
        assert_eq!(loose.success_frequency, 1.0);
    }
}
