#![allow(dead_code)]

use focn_core::generators::{gen_random, plant_target, random_formula, FormulaSpec, RandomSpec, Target};
use focn_core::learner::{LearnerConfig, TrainingSequence};
use focn_core::logic::PredicateCollection;
use focn_core::structure::{Element, Signature, Structure};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn graph_signature() -> Signature {
    Signature::from_relations([("E", 2), ("P", 1)]).unwrap()
}

/// Seeded structure with n ≤ 20 and degree ≤ 3.
pub fn random_structure(rng: &mut impl Rng) -> Structure {
    let n = rng.gen_range(6..=20);
    let d = rng.gen_range(1..=3);
    let spec = RandomSpec {
        n,
        max_degree: d,
        signature: graph_signature(),
        tuples_per_relation: rng.gen_range(n * d / 4..=n * d / 2),
        unary_probability: 0.3,
    };
    gen_random(&spec, rng.gen()).unwrap()
}

/// A labeled instance with a planted target of rank ≤ cfg.r and width ≤ 1.
pub struct Case {
    pub seed: u64,
    pub structure: Structure,
    pub cfg: LearnerConfig,
    pub target: Target,
    pub train: TrainingSequence,
}

pub fn planted_case(seed: u64) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = random_structure(&mut rng);
    let k = rng.gen_range(1..=2);
    let ell = rng.gen_range(0..=1);
    let r = rng.gen_range(0..=1u32);
    let xs: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
    let ys: Vec<String> = (1..=ell).map(|i| format!("y{i}")).collect();
    let spec = FormulaSpec {
        signature: graph_signature(),
        free: xs.iter().chain(&ys).cloned().collect(),
        number_params: vec!["kappa".into()],
        max_rank: r as usize,
        max_width: 1,
        number_quantifiers: rng.gen_bool(0.3),
        size: 5,
    };
    let formula = random_formula(&spec, &mut rng);
    let elements: Vec<Element> = s.elements().collect();
    let target = Target {
        formula,
        instance_vars: xs,
        param_vars: ys,
        params: (0..ell).map(|_| *elements.choose(&mut rng).unwrap()).collect(),
        numbers: vec![("kappa".into(), rng.gen_range(0..4))],
    };
    let count = rng.gen_range(4..=14);
    let train = plant_target(&s, &target, &PredicateCollection::builtin(), count, rng.gen()).unwrap();
    let cfg = LearnerConfig::new(k, ell, r, 1).with_degree(s.max_degree());
    Case {
        seed,
        structure: s,
        cfg,
        target,
        train,
    }
}

/// Same tuples with each label flipped with probability p.
pub fn with_noise(t: &TrainingSequence, p: f64, seed: u64) -> TrainingSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = TrainingSequence::new(t.k());
    for (u, c) in t.examples() {
        out.push(u.clone(), *c ^ rng.gen_bool(p)).unwrap();
    }
    out
}

/// Uniform random labels on random tuples, with a repeated tuple now and then.
pub fn random_labels(s: &Structure, k: usize, count: usize, seed: u64) -> TrainingSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let elements: Vec<Element> = s.elements().collect();
    let mut out = TrainingSequence::new(k);
    for _ in 0..count {
        let u: Vec<Element> = (0..k).map(|_| *elements.choose(&mut rng).unwrap()).collect();
        out.push(u, rng.gen()).unwrap();
    }
    out
}
