mod common;

use focn_core::generators::{encyclopedia_structure, ENCYCLOPEDIA_TRAINING};
use focn_core::learner::*;
use focn_core::locality::extract_sphere;
use focn_core::oracle::{brute_force_consistent, brute_force_min_error, OracleBudget};
use focn_core::structure::{Element, Structure};
use num_rational::Ratio;

fn enc_train(s: &Structure) -> TrainingSequence {
    TrainingSequence::parse(ENCYCLOPEDIA_TRAINING, s, 2).unwrap()
}

fn el(s: &Structure, name: &str) -> Element {
    s.lookup(name).unwrap()
}

fn all_pairs(s: &Structure) -> Vec<Vec<Element>> {
    s.elements().flat_map(|u| s.elements().map(move |v| vec![u, v])).collect()
}

fn classify(s: &Structure, h: &Hypothesis, tuples: &[Vec<Element>]) -> Vec<bool> {
    tuples.iter().map(|u| evaluate_hypothesis(s, h, u).unwrap()).collect()
}

#[test]
fn encyclopedia_consistent_run() {
    let s = encyclopedia_structure();
    let t = enc_train(&s);
    for ell in [0, 1] {
        let cfg = LearnerConfig::new(2, ell, 2, 1).with_degree(4);
        let out = learn_consistent(&s, &t, &cfg).unwrap();
        let h = out.hypothesis().expect("not rejected");
        assert_eq!(training_error(&s, h, &t).unwrap(), Ratio::new(0, 1));
        assert!(evaluate_hypothesis(&s, h, &[el(&s, "1"), el(&s, "2")]).unwrap());
        assert!(h.radius() < 9);
        assert!(out.candidates_examined >= 1);
    }
}

#[test]
fn empty_training_gives_empty_hypothesis() {
    let s = encyclopedia_structure();
    let t = TrainingSequence::new(2);
    let out = learn_consistent(&s, &t, &LearnerConfig::new(2, 1, 1, 1)).unwrap();
    let h = out.hypothesis().unwrap();
    assert_eq!(h.positive_types().count(), 0);
    assert!(classify(&s, h, &all_pairs(&s)).iter().all(|b| !b));

    let bounded = LearnerConfig::new(2, 1, 1, 1).with_degree(4).with_bound(4);
    let h = learn_bounded(&s, &t, &bounded).unwrap();
    assert_eq!(h.hypothesis().unwrap().positive_types().count(), 0);
    assert!(h.hypothesis().unwrap().params().is_empty());
}

#[test]
fn contradiction_is_rejected() {
    let s = encyclopedia_structure();
    let mut t = TrainingSequence::new(1);
    t.push(vec![el(&s, "3")], false).unwrap();
    t.push(vec![el(&s, "3")], true).unwrap();
    let cfg = LearnerConfig::new(1, 1, 1, 1);
    assert!(learn_consistent(&s, &t, &cfg).unwrap().is_reject());
    let bounded = cfg.clone().with_degree(4).with_bound(4);
    assert!(learn_bounded(&s, &t, &bounded).unwrap().is_reject());
}

#[test]
fn majority_and_ties() {
    let s = encyclopedia_structure();
    let u = vec![el(&s, "3")];
    let cfg = LearnerConfig::new(1, 0, 1, 1).with_mode(Mode::MinError);
    let mut t = TrainingSequence::new(1);
    for c in [true, true, true, false] {
        t.push(u.clone(), c).unwrap();
    }
    let h = learn_min_error(&s, &t, &cfg).unwrap();
    let h = h.hypothesis().unwrap();
    assert!(evaluate_hypothesis(&s, h, &u).unwrap());
    assert_eq!(training_error(&s, h, &t).unwrap(), Ratio::new(1, 4));

    let mut tie = TrainingSequence::new(1);
    tie.push(u.clone(), false).unwrap();
    tie.push(u.clone(), true).unwrap();
    let h = learn_min_error(&s, &tie, &cfg).unwrap();
    let h = h.hypothesis().unwrap();
    assert!(evaluate_hypothesis(&s, h, &u).unwrap());
    assert_eq!(training_error(&s, h, &tie).unwrap(), Ratio::new(1, 2));
}

#[test]
fn complement_has_error_one() {
    let s = encyclopedia_structure();
    let t = enc_train(&s);
    let mut flipped = TrainingSequence::new(2);
    for (u, c) in t.examples() {
        flipped.push(u.clone(), !c).unwrap();
    }
    let cfg = LearnerConfig::new(2, 0, 2, 1);
    let h = learn_consistent(&s, &flipped, &cfg).unwrap();
    assert_eq!(training_error(&s, h.hypothesis().unwrap(), &t).unwrap(), Ratio::new(1, 1));
    assert!(training_error(&s, h.hypothesis().unwrap(), &TrainingSequence::new(2)).is_err());
}

#[test]
fn bounded_matches_unbounded_on_encyclopedia() {
    let s = encyclopedia_structure();
    let t = enc_train(&s);
    let cfg = LearnerConfig::new(2, 0, 2, 1).with_degree(4);
    let free = learn_consistent(&s, &t, &cfg).unwrap();
    let bounded = learn_bounded(&s, &t, &cfg.clone().with_bound(4)).unwrap();
    let pairs = all_pairs(&s);
    assert_eq!(
        classify(&s, free.hypothesis().unwrap(), &pairs),
        classify(&s, bounded.hypothesis().unwrap(), &pairs)
    );
    assert!(matches!(
        learn_bounded(&s, &t, &cfg.clone().with_bound(3)),
        Err(LearnError::DegreeBound { degree: 4, bound: 3 })
    ));
    assert!(matches!(learn_bounded(&s, &t, &cfg), Err(LearnError::MissingDegreeBound)));
}

#[test]
fn unseen_types_are_negative() {
    let s = encyclopedia_structure();
    let t = enc_train(&s);
    let h = learn_consistent(&s, &t, &LearnerConfig::new(2, 0, 2, 1)).unwrap();
    let h = h.hypothesis().unwrap();
    let seen: Vec<_> = t
        .examples()
        .iter()
        .map(|(u, _)| extract_sphere(&s, u, h.radius()).unwrap().canonical_key())
        .collect();
    for u in all_pairs(&s) {
        let key = extract_sphere(&s, &u, h.radius()).unwrap().canonical_key();
        if !seen.contains(&key) {
            assert!(!evaluate_hypothesis(&s, h, &u).unwrap());
        }
    }
}

#[test]
fn arity_mismatch() {
    let s = encyclopedia_structure();
    let t = enc_train(&s);
    assert!(matches!(
        learn_consistent(&s, &t, &LearnerConfig::new(1, 0, 1, 1)),
        Err(LearnError::Arity { .. })
    ));
    let h = Hypothesis::empty(2, 1);
    assert!(evaluate_hypothesis(&s, &h, &[el(&s, "1")]).is_err());
}

#[test]
fn candidate_lists() {
    let s = encyclopedia_structure();
    let t = enc_train(&s);
    assert_eq!(
        candidate_parameters(&s, &t, &LearnerConfig::new(2, 0, 2, 1)).unwrap(),
        vec![Vec::<Element>::new()]
    );
    // ρ = 0, so N is the radius-1 ball around the training entries
    let cfg = LearnerConfig::new(2, 1, 0, 1);
    assert_eq!(cfg.search_radius().unwrap(), 1);
    let entries: Vec<Element> = t.examples().iter().flat_map(|(u, _)| u.clone()).collect();
    let n = s.ball(&entries, 1).unwrap();
    let mut expected = vec![vec![]];
    expected.extend(n.iter().map(|&e| vec![e]));
    assert_eq!(candidate_parameters(&s, &t, &cfg).unwrap(), expected);
    let two = LearnerConfig::new(2, 2, 0, 1);
    let n2 = s.ball(&entries, two.search_radius().unwrap()).unwrap().len();
    assert_eq!(candidate_parameters(&s, &t, &two).unwrap().len(), 1 + n2 + n2 * n2);
    let bounded = candidate_parameters(&s, &t, &two.with_bound(4)).unwrap();
    assert_eq!(bounded.len(), n2 * n2);
}

#[test]
fn hypothesis_files_round_trip() {
    let s = encyclopedia_structure();
    let t = enc_train(&s);
    let out = learn_consistent(&s, &t, &LearnerConfig::new(2, 1, 1, 1)).unwrap();
    let h = out.hypothesis().unwrap();
    let text = h.to_text(&s);
    assert_eq!(&Hypothesis::parse(&text, &s).unwrap(), h);
    assert_eq!(Hypothesis::parse(&text, &s).unwrap().to_text(&s), text);
    let t_text = t.to_text(&s);
    assert_eq!(TrainingSequence::parse(&t_text, &s, 2).unwrap(), t);
    assert!(TrainingSequence::parse("1 2 3\n", &s, 2).is_err());
    assert!(TrainingSequence::parse("1 99 1\n", &s, 2).is_err());
}

#[test]
fn consistency_postcondition_and_oracle_completeness() {
    for seed in 0..60 {
        let case = common::planted_case(seed);
        let s = &case.structure;
        for t in [case.train.clone(), common::random_labels(s, case.cfg.k, 8, seed)] {
            let out = learn_consistent(s, &t, &case.cfg).unwrap();
            let oracle = brute_force_consistent(s, &t, &case.cfg, &OracleBudget::default()).unwrap();
            assert_eq!(out.is_reject(), oracle.is_none(), "seed {seed}");
            if let Some(h) = out.hypothesis() {
                if !t.is_empty() {
                    assert_eq!(training_error(s, h, &t).unwrap(), Ratio::new(0, 1));
                }
            }
        }
        assert!(!learn_consistent(s, &case.train, &case.cfg).unwrap().is_reject(), "seed {seed}");
    }
}

#[test]
fn min_error_matches_oracle() {
    for seed in 0..60 {
        let case = common::planted_case(seed);
        let s = &case.structure;
        let t = common::with_noise(&case.train, 0.25, seed);
        if t.is_empty() {
            continue;
        }
        let cfg = case.cfg.clone().with_mode(Mode::MinError);
        let h = learn_min_error(s, &t, &cfg).unwrap();
        let (_, best) = brute_force_min_error(s, &t, &cfg, &OracleBudget::default()).unwrap();
        assert_eq!(training_error(s, h.hypothesis().unwrap(), &t).unwrap(), best, "seed {seed}");
        assert_eq!(Ratio::new(h.training_errors as u64, t.len() as u64), best, "seed {seed}");

        let bounded = cfg.clone().with_bound(s.max_degree());
        let hb = learn_bounded(s, &t, &bounded).unwrap();
        assert_eq!(training_error(s, hb.hypothesis().unwrap(), &t).unwrap(), best, "seed {seed}");
    }
}

#[test]
fn bucket_and_pairwise_agree() {
    for seed in 0..40 {
        let case = common::planted_case(seed);
        let s = &case.structure;
        let t = common::random_labels(s, case.cfg.k, 10, seed);
        let radius = case.cfg.radius().unwrap();
        for p in candidate_parameters(s, &t, &case.cfg).unwrap() {
            assert_eq!(
                pairwise_consistent(s, &t, radius, &p).unwrap(),
                bucket_consistent(s, &t, radius, &p).unwrap()
            );
        }
    }
}

#[test]
fn deterministic_and_job_count_independent() {
    for seed in 0..20 {
        let case = common::planted_case(seed);
        let s = &case.structure;
        let t = common::with_noise(&case.train, 0.2, seed);
        for mode in [Mode::Consistent, Mode::MinError] {
            let cfg = case.cfg.clone().with_mode(mode);
            let a = learn(s, &t, &cfg).unwrap();
            let b = learn(s, &t, &cfg).unwrap();
            let c = learn(s, &t, &cfg.clone().with_jobs(4)).unwrap();
            assert_eq!(a.verdict, b.verdict);
            assert_eq!(a.verdict, c.verdict);
            if let (Some(x), Some(y)) = (a.hypothesis(), c.hypothesis()) {
                assert_eq!(x.to_text(s), y.to_text(s));
            }
        }
    }
}

#[test]
fn bounded_planted_targets_never_reject() {
    for seed in 100..150 {
        let case = common::planted_case(seed);
        let s = &case.structure;
        let cfg = case.cfg.clone().with_bound(s.max_degree());
        let out = learn_bounded(s, &case.train, &cfg).unwrap();
        assert!(!out.is_reject(), "seed {seed}");
        if !case.train.is_empty() {
            assert_eq!(training_error(s, out.hypothesis().unwrap(), &case.train).unwrap(), Ratio::new(0, 1));
        }
    }
}

#[test]
fn padding_changes_nothing() {
    for seed in 0..15 {
        let case = common::planted_case(seed);
        let s = &case.structure;
        let padded = s.with_isolated_padding(500, "pad");
        let tuples: Vec<Vec<Element>> = case.train.examples().iter().map(|(u, _)| u.clone()).collect();
        for mode in [Mode::Consistent, Mode::MinError] {
            let cfg = case.cfg.clone().with_mode(mode);
            s.reset_access();
            let a = learn(s, &case.train, &cfg).unwrap();
            padded.reset_access();
            let b = learn(&padded, &case.train, &cfg).unwrap();
            assert_eq!(a.receipt, b.receipt, "seed {seed}");
            match (a.hypothesis(), b.hypothesis()) {
                (Some(x), Some(y)) => {
                    assert_eq!(x.to_text(s), y.to_text(&padded));
                    assert_eq!(classify(s, x, &tuples), classify(&padded, y, &tuples));
                }
                (None, None) => {}
                _ => panic!("verdicts differ for seed {seed}"),
            }
        }
    }
}
