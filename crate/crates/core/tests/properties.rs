use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hypergame::automata::{body_dpa, complement_dpa, export_hoa, import_hoa};
use hypergame::gen::{random_body, random_formula, random_ks, random_word};
use hypergame::logic::BodyEvaluator;
use hypergame::oracle::{enumerate_lassos, LassoBudget};
use hypergame::{indexed_aps, parse_hyperltl, parse_ks, parse_ltl, render_ks, IndexedAp, Ltl, Quantifier};

fn atoms() -> Vec<IndexedAp> {
    ["p1", "p2"]
        .iter()
        .flat_map(|v| ["a", "b"].iter().map(move |a| IndexedAp::new(*a, *v)))
        .collect()
}

fn body(seed: u64, depth: usize) -> Ltl {
    random_body(&mut ChaCha8Rng::seed_from_u64(seed), depth, &atoms())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn render_then_parse_is_identity(seed: u64) {
        let f = body(seed, 5);
        prop_assert_eq!(parse_ltl(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn formula_render_then_parse(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_formula(&mut rng, &[Quantifier::Forall, Quantifier::Exists], &["a".into()], 4);
        prop_assert_eq!(parse_hyperltl(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn nnf_of_negation_is_the_dual(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_body(&mut rng, 4, &atoms());
        let alphabet: Vec<IndexedAp> = atoms();
        let pos = BodyEvaluator::new(&f.nnf(), &alphabet);
        let neg = BodyEvaluator::new(&Ltl::not(f.clone()).nnf(), &alphabet);
        for _ in 0..10 {
            let w = random_word(&mut rng, 4, 3, 3);
            prop_assert_ne!(pos.eval(&w), neg.eval(&w));
        }
    }

    #[test]
    fn automaton_agrees_with_evaluator(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_body(&mut rng, 3, &atoms()[..2]);
        let d = body_dpa(&f).unwrap();
        let c = complement_dpa(&d);
        let cc = complement_dpa(&c);
        let h = import_hoa(&export_hoa(&d)).unwrap();
        let eval = BodyEvaluator::new(&f, d.alphabet());
        prop_assert_eq!(d.alphabet().len(), indexed_aps(&f).len());
        for _ in 0..10 {
            let w = random_word(&mut rng, d.alphabet().len() as u32, 3, 3);
            let want = eval.eval(&w);
            prop_assert_eq!(d.accepts(&w).unwrap(), want);
            prop_assert_eq!(c.accepts(&w).unwrap(), !want);
            prop_assert_eq!(cc.accepts(&w).unwrap(), want);
            prop_assert_eq!(h.accepts(&w).unwrap(), want);
        }
    }

    #[test]
    fn evaluation_ignores_the_presentation_of_a_word(seed: u64, extra_stem in 0usize..3, reps in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_body(&mut rng, 4, &atoms());
        let eval = BodyEvaluator::new(&f, &atoms());
        let w = random_word(&mut rng, 4, 3, 3);
        let u = w.unrolled(w.stem.len() + extra_stem, w.period() * reps);
        prop_assert_eq!(eval.eval(&w), eval.eval(&u));
        prop_assert_eq!(eval.eval(&w), eval.eval(&w.canonical()));
    }

    #[test]
    fn model_render_then_parse(seed: u64) {
        let ks = random_ks(&mut ChaCha8Rng::seed_from_u64(seed), 5, 3, 2);
        prop_assert_eq!(parse_ks(&render_ks(&ks)).unwrap(), ks);
    }

    #[test]
    fn lassos_respect_the_budget(seed: u64, stem in 1usize..5, cycle in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let aps = rng.gen_range(1..=2);
        let ks = random_ks(&mut rng, 4, 2, aps);
        let ls = enumerate_lassos(&ks, LassoBudget::new(stem, cycle).unwrap());
        if stem >= ks.num_states() && cycle >= ks.num_states() {
            prop_assert!(!ls.is_empty());
        }
        let mut traces = std::collections::HashSet::new();
        for l in &ls {
            prop_assert!(l.validate(&ks).is_ok());
            prop_assert!(l.stem.len() <= stem && l.cycle.len() <= cycle);
            prop_assert!(traces.insert(ks.lasso_trace(l).unwrap().canonical()));
        }
    }
}
