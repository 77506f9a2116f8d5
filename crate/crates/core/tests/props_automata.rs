//! Language-level properties of the automata constructions and the
//! translations.

use proptest::prelude::*;
use rtl_core::apa::{accepts_lasso, complement, from_rldl_over, intersection, union};
use rtl_core::gen::{self, all_lassos, default_props, random_formula_sized, random_lasso};
use rtl_core::omega::{
    apa_to_nba, dpa_accepts_lasso, dpa_from_hoa, dpa_to_hoa, nba_accepts_lasso, nba_emptiness, nba_from_hoa,
    nba_to_dpa, nba_to_hoa,
};
use rtl_core::oracle::{eval_prompt_ldl, eval_rprompt_ldl};
use rtl_core::translate::fragment_translate;
use rtl_core::{Alphabet, LassoTrace, LogicId, TruthValue4};

fn truth() -> impl Strategy<Value = TruthValue4> {
    (0usize..5).prop_map(|i| TruthValue4::ALL[i])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn boolean_closure(seed in any::<u64>(), b1 in truth(), b2 in truth()) {
        let mut r = gen::rng(seed);
        let props = default_props();
        let sigma = Alphabet::new(props.clone());
        let a = from_rldl_over(&random_formula_sized(&mut r, LogicId::Rldl, 8, &props), b1, &sigma).unwrap();
        let b = from_rldl_over(&random_formula_sized(&mut r, LogicId::Rldl, 8, &props), b2, &sigma).unwrap();
        let not_a = complement(&a);
        let both = intersection(&[a.clone(), b.clone()]).unwrap();
        let either = union(&[a.clone(), b.clone()]).unwrap();
        let de_morgan = complement(&union(&[not_a.clone(), complement(&b)]).unwrap());
        for _ in 0..6 {
            let w = random_lasso(&mut r, &props, 6);
            let (x, y) = (accepts_lasso(&a, &w), accepts_lasso(&b, &w));
            prop_assert_eq!(accepts_lasso(&not_a, &w), !x);
            prop_assert_eq!(accepts_lasso(&complement(&not_a), &w), x);
            prop_assert_eq!(accepts_lasso(&both, &w), x && y);
            prop_assert_eq!(accepts_lasso(&either, &w), x || y);
            prop_assert_eq!(accepts_lasso(&de_morgan, &w), x && y);
        }
    }

    #[test]
    fn emptiness_matches_membership(seed in any::<u64>(), beta in truth()) {
        let mut r = gen::rng(seed);
        let props = vec!["p".to_string()];
        let phi = random_formula_sized(&mut r, LogicId::Rldl, 10, &props);
        let nba = apa_to_nba(&from_rldl_over(&phi, beta, &Alphabet::new(props.clone())).unwrap());
        // Size telemetry: 2^(c n log n) with c = 4.
        let n = phi.size() as f64 * 8.0;
        prop_assert!((nba.num_states() as f64).log2() <= 4.0 * n * n.log2().max(1.0));
        let small: Vec<LassoTrace> = (0..3)
            .flat_map(|u| (1..=3).flat_map(move |v| all_lassos(&["p".to_string()], u, v)))
            .collect();
        let any_small = small.iter().any(|w| nba_accepts_lasso(&nba, w));
        match nba_emptiness(&nba) {
            Some(wit) => prop_assert!(nba_accepts_lasso(&nba, &wit.trace)),
            None => prop_assert!(!any_small),
        }
    }

    #[test]
    fn determinization_and_hoa(seed in any::<u64>(), beta in truth()) {
        let mut r = gen::rng(seed);
        let props = default_props();
        let phi = random_formula_sized(&mut r, LogicId::Rldl, 10, &props);
        let nba = apa_to_nba(&from_rldl_over(&phi, beta, &Alphabet::new(props.clone())).unwrap());
        let dpa = nba_to_dpa(&nba);
        let nba2 = nba_from_hoa(&nba_to_hoa(&nba)).unwrap();
        let dpa2 = dpa_from_hoa(&dpa_to_hoa(&dpa)).unwrap();
        for _ in 0..6 {
            let w = random_lasso(&mut r, &props, 6);
            let x = nba_accepts_lasso(&nba, &w);
            prop_assert_eq!(dpa_accepts_lasso(&dpa, &w), x);
            prop_assert_eq!(nba_accepts_lasso(&nba2, &w), x);
            prop_assert_eq!(dpa_accepts_lasso(&dpa2, &w), x);
        }
    }

    #[test]
    fn fragment_translation_is_exact(seed in any::<u64>(), beta in truth(), k in 0usize..4) {
        let mut r = gen::rng(seed);
        let props = default_props();
        let phi = gen::random_fragment_formula(&mut r, 10, &props);
        let psi = fragment_translate(&phi, beta).map_err(|e| TestCaseError::fail(format!("{phi}: {e}")))?;
        for _ in 0..4 {
            let w = random_lasso(&mut r, &props, 6);
            let robust = eval_rprompt_ldl(&w, k, &phi).unwrap() >= beta;
            prop_assert_eq!(eval_prompt_ldl(&w, k, &psi).unwrap(), robust, "{} at {} on {}: {}", phi, beta, w, psi);
        }
    }
}
