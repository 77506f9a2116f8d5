//! Algebraic and structural properties of truth values, syntax and lassos.

use proptest::prelude::*;
use rtl_core::gen::{self, default_props, random_formula_sized, random_lasso};
use rtl_core::syntax::{check_logic, parse, print};
use rtl_core::translate::{embed_ldl_in_rldl, embed_rltl_in_rldl, rprompt_to_prompt};
use rtl_core::{LogicId, TruthValue4};

fn truth() -> impl Strategy<Value = TruthValue4> {
    (0usize..5).prop_map(|i| TruthValue4::ALL[i])
}

fn logic() -> impl Strategy<Value = LogicId> {
    (0usize..8).prop_map(|i| LogicId::ALL[i])
}

proptest! {
    #[test]
    fn lattice_laws(a in truth(), b in truth(), c in truth()) {
        prop_assert!(a.meet(b) <= a && a <= a.join(b));
        prop_assert_eq!(a.meet(a.join(b)), a);
        prop_assert_eq!(a.join(a.meet(b)), a);
        prop_assert_eq!(a.meet(a), a);
        prop_assert_eq!(a.join(a), a);
        prop_assert_eq!(a.meet(b.meet(c)), a.meet(b).meet(c));
    }

    #[test]
    fn implication_and_negation(a in truth(), b in truth()) {
        prop_assert_eq!(a.imply(b) == TruthValue4::F1111, a <= b);
        prop_assert!(a.negate() == TruthValue4::F0000 || a.negate() == TruthValue4::F1111);
        if a <= b {
            for i in 1..=4 {
                prop_assert!(a.bit(i) <= b.bit(i));
            }
        }
    }

    #[test]
    fn print_parse_round_trip(seed in any::<u64>(), logic in logic()) {
        let mut r = gen::rng(seed);
        let phi = random_formula_sized(&mut r, logic, 12, &default_props());
        let text = print(&phi);
        let back = parse(&text, logic).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(back.size(), phi.size());
        prop_assert_eq!(back, phi);
    }

    #[test]
    fn size_counts_distinct_subformulas(seed in any::<u64>()) {
        let mut r = gen::rng(seed);
        let phi = random_formula_sized(&mut r, LogicId::Rldl, 10, &default_props());
        let doubled = rtl_core::Formula::and(phi.clone(), phi.clone());
        prop_assert_eq!(doubled.size(), phi.size() + 1);
    }

    #[test]
    fn translations_land_in_their_logic(seed in any::<u64>(), beta in truth()) {
        let mut r = gen::rng(seed);
        let props = default_props();
        let ldl = random_formula_sized(&mut r, LogicId::Ldl, 12, &props);
        prop_assert!(check_logic(&embed_ldl_in_rldl(&ldl).unwrap(), LogicId::Rldl).is_empty());
        let rltl = random_formula_sized(&mut r, LogicId::Rltl, 12, &props);
        prop_assert!(check_logic(&embed_rltl_in_rldl(&rltl).unwrap(), LogicId::Rldl).is_empty());
        let rp = random_formula_sized(&mut r, LogicId::RPromptLtl, 12, &props);
        prop_assert!(check_logic(&rprompt_to_prompt(&rp, beta).unwrap(), LogicId::PromptLtl).is_empty());
    }

    #[test]
    fn suffixes_follow_canonical_positions(seed in any::<u64>(), j in 0usize..20) {
        let w = random_lasso(&mut gen::rng(seed), &default_props(), 6);
        let horizon = w.prefix().len() + 2 * w.cycle().len();
        let a = w.suffix(j);
        let b = w.suffix(w.canonical_index(j));
        for i in 0..horizon {
            prop_assert_eq!(a.letter_at(i), b.letter_at(i));
        }
        let unrolled = w.unroll(j + horizon + 1);
        for (i, letter) in unrolled.iter().enumerate() {
            prop_assert_eq!(w.letter_at(i), letter);
        }
    }
}
