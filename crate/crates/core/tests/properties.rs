//! Structural properties of the syntax layer, checked with generated
//! formula trees.

use pastltl::syntax::{parse_formula, parse_rule, Formula, Rule, Substitution};
use proptest::prelude::*;

fn arb_formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        4 => prop_oneof![Just("p"), Just("q"), Just("r1")].prop_map(Formula::atom),
        1 => Just(Formula::Top),
        1 => Just(Formula::Bottom),
    ];
    leaf.prop_recursive(4, 40, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::next),
            inner.clone().prop_map(Formula::box_),
            inner.clone().prop_map(Formula::diamond),
            inner.clone().prop_map(|f| Formula::K1(Box::new(f))),
            inner.clone().prop_map(|f| Formula::K2(Box::new(f))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::since(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::KPar {
                trigger: Box::new(a),
                body: Box::new(b),
            }),
        ]
    })
}

fn arb_substitution() -> impl Strategy<Value = Substitution> {
    proptest::collection::btree_map(
        prop_oneof![Just("p".to_string()), Just("q".to_string())],
        arb_formula(),
        0..3,
    )
    .prop_map(|map| map.into_iter().collect())
}

proptest! {
    #[test]
    fn parse_inverts_render(f in arb_formula()) {
        let text = f.to_string();
        let back = parse_formula(&text).unwrap();
        prop_assert_eq!(back, f, "render was `{}`", text);
    }

    #[test]
    fn rule_parse_inverts_render(
        premises in proptest::collection::vec(arb_formula(), 1..4),
        conclusion in arb_formula(),
    ) {
        let rule = Rule::new(premises, conclusion);
        let text = rule.to_string();
        let back = parse_rule(&text).unwrap();
        prop_assert_eq!(back, rule, "render was `{}`", text);
    }

    #[test]
    fn expansion_yields_core_and_is_idempotent(f in arb_formula()) {
        let core = f.expand_derived();
        prop_assert!(core.is_core());
        prop_assert_eq!(core.expand_derived(), core.clone());
    }

    #[test]
    fn substitution_composes(f in arb_formula(), s1 in arb_substitution(), s2 in arb_substitution()) {
        let stepwise = f.apply_substitution(&s1).apply_substitution(&s2);
        let composed = f.apply_substitution(&s2.compose_after(&s1));
        prop_assert_eq!(stepwise, composed);
    }

    #[test]
    fn temporal_reach_monotone_when_since_present(f in arb_formula(), m in 1u32..5) {
        let core = f.expand_derived();
        let has_since = core.to_string().contains(" S ");
        let r1 = core.temporal_reach(m);
        let r2 = core.temporal_reach(m + 1);
        if has_since {
            // Non-decreasing; strictness can be lost when a Next chain
            // dominates the Since branch.
            prop_assert!(r2 >= r1);
        } else {
            prop_assert_eq!(r1, r2);
        }
    }
}
