mod common;

use common::*;
use namelogic::decision::{brute_force_sat, satisfiable, Bounds};
use namelogic::equivalence::{
    bisimilar, check_bisimulation, check_frame_morphism, distinguishing_formula, greatest_bisimulation,
    BisimRelation, StateMap,
};
use namelogic::kripke::{disjoint_union, extension, generated_submodel, union_state_id};
use namelogic::neighborhood::{check_nbhd, kripke_to_nbhd, nbhd_to_kripke, verify_algebra_equations};
use namelogic::syntax::closure;
use namelogic::{check, parse_formula, Formula, KripkeModel};
use proptest::prelude::*;

fn holds_everywhere(m: &KripkeModel, phi: &Formula) -> bool {
    extension(m, phi).unwrap().count_ones(..) == m.num_states()
}

fn identity(m: &KripkeModel) -> StateMap {
    m.states().iter().map(|s| (s.clone(), s.clone())).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn print_parse_round_trip(phi in arb_formula(ALL)) {
        prop_assert_eq!(parse_formula(&phi.to_string()).unwrap(), phi);
    }

    #[test]
    fn closure_is_closed(phi in arb_formula(ESC)) {
        let cl = closure(&phi).unwrap();
        prop_assert!(cl.contains(&phi.desugar()));
        for g in &cl.formulas {
            for c in g.children() {
                prop_assert!(cl.contains(c));
            }
            match g {
                Formula::Not(_) => {}
                other => prop_assert!(cl.contains(&Formula::not(other.clone()))),
            }
            match g {
                Formula::E(n, h) => prop_assert!(cl.contains(&Formula::S(n.clone(), h.clone()))),
                Formula::C(n, h) => {
                    prop_assert!(cl.contains(&Formula::E(n.clone(), h.clone())));
                    prop_assert!(cl.contains(&Formula::e(n.clone(), g.clone())));
                }
                _ => {}
            }
        }
        for n in &cl.names {
            prop_assert!(cl.contains(&Formula::s(n.clone(), Formula::True)));
            prop_assert!(cl.contains(&Formula::e(n.clone(), Formula::False)));
        }
    }

    /// The checker agrees with a clause-by-clause transcription.
    #[test]
    fn checker_matches_naive_semantics(m in arb_model(), phi in arb_formula(ALL)) {
        for w in 0..m.num_states() {
            let got = check(&m, m.state_id(w), &phi);
            // B formulas mention agent a0, which every generated model has
            prop_assert_eq!(got.unwrap().value, naive(&m, w, &phi), "{} at {}", phi, m.state_id(w));
        }
    }

    #[test]
    fn modal_laws(m in arb_model(), a in arb_formula(ESC), b in arb_formula(ESC)) {
        let (a, b) = (a.to_string(), b.to_string());
        for law in [
            format!("E[n] (({a}) & ({b})) <-> E[n] ({a}) & E[n] ({b})"),
            format!("D[n] ({a}) & D[n] ({b}) -> D[n] (({a}) & ({b}))"),
            format!("C[n] ({a}) <-> E[n] (({a}) & C[n] ({a}))"),
            format!("!S[n] true -> E[n] ({a}) & !S[n] ({a}) & !D[n] ({a})"),
            format!("S[n] ({a}) -> D[n] ({a})"),
        ] {
            prop_assert!(holds_everywhere(&m, &parse_formula(&law).unwrap()), "{}", law);
        }
    }

    #[test]
    fn translation_preserves_truth(m in arb_model(), phi in arb_formula(ES)) {
        let nb = kripke_to_nbhd(&m);
        let back = nbhd_to_kripke(&nb).unwrap();
        for w in m.states() {
            let v = check(&m, w, &phi).unwrap().value;
            prop_assert_eq!(check_nbhd(&nb, w, &phi).unwrap(), v);
            prop_assert_eq!(check(&back, w, &phi).unwrap().value, v);
        }
        prop_assert!(check_frame_morphism(&m, &back, &identity(&m), true).unwrap().ok);
    }

    /// Inclusions into disjoint unions and of generated submodels are
    /// morphisms; their graphs are bisimulations and preserve truth.
    #[test]
    fn inclusions(m in arb_model(), other in arb_model(), phi in arb_formula(ESC), w in 0usize..5) {
        let w = w % m.num_states();
        let u = disjoint_union(&[other, m.clone()]);
        let into_union: StateMap = m.states().iter().map(|s| (s.clone(), union_state_id(1, s))).collect();
        prop_assert!(check_frame_morphism(&m, &u, &into_union, true).unwrap().ok);
        prop_assert!(check_bisimulation(&m, &u, &BisimRelation::graph(&into_union)).unwrap().ok);

        let sub = generated_submodel(&m, w);
        let inc = identity(&sub);
        prop_assert!(check_bisimulation(&sub, &m, &BisimRelation::graph(&inc)).unwrap().ok);
        for (s, t) in &into_union {
            prop_assert_eq!(check(&m, s, &phi).unwrap().value, check(&u, t, &phi).unwrap().value);
        }
        for s in sub.states() {
            prop_assert_eq!(check(&sub, s, &phi).unwrap().value, check(&m, s, &phi).unwrap().value);
        }
    }

    #[test]
    fn greatest_bisimulation_is_a_bisimulation(m1 in arb_model(), m2 in arb_model(), phi in arb_formula(ESC)) {
        let z = greatest_bisimulation(&m1, &m2);
        prop_assert!(check_bisimulation(&m1, &m2, &z).unwrap().ok);
        for (a, b) in &z.pairs {
            prop_assert_eq!(check(&m1, a, &phi).unwrap().value, check(&m2, b, &phi).unwrap().value);
        }
        let own = greatest_bisimulation(&m1, &m1);
        for s in m1.states() {
            prop_assert!(own.contains(s, s));
        }
    }

    #[test]
    fn distinguishing_formulas_separate(m1 in arb_model(), m2 in arb_model(), phi in arb_formula(ES)) {
        for a in m1.states() {
            for b in m2.states() {
                match distinguishing_formula(&m1, a, &m2, b).unwrap() {
                    Some(d) => {
                        prop_assert!(!bisimilar(&m1, a, &m2, b).unwrap());
                        prop_assert!(check(&m1, a, &d).unwrap().value);
                        prop_assert!(!check(&m2, b, &d).unwrap().value);
                    }
                    None => prop_assert_eq!(check(&m1, a, &phi).unwrap().value, check(&m2, b, &phi).unwrap().value),
                }
            }
        }
    }

    #[test]
    fn algebra_equations_on_reflexive_frames(seed in any::<u64>(), states in 1usize..=5) {
        let m = random_reflexive_nbhd(seed, states);
        prop_assert!(verify_algebra_equations(&m).is_empty());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// Oracle agreement: a model within the bounds forces a sat verdict, an
    /// unsat verdict forbids one.
    #[test]
    fn procedure_agrees_with_oracle(phi in arb_formula(ESC)) {
        prop_assume!(closure_variables(&phi) <= 12);
        let r = satisfiable(&phi).unwrap();
        let found = brute_force_sat(&phi, Bounds { max_states: 2, max_agents: 2 }).unwrap();
        if found.is_some() {
            prop_assert!(r.is_sat(), "{}", phi);
        }
        if let (Some(m), Some(w)) = (&r.model, &r.state) {
            prop_assert!(check(m, w, &phi).unwrap().value);
        }
    }
}
