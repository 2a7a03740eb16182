//! Shared helpers for the integration tests: an independent evaluator,
//! random formulas and neighborhood models, and proptest strategies.
#![allow(dead_code)]

use std::path::PathBuf;

use namelogic::kripke::{random_model, RandomMode, RandomModelParams};
use namelogic::neighborhood::NeighborhoodModel;
use namelogic::syntax::closure;
use namelogic::{parse_formula, Formula, KripkeModel, Name, StateSet};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn f(s: &str) -> Formula {
    parse_formula(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub fn figure1() -> KripkeModel {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models/figure1.json");
    KripkeModel::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Truth by direct transcription of the satisfaction clauses, one state at
/// a time, without sharing code with the library's checker.
pub fn naive(m: &KripkeModel, w: usize, phi: &Formula) -> bool {
    let named = |n: &Name| -> Vec<usize> {
        match m.names().iter().position(|x| x == n) {
            Some(i) => m.named(w, i).to_vec(),
            None => Vec::new(),
        }
    };
    let succ = |a: usize| -> Vec<usize> { m.successors(a, w).ones().collect() };
    match phi {
        Formula::Atom(p) => m.valuation(p).is_some_and(|e| e.contains(w)),
        Formula::True => true,
        Formula::False => false,
        Formula::Not(g) => !naive(m, w, g),
        Formula::And(l, r) => naive(m, w, l) && naive(m, w, r),
        Formula::Or(l, r) => naive(m, w, l) || naive(m, w, r),
        Formula::Implies(l, r) => !naive(m, w, l) || naive(m, w, r),
        Formula::Iff(l, r) => naive(m, w, l) == naive(m, w, r),
        Formula::E(n, g) => named(n).into_iter().all(|a| succ(a).into_iter().all(|v| naive(m, v, g))),
        Formula::S(n, g) => named(n).into_iter().any(|a| succ(a).into_iter().all(|v| naive(m, v, g))),
        Formula::D(n, g) => {
            let group = named(n);
            !group.is_empty()
                && (0..m.num_states())
                    .filter(|&v| group.iter().all(|&a| m.successors(a, w).contains(v)))
                    .all(|v| naive(m, v, g))
        }
        Formula::C(n, g) => {
            // states reachable in one or more n-steps
            let step = |x: usize| -> Vec<usize> {
                let i = m.names().iter().position(|y| y == n);
                i.map(|i| {
                    m.named(x, i)
                        .iter()
                        .flat_map(|&a| m.successors(a, x).ones().collect::<Vec<_>>())
                        .collect()
                })
                .unwrap_or_default()
            };
            let mut seen = vec![false; m.num_states()];
            let mut todo = step(w);
            while let Some(x) = todo.pop() {
                if !seen[x] {
                    seen[x] = true;
                    todo.extend(step(x));
                }
            }
            (0..m.num_states()).filter(|&x| seen[x]).all(|x| naive(m, x, g))
        }
        Formula::B(i, n, g) => {
            let Some(a) = m.agents().iter().position(|x| x.as_str() == i.as_str()) else {
                return true;
            };
            let ni = m.names().iter().position(|y| y == n);
            succ(a)
                .into_iter()
                .filter(|&v| ni.is_some_and(|ni| m.named(v, ni).contains(&a)))
                .all(|v| naive(m, v, g))
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Ops {
    pub c: bool,
    pub d: bool,
    pub b: bool,
}

pub const ES: Ops = Ops { c: false, d: false, b: false };
pub const ESC: Ops = Ops { c: true, d: false, b: false };
pub const ALL: Ops = Ops { c: true, d: true, b: true };

/// Random formula of modal depth at most `depth` (and nesting height at
/// most 5).
pub fn random_formula(rng: &mut impl Rng, depth: usize, names: &[&str], props: &[&str], ops: Ops) -> Formula {
    let mut rng = ChaCha8Rng::seed_from_u64(rng.gen());
    grow(&mut rng, depth, 5, names, props, ops)
}

fn grow(rng: &mut ChaCha8Rng, depth: usize, height: usize, names: &[&str], props: &[&str], ops: Ops) -> Formula {
    let leaf = |rng: &mut dyn rand::RngCore| match rng.gen_range(0..10) {
        0 => Formula::True,
        1 => Formula::False,
        _ => Formula::atom(*props.choose(rng).unwrap()),
    };
    if height == 0 || rng.gen_bool(0.25) {
        return leaf(rng);
    }
    let n = *names.choose(rng).unwrap();
    let mut kinds = vec!["not", "and", "or", "imp"];
    if depth > 0 {
        kinds.extend(["E", "S", "E", "S"]);
        if ops.c {
            kinds.push("C");
        }
        if ops.d {
            kinds.push("D");
        }
        if ops.b {
            kinds.push("B");
        }
    }
    let sub = |rng: &mut ChaCha8Rng, d: usize| grow(rng, d, height - 1, names, props, ops);
    let mut inner = ChaCha8Rng::seed_from_u64(rng.gen());
    match *kinds.choose(rng).unwrap() {
        "not" => Formula::not(sub(&mut inner, depth)),
        "and" => Formula::and(sub(&mut inner, depth), sub(&mut inner, depth)),
        "or" => Formula::or(sub(&mut inner, depth), sub(&mut inner, depth)),
        "imp" => Formula::implies(sub(&mut inner, depth), sub(&mut inner, depth)),
        "E" => Formula::e(n, sub(&mut inner, depth - 1)),
        "S" => Formula::s(n, sub(&mut inner, depth - 1)),
        "C" => Formula::c(n, sub(&mut inner, depth - 1)),
        "D" => Formula::d(n, sub(&mut inner, depth - 1)),
        _ => Formula::b("a0", n, sub(&mut inner, depth - 1)),
    }
}

/// Branching variables of the decision procedure: propositions and modal
/// members of the closure.
pub fn closure_variables(phi: &Formula) -> usize {
    closure(phi)
        .unwrap()
        .formulas
        .iter()
        .filter(|g| matches!(g, Formula::Atom(_) | Formula::E(..) | Formula::S(..) | Formula::C(..)))
        .count()
}

pub fn model(seed: u64, states: usize, agents: usize, names: usize, mode: RandomMode) -> KripkeModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_model(&RandomModelParams {
        states,
        agents,
        names,
        props: 2,
        edge_density: rng.gen_range(0.1..0.6),
        naming_density: rng.gen_range(0.2..0.8),
        mode,
        seed,
    })
}

/// Random neighborhood model over names `n`, `m` and props `p`, `q` in
/// which every neighborhood of `w` contains `w`.
pub fn random_reflexive_nbhd(seed: u64, states: usize) -> NeighborhoodModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids: Vec<String> = (0..states).map(|i| format!("s{i}")).collect();
    let mut m = NeighborhoodModel::new(ids, ["n", "m"]).unwrap();
    for w in 0..states {
        for name in 0..2 {
            for _ in 0..rng.gen_range(0..=3) {
                let mut x = StateSet::with_capacity(states);
                x.insert(w);
                x.extend((0..states).filter(|_| rng.gen_bool(0.4)));
                m.add_neighborhood_ix(w, name, x);
            }
        }
    }
    for p in ["p", "q"] {
        let mut ext = StateSet::with_capacity(states);
        ext.extend((0..states).filter(|_| rng.gen_bool(0.5)));
        m.set_valuation(p, ext);
    }
    m
}

pub fn arb_formula(ops: Ops) -> impl Strategy<Value = Formula> {
    (any::<u64>(), 0usize..=3).prop_map(move |(seed, depth)| {
        random_formula(&mut ChaCha8Rng::seed_from_u64(seed), depth, &["n", "m"], &["p", "q"], ops)
    })
}

pub fn arb_model() -> impl Strategy<Value = KripkeModel> {
    (any::<u64>(), 1usize..=5, 1usize..=3, any::<bool>()).prop_map(|(seed, states, agents, epistemic)| {
        let mode = if epistemic { RandomMode::Epistemic } else { RandomMode::General };
        model(seed, states, agents, 2, mode)
    })
}
