use std::collections::VecDeque;

use serde::Serialize;

use super::{KripkeModel, StateSet};
use crate::error::ModelError;
use crate::syntax::Formula;

/// Explanation attached to a verdict on a modal formula. Best effort:
/// ignored by equality on [`TruthResult`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `S[n] f` holds: this agent is named `n` here and knows `f`.
    KnowingAgent { agent: String },
    /// `E[n] f` fails: this agent is named `n` here and considers `state`
    /// possible, where `f` fails.
    IgnorantAgent { agent: String, state: String },
    /// `D[n] f` holds: pooling these agents' information yields `f`.
    Subgroup { agents: Vec<String> },
    /// `C[n] f` fails: an n-path ending in a state where `f` fails.
    Path { states: Vec<String> },
    /// `B[i;n] f` fails: `i` considers `state` possible, is named `n`
    /// there, and `f` fails there.
    Counterexample { state: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct TruthResult {
    pub value: bool,
    pub witness: Option<Witness>,
}

impl PartialEq for TruthResult {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

/// `R_n(w)`: states reachable in one step by some agent named `n` at `w`.
pub fn n_successors(m: &KripkeModel, name: usize) -> Vec<StateSet> {
    (0..m.num_states())
        .map(|w| {
            let mut out = m.empty_set();
            for &a in m.named(w, name) {
                out.union_with(m.successors(a, w));
            }
            out
        })
        .collect()
}

/// BFS over `step` from the successors of `w`; returns visited states and
/// the BFS parent of each (for path reconstruction).
fn reach(step: &[StateSet], w: usize) -> (StateSet, Vec<Option<usize>>) {
    let mut seen = StateSet::with_capacity(step.len());
    let mut parent = vec![None; step.len()];
    let mut queue = VecDeque::new();
    for v in step[w].ones() {
        seen.insert(v);
        parent[v] = Some(w);
        queue.push_back(v);
    }
    while let Some(x) = queue.pop_front() {
        for v in step[x].ones() {
            if !seen.put(v) {
                parent[v] = Some(x);
                queue.push_back(v);
            }
        }
    }
    (seen, parent)
}

fn resolve(m: &KripkeModel, f: &Formula) -> Result<(), ModelError> {
    match f {
        Formula::Atom(p) if m.valuation(p).is_none() => {
            return Err(ModelError::UndeclaredProp(p.to_string()))
        }
        Formula::E(n, _) | Formula::S(n, _) | Formula::C(n, _) | Formula::D(n, _) => {
            m.name(n)?;
        }
        Formula::B(i, n, _) => {
            m.agent(i.as_str())?;
            m.name(n)?;
        }
        _ => {}
    }
    f.children().into_iter().try_for_each(|c| resolve(m, c))
}

fn ext(m: &KripkeModel, f: &Formula) -> StateSet {
    let all = m.num_states();
    match f {
        Formula::Atom(p) => m.valuation(p).expect("resolved").clone(),
        Formula::True => m.full_set(),
        Formula::False => m.empty_set(),
        Formula::Not(g) => {
            let mut s = ext(m, g);
            s.toggle_range(..);
            s
        }
        Formula::And(l, r) => {
            let mut s = ext(m, l);
            s.intersect_with(&ext(m, r));
            s
        }
        Formula::Or(l, r) => {
            let mut s = ext(m, l);
            s.union_with(&ext(m, r));
            s
        }
        Formula::Implies(l, r) => {
            let mut s = ext(m, l);
            s.toggle_range(..);
            s.union_with(&ext(m, r));
            s
        }
        Formula::Iff(l, r) => {
            let mut s = ext(m, l);
            s.symmetric_difference_with(&ext(m, r));
            s.toggle_range(..);
            s
        }
        Formula::E(n, g) | Formula::S(n, g) => {
            let name = m.name(n).expect("resolved");
            let body = ext(m, g);
            let universal = matches!(f, Formula::E(..));
            let mut out = m.empty_set();
            for w in 0..all {
                let mut knows = m
                    .named(w, name)
                    .iter()
                    .map(|&a| m.successors(a, w).is_subset(&body));
                let holds = if universal {
                    knows.all(|k| k)
                } else {
                    knows.any(|k| k)
                };
                out.set(w, holds);
            }
            out
        }
        Formula::C(n, g) => {
            let step = n_successors(m, m.name(n).expect("resolved"));
            let body = ext(m, g);
            let mut out = m.empty_set();
            for w in 0..all {
                out.set(w, reach(&step, w).0.is_subset(&body));
            }
            out
        }
        Formula::D(n, g) => {
            let name = m.name(n).expect("resolved");
            let body = ext(m, g);
            let mut out = m.empty_set();
            for w in 0..all {
                out.set(w, pooled(m, w, name).is_some_and(|x| x.is_subset(&body)));
            }
            out
        }
        Formula::B(i, n, g) => {
            let agent = m.agent(i.as_str()).expect("resolved");
            let name = m.name(n).expect("resolved");
            let body = ext(m, g);
            let mut out = m.empty_set();
            for w in 0..all {
                let ok = m
                    .successors(agent, w)
                    .ones()
                    .all(|v| !m.named(v, name).contains(&agent) || body.contains(v));
                out.set(w, ok);
            }
            out
        }
    }
}

/// Intersection of `R_i(w)` over the whole group `mu(w, n)`, or `None` if
/// the group is empty. Intersection shrinks as the subgroup grows, so the
/// whole group is the best candidate subgroup.
fn pooled(m: &KripkeModel, w: usize, name: usize) -> Option<StateSet> {
    let group = m.named(w, name);
    let (&first, rest) = group.split_first()?;
    let mut x = m.successors(first, w).clone();
    for &a in rest {
        x.intersect_with(m.successors(a, w));
    }
    Some(x)
}

/// `||f||`: the states where `f` holds.
pub fn extension(m: &KripkeModel, f: &Formula) -> Result<StateSet, ModelError> {
    resolve(m, f)?;
    Ok(ext(m, f))
}

/// Truth of `f` at state `w`.
pub fn check(m: &KripkeModel, w: &str, f: &Formula) -> Result<TruthResult, ModelError> {
    check_at(m, m.state(w)?, f)
}

pub fn check_at(m: &KripkeModel, w: usize, f: &Formula) -> Result<TruthResult, ModelError> {
    if w >= m.num_states() {
        return Err(ModelError::UndeclaredState(w.to_string()));
    }
    resolve(m, f)?;
    let value = ext(m, f).contains(w);
    Ok(TruthResult {
        value,
        witness: witness(m, w, f, value),
    })
}

fn witness(m: &KripkeModel, w: usize, f: &Formula, value: bool) -> Option<Witness> {
    let agent = |a: usize| m.agent_id(a).to_owned();
    let state = |v: usize| m.state_id(v).to_owned();
    match f {
        Formula::S(n, g) if value => {
            let body = ext(m, g);
            let name = m.name(n).ok()?;
            m.named(w, name)
                .iter()
                .find(|&&a| m.successors(a, w).is_subset(&body))
                .map(|&a| Witness::KnowingAgent { agent: agent(a) })
        }
        Formula::E(n, g) if !value => {
            let body = ext(m, g);
            let name = m.name(n).ok()?;
            m.named(w, name).iter().find_map(|&a| {
                m.successors(a, w)
                    .ones()
                    .find(|&v| !body.contains(v))
                    .map(|v| Witness::IgnorantAgent {
                        agent: agent(a),
                        state: state(v),
                    })
            })
        }
        Formula::D(n, _) if value => {
            let name = m.name(n).ok()?;
            Some(Witness::Subgroup {
                agents: m.named(w, name).iter().map(|&a| agent(a)).collect(),
            })
        }
        Formula::C(n, g) if !value => {
            let body = ext(m, g);
            let (seen, parent) = reach(&n_successors(m, m.name(n).ok()?), w);
            let path_to = |v: usize| {
                let mut path = vec![v];
                let mut cur = v;
                while let Some(p) = parent[cur] {
                    path.push(p);
                    if p == w {
                        break;
                    }
                    cur = p;
                }
                path.reverse();
                path
            };
            let path = seen
                .ones()
                .filter(|&v| !body.contains(v))
                .map(path_to)
                .min_by_key(Vec::len)?;
            Some(Witness::Path {
                states: path.into_iter().map(state).collect(),
            })
        }
        Formula::B(i, n, g) if !value => {
            let a = m.agent(i.as_str()).ok()?;
            let name = m.name(n).ok()?;
            let body = ext(m, g);
            m.successors(a, w)
                .ones()
                .find(|&v| m.named(v, name).contains(&a) && !body.contains(v))
                .map(|v| Witness::Counterexample { state: state(v) })
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::fixtures::figure1;
    use crate::syntax::parse_formula;

    fn holds(m: &KripkeModel, w: &str, f: &str) -> bool {
        check(m, w, &parse_formula(f).unwrap()).unwrap().value
    }

    #[test]
    fn figure1_judgments() {
        let m = figure1();
        assert!(holds(&m, "w", "S[n] p & !E[n] p"));
        assert!(holds(&m, "w", "!S[m] p & E[m] p & E[m] !p"));
        assert!(holds(&m, "u", "S[m] q & !S[m] S[m] q"));
        assert!(holds(&m, "s", "!S[n] p & !S[n] !S[n] p"));
        assert!(holds(&m, "w", "C[n] (p | q)"));
        assert!(!holds(&m, "v", "C[m] !q"));
    }

    #[test]
    fn distributed_knowledge_separates_from_someone_knows() {
        let m = figure1();
        let d = check(&m, "w", &parse_formula("D[n] (p & q)").unwrap()).unwrap();
        assert!(d.value);
        assert_eq!(
            d.witness,
            Some(Witness::Subgroup {
                agents: vec!["a".into(), "b".into()]
            })
        );
        assert!(!holds(&m, "w", "S[n] (p & q)"));
    }

    #[test]
    fn extensions() {
        let m = figure1();
        let ext = |f: &str| m.ids(&extension(&m, &parse_formula(f).unwrap()).unwrap());
        assert_eq!(ext("p"), ["w", "v"]);
        assert_eq!(ext("E[m] false"), ["w"]);
        assert_eq!(ext("true"), ["w", "v", "s", "u"]);
    }

    #[test]
    fn witnesses_point_at_the_right_things() {
        let m = figure1();
        let r = check(&m, "w", &parse_formula("E[n] p").unwrap()).unwrap();
        assert_eq!(
            r.witness,
            Some(Witness::IgnorantAgent {
                agent: "b".into(),
                state: "u".into()
            })
        );
        let r = check(&m, "v", &parse_formula("C[m] !q").unwrap()).unwrap();
        assert_eq!(
            r.witness,
            Some(Witness::Path {
                states: vec!["v".into(), "s".into(), "u".into()]
            })
        );
        let r = check(&m, "w", &parse_formula("S[n] p").unwrap()).unwrap();
        assert_eq!(r.witness, Some(Witness::KnowingAgent { agent: "a".into() }));
    }

    #[test]
    fn undeclared_symbols_are_errors() {
        let m = figure1();
        let f = |s: &str| parse_formula(s).unwrap();
        assert!(matches!(check(&m, "x", &f("p")), Err(ModelError::UndeclaredState(_))));
        assert!(matches!(check(&m, "w", &f("r")), Err(ModelError::UndeclaredProp(_))));
        assert!(matches!(check(&m, "w", &f("S[k] p")), Err(ModelError::UndeclaredName(_))));
        assert!(matches!(
            check(&m, "w", &f("B[c;n] p")),
            Err(ModelError::UndeclaredAgent(_))
        ));
    }

    #[test]
    fn belief_relative_to_name() {
        let m = figure1();
        // b's successors from w are w and u; b is named n at both.
        assert!(holds(&m, "w", "B[b;n] q"));
        assert!(!holds(&m, "w", "B[b;n] p"));
        // a's successors from u are s and u, where a bears no name n.
        assert!(holds(&m, "u", "B[a;n] false"));
    }
}
