//! Frame morphisms, bisimulations with names, the greatest bisimulation
//! between two finite models, and distinguishing formulas.

mod distinguish;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::kripke::{check_at, KripkeModel, StateSet};
use crate::syntax::{Formula, Name, Prop};

pub use distinguish::{distinguishing_formula, modal_equivalence};

/// A map between state ids, serialized as a JSON object.
pub type StateMap = BTreeMap<String, String>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ViolationCondition {
    /// Propositions disagree (bisimulation clause (0), or the valuation
    /// comparison of a morphism).
    Atoms,
    /// Forth direction: morphism (there), bisimulation clause (1).
    There,
    /// Back direction: morphism (back), bisimulation clause (2).
    Back,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub state: String,
    pub name: String,
    pub condition: ViolationCondition,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismCheckReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl MorphismCheckReport {
    pub fn from_violations(violations: Vec<Violation>) -> Self {
        MorphismCheckReport {
            ok: violations.is_empty(),
            violations,
        }
    }
}

/// A relation between the states of two models, as `[left, right]` pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BisimRelation {
    pub pairs: BTreeSet<(String, String)>,
}

impl BisimRelation {
    pub fn contains(&self, left: &str, right: &str) -> bool {
        self.pairs.contains(&(left.to_owned(), right.to_owned()))
    }

    /// Graph of a map.
    pub fn graph(f: &StateMap) -> Self {
        BisimRelation {
            pairs: f.iter().map(|(l, r)| (l.clone(), r.clone())).collect(),
        }
    }

    /// The relation as a map, if it is functional.
    pub fn as_map(&self) -> Option<StateMap> {
        let mut f = StateMap::new();
        for (l, r) in &self.pairs {
            if f.insert(l.clone(), r.clone()).is_some() {
                return None;
            }
        }
        Some(f)
    }
}

/// Names of both models; a name missing from one model is empty there.
pub(crate) fn shared_names(m1: &KripkeModel, m2: &KripkeModel) -> Vec<Name> {
    let names: BTreeSet<&Name> = m1.names().iter().chain(m2.names()).collect();
    names.into_iter().cloned().collect()
}

/// `{R_a(w) : a in mu(w, n)}` with the agent ids, or nothing for a name the
/// model does not declare.
pub(crate) fn family<'m>(m: &'m KripkeModel, w: usize, name: &Name) -> Vec<(usize, &'m StateSet)> {
    match m.name(name) {
        Ok(n) => m.named(w, n).iter().map(|&a| (a, m.successors(a, w))).collect(),
        Err(_) => Vec::new(),
    }
}

/// Propositions of both models; a missing one is false everywhere.
fn atoms_agree(m1: &KripkeModel, w1: usize, m2: &KripkeModel, w2: usize) -> Option<Prop> {
    let holds = |m: &KripkeModel, w: usize, p: &Prop| m.valuation(p).is_some_and(|e| e.contains(w));
    m1.props()
        .chain(m2.props())
        .find(|p| holds(m1, w1, p) != holds(m2, w2, p))
        .cloned()
}

fn resolve_map(src: &KripkeModel, dst: &KripkeModel, f: &StateMap) -> Result<Vec<usize>, ModelError> {
    src.states()
        .iter()
        .map(|s| {
            let t = f
                .get(s)
                .ok_or_else(|| ModelError::UndeclaredState(format!("{s} (unmapped)")))?;
            dst.state(t)
        })
        .collect()
}

/// Checks (there) and (back) at every state and name: each named agent's
/// successor image must be the successor set of an agent with the same name
/// at the image state, and conversely. With `compare_valuations`, the
/// propositions declared in both models must also agree along `f`.
pub fn check_frame_morphism(
    src: &KripkeModel,
    dst: &KripkeModel,
    f: &StateMap,
    compare_valuations: bool,
) -> Result<MorphismCheckReport, ModelError> {
    let map = resolve_map(src, dst, f)?;
    let image = |x: &StateSet| {
        let mut y = dst.empty_set();
        y.extend(x.ones().map(|v| map[v]));
        y
    };
    let mut violations = Vec::new();
    #[allow(clippy::needless_range_loop)]
    for w in 0..src.num_states() {
        let fw = map[w];
        for name in shared_names(src, dst) {
            let here = family(src, w, &name);
            let there = family(dst, fw, &name);
            let images: Vec<StateSet> = here.iter().map(|(_, x)| image(x)).collect();
            for ((a, _), fx) in here.iter().zip(&images) {
                if !there.iter().any(|(_, y)| *y == fx) {
                    violations.push(Violation {
                        state: src.state_id(w).to_owned(),
                        name: name.to_string(),
                        condition: ViolationCondition::There,
                        detail: format!(
                            "no agent named {name} at {} has successors {{{}}} (image of {}'s)",
                            dst.state_id(fw),
                            dst.ids(fx).join(","),
                            src.agent_id(*a)
                        ),
                    });
                }
            }
            for (b, y) in &there {
                if !images.contains(y) {
                    violations.push(Violation {
                        state: src.state_id(w).to_owned(),
                        name: name.to_string(),
                        condition: ViolationCondition::Back,
                        detail: format!(
                            "successors of {} at {} are no image of an agent named {name}",
                            dst.agent_id(*b),
                            dst.state_id(fw)
                        ),
                    });
                }
            }
        }
        if compare_valuations {
            for p in src.props().filter(|p| dst.valuation(p).is_some()) {
                let (l, r) = (src.valuation(p).unwrap().contains(w), dst.valuation(p).unwrap().contains(fw));
                if l != r {
                    violations.push(Violation {
                        state: src.state_id(w).to_owned(),
                        name: String::new(),
                        condition: ViolationCondition::Atoms,
                        detail: format!("{p} is {l} here but {r} at {}", dst.state_id(fw)),
                    });
                }
            }
        }
    }
    Ok(MorphismCheckReport::from_violations(violations))
}

/// Relation as rows: `rows[w1]` is the set of related states of the
/// right-hand model.
type Rows = Vec<StateSet>;

/// Full back-and-forth between `x` (left) and `y` (right) under `z`.
fn full(z: &Rows, x: &StateSet, y: &StateSet, right_states: usize) -> bool {
    let mut reached = StateSet::with_capacity(right_states);
    for u in x.ones() {
        if z[u].is_disjoint(y) {
            return false;
        }
        reached.union_with(&z[u]);
    }
    y.is_subset(&reached)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Clause {
    There,
    Back,
}

/// First clause of (1)/(2) failing at `(w1, w2)` under `z`, with its name.
fn failing_clause(
    m1: &KripkeModel,
    w1: usize,
    m2: &KripkeModel,
    w2: usize,
    names: &[Name],
    z: &Rows,
) -> Option<(Clause, Name, usize)> {
    let k = m2.num_states();
    for name in names {
        let (left, right) = (family(m1, w1, name), family(m2, w2, name));
        if let Some((a, _)) = left
            .iter()
            .find(|(_, x)| !right.iter().any(|(_, y)| full(z, x, y, k)))
        {
            return Some((Clause::There, name.clone(), *a));
        }
        if let Some((b, _)) = right
            .iter()
            .find(|(_, y)| !left.iter().any(|(_, x)| full(z, x, y, k)))
        {
            return Some((Clause::Back, name.clone(), *b));
        }
    }
    None
}

fn to_rows(m1: &KripkeModel, m2: &KripkeModel, b: &BisimRelation) -> Result<Rows, ModelError> {
    let mut rows = vec![m2.empty_set(); m1.num_states()];
    for (l, r) in &b.pairs {
        rows[m1.state(l)?].insert(m2.state(r)?);
    }
    Ok(rows)
}

fn from_rows(m1: &KripkeModel, m2: &KripkeModel, rows: &Rows) -> BisimRelation {
    let mut pairs = BTreeSet::new();
    for (w, row) in rows.iter().enumerate() {
        for v in row.ones() {
            pairs.insert((m1.state_id(w).to_owned(), m2.state_id(v).to_owned()));
        }
    }
    BisimRelation { pairs }
}

/// Checks clauses (0), (1) and (2) at every pair of `b`.
pub fn check_bisimulation(
    m1: &KripkeModel,
    m2: &KripkeModel,
    b: &BisimRelation,
) -> Result<MorphismCheckReport, ModelError> {
    let rows = to_rows(m1, m2, b)?;
    let names = shared_names(m1, m2);
    let mut violations = Vec::new();
    for (w1, row) in rows.iter().enumerate() {
        for w2 in row.ones() {
            let pair = format!("({}, {})", m1.state_id(w1), m2.state_id(w2));
            if let Some(p) = atoms_agree(m1, w1, m2, w2) {
                violations.push(Violation {
                    state: m1.state_id(w1).to_owned(),
                    name: String::new(),
                    condition: ViolationCondition::Atoms,
                    detail: format!("{pair}: {p} differs"),
                });
            }
            for name in &names {
                if let Some((clause, _, agent)) =
                    failing_clause(m1, w1, m2, w2, std::slice::from_ref(name), &rows)
                {
                    let (condition, who) = match clause {
                        Clause::There => (ViolationCondition::There, m1.agent_id(agent)),
                        Clause::Back => (ViolationCondition::Back, m2.agent_id(agent)),
                    };
                    violations.push(Violation {
                        state: m1.state_id(w1).to_owned(),
                        name: name.to_string(),
                        condition,
                        detail: format!("{pair}: no fully related partner for {who}"),
                    });
                }
            }
        }
    }
    Ok(MorphismCheckReport::from_violations(violations))
}

fn greatest_rows(m1: &KripkeModel, m2: &KripkeModel) -> Rows {
    let names = shared_names(m1, m2);
    let mut rows: Rows = (0..m1.num_states())
        .map(|w1| {
            let mut row = m2.empty_set();
            row.extend((0..m2.num_states()).filter(|&w2| atoms_agree(m1, w1, m2, w2).is_none()));
            row
        })
        .collect();
    loop {
        let mut next = rows.clone();
        for (w1, row) in rows.iter().enumerate() {
            for w2 in row.ones() {
                if failing_clause(m1, w1, m2, w2, &names, &rows).is_some() {
                    next[w1].set(w2, false);
                }
            }
        }
        if next == rows {
            return rows;
        }
        rows = next;
    }
}

/// Largest relation satisfying clauses (0)-(2): refinement from all
/// atom-agreeing pairs down to the greatest fixpoint.
pub fn greatest_bisimulation(m1: &KripkeModel, m2: &KripkeModel) -> BisimRelation {
    from_rows(m1, m2, &greatest_rows(m1, m2))
}

pub fn bisimilar(m1: &KripkeModel, w1: &str, m2: &KripkeModel, w2: &str) -> Result<bool, ModelError> {
    let (w1, w2) = (m1.state(w1)?, m2.state(w2)?);
    Ok(greatest_rows(m1, m2)[w1].contains(w2))
}

/// Both points agree on every corpus formula.
pub fn modal_equiv_corpus(
    m1: &KripkeModel,
    w1: &str,
    m2: &KripkeModel,
    w2: &str,
    corpus: &[Formula],
) -> Result<bool, ModelError> {
    let (w1, w2) = (m1.state(w1)?, m2.state(w2)?);
    for f in corpus {
        if check_at(m1, w1, f)?.value != check_at(m2, w2, f)?.value {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::kripke::fixtures::{figure1, loop_model};
    use crate::kripke::{disjoint_union, union_state_id};
    use crate::syntax::parse_formula;

    pub fn identity(m: &KripkeModel) -> StateMap {
        m.states().iter().map(|s| (s.clone(), s.clone())).collect()
    }

    #[test]
    fn observation_morphism() {
        let (f1, f2) = (loop_model("x", "a"), loop_model("x'", "b"));
        let f: StateMap = [("x".into(), "x'".into())].into();
        assert!(check_frame_morphism(&f1, &f2, &f, true).unwrap().ok);
        assert!(bisimilar(&f1, "x", &f2, "x'").unwrap());
        let m = figure1();
        assert!(check_frame_morphism(&m, &m, &identity(&m), true).unwrap().ok);
    }

    #[test]
    fn collapsing_map_fails_there() {
        // R_a(x) = {x, y} maps onto {z, t}, but the only agent named n at z
        // sees {z}: both directions fail at x, nothing at the unnamed y.
        let mut src = KripkeModel::new(["x", "y"], ["a"], ["n"]).unwrap();
        src.add_name("x", "n", "a").unwrap();
        src.add_edge("a", "x", "x").unwrap();
        src.add_edge("a", "x", "y").unwrap();
        let mut dst = KripkeModel::new(["z", "t"], ["b"], ["n"]).unwrap();
        dst.add_name("z", "n", "b").unwrap();
        dst.add_edge("b", "z", "z").unwrap();
        let f: StateMap = [("x".into(), "z".into()), ("y".into(), "t".into())].into();
        let r = check_frame_morphism(&src, &dst, &f, false).unwrap();
        assert!(!r.ok);
        let conditions: Vec<_> = r.violations.iter().map(|v| v.condition).collect();
        assert_eq!(conditions, [ViolationCondition::There, ViolationCondition::Back]);
        assert!(r.violations.iter().all(|v| v.state == "x"));
    }

    #[test]
    fn bisimulation_clauses() {
        let m = figure1();
        let id = BisimRelation::graph(&identity(&m));
        assert!(check_bisimulation(&m, &m, &id).unwrap().ok);

        // x named, y unnamed, both with no propositions
        let mut m2 = KripkeModel::new(["x", "y"], ["a"], ["n"]).unwrap();
        m2.add_name("x", "n", "a").unwrap();
        m2.add_edge("a", "x", "x").unwrap();
        let rel = BisimRelation {
            pairs: [("y".to_owned(), "x".to_owned())].into(),
        };
        let r = check_bisimulation(&m2, &m2, &rel).unwrap();
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].condition, ViolationCondition::Back);
    }

    #[test]
    fn greatest_bisimulation_examples() {
        let m = figure1();
        let g = greatest_bisimulation(&m, &m);
        for s in m.states() {
            assert!(g.contains(s, s));
        }
        assert!(!g.contains("w", "v"));
        assert!(!bisimilar(&m, "w", &m, "s").unwrap());
        assert!(check_bisimulation(&m, &m, &g).unwrap().ok);

        let u = disjoint_union(&[m.clone(), m.clone()]);
        let g = greatest_bisimulation(&m, &u);
        for s in m.states() {
            assert!(g.contains(s, &union_state_id(0, s)));
            assert!(g.contains(s, &union_state_id(1, s)));
        }
    }

    #[test]
    fn corpus_equivalence() {
        let m = figure1();
        assert!(!modal_equiv_corpus(&m, "w", &m, "u", &[parse_formula("p").unwrap()]).unwrap());
        assert!(modal_equiv_corpus(&m, "w", &m, "w", &[]).unwrap());
    }
}
