//! Distinguishing formulas by partition refinement.
//!
//! Bisimilarity in the sense of clauses (0)-(2) is strictly finer than
//! agreement on E/S formulas: clause (1) asks for a single partner agent
//! that matches in both directions at once, whereas `S[n]` only sees upward
//! closed neighborhood families and `E[n]` only their union. So the
//! refinement here tracks the coarser relation that the language actually
//! characterizes on finite models, and each deleted pair carries a formula
//! built from the formulas of pairs deleted before it.

use std::collections::BTreeSet;

use super::{family, shared_names, BisimRelation};
use crate::error::ModelError;
use crate::kripke::{KripkeModel, StateSet};
use crate::syntax::{Formula, Name};

type Table = Vec<Vec<Option<Formula>>>;

fn neg(f: Formula) -> Formula {
    match f {
        Formula::Not(g) => *g,
        f => Formula::not(f),
    }
}

fn all(parts: impl IntoIterator<Item = Formula>) -> Formula {
    let parts: BTreeSet<Formula> = parts.into_iter().collect();
    Formula::conjunction(parts)
}

fn any(parts: impl IntoIterator<Item = Formula>) -> Formula {
    let parts: BTreeSet<Formula> = parts.into_iter().collect();
    Formula::disjunction(parts)
}

struct Refinement<'a> {
    m1: &'a KripkeModel,
    m2: &'a KripkeModel,
    names: Vec<Name>,
    /// `dist[w1][w2]`: formula true at `w1`, false at `w2`; `None` while
    /// the pair is still related.
    dist: Table,
}

impl Refinement<'_> {
    fn related(&self, u: usize, v: usize) -> bool {
        self.dist[u][v].is_none()
    }

    fn delta(&self, u: usize, v: usize) -> Formula {
        self.dist[u][v].clone().expect("pair already separated")
    }

    /// States of the right model related to some member of `x`.
    fn image(&self, x: &StateSet) -> StateSet {
        let mut out = self.m2.empty_set();
        for u in x.ones() {
            out.extend((0..self.m2.num_states()).filter(|&v| self.related(u, v)));
        }
        out
    }

    /// A formula true at `w1` and false at `w2` built from one refinement
    /// step, or `None` if the pair survives the step.
    fn split(&self, w1: usize, w2: usize) -> Option<Formula> {
        for name in &self.names {
            let left: Vec<&StateSet> = family(self.m1, w1, name).into_iter().map(|(_, x)| x).collect();
            let right: Vec<&StateSet> = family(self.m2, w2, name).into_iter().map(|(_, y)| y).collect();

            // S[n], forth: some left neighborhood whose image contains no
            // right neighborhood.
            for x in &left {
                let zx = self.image(x);
                if right.iter().all(|y| !y.is_subset(&zx)) {
                    let body = all(right.iter().map(|y| {
                        let v = y.ones().find(|&v| !zx.contains(v)).expect("not a subset");
                        any(x.ones().map(|u| self.delta(u, v)))
                    }));
                    return Some(Formula::s(name.clone(), body));
                }
            }
            // S[n], back: some right neighborhood with no left one all of
            // whose members are related into it.
            for y in &right {
                let unrelated = |u: usize| y.ones().all(|v| !self.related(u, v));
                if left.iter().all(|x| x.ones().any(unrelated)) {
                    let body = all(left.iter().map(|x| {
                        let u = x.ones().find(|&u| unrelated(u)).expect("unrelated member");
                        any(y.ones().map(|v| neg(self.delta(u, v))))
                    }));
                    return Some(neg(Formula::s(name.clone(), body)));
                }
            }
            // E[n]: the unions of the two families must be related both ways.
            let mut ul = self.m1.empty_set();
            left.iter().for_each(|x| ul.union_with(x));
            let mut ur = self.m2.empty_set();
            right.iter().for_each(|y| ur.union_with(y));
            if let Some(u) = ul.ones().find(|&u| ur.ones().all(|v| !self.related(u, v))) {
                let psi = all(ur.ones().map(|v| self.delta(u, v)));
                return Some(neg(Formula::e(name.clone(), neg(psi))));
            }
            let zu = self.image(&ul);
            if let Some(v) = ur.ones().find(|&v| !zu.contains(v)) {
                let chi = all(ul.ones().map(|u| neg(self.delta(u, v))));
                return Some(Formula::e(name.clone(), neg(chi)));
            }
        }
        None
    }
}

fn refine<'a>(m1: &'a KripkeModel, m2: &'a KripkeModel) -> Refinement<'a> {
    let props: BTreeSet<_> = m1.props().chain(m2.props()).cloned().collect();
    let holds = |m: &KripkeModel, w: usize, p| m.valuation(p).is_some_and(|e| e.contains(w));
    let dist = (0..m1.num_states())
        .map(|w1| {
            (0..m2.num_states())
                .map(|w2| {
                    props.iter().find_map(|p| match (holds(m1, w1, p), holds(m2, w2, p)) {
                        (true, false) => Some(Formula::Atom(p.clone())),
                        (false, true) => Some(Formula::not(Formula::Atom(p.clone()))),
                        _ => None,
                    })
                })
                .collect()
        })
        .collect();
    let mut r = Refinement {
        m1,
        m2,
        names: shared_names(m1, m2),
        dist,
    };
    loop {
        let mut found = Vec::new();
        for w1 in 0..m1.num_states() {
            for w2 in 0..m2.num_states() {
                if r.related(w1, w2) {
                    if let Some(f) = r.split(w1, w2) {
                        found.push((w1, w2, f));
                    }
                }
            }
        }
        if found.is_empty() {
            return r;
        }
        for (w1, w2, f) in found {
            r.dist[w1][w2] = Some(f);
        }
    }
}

/// Pairs of states agreeing on every E/S formula (the names and
/// propositions of both models; ones missing from a model count as empty
/// there).
pub fn modal_equivalence(m1: &KripkeModel, m2: &KripkeModel) -> BisimRelation {
    let r = refine(m1, m2);
    let mut pairs = BTreeSet::new();
    for w1 in 0..m1.num_states() {
        for w2 in 0..m2.num_states() {
            if r.related(w1, w2) {
                pairs.insert((m1.state_id(w1).to_owned(), m2.state_id(w2).to_owned()));
            }
        }
    }
    BisimRelation { pairs }
}

/// An E/S formula true at `(m1, w1)` and false at `(m2, w2)`, or `None`
/// when the two points agree on every such formula. Bisimilar points
/// always get `None`; the converse does not hold in general, since
/// clauses (0)-(2) can separate points no formula separates.
pub fn distinguishing_formula(
    m1: &KripkeModel,
    w1: &str,
    m2: &KripkeModel,
    w2: &str,
) -> Result<Option<Formula>, ModelError> {
    let (w1, w2) = (m1.state(w1)?, m2.state(w2)?);
    let mut r = refine(m1, m2);
    Ok(r.dist[w1][w2].take())
}
