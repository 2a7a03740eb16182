//! Neighborhood semantics: each state and name carry a family of state
//! sets, `S[n]` asks for some neighborhood inside the truth set and `E[n]`
//! for all of them.
//!
//! Kripke models translate by `nu_n(w) = { R_a(w) : a in mu(w, n) }`;
//! reflexive neighborhood models translate back by turning every
//! neighborhood into an agent.

mod algebra;
mod json;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::equivalence::{MorphismCheckReport, StateMap, Violation, ViolationCondition};
use crate::error::ModelError;
use crate::kripke::{KripkeModel, StateSet};
use crate::syntax::{Formula, Name, Prop};

pub use algebra::{
    complex_algebra, verify_algebra_equations, AlgebraDiagnostic, ComplexAlgebra, Equation,
    EXHAUSTIVE_STATE_CAP,
};
pub use json::NeighborhoodModelFile;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodModel {
    states: Vec<String>,
    names: Vec<Name>,
    state_ix: HashMap<String, usize>,
    name_ix: HashMap<Name, usize>,
    /// `nu[w][n]`: distinct neighborhoods, kept sorted by member list.
    nu: Vec<Vec<Vec<StateSet>>>,
    valuation: BTreeMap<Prop, StateSet>,
}

fn members(s: &StateSet) -> Vec<usize> {
    s.ones().collect()
}

impl NeighborhoodModel {
    pub fn new<S, N>(
        states: impl IntoIterator<Item = S>,
        names: impl IntoIterator<Item = N>,
    ) -> Result<Self, ModelError>
    where
        S: Into<String>,
        N: Into<Name>,
    {
        let states: Vec<String> = states.into_iter().map(Into::into).collect();
        let names: Vec<Name> = names.into_iter().map(Into::into).collect();
        if states.is_empty() {
            return Err(ModelError::NoStates);
        }
        let mut state_ix = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            if state_ix.insert(s.clone(), i).is_some() {
                return Err(ModelError::Duplicate(s.clone()));
            }
        }
        let mut name_ix = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if name_ix.insert(n.clone(), i).is_some() {
                return Err(ModelError::Duplicate(n.to_string()));
            }
        }
        Ok(NeighborhoodModel {
            nu: vec![vec![Vec::new(); names.len()]; states.len()],
            valuation: BTreeMap::new(),
            states,
            names,
            state_ix,
            name_ix,
        })
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn names(&self) -> &[Name] {
        &self.names
    }

    pub fn state(&self, id: &str) -> Result<usize, ModelError> {
        self.state_ix
            .get(id)
            .copied()
            .ok_or_else(|| ModelError::UndeclaredState(id.to_owned()))
    }

    pub fn name(&self, n: &Name) -> Result<usize, ModelError> {
        self.name_ix
            .get(n)
            .copied()
            .ok_or_else(|| ModelError::UndeclaredName(n.to_string()))
    }

    pub fn state_id(&self, w: usize) -> &str {
        &self.states[w]
    }

    /// `nu_n(w)`.
    pub fn neighborhoods(&self, w: usize, name: usize) -> &[StateSet] {
        &self.nu[w][name]
    }

    pub fn add_neighborhood_ix(&mut self, w: usize, name: usize, set: StateSet) {
        debug_assert_eq!(set.len(), self.num_states());
        let family = &mut self.nu[w][name];
        let key = members(&set);
        match family.binary_search_by(|x| members(x).cmp(&key)) {
            Ok(_) => {}
            Err(pos) => family.insert(pos, set),
        }
    }

    pub fn add_neighborhood(&mut self, state: &str, name: &str, set: &[&str]) -> Result<(), ModelError> {
        let w = self.state(state)?;
        let n = self.name(&Name::new(name))?;
        let mut x = self.empty_set();
        for s in set {
            x.insert(self.state(s)?);
        }
        self.add_neighborhood_ix(w, n, x);
        Ok(())
    }

    pub fn props(&self) -> impl Iterator<Item = &Prop> {
        self.valuation.keys()
    }

    pub fn valuation(&self, p: &Prop) -> Option<&StateSet> {
        self.valuation.get(p)
    }

    pub fn set_valuation(&mut self, p: impl Into<Prop>, ext: StateSet) {
        self.valuation.insert(p.into(), ext);
    }

    pub fn empty_set(&self) -> StateSet {
        StateSet::with_capacity(self.num_states())
    }

    pub fn full_set(&self) -> StateSet {
        let mut s = self.empty_set();
        s.insert_range(..);
        s
    }

    pub fn ids(&self, set: &StateSet) -> Vec<String> {
        set.ones().map(|w| self.states[w].clone()).collect()
    }

    /// Every neighborhood of every state contains that state.
    pub fn is_reflexive(&self) -> bool {
        self.reflexivity_failure().is_none()
    }

    fn reflexivity_failure(&self) -> Option<(usize, usize)> {
        (0..self.num_states()).find_map(|w| {
            (0..self.names.len())
                .find(|&n| self.nu[w][n].iter().any(|x| !x.contains(w)))
                .map(|n| (w, n))
        })
    }

    /// True when some state has the empty set as a neighborhood.
    pub fn has_empty_neighborhood(&self) -> bool {
        self.nu.iter().flatten().flatten().any(|x| x.is_clear())
    }
}

fn resolve(m: &NeighborhoodModel, f: &Formula) -> Result<(), ModelError> {
    match f {
        Formula::Atom(p) if m.valuation(p).is_none() => {
            return Err(ModelError::UndeclaredProp(p.to_string()))
        }
        Formula::E(n, _) | Formula::S(n, _) => {
            m.name(n)?;
        }
        Formula::C(..) | Formula::D(..) | Formula::B(..) => {
            return Err(ModelError::Unsupported(format!(
                "neighborhood semantics covers E and S only: {f}"
            )))
        }
        _ => {}
    }
    f.children().into_iter().try_for_each(|c| resolve(m, c))
}

fn ext(m: &NeighborhoodModel, f: &Formula) -> StateSet {
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
        Formula::E(n, g) => {
            let body = ext(m, g);
            complex_algebra(m).everyone(m.name(n).expect("resolved"), &body)
        }
        Formula::S(n, g) => {
            let body = ext(m, g);
            complex_algebra(m).someone(m.name(n).expect("resolved"), &body)
        }
        Formula::C(..) | Formula::D(..) | Formula::B(..) => unreachable!("rejected by resolve"),
    }
}

/// Truth set of an `E`/`S`/Boolean formula.
pub fn extension_nbhd(m: &NeighborhoodModel, f: &Formula) -> Result<StateSet, ModelError> {
    resolve(m, f)?;
    Ok(ext(m, f))
}

pub fn check_nbhd(m: &NeighborhoodModel, w: &str, f: &Formula) -> Result<bool, ModelError> {
    let w = m.state(w)?;
    Ok(extension_nbhd(m, f)?.contains(w))
}

/// `nu_n(w) = { R_a(w) : a in mu(w, n) }`, valuation copied.
pub fn kripke_to_nbhd(m: &KripkeModel) -> NeighborhoodModel {
    let mut out = NeighborhoodModel::new(m.states().iter().cloned(), m.names().iter().cloned())
        .expect("same carriers as a valid model");
    for w in 0..m.num_states() {
        for n in 0..m.names().len() {
            for &a in m.named(w, n) {
                out.add_neighborhood_ix(w, n, m.successors(a, w).clone());
            }
        }
    }
    for p in m.props() {
        out.set_valuation(p.clone(), m.valuation(p).expect("declared").clone());
    }
    out
}

/// Canonical agent id for a neighborhood: its members in declaration order.
pub fn neighborhood_agent_id(m: &NeighborhoodModel, x: &StateSet) -> String {
    format!("{{{}}}", m.ids(x).join(","))
}

/// Reflexive neighborhood model to Kripke model: every distinct
/// neighborhood `X` becomes an agent with `R_X(w) = X` for `w` in `X`,
/// and `mu(w, n)` is `nu_n(w)`.
pub fn nbhd_to_kripke(m: &NeighborhoodModel) -> Result<KripkeModel, ModelError> {
    if let Some((w, n)) = m.reflexivity_failure() {
        return Err(ModelError::NotReflexive {
            state: m.state_id(w).to_owned(),
            name: m.names[n].to_string(),
        });
    }
    let sets: BTreeSet<Vec<usize>> = m.nu.iter().flatten().flatten().map(members).collect();
    let agent_of: HashMap<Vec<usize>, usize> =
        sets.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    let agent_ids = sets.iter().map(|s| {
        let mut x = m.empty_set();
        x.extend(s.iter().copied());
        neighborhood_agent_id(m, &x)
    });
    let mut out = KripkeModel::new(m.states.iter().cloned(), agent_ids, m.names.iter().cloned())?;
    for (s, &a) in &agent_of {
        let mut x = m.empty_set();
        x.extend(s.iter().copied());
        for &w in s {
            out.set_successors_ix(a, w, x.clone());
        }
    }
    for w in 0..m.num_states() {
        for n in 0..m.names.len() {
            for x in &m.nu[w][n] {
                out.add_name_ix(w, n, agent_of[&members(x)]);
            }
        }
    }
    for (p, ext) in &m.valuation {
        out.set_valuation(p.clone(), ext.clone());
    }
    Ok(out)
}

fn resolve_map(
    src: &NeighborhoodModel,
    dst: &NeighborhoodModel,
    f: &StateMap,
) -> Result<Vec<usize>, ModelError> {
    src.states
        .iter()
        .map(|s| {
            let t = f
                .get(s)
                .ok_or_else(|| ModelError::UndeclaredState(format!("{s} (unmapped)")))?;
            dst.state(t)
        })
        .collect()
}

/// Checks the (there-n) and (back-n) conditions of a core bounded
/// morphism at every state and name.
pub fn check_core_morphism(
    src: &NeighborhoodModel,
    dst: &NeighborhoodModel,
    f: &StateMap,
) -> Result<MorphismCheckReport, ModelError> {
    let map = resolve_map(src, dst, f)?;
    let image = |x: &StateSet| {
        let mut y = dst.empty_set();
        y.extend(x.ones().map(|w| map[w]));
        y
    };
    let names: BTreeSet<&Name> = src.names.iter().chain(dst.names.iter()).collect();
    let mut violations = Vec::new();
    #[allow(clippy::needless_range_loop)]
    for w in 0..src.num_states() {
        let fw = map[w];
        for name in &names {
            let here = src.name(name).map(|n| src.neighborhoods(w, n)).unwrap_or(&[]);
            let there = dst.name(name).map(|n| dst.neighborhoods(fw, n)).unwrap_or(&[]);
            let images: Vec<StateSet> = here.iter().map(image).collect();
            for (x, fx) in here.iter().zip(&images) {
                if !there.contains(fx) {
                    violations.push(Violation {
                        state: src.state_id(w).to_owned(),
                        name: name.to_string(),
                        condition: ViolationCondition::There,
                        detail: format!(
                            "image of {{{}}} is not a neighborhood of {}",
                            src.ids(x).join(","),
                            dst.state_id(fw)
                        ),
                    });
                }
            }
            for y in there {
                if !images.contains(y) {
                    violations.push(Violation {
                        state: src.state_id(w).to_owned(),
                        name: name.to_string(),
                        condition: ViolationCondition::Back,
                        detail: format!(
                            "neighborhood {{{}}} of {} is not an image",
                            dst.ids(y).join(","),
                            dst.state_id(fw)
                        ),
                    });
                }
            }
        }
    }
    Ok(MorphismCheckReport::from_violations(violations))
}
