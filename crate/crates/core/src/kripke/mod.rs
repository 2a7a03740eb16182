//! Kripke models with a naming function, satisfaction for every modality,
//! validation and model constructions.

mod check;
pub(crate) mod construct;
mod frame;
mod json;
mod validate;

use std::collections::{BTreeMap, HashMap};

use fixedbitset::FixedBitSet;

use crate::error::ModelError;
use crate::syntax::{Name, Prop};

pub use check::{check, check_at, extension, n_successors, TruthResult, Witness};
pub use construct::{
    disjoint_union, generated_submodel, random_model, random_name_ids, random_prop_ids,
    union_state_id, RandomMode, RandomModelParams,
};
pub use frame::{frame_valid, DEFAULT_FRAME_BUDGET_BITS};
pub use json::{KripkeModelFile, RelationClosure};
pub use validate::{validate_model, Diagnostic, DiagnosticKind, Severity, ValidationMode};

/// Set of states, indexed by declaration order.
pub type StateSet = FixedBitSet;

/// A finite model: states, agents, per-agent accessibility `R_a`, the
/// naming function `mu(w, n)` and a valuation.
///
/// States, agents and names are addressed by string id at the API
/// boundary and by declaration index internally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeModel {
    states: Vec<String>,
    agents: Vec<String>,
    names: Vec<Name>,
    state_ix: HashMap<String, usize>,
    agent_ix: HashMap<String, usize>,
    name_ix: HashMap<Name, usize>,
    /// `relations[a][w]` is `R_a(w)`.
    relations: Vec<Vec<StateSet>>,
    /// `naming[w][n]` is `mu(w, n)`, sorted agent indices.
    naming: Vec<Vec<Vec<usize>>>,
    valuation: BTreeMap<Prop, StateSet>,
}

fn index<T: Clone + Eq + std::hash::Hash>(
    items: &[T],
    show: impl Fn(&T) -> String,
) -> Result<HashMap<T, usize>, ModelError> {
    let mut ix = HashMap::with_capacity(items.len());
    for (i, it) in items.iter().enumerate() {
        if ix.insert(it.clone(), i).is_some() {
            return Err(ModelError::Duplicate(show(it)));
        }
    }
    Ok(ix)
}

impl KripkeModel {
    /// Empty relations, naming and valuation over the given carriers.
    pub fn new<S, A, N>(
        states: impl IntoIterator<Item = S>,
        agents: impl IntoIterator<Item = A>,
        names: impl IntoIterator<Item = N>,
    ) -> Result<Self, ModelError>
    where
        S: Into<String>,
        A: Into<String>,
        N: Into<Name>,
    {
        let states: Vec<String> = states.into_iter().map(Into::into).collect();
        let agents: Vec<String> = agents.into_iter().map(Into::into).collect();
        let names: Vec<Name> = names.into_iter().map(Into::into).collect();
        if states.is_empty() {
            return Err(ModelError::NoStates);
        }
        let state_ix = index(&states, Clone::clone)?;
        let agent_ix = index(&agents, Clone::clone)?;
        let name_ix = index(&names, |n| n.to_string())?;
        let n = states.len();
        Ok(KripkeModel {
            relations: vec![vec![StateSet::with_capacity(n); n]; agents.len()],
            naming: vec![vec![Vec::new(); names.len()]; n],
            valuation: BTreeMap::new(),
            states,
            agents,
            names,
            state_ix,
            agent_ix,
            name_ix,
        })
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
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

    pub fn agent(&self, id: &str) -> Result<usize, ModelError> {
        self.agent_ix
            .get(id)
            .copied()
            .ok_or_else(|| ModelError::UndeclaredAgent(id.to_owned()))
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

    pub fn agent_id(&self, a: usize) -> &str {
        &self.agents[a]
    }

    /// `R_a(w)`.
    pub fn successors(&self, agent: usize, w: usize) -> &StateSet {
        &self.relations[agent][w]
    }

    /// `mu(w, n)` as sorted agent indices.
    pub fn named(&self, w: usize, name: usize) -> &[usize] {
        &self.naming[w][name]
    }

    /// True when `agent` bears some name at `w`.
    pub fn is_named(&self, w: usize, agent: usize) -> bool {
        self.naming[w].iter().any(|g| g.binary_search(&agent).is_ok())
    }

    pub fn props(&self) -> impl Iterator<Item = &Prop> {
        self.valuation.keys()
    }

    /// `pi(p)`, or `None` for an undeclared proposition.
    pub fn valuation(&self, p: &Prop) -> Option<&StateSet> {
        self.valuation.get(p)
    }

    /// Sorted propositions true at `w`.
    pub fn label(&self, w: usize) -> Vec<&Prop> {
        self.valuation
            .iter()
            .filter(|(_, ext)| ext.contains(w))
            .map(|(p, _)| p)
            .collect()
    }

    pub fn add_edge(&mut self, agent: &str, from: &str, to: &str) -> Result<(), ModelError> {
        let (a, w, v) = (self.agent(agent)?, self.state(from)?, self.state(to)?);
        self.add_edge_ix(a, w, v);
        Ok(())
    }

    pub fn add_edge_ix(&mut self, agent: usize, from: usize, to: usize) {
        self.relations[agent][from].insert(to);
    }

    /// Replaces `R_a(w)`.
    pub fn set_successors_ix(&mut self, agent: usize, from: usize, succ: StateSet) {
        debug_assert_eq!(succ.len(), self.num_states());
        self.relations[agent][from] = succ;
    }

    /// Adds `agent` to `mu(state, name)`.
    pub fn add_name(&mut self, state: &str, name: &str, agent: &str) -> Result<(), ModelError> {
        let (w, n, a) = (
            self.state(state)?,
            self.name(&Name::new(name))?,
            self.agent(agent)?,
        );
        self.add_name_ix(w, n, a);
        Ok(())
    }

    pub fn add_name_ix(&mut self, state: usize, name: usize, agent: usize) {
        let group = &mut self.naming[state][name];
        if let Err(pos) = group.binary_search(&agent) {
            group.insert(pos, agent);
        }
    }

    /// Declares `p` (false everywhere) if it is not declared yet.
    pub fn declare_prop(&mut self, p: impl Into<Prop>) {
        let n = self.num_states();
        self.valuation
            .entry(p.into())
            .or_insert_with(|| StateSet::with_capacity(n));
    }

    pub fn set_true(&mut self, p: impl Into<Prop>, state: &str) -> Result<(), ModelError> {
        let w = self.state(state)?;
        self.set_true_ix(p, w);
        Ok(())
    }

    pub fn set_true_ix(&mut self, p: impl Into<Prop>, w: usize) {
        let n = self.num_states();
        self.valuation
            .entry(p.into())
            .or_insert_with(|| StateSet::with_capacity(n))
            .insert(w);
    }

    /// Replaces `pi(p)`.
    pub fn set_valuation(&mut self, p: impl Into<Prop>, ext: StateSet) {
        debug_assert_eq!(ext.len(), self.num_states());
        self.valuation.insert(p.into(), ext);
    }

    /// Copy of the frame with every declared proposition false everywhere.
    pub fn frame(&self) -> KripkeModel {
        let mut m = self.clone();
        m.valuation.clear();
        m
    }

    pub fn full_set(&self) -> StateSet {
        let mut s = StateSet::with_capacity(self.num_states());
        s.insert_range(..);
        s
    }

    pub fn empty_set(&self) -> StateSet {
        StateSet::with_capacity(self.num_states())
    }

    /// Sorted state ids of a set.
    pub fn ids(&self, set: &StateSet) -> Vec<String> {
        set.ones().map(|w| self.states[w].clone()).collect()
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// The four-state example model: agents `a`, `b`; names `n`, `m`.
    pub fn figure1() -> KripkeModel {
        KripkeModel::from_json(include_str!("../../../../models/figure1.json")).unwrap()
    }

    /// One state `x` with a loop for `agent`, which is named `n`.
    pub fn loop_model(state: &str, agent: &str) -> KripkeModel {
        let mut m = KripkeModel::new([state], [agent], ["n"]).unwrap();
        m.add_edge(agent, state, state).unwrap();
        m.add_name(state, "n", agent).unwrap();
        m
    }
}
