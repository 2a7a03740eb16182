use std::collections::{BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{KripkeModel, StateSet};
use crate::syntax::{Name, Prop};

/// Restriction of `m` to the states reachable from `w` along any agent's
/// relation (reflexive-transitive). Ids are kept.
pub fn generated_submodel(m: &KripkeModel, w: usize) -> KripkeModel {
    let mut seen = m.empty_set();
    seen.insert(w);
    let mut queue = VecDeque::from([w]);
    while let Some(x) = queue.pop_front() {
        for a in 0..m.num_agents() {
            for v in m.successors(a, x).ones() {
                if !seen.put(v) {
                    queue.push_back(v);
                }
            }
        }
    }
    let keep: Vec<usize> = seen.ones().collect();
    restrict(m, &keep)
}

/// Restriction of `m` to the states `keep` (in that order).
pub(crate) fn restrict(m: &KripkeModel, keep: &[usize]) -> KripkeModel {
    let mut pos = vec![usize::MAX; m.num_states()];
    for (i, &w) in keep.iter().enumerate() {
        pos[w] = i;
    }
    let mut out = KripkeModel::new(
        keep.iter().map(|&w| m.state_id(w).to_owned()),
        m.agents().iter().cloned(),
        m.names().iter().cloned(),
    )
    .expect("ids stay distinct");
    for a in 0..m.num_agents() {
        for (i, &w) in keep.iter().enumerate() {
            for v in m.successors(a, w).ones() {
                if pos[v] != usize::MAX {
                    out.add_edge_ix(a, i, pos[v]);
                }
            }
        }
    }
    for (i, &w) in keep.iter().enumerate() {
        for n in 0..m.names().len() {
            for &a in m.named(w, n) {
                out.add_name_ix(i, n, a);
            }
        }
    }
    for p in m.props() {
        out.declare_prop(p.clone());
        let ext = m.valuation(p).expect("declared");
        for (i, &w) in keep.iter().enumerate() {
            if ext.contains(w) {
                out.set_true_ix(p.clone(), i);
            }
        }
    }
    out
}

/// `m` without agents that have no edges and are never named.
pub(crate) fn without_idle_agents(m: &KripkeModel) -> KripkeModel {
    let busy: Vec<usize> = (0..m.num_agents())
        .filter(|&a| (0..m.num_states()).any(|w| !m.successors(a, w).is_clear() || m.is_named(w, a)))
        .collect();
    let mut out = KripkeModel::new(
        m.states().iter().cloned(),
        busy.iter().map(|&a| m.agent_id(a).to_owned()),
        m.names().iter().cloned(),
    )
    .expect("ids stay distinct");
    for (i, &a) in busy.iter().enumerate() {
        for w in 0..m.num_states() {
            out.set_successors_ix(i, w, m.successors(a, w).clone());
            for n in 0..m.names().len() {
                if m.named(w, n).contains(&a) {
                    out.add_name_ix(w, n, i);
                }
            }
        }
    }
    for p in m.props() {
        out.set_valuation(p.clone(), m.valuation(p).expect("declared").clone());
    }
    out
}

/// Id of state `state` of component `component` in a disjoint union.
pub fn union_state_id(component: usize, state: &str) -> String {
    format!("{state}#{component}")
}

/// Disjoint union. States and agents are tagged with their component index
/// (see [`union_state_id`]); names and propositions are shared.
pub fn disjoint_union(ms: &[KripkeModel]) -> KripkeModel {
    assert!(!ms.is_empty(), "disjoint union of no models");
    let states = ms
        .iter()
        .enumerate()
        .flat_map(|(i, m)| m.states().iter().map(move |s| union_state_id(i, s)));
    let agents = ms
        .iter()
        .enumerate()
        .flat_map(|(i, m)| m.agents().iter().map(move |a| union_state_id(i, a)));
    let names: BTreeSet<Name> = ms.iter().flat_map(|m| m.names().iter().cloned()).collect();
    let props: BTreeSet<Prop> = ms.iter().flat_map(|m| m.props().cloned()).collect();
    let mut out = KripkeModel::new(states, agents, names).expect("tagged ids are distinct");
    for p in props {
        out.declare_prop(p);
    }
    let (mut state_off, mut agent_off) = (0, 0);
    for m in ms {
        for a in 0..m.num_agents() {
            for w in 0..m.num_states() {
                for v in m.successors(a, w).ones() {
                    out.add_edge_ix(agent_off + a, state_off + w, state_off + v);
                }
            }
        }
        for w in 0..m.num_states() {
            for (n, name) in m.names().iter().enumerate() {
                let n_out = out.name(name).expect("union of names");
                for &a in m.named(w, n) {
                    out.add_name_ix(state_off + w, n_out, agent_off + a);
                }
            }
        }
        for p in m.props() {
            for w in m.valuation(p).expect("declared").ones() {
                out.set_true_ix(p.clone(), state_off + w);
            }
        }
        state_off += m.num_states();
        agent_off += m.num_agents();
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum RandomMode {
    /// Arbitrary relations, made reflexive wherever the agent is named.
    #[default]
    General,
    /// Each relation is a random partition of the states.
    Epistemic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomModelParams {
    pub states: usize,
    pub agents: usize,
    pub names: usize,
    pub props: usize,
    /// Probability of each edge (general mode).
    pub edge_density: f64,
    /// Probability that a given agent bears a given name at a given state.
    pub naming_density: f64,
    pub mode: RandomMode,
    pub seed: u64,
}

impl Default for RandomModelParams {
    fn default() -> Self {
        RandomModelParams {
            states: 4,
            agents: 2,
            names: 1,
            props: 2,
            edge_density: 0.3,
            naming_density: 0.5,
            mode: RandomMode::General,
            seed: 0,
        }
    }
}

const NAME_IDS: [&str; 4] = ["n", "m", "k", "l"];
const PROP_IDS: [&str; 4] = ["p", "q", "r", "t"];

fn numbered(fixed: &[&str], prefix: &str, i: usize) -> String {
    fixed
        .get(i)
        .map(|s| s.to_string())
        .unwrap_or_else(|| format!("{prefix}{i}"))
}

/// Ids of the first `k` generated names: `n`, `m`, `k`, `l`, `n4`, ...
pub fn random_name_ids(k: usize) -> Vec<String> {
    (0..k).map(|i| numbered(&NAME_IDS, "n", i)).collect()
}

/// Ids of the first `k` generated propositions: `p`, `q`, `r`, `t`, `p4`, ...
pub fn random_prop_ids(k: usize) -> Vec<String> {
    (0..k).map(|i| numbered(&PROP_IDS, "p", i)).collect()
}

/// Seeded random model. Lenient-valid by construction; in epistemic mode
/// every relation is an equivalence relation.
pub fn random_model(params: &RandomModelParams) -> KripkeModel {
    assert!(params.states > 0, "random model needs at least one state");
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = params.states;
    let mut m = KripkeModel::new(
        (0..n).map(|i| format!("s{i}")),
        (0..params.agents).map(|i| format!("a{i}")),
        random_name_ids(params.names),
    )
    .expect("generated ids are distinct");
    for w in 0..n {
        for name in 0..params.names {
            for a in 0..params.agents {
                if rng.gen_bool(params.naming_density) {
                    m.add_name_ix(w, name, a);
                }
            }
        }
    }
    for a in 0..params.agents {
        match params.mode {
            RandomMode::General => {
                for w in 0..n {
                    for v in 0..n {
                        if rng.gen_bool(params.edge_density) {
                            m.add_edge_ix(a, w, v);
                        }
                    }
                    if m.is_named(w, a) {
                        m.add_edge_ix(a, w, w);
                    }
                }
            }
            RandomMode::Epistemic => {
                let block: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
                for w in 0..n {
                    let mut succ = StateSet::with_capacity(n);
                    succ.extend((0..n).filter(|&v| block[v] == block[w]));
                    m.set_successors_ix(a, w, succ);
                }
            }
        }
    }
    for p in random_prop_ids(params.props) {
        m.declare_prop(p.as_str());
        for w in 0..n {
            if rng.gen_bool(0.5) {
                m.set_true_ix(p.as_str(), w);
            }
        }
    }
    m
}
