use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{KripkeModel, StateSet};
use crate::error::ModelError;

/// Per-agent closure applied to the listed pairs before the model is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationClosure {
    Reflexive,
    Symmetric,
    Transitive,
}

/// On-disk model format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KripkeModelFile {
    pub states: Vec<String>,
    pub agents: Vec<String>,
    pub names: Vec<String>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<[String; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closure: Option<Vec<String>>,
    #[serde(default)]
    pub naming: BTreeMap<String, BTreeMap<String, Vec<String>>>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
}

fn close(rel: &mut [StateSet], how: RelationClosure) {
    let n = rel.len();
    match how {
        RelationClosure::Reflexive => {
            for (w, succ) in rel.iter_mut().enumerate() {
                succ.insert(w);
            }
        }
        RelationClosure::Symmetric => {
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|w| rel[w].ones().map(move |v| (w, v)).collect::<Vec<_>>())
                .collect();
            for (w, v) in pairs {
                rel[v].insert(w);
            }
        }
        RelationClosure::Transitive => {
            // Warshall over the successor rows.
            for k in 0..n {
                let row_k = rel[k].clone();
                for succ in rel.iter_mut() {
                    if succ.contains(k) {
                        succ.union_with(&row_k);
                    }
                }
            }
        }
    }
}

impl KripkeModel {
    pub fn from_file(file: &KripkeModelFile) -> Result<Self, ModelError> {
        let mut m = KripkeModel::new(
            file.states.iter().cloned(),
            file.agents.iter().cloned(),
            file.names.iter().map(String::as_str),
        )?;
        let closures = file
            .closure
            .iter()
            .flatten()
            .map(|c| {
                serde_json::from_value::<RelationClosure>(serde_json::Value::String(c.clone()))
                    .map_err(|_| ModelError::UnknownClosure(c.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        for (agent, pairs) in &file.relations {
            let a = m.agent(agent)?;
            for [from, to] in pairs {
                let (w, v) = (m.state(from)?, m.state(to)?);
                m.add_edge_ix(a, w, v);
            }
        }
        for how in closures {
            for rel in m.relations.iter_mut() {
                close(rel, how);
            }
        }
        for (state, by_name) in &file.naming {
            for (name, agents) in by_name {
                for agent in agents {
                    m.add_name(state, name, agent)?;
                }
            }
        }
        for (p, states) in &file.valuation {
            m.declare_prop(p.as_str());
            for s in states {
                m.set_true(p.as_str(), s)?;
            }
        }
        Ok(m)
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let file: KripkeModelFile = serde_json::from_str(text)?;
        Self::from_file(&file)
    }

    /// Explicit form: relations listed pair by pair, no closure key, empty
    /// naming entries omitted.
    pub fn to_file(&self) -> KripkeModelFile {
        let mut relations = BTreeMap::new();
        for (a, agent) in self.agents.iter().enumerate() {
            let pairs: Vec<[String; 2]> = (0..self.num_states())
                .flat_map(|w| {
                    self.relations[a][w]
                        .ones()
                        .map(move |v| (w, v))
                        .collect::<Vec<_>>()
                })
                .map(|(w, v)| [self.states[w].clone(), self.states[v].clone()])
                .collect();
            relations.insert(agent.clone(), pairs);
        }
        let mut naming = BTreeMap::new();
        for (w, state) in self.states.iter().enumerate() {
            let mut by_name = BTreeMap::new();
            for (n, name) in self.names.iter().enumerate() {
                let group = &self.naming[w][n];
                if !group.is_empty() {
                    by_name.insert(
                        name.to_string(),
                        group.iter().map(|&a| self.agents[a].clone()).collect(),
                    );
                }
            }
            if !by_name.is_empty() {
                naming.insert(state.clone(), by_name);
            }
        }
        let valuation = self
            .valuation
            .iter()
            .map(|(p, ext)| (p.to_string(), self.ids(ext)))
            .collect();
        KripkeModelFile {
            states: self.states.clone(),
            agents: self.agents.clone(),
            names: self.names.iter().map(ToString::to_string).collect(),
            relations,
            closure: None,
            naming,
            valuation,
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.to_file()).expect("model file serializes")
    }
}

/// Serializes as the explicit file form.
impl Serialize for KripkeModel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_file().serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::fixtures::figure1;
    use crate::syntax::Prop;

    #[test]
    fn figure1_loads_with_equivalence_closure() {
        let m = figure1();
        let (a, b) = (m.agent("a").unwrap(), m.agent("b").unwrap());
        let ids = |s: &StateSet| m.ids(s);
        assert_eq!(ids(m.successors(a, m.state("w").unwrap())), ["w", "v"]);
        assert_eq!(ids(m.successors(b, m.state("w").unwrap())), ["w", "u"]);
        assert_eq!(ids(m.successors(a, m.state("u").unwrap())), ["s", "u"]);
        assert_eq!(m.ids(m.valuation(&Prop::new("p")).unwrap()), ["w", "v"]);
    }

    #[test]
    fn explicit_form_reloads_to_the_same_model() {
        let m = figure1();
        let text = serde_json::to_string(&m.to_file()).unwrap();
        assert_eq!(KripkeModel::from_json(&text).unwrap(), m);
    }

    #[test]
    fn rejects_undeclared_ids_and_unknown_keys() {
        let bad_state = r#"{"states":["x"],"agents":["a"],"names":["n"],
            "relations":{"a":[["x","y"]]}}"#;
        assert!(matches!(
            KripkeModel::from_json(bad_state),
            Err(ModelError::UndeclaredState(s)) if s == "y"
        ));
        let bad_key = r#"{"states":["x"],"agents":[],"names":[],"extra":1}"#;
        assert!(matches!(KripkeModel::from_json(bad_key), Err(ModelError::Json(_))));
        let bad_closure = r#"{"states":["x"],"agents":[],"names":[],"closure":["euclidean"]}"#;
        assert!(matches!(
            KripkeModel::from_json(bad_closure),
            Err(ModelError::UnknownClosure(_))
        ));
        let no_states = r#"{"states":[],"agents":[],"names":[]}"#;
        assert!(matches!(KripkeModel::from_json(no_states), Err(ModelError::NoStates)));
    }
}
