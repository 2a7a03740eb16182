use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::NeighborhoodModel;
use crate::error::ModelError;

/// On-disk neighborhood model: `nu` maps state to name to a list of
/// neighborhoods, each a list of states.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeighborhoodModelFile {
    pub states: Vec<String>,
    pub names: Vec<String>,
    #[serde(default)]
    pub nu: BTreeMap<String, BTreeMap<String, Vec<Vec<String>>>>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
}

impl NeighborhoodModel {
    pub fn from_file(file: &NeighborhoodModelFile) -> Result<Self, ModelError> {
        let mut m = NeighborhoodModel::new(
            file.states.iter().cloned(),
            file.names.iter().map(String::as_str),
        )?;
        for (state, by_name) in &file.nu {
            for (name, family) in by_name {
                for x in family {
                    let x: Vec<&str> = x.iter().map(String::as_str).collect();
                    m.add_neighborhood(state, name, &x)?;
                }
            }
        }
        for (p, states) in &file.valuation {
            let mut ext = m.empty_set();
            for s in states {
                ext.insert(m.state(s)?);
            }
            m.set_valuation(p.as_str(), ext);
        }
        Ok(m)
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let file: NeighborhoodModelFile = serde_json::from_str(text)?;
        Self::from_file(&file)
    }

    /// Empty families are omitted.
    pub fn to_file(&self) -> NeighborhoodModelFile {
        let mut nu = BTreeMap::new();
        for (w, state) in self.states.iter().enumerate() {
            let mut by_name = BTreeMap::new();
            for (n, name) in self.names.iter().enumerate() {
                let family = self.neighborhoods(w, n);
                if !family.is_empty() {
                    by_name.insert(name.to_string(), family.iter().map(|x| self.ids(x)).collect());
                }
            }
            if !by_name.is_empty() {
                nu.insert(state.clone(), by_name);
            }
        }
        NeighborhoodModelFile {
            states: self.states.clone(),
            names: self.names.iter().map(ToString::to_string).collect(),
            nu,
            valuation: self
                .valuation
                .iter()
                .map(|(p, ext)| (p.to_string(), self.ids(ext)))
                .collect(),
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.to_file()).expect("model file serializes")
    }
}
