use serde::{Deserialize, Serialize};

use super::KripkeModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ValidationMode {
    /// Reflexivity where named; edges from unnamed worlds are warnings.
    #[default]
    Lenient,
    /// Additionally, an agent has edges only from worlds where it bears a name.
    Strict,
    /// Lenient, plus every relation is an equivalence relation on its field.
    Epistemic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiagnosticKind {
    /// `agent` is named at `state` but has no loop there.
    MissingReflexiveLoop { agent: String, state: String },
    /// `agent` has an edge out of `state` where it bears no name.
    UnnamedEdge { agent: String, state: String },
    /// `R_agent` is not an equivalence relation on its field.
    NotEquivalence { agent: String, property: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    #[serde(flatten)]
    pub kind: DiagnosticKind,
}

impl Diagnostic {
    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

/// Checks the model-level invariants of `mode`. A model is valid for the
/// mode when no diagnostic has [`Severity::Error`].
pub fn validate_model(m: &KripkeModel, mode: ValidationMode) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for a in 0..m.num_agents() {
        let agent = m.agent_id(a).to_owned();
        for w in 0..m.num_states() {
            let named = m.is_named(w, a);
            let succ = m.successors(a, w);
            if named && !succ.contains(w) {
                out.push(Diagnostic {
                    severity: Severity::Error,
                    kind: DiagnosticKind::MissingReflexiveLoop {
                        agent: agent.clone(),
                        state: m.state_id(w).to_owned(),
                    },
                });
            }
            if !named && !succ.is_clear() {
                out.push(Diagnostic {
                    severity: if mode == ValidationMode::Strict {
                        Severity::Error
                    } else {
                        Severity::Warning
                    },
                    kind: DiagnosticKind::UnnamedEdge {
                        agent: agent.clone(),
                        state: m.state_id(w).to_owned(),
                    },
                });
            }
        }
        if mode == ValidationMode::Epistemic {
            for property in equivalence_failures(m, a) {
                out.push(Diagnostic {
                    severity: Severity::Error,
                    kind: DiagnosticKind::NotEquivalence {
                        agent: agent.clone(),
                        property: property.to_owned(),
                    },
                });
            }
        }
    }
    out
}

fn equivalence_failures(m: &KripkeModel, a: usize) -> Vec<&'static str> {
    let n = m.num_states();
    let mut field = m.empty_set();
    for w in 0..n {
        let succ = m.successors(a, w);
        if !succ.is_clear() {
            field.insert(w);
            field.union_with(succ);
        }
    }
    let mut failures = Vec::new();
    if field.ones().any(|w| !m.successors(a, w).contains(w)) {
        failures.push("reflexive");
    }
    if (0..n).any(|w| m.successors(a, w).ones().any(|v| !m.successors(a, v).contains(w))) {
        failures.push("symmetric");
    }
    if (0..n).any(|w| {
        m.successors(a, w)
            .ones()
            .any(|v| !m.successors(a, v).is_subset(m.successors(a, w)))
    }) {
        failures.push("transitive");
    }
    failures
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::fixtures::{figure1, loop_model};

    fn errors(d: &[Diagnostic]) -> usize {
        d.iter().filter(|d| d.is_error()).count()
    }

    #[test]
    fn figure1_is_lenient_valid_with_one_warning_per_unnamed_edge() {
        let m = figure1();
        let d = validate_model(&m, ValidationMode::Lenient);
        assert_eq!(errors(&d), 0);
        assert_eq!(
            d,
            vec![Diagnostic {
                severity: Severity::Warning,
                kind: DiagnosticKind::UnnamedEdge {
                    agent: "a".into(),
                    state: "u".into()
                }
            }]
        );
        assert_eq!(errors(&validate_model(&m, ValidationMode::Epistemic)), 0);
        assert_eq!(errors(&validate_model(&m, ValidationMode::Strict)), 1);
    }

    #[test]
    fn single_loop_is_valid_everywhere() {
        let m = loop_model("x", "a");
        for mode in [
            ValidationMode::Lenient,
            ValidationMode::Strict,
            ValidationMode::Epistemic,
        ] {
            assert!(validate_model(&m, mode).is_empty());
        }
    }

    #[test]
    fn missing_loop_at_named_world() {
        let mut m = KripkeModel::new(["x", "y"], ["a"], ["n"]).unwrap();
        m.add_name("x", "n", "a").unwrap();
        m.add_edge("a", "x", "y").unwrap();
        let d = validate_model(&m, ValidationMode::Lenient);
        assert_eq!(
            d,
            vec![Diagnostic {
                severity: Severity::Error,
                kind: DiagnosticKind::MissingReflexiveLoop {
                    agent: "a".into(),
                    state: "x".into()
                }
            }]
        );
        let props: Vec<_> = validate_model(&m, ValidationMode::Epistemic)
            .into_iter()
            .filter_map(|d| match d.kind {
                DiagnosticKind::NotEquivalence { property, .. } => Some(property),
                _ => None,
            })
            .collect();
        assert_eq!(props, ["reflexive", "symmetric"]);
    }
}
