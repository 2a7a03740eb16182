//! Satisfiability and validity for the `E`/`S`/`C` fragment over models
//! that are reflexive wherever an agent is named.
//!
//! The procedure enumerates the locally coherent atoms of the closure of
//! the query, builds a canonical candidate model over them (one agent per
//! `S[n] f` witness), and deletes atoms whose modal memberships the
//! candidate refutes until nothing changes. A bounded brute-force search
//! over small models serves as an independent oracle and handles `D`/`B`.

mod atoms;
mod axioms;
mod canonical;
mod oracle;

use serde::Serialize;

use crate::error::DecisionError;
use crate::kripke::construct::{restrict, without_idle_agents};
use crate::kripke::{check, KripkeModel};
use crate::syntax::Formula;

pub use axioms::{
    axiom_instances, axiom_suite, axiom_suite_with, negative_controls, AxiomReport, AxiomSystem,
    ControlResult, InstanceResult, Method, SuiteConfig,
};
pub use oracle::{brute_force_sat, brute_force_sat_with_budget, Bounds, DEFAULT_ORACLE_BUDGET};

/// Default cap on free closure variables (`2^cap` candidate atoms).
pub const DEFAULT_MAX_VARIABLES: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SatConfig {
    pub max_variables: usize,
    /// Bounds for queries outside the fragment, answered by the oracle.
    pub oracle_bounds: Bounds,
    pub oracle_budget: u128,
}

impl Default for SatConfig {
    fn default() -> Self {
        SatConfig {
            max_variables: DEFAULT_MAX_VARIABLES,
            oracle_bounds: Bounds::default(),
            oracle_budget: DEFAULT_ORACLE_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Sat,
    Unsat,
    /// No model within the oracle's bounds; says nothing beyond them.
    SatBoundedUnknown,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub closure_size: usize,
    pub initial_atoms: usize,
    pub rounds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SatResult {
    pub verdict: Verdict,
    pub model: Option<KripkeModel>,
    pub state: Option<String>,
    /// Absent for answers from the bounded oracle.
    pub stats: Option<Stats>,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        self.verdict == Verdict::Sat
    }
}

pub fn satisfiable(chi: &Formula) -> Result<SatResult, DecisionError> {
    satisfiable_with(chi, &SatConfig::default())
}

/// Runs the atom-elimination procedure. `D` and `B` are rejected.
pub fn satisfiable_with(chi: &Formula, config: &SatConfig) -> Result<SatResult, DecisionError> {
    let table = atoms::Table::new(chi)?;
    let all = atoms::enumerate_atoms(&table, config.max_variables)?;
    let (alive, cand, rounds) = canonical::eliminate(&table, &all);
    let stats = Stats {
        closure_size: table.len(),
        initial_atoms: all.len(),
        rounds,
    };
    let Some(point) = alive.iter().position(|&a| all[a].contains(table.root)) else {
        return Ok(SatResult {
            verdict: Verdict::Unsat,
            model: None,
            state: None,
            stats: Some(stats),
        });
    };
    let model = canonical::to_kripke(&table, &all, &alive, &cand, point);
    let state = format!("w{}", alive[point]);
    let model = shrink(model, &state, chi);
    let verified = check(&model, &state, chi).map(|r| r.value);
    assert!(matches!(verified, Ok(true)), "canonical model must satisfy {chi} at {state}");
    Ok(SatResult {
        verdict: Verdict::Sat,
        model: Some(model),
        state: Some(state),
        stats: Some(stats),
    })
}

/// Greedily deletes states other than `point` (and then idle agents)
/// while `chi` stays true there. Restrictions keep reflexivity at named
/// worlds, so the result is still in the intended class.
fn shrink(mut m: KripkeModel, point: &str, chi: &Formula) -> KripkeModel {
    let mut i = 0;
    while i < m.num_states() {
        if m.state_id(i) != point {
            let keep: Vec<usize> = (0..m.num_states()).filter(|&w| w != i).collect();
            let smaller = restrict(&m, &keep);
            if check(&smaller, point, chi).is_ok_and(|r| r.value) {
                m = smaller;
                continue;
            }
        }
        i += 1;
    }
    without_idle_agents(&m)
}

pub fn valid(chi: &Formula) -> Result<bool, DecisionError> {
    valid_with(chi, &SatConfig::default())
}

/// `chi` is valid iff its negation is unsatisfiable.
pub fn valid_with(chi: &Formula, config: &SatConfig) -> Result<bool, DecisionError> {
    Ok(!satisfiable_with(&Formula::not(chi.clone()), config)?.is_sat())
}

/// Any query: the procedure inside its fragment, otherwise the bounded
/// oracle, whose failure to find a model yields
/// [`Verdict::SatBoundedUnknown`].
pub fn decide(chi: &Formula, config: &SatConfig) -> Result<SatResult, DecisionError> {
    if !chi.has_d_or_b() {
        return satisfiable_with(chi, config);
    }
    Ok(match brute_force_sat_with_budget(chi, config.oracle_bounds, config.oracle_budget)? {
        Some((model, state)) => SatResult {
            verdict: Verdict::Sat,
            model: Some(model),
            state: Some(state),
            stats: None,
        },
        None => SatResult {
            verdict: Verdict::SatBoundedUnknown,
            model: None,
            state: None,
            stats: None,
        },
    })
}

/// The model and distinguished state of a sat result.
pub fn extract_model(r: &SatResult) -> Result<(KripkeModel, String), DecisionError> {
    match (&r.model, &r.state) {
        (Some(m), Some(s)) if r.is_sat() => Ok((m.clone(), s.clone())),
        _ => Err(DecisionError::NotSat),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::{n_successors, validate_model, ValidationMode};
    use crate::syntax::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn sat(s: &str) -> SatResult {
        satisfiable(&f(s)).unwrap()
    }

    fn lenient_valid(m: &KripkeModel) -> bool {
        !validate_model(m, ValidationMode::Lenient).iter().any(|d| d.is_error())
    }

    #[test]
    fn examples() {
        let r = sat("S[n] p & !E[n] p");
        assert!(r.is_sat());
        let (m, _) = extract_model(&r).unwrap();
        assert!(lenient_valid(&m));
        assert_eq!(m.num_states(), 2);

        assert!(!sat("S[n] p & !p").is_sat());
        assert!(!sat("!(C[n] p -> E[n] (p & C[n] p))").is_sat());
        assert!(sat("C[n] p & !p").is_sat());
        assert!(matches!(extract_model(&sat("S[n] p & !p")), Err(DecisionError::NotSat)));
    }

    #[test]
    fn validities() {
        assert!(valid(&f("S[n] p & E[n] (p -> q) -> S[n] q")).unwrap());
        assert!(valid(&f("C[n] p -> E[n] E[n] p")).unwrap());
        assert!(valid(&f("!E[n] false -> S[n] true")).unwrap());
        assert!(!valid(&f("E[n] p -> p")).unwrap());
        let r = sat("!(E[n] p -> p)");
        let (m, w) = extract_model(&r).unwrap();
        let w = m.state(&w).unwrap();
        assert!(m.named(w, m.name(&"n".into()).unwrap()).is_empty());
    }

    #[test]
    fn extracted_models() {
        let (m, w) = extract_model(&sat("S[n] p")).unwrap();
        let (w, n) = (m.state(&w).unwrap(), m.name(&"n".into()).unwrap());
        let p = m.valuation(&"p".into()).unwrap();
        assert!(m.named(w, n).iter().any(|&a| m.successors(a, w).is_subset(p)));

        let (m, w) = extract_model(&sat("E[m] p & E[m] !p")).unwrap();
        let (w, n) = (m.state(&w).unwrap(), m.name(&"m".into()).unwrap());
        assert!(m.named(w, n).is_empty());

        let (m, w) = extract_model(&sat("C[n] p & S[n] true")).unwrap();
        let (w, n) = (m.state(&w).unwrap(), m.name(&"n".into()).unwrap());
        let step = n_successors(&m, n);
        let p = m.valuation(&"p".into()).unwrap();
        let mut seen = step[w].clone();
        let mut todo: Vec<usize> = seen.ones().collect();
        while let Some(x) = todo.pop() {
            for y in step[x].ones() {
                if !seen.put(y) {
                    todo.push(y);
                }
            }
        }
        assert!(!seen.is_clear());
        assert!(seen.is_subset(p));
    }

    #[test]
    fn elimination_rounds_are_bounded() {
        for s in ["C[n] p & !p", "S[n] p & !E[n] p", "!(C[n] p -> E[n] E[n] p)", "C[n] S[m] q & E[m] !q"] {
            let r = sat(s);
            let stats = r.stats.unwrap();
            assert!(stats.rounds <= stats.initial_atoms.max(1));
        }
    }

    #[test]
    fn fragment_and_routing() {
        assert!(matches!(satisfiable(&f("D[n] p")), Err(DecisionError::UnsupportedFragment(_))));
        let r = decide(&f("D[n] (p & q) & !S[n] (p & q)"), &SatConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Sat);
        assert!(r.stats.is_none());
        let r = decide(&f("D[n] p & !p"), &SatConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::SatBoundedUnknown);
    }

    #[test]
    fn verdict_json() {
        let v = serde_json::to_value(sat("S[n] p & !p")).unwrap();
        assert_eq!(v["verdict"], "unsat");
        assert!(v["model"].is_null());
        assert!(v["stats"]["closure_size"].as_u64().unwrap() > 0);
        let v = serde_json::to_value(sat("p")).unwrap();
        assert_eq!(v["verdict"], "sat");
        assert!(v["model"]["states"].is_array());
    }
}
