//! Axiom schemas instantiated over a corpus, checked by the decision
//! procedure where it applies and on seeded random models throughout, plus
//! rule spot tests and non-theorem controls.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{brute_force_sat, valid_with, Bounds, SatConfig};
use crate::error::DecisionError;
use crate::kripke::{extension, random_model, KripkeModel, RandomMode, RandomModelParams};
use crate::syntax::{parse_formula, Formula, Name, Prop};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AxiomSystem {
    /// T(S_n), K(E_n), Int_1, Int_2 over propositional logic.
    AxN,
    /// `AxN` with K(C_n) and the fixed point axiom.
    AxNC,
    /// `AxN` with the distributed-knowledge axioms.
    AxND,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Decided by the satisfiability procedure.
    Valid,
    /// Only evaluated on the random model population.
    Semantic,
    /// Rule spot test (premise and conclusion judged like instances).
    Rule,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceResult {
    pub schema: String,
    #[serde(serialize_with = "as_text")]
    pub formula: Formula,
    pub method: Method,
    /// States (over all models) where the instance failed, per mode.
    pub general_failures: usize,
    pub epistemic_failures: usize,
    pub holds: bool,
}

fn as_text<S: serde::Serializer>(f: &Formula, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(f)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub system: AxiomSystem,
    pub models_per_mode: usize,
    pub instances: Vec<InstanceResult>,
    pub rules: Vec<InstanceResult>,
}

impl AxiomReport {
    pub fn all_hold(&self) -> bool {
        self.instances.iter().chain(&self.rules).all(|r| r.holds)
    }

    /// Fraction of axiom instances with no failure in the given mode.
    pub fn pass_rate(&self, mode: RandomMode) -> f64 {
        if self.instances.is_empty() {
            return 1.0;
        }
        let ok = self
            .instances
            .iter()
            .filter(|r| match mode {
                RandomMode::General => r.general_failures == 0,
                RandomMode::Epistemic => r.epistemic_failures == 0,
            })
            .count();
        ok as f64 / self.instances.len() as f64
    }

    pub fn failures(&self) -> impl Iterator<Item = &InstanceResult> {
        self.instances.iter().chain(&self.rules).filter(|r| !r.holds)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    /// Random models per mode (general and epistemic).
    pub semantic_models: usize,
    pub seed: u64,
    pub max_states: usize,
    /// Instances with more closure variables are only checked semantically.
    pub max_variables: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            semantic_models: 1000,
            seed: 0,
            max_states: 5,
            max_variables: 14,
        }
    }
}

fn imp(a: &Formula, b: &Formula) -> Formula {
    Formula::implies(a.clone(), b.clone())
}

fn and(a: &Formula, b: &Formula) -> Formula {
    Formula::and(a.clone(), b.clone())
}

fn not(a: &Formula) -> Formula {
    Formula::not(a.clone())
}

/// Names the schemas are instantiated with: those of the corpus, or `n`.
fn schema_names(corpus: &[Formula]) -> Vec<Name> {
    let mut names: BTreeSet<Name> = corpus.iter().flat_map(Formula::names).collect();
    if names.is_empty() {
        names.insert(Name::new("n"));
    }
    names.into_iter().collect()
}

/// Every schema of `system` instantiated over the corpus: unary schemas at
/// each formula, binary ones at each ordered pair, once per name.
pub fn axiom_instances(system: AxiomSystem, corpus: &[Formula]) -> Vec<(String, Formula)> {
    let mut out = Vec::new();
    let len = corpus.len();
    for (i, phi) in corpus.iter().enumerate() {
        for psi in corpus {
            out.push(("PL1".into(), imp(phi, &imp(psi, phi))));
            out.push(("PL3".into(), imp(&imp(&not(phi), &not(psi)), &imp(psi, phi))));
        }
        for (j, psi) in corpus.iter().enumerate() {
            let chi = &corpus[(i + j + 1) % len];
            let lhs = imp(phi, &imp(psi, chi));
            out.push(("PL2".into(), imp(&lhs, &imp(&imp(phi, psi), &imp(phi, chi)))));
        }
    }
    for n in schema_names(corpus) {
        let e = |f: &Formula| Formula::e(n.clone(), f.clone());
        let s = |f: &Formula| Formula::s(n.clone(), f.clone());
        let c = |f: &Formula| Formula::c(n.clone(), f.clone());
        let d = |f: &Formula| Formula::d(n.clone(), f.clone());
        out.push(("Int_2".into(), imp(&not(&e(&Formula::False)), &s(&Formula::True))));
        for phi in corpus {
            out.push(("T(S_n)".into(), imp(&s(phi), phi)));
            match system {
                AxiomSystem::AxN => {}
                AxiomSystem::AxNC => out.push(("FP".into(), imp(&c(phi), &e(&and(phi, &c(phi)))))),
                AxiomSystem::AxND => {
                    out.push(("Inclusion".into(), imp(&s(phi), &d(phi))));
                    out.push(("T_D".into(), imp(&d(phi), phi)));
                }
            }
            for psi in corpus {
                let step = imp(phi, psi);
                out.push(("K(E_n)".into(), imp(&and(&e(phi), &e(&step)), &e(psi))));
                out.push(("Int_1".into(), imp(&and(&s(phi), &e(&step)), &s(psi))));
                match system {
                    AxiomSystem::AxN => {}
                    AxiomSystem::AxNC => out.push(("K(C_n)".into(), imp(&c(&step), &imp(&c(phi), &c(psi))))),
                    AxiomSystem::AxND => {
                        out.push(("K_D".into(), imp(&and(&d(phi), &d(&step)), &d(psi))));
                        out.push(("Interaction".into(), imp(&and(&d(phi), &e(&step)), &d(psi))));
                    }
                }
            }
        }
    }
    out
}

/// The random model population: `count` models per mode.
struct Population {
    general: Vec<KripkeModel>,
    epistemic: Vec<KripkeModel>,
}

impl Population {
    fn new(config: &SuiteConfig, names: &[Name], props: &[Prop]) -> Self {
        let build = |mode: RandomMode| {
            (0..config.semantic_models)
                .map(|i| {
                    let seed = config.seed.wrapping_add(i as u64);
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_a110);
                    let params = RandomModelParams {
                        states: rng.gen_range(1..=config.max_states.max(1)),
                        agents: rng.gen_range(1..=3),
                        names: names.len(),
                        props: props.len(),
                        edge_density: rng.gen_range(0.15..0.6),
                        naming_density: rng.gen_range(0.2..0.7),
                        mode,
                        seed,
                    };
                    relabel(&random_model(&params), names, props)
                })
                .collect()
        };
        Population {
            general: build(RandomMode::General),
            epistemic: build(RandomMode::Epistemic),
        }
    }

    /// Failing states of `f` per mode.
    fn failures(&self, f: &Formula) -> (usize, usize) {
        let count = |ms: &[KripkeModel]| {
            parallel_sum(ms, |m| {
                let ext = extension(m, f).expect("population covers the corpus signature");
                m.num_states() - ext.count_ones(..)
            })
        };
        (count(&self.general), count(&self.epistemic))
    }
}

fn parallel_sum(ms: &[KripkeModel], f: impl Fn(&KripkeModel) -> usize + Sync) -> usize {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(ms.len().max(1));
    let chunk = ms.len().div_ceil(threads).max(1);
    std::thread::scope(|scope| {
        let handles: Vec<_> = ms
            .chunks(chunk)
            .map(|part| scope.spawn(|| part.iter().map(&f).sum::<usize>()))
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).sum()
    })
}

/// Same frame and valuation with the generated names and propositions
/// replaced, positionally, by the given ones.
fn relabel(m: &KripkeModel, names: &[Name], props: &[Prop]) -> KripkeModel {
    let mut out = KripkeModel::new(m.states().to_vec(), m.agents().to_vec(), names.iter().cloned())
        .expect("ids copied from a valid model");
    for a in 0..m.num_agents() {
        for w in 0..m.num_states() {
            out.set_successors_ix(a, w, m.successors(a, w).clone());
        }
    }
    for w in 0..m.num_states() {
        for n in 0..names.len() {
            for &a in m.named(w, n) {
                out.add_name_ix(w, n, a);
            }
        }
    }
    let generated: Vec<Prop> = m.props().cloned().collect();
    for (old, new) in generated.iter().zip(props) {
        out.set_valuation(new.clone(), m.valuation(old).expect("declared").clone());
    }
    out
}

struct Judge<'a> {
    population: &'a Population,
    sat: SatConfig,
}

impl Judge<'_> {
    /// `(method, decided validity if any, failures per mode)`.
    fn judge(&self, f: &Formula) -> (Method, Option<bool>, usize, usize) {
        let decided = match valid_with(f, &self.sat) {
            Ok(v) => Some(v),
            Err(DecisionError::UnsupportedFragment(_) | DecisionError::BudgetExceeded { .. }) => None,
            Err(e) => panic!("unexpected decision error on {f}: {e}"),
        };
        let (g, e) = self.population.failures(f);
        let method = if decided.is_some() { Method::Valid } else { Method::Semantic };
        (method, decided, g, e)
    }

    fn instance(&self, schema: String, formula: Formula) -> InstanceResult {
        let (method, decided, general_failures, epistemic_failures) = self.judge(&formula);
        InstanceResult {
            holds: decided.unwrap_or(true) && general_failures == 0 && epistemic_failures == 0,
            schema,
            formula,
            method,
            general_failures,
            epistemic_failures,
        }
    }

    fn is_valid(&self, f: &Formula) -> bool {
        let (_, decided, g, e) = self.judge(f);
        decided.unwrap_or(g == 0 && e == 0)
    }

    /// A rule application: whenever the premises are judged valid, the
    /// conclusion must be too.
    fn rule(&self, schema: &str, premises: &[Formula], conclusion: Formula) -> InstanceResult {
        let fired = premises.iter().all(|p| self.is_valid(p));
        let (_, decided, g, e) = self.judge(&conclusion);
        let conclusion_valid = decided.unwrap_or(g == 0 && e == 0);
        InstanceResult {
            schema: schema.to_owned(),
            formula: conclusion,
            method: Method::Rule,
            general_failures: g,
            epistemic_failures: e,
            holds: !fired || conclusion_valid,
        }
    }
}

pub fn axiom_suite(system: AxiomSystem, corpus: &[Formula]) -> AxiomReport {
    axiom_suite_with(system, corpus, &SuiteConfig::default())
}

/// Instantiates and checks every schema of `system`, then spot-tests the
/// rules (Nec(E_n), MP, and for `AxNC` also Nec(C_n) and Ind).
pub fn axiom_suite_with(system: AxiomSystem, corpus: &[Formula], config: &SuiteConfig) -> AxiomReport {
    let names = schema_names(corpus);
    let mut props: BTreeSet<Prop> = corpus.iter().flat_map(Formula::props).collect();
    props.insert(Prop::new("p"));
    let props: Vec<Prop> = props.into_iter().collect();
    let population = Population::new(config, &names, &props);
    let judge = Judge {
        population: &population,
        sat: SatConfig {
            max_variables: config.max_variables,
            ..SatConfig::default()
        },
    };

    let instances: Vec<InstanceResult> = axiom_instances(system, corpus)
        .into_iter()
        .map(|(schema, f)| judge.instance(schema, f))
        .collect();

    // Rules are spot-tested on a sample of decided-valid instances.
    let valid: Vec<&Formula> = instances
        .iter()
        .filter(|r| r.method == Method::Valid && r.holds)
        .map(|r| &r.formula)
        .step_by(instances.len().div_ceil(12).max(1))
        .collect();
    let mut rules = Vec::new();
    for n in &names {
        for &phi in &valid {
            rules.push(judge.rule("Nec(E_n)", std::slice::from_ref(phi), Formula::e(n.clone(), phi.clone())));
            if system == AxiomSystem::AxNC {
                rules.push(judge.rule("Nec(C_n)", std::slice::from_ref(phi), Formula::c(n.clone(), phi.clone())));
            }
        }
        if system == AxiomSystem::AxNC {
            for psi in corpus {
                let c_psi = Formula::c(n.clone(), psi.clone());
                let e_bot = Formula::e(n.clone(), Formula::False);
                for phi in corpus.iter().take(4).chain([&and(&c_psi, psi), &e_bot]) {
                    let premise = imp(phi, &Formula::e(n.clone(), and(phi, psi)));
                    rules.push(judge.rule("Ind", &[premise], imp(phi, &c_psi)));
                }
            }
        }
    }
    for (i, &phi) in valid.iter().enumerate() {
        let psi = corpus[i % corpus.len().max(1)].clone();
        let step = imp(phi, &psi);
        rules.push(judge.rule("MP", &[phi.clone(), step], psi));
    }

    AxiomReport {
        system,
        models_per_mode: config.semantic_models,
        instances,
        rules,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlResult {
    pub name: String,
    #[serde(serialize_with = "as_text")]
    pub formula: Formula,
    /// A pointed model falsifying the formula.
    pub countermodel: Option<(KripkeModel, String)>,
}

/// Introspection and factivity principles that are not theorems, each
/// searched for a countermodel within `bounds`.
pub fn negative_controls(bounds: Bounds) -> Result<Vec<ControlResult>, DecisionError> {
    [
        ("4(S_n)", "S[n] p -> S[n] S[n] p"),
        ("5(S_n)", "!S[n] p -> S[n] !S[n] p"),
        ("T(E_n)", "E[n] p -> p"),
        ("4(E_n)", "E[n] p -> E[n] E[n] p"),
        ("5(E_n)", "!E[n] p -> E[n] !E[n] p"),
    ]
    .into_iter()
    .map(|(name, text)| {
        let formula = parse_formula(text).expect("control formulas parse");
        let countermodel = brute_force_sat(&Formula::not(formula.clone()), bounds)?;
        Ok(ControlResult {
            name: name.to_owned(),
            formula,
            countermodel,
        })
    })
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::check;

    fn corpus(fs: &[&str]) -> Vec<Formula> {
        fs.iter().map(|s| parse_formula(s).unwrap()).collect()
    }

    fn small() -> SuiteConfig {
        SuiteConfig {
            semantic_models: 60,
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn ax_n_over_atoms() {
        let r = axiom_suite_with(AxiomSystem::AxN, &corpus(&["p", "q", "p & q"]), &small());
        assert!(r.all_hold(), "{:?}", r.failures().collect::<Vec<_>>());
        assert!(r.instances.iter().all(|i| i.method == Method::Valid));
        let schemas: BTreeSet<&str> = r.instances.iter().map(|i| i.schema.as_str()).collect();
        for s in ["PL1", "PL2", "PL3", "T(S_n)", "K(E_n)", "Int_1", "Int_2"] {
            assert!(schemas.contains(s), "{s}");
        }
        assert!(r.rules.iter().any(|i| i.schema == "Nec(E_n)"));
    }

    #[test]
    fn ax_nc_and_ax_nd() {
        let c = corpus(&["p", "S[n] q", "!E[n] p"]);
        let r = axiom_suite_with(AxiomSystem::AxNC, &c, &small());
        assert!(r.all_hold(), "{:?}", r.failures().collect::<Vec<_>>());
        assert!(r.rules.iter().any(|i| i.schema == "Ind"));
        let r = axiom_suite_with(AxiomSystem::AxND, &c, &small());
        assert!(r.all_hold(), "{:?}", r.failures().collect::<Vec<_>>());
        assert!(r.instances.iter().any(|i| i.schema == "Inclusion" && i.method == Method::Semantic));
    }

    /// A non-theorem dressed as an instance is caught by both checks.
    #[test]
    fn failures_are_reported() {
        let names = vec![Name::new("n")];
        let props = vec![Prop::new("p")];
        let pop = Population::new(&small(), &names, &props);
        let judge = Judge {
            population: &pop,
            sat: SatConfig::default(),
        };
        let r = judge.instance("bogus".into(), parse_formula("E[n] p -> p").unwrap());
        assert!(!r.holds);
        assert!(r.general_failures > 0);
    }

    #[test]
    fn controls_find_countermodels() {
        for c in negative_controls(Bounds::default()).unwrap() {
            let (m, w) = c.countermodel.unwrap_or_else(|| panic!("{} has no countermodel", c.name));
            assert!(!check(&m, &w, &c.formula).unwrap().value);
        }
    }
}
