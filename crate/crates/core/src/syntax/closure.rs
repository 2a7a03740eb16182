use std::collections::BTreeSet;

use super::{Formula, Name, Prop};
use crate::error::SyntaxError;

/// Finite, negation-closed and witness-seeded subformula universe of a
/// formula in the `E`/`S`/`C` fragment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Closure {
    pub formulas: BTreeSet<Formula>,
    pub names: BTreeSet<Name>,
    pub props: BTreeSet<Prop>,
}

impl Closure {
    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.formulas.contains(f)
    }
}

/// Smallest set containing `chi` (desugared) that is closed under
/// subformulas, single negation, `E[n] f => S[n] f`,
/// `C[n] f => E[n] f, E[n] C[n] f`, and contains `S[n] true` and
/// `E[n] false` for every name occurring in `chi`.
pub fn closure(chi: &Formula) -> Result<Closure, SyntaxError> {
    let chi = chi.desugar();
    if chi.has_d_or_b() {
        return Err(SyntaxError::UnsupportedModality(chi.to_string()));
    }
    let names = chi.names();
    let mut pending: Vec<Formula> = vec![chi.clone()];
    for n in &names {
        pending.push(Formula::s(n.clone(), Formula::True));
        pending.push(Formula::e(n.clone(), Formula::False));
    }
    let mut formulas = BTreeSet::new();
    while let Some(f) = pending.pop() {
        if formulas.contains(&f) {
            continue;
        }
        pending.extend(f.children().into_iter().cloned());
        match &f {
            Formula::Not(_) => {}
            other => pending.push(Formula::not(other.clone())),
        }
        match &f {
            Formula::E(n, g) => pending.push(Formula::S(n.clone(), g.clone())),
            Formula::C(n, g) => {
                pending.push(Formula::E(n.clone(), g.clone()));
                pending.push(Formula::e(n.clone(), f.clone()));
            }
            _ => {}
        }
        formulas.insert(f);
    }
    Ok(Closure {
        formulas,
        names,
        props: chi.props(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn set(items: &[&str]) -> BTreeSet<Formula> {
        items.iter().map(|s| parse_formula(s).unwrap()).collect()
    }

    #[test]
    fn atom_has_no_modal_seeds() {
        let cl = closure(&Formula::atom("p")).unwrap();
        assert_eq!(cl.formulas, set(&["p", "!p"]));
    }

    #[test]
    fn rejects_distributed_and_belief() {
        assert!(closure(&parse_formula("D[n] p").unwrap()).is_err());
        assert!(closure(&parse_formula("p & B[a;n] p").unwrap()).is_err());
    }

    #[test]
    fn common_knowledge_rules() {
        let cl = closure(&parse_formula("C[n] p").unwrap()).unwrap();
        for f in [
            "E[n] p",
            "S[n] p",
            "E[n] C[n] p",
            "S[n] C[n] p",
            "!E[n] C[n] p",
            "!C[n] p",
        ] {
            assert!(cl.contains(&parse_formula(f).unwrap()), "{f}");
        }
    }

    #[test]
    fn members_are_negations_or_have_their_negation() {
        let cl = closure(&parse_formula("C[n] (p | S[m] q) -> E[m] r").unwrap()).unwrap();
        for f in &cl.formulas {
            if !matches!(f, Formula::Not(_)) {
                assert!(cl.contains(&Formula::not(f.clone())));
            }
        }
    }
}
