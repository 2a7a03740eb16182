//! Closure formulas as an indexed node table, and enumeration of locally
//! coherent atoms over it.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use crate::error::DecisionError;
use crate::syntax::{closure, Formula, Name, Prop};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Node {
    Prop(Prop),
    True,
    False,
    Not(usize),
    And(usize, usize),
    /// `(name index, argument node)`
    E(usize, usize),
    S(usize, usize),
    C(usize, usize),
}

impl Node {
    /// Variables are branched on; the rest follow from their children.
    fn is_variable(&self) -> bool {
        matches!(self, Node::Prop(_) | Node::E(..) | Node::S(..) | Node::C(..))
    }
}

/// Closure formulas, children before parents.
#[derive(Debug, Clone)]
pub(crate) struct Table {
    pub formulas: Vec<Formula>,
    pub nodes: Vec<Node>,
    pub index: HashMap<Formula, usize>,
    pub names: Vec<Name>,
    pub root: usize,
}

impl Table {
    pub fn new(chi: &Formula) -> Result<Self, DecisionError> {
        let cl = closure(chi).map_err(|e| DecisionError::UnsupportedFragment(e.to_string()))?;
        let mut formulas: Vec<Formula> = cl.formulas.into_iter().collect();
        formulas.sort_by_cached_key(|f| f.size());
        let index: HashMap<Formula, usize> =
            formulas.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
        let names: Vec<Name> = cl.names.into_iter().collect();
        let name_ix = |n: &Name| names.binary_search(n).expect("closure name");
        let nodes = formulas
            .iter()
            .map(|f| match f {
                Formula::Atom(p) => Node::Prop(p.clone()),
                Formula::True => Node::True,
                Formula::False => Node::False,
                Formula::Not(g) => Node::Not(index[&**g]),
                Formula::And(l, r) => Node::And(index[&**l], index[&**r]),
                Formula::E(n, g) => Node::E(name_ix(n), index[&**g]),
                Formula::S(n, g) => Node::S(name_ix(n), index[&**g]),
                Formula::C(n, g) => Node::C(name_ix(n), index[&**g]),
                other => unreachable!("desugared closure member {other}"),
            })
            .collect();
        let root = index[&chi.desugar()];
        Ok(Table {
            formulas,
            nodes,
            index,
            names,
            root,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn variables(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_variable()).count()
    }

    fn node_of(&self, f: &Formula) -> Option<usize> {
        self.index.get(f).copied()
    }

    /// Coherence constraints as clauses of `(node, polarity)` literals.
    fn clauses(&self) -> Vec<Vec<(usize, bool)>> {
        let mut out = Vec::new();
        for (n, name) in self.names.iter().enumerate() {
            let e_bot = self.node_of(&Formula::e(name.clone(), Formula::False));
            let s_top = self.node_of(&Formula::s(name.clone(), Formula::True));
            if let (Some(e_bot), Some(s_top)) = (e_bot, s_top) {
                // not E[n] false => S[n] true
                out.push(vec![(e_bot, true), (s_top, true)]);
            }
            let es: Vec<(usize, usize)> = self.with_name(n, |node| match node {
                Node::E(_, g) => Some(*g),
                _ => None,
            });
            let ss: Vec<(usize, usize)> = self.with_name(n, |node| match node {
                Node::S(_, g) => Some(*g),
                _ => None,
            });
            for &(s, arg) in &ss {
                // S[n] f => f
                out.push(vec![(s, false), (arg, true)]);
                for &(e, psi) in &es {
                    // S[n] f & E[n] g => g
                    out.push(vec![(s, false), (e, false), (psi, true)]);
                }
            }
            if let Some(e_bot) = e_bot {
                for &(e, _) in &es {
                    out.push(vec![(e_bot, false), (e, true)]);
                }
                for &(s, _) in &ss {
                    out.push(vec![(e_bot, false), (s, false)]);
                }
            }
            for (c, node) in self.nodes.iter().enumerate() {
                if let Node::C(m, g) = node {
                    if *m != n {
                        continue;
                    }
                    let f = &self.formulas[c];
                    let g_f = &self.formulas[*g];
                    for implied in [Formula::e(name.clone(), g_f.clone()), Formula::e(name.clone(), f.clone())] {
                        let e = self.node_of(&implied).expect("closure adds C unfoldings");
                        out.push(vec![(c, false), (e, true)]);
                    }
                }
            }
        }
        out
    }

    fn with_name(&self, n: usize, arg: impl Fn(&Node) -> Option<usize>) -> Vec<(usize, usize)> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, node)| matches!(node, Node::E(m, _) | Node::S(m, _) if *m == n))
            .filter_map(|(i, node)| arg(node).map(|g| (i, g)))
            .collect()
    }
}

/// All assignments to the closure that respect Boolean structure and the
/// coherence clauses, as membership sets over the table's nodes. Fails if
/// the number of free variables exceeds `max_variables`.
pub(crate) fn enumerate_atoms(table: &Table, max_variables: usize) -> Result<Vec<FixedBitSet>, DecisionError> {
    let vars = table.variables();
    if vars > max_variables {
        return Err(DecisionError::BudgetExceeded {
            what: "closure variables",
            needed: 1u128 << vars.min(127),
            cap: 1u128 << max_variables.min(127),
        });
    }
    // Each clause is checked once its last node is assigned.
    let mut by_trigger: Vec<Vec<Vec<(usize, bool)>>> = vec![Vec::new(); table.len()];
    for clause in table.clauses() {
        let last = clause.iter().map(|l| l.0).max().expect("nonempty clause");
        by_trigger[last].push(clause);
    }
    let mut out = Vec::new();
    let mut cur = FixedBitSet::with_capacity(table.len());
    dfs(table, &by_trigger, 0, &mut cur, &mut out);
    Ok(out)
}

fn dfs(
    table: &Table,
    clauses: &[Vec<Vec<(usize, bool)>>],
    k: usize,
    cur: &mut FixedBitSet,
    out: &mut Vec<FixedBitSet>,
) {
    if k == table.len() {
        out.push(cur.clone());
        return;
    }
    let forced = match table.nodes[k] {
        Node::True => Some(true),
        Node::False => Some(false),
        Node::Not(g) => Some(!cur.contains(g)),
        Node::And(l, r) => Some(cur.contains(l) && cur.contains(r)),
        _ => None,
    };
    let options: &[bool] = match forced {
        Some(true) => &[true],
        Some(false) => &[false],
        None => &[false, true],
    };
    for &v in options {
        cur.set(k, v);
        if clauses[k].iter().all(|c| c.iter().any(|&(n, pol)| cur.contains(n) == pol)) {
            dfs(table, clauses, k + 1, cur, out);
        }
    }
    cur.set(k, false);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn table(s: &str) -> Table {
        Table::new(&parse_formula(s).unwrap()).unwrap()
    }

    #[test]
    fn children_precede_parents() {
        let t = table("C[n] (p & S[n] q)");
        for (i, node) in t.nodes.iter().enumerate() {
            let kids = match node {
                Node::Not(g) | Node::E(_, g) | Node::S(_, g) | Node::C(_, g) => vec![*g],
                Node::And(l, r) => vec![*l, *r],
                _ => vec![],
            };
            assert!(kids.iter().all(|&c| c < i));
        }
    }

    #[test]
    fn propositional_atoms_are_valuations() {
        let t = table("p & !q");
        assert_eq!(enumerate_atoms(&t, 24).unwrap().len(), 4);
    }

    /// Every enumerated atom satisfies each coherence rule, checked here on
    /// the formulas themselves.
    #[test]
    fn atoms_are_coherent() {
        let t = table("S[n] p & E[n] (p -> q) & !C[n] q");
        let atoms = enumerate_atoms(&t, 24).unwrap();
        assert!(!atoms.is_empty());
        let has = |a: &FixedBitSet, f: &Formula| a.contains(t.index[f]);
        let n = Name::new("n");
        for a in &atoms {
            for f in &t.formulas {
                match f {
                    Formula::Not(g) => assert_ne!(has(a, f), has(a, g)),
                    Formula::And(l, r) => assert_eq!(has(a, f), has(a, l) && has(a, r)),
                    Formula::S(_, g) if has(a, f) => {
                        assert!(has(a, g));
                        for e in &t.formulas {
                            if let (Formula::E(_, h), true) = (e, has(a, e)) {
                                assert!(has(a, h));
                            }
                        }
                    }
                    Formula::C(m, g) if has(a, f) => {
                        assert!(has(a, &Formula::E(m.clone(), g.clone())));
                        assert!(has(a, &Formula::e(m.clone(), f.clone())));
                    }
                    _ => {}
                }
            }
            let e_bot = Formula::e(n.clone(), Formula::False);
            if !has(a, &e_bot) {
                assert!(has(a, &Formula::s(n.clone(), Formula::True)));
            } else {
                assert!(t
                    .formulas
                    .iter()
                    .all(|f| !matches!(f, Formula::S(..)) || !has(a, f)));
            }
        }
    }

    #[test]
    fn variable_cap() {
        let t = table("S[n] p & E[n] q");
        assert!(matches!(enumerate_atoms(&t, 2), Err(DecisionError::BudgetExceeded { .. })));
    }
}
