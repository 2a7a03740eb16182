//! Candidate canonical models over surviving atoms, and elimination.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use super::atoms::{Node, Table};
use crate::kripke::{generated_submodel, KripkeModel};

/// Agents of one candidate model, indexed over surviving positions.
pub(crate) struct Candidate {
    /// Distinct agent extensions, as sets of survivor positions.
    pub exts: Vec<FixedBitSet>,
    /// `(witness node, survivor position, name)` of the first `S` formula
    /// that produced each agent.
    pub labels: Vec<(usize, usize, usize)>,
    /// `named[name][pos]`: agents named `name` at `pos`.
    pub named: Vec<Vec<Vec<usize>>>,
}

/// Truth sets of every node over the survivors, by membership.
fn membership(table: &Table, atoms: &[FixedBitSet], alive: &[usize]) -> Vec<FixedBitSet> {
    let mut truth = vec![FixedBitSet::with_capacity(alive.len()); table.len()];
    for (pos, &a) in alive.iter().enumerate() {
        for node in atoms[a].ones() {
            truth[node].insert(pos);
        }
    }
    truth
}

/// For each survivor `w` and `S[n] f` in `w`, an agent whose extension is
/// the survivors containing `f` and every `g` with `E[n] g` in `w`; it is
/// named `n` at `w` and sees its whole extension from each member.
pub(crate) fn candidate(table: &Table, atoms: &[FixedBitSet], alive: &[usize], truth: &[FixedBitSet]) -> Candidate {
    let mut by_ext: HashMap<FixedBitSet, usize> = HashMap::new();
    let mut exts = Vec::new();
    let mut labels = Vec::new();
    let mut named = vec![vec![Vec::new(); alive.len()]; table.names.len()];
    for (pos, &a) in alive.iter().enumerate() {
        let atom = &atoms[a];
        for s in atom.ones() {
            let Node::S(n, f) = table.nodes[s] else { continue };
            let mut ext = truth[f].clone();
            for e in atom.ones() {
                if let Node::E(m, g) = table.nodes[e] {
                    if m == n {
                        ext.intersect_with(&truth[g]);
                    }
                }
            }
            assert!(ext.contains(pos), "witness agent must see its own world");
            let id = *by_ext.entry(ext.clone()).or_insert_with(|| {
                exts.push(ext);
                labels.push((s, pos, n));
                exts.len() - 1
            });
            if !named[n][pos].contains(&id) {
                named[n][pos].push(id);
            }
        }
    }
    Candidate { exts, labels, named }
}

/// Survivor positions whose modal memberships disagree with their truth in
/// the candidate model, given membership of the arguments.
pub(crate) fn refuted(table: &Table, atoms: &[FixedBitSet], alive: &[usize], truth: &[FixedBitSet], cand: &Candidate) -> Vec<usize> {
    let k = alive.len();
    // One R_n step from each position, and the states reachable in one or more.
    let mut reach: Vec<Vec<FixedBitSet>> = Vec::with_capacity(table.names.len());
    for n in 0..table.names.len() {
        let step: Vec<FixedBitSet> = (0..k)
            .map(|x| {
                let mut s = FixedBitSet::with_capacity(k);
                for &a in &cand.named[n][x] {
                    s.union_with(&cand.exts[a]);
                }
                s
            })
            .collect();
        let needed = table.nodes.iter().any(|node| matches!(node, Node::C(m, _) if *m == n));
        reach.push(if needed { (0..k).map(|x| closure_from(&step, x)).collect() } else { Vec::new() });
    }
    let mut out = Vec::new();
    for (pos, &a) in alive.iter().enumerate() {
        let atom = &atoms[a];
        let bad = table.nodes.iter().enumerate().any(|(i, node)| {
            let sem = match *node {
                Node::E(n, g) => cand.named[n][pos].iter().all(|&b| cand.exts[b].is_subset(&truth[g])),
                Node::S(n, g) => cand.named[n][pos].iter().any(|&b| cand.exts[b].is_subset(&truth[g])),
                Node::C(n, g) => reach[n][pos].is_subset(&truth[g]),
                _ => return false,
            };
            sem != atom.contains(i)
        });
        if bad {
            out.push(pos);
        }
    }
    out
}

fn closure_from(step: &[FixedBitSet], x: usize) -> FixedBitSet {
    let mut seen = step[x].clone();
    let mut frontier: Vec<usize> = seen.ones().collect();
    while let Some(y) = frontier.pop() {
        for z in step[y].ones() {
            if !seen.put(z) {
                frontier.push(z);
            }
        }
    }
    seen
}

/// Kripke model of a candidate: one state `w<i>` per surviving atom `i`,
/// one agent per distinct extension, restricted to what `point` reaches.
pub(crate) fn to_kripke(table: &Table, atoms: &[FixedBitSet], alive: &[usize], cand: &Candidate, point: usize) -> KripkeModel {
    let state = |pos: usize| format!("w{}", alive[pos]);
    let agents = cand
        .labels
        .iter()
        .map(|&(s, pos, n)| {
            let Node::S(_, f) = table.nodes[s] else { unreachable!() };
            format!("a[{}@{}:{}]", table.formulas[f], state(pos), table.names[n])
        });
    let mut m = KripkeModel::new((0..alive.len()).map(state), agents, table.names.iter().cloned())
        .expect("distinct generated ids");
    for (b, ext) in cand.exts.iter().enumerate() {
        for w in ext.ones() {
            let mut succ = m.empty_set();
            succ.extend(ext.ones());
            m.set_successors_ix(b, w, succ);
        }
    }
    for (n, by_pos) in cand.named.iter().enumerate() {
        for (pos, group) in by_pos.iter().enumerate() {
            for &b in group {
                m.add_name_ix(pos, n, b);
            }
        }
    }
    for (i, node) in table.nodes.iter().enumerate() {
        if let Node::Prop(p) = node {
            m.declare_prop(p.clone());
            for (pos, &a) in alive.iter().enumerate() {
                if atoms[a].contains(i) {
                    m.set_true_ix(p.clone(), pos);
                }
            }
        }
    }
    generated_submodel(&m, point)
}

/// Repeats candidate construction and refutation until nothing is
/// refuted. Returns the survivors (atom indices), the final candidate and
/// the number of construction passes.
pub(crate) fn eliminate(table: &Table, atoms: &[FixedBitSet]) -> (Vec<usize>, Candidate, usize) {
    let mut alive: Vec<usize> = (0..atoms.len()).collect();
    let mut rounds = 0;
    loop {
        let truth = membership(table, atoms, &alive);
        let cand = candidate(table, atoms, &alive, &truth);
        if alive.is_empty() {
            return (alive, cand, rounds);
        }
        rounds += 1;
        let bad = refuted(table, atoms, &alive, &truth, &cand);
        if bad.is_empty() {
            return (alive, cand, rounds);
        }
        let mut drop = FixedBitSet::with_capacity(alive.len());
        drop.extend(bad);
        alive = alive
            .iter()
            .enumerate()
            .filter(|(pos, _)| !drop.contains(*pos))
            .map(|(_, &a)| a)
            .collect();
    }
}
