//! Bounded model search. Every frame up to the bounds that is reflexive
//! wherever an agent is named is enumerated (up to renaming of agents the
//! query does not mention), and the query is evaluated under all
//! valuations at once: each truth value is a bit vector with one lane per
//! valuation.
//!
//! The evaluator here is self-contained so that it can cross-check both
//! the model checker and the decision procedure.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::DecisionError;
use crate::kripke::{check, KripkeModel};
use crate::syntax::{AgentId, Formula, Name, Prop};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub max_states: usize,
    pub max_agents: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_states: 3,
            max_agents: 2,
        }
    }
}

/// Default cap on `frames * valuation words` over all state counts.
pub const DEFAULT_ORACLE_BUDGET: u128 = 1 << 28;

/// Largest `props * states` product (valuation lanes are `2^product`).
const MAX_LANE_BITS: usize = 18;

#[derive(Debug, Clone, Copy)]
enum Op {
    Prop(usize),
    True,
    False,
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Iff(usize, usize),
    E(usize, usize),
    S(usize, usize),
    C(usize, usize),
    D(usize, usize),
    /// `(fixed agent, name, argument)`
    B(usize, usize, usize),
}

struct Program {
    ops: Vec<Op>,
    root: usize,
    props: Vec<Prop>,
    names: Vec<Name>,
    agents: Vec<AgentId>,
}

impl Program {
    fn compile(f: &Formula) -> Self {
        let props: Vec<Prop> = f.props().into_iter().collect();
        let names: Vec<Name> = f.names().into_iter().collect();
        let agents: Vec<AgentId> = f.agents().into_iter().collect();
        let mut p = Program {
            ops: Vec::new(),
            root: 0,
            props,
            names,
            agents,
        };
        let mut memo = HashMap::new();
        p.root = p.node(f, &mut memo);
        p
    }

    fn node(&mut self, f: &Formula, memo: &mut HashMap<Formula, usize>) -> usize {
        if let Some(&i) = memo.get(f) {
            return i;
        }
        let name = |p: &Program, n: &Name| p.names.binary_search(n).expect("collected name");
        let op = match f {
            Formula::Atom(q) => Op::Prop(self.props.binary_search(q).expect("collected prop")),
            Formula::True => Op::True,
            Formula::False => Op::False,
            Formula::Not(g) => Op::Not(self.node(g, memo)),
            Formula::And(l, r) => Op::And(self.node(l, memo), self.node(r, memo)),
            Formula::Or(l, r) => Op::Or(self.node(l, memo), self.node(r, memo)),
            Formula::Implies(l, r) => Op::Implies(self.node(l, memo), self.node(r, memo)),
            Formula::Iff(l, r) => Op::Iff(self.node(l, memo), self.node(r, memo)),
            Formula::E(n, g) => Op::E(name(self, n), self.node(g, memo)),
            Formula::S(n, g) => Op::S(name(self, n), self.node(g, memo)),
            Formula::C(n, g) => Op::C(name(self, n), self.node(g, memo)),
            Formula::D(n, g) => Op::D(name(self, n), self.node(g, memo)),
            Formula::B(i, n, g) => Op::B(
                self.agents.binary_search(i).expect("collected agent"),
                name(self, n),
                self.node(g, memo),
            ),
        };
        self.ops.push(op);
        memo.insert(f.clone(), self.ops.len() - 1);
        self.ops.len() - 1
    }
}

/// `(names mask, successor mask)` of one agent at one state.
type Choice = (u32, u32);

/// Options for an agent at state `w` of a `k`-state frame: unnamed with no
/// successors (any successors if `free_unnamed`), or some nonempty set of
/// names with successors including `w`.
fn choices(k: usize, names: usize, w: usize, free_unnamed: bool) -> Vec<Choice> {
    let mut out = Vec::new();
    if free_unnamed {
        out.extend((0..1u32 << k).map(|s| (0, s)));
    } else {
        out.push((0, 0));
    }
    for nm in 1..1u32 << names {
        for s in 0..1u32 << k {
            if s >> w & 1 == 1 {
                out.push((nm, s));
            }
        }
    }
    out
}

/// Every per-state choice vector for one agent, indexed by code.
fn configs(k: usize, names: usize, free_unnamed: bool) -> Vec<Vec<Choice>> {
    let per_state: Vec<Vec<Choice>> = (0..k).map(|w| choices(k, names, w, free_unnamed)).collect();
    let mut out = vec![Vec::new()];
    for opts in &per_state {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                opts.iter().map(move |&c| {
                    let mut v = prefix.clone();
                    v.push(c);
                    v
                })
            })
            .collect();
    }
    out
}

fn multichoose(n: u128, k: u128) -> u128 {
    // C(n + k - 1, k), saturating
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n + i) / (i + 1);
    }
    acc
}

struct Search<'p> {
    prog: &'p Program,
    k: usize,
    words: usize,
    last_mask: u64,
    /// Lane patterns of `props[p]` at state `w`: `pattern[p * k + w]`.
    pattern: Vec<Vec<u64>>,
    vals: Vec<u64>,
}

impl<'p> Search<'p> {
    fn new(prog: &'p Program, k: usize) -> Self {
        let bits = prog.props.len() * k;
        let lanes = 1usize << bits;
        let words = lanes.div_ceil(64);
        let last_mask = if lanes >= 64 { u64::MAX } else { (1u64 << lanes) - 1 };
        let pattern = (0..bits)
            .map(|bit| {
                (0..words)
                    .map(|j| {
                        (0..64)
                            .filter(|b| ((64 * j + b) >> bit) & 1 == 1)
                            .fold(0u64, |acc, b| acc | 1 << b)
                    })
                    .collect()
            })
            .collect();
        Search {
            prog,
            k,
            words,
            last_mask,
            pattern,
            vals: vec![0; prog.ops.len() * k * words],
        }
    }

    fn at(&self, op: usize, w: usize) -> &[u64] {
        let start = (op * self.k + w) * self.words;
        &self.vals[start..start + self.words]
    }

    /// Lanes where `op` holds at every state of `set`.
    fn all_of(&self, op: usize, set: u32, out: &mut [u64]) {
        out.fill(u64::MAX);
        for v in 0..self.k {
            if set >> v & 1 == 1 {
                for (o, x) in out.iter_mut().zip(self.at(op, v)) {
                    *o &= x;
                }
            }
        }
    }

    /// Evaluates the program on one frame; returns `(state, lane)` of a
    /// satisfying valuation, if any.
    fn run(&mut self, frame: &[&Vec<Choice>]) -> Option<(usize, usize)> {
        let (k, names, words) = (self.k, self.prog.names.len(), self.words);
        // named[n][w]: successor masks of agents named n at w
        let mut named: Vec<Vec<Vec<u32>>> = vec![vec![Vec::new(); k]; names];
        for agent in frame {
            for (w, &(nm, succ)) in agent.iter().enumerate() {
                for (n, by_state) in named.iter_mut().enumerate() {
                    if nm >> n & 1 == 1 {
                        by_state[w].push(succ);
                    }
                }
            }
        }
        let union = |n: usize, w: usize| named[n][w].iter().fold(0u32, |acc, s| acc | s);
        let step: Vec<Vec<u32>> = (0..names).map(|n| (0..k).map(|w| union(n, w)).collect()).collect();
        let reach: Vec<Vec<u32>> = step
            .iter()
            .map(|st| {
                (0..k)
                    .map(|w| {
                        let mut seen = st[w];
                        loop {
                            let next = (0..k)
                                .filter(|v| seen >> v & 1 == 1)
                                .fold(seen, |acc, v| acc | st[v]);
                            if next == seen {
                                break seen;
                            }
                            seen = next;
                        }
                    })
                    .collect()
            })
            .collect();

        let mut tmp = vec![0u64; words];
        let mut acc = vec![0u64; words];
        for i in 0..self.prog.ops.len() {
            for w in 0..k {
                match self.prog.ops[i] {
                    Op::Prop(p) => acc.copy_from_slice(&self.pattern[p * k + w]),
                    Op::True => acc.fill(u64::MAX),
                    Op::False => acc.fill(0),
                    Op::Not(a) => {
                        for (o, x) in acc.iter_mut().zip(self.at(a, w)) {
                            *o = !x;
                        }
                    }
                    Op::And(a, b) | Op::Or(a, b) | Op::Implies(a, b) | Op::Iff(a, b) => {
                        let op = self.prog.ops[i];
                        for ((o, x), y) in acc.iter_mut().zip(self.at(a, w)).zip(self.at(b, w)) {
                            *o = match op {
                                Op::And(..) => x & y,
                                Op::Or(..) => x | y,
                                Op::Implies(..) => !x | y,
                                _ => !(x ^ y),
                            };
                        }
                    }
                    Op::E(n, a) => self.all_of(a, step[n][w], &mut acc),
                    Op::C(n, a) => self.all_of(a, reach[n][w], &mut acc),
                    Op::S(n, a) => {
                        acc.fill(0);
                        for &succ in &named[n][w] {
                            self.all_of(a, succ, &mut tmp);
                            for (o, x) in acc.iter_mut().zip(&tmp) {
                                *o |= x;
                            }
                        }
                    }
                    Op::D(n, a) => {
                        if named[n][w].is_empty() {
                            acc.fill(0);
                        } else {
                            let pooled = named[n][w].iter().fold(u32::MAX, |acc, s| acc & s);
                            self.all_of(a, pooled, &mut acc);
                        }
                    }
                    Op::B(agent, n, a) => {
                        let choice = &frame[agent];
                        let set = (0..k)
                            .filter(|&v| choice[w].1 >> v & 1 == 1 && choice[v].0 >> n & 1 == 1)
                            .fold(0u32, |acc, v| acc | 1 << v);
                        self.all_of(a, set, &mut acc);
                    }
                }
                let start = (i * k + w) * words;
                self.vals[start..start + words].copy_from_slice(&acc);
            }
        }
        for w in 0..k {
            let root = self.at(self.prog.root, w);
            for (j, &x) in root.iter().enumerate() {
                let x = if j + 1 == words { x & self.last_mask } else { x };
                if x != 0 {
                    return Some((w, 64 * j + x.trailing_zeros() as usize));
                }
            }
        }
        None
    }
}

pub fn brute_force_sat(chi: &Formula, bounds: Bounds) -> Result<Option<(KripkeModel, String)>, DecisionError> {
    brute_force_sat_with_budget(chi, bounds, DEFAULT_ORACLE_BUDGET)
}

/// Searches every model with at most `bounds.max_states` states and
/// `bounds.max_agents` agents (plus any agent the query names) for a state
/// satisfying `chi`. `None` is no evidence of unsatisfiability beyond the
/// bounds.
pub fn brute_force_sat_with_budget(
    chi: &Formula,
    bounds: Bounds,
    budget: u128,
) -> Result<Option<(KripkeModel, String)>, DecisionError> {
    let prog = Program::compile(chi);
    let fixed = prog.agents.len();
    let generic = bounds.max_agents.saturating_sub(fixed);
    let names = prog.names.len();

    let mut cost: u128 = 0;
    for k in 1..=bounds.max_states {
        let bits = prog.props.len() * k;
        if bits > MAX_LANE_BITS {
            return Err(DecisionError::BudgetExceeded {
                what: "oracle valuations",
                needed: 1u128 << bits,
                cap: 1u128 << MAX_LANE_BITS,
            });
        }
        let per_generic = (1 + ((1u128 << names) - 1) * (1u128 << (k - 1))).pow(k as u32);
        let per_fixed = ((1u128 << k) + ((1u128 << names) - 1) * (1u128 << (k - 1))).pow(k as u32);
        let frames = per_fixed.saturating_pow(fixed as u32).saturating_mul(multichoose(per_generic, generic as u128));
        let words = (1u128 << bits).div_ceil(64);
        cost = cost.saturating_add(frames.saturating_mul(words));
    }
    if cost > budget {
        return Err(DecisionError::BudgetExceeded {
            what: "oracle frames",
            needed: cost,
            cap: budget,
        });
    }

    for k in 1..=bounds.max_states {
        let generic_cfgs = configs(k, names, false);
        let fixed_cfgs = if fixed > 0 { configs(k, names, true) } else { Vec::new() };
        let mut search = Search::new(&prog, k);
        let mut frame: Vec<&Vec<Choice>> = Vec::with_capacity(fixed + generic);
        if let Some((w, lane, chosen)) =
            enumerate(&mut search, &fixed_cfgs, &generic_cfgs, fixed, generic, &mut frame)
        {
            let (model, state) = build(&prog, k, &chosen, w, lane);
            let verified = check(&model, &state, chi).map(|r| r.value);
            assert!(matches!(verified, Ok(true)), "oracle model must satisfy {chi} at {state}");
            return Ok(Some((model, state)));
        }
    }
    Ok(None)
}

type Found = (usize, usize, Vec<Vec<Choice>>);

fn enumerate<'c>(
    search: &mut Search,
    fixed_cfgs: &'c [Vec<Choice>],
    generic_cfgs: &'c [Vec<Choice>],
    fixed: usize,
    generic: usize,
    frame: &mut Vec<&'c Vec<Choice>>,
) -> Option<Found> {
    let j = frame.len();
    if j == fixed + generic {
        return search
            .run(frame)
            .map(|(w, lane)| (w, lane, frame.iter().map(|c| (*c).clone()).collect()));
    }
    if j < fixed {
        for cfg in fixed_cfgs {
            frame.push(cfg);
            let found = enumerate(search, fixed_cfgs, generic_cfgs, fixed, generic, frame);
            frame.pop();
            if found.is_some() {
                return found;
            }
        }
        return None;
    }
    // generic agents are interchangeable: non-decreasing codes only
    let start = if j > fixed {
        let prev = frame[j - 1];
        generic_cfgs.iter().position(|c| std::ptr::eq(c, prev)).expect("own config")
    } else {
        0
    };
    for cfg in &generic_cfgs[start..] {
        frame.push(cfg);
        let found = enumerate(search, fixed_cfgs, generic_cfgs, fixed, generic, frame);
        frame.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

fn build(prog: &Program, k: usize, frame: &[Vec<Choice>], w: usize, lane: usize) -> (KripkeModel, String) {
    let fixed: BTreeSet<&str> = prog.agents.iter().map(AgentId::as_str).collect();
    let mut agents: Vec<String> = prog.agents.iter().map(|a| a.to_string()).collect();
    let mut i = 0;
    while agents.len() < frame.len() {
        let id = format!("a{i}");
        if !fixed.contains(id.as_str()) {
            agents.push(id);
        }
        i += 1;
    }
    let mut m = KripkeModel::new((0..k).map(|s| format!("s{s}")), agents, prog.names.iter().cloned())
        .expect("distinct generated ids");
    for (a, cfg) in frame.iter().enumerate() {
        for (x, &(nm, succ)) in cfg.iter().enumerate() {
            for v in 0..k {
                if succ >> v & 1 == 1 {
                    m.add_edge_ix(a, x, v);
                }
            }
            for n in 0..prog.names.len() {
                if nm >> n & 1 == 1 {
                    m.add_name_ix(x, n, a);
                }
            }
        }
    }
    for (p, prop) in prog.props.iter().enumerate() {
        m.declare_prop(prop.clone());
        for x in 0..k {
            if lane >> (p * k + x) & 1 == 1 {
                m.set_true_ix(prop.clone(), x);
            }
        }
    }
    (m, format!("s{w}"))
}
