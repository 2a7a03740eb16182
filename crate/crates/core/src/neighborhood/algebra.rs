use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::NeighborhoodModel;
use crate::kripke::StateSet;

/// Frames up to this many states have every pair of subsets checked;
/// larger ones are sampled.
pub const EXHAUSTIVE_STATE_CAP: usize = 12;

const SAMPLED_PAIRS: usize = 1000;
const SAMPLE_SEED: u64 = 0;

/// Powerset algebra of a neighborhood frame with the operators
/// `E_n(X) = {w : every Y in nu_n(w) is inside X}` and
/// `S_n(X) = {w : some Y in nu_n(w) is inside X}`.
#[derive(Debug, Clone, Copy)]
pub struct ComplexAlgebra<'a> {
    model: &'a NeighborhoodModel,
}

pub fn complex_algebra(m: &NeighborhoodModel) -> ComplexAlgebra<'_> {
    ComplexAlgebra { model: m }
}

impl ComplexAlgebra<'_> {
    pub fn model(&self) -> &NeighborhoodModel {
        self.model
    }

    pub fn everyone(&self, name: usize, x: &StateSet) -> StateSet {
        let m = self.model;
        let mut out = m.empty_set();
        out.extend((0..m.num_states()).filter(|&w| m.neighborhoods(w, name).iter().all(|y| y.is_subset(x))));
        out
    }

    pub fn someone(&self, name: usize, x: &StateSet) -> StateSet {
        let m = self.model;
        let mut out = m.empty_set();
        out.extend((0..m.num_states()).filter(|&w| m.neighborhoods(w, name).iter().any(|y| y.is_subset(x))));
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    /// `E_n T = T`
    EveryoneTop,
    /// `E_n(a & b) = E_n a & E_n b`
    EveryoneMeet,
    /// `S_n a & E_n b <= S_n(a & b)`
    SomeoneEveryone,
    /// `!E_n F = S_n T`
    NotEveryoneBottom,
}

impl Equation {
    pub fn text(self) -> &'static str {
        match self {
            Equation::EveryoneTop => "E_n T = T",
            Equation::EveryoneMeet => "E_n(a & b) = E_n a & E_n b",
            Equation::SomeoneEveryone => "S_n a & E_n b <= S_n(a & b)",
            Equation::NotEveryoneBottom => "!E_n F = S_n T",
        }
    }
}

/// A failed equation for one name, with the first offending arguments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlgebraDiagnostic {
    pub equation: Equation,
    pub name: String,
    /// Arguments `a`, `b` of the first failure (empty for constant equations).
    pub a: Vec<String>,
    pub b: Vec<String>,
    /// States where the two sides disagree for those arguments.
    pub states: Vec<String>,
    /// Number of failing argument pairs among those checked.
    pub failures: u64,
    /// Set when the failure is the known empty-neighborhood case of
    /// `!E_n F = S_n T` rather than an unexpected one.
    pub caveat: bool,
}

/// Checks the four equations for every name: on all pairs of subsets when
/// the frame has at most [`EXHAUSTIVE_STATE_CAP`] states, otherwise on a
/// seeded sample of pairs. Empty iff every checked instance holds.
pub fn verify_algebra_equations(m: &NeighborhoodModel) -> Vec<AlgebraDiagnostic> {
    let alg = complex_algebra(m);
    let mut out = Vec::new();
    for (n, name) in m.names().iter().enumerate() {
        let diag = |equation, a: &StateSet, b: &StateSet, bad: &StateSet, failures| AlgebraDiagnostic {
            equation,
            name: name.to_string(),
            a: m.ids(a),
            b: m.ids(b),
            states: m.ids(bad),
            failures,
            caveat: false,
        };
        let (full, empty) = (m.full_set(), m.empty_set());

        let top = alg.everyone(n, &full);
        if top != full {
            let mut bad = top;
            bad.toggle_range(..);
            out.push(diag(Equation::EveryoneTop, &empty, &empty, &bad, 1));
        }

        let mut not_e_bot = alg.everyone(n, &empty);
        not_e_bot.toggle_range(..);
        let s_top = alg.someone(n, &full);
        if not_e_bot != s_top {
            let mut bad = not_e_bot;
            bad.symmetric_difference_with(&s_top);
            let mut d = diag(Equation::NotEveryoneBottom, &empty, &empty, &bad, 1);
            d.caveat = bad
                .ones()
                .all(|w| m.neighborhoods(w, n).iter().any(|y| y.is_clear()));
            out.push(d);
        }

        if m.num_states() <= EXHAUSTIVE_STATE_CAP {
            out.extend(exhaustive_pairs(m, n, &diag));
        } else {
            out.extend(sampled_pairs(m, n, &diag));
        }
    }
    out
}

type Diag<'a> = dyn Fn(Equation, &StateSet, &StateSet, &StateSet, u64) -> AlgebraDiagnostic + 'a;

fn to_set(m: &NeighborhoodModel, mask: u64) -> StateSet {
    let mut s = m.empty_set();
    s.extend((0..m.num_states()).filter(|w| mask >> w & 1 == 1));
    s
}

fn to_mask(s: &StateSet) -> u64 {
    s.ones().fold(0, |acc, w| acc | 1 << w)
}

/// Pairwise equations over all subsets, with `E_n`/`S_n` tabulated once per
/// subset as bitmasks.
fn exhaustive_pairs(m: &NeighborhoodModel, n: usize, diag: &Diag) -> Vec<AlgebraDiagnostic> {
    let k = m.num_states();
    let nbhd: Vec<Vec<u64>> = (0..k)
        .map(|w| m.neighborhoods(w, n).iter().map(to_mask).collect())
        .collect();
    let size = 1usize << k;
    let mut e = vec![0u64; size];
    let mut s = vec![0u64; size];
    for x in 0..size as u64 {
        for (w, ys) in nbhd.iter().enumerate() {
            if ys.iter().all(|&y| y & !x == 0) {
                e[x as usize] |= 1 << w;
            }
            if ys.iter().any(|&y| y & !x == 0) {
                s[x as usize] |= 1 << w;
            }
        }
    }
    let mut meet: Option<(u64, u64, u64)> = None;
    let mut mixed: Option<(u64, u64, u64)> = None;
    let (mut meet_n, mut mixed_n) = (0u64, 0u64);
    for a in 0..size {
        for b in 0..size {
            let ab = a & b;
            let bad = e[ab] ^ (e[a] & e[b]);
            if bad != 0 {
                meet_n += 1;
                meet.get_or_insert((a as u64, b as u64, bad));
            }
            let bad = s[a] & e[b] & !s[ab];
            if bad != 0 {
                mixed_n += 1;
                mixed.get_or_insert((a as u64, b as u64, bad));
            }
        }
    }
    let mut out = Vec::new();
    for (eq, first, count) in [
        (Equation::EveryoneMeet, meet, meet_n),
        (Equation::SomeoneEveryone, mixed, mixed_n),
    ] {
        if let Some((a, b, bad)) = first {
            out.push(diag(eq, &to_set(m, a), &to_set(m, b), &to_set(m, bad), count));
        }
    }
    out
}

fn sampled_pairs(m: &NeighborhoodModel, n: usize, diag: &Diag) -> Vec<AlgebraDiagnostic> {
    let alg = complex_algebra(m);
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let mut random_set = || {
        let mut x = m.empty_set();
        x.extend((0..m.num_states()).filter(|_| rng.gen_bool(0.5)));
        x
    };
    let mut meet: Option<AlgebraDiagnostic> = None;
    let mut mixed: Option<AlgebraDiagnostic> = None;
    for _ in 0..SAMPLED_PAIRS {
        let (a, b) = (random_set(), random_set());
        let mut ab = a.clone();
        ab.intersect_with(&b);
        let (ea, eb, eab) = (alg.everyone(n, &a), alg.everyone(n, &b), alg.everyone(n, &ab));

        let mut rhs = ea.clone();
        rhs.intersect_with(&eb);
        let mut bad = eab.clone();
        bad.symmetric_difference_with(&rhs);
        if !bad.is_clear() {
            meet.get_or_insert_with(|| diag(Equation::EveryoneMeet, &a, &b, &bad, 0)).failures += 1;
        }

        let mut bad = alg.someone(n, &a);
        bad.intersect_with(&eb);
        bad.difference_with(&alg.someone(n, &ab));
        if !bad.is_clear() {
            mixed.get_or_insert_with(|| diag(Equation::SomeoneEveryone, &a, &b, &bad, 0)).failures += 1;
        }
    }
    meet.into_iter().chain(mixed).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::fixtures::figure1;
    use crate::neighborhood::kripke_to_nbhd;
    use crate::syntax::Prop;

    #[test]
    fn operators_on_figure1() {
        let nb = kripke_to_nbhd(&figure1());
        let alg = complex_algebra(&nb);
        let p = nb.valuation(&Prop::new("p")).unwrap();
        assert_eq!(nb.ids(&alg.someone(0, p)), ["w", "v"]);
        assert_eq!(alg.everyone(0, &nb.full_set()), nb.full_set());
        assert!(alg.someone(0, &nb.empty_set()).is_clear());
        assert!(verify_algebra_equations(&nb).is_empty());
    }

    /// The operators against their defining clauses, written with the
    /// string-level API.
    #[test]
    fn operators_match_clauses() {
        let nb = kripke_to_nbhd(&figure1());
        let alg = complex_algebra(&nb);
        for mask in 0u64..16 {
            let x = to_set(&nb, mask);
            for name in 0..2 {
                for w in 0..4 {
                    let fam = nb.neighborhoods(w, name);
                    let inside = |y: &StateSet| y.ones().all(|v| mask >> v & 1 == 1);
                    assert_eq!(alg.everyone(name, &x).contains(w), fam.iter().all(inside));
                    assert_eq!(alg.someone(name, &x).contains(w), fam.iter().any(inside));
                }
            }
        }
    }

    #[test]
    fn empty_neighborhood_is_a_caveat() {
        let mut nb = NeighborhoodModel::new(["w", "v"], ["n"]).unwrap();
        nb.add_neighborhood("w", "n", &[]).unwrap();
        let d = verify_algebra_equations(&nb);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].equation, Equation::NotEveryoneBottom);
        assert_eq!(d[0].states, ["w"]);
        assert!(d[0].caveat);
    }

    #[test]
    fn sampled_mode_on_large_frame() {
        let states: Vec<String> = (0..14).map(|i| format!("s{i}")).collect();
        let mut nb = NeighborhoodModel::new(states.clone(), ["n"]).unwrap();
        for (i, s) in states.iter().enumerate() {
            let next = &states[(i + 1) % states.len()];
            nb.add_neighborhood(s, "n", &[s.as_str(), next.as_str()]).unwrap();
            nb.add_neighborhood(s, "n", &[s.as_str()]).unwrap();
        }
        assert!(verify_algebra_equations(&nb).is_empty());
    }
}
