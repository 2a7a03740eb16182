//! Formulas of epistemic logic with names, with common knowledge (`C`),
//! distributed knowledge (`D`) and the relativised belief operator `B`.

mod closure;
mod parser;
mod printer;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use closure::{closure, Closure};
pub use parser::{parse_formula, ParseError};

macro_rules! identifier {
    ($(#[$meta:meta])* $ty:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $ty(String);

        impl $ty {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $ty {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl From<String> for $ty {
            fn from(s: String) -> Self {
                Self(s)
            }
        }
    };
}

identifier!(
    /// An intensional group label. Its extension (the agents bearing it)
    /// varies from state to state.
    Name
);
identifier!(
    /// An agent identifier, used only by the `B[agent;name]` operator.
    AgentId
);
identifier!(
    /// An atomic proposition.
    Prop
);

/// Formula AST. `Or`, `Implies` and `Iff` are surface sugar; see
/// [`Formula::desugar`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(Prop),
    True,
    False,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    /// Everyone named `n` knows.
    E(Name, Box<Formula>),
    /// Someone named `n` knows.
    S(Name, Box<Formula>),
    /// Common knowledge among those named `n`.
    C(Name, Box<Formula>),
    /// Distributed knowledge of some nonempty subgroup named `n`.
    D(Name, Box<Formula>),
    /// Agent `i` knows that, if it is named `n`, the formula holds.
    B(AgentId, Name, Box<Formula>),
}

impl Formula {
    pub fn atom(p: impl Into<Prop>) -> Self {
        Formula::Atom(p.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Self {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn iff(l: Formula, r: Formula) -> Self {
        Formula::Iff(Box::new(l), Box::new(r))
    }

    pub fn e(n: impl Into<Name>, f: Formula) -> Self {
        Formula::E(n.into(), Box::new(f))
    }

    pub fn s(n: impl Into<Name>, f: Formula) -> Self {
        Formula::S(n.into(), Box::new(f))
    }

    pub fn c(n: impl Into<Name>, f: Formula) -> Self {
        Formula::C(n.into(), Box::new(f))
    }

    pub fn d(n: impl Into<Name>, f: Formula) -> Self {
        Formula::D(n.into(), Box::new(f))
    }

    pub fn b(i: impl Into<AgentId>, n: impl Into<Name>, f: Formula) -> Self {
        Formula::B(i.into(), n.into(), Box::new(f))
    }

    /// Conjunction of all formulas; `True` when empty.
    pub fn conjunction(fs: impl IntoIterator<Item = Formula>) -> Self {
        fs.into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Disjunction of all formulas; `False` when empty.
    pub fn disjunction(fs: impl IntoIterator<Item = Formula>) -> Self {
        fs.into_iter().reduce(Formula::or).unwrap_or(Formula::False)
    }

    /// Immediate subterms.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) | Formula::True | Formula::False => vec![],
            Formula::Not(f)
            | Formula::E(_, f)
            | Formula::S(_, f)
            | Formula::C(_, f)
            | Formula::D(_, f)
            | Formula::B(_, _, f) => vec![f],
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Iff(l, r) => vec![l, r],
        }
    }

    /// Rewrites into the `!`/`&`/modal core:
    /// `a -> b` as `!(a & !b)`, `a | b` as `!(!a & !b)`,
    /// `a <-> b` as `(a -> b) & (b -> a)`.
    pub fn desugar(&self) -> Formula {
        match self {
            Formula::Atom(_) | Formula::True | Formula::False => self.clone(),
            Formula::Not(f) => Formula::not(f.desugar()),
            Formula::And(l, r) => Formula::and(l.desugar(), r.desugar()),
            Formula::Or(l, r) => Formula::not(Formula::and(
                Formula::not(l.desugar()),
                Formula::not(r.desugar()),
            )),
            Formula::Implies(l, r) => {
                Formula::not(Formula::and(l.desugar(), Formula::not(r.desugar())))
            }
            Formula::Iff(l, r) => {
                let (l, r) = (l.desugar(), r.desugar());
                Formula::and(
                    Formula::not(Formula::and(l.clone(), Formula::not(r.clone()))),
                    Formula::not(Formula::and(r, Formula::not(l))),
                )
            }
            Formula::E(n, f) => Formula::E(n.clone(), Box::new(f.desugar())),
            Formula::S(n, f) => Formula::S(n.clone(), Box::new(f.desugar())),
            Formula::C(n, f) => Formula::C(n.clone(), Box::new(f.desugar())),
            Formula::D(n, f) => Formula::D(n.clone(), Box::new(f.desugar())),
            Formula::B(i, n, f) => Formula::B(i.clone(), n.clone(), Box::new(f.desugar())),
        }
    }

    /// Reflexive-transitive subterms of the desugared formula.
    pub fn subformulas(&self) -> BTreeSet<Formula> {
        fn go(f: &Formula, out: &mut BTreeSet<Formula>) {
            if out.insert(f.clone()) {
                for c in f.children() {
                    go(c, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        go(&self.desugar(), &mut out);
        out
    }

    fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a Formula)) {
        visit(self);
        for c in self.children() {
            c.walk(visit);
        }
    }

    pub fn names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| match f {
            Formula::E(n, _)
            | Formula::S(n, _)
            | Formula::C(n, _)
            | Formula::D(n, _)
            | Formula::B(_, n, _) => {
                out.insert(n.clone());
            }
            _ => {}
        });
        out
    }

    pub fn props(&self) -> BTreeSet<Prop> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Formula::Atom(p) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    pub fn agents(&self) -> BTreeSet<AgentId> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Formula::B(i, _, _) = f {
                out.insert(i.clone());
            }
        });
        out
    }

    /// Maximum nesting of modal operators.
    pub fn modal_depth(&self) -> usize {
        let inner = self
            .children()
            .into_iter()
            .map(Formula::modal_depth)
            .max()
            .unwrap_or(0);
        match self {
            Formula::E(..) | Formula::S(..) | Formula::C(..) | Formula::D(..) | Formula::B(..) => {
                inner + 1
            }
            _ => inner,
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Formula::size).sum::<usize>()
    }

    /// True when only `E`, `S` and Boolean connectives occur.
    pub fn is_basic(&self) -> bool {
        let mut ok = true;
        self.walk(&mut |f| {
            if matches!(f, Formula::C(..) | Formula::D(..) | Formula::B(..)) {
                ok = false;
            }
        });
        ok
    }

    /// True when `D` or `B` occurs.
    pub fn has_d_or_b(&self) -> bool {
        let mut found = false;
        self.walk(&mut |f| {
            if matches!(f, Formula::D(..) | Formula::B(..)) {
                found = true;
            }
        });
        found
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}
