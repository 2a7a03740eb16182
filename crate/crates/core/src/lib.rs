//! Epistemic logic with names.
//!
//! Formulas quantify over agents through intensional *names*: `E[n] f`
//! (everyone named `n` knows `f`), `S[n] f` (someone named `n` knows `f`),
//! plus common knowledge `C[n]`, distributed knowledge `D[n]` and the
//! relativised belief operator `B[i;n]`. The crate provides
//!
//! - [`syntax`]: the formula AST, parser, printer and closure sets;
//! - [`kripke`]: models with naming functions and model checking;
//! - [`neighborhood`]: the equivalent neighborhood semantics and complex algebras;
//! - [`equivalence`]: frame morphisms, bisimulations and distinguishing formulas;
//! - [`decision`]: satisfiability and validity for the `E`/`S`/`C` fragment.

pub mod decision;
pub mod equivalence;
pub mod error;
pub mod kripke;
pub mod neighborhood;
pub mod syntax;

pub use error::{ModelError, ParseError, SyntaxError};
pub use kripke::{check, extension, KripkeModel, StateSet, TruthResult};
pub use neighborhood::NeighborhoodModel;
pub use syntax::{parse_formula, AgentId, Formula, Name, Prop};
