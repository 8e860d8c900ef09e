//! Past-directed linear temporal logic with a bounded `Since` operator.
//!
//! Time runs over the natural numbers and is read towards the past: `N`
//! moves one step further back, and `phi S psi` holds when `psi` happened
//! within the window reachable from the current point and `phi` held at
//! every point in between. The window has a fixed length `m`, which makes
//! reachability non-transitive and truth at a point depend on finitely
//! many neighbours only.
//!
//! The crate provides:
//!
//! * [`syntax`] — formula and rule ASTs, the text grammar, printing,
//!   substitution and derived knowledge operators;
//! * [`semantics`] — ultimately periodic (lasso) models and evaluation
//!   under the bounded and the unbounded reading of `Since`;
//! * [`normal_form`] — compilation of rules into reduced normal form;
//! * [`decision`] — satisfiability, theoremhood and rule validity over all
//!   models with a given window length, with lasso witnesses, plus a
//!   brute-force oracle;
//! * [`admissibility`] — sound certificates and bounded counterexample
//!   search for admissibility of inference rules;
//! * [`knowledge`] — multi-agent valuations, threshold voting and the
//!   shared-knowledge evaluation.

pub mod admissibility;
pub mod decision;
pub mod error;
pub mod knowledge;
pub mod normal_form;
pub mod semantics;
pub mod syntax;

pub use error::{Error, Result};
pub use syntax::{parse_formula, parse_rule, Formula, Rule, Substitution};
