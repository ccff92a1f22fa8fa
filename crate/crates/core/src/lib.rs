//! Workbench for the algebra of possibly non-halting deterministic
//! programs.
//!
//! Programs are modelled as partial self-maps on a finite state space,
//! with composition, domain, tests, extended if-then-else, weak
//! comparison and (extended) while-do. The crate provides:
//!
//! - concrete models over finite point sets ([`pfun`]);
//! - abstract finite algebras as operation tables, with validation,
//!   congruences and quotients ([`algebra`]);
//! - a term language with a parser and evaluator ([`terms`]);
//! - a registry of the defining laws of each axiom class and an
//!   exhaustive/sampled checker with replayable witnesses ([`laws`]);
//! - filters, determinative pairs, and the construction of a faithful
//!   functional representation with its verifier ([`filters`]);
//! - the induced algebra of possibly non-halting predicates with its
//!   three-valued semantics ([`calg`]);
//! - the built-in example systems ([`fixtures`]).

pub mod algebra;
pub mod calg;
pub mod context;
pub mod filters;
pub mod fixtures;
pub mod laws;
pub mod pfun;
pub mod terms;

pub use algebra::FiniteAlgebra;
pub use context::{ConcreteModel, EvalContext, OpKind};
pub use pfun::{PartialMap, TestSet};
pub use terms::Term;
