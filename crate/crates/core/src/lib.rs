//! Well-founded semantics for normal logic programs: a top-down tabling
//! engine with loop cutting (with and without pruning optimizations) and an
//! independent bottom-up fixpoint evaluator usable as a cross-check oracle.

pub mod builder;
pub mod builtins;
pub mod dot;
pub mod engine;
pub mod flags;
pub mod lang;
pub mod oracle;
pub mod parser;
pub mod stats;
pub mod tables;
pub mod tree;

pub use engine::{run, EngineConfig, EngineError, RunResult, Verdict};
pub use lang::{Atom, Clause, Literal, Program, Subst, Term, Var};
