//! Least-model computation for propositional definite logic programs by
//! sparse linear algebra.
//!
//! A definite program is embedded into a vector space: interpretations
//! become 0/1 vectors and the program becomes a sparse matrix whose rows
//! encode rules (conjunctive bodies with `1/len` weights, facts as diagonal
//! tautologies, disjunctive bodies with unit weights). The least model is
//! then the fixpoint of a thresholded matrix-vector iteration. On top of
//! that kernel the crate provides two optimizations — column reduction of
//! the program matrix and partial evaluation by repeated matrix squaring —
//! plus a symbolic unfolding transformation used to cross-check the
//! numeric path, a seeded random-program generator, and a benchmark
//! harness.
//!
//! Solver variants live behind the [`solver::Engine`] trait and are
//! registered by name in [`solver::EngineRegistry`], so front-ends select
//! them at runtime.

pub mod genbench;
pub mod linalg;
pub mod program;
pub mod solver;
pub mod transform;

pub use program::{
    parse_program, serialize_constraints, serialize_program, AtomId, AtomTable, ConstraintSet,
    DefiniteProgram, Interpretation, ParseError, Rule, RuleKind,
};
pub use solver::{solve, Engine, EngineRegistry, Method, SolveResult};
pub use transform::{to_d_program, DProgram};
