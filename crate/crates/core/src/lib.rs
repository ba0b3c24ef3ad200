//! Program logics for a regular-command language, evaluated exactly over a
//! bounded finite state space.
//!
//! The crate provides:
//!
//! * [`syntax`]: ASTs for expressions and regular commands (plain and
//!   heap-manipulating), a parser for the textual program format, a pretty
//!   printer, and free/modified-variable computations.
//! * [`semantics`]: forward and backward collecting semantics over the finite
//!   store space, divergence/unreachability sets, determinism and termination
//!   checks, and a relation oracle built from singleton runs.
//! * [`triples`]: validity checking with counterexample witnesses for the four
//!   triple forms (HL, IL, NC, SIL), plus weakest-condition computations.
//! * [`proofs`]: a serializable derivation-tree format for SIL, a local rule
//!   checker, and a synthesizer that builds a derivation for any valid triple.
//! * [`taxonomy`]: seeded random program/state-set generation and property
//!   campaigns over the relationships between the four logics.
//! * [`sep`]: the heap machine model, the separation assertion language with
//!   an extensional bounded-model evaluator, and a checker for the separation
//!   derivation rules.

pub mod describe;
pub mod proofs;
pub mod semantics;
pub mod sep;
pub mod syntax;
pub mod taxonomy;
pub mod triples;

pub use semantics::{DomainConfig, StateRelation, StateSet, Store};
pub use syntax::{AExp, AtomicCmd, BExp, CmpOp, Command, Program};
pub use triples::{Logic, Triple, Verdict};
