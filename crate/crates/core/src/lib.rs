//! Transition-based Emerson-Lei automata (TELA).
//!
//! Acceptance conditions are positive Boolean formulas over `Inf`/`Fin`
//! atoms on transition marks. The crate provides translations to
//! generalized Büchi automata, determinization, limit-determinization,
//! good-for-MDP automata and MDP model checking, plus HOA I/O and a random
//! benchmark harness.

pub mod acceptance;
pub mod analysis;
pub mod automaton;
pub mod bitset;
pub mod determinize;
pub mod error;
pub mod families;
pub mod graph;
pub mod hoa;
pub mod limitdet;
pub mod mdp;
pub mod randbench;
pub mod transforms;

pub use acceptance::{AcceptanceFormula, DnfAcceptance, DnfDisjunct, InfAtom};
pub use automaton::{Combinator, DnfClause, DnfTela, Letter, StateId, Tela, Transition};
pub use bitset::{BitSet, MarkSet, StateSet};
pub use error::{Error, Result};
