//! Core algorithms for the pure logic of necessitation `N` and its
//! extensions `NA(m,n)` (`N` plus the axiom scheme `[]^n A -> []^m A` and the
//! rule `~[]A / ~[][]A`).
//!
//! The crate is split along the natural seams of the problem:
//!
//! * [`formula`] — modal formula trees and their canonical enumeration order;
//! * [`parse`] — the ASCII concrete syntax (`[]p -> [][]p`) and its printer;
//! * [`semantics`] — finite N-models with one accessibility relation per
//!   formula, chain relations, and the `(m,n)`-accessibility frame condition;
//! * [`hilbert`] — Hilbert-style proof objects, tautological consequence
//!   after the atom translation, and proof checking;
//! * [`decide`] — bounded countermodel search paired with axiom-level proof
//!   generation;
//! * [`sim`] — a desk-scale, stage-by-stage simulation of the monitor
//!   functions and output machines used in the arithmetical-completeness
//!   constructions, together with checkers for their trace-level invariants.
//!
//! Everything here is pure computation over `alloc` collections; IO, file
//! formats and the command-line front end live in the companion `nalab`
//! crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod decide;
pub mod formula;
pub mod hilbert;
pub mod parse;
pub mod semantics;
pub mod sim;

pub use formula::Formula;
pub use semantics::{NModel, World};
