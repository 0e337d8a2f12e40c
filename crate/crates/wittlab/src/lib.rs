//! wittlab: exact arithmetic for big and truncated Witt vector rings.
//!
//! The crate provides four independently realized models of Witt arithmetic
//! that are cross-validated against each other:
//!
//! * ghost coordinates and their exact inverse over torsion-free rings
//!   ([`witt`]);
//! * universal polynomial tables, the single source of truth over rings with
//!   torsion ([`witt::tables`]);
//! * truncated power series under multiplication ([`series`]);
//! * semigroup-algebra completions `ZR / I^n` via integer lattices
//!   ([`semigroup`]).
//!
//! On top sit the relative de Rham-Witt form calculus ([`drw`]), the
//! constructive factorization of truncated series into linear factors over
//! Galois rings ([`zannier`]), a small expression language ([`expr`]), and
//! the cross-model verification driver ([`verify`]).

pub mod drw;
pub mod error;
pub mod expr;
pub mod poly;
pub mod rings;
pub mod semigroup;
pub mod serial;
pub mod series;
pub mod truncation;
pub mod verify;
pub mod witt;
pub mod zannier;

pub use error::{Error, Result};

pub use num;
