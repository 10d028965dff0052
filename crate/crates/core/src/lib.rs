//! Exact-arithmetic toolkit for diagonalizing finite abelian groups of
//! plane polynomial automorphisms over k[t].

pub mod action;
pub mod automorphism;
pub mod bipoly;
pub mod diag;
pub mod error;
pub mod extfield;
pub mod factor;
pub mod fields;
pub mod gen;
pub mod lattice;
pub mod linalg;
pub mod parse;
pub mod ratfunc;
pub mod serialize;
pub mod ring;
pub mod unipoly;

pub use error::{Error, Result};
