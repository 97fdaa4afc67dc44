//! Boundary encoded string graph (B-ESG) grammars.
//!
//! String graphs encode string diagrams as directed graphs with node-vertices
//! (boxes) and wire-vertices (points along wires). This crate covers the
//! graph layer, matching modulo wire-homeomorphism, double-pushout rewriting,
//! edNCE grammars with decoding systems, decision procedures for membership
//! and match enumeration, rewrite patterns, and grammar transformations.

pub mod besg;
pub mod cli;
pub mod decision;
pub mod dot;
pub mod dpo;
pub mod error;
pub mod format;
pub mod grammar;
pub mod graph;
pub mod matching;
pub mod pattern;
pub mod transform;

pub use error::{Error, Result};
pub use graph::{Alphabets, Boundary, Edge, Graph, VertexKind, Wire, WireKind};
