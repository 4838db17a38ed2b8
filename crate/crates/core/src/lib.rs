//! Satisfiability, model extraction and bisimulation tooling for ALC
//! extended with local and global definite descriptions.

pub mod bench;
pub mod bisim;
pub mod generator;
pub mod semantics;
pub mod syntax;
pub mod tableau;
pub mod translate;

pub use syntax::{parse_concept, parse_ontology, print_concept, Concept, Logic, Ontology};
