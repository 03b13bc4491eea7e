//! Finite, exact combinatorics of two-coloured operads of monoid actions,
//! their (infinitesimal) bimodules, semi-cosimplicial sets and the tree and
//! polytope families that index their free constructions and resolutions.

pub mod algebra;
pub mod cells;
pub mod cli;
pub mod corpus;
pub mod cosimp;
pub mod error;
pub mod freecons;
pub mod report;
pub mod seqcore;
pub mod trees;
pub mod unionfind;

pub use error::{Error, Result};
pub use report::AxiomReport;
