//! Verification workbench for timed concurrent constraint programs.
//!
//! The crate executes tccp agents under maximal parallelism, computes their
//! timed reactive sequences both operationally and compositionally, evaluates
//! assumption/commitment temporal formulas over bounded models, and replays
//! derivations in the compositional proof system for `A sat φ`.
//!
//! All semantic objects are finite: constraints live in a finite
//! [`constraint::Lattice`] and sequences are enumerated up to a length bound.

pub mod checker;
pub mod constraint;
pub mod denotational;
pub mod logic;
pub mod operational;
pub mod sequence;
pub mod syntax;
