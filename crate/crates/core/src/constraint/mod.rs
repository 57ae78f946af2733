//! Cylindric constraint systems.
//!
//! A [`CylindricSystem`] is a lattice of constraints ordered by entailment,
//! equipped with cylindrification (`∃x`) and diagonal elements (`d_xy`).
//! Everything downstream runs over a [`Lattice`], a finite table built once
//! from a system so that entailment, lub and projection are array lookups.

mod axioms;
mod doubles;
mod herbrand;
mod lattice;

use std::fmt::Debug;
use std::hash::Hash;

use thiserror::Error;

pub use axioms::{check_cylindric_axioms, Axiom, AxiomReport, AxiomViolation};
pub use doubles::{IdentityCylinder, SingletonSystem};
pub use herbrand::{HerbrandConstraint, HerbrandEqSystem, Rep};
pub use lattice::{Constraint, Lattice, VarId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstraintError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown variable or constant `{0}`")]
    UnknownName(String),
    #[error("constraint system is not finite")]
    NotFinite,
    #[error("constraint system has no diagonal element for `{0}` and `{1}`")]
    NoDiagonal(String, String),
    #[error("constraint system too large for a finite table ({0} elements)")]
    TooLarge(usize),
}

/// Interface of a cylindric constraint system.
///
/// `true` is the least element and `false` the greatest; `entails(c, d)`
/// holds when `c` carries at least the information of `d`.
pub trait CylindricSystem {
    type Elem: Clone + Eq + Ord + Hash + Debug;

    fn variables(&self) -> &[String];

    /// Names that may appear on either side of a primitive equation besides
    /// the variables. Empty for systems without constants.
    fn constants(&self) -> &[String] {
        &[]
    }

    fn bottom(&self) -> Self::Elem;
    fn top(&self) -> Self::Elem;
    fn entails(&self, c: &Self::Elem, d: &Self::Elem) -> bool;
    fn lub(&self, c: &Self::Elem, d: &Self::Elem) -> Self::Elem;
    fn exists_var(&self, x: &str, c: &Self::Elem) -> Result<Self::Elem, ConstraintError>;

    /// `Ok(None)` when the system has no diagonal elements.
    fn diagonal(&self, x: &str, y: &str) -> Result<Option<Self::Elem>, ConstraintError>;

    /// All lattice elements in a deterministic order.
    fn enumerate(&self) -> Result<Vec<Self::Elem>, ConstraintError>;

    /// Textual form accepted back by the constraint parser.
    fn render(&self, c: &Self::Elem) -> String;

    /// Primitive equation `lhs = rhs`, if the system has one.
    fn atom(&self, _lhs: &str, _rhs: &str) -> Result<Self::Elem, ConstraintError> {
        Err(ConstraintError::UnknownName(_lhs.to_string()))
    }
}
