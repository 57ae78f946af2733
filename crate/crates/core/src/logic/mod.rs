//! Assignment-sequence models, the satisfaction relation and bounded validity.

pub mod eval;
pub mod model;

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use thiserror::Error;

use crate::constraint::{Constraint, Lattice};
use crate::syntax::{Formula, INPUT, OUTPUT};

pub use eval::{holds, holds_all_gamma, Evaluator};
pub use model::{admissible, admissible_models, is_monotone, monotone_columns, next_seq, Model, ModelTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("predicate `{0}` has no column in the model")]
    UnassignedPredicate(String),
    #[error("no value for constraint variable `{0}`")]
    MissingConstraintVar(String),
    #[error("model columns must start with I, O and match the formula's evaluator")]
    BadColumns,
    #[error("models are nonempty")]
    EmptyModel,
    #[error("length bound must be at least 1")]
    ZeroBound,
}

/// A model together with a constraint assignment refuting a formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub model: Model,
    pub gamma: BTreeMap<String, Constraint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Validity {
    /// Models examined, up to and including the counterexample.
    pub checked: usize,
    pub counterexample: Option<Counterexample>,
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// The predicate columns a formula needs: `I`, `O`, then its other free
/// predicates in name order.
pub fn columns_for(phi: &Formula) -> Vec<String> {
    let mut cols = vec![INPUT.to_string(), OUTPUT.to_string()];
    cols.extend(phi.free_preds().into_iter().filter(|p| p != INPUT && p != OUTPUT));
    cols
}

type Refutation = Option<(usize, Vec<Constraint>)>;

/// Scans `models` in order and returns the least index refuting `phi`.
///
/// Work is striped across `workers` threads, each with its own cache; a
/// shared watermark lets a worker stop once a smaller counterexample is
/// known, so the answer does not depend on scheduling.
pub(crate) fn first_refutation(
    lat: &Lattice,
    phi: &Formula,
    columns: &[String],
    models: &[Model],
    workers: usize,
) -> Result<Refutation, LogicError> {
    let workers = workers.clamp(1, models.len().max(1));
    let best = AtomicUsize::new(usize::MAX);
    let results: Vec<Result<Refutation, LogicError>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let best = &best;
                s.spawn(move || {
                    let mut ev = Evaluator::new(lat, phi, columns)?;
                    let mut i = w;
                    while i < models.len() && i < best.load(Ordering::Relaxed) {
                        if let Some(g) = ev.refuting_gamma(&models[i])? {
                            best.fetch_min(i, Ordering::Relaxed);
                            return Ok(Some((i, g)));
                        }
                        i += workers;
                    }
                    Ok(None)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut found: Refutation = None;
    for r in results {
        if let Some((i, g)) = r? {
            if found.as_ref().is_none_or(|(j, _)| i < *j) {
                found = Some((i, g));
            }
        }
    }
    Ok(found)
}

/// `⊨ φ` over every admissible model of length at most `k`.
pub fn valid_bounded(lat: &Lattice, phi: &Formula, k: usize, workers: usize) -> Result<Validity, LogicError> {
    if k == 0 {
        return Err(LogicError::ZeroBound);
    }
    let columns = columns_for(phi);
    let models = admissible_models(lat, &columns[2..], k);
    let names = Evaluator::new(lat, phi, &columns)?.free_constraint_vars().to_vec();
    Ok(match first_refutation(lat, phi, &columns, &models, workers)? {
        None => Validity {
            checked: models.len(),
            counterexample: None,
        },
        Some((i, g)) => Validity {
            checked: i + 1,
            counterexample: Some(Counterexample {
                model: models[i].clone(),
                gamma: names.into_iter().zip(g).collect(),
            }),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::HerbrandEqSystem;
    use crate::syntax::parse_formula;

    fn lat() -> Lattice {
        Lattice::from_system(&HerbrandEqSystem::new(["x", "y"], ["a"])).unwrap()
    }

    fn valid(l: &Lattice, src: &str, k: usize) -> Validity {
        let f = parse_formula(l, src).unwrap();
        valid_bounded(l, &f, k, 2).unwrap()
    }

    #[test]
    fn input_below_output() {
        let l = lat();
        assert!(valid(&l, "forall p. I(p) -> O(p)", 3).is_valid());
        assert!(valid(&l, "forall p. O(p) -> next I(p)", 3).is_valid());
    }

    #[test]
    fn output_claim_refuted_at_bottom() {
        let l = lat();
        let v = valid(&l, "O(x=a)", 3);
        let cx = v.counterexample.unwrap();
        assert_eq!(cx.model.steps[0][1], l.bottom());
    }

    #[test]
    fn free_constraint_vars_are_universal() {
        let l = lat();
        assert!(valid(&l, "p <= p", 2).is_valid());
        assert!(!valid(&l, "p <= q", 1).is_valid());
    }
}
