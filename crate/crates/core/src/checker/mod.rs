//! Bounded checking of correctness assertions `A sat φ`, agreement of the
//! two semantics, and replay of derivations in the proof system.

pub mod proof;
pub mod script;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::constraint::{Constraint, Lattice};
use crate::denotational::{sem_eval, DenotationalError, Environment};
use crate::logic::model::{advance, monotone_columns};
use crate::logic::{columns_for, first_refutation, Evaluator, LogicError, Model};
use crate::operational::{reactive_sequences, reactive_sequences_of, OperationalError};
use crate::sequence::{ReactiveSequence, SequenceSet};
use crate::syntax::{Agent, Formula, GuardViolation, Program, ProgramError};

pub use proof::{check_proof, NodeStatus, NodeVerdict, ProofError, ProofNode, ProofReport, ProofTree, Rule};
pub use script::{parse_proof_script, ScriptError, HIDING_EXAMPLE_PROGRAM, HIDING_EXAMPLE_PROOF};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error(transparent)]
    Program(#[from] ProgramError),
    #[error("unguarded recursion: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Unguarded(Vec<GuardViolation>),
    #[error(transparent)]
    Operational(#[from] OperationalError),
    #[error(transparent)]
    Denotational(#[from] DenotationalError),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error("length bound must be at least 1")]
    ZeroBound,
}

/// Static checks shared by every entry point; returns the program with its
/// declarations closed under parameter renaming.
pub fn prepare(prog: &Program) -> Result<Program, CheckError> {
    prog.check_closed()?;
    let violations = prog.check_guarded_recursion();
    if !violations.is_empty() {
        return Err(CheckError::Unguarded(violations));
    }
    Ok(prog.close_declarations()?)
}

/// Every model whose `I`/`O` projection is one of `seqs`, with the `extra`
/// columns ranging over all monotone columns. Order: by sequence, then by
/// column choice.
pub fn lift(lat: &Lattice, seqs: &SequenceSet, extra: &[String]) -> Vec<Model> {
    let mut preds = vec![crate::syntax::INPUT.to_string(), crate::syntax::OUTPUT.to_string()];
    preds.extend(extra.iter().cloned());
    let mut cols_by_len: BTreeMap<usize, Vec<Vec<Constraint>>> = BTreeMap::new();
    let mut out = Vec::new();
    for s in seqs {
        let n = s.len();
        let cols = cols_by_len.entry(n).or_insert_with(|| monotone_columns(lat, n));
        let mut idx = vec![0usize; extra.len()];
        loop {
            let steps = s
                .reactions()
                .iter()
                .enumerate()
                .map(|(t, r)| {
                    let mut v = vec![r.input, r.output];
                    v.extend(idx.iter().map(|&j| cols[j][t]));
                    v
                })
                .collect();
            out.push(Model {
                preds: preds.clone(),
                steps,
            });
            if !advance(&mut idx, cols.len()) {
                break;
            }
        }
    }
    out
}

/// `R′(A)` up to length `k` over the columns `preds` (which must start
/// with `I`, `O`).
pub fn lift_sequences(prog: &Program, agent: &Agent, k: usize, preds: &[String]) -> Result<Vec<Model>, CheckError> {
    if k == 0 {
        return Err(CheckError::ZeroBound);
    }
    let prog = prepare(prog)?;
    let seqs = reactive_sequences_of(&prog, agent, k)?;
    Ok(lift(prog.lat(), &seqs, preds.get(2..).unwrap_or_default()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatCounterexample {
    pub sequence: ReactiveSequence,
    pub model: Model,
    pub gamma: BTreeMap<String, Constraint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub bound: usize,
    /// Reactive sequences of the agent within the bound.
    pub sequences: usize,
    /// Lifted models examined, up to and including any counterexample.
    pub examined: usize,
    pub counterexample: Option<SatCounterexample>,
}

impl CheckResult {
    pub fn is_valid(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// `⊨ A sat φ` over `R′(A)` truncated at length `k`.
pub fn check_sat(
    prog: &Program,
    agent: &Agent,
    phi: &Formula,
    k: usize,
    workers: usize,
) -> Result<CheckResult, CheckError> {
    if k == 0 {
        return Err(CheckError::ZeroBound);
    }
    let prog = prepare(prog)?;
    let lat = prog.lat();
    let columns = columns_for(phi);
    let names = Evaluator::new(lat, phi, &columns)?.free_constraint_vars().to_vec();
    let seqs = reactive_sequences_of(&prog, agent, k)?;
    let models = lift(lat, &seqs, &columns[2..]);
    let found = first_refutation(lat, phi, &columns, &models, workers)?;
    Ok(match found {
        None => CheckResult {
            bound: k,
            sequences: seqs.len(),
            examined: models.len(),
            counterexample: None,
        },
        Some((i, g)) => {
            let model = models[i].clone();
            CheckResult {
                bound: k,
                sequences: seqs.len(),
                examined: i + 1,
                counterexample: Some(SatCounterexample {
                    sequence: model.io_sequence(),
                    model,
                    gamma: names.into_iter().zip(g).collect(),
                }),
            }
        }
    })
}

/// How a sequence found on only one side relates to the other side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffKind {
    /// Adding or removing one trailing stutter yields a sequence of the
    /// other side.
    TrailingStutter,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discrepancy {
    pub sequence: ReactiveSequence,
    pub kind: DiffKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub bound: usize,
    pub operational: usize,
    pub denotational: usize,
    pub only_operational: Vec<Discrepancy>,
    pub only_denotational: Vec<Discrepancy>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.only_operational.is_empty() && self.only_denotational.is_empty()
    }
}

fn classify(s: &ReactiveSequence, other: &SequenceSet, k: usize) -> DiffKind {
    let last = s.last();
    let longer = s.concat(&ReactiveSequence(vec![last]));
    let near = (longer.len() <= k && other.contains(&longer))
        || (s.len() > 1
            && s.reactions()[s.len() - 2] == last
            && other.contains(&ReactiveSequence(s.reactions()[..s.len() - 1].to_vec())));
    if near {
        DiffKind::TrailingStutter
    } else {
        DiffKind::Other
    }
}

/// Compares `R(A)` with `[[D.A]]` at bound `k`.
pub fn check_equivalence(prog: &Program, k: usize) -> Result<EquivalenceReport, CheckError> {
    if k == 0 {
        return Err(CheckError::ZeroBound);
    }
    let prog = prepare(prog)?;
    let op = reactive_sequences(&prog, k)?;
    let den = sem_eval(&prog, &Environment::new(), k)?;
    let diff = |a: &SequenceSet, b: &SequenceSet| -> Vec<Discrepancy> {
        a.difference(b)
            .map(|s| Discrepancy {
                sequence: s.clone(),
                kind: classify(s, b, k),
            })
            .collect()
    };
    Ok(EquivalenceReport {
        bound: k,
        operational: op.len(),
        denotational: den.len(),
        only_operational: diff(&op, &den),
        only_denotational: diff(&den, &op),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_program};

    #[test]
    fn lift_without_extra_columns_is_the_projection() {
        let p = parse_program("vars: x; consts: a; main: tell(x=a);").unwrap();
        let cols = vec!["I".to_string(), "O".to_string()];
        let models = lift_sequences(&p, &p.main, 3, &cols).unwrap();
        let seqs = reactive_sequences(&p, 3).unwrap();
        assert_eq!(models.len(), seqs.len());
        assert!(models.iter().all(|m| seqs.contains(&m.io_sequence())));
    }

    #[test]
    fn told_true_does_not_output_more() {
        let p = parse_program("vars: x; consts: a; main: tell(true);").unwrap();
        let f = parse_formula(p.lat(), "O(x=a)").unwrap();
        let r = check_sat(&p, &p.main, &f, 2, 1).unwrap();
        let cx = r.counterexample.unwrap();
        assert_eq!(cx.sequence.first().output, p.lat().bottom());
    }

    #[test]
    fn unguarded_recursion_is_static() {
        let p = parse_program("vars: x; consts: a; p(x) :: p(x); main: p(x);").unwrap();
        assert!(matches!(check_equivalence(&p, 2), Err(CheckError::Unguarded(_))));
    }
}
