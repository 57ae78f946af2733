//! The maximal-parallelism transition system and the operational reactive
//! sequence semantics `R(A)`.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::constraint::{Constraint, Lattice};
use crate::sequence::{Reaction, ReactiveSequence, SequenceSet};
use crate::syntax::{Agent, Program};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OperationalError {
    #[error("call to undeclared procedure `{0}({1})`")]
    Undeclared(String, String),
    #[error("procedure unfolding exceeded depth {0}; is recursion guarded?")]
    Unguarded(usize),
    #[error("length bound must be at least 1")]
    ZeroBound,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    pub agent: Agent,
    pub store: Constraint,
}

const MAX_UNFOLD: usize = 64;

/// The one-step successors of `⟨agent, store⟩`; empty iff the configuration
/// cannot move.
pub fn step_all(prog: &Program, cfg: &Configuration) -> Result<BTreeSet<Configuration>, OperationalError> {
    Ok(step(prog, &cfg.agent, cfg.store, 0)?
        .into_iter()
        .map(|(agent, store)| Configuration { agent, store })
        .collect())
}

fn step(prog: &Program, a: &Agent, d: Constraint, depth: usize) -> Result<Vec<(Agent, Constraint)>, OperationalError> {
    let lat = prog.lat();
    Ok(match a {
        Agent::Stop => Vec::new(),
        Agent::Tell(c) => vec![(Agent::Stop, lat.lub(*c, d))],
        Agent::Choice(bs) => bs
            .iter()
            .filter(|(c, _)| lat.entails(d, *c))
            .map(|(_, b)| (b.clone(), d))
            .collect(),
        Agent::Now(c, then, otherwise) => {
            let branch = if lat.entails(d, *c) { then } else { otherwise };
            let succ = step(prog, branch, d, depth)?;
            if succ.is_empty() {
                vec![((**branch).clone(), d)]
            } else {
                succ
            }
        }
        Agent::Par(l, r) => {
            let sl = step(prog, l, d, depth)?;
            let sr = step(prog, r, d, depth)?;
            match (sl.is_empty(), sr.is_empty()) {
                (true, true) => Vec::new(),
                (false, true) => sl
                    .into_iter()
                    .map(|(l2, c)| (Agent::par(l2, (**r).clone()), c))
                    .collect(),
                (true, false) => sr
                    .into_iter()
                    .map(|(r2, c)| (Agent::par((**l).clone(), r2), c))
                    .collect(),
                (false, false) => {
                    let mut out = Vec::with_capacity(sl.len() * sr.len());
                    for (l2, c1) in &sl {
                        for (r2, c2) in &sr {
                            out.push((Agent::par(l2.clone(), r2.clone()), lat.lub(*c1, *c2)));
                        }
                    }
                    out
                }
            }
        }
        Agent::Hide(x, body) => hide_step(prog, *x, lat.bottom(), body, d, depth)?,
        Agent::HideLocal(x, local, body) => hide_step(prog, *x, *local, body, d, depth)?,
        Agent::Call(p, x) => {
            if depth >= MAX_UNFOLD {
                return Err(OperationalError::Unguarded(MAX_UNFOLD));
            }
            let decl = prog
                .decl(p, *x)
                .ok_or_else(|| OperationalError::Undeclared(p.clone(), lat.var_name(*x).to_string()))?;
            step(prog, &decl.body, d, depth + 1)?
        }
    })
}

fn hide_step(
    prog: &Program,
    x: crate::constraint::VarId,
    local: Constraint,
    body: &Agent,
    d: Constraint,
    depth: usize,
) -> Result<Vec<(Agent, Constraint)>, OperationalError> {
    let lat = prog.lat();
    let inner = lat.lub(local, lat.exists_var(x, d));
    Ok(step(prog, body, inner, depth)?
        .into_iter()
        .map(|(b, local2)| {
            (
                Agent::HideLocal(x, local2, Box::new(b)),
                lat.lub(d, lat.exists_var(x, local2)),
            )
        })
        .collect())
}

/// Runs `agent` from `store` with no environment contribution and returns
/// the number of transitions on every maximal run, up to `max` steps.
/// Runs still moving after `max` steps are reported as `max + 1`.
pub fn steps_until_blocked(
    prog: &Program,
    agent: &Agent,
    store: Constraint,
    max: usize,
) -> Result<BTreeSet<usize>, OperationalError> {
    let mut out = BTreeSet::new();
    let mut frontier = BTreeSet::from([Configuration {
        agent: agent.clone(),
        store,
    }]);
    for n in 0..=max {
        let mut next = BTreeSet::new();
        for cfg in &frontier {
            let succ = step_all(prog, cfg)?;
            if succ.is_empty() {
                out.insert(n);
            }
            next.extend(succ);
        }
        if next.is_empty() {
            return Ok(out);
        }
        frontier = next;
    }
    out.insert(max + 1);
    Ok(out)
}

type Memo = HashMap<(Agent, Constraint, usize), Arc<Vec<ReactiveSequence>>>;

/// Enumerates `R(A)` restricted to sequences of length at most `k`.
pub struct Enumerator<'p> {
    prog: &'p Program,
    memo: Memo,
}

impl<'p> Enumerator<'p> {
    pub fn new(prog: &'p Program) -> Self {
        Enumerator {
            prog,
            memo: HashMap::new(),
        }
    }

    fn lat(&self) -> &'p Lattice {
        self.prog.lat()
    }

    /// Sequences of `agent` of length at most `k` whose first input is `c`.
    pub fn from_input(
        &mut self,
        agent: &Agent,
        c: Constraint,
        k: usize,
    ) -> Result<Arc<Vec<ReactiveSequence>>, OperationalError> {
        if k == 0 {
            return Ok(Arc::new(Vec::new()));
        }
        let key = (agent.clone(), c, k);
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        let lat = self.lat();
        let succ = step(self.prog, agent, c, 0)?;
        let mut out = Vec::new();
        if succ.is_empty() {
            let head = Reaction::stutter(c);
            out.push(ReactiveSequence(vec![head]));
            for &c2 in lat.above(c) {
                for w in self.from_input(agent, c2, k - 1)?.iter() {
                    out.push(w.prepend(head));
                }
            }
        } else {
            let succ: BTreeSet<(Agent, Constraint)> = succ.into_iter().collect();
            for (b, d) in succ {
                let head = Reaction::new(c, d);
                for &c2 in lat.above(d) {
                    for w in self.from_input(&b, c2, k - 1)?.iter() {
                        out.push(w.prepend(head));
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        let out = Arc::new(out);
        self.memo.insert(key, out.clone());
        Ok(out)
    }

    pub fn sequences(&mut self, agent: &Agent, k: usize) -> Result<SequenceSet, OperationalError> {
        if k == 0 {
            return Err(OperationalError::ZeroBound);
        }
        let mut out = SequenceSet::new();
        for c in self.lat().elements() {
            out.extend(self.from_input(agent, c, k)?.iter().cloned());
        }
        Ok(out)
    }
}

/// `{ s ∈ R(A) : length(s) ≤ k }` for the program's main agent.
pub fn reactive_sequences(prog: &Program, k: usize) -> Result<SequenceSet, OperationalError> {
    Enumerator::new(prog).sequences(&prog.main, k)
}

/// As [`reactive_sequences`] for an arbitrary agent over the program's
/// declarations.
pub fn reactive_sequences_of(prog: &Program, agent: &Agent, k: usize) -> Result<SequenceSet, OperationalError> {
    Enumerator::new(prog).sequences(agent, k)
}
