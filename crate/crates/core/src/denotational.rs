//! Compositional semantics over sets of reactive sequences, truncated at a
//! length bound.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::constraint::{Constraint, Lattice, VarId};
use crate::sequence::{stutter_sequences, Reaction, ReactiveSequence, SequenceSet};
use crate::syntax::{Agent, Declaration, Program};

/// Denotations for procedure identifiers `p(x)` no longer bound by `D`.
pub type Environment = BTreeMap<(String, VarId), SequenceSet>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DenotationalError {
    #[error("procedure `{0}({1})` is bound neither by the declarations nor by the environment")]
    Unbound(String, String),
    #[error("runtime agent `exists^d` has no source-level denotation")]
    RuntimeAgent,
    #[error("length bound must be at least 1")]
    ZeroBound,
}

/// `[[D.A]](e)` restricted to sequences of length at most `k`.
pub fn sem_eval(prog: &Program, env: &Environment, k: usize) -> Result<SequenceSet, DenotationalError> {
    sem_eval_agent(prog, &prog.main, env, k)
}

pub fn sem_eval_agent(
    prog: &Program,
    agent: &Agent,
    env: &Environment,
    k: usize,
) -> Result<SequenceSet, DenotationalError> {
    if k == 0 {
        return Err(DenotationalError::ZeroBound);
    }
    let mut ev = Evaluator::new(prog.lat(), &prog.decls, k);
    ev.eval(agent, &BTreeSet::new(), env)
}

/// Statistics of one fixpoint computation, exposed for tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixpointTrace {
    pub procedure: (String, VarId),
    pub iterates: Vec<usize>,
}

struct Evaluator<'a> {
    lat: &'a Lattice,
    decls: &'a [Declaration],
    k: usize,
    stutters: HashMap<Constraint, SequenceSet>,
    traces: Vec<FixpointTrace>,
}

impl<'a> Evaluator<'a> {
    fn new(lat: &'a Lattice, decls: &'a [Declaration], k: usize) -> Self {
        Evaluator {
            lat,
            decls,
            k,
            stutters: HashMap::new(),
            traces: Vec::new(),
        }
    }

    fn stutters_from(&mut self, c: Constraint) -> &SequenceSet {
        let (lat, k) = (self.lat, self.k);
        self.stutters
            .entry(c)
            .or_insert_with(|| stutter_sequences(lat, Some(c), k))
    }

    fn eval(
        &mut self,
        a: &Agent,
        removed: &BTreeSet<(String, VarId)>,
        env: &Environment,
    ) -> Result<SequenceSet, DenotationalError> {
        let lat = self.lat;
        let k = self.k;
        Ok(match a {
            Agent::Stop => stutter_sequences(lat, None, k),
            Agent::Tell(c) => {
                let mut out = SequenceSet::new();
                for d in lat.elements() {
                    let dc = lat.lub(d, *c);
                    let head = Reaction::new(d, dc);
                    for s in self.stutters_from(dc).clone() {
                        if s.len() < k {
                            out.insert(s.prepend(head));
                        }
                    }
                }
                out
            }
            Agent::Choice(bs) => {
                let mut guards = Vec::with_capacity(bs.len());
                for (c, body) in bs {
                    guards.push((*c, self.eval(body, removed, env)?));
                }
                sem_guarded_choice(lat, &guards, k)
            }
            Agent::Now(c, then, otherwise) => {
                let s1 = self.eval(then, removed, env)?;
                let s2 = self.eval(otherwise, removed, env)?;
                sem_now(lat, *c, &s1, &s2)
            }
            Agent::Par(l, r) => {
                let s1 = self.eval(l, removed, env)?;
                let s2 = self.eval(r, removed, env)?;
                sem_parallel(lat, &s1, &s2)
            }
            Agent::Hide(x, body) => {
                let s = self.eval(body, removed, env)?;
                sem_hide(lat, *x, &s, k)
            }
            Agent::HideLocal(..) => return Err(DenotationalError::RuntimeAgent),
            Agent::Call(p, x) => {
                let id = (p.clone(), *x);
                let decl = self
                    .decls
                    .iter()
                    .find(|d| &d.name == p && d.param == *x && !removed.contains(&id));
                match decl {
                    Some(d) => self.fixpoint(id, &d.body, removed, env)?,
                    None => env
                        .get(&id)
                        .cloned()
                        .ok_or_else(|| DenotationalError::Unbound(p.clone(), lat.var_name(*x).to_string()))?,
                }
            }
        })
    }

    // μΨ with Ψ(f) = [[D∖{p}.A]](e{f/p}), iterated from the empty set.
    fn fixpoint(
        &mut self,
        id: (String, VarId),
        body: &Agent,
        removed: &BTreeSet<(String, VarId)>,
        env: &Environment,
    ) -> Result<SequenceSet, DenotationalError> {
        let mut removed2 = removed.clone();
        removed2.insert(id.clone());
        let mut env2 = env.clone();
        let mut f = SequenceSet::new();
        let mut sizes = vec![0];
        loop {
            env2.insert(id.clone(), f.clone());
            let g = self.eval(body, &removed2, &env2)?;
            sizes.push(g.len());
            if g == f {
                break;
            }
            f = g;
        }
        self.traces.push(FixpointTrace {
            procedure: id,
            iterates: sizes,
        });
        Ok(f)
    }
}

/// Like [`sem_eval`], also returning the iterate sizes of every procedure
/// fixpoint computed along the way.
pub fn sem_eval_traced(
    prog: &Program,
    env: &Environment,
    k: usize,
) -> Result<(SequenceSet, Vec<FixpointTrace>), DenotationalError> {
    if k == 0 {
        return Err(DenotationalError::ZeroBound);
    }
    let mut ev = Evaluator::new(prog.lat(), &prog.decls, k);
    let s = ev.eval(&prog.main, &BTreeSet::new(), env)?;
    Ok((s, ev.traces))
}

/// Guarded choice: a waiting period of stutters in which no guard is
/// entailed, then a continuation from `S_h` once the input entails `c_h`;
/// plus the sequences that wait forever.
pub fn sem_guarded_choice(lat: &Lattice, guards: &[(Constraint, SequenceSet)], k: usize) -> SequenceSet {
    let blocked = |d: Constraint| guards.iter().all(|(c, _)| !lat.entails(d, *c));
    let by_input: Vec<HashMap<Constraint, Vec<&ReactiveSequence>>> = guards
        .iter()
        .map(|(_, s)| {
            let mut m: HashMap<Constraint, Vec<&ReactiveSequence>> = HashMap::new();
            for seq in s {
                m.entry(seq.first().input).or_default().push(seq);
            }
            m
        })
        .collect();
    let mut out = SequenceSet::new();
    let mut prefix: Vec<Reaction> = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn go(
        lat: &Lattice,
        guards: &[(Constraint, SequenceSet)],
        by_input: &[HashMap<Constraint, Vec<&ReactiveSequence>>],
        blocked: &dyn Fn(Constraint) -> bool,
        k: usize,
        prev: Option<Constraint>,
        prefix: &mut Vec<Reaction>,
        out: &mut SequenceSet,
    ) {
        let candidates: Vec<Constraint> = match prev {
            Some(p) => lat.above(p).to_vec(),
            None => lat.elements().collect(),
        };
        for d in candidates {
            prefix.push(Reaction::stutter(d));
            let m = prefix.len();
            if blocked(d) {
                out.insert(ReactiveSequence(prefix.clone()));
                if m < k {
                    go(lat, guards, by_input, blocked, k, Some(d), prefix, out);
                }
            } else if m < k {
                for (h, (c, _)) in guards.iter().enumerate() {
                    if !lat.entails(d, *c) {
                        continue;
                    }
                    for &c2 in lat.above(d) {
                        let Some(conts) = by_input[h].get(&c2) else {
                            continue;
                        };
                        for s in conts {
                            if m + s.len() <= k {
                                let mut v = prefix.clone();
                                v.extend_from_slice(s.reactions());
                                out.insert(ReactiveSequence(v));
                            }
                        }
                    }
                }
            }
            prefix.pop();
        }
    }
    go(lat, guards, &by_input, &blocked, k, None, &mut prefix, &mut out);
    out
}

/// Pointwise parallel composition of sequences with identical inputs and
/// length; the shared final stutter follows from the identical inputs.
pub fn sem_parallel(lat: &Lattice, s1: &SequenceSet, s2: &SequenceSet) -> SequenceSet {
    let mut by_inputs: HashMap<Vec<Constraint>, Vec<&ReactiveSequence>> = HashMap::new();
    for s in s2 {
        by_inputs.entry(s.inputs().collect()).or_default().push(s);
    }
    let mut out = SequenceSet::new();
    for a in s1 {
        let key: Vec<Constraint> = a.inputs().collect();
        let Some(bs) = by_inputs.get(&key) else {
            continue;
        };
        for b in bs {
            let v = a
                .reactions()
                .iter()
                .zip(b.reactions())
                .map(|(r1, r2)| Reaction::new(r1.input, lat.lub(r1.output, r2.output)))
                .collect();
            out.insert(ReactiveSequence(v));
        }
    }
    out
}

/// Sequences of `S1` whose first input entails `c`, and of `S2` whose first
/// input does not.
pub fn sem_now(lat: &Lattice, c: Constraint, s1: &SequenceSet, s2: &SequenceSet) -> SequenceSet {
    s1.iter()
        .filter(|s| lat.entails(s.first().input, c))
        .chain(s2.iter().filter(|s| !lat.entails(s.first().input, c)))
        .cloned()
        .collect()
}

/// `∃x s`, applied pointwise.
pub fn project(lat: &Lattice, x: VarId, s: &ReactiveSequence) -> ReactiveSequence {
    ReactiveSequence(
        s.reactions()
            .iter()
            .map(|r| Reaction::new(lat.exists_var(x, r.input), lat.exists_var(x, r.output)))
            .collect(),
    )
}

/// No input carries information on `x` that the sequence did not produce
/// itself earlier.
pub fn x_connected(lat: &Lattice, s: &ReactiveSequence, x: VarId) -> bool {
    let rs = s.reactions();
    lat.exists_var(x, rs[0].input) == rs[0].input
        && rs
            .windows(2)
            .all(|w| lat.lub(lat.exists_var(x, w[1].input), w[0].output) == w[1].input)
}

/// No step adds information on `x`.
pub fn x_invariant(lat: &Lattice, s: &ReactiveSequence, x: VarId) -> bool {
    s.reactions()
        .iter()
        .all(|r| r.output == lat.lub(lat.exists_var(x, r.output), r.input))
}

/// Hiding: every `x`-invariant sequence with the same `x`-projection as some
/// `x`-connected member of `S`.
///
/// Candidates are generated position by position: invariance fixes each
/// output from its input and the projected output, so only inputs in the
/// projection's preimage are enumerated.
pub fn sem_hide(lat: &Lattice, x: VarId, s: &SequenceSet, k: usize) -> SequenceSet {
    let keys: BTreeSet<ReactiveSequence> = s
        .iter()
        .filter(|s2| s2.len() <= k && x_connected(lat, s2, x))
        .map(|s2| project(lat, x, s2))
        .collect();
    let mut preimage: HashMap<Constraint, Vec<Constraint>> = HashMap::new();
    for c in lat.elements() {
        preimage.entry(lat.exists_var(x, c)).or_default().push(c);
    }
    let mut out = SequenceSet::new();
    let mut stack: Vec<Reaction> = Vec::new();

    fn go(
        lat: &Lattice,
        x: VarId,
        key: &[Reaction],
        preimage: &HashMap<Constraint, Vec<Constraint>>,
        stack: &mut Vec<Reaction>,
        out: &mut SequenceSet,
    ) {
        let i = stack.len();
        if i == key.len() {
            out.insert(ReactiveSequence(stack.clone()));
            return;
        }
        let Some(inputs) = preimage.get(&key[i].input) else {
            return;
        };
        for &c in inputs {
            if let Some(prev) = stack.last() {
                if !lat.entails(c, prev.output) {
                    continue;
                }
            }
            let d = lat.lub(key[i].output, c);
            if lat.exists_var(x, d) != key[i].output {
                continue;
            }
            stack.push(Reaction::new(c, d));
            go(lat, x, key, preimage, stack, out);
            stack.pop();
        }
    }
    for key in &keys {
        go(lat, x, key.reactions(), &preimage, &mut stack, &mut out);
    }
    out.retain(|s2| s2.is_well_formed(lat));
    out
}
