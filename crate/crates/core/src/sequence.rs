//! Timed reactive sequences and their export formats.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::constraint::{Constraint, Lattice};

/// One reaction `⟨input, output⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Reaction {
    pub input: Constraint,
    pub output: Constraint,
}

impl Reaction {
    pub fn new(input: Constraint, output: Constraint) -> Self {
        Reaction { input, output }
    }

    pub fn stutter(c: Constraint) -> Self {
        Reaction { input: c, output: c }
    }

    pub fn is_stutter(&self) -> bool {
        self.input == self.output
    }
}

/// A nonempty sequence of reactions ending in a stuttering pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReactiveSequence(pub Vec<Reaction>);

pub type SequenceSet = BTreeSet<ReactiveSequence>;

impl ReactiveSequence {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.0
    }

    pub fn first(&self) -> Reaction {
        self.0[0]
    }

    pub fn last(&self) -> Reaction {
        *self.0.last().expect("reactive sequences are nonempty")
    }

    pub fn inputs(&self) -> impl Iterator<Item = Constraint> + '_ {
        self.0.iter().map(|r| r.input)
    }

    /// `⟨c, d⟩ · self`
    pub fn prepend(&self, r: Reaction) -> ReactiveSequence {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(r);
        v.extend_from_slice(&self.0);
        ReactiveSequence(v)
    }

    pub fn concat(&self, tail: &ReactiveSequence) -> ReactiveSequence {
        let mut v = self.0.clone();
        v.extend_from_slice(&tail.0);
        ReactiveSequence(v)
    }

    /// Membership in the set of reactive sequences: every output entails its
    /// input, every input entails the previous output, and the last pair
    /// stutters.
    pub fn is_well_formed(&self, lat: &Lattice) -> bool {
        let Some(last) = self.0.last() else {
            return false;
        };
        last.is_stutter()
            && self.0.iter().all(|r| lat.entails(r.output, r.input))
            && self.0.windows(2).all(|w| lat.entails(w[1].input, w[0].output))
    }

    pub fn display<'a>(&'a self, lat: &'a Lattice) -> SequenceDisplay<'a> {
        SequenceDisplay { seq: self, lat }
    }

    /// `t=<i> in=<c> out=<d>` lines, one per step.
    pub fn trace_lines(&self, lat: &Lattice) -> Vec<String> {
        self.0
            .iter()
            .enumerate()
            .map(|(i, r)| format!("t={} in={} out={}", i + 1, lat.show(r.input), lat.show(r.output)))
            .collect()
    }

    pub fn to_record(&self, lat: &Lattice) -> Vec<StepRecord> {
        self.0
            .iter()
            .enumerate()
            .map(|(i, r)| StepRecord {
                t: i + 1,
                input: lat.name(r.input).to_string(),
                output: lat.name(r.output).to_string(),
            })
            .collect()
    }
}

/// Machine-readable form of one step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub t: usize,
    #[serde(rename = "in")]
    pub input: String,
    #[serde(rename = "out")]
    pub output: String,
}

pub struct SequenceDisplay<'a> {
    seq: &'a ReactiveSequence,
    lat: &'a Lattice,
}

impl fmt::Display for SequenceDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.seq.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "<{}, {}>", self.lat.show(r.input), self.lat.show(r.output))?;
        }
        Ok(())
    }
}

/// Text export: records separated by blank lines.
pub fn export_text<'a>(lat: &Lattice, seqs: impl IntoIterator<Item = &'a ReactiveSequence>) -> String {
    let mut out = String::new();
    for (i, s) in seqs.into_iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for line in s.trace_lines(lat) {
            out.push_str(&line);
            out.push('\n');
        }
    }
    out
}

/// JSON export: an array of records, each an array of steps.
pub fn export_json<'a>(lat: &Lattice, seqs: impl IntoIterator<Item = &'a ReactiveSequence>) -> Vec<Vec<StepRecord>> {
    seqs.into_iter().map(|s| s.to_record(lat)).collect()
}

/// All stuttering sequences `⟨c1,c1⟩⋯⟨cn,cn⟩` with `1 ≤ n ≤ k` whose first
/// input is `c` or, when `from` is `None`, anything.
pub fn stutter_sequences(lat: &Lattice, from: Option<Constraint>, k: usize) -> SequenceSet {
    let mut out = SequenceSet::new();
    let starts: Vec<Constraint> = match from {
        Some(c) => lat.above(c).to_vec(),
        None => lat.elements().collect(),
    };
    let mut stack: Vec<Reaction> = Vec::new();
    fn go(lat: &Lattice, k: usize, stack: &mut Vec<Reaction>, out: &mut SequenceSet) {
        out.insert(ReactiveSequence(stack.clone()));
        if stack.len() == k {
            return;
        }
        let prev = stack.last().unwrap().output;
        for &c in lat.above(prev) {
            stack.push(Reaction::stutter(c));
            go(lat, k, stack, out);
            stack.pop();
        }
    }
    if k == 0 {
        return out;
    }
    for c in starts {
        stack.push(Reaction::stutter(c));
        go(lat, k, &mut stack, &mut out);
        stack.pop();
    }
    out
}

/// Every reactive sequence of length at most `k`.
pub fn universe(lat: &Lattice, k: usize) -> SequenceSet {
    let mut out = SequenceSet::new();
    let mut stack: Vec<Reaction> = Vec::new();
    fn go(lat: &Lattice, k: usize, prev: Option<Constraint>, stack: &mut Vec<Reaction>, out: &mut SequenceSet) {
        let inputs: Vec<Constraint> = match prev {
            Some(d) => lat.above(d).to_vec(),
            None => lat.elements().collect(),
        };
        for c in inputs {
            stack.push(Reaction::stutter(c));
            out.insert(ReactiveSequence(stack.clone()));
            stack.pop();
            if stack.len() + 1 < k {
                for &d in lat.above(c) {
                    stack.push(Reaction::new(c, d));
                    go(lat, k, Some(d), stack, out);
                    stack.pop();
                }
            }
        }
    }
    if k > 0 {
        go(lat, k, None, &mut stack, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::HerbrandEqSystem;

    fn lat() -> Lattice {
        Lattice::from_system(&HerbrandEqSystem::new(["x"], ["a"])).unwrap()
    }

    #[test]
    fn stutters_of_length_one() {
        let l = lat();
        assert_eq!(stutter_sequences(&l, None, 1).len(), 3);
    }

    #[test]
    fn universe_members_are_well_formed() {
        let l = lat();
        let u = universe(&l, 3);
        assert!(u.iter().all(|s| s.is_well_formed(&l) && s.len() <= 3));
        // brute force over all triples of pairs
        let mut count = 0;
        let elems: Vec<Constraint> = l.elements().collect();
        for n in 1..=3usize {
            let pairs: Vec<(Constraint, Constraint)> =
                elems.iter().flat_map(|&a| elems.iter().map(move |&b| (a, b))).collect();
            let mut idx = vec![0usize; n];
            loop {
                let s = ReactiveSequence(idx.iter().map(|&i| Reaction::new(pairs[i].0, pairs[i].1)).collect());
                if s.is_well_formed(&l) {
                    count += 1;
                    assert!(u.contains(&s));
                }
                let mut j = 0;
                while j < n {
                    idx[j] += 1;
                    if idx[j] < pairs.len() {
                        break;
                    }
                    idx[j] = 0;
                    j += 1;
                }
                if j == n {
                    break;
                }
            }
        }
        assert_eq!(count, u.len());
    }

    #[test]
    fn trace_text() {
        let l = lat();
        let xa = l.atom("x", "a").unwrap();
        let s = ReactiveSequence(vec![Reaction::new(l.bottom(), xa), Reaction::stutter(xa)]);
        assert_eq!(s.trace_lines(&l), vec!["t=1 in=true out=x=a", "t=2 in=x=a out=x=a"]);
    }
}
