use std::fmt;

use serde::Serialize;

use crate::constraint::{Constraint, Lattice};
use crate::sequence::{Reaction, ReactiveSequence};
use crate::syntax::{INPUT, OUTPUT};

/// A finite sequence of predicate assignments. Column 0 is `I`, column 1 is
/// `O`; further columns are named by `preds`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Model {
    pub preds: Vec<String>,
    pub steps: Vec<Vec<Constraint>>,
}

impl Model {
    /// The I/O model of a reactive sequence.
    pub fn from_sequence(s: &ReactiveSequence) -> Model {
        Model {
            preds: vec![INPUT.to_string(), OUTPUT.to_string()],
            steps: s.reactions().iter().map(|r| vec![r.input, r.output]).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn column(&self, pred: &str) -> Option<usize> {
        self.preds.iter().position(|p| p == pred)
    }

    pub fn value(&self, t: usize, pred: &str) -> Option<Constraint> {
        self.column(pred).map(|j| self.steps[t][j])
    }

    /// The I/O projection as a reactive sequence.
    pub fn io_sequence(&self) -> ReactiveSequence {
        ReactiveSequence(self.steps.iter().map(|v| Reaction::new(v[0], v[1])).collect())
    }

    pub fn table<'a>(&'a self, lat: &'a Lattice) -> ModelTable<'a> {
        ModelTable { model: self, lat }
    }
}

/// The two monotonicity restrictions on assignment sequences: every column
/// grows, and each input entails the previous output. Also checks the
/// per-assignment restriction `O ⊢ I`.
pub fn is_monotone(lat: &Lattice, m: &Model) -> bool {
    let well_shaped = m.preds.len() >= 2
        && m.preds[0] == INPUT
        && m.preds[1] == OUTPUT
        && !m.steps.is_empty()
        && m.steps.iter().all(|v| v.len() == m.preds.len());
    well_shaped
        && m.steps.iter().all(|v| lat.entails(v[1], v[0]))
        && m.steps.windows(2).all(|w| {
            w[1].iter().zip(&w[0]).all(|(next, prev)| lat.entails(*next, *prev)) && lat.entails(w[1][0], w[0][1])
        })
}

/// Monotone, and the last assignment stutters: `v_n(O) = v_n(I)`.
///
/// The last assignment stands for its own infinite repetition, and the
/// repetition must again satisfy `v_{n+1}(I) ⊢ v_n(O)`; that forces the
/// final output to coincide with the final input.
pub fn admissible(lat: &Lattice, m: &Model) -> bool {
    is_monotone(lat, m) && m.steps.last().is_some_and(|v| v[0] == v[1])
}

/// `○ρ`: drops the first assignment, except that a singleton is its own
/// successor.
pub fn next_seq(m: &Model) -> Model {
    let steps = if m.steps.len() <= 1 {
        m.steps.clone()
    } else {
        m.steps[1..].to_vec()
    };
    Model {
        preds: m.preds.clone(),
        steps,
    }
}

/// Every monotone column of length `n`, in a fixed order.
pub fn monotone_columns(lat: &Lattice, n: usize) -> Vec<Vec<Constraint>> {
    let mut out = Vec::new();
    let mut col = Vec::with_capacity(n);
    fn go(lat: &Lattice, n: usize, col: &mut Vec<Constraint>, out: &mut Vec<Vec<Constraint>>) {
        if col.len() == n {
            out.push(col.clone());
            return;
        }
        let cands: Vec<Constraint> = match col.last() {
            Some(&c) => lat.above(c).to_vec(),
            None => lat.elements().collect(),
        };
        for c in cands {
            col.push(c);
            go(lat, n, col, out);
            col.pop();
        }
    }
    if n > 0 {
        go(lat, n, &mut col, &mut out);
    }
    out
}

/// Every admissible model of length `1..=k` over `I`, `O` and `extra`, by
/// increasing length.
pub fn admissible_models(lat: &Lattice, extra: &[String], k: usize) -> Vec<Model> {
    let mut preds = vec![INPUT.to_string(), OUTPUT.to_string()];
    preds.extend(extra.iter().cloned());
    let mut out = Vec::new();
    for n in 1..=k {
        let io = io_columns(lat, n);
        let cols = monotone_columns(lat, n);
        for (ic, oc) in &io {
            let mut idx = vec![0usize; extra.len()];
            loop {
                let steps = (0..n)
                    .map(|t| {
                        let mut v = vec![ic[t], oc[t]];
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
    }
    out
}

/// Odometer increment; false once every digit has wrapped.
pub(crate) fn advance(idx: &mut [usize], base: usize) -> bool {
    for d in idx.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Every admissible `(I, O)` column pair of length `n`.
pub fn io_columns(lat: &Lattice, n: usize) -> Vec<(Vec<Constraint>, Vec<Constraint>)> {
    let mut out = Vec::new();
    let mut ic = Vec::with_capacity(n);
    let mut oc = Vec::with_capacity(n);
    fn go(
        lat: &Lattice,
        n: usize,
        ic: &mut Vec<Constraint>,
        oc: &mut Vec<Constraint>,
        out: &mut Vec<(Vec<Constraint>, Vec<Constraint>)>,
    ) {
        let t = ic.len();
        if t == n {
            out.push((ic.clone(), oc.clone()));
            return;
        }
        let inputs: Vec<Constraint> = match oc.last() {
            Some(&o) => lat.above(o).to_vec(),
            None => lat.elements().collect(),
        };
        for i in inputs {
            if t + 1 == n {
                ic.push(i);
                oc.push(i);
                go(lat, n, ic, oc, out);
                ic.pop();
                oc.pop();
                continue;
            }
            for &o in lat.above(i) {
                ic.push(i);
                oc.push(o);
                go(lat, n, ic, oc, out);
                ic.pop();
                oc.pop();
            }
        }
    }
    if n > 0 {
        go(lat, n, &mut ic, &mut oc, &mut out);
    }
    out
}

pub struct ModelTable<'a> {
    model: &'a Model,
    lat: &'a Lattice,
}

impl fmt::Display for ModelTable<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.model;
        let cells: Vec<Vec<String>> = m
            .steps
            .iter()
            .map(|v| v.iter().map(|c| self.lat.name(*c).to_string()).collect())
            .collect();
        let tw = m.steps.len().to_string().len().max(1);
        let widths: Vec<usize> = (0..m.preds.len())
            .map(|j| {
                cells
                    .iter()
                    .map(|r| r[j].len())
                    .chain([m.preds[j].len()])
                    .max()
                    .unwrap_or(1)
            })
            .collect();
        write!(f, "{:>tw$}", "t")?;
        for (j, p) in m.preds.iter().enumerate() {
            write!(f, " | {:<w$}", p, w = widths[j])?;
        }
        writeln!(f)?;
        for (t, row) in cells.iter().enumerate() {
            write!(f, "{:>tw$}", t + 1)?;
            for (j, cell) in row.iter().enumerate() {
                write!(f, " | {:<w$}", cell, w = widths[j])?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
