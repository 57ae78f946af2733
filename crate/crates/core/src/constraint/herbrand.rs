//! Equalities over a finite Herbrand universe of constants.
//!
//! A consistent constraint is a partition of the variables where each block
//! is bound to at most one constant and no two blocks share a constant. The
//! canonical form stores, for every variable, either the constant of its
//! block or the smallest variable of its block.

use std::collections::BTreeSet;

use super::{ConstraintError, CylindricSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rep {
    Var(usize),
    Const(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HerbrandConstraint {
    Eqs(Vec<Rep>),
    False,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HerbrandEqSystem {
    vars: Vec<String>,
    consts: Vec<String>,
}

impl HerbrandEqSystem {
    pub fn new<V, C>(vars: V, consts: C) -> Self
    where
        V: IntoIterator,
        V::Item: Into<String>,
        C: IntoIterator,
        C::Item: Into<String>,
    {
        HerbrandEqSystem {
            vars: vars.into_iter().map(Into::into).collect(),
            consts: consts.into_iter().map(Into::into).collect(),
        }
    }

    fn var_index(&self, x: &str) -> Result<usize, ConstraintError> {
        self.vars
            .iter()
            .position(|v| v == x)
            .ok_or_else(|| ConstraintError::UnknownVariable(x.to_string()))
    }

    fn term(&self, name: &str) -> Result<Rep, ConstraintError> {
        if let Some(i) = self.vars.iter().position(|v| v == name) {
            return Ok(Rep::Var(i));
        }
        if let Some(k) = self.consts.iter().position(|c| c == name) {
            return Ok(Rep::Const(k));
        }
        Err(ConstraintError::UnknownName(name.to_string()))
    }

    fn identity(&self) -> Vec<Rep> {
        (0..self.vars.len()).map(Rep::Var).collect()
    }

    /// Builds the canonical constraint from an arbitrary list of equations by
    /// union-find closure.
    pub fn from_equations(&self, eqs: &[(Rep, Rep)]) -> HerbrandConstraint {
        let n = self.vars.len();
        let m = self.consts.len();
        // nodes 0..n are variables, n..n+m constants
        let mut parent: Vec<usize> = (0..n + m).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        let node = |r: Rep| match r {
            Rep::Var(i) => i,
            Rep::Const(k) => n + k,
        };
        for &(a, b) in eqs {
            let ra = find(&mut parent, node(a));
            let rb = find(&mut parent, node(b));
            if ra != rb {
                let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
                parent[hi] = lo;
            }
        }
        // a block holding two constants is inconsistent
        let mut const_root = vec![usize::MAX; n + m];
        for k in 0..m {
            let r = find(&mut parent, n + k);
            if const_root[r] != usize::MAX {
                return HerbrandConstraint::False;
            }
            const_root[r] = k;
        }
        let mut reps = Vec::with_capacity(n);
        for i in 0..n {
            let r = find(&mut parent, i);
            if const_root[r] != usize::MAX {
                reps.push(Rep::Const(const_root[r]));
            } else {
                // roots are always the smallest index of their block
                reps.push(Rep::Var(r));
            }
        }
        HerbrandConstraint::Eqs(reps)
    }

    fn equations_of(reps: &[Rep]) -> Vec<(Rep, Rep)> {
        reps.iter()
            .enumerate()
            .filter(|&(i, r)| *r != Rep::Var(i))
            .map(|(i, r)| (Rep::Var(i), *r))
            .collect()
    }

    fn holds(reps: &[Rep], a: Rep, b: Rep) -> bool {
        let norm = |r: Rep| match r {
            Rep::Var(i) => reps[i],
            c => c,
        };
        norm(a) == norm(b)
    }

    /// Number of equations needed to state the constraint; used to order the
    /// enumeration from `true` upwards.
    fn rank(c: &HerbrandConstraint) -> usize {
        match c {
            HerbrandConstraint::False => usize::MAX,
            HerbrandConstraint::Eqs(reps) => Self::equations_of(reps).len(),
        }
    }
}

impl CylindricSystem for HerbrandEqSystem {
    type Elem = HerbrandConstraint;

    fn variables(&self) -> &[String] {
        &self.vars
    }

    fn constants(&self) -> &[String] {
        &self.consts
    }

    fn bottom(&self) -> HerbrandConstraint {
        HerbrandConstraint::Eqs(self.identity())
    }

    fn top(&self) -> HerbrandConstraint {
        HerbrandConstraint::False
    }

    fn entails(&self, c: &HerbrandConstraint, d: &HerbrandConstraint) -> bool {
        match (c, d) {
            (HerbrandConstraint::False, _) => true,
            (_, HerbrandConstraint::False) => false,
            (HerbrandConstraint::Eqs(cr), HerbrandConstraint::Eqs(dr)) => {
                Self::equations_of(dr).into_iter().all(|(a, b)| Self::holds(cr, a, b))
            }
        }
    }

    fn lub(&self, c: &HerbrandConstraint, d: &HerbrandConstraint) -> HerbrandConstraint {
        match (c, d) {
            (HerbrandConstraint::Eqs(cr), HerbrandConstraint::Eqs(dr)) => {
                let mut eqs = Self::equations_of(cr);
                eqs.extend(Self::equations_of(dr));
                self.from_equations(&eqs)
            }
            _ => HerbrandConstraint::False,
        }
    }

    fn exists_var(&self, x: &str, c: &HerbrandConstraint) -> Result<HerbrandConstraint, ConstraintError> {
        let xi = self.var_index(x)?;
        let reps = match c {
            HerbrandConstraint::False => return Ok(HerbrandConstraint::False),
            HerbrandConstraint::Eqs(reps) => reps,
        };
        // keep every equation between the remaining variables and constants
        let mut eqs = Vec::new();
        for i in 0..reps.len() {
            if i == xi {
                continue;
            }
            for j in 0..reps.len() {
                if j != xi && j < i && reps[i] == reps[j] {
                    eqs.push((Rep::Var(j), Rep::Var(i)));
                }
            }
            if let Rep::Const(k) = reps[i] {
                eqs.push((Rep::Var(i), Rep::Const(k)));
            }
        }
        Ok(self.from_equations(&eqs))
    }

    fn diagonal(&self, x: &str, y: &str) -> Result<Option<HerbrandConstraint>, ConstraintError> {
        let a = self.var_index(x)?;
        let b = self.var_index(y)?;
        Ok(Some(self.from_equations(&[(Rep::Var(a), Rep::Var(b))])))
    }

    fn enumerate(&self) -> Result<Vec<HerbrandConstraint>, ConstraintError> {
        let n = self.vars.len();
        let m = self.consts.len();
        let mut out = BTreeSet::new();
        // restricted growth strings give every set partition exactly once
        let mut blocks = vec![0usize; n];
        fn partitions(i: usize, max: usize, blocks: &mut Vec<usize>, acc: &mut Vec<Vec<usize>>) {
            if i == blocks.len() {
                acc.push(blocks.clone());
                return;
            }
            for b in 0..=max {
                blocks[i] = b;
                partitions(i + 1, max.max(b + 1), blocks, acc);
            }
        }
        let mut all = Vec::new();
        partitions(0, 0, &mut blocks, &mut all);
        for part in all {
            let nblocks = part.iter().copied().max().map_or(0, |b| b + 1);
            // injective partial labelling of blocks by constants
            let mut label = vec![None; nblocks];
            fn labels(
                b: usize,
                used: &mut Vec<bool>,
                label: &mut Vec<Option<usize>>,
                f: &mut dyn FnMut(&[Option<usize>]),
            ) {
                if b == label.len() {
                    f(label);
                    return;
                }
                label[b] = None;
                labels(b + 1, used, label, f);
                for k in 0..used.len() {
                    if !used[k] {
                        used[k] = true;
                        label[b] = Some(k);
                        labels(b + 1, used, label, f);
                        used[k] = false;
                    }
                }
                label[b] = None;
            }
            let mut used = vec![false; m];
            labels(0, &mut used, &mut label, &mut |lab| {
                let mut eqs = Vec::new();
                let mut first_of_block = vec![usize::MAX; nblocks];
                for (i, &b) in part.iter().enumerate() {
                    if first_of_block[b] == usize::MAX {
                        first_of_block[b] = i;
                    } else {
                        eqs.push((Rep::Var(first_of_block[b]), Rep::Var(i)));
                    }
                    if let Some(k) = lab[b] {
                        eqs.push((Rep::Var(i), Rep::Const(k)));
                    }
                }
                out.insert(self.from_equations(&eqs));
            });
        }
        out.insert(HerbrandConstraint::False);
        let mut elems: Vec<_> = out.into_iter().collect();
        elems.sort_by_key(|c| (Self::rank(c), c.clone()));
        Ok(elems)
    }

    fn render(&self, c: &HerbrandConstraint) -> String {
        let reps = match c {
            HerbrandConstraint::False => return "false".to_string(),
            HerbrandConstraint::Eqs(reps) => reps,
        };
        let eqs: Vec<String> = Self::equations_of(reps)
            .into_iter()
            .map(|(a, b)| {
                let name = |r: Rep| match r {
                    Rep::Var(i) => self.vars[i].clone(),
                    Rep::Const(k) => self.consts[k].clone(),
                };
                match (a, b) {
                    (Rep::Var(i), Rep::Var(j)) => {
                        format!("{}={}", self.vars[i.min(j)], self.vars[i.max(j)])
                    }
                    _ => format!("{}={}", name(a), name(b)),
                }
            })
            .collect();
        if eqs.is_empty() {
            "true".to_string()
        } else {
            eqs.join(" /\\ ")
        }
    }

    fn atom(&self, lhs: &str, rhs: &str) -> Result<HerbrandConstraint, ConstraintError> {
        let a = self.term(lhs)?;
        let b = self.term(rhs)?;
        Ok(self.from_equations(&[(a, b)]))
    }
}
