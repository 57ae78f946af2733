use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use super::{ConstraintError, CylindricSystem};

/// Index of a program variable in a [`Lattice`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct VarId(pub u16);

/// An element of a finite constraint lattice.
///
/// The index follows the system's enumeration order, so equal constraints
/// have equal indices and the order is stable across runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Constraint(pub u16);

impl Constraint {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Precomputed operation tables for a finite cylindric system.
pub struct Lattice {
    vars: Vec<String>,
    consts: Vec<String>,
    names: Vec<String>,
    size: usize,
    bottom: Constraint,
    top: Constraint,
    lub: Vec<u16>,
    entails: Vec<bool>,
    exists: Vec<Vec<u16>>,
    diag: Option<Vec<u16>>,
    atoms: HashMap<(String, String), Constraint>,
    upset: Vec<Vec<Constraint>>,
}

const MAX_ELEMS: usize = u16::MAX as usize;

impl Lattice {
    pub fn from_system<S: CylindricSystem>(sys: &S) -> Result<Lattice, ConstraintError> {
        let elems = sys.enumerate()?;
        let size = elems.len();
        if size > MAX_ELEMS {
            return Err(ConstraintError::TooLarge(size));
        }
        let index: HashMap<&S::Elem, u16> = elems.iter().enumerate().map(|(i, e)| (e, i as u16)).collect();
        let id = |e: &S::Elem| -> u16 { *index.get(e).expect("cylindric operation left the enumerated carrier") };
        let mut lub = vec![0u16; size * size];
        let mut entails = vec![false; size * size];
        for (i, c) in elems.iter().enumerate() {
            for (j, d) in elems.iter().enumerate() {
                lub[i * size + j] = id(&sys.lub(c, d));
                entails[i * size + j] = sys.entails(c, d);
            }
        }
        let vars = sys.variables().to_vec();
        let mut exists = Vec::with_capacity(vars.len());
        for x in &vars {
            let mut row = Vec::with_capacity(size);
            for c in &elems {
                row.push(id(&sys.exists_var(x, c)?));
            }
            exists.push(row);
        }
        let mut diag = Some(Vec::with_capacity(vars.len() * vars.len()));
        'outer: for x in &vars {
            for y in &vars {
                match sys.diagonal(x, y)? {
                    Some(d) => diag.as_mut().unwrap().push(id(&d)),
                    None => {
                        diag = None;
                        break 'outer;
                    }
                }
            }
        }
        let consts = sys.constants().to_vec();
        let mut atoms = HashMap::new();
        let names_all: Vec<&String> = vars.iter().chain(consts.iter()).collect();
        for l in &names_all {
            for r in &names_all {
                if let Ok(e) = sys.atom(l, r) {
                    atoms.insert(((*l).clone(), (*r).clone()), Constraint(id(&e)));
                }
            }
        }
        let names = elems.iter().map(|e| sys.render(e)).collect();
        let bottom = Constraint(id(&sys.bottom()));
        let top = Constraint(id(&sys.top()));
        let upset = (0..size)
            .map(|i| {
                (0..size)
                    .filter(|&j| entails[j * size + i])
                    .map(|j| Constraint(j as u16))
                    .collect()
            })
            .collect();
        Ok(Lattice {
            vars,
            consts,
            names,
            size,
            bottom,
            top,
            lub,
            entails,
            exists,
            diag,
            atoms,
            upset,
        })
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn elements(&self) -> impl DoubleEndedIterator<Item = Constraint> + ExactSizeIterator {
        (0..self.size as u16).map(Constraint)
    }

    /// `true`, the least informative constraint.
    pub fn bottom(&self) -> Constraint {
        self.bottom
    }

    /// `false`, the inconsistent constraint.
    pub fn top(&self) -> Constraint {
        self.top
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn consts(&self) -> &[String] {
        &self.consts
    }

    pub fn var(&self, name: &str) -> Result<VarId, ConstraintError> {
        self.vars
            .iter()
            .position(|v| v == name)
            .map(|i| VarId(i as u16))
            .ok_or_else(|| ConstraintError::UnknownVariable(name.to_string()))
    }

    pub fn var_name(&self, x: VarId) -> &str {
        &self.vars[x.0 as usize]
    }

    pub fn is_var(&self, name: &str) -> bool {
        self.vars.iter().any(|v| v == name)
    }

    pub fn is_const(&self, name: &str) -> bool {
        self.consts.iter().any(|v| v == name)
    }

    pub fn entails(&self, c: Constraint, d: Constraint) -> bool {
        self.entails[c.index() * self.size + d.index()]
    }

    pub fn lub(&self, c: Constraint, d: Constraint) -> Constraint {
        Constraint(self.lub[c.index() * self.size + d.index()])
    }

    pub fn exists_var(&self, x: VarId, c: Constraint) -> Constraint {
        Constraint(self.exists[x.0 as usize][c.index()])
    }

    pub fn diagonal(&self, x: VarId, y: VarId) -> Result<Constraint, ConstraintError> {
        let n = self.vars.len();
        match &self.diag {
            Some(d) => Ok(Constraint(d[x.0 as usize * n + y.0 as usize])),
            None => Err(ConstraintError::NoDiagonal(
                self.var_name(x).to_string(),
                self.var_name(y).to_string(),
            )),
        }
    }

    pub fn has_diagonals(&self) -> bool {
        self.diag.is_some()
    }

    /// The primitive equation `lhs = rhs`.
    pub fn atom(&self, lhs: &str, rhs: &str) -> Result<Constraint, ConstraintError> {
        if let Some(c) = self.atoms.get(&(lhs.to_string(), rhs.to_string())) {
            return Ok(*c);
        }
        let unknown = if self.is_var(lhs) || self.is_const(lhs) {
            rhs
        } else {
            lhs
        };
        Err(ConstraintError::UnknownName(unknown.to_string()))
    }

    /// Every element that entails `c`, in enumeration order.
    pub fn above(&self, c: Constraint) -> &[Constraint] {
        &self.upset[c.index()]
    }

    pub fn name(&self, c: Constraint) -> &str {
        &self.names[c.index()]
    }

    pub fn show(&self, c: Constraint) -> Shown<'_> {
        Shown(self, c)
    }

    /// Looks up a constraint by its canonical text.
    pub fn by_name(&self, text: &str) -> Option<Constraint> {
        self.names.iter().position(|n| n == text).map(|i| Constraint(i as u16))
    }
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Lattice")
            .field("vars", &self.vars)
            .field("consts", &self.consts)
            .field("size", &self.size)
            .finish()
    }
}

pub struct Shown<'a>(&'a Lattice, Constraint);

impl fmt::Display for Shown<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0.name(self.1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::HerbrandEqSystem;

    fn lat() -> Lattice {
        Lattice::from_system(&HerbrandEqSystem::new(["x", "y"], ["a", "b"])).unwrap()
    }

    #[test]
    fn entailment_examples() {
        let l = lat();
        let xa = l.atom("x", "a").unwrap();
        let yb = l.atom("y", "b").unwrap();
        let xy = l.atom("x", "y").unwrap();
        let ya = l.atom("y", "a").unwrap();
        assert!(l.entails(l.lub(xa, yb), yb));
        assert!(!l.entails(l.bottom(), xa));
        assert!(l.entails(l.lub(xy, ya), xa));
    }

    #[test]
    fn lub_examples() {
        let l = lat();
        let xa = l.atom("x", "a").unwrap();
        let xb = l.atom("x", "b").unwrap();
        assert_eq!(l.lub(xa, l.bottom()), xa);
        assert_eq!(l.lub(xa, xa), xa);
        assert_eq!(l.lub(xa, xb), l.top());
    }

    #[test]
    fn projection_examples() {
        let l = lat();
        let x = l.var("x").unwrap();
        let xa = l.atom("x", "a").unwrap();
        let yb = l.atom("y", "b").unwrap();
        let xy = l.atom("x", "y").unwrap();
        assert_eq!(l.exists_var(x, l.lub(xa, yb)), yb);
        assert_eq!(l.exists_var(x, l.bottom()), l.bottom());
        assert_eq!(l.exists_var(x, xy), l.bottom());
        assert_eq!(l.exists_var(x, l.top()), l.top());
        assert!(matches!(l.var("w"), Err(ConstraintError::UnknownVariable(_))));
    }

    #[test]
    fn diagonal_examples() {
        let l = Lattice::from_system(&HerbrandEqSystem::new(["x", "y", "z"], ["a"])).unwrap();
        let (x, y, z) = (l.var("x").unwrap(), l.var("y").unwrap(), l.var("z").unwrap());
        assert!(l.entails(l.bottom(), l.diagonal(x, x).unwrap()));
        let dxz = l.diagonal(x, z).unwrap();
        let dzy = l.diagonal(z, y).unwrap();
        assert_eq!(l.exists_var(z, l.lub(dxz, dzy)), l.diagonal(x, y).unwrap());
        let dxy = l.diagonal(x, y).unwrap();
        let xa = l.atom("x", "a").unwrap();
        let ya = l.atom("y", "a").unwrap();
        assert!(l.entails(l.lub(dxy, l.exists_var(x, l.lub(xa, dxy))), ya));
        assert_eq!(dxy, l.atom("x", "y").unwrap());
    }

    #[test]
    fn names_round_trip() {
        let l = lat();
        for c in l.elements() {
            assert_eq!(l.by_name(l.name(c)), Some(c));
        }
    }

    #[test]
    fn above_lists_exactly_the_entailing_elements() {
        let l = lat();
        for c in l.elements() {
            let expected: Vec<_> = l.elements().filter(|&d| l.entails(d, c)).collect();
            assert_eq!(l.above(c), expected.as_slice());
        }
    }
}
