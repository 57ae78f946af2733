use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::agent::Agent;
use crate::constraint::{ConstraintError, Lattice, VarId};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Declaration {
    pub name: String,
    pub param: VarId,
    pub body: Agent,
}

/// A process `D.A` over a fixed finite lattice.
#[derive(Debug, Clone)]
pub struct Program {
    pub lattice: Arc<Lattice>,
    pub decls: Vec<Declaration>,
    pub main: Agent,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProgramError {
    #[error("call to undeclared procedure `{0}`")]
    Undeclared(String),
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
}

/// An unguarded call inside a declaration body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuardViolation {
    pub procedure: String,
    pub param: String,
    pub call: String,
}

impl fmt::Display for GuardViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "call `{}` in the body of `{}({})` is not under an ask",
            self.call, self.procedure, self.param
        )
    }
}

impl Program {
    pub fn new(lattice: Arc<Lattice>, decls: Vec<Declaration>, main: Agent) -> Program {
        Program { lattice, decls, main }
    }

    pub fn lat(&self) -> &Lattice {
        &self.lattice
    }

    /// The declaration for the procedure identifier `name(param)`.
    pub fn decl(&self, name: &str, param: VarId) -> Option<&Declaration> {
        self.decls.iter().find(|d| d.name == name && d.param == param)
    }

    /// The same declarations with a different main agent.
    pub fn with_main(&self, main: Agent) -> Program {
        Program {
            lattice: self.lattice.clone(),
            decls: self.decls.clone(),
            main,
        }
    }

    fn agents(&self) -> impl Iterator<Item = &Agent> {
        std::iter::once(&self.main).chain(self.decls.iter().map(|d| &d.body))
    }

    /// Adds `p(y) :: ∃x (tell(d_xy) ∥ A)` for every call `p(y)` whose
    /// declaration is `p(x) :: A` with `x ≠ y`, until no call lacks a
    /// matching identifier.
    pub fn close_declarations(&self) -> Result<Program, ProgramError> {
        let lat = self.lat();
        let mut decls = self.decls.clone();
        loop {
            let mut missing: BTreeSet<(String, VarId)> = BTreeSet::new();
            let known = |n: &str, x: VarId, ds: &[Declaration]| ds.iter().any(|d| d.name == n && d.param == x);
            for a in std::iter::once(&self.main).chain(decls.iter().map(|d| &d.body)) {
                for (name, y, _) in a.calls() {
                    if !known(name, y, &decls) {
                        missing.insert((name.to_string(), y));
                    }
                }
            }
            if missing.is_empty() {
                break;
            }
            for (name, y) in missing {
                let original = self
                    .decls
                    .iter()
                    .find(|d| d.name == name)
                    .ok_or_else(|| ProgramError::Undeclared(name.clone()))?;
                let x = original.param;
                let body = Agent::hide(x, Agent::par(Agent::Tell(lat.diagonal(x, y)?), original.body.clone()));
                decls.push(Declaration { name, param: y, body });
            }
        }
        Ok(Program {
            lattice: self.lattice.clone(),
            decls,
            main: self.main.clone(),
        })
    }

    /// Every call must resolve to a declared procedure name.
    pub fn check_closed(&self) -> Result<(), ProgramError> {
        for a in self.agents() {
            for (name, _, _) in a.calls() {
                if !self.decls.iter().any(|d| d.name == name) {
                    return Err(ProgramError::Undeclared(name.to_string()));
                }
            }
        }
        Ok(())
    }

    /// Reports calls in declaration bodies that are not inside an ask branch.
    /// Calls in the main agent are unconstrained: they unfold once and cannot
    /// recurse without passing through a body.
    pub fn check_guarded_recursion(&self) -> Vec<GuardViolation> {
        let lat = self.lat();
        let mut out = Vec::new();
        for d in &self.decls {
            for (name, y, guarded) in d.body.calls() {
                if !guarded {
                    out.push(GuardViolation {
                        procedure: d.name.clone(),
                        param: lat.var_name(d.param).to_string(),
                        call: format!("{name}({})", lat.var_name(y)),
                    });
                }
            }
        }
        out
    }

    pub fn display(&self) -> ProgramDisplay<'_> {
        ProgramDisplay(self)
    }
}

pub struct ProgramDisplay<'a>(&'a Program);

impl fmt::Display for ProgramDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.0;
        let lat = p.lat();
        writeln!(f, "vars: {};", lat.vars().join(", "))?;
        writeln!(f, "consts: {};", lat.consts().join(", "))?;
        for d in &p.decls {
            writeln!(f, "{}({}) :: {};", d.name, lat.var_name(d.param), d.body.display(lat))?;
        }
        writeln!(f, "main: {};", p.main.display(lat))
    }
}
