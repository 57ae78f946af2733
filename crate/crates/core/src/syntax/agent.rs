use std::fmt;

use crate::constraint::{Constraint, Lattice, VarId};

/// A tccp agent. `HideLocal` only arises while executing `Hide`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Agent {
    Stop,
    Tell(Constraint),
    /// `ask(c1) -> A1 + ... + ask(cn) -> An`, never empty.
    Choice(Vec<(Constraint, Agent)>),
    Now(Constraint, Box<Agent>, Box<Agent>),
    Par(Box<Agent>, Box<Agent>),
    Hide(VarId, Box<Agent>),
    /// `∃^d x A`: hiding with local store `d`.
    HideLocal(VarId, Constraint, Box<Agent>),
    Call(String, VarId),
}

impl Agent {
    pub fn tell(c: Constraint) -> Agent {
        Agent::Tell(c)
    }

    pub fn ask(c: Constraint, body: Agent) -> Agent {
        Agent::Choice(vec![(c, body)])
    }

    pub fn now(c: Constraint, then: Agent, otherwise: Agent) -> Agent {
        Agent::Now(c, Box::new(then), Box::new(otherwise))
    }

    pub fn par(a: Agent, b: Agent) -> Agent {
        Agent::Par(Box::new(a), Box::new(b))
    }

    pub fn hide(x: VarId, a: Agent) -> Agent {
        Agent::Hide(x, Box::new(a))
    }

    pub fn call(name: impl Into<String>, x: VarId) -> Agent {
        Agent::Call(name.into(), x)
    }

    /// `tell(c) -> A`, shorthand for `tell(c) || ask(true) -> A`.
    pub fn tell_then(lat: &Lattice, c: Constraint, then: Agent) -> Agent {
        Agent::par(Agent::Tell(c), Agent::ask(lat.bottom(), then))
    }

    /// Nesting depth of the syntax tree; leaves have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Agent::Stop | Agent::Tell(_) | Agent::Call(..) => 1,
            Agent::Choice(bs) => 1 + bs.iter().map(|(_, a)| a.depth()).max().unwrap_or(0),
            Agent::Now(_, a, b) | Agent::Par(a, b) => 1 + a.depth().max(b.depth()),
            Agent::Hide(_, a) | Agent::HideLocal(_, _, a) => 1 + a.depth(),
        }
    }

    /// Calls in syntactic order, with whether each one sits under an ask.
    pub fn calls(&self) -> Vec<(&str, VarId, bool)> {
        fn go<'a>(a: &'a Agent, guarded: bool, out: &mut Vec<(&'a str, VarId, bool)>) {
            match a {
                Agent::Stop | Agent::Tell(_) => {}
                Agent::Call(p, x) => out.push((p, *x, guarded)),
                Agent::Choice(bs) => bs.iter().for_each(|(_, b)| go(b, true, out)),
                Agent::Now(_, a, b) | Agent::Par(a, b) => {
                    go(a, guarded, out);
                    go(b, guarded, out);
                }
                Agent::Hide(_, a) | Agent::HideLocal(_, _, a) => go(a, guarded, out),
            }
        }
        let mut out = Vec::new();
        go(self, false, &mut out);
        out
    }

    pub fn display<'a>(&'a self, lat: &'a Lattice) -> AgentDisplay<'a> {
        AgentDisplay { agent: self, lat }
    }
}

pub struct AgentDisplay<'a> {
    agent: &'a Agent,
    lat: &'a Lattice,
}

impl fmt::Display for AgentDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_par(f, self.lat, self.agent)
    }
}

// Printing follows the parser's three levels: `||` chains, `+` chains of ask
// branches, and unary agents. Choice and parallel agents in unary position
// are parenthesized.
fn write_par(f: &mut fmt::Formatter<'_>, lat: &Lattice, a: &Agent) -> fmt::Result {
    match a {
        Agent::Par(l, r) => {
            write_par(f, lat, l)?;
            f.write_str(" || ")?;
            if matches!(**r, Agent::Par(..)) {
                f.write_str("(")?;
                write_par(f, lat, r)?;
                f.write_str(")")
            } else {
                write_choice(f, lat, r)
            }
        }
        _ => write_choice(f, lat, a),
    }
}

fn write_choice(f: &mut fmt::Formatter<'_>, lat: &Lattice, a: &Agent) -> fmt::Result {
    match a {
        Agent::Choice(bs) => {
            for (i, (c, body)) in bs.iter().enumerate() {
                if i > 0 {
                    f.write_str(" + ")?;
                }
                write!(f, "ask({}) -> ", lat.show(*c))?;
                write_unary(f, lat, body)?;
            }
            Ok(())
        }
        _ => write_unary(f, lat, a),
    }
}

fn write_unary(f: &mut fmt::Formatter<'_>, lat: &Lattice, a: &Agent) -> fmt::Result {
    match a {
        Agent::Stop => f.write_str("stop"),
        Agent::Tell(c) => write!(f, "tell({})", lat.show(*c)),
        Agent::Call(p, x) => write!(f, "{p}({})", lat.var_name(*x)),
        Agent::Now(c, t, e) => {
            write!(f, "now {} then ", lat.show(*c))?;
            write_unary(f, lat, t)?;
            f.write_str(" else ")?;
            write_unary(f, lat, e)
        }
        Agent::Hide(x, body) => {
            write!(f, "exists {}. ", lat.var_name(*x))?;
            write_unary(f, lat, body)
        }
        Agent::HideLocal(x, d, body) => {
            write!(f, "exists^{{{}}} {}. ", lat.show(*d), lat.var_name(*x))?;
            write_unary(f, lat, body)
        }
        Agent::Choice(_) | Agent::Par(..) => {
            f.write_str("(")?;
            write_par(f, lat, a)?;
            f.write_str(")")
        }
    }
}
