//! Derivations in the compositional proof system and their replay.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use super::{check_sat, prepare, CheckError, CheckResult};
use crate::constraint::{Lattice, VarId};
use crate::logic::{valid_bounded, LogicError};
use crate::syntax::macros::{choice_formula, hide_formula, now_formula, par_formula, tell_axiom};
use crate::syntax::{Agent, Formula, Program, INPUT, OUTPUT};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    /// `tell(c) sat` the tell axiom.
    T1,
    /// Guarded choice.
    T2,
    /// `now c then A else B`.
    T3,
    /// Hiding of the given variable.
    T4(VarId),
    /// Parallel composition with the fresh predicates `X`, `Y`.
    T5(String, String),
    /// Recursion: discharges `p(x) sat φ` assumed in the premise.
    T6,
    /// Weakening by a valid implication.
    T7,
    /// An assumption `p(x) sat φ`, to be discharged by an enclosing T6.
    Hyp,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::T1 => f.write_str("T1"),
            Rule::T2 => f.write_str("T2"),
            Rule::T3 => f.write_str("T3"),
            Rule::T4(_) => f.write_str("T4"),
            Rule::T5(x, y) => write!(f, "T5({x}, {y})"),
            Rule::T6 => f.write_str("T6"),
            Rule::T7 => f.write_str("T7"),
            Rule::Hyp => f.write_str("HYP"),
        }
    }
}

/// One inference. `agent` and `formula` are the stated conclusion; when
/// omitted they are computed from the rule schema where it determines them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofNode {
    pub id: String,
    pub rule: Rule,
    pub premises: Vec<String>,
    pub agent: Option<Agent>,
    pub formula: Option<Formula>,
    pub line: usize,
}

/// A derivation whose conclusion is its last node. Premises refer to
/// earlier nodes by id.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ProofTree {
    pub nodes: Vec<ProofNode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("empty proof")]
    Empty,
    #[error("line {line}: duplicate node id `{id}`")]
    DuplicateNode { line: usize, id: String },
    #[error("line {line}: node `{node}` cites `{premise}`, which is not defined earlier")]
    UnknownPremise { line: usize, node: String, premise: String },
    #[error("line {line}: node `{node}` refers to undeclared procedure `{name}`")]
    UnknownProcedure { line: usize, node: String, name: String },
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeStatus {
    Accepted,
    Rejected(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeVerdict {
    pub id: String,
    pub rule: Rule,
    pub status: NodeStatus,
    /// The side condition was discharged by bounded validity only.
    pub bounded_oracle: bool,
    pub conclusion: Option<(Agent, Formula)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofReport {
    pub bound: usize,
    pub nodes: Vec<NodeVerdict>,
    /// Every node accepted and no assumption left open at the root.
    pub accepted: bool,
    pub root_error: Option<String>,
    /// `check_sat` on the root conclusion, run only for accepted trees.
    pub root_check: Option<CheckResult>,
}

impl ProofReport {
    pub fn passed(&self) -> bool {
        self.accepted && self.root_check.as_ref().is_some_and(|r| r.is_valid())
    }

    /// Accepted by the rules yet refuted by the bounded semantics.
    pub fn unsound(&self) -> bool {
        self.accepted && self.root_check.as_ref().is_some_and(|r| !r.is_valid())
    }

    pub fn conclusion(&self) -> Option<&(Agent, Formula)> {
        self.nodes.last().and_then(|n| n.conclusion.as_ref())
    }
}

#[derive(Debug, Clone)]
struct Derived {
    agent: Agent,
    formula: Formula,
    open: Vec<(String, VarId, Formula)>,
    recursed: BTreeSet<String>,
}

struct Replay<'a> {
    prog: &'a Program,
    k: usize,
    workers: usize,
}

type Outcome = Result<(Derived, bool), String>;

impl Replay<'_> {
    fn lat(&self) -> &Lattice {
        self.prog.lat()
    }

    fn agent_text(&self, a: &Agent) -> String {
        a.display(self.lat()).to_string()
    }

    fn formula_text(&self, f: &Formula) -> String {
        f.display(self.lat()).to_string()
    }

    fn stated_or(&self, node: &ProofNode, expected: Agent) -> Result<Agent, String> {
        match &node.agent {
            Some(a) if *a != expected => Err(format!(
                "stated agent `{}` does not match the schema agent `{}`",
                self.agent_text(a),
                self.agent_text(&expected)
            )),
            _ => Ok(expected),
        }
    }

    fn formula_or(&self, node: &ProofNode, expected: Formula) -> Result<Formula, String> {
        match &node.formula {
            Some(f) if !f.alpha_eq(&expected) => Err(format!(
                "stated formula `{}` does not match the schema formula `{}`",
                self.formula_text(f),
                self.formula_text(&expected)
            )),
            _ => Ok(expected),
        }
    }

    fn required_agent<'n>(&self, node: &'n ProofNode) -> Result<&'n Agent, String> {
        node.agent
            .as_ref()
            .ok_or_else(|| format!("{} needs the conclusion agent", node.rule))
    }

    fn arity(&self, node: &ProofNode, prem: &[&Derived], n: usize) -> Result<(), String> {
        if prem.len() != n {
            return Err(format!("{} takes {n} premise(s), got {}", node.rule, prem.len()));
        }
        Ok(())
    }

    fn merge(prem: &[&Derived]) -> (Vec<(String, VarId, Formula)>, BTreeSet<String>) {
        let mut open: Vec<(String, VarId, Formula)> = Vec::new();
        let mut recursed = BTreeSet::new();
        for p in prem {
            for h in &p.open {
                if !open.iter().any(|o| o.0 == h.0 && o.1 == h.1 && o.2.alpha_eq(&h.2)) {
                    open.push(h.clone());
                }
            }
            recursed.extend(p.recursed.iter().cloned());
        }
        (open, recursed)
    }

    fn node(&self, node: &ProofNode, prem: &[&Derived]) -> Outcome {
        let lat = self.lat();
        let (open, recursed) = Self::merge(prem);
        let done = |agent, formula| Derived {
            agent,
            formula,
            open: open.clone(),
            recursed: recursed.clone(),
        };
        match &node.rule {
            Rule::T1 => {
                self.arity(node, prem, 0)?;
                let Agent::Tell(c) = self.required_agent(node)? else {
                    return Err("T1 concludes about a tell agent".into());
                };
                let f = self.formula_or(node, tell_axiom(lat, *c))?;
                Ok((done(Agent::Tell(*c), f), false))
            }
            Rule::T2 => {
                let Agent::Choice(bs) = self.required_agent(node)? else {
                    return Err("T2 concludes about a guarded choice".into());
                };
                self.arity(node, prem, bs.len())?;
                for (i, ((_, b), p)) in bs.iter().zip(prem).enumerate() {
                    if *b != p.agent {
                        return Err(format!(
                            "branch {} is `{}` but premise {} is about `{}`",
                            i + 1,
                            self.agent_text(b),
                            node.premises[i],
                            self.agent_text(&p.agent)
                        ));
                    }
                }
                let branches: Vec<_> = bs.iter().zip(prem).map(|((c, _), p)| (*c, p.formula.clone())).collect();
                let f = self.formula_or(node, choice_formula(lat, &branches))?;
                Ok((done(Agent::Choice(bs.clone()), f), false))
            }
            Rule::T3 => {
                self.arity(node, prem, 2)?;
                let Agent::Now(c, a, b) = self.required_agent(node)? else {
                    return Err("T3 concludes about a now agent".into());
                };
                if **a != prem[0].agent || **b != prem[1].agent {
                    return Err("the branches of the now agent do not match the premises".into());
                }
                let f = self.formula_or(node, now_formula(*c, prem[0].formula.clone(), prem[1].formula.clone()))?;
                Ok((done(Agent::now(*c, (**a).clone(), (**b).clone()), f), false))
            }
            Rule::T4(x) => {
                self.arity(node, prem, 1)?;
                let a = self.stated_or(node, Agent::hide(*x, prem[0].agent.clone()))?;
                let f = self.formula_or(node, hide_formula(lat, *x, prem[0].formula.clone()))?;
                Ok((done(a, f), false))
            }
            Rule::T5(x, y) => {
                self.arity(node, prem, 2)?;
                if x == y {
                    return Err(format!("T5 needs distinct predicates, got {x} twice"));
                }
                for v in [x, y] {
                    if v == INPUT || v == OUTPUT {
                        return Err(format!("T5 predicate {v} is reserved"));
                    }
                    for p in prem {
                        if p.formula.all_preds().contains(v.as_str()) {
                            return Err(format!(
                                "T5 predicate {v} occurs in `{}`",
                                self.formula_text(&p.formula)
                            ));
                        }
                    }
                }
                let a = self.stated_or(node, Agent::par(prem[0].agent.clone(), prem[1].agent.clone()))?;
                let f = self.formula_or(node, par_formula(lat, x, y, &prem[0].formula, &prem[1].formula))?;
                Ok((done(a, f), false))
            }
            Rule::T6 => {
                self.arity(node, prem, 1)?;
                let Agent::Call(p, x) = self.required_agent(node)? else {
                    return Err("T6 concludes about a procedure call".into());
                };
                let decl = self
                    .prog
                    .decl(p, *x)
                    .ok_or_else(|| format!("{p}({}) has no declaration", lat.var_name(*x)))?;
                if decl.body != prem[0].agent {
                    return Err(format!(
                        "premise is about `{}`, not the body `{}` of {p}({})",
                        self.agent_text(&prem[0].agent),
                        self.agent_text(&decl.body),
                        lat.var_name(*x)
                    ));
                }
                if prem[0].recursed.contains(p) {
                    return Err(format!(
                        "the premise already uses T6 for {p}, which is not declared inside it"
                    ));
                }
                let f = node.formula.clone().unwrap_or_else(|| prem[0].formula.clone());
                if !f.alpha_eq(&prem[0].formula) {
                    return Err("T6 concludes the property proved for the body".into());
                }
                let mut d = done(Agent::Call(p.clone(), *x), f.clone());
                d.open.retain(|(q, y, g)| !(q == p && y == x && g.alpha_eq(&f)));
                if let Some((q, y, _)) = d.open.iter().find(|(q, _, _)| q == p) {
                    return Err(format!(
                        "assumption about {q}({}) differs from the conclusion and cannot be discharged",
                        lat.var_name(*y)
                    ));
                }
                d.recursed.insert(p.clone());
                Ok((d, false))
            }
            Rule::Hyp => {
                self.arity(node, prem, 0)?;
                let Agent::Call(p, x) = self.required_agent(node)? else {
                    return Err("assumptions are about procedure calls".into());
                };
                let f = node
                    .formula
                    .clone()
                    .ok_or_else(|| "an assumption needs its formula".to_string())?;
                let mut d = done(Agent::Call(p.clone(), *x), f.clone());
                d.open.push((p.clone(), *x, f));
                Ok((d, false))
            }
            Rule::T7 => {
                self.arity(node, prem, 1)?;
                let a = self.stated_or(node, prem[0].agent.clone())?;
                let psi = node
                    .formula
                    .clone()
                    .ok_or_else(|| "T7 needs the weakened formula".to_string())?;
                let imp = Formula::implies(prem[0].formula.clone(), psi.clone());
                let v = valid_bounded(lat, &imp, self.k, self.workers).map_err(|e| e.to_string())?;
                if let Some(cx) = v.counterexample {
                    let gamma: Vec<String> = cx.gamma.iter().map(|(p, c)| format!("{p}={}", lat.show(*c))).collect();
                    return Err(format!(
                        "implication is refuted at bound {}{}:\n{}",
                        self.k,
                        if gamma.is_empty() {
                            String::new()
                        } else {
                            format!(" with {}", gamma.join(", "))
                        },
                        cx.model.table(lat)
                    ));
                }
                Ok((done(a, psi), true))
            }
        }
    }
}

fn undeclared<'a>(prog: &Program, a: &'a Agent) -> Option<&'a str> {
    a.calls()
        .into_iter()
        .map(|(n, _, _)| n)
        .find(|n| !prog.decls.iter().any(|d| d.name == *n))
}

/// Replays `tree` against `prog`, discharging semantic side conditions by
/// bounded validity at `k`. An accepted tree is then checked empirically:
/// its root conclusion goes through [`check_sat`] at the same bound.
pub fn check_proof(prog: &Program, tree: &ProofTree, k: usize, workers: usize) -> Result<ProofReport, ProofError> {
    if tree.nodes.is_empty() {
        return Err(ProofError::Empty);
    }
    let prog = prepare(prog)?;
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, n) in tree.nodes.iter().enumerate() {
        if let Some(name) = n.agent.as_ref().and_then(|a| undeclared(&prog, a)) {
            return Err(ProofError::UnknownProcedure {
                line: n.line,
                node: n.id.clone(),
                name: name.to_string(),
            });
        }
        for p in &n.premises {
            if !index.contains_key(p.as_str()) {
                return Err(ProofError::UnknownPremise {
                    line: n.line,
                    node: n.id.clone(),
                    premise: p.clone(),
                });
            }
        }
        if index.insert(&n.id, i).is_some() {
            return Err(ProofError::DuplicateNode {
                line: n.line,
                id: n.id.clone(),
            });
        }
    }
    let replay = Replay {
        prog: &prog,
        k,
        workers,
    };
    let mut derived: Vec<Option<Derived>> = Vec::with_capacity(tree.nodes.len());
    let mut verdicts = Vec::with_capacity(tree.nodes.len());
    for n in &tree.nodes {
        let prem: Option<Vec<&Derived>> = n.premises.iter().map(|p| derived[index[p.as_str()]].as_ref()).collect();
        let (status, bounded, d) = match prem {
            None => (
                NodeStatus::Rejected("depends on a rejected premise".into()),
                false,
                None,
            ),
            Some(prem) => match replay.node(n, &prem) {
                Ok((d, bounded)) => (NodeStatus::Accepted, bounded, Some(d)),
                Err(msg) => (NodeStatus::Rejected(msg), false, None),
            },
        };
        verdicts.push(NodeVerdict {
            id: n.id.clone(),
            rule: n.rule.clone(),
            status,
            bounded_oracle: bounded,
            conclusion: d.as_ref().map(|d| (d.agent.clone(), d.formula.clone())),
        });
        derived.push(d);
    }
    let root = derived.last().cloned().flatten();
    let root_error = match &root {
        None => Some("the root is rejected".to_string()),
        Some(d) if !d.open.is_empty() => Some(format!(
            "undischarged assumption about {}",
            d.open
                .iter()
                .map(|(p, x, _)| format!("{p}({})", prog.lat().var_name(*x)))
                .collect::<Vec<_>>()
                .join(", ")
        )),
        Some(_) => None,
    };
    let accepted = root_error.is_none() && verdicts.iter().all(|v| v.status == NodeStatus::Accepted);
    let root_check = match (&root, accepted) {
        (Some(d), true) => Some(check_sat(&prog, &d.agent, &d.formula, k, workers)?),
        _ => None,
    };
    Ok(ProofReport {
        bound: k,
        nodes: verdicts,
        accepted,
        root_error,
        root_check,
    })
}
