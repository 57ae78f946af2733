use std::collections::BTreeSet;
use std::fmt;

use crate::constraint::{Constraint, Lattice, VarId};

pub const INPUT: &str = "I";
pub const OUTPUT: &str = "O";

/// Constraint-valued terms appearing in `t ≤ u` and `X(t)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Const(Constraint),
    /// Constraint variable, bound by `∃p` or assigned by γ.
    Var(String),
    Lub(Box<Term>, Box<Term>),
    /// `∃_x t`
    Cyl(VarId, Box<Term>),
}

impl Term {
    pub fn var(p: impl Into<String>) -> Term {
        Term::Var(p.into())
    }

    pub fn lub(a: Term, b: Term) -> Term {
        Term::Lub(Box::new(a), Box::new(b))
    }

    pub fn cyl(x: VarId, t: Term) -> Term {
        Term::Cyl(x, Box::new(t))
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Const(_) => {}
            Term::Var(p) => {
                out.insert(p.clone());
            }
            Term::Lub(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Term::Cyl(_, t) => t.collect_vars(out),
        }
    }

    fn collect_prog_vars(&self, lat: &Lattice, out: &mut BTreeSet<VarId>) {
        match self {
            Term::Const(c) => out.extend(mentioned_vars(lat, *c)),
            Term::Var(_) => {}
            Term::Lub(a, b) => {
                a.collect_prog_vars(lat, out);
                b.collect_prog_vars(lat, out);
            }
            Term::Cyl(x, t) => {
                out.insert(*x);
                t.collect_prog_vars(lat, out);
            }
        }
    }
}

/// Variables a constraint carries information about.
pub fn mentioned_vars(lat: &Lattice, c: Constraint) -> impl Iterator<Item = VarId> + '_ {
    (0..lat.vars().len() as u16)
        .map(VarId)
        .filter(move |&x| lat.exists_var(x, c) != c)
}

/// Core temporal formulas. Derived connectives are built by the constructor
/// functions below and by [`crate::syntax::macros`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Leq(Term, Term),
    Pred(String, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    ExistsVar(VarId, Box<Formula>),
    ExistsPred(String, Box<Formula>),
    ExistsConstr(String, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FreeVars {
    pub preds: BTreeSet<String>,
    pub constrs: BTreeSet<String>,
    pub prog: BTreeSet<VarId>,
}

impl Formula {
    pub fn truth(lat: &Lattice) -> Formula {
        Formula::Leq(Term::Const(lat.bottom()), Term::Const(lat.bottom()))
    }

    pub fn falsity(lat: &Lattice) -> Formula {
        Formula::not(Formula::truth(lat))
    }

    pub fn pred(x: impl Into<String>, t: Term) -> Formula {
        Formula::Pred(x.into(), t)
    }

    pub fn input(t: Term) -> Formula {
        Formula::Pred(INPUT.to_string(), t)
    }

    pub fn output(t: Term) -> Formula {
        Formula::Pred(OUTPUT.to_string(), t)
    }

    pub fn leq(a: Term, b: Term) -> Formula {
        Formula::Leq(a, b)
    }

    /// `a = b` abbreviates `a ≤ b ∧ b ≤ a`.
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::and(Formula::Leq(a.clone(), b.clone()), Formula::Leq(b, a))
    }

    pub fn neq(a: Term, b: Term) -> Formula {
        Formula::not(Formula::eq(a, b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or(Formula::not(a), b)
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    pub fn next(f: Formula) -> Formula {
        Formula::Next(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Formula {
        Formula::Until(Box::new(a), Box::new(b))
    }

    pub fn eventually(lat: &Lattice, f: Formula) -> Formula {
        Formula::until(Formula::truth(lat), f)
    }

    pub fn always(lat: &Lattice, f: Formula) -> Formula {
        Formula::not(Formula::eventually(lat, Formula::not(f)))
    }

    pub fn exists_var(x: VarId, f: Formula) -> Formula {
        Formula::ExistsVar(x, Box::new(f))
    }

    pub fn exists_pred(x: impl Into<String>, f: Formula) -> Formula {
        Formula::ExistsPred(x.into(), Box::new(f))
    }

    pub fn exists_constr(p: impl Into<String>, f: Formula) -> Formula {
        Formula::ExistsConstr(p.into(), Box::new(f))
    }

    pub fn forall_constr(p: impl Into<String>, f: Formula) -> Formula {
        Formula::not(Formula::exists_constr(p, Formula::not(f)))
    }

    pub fn forall_pred(x: impl Into<String>, f: Formula) -> Formula {
        Formula::not(Formula::exists_pred(x, Formula::not(f)))
    }

    pub fn forall_var(x: VarId, f: Formula) -> Formula {
        Formula::not(Formula::exists_var(x, Formula::not(f)))
    }

    /// Left-nested conjunction; `None` for an empty list.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        items.into_iter().reduce(Formula::and)
    }

    /// Left-nested disjunction; `None` for an empty list.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        items.into_iter().reduce(Formula::or)
    }

    pub fn free_vars(&self, lat: &Lattice) -> FreeVars {
        let mut prog = BTreeSet::new();
        self.collect_prog(lat, &mut Vec::new(), &mut prog);
        FreeVars {
            preds: self.free_preds(),
            constrs: self.free_constr_vars(),
            prog,
        }
    }

    pub fn free_preds(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        fn go(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match f {
                Formula::Leq(..) => {}
                Formula::Pred(x, _) => {
                    if !bound.contains(x) {
                        out.insert(x.clone());
                    }
                }
                Formula::Not(a) | Formula::Next(a) | Formula::ExistsVar(_, a) => go(a, bound, out),
                Formula::ExistsConstr(_, a) => go(a, bound, out),
                Formula::And(a, b) | Formula::Until(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Formula::ExistsPred(x, a) => {
                    bound.push(x.clone());
                    go(a, bound, out);
                    bound.pop();
                }
            }
        }
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn free_constr_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        fn go(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            let mut term = |t: &Term, bound: &Vec<String>| {
                let mut vs = BTreeSet::new();
                t.collect_vars(&mut vs);
                out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
            };
            match f {
                Formula::Leq(a, b) => {
                    term(a, bound);
                    term(b, bound);
                }
                Formula::Pred(_, t) => term(t, bound),
                Formula::Not(a) | Formula::Next(a) | Formula::ExistsVar(_, a) => go(a, bound, out),
                Formula::ExistsPred(_, a) => go(a, bound, out),
                Formula::And(a, b) | Formula::Until(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Formula::ExistsConstr(p, a) => {
                    bound.push(p.clone());
                    go(a, bound, out);
                    bound.pop();
                }
            }
        }
        go(self, &mut Vec::new(), &mut out);
        out
    }

    fn collect_prog(&self, lat: &Lattice, bound: &mut Vec<VarId>, out: &mut BTreeSet<VarId>) {
        let mut term = |t: &Term, bound: &Vec<VarId>| {
            let mut ps = BTreeSet::new();
            t.collect_prog_vars(lat, &mut ps);
            out.extend(ps.into_iter().filter(|x| !bound.contains(x)));
        };
        match self {
            Formula::Leq(a, b) => {
                term(a, bound);
                term(b, bound);
            }
            Formula::Pred(_, t) => term(t, bound),
            Formula::Not(a) | Formula::Next(a) | Formula::ExistsPred(_, a) | Formula::ExistsConstr(_, a) => {
                a.collect_prog(lat, bound, out)
            }
            Formula::And(a, b) | Formula::Until(a, b) => {
                a.collect_prog(lat, bound, out);
                b.collect_prog(lat, bound, out);
            }
            Formula::ExistsVar(x, a) => {
                bound.push(*x);
                a.collect_prog(lat, bound, out);
                bound.pop();
            }
        }
    }

    /// Every predicate name occurring anywhere, bound or free.
    pub fn all_preds(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Pred(x, _) | Formula::ExistsPred(x, _) => {
                out.insert(x.clone());
            }
            _ => {}
        });
        out
    }

    fn visit(&self, f: &mut dyn FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Leq(..) | Formula::Pred(..) => {}
            Formula::Not(a)
            | Formula::Next(a)
            | Formula::ExistsVar(_, a)
            | Formula::ExistsPred(_, a)
            | Formula::ExistsConstr(_, a) => a.visit(f),
            Formula::And(a, b) | Formula::Until(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    /// Replaces every free occurrence of predicate `from` by `to`, renaming
    /// `∃to` binders that would capture it.
    pub fn substitute_pred(&self, from: &str, to: &str) -> Formula {
        match self {
            Formula::Leq(..) => self.clone(),
            Formula::Pred(x, t) => {
                if x == from {
                    Formula::Pred(to.to_string(), t.clone())
                } else {
                    self.clone()
                }
            }
            Formula::Not(a) => Formula::not(a.substitute_pred(from, to)),
            Formula::Next(a) => Formula::next(a.substitute_pred(from, to)),
            Formula::And(a, b) => Formula::and(a.substitute_pred(from, to), b.substitute_pred(from, to)),
            Formula::Until(a, b) => Formula::until(a.substitute_pred(from, to), b.substitute_pred(from, to)),
            Formula::ExistsVar(x, a) => Formula::exists_var(*x, a.substitute_pred(from, to)),
            Formula::ExistsConstr(p, a) => Formula::exists_constr(p, a.substitute_pred(from, to)),
            Formula::ExistsPred(z, a) => {
                if z == from {
                    self.clone()
                } else if z == to && a.free_preds().contains(from) {
                    let mut taken = a.all_preds();
                    taken.insert(from.to_string());
                    taken.insert(to.to_string());
                    let fresh = fresh_name(z, &taken);
                    let renamed = a.substitute_pred(z, &fresh);
                    Formula::exists_pred(fresh, renamed.substitute_pred(from, to))
                } else {
                    Formula::exists_pred(z, a.substitute_pred(from, to))
                }
            }
        }
    }

    /// Structural equality up to renaming of bound predicate and constraint
    /// variables.
    pub fn alpha_eq(&self, other: &Formula) -> bool {
        alpha(self, other, &mut Vec::new(), &mut Vec::new())
    }

    pub fn display<'a>(&'a self, lat: &'a Lattice) -> FormulaDisplay<'a> {
        FormulaDisplay { f: self, lat }
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }
}

fn fresh_name(base: &str, taken: &BTreeSet<String>) -> String {
    (1..)
        .map(|i| format!("{base}_{i}"))
        .find(|n| !taken.contains(n))
        .expect("unbounded supply of names")
}

// Binder stacks record (left name, right name) pairs for predicates and
// constraint variables; lookups search innermost first.
fn alpha(a: &Formula, b: &Formula, preds: &mut Vec<(String, String)>, constrs: &mut Vec<(String, String)>) -> bool {
    fn same(x: &str, y: &str, env: &[(String, String)]) -> bool {
        for (l, r) in env.iter().rev() {
            if l == x || r == y {
                return l == x && r == y;
            }
        }
        x == y
    }
    fn term(a: &Term, b: &Term, env: &[(String, String)]) -> bool {
        match (a, b) {
            (Term::Const(c), Term::Const(d)) => c == d,
            (Term::Var(p), Term::Var(q)) => same(p, q, env),
            (Term::Lub(a1, a2), Term::Lub(b1, b2)) => term(a1, b1, env) && term(a2, b2, env),
            (Term::Cyl(x, s), Term::Cyl(y, t)) => x == y && term(s, t, env),
            _ => false,
        }
    }
    match (a, b) {
        (Formula::Leq(a1, a2), Formula::Leq(b1, b2)) => term(a1, b1, constrs) && term(a2, b2, constrs),
        (Formula::Pred(x, s), Formula::Pred(y, t)) => same(x, y, preds) && term(s, t, constrs),
        (Formula::Not(p), Formula::Not(q)) | (Formula::Next(p), Formula::Next(q)) => alpha(p, q, preds, constrs),
        (Formula::And(p1, p2), Formula::And(q1, q2)) | (Formula::Until(p1, p2), Formula::Until(q1, q2)) => {
            alpha(p1, q1, preds, constrs) && alpha(p2, q2, preds, constrs)
        }
        (Formula::ExistsVar(x, p), Formula::ExistsVar(y, q)) => x == y && alpha(p, q, preds, constrs),
        (Formula::ExistsPred(x, p), Formula::ExistsPred(y, q)) => {
            preds.push((x.clone(), y.clone()));
            let r = alpha(p, q, preds, constrs);
            preds.pop();
            r
        }
        (Formula::ExistsConstr(x, p), Formula::ExistsConstr(y, q)) => {
            constrs.push((x.clone(), y.clone()));
            let r = alpha(p, q, preds, constrs);
            constrs.pop();
            r
        }
        _ => false,
    }
}

pub struct FormulaDisplay<'a> {
    f: &'a Formula,
    lat: &'a Lattice,
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self.lat, self.f, 0)
    }
}

const PREC_QUANT: u8 = 0;
const PREC_AND: u8 = 1;
const PREC_UNTIL: u8 = 2;
const PREC_UNARY: u8 = 3;

fn is_truth(lat: &Lattice, f: &Formula) -> bool {
    matches!(f, Formula::Leq(Term::Const(a), Term::Const(b)) if *a == lat.bottom() && *b == lat.bottom())
}

fn write_formula(f: &mut fmt::Formatter<'_>, lat: &Lattice, phi: &Formula, ctx: u8) -> fmt::Result {
    let own = match phi {
        Formula::ExistsVar(..) | Formula::ExistsPred(..) | Formula::ExistsConstr(..) => PREC_QUANT,
        Formula::And(..) => PREC_AND,
        Formula::Until(..) => PREC_UNTIL,
        _ => PREC_UNARY,
    };
    let paren = own < ctx;
    if paren {
        f.write_str("(")?;
    }
    match phi {
        _ if is_truth(lat, phi) => f.write_str("true")?,
        Formula::Leq(a, b) => {
            write_term(f, lat, a, false)?;
            f.write_str(" <= ")?;
            write_term(f, lat, b, false)?;
        }
        Formula::Pred(x, t) => {
            write!(f, "{x}(")?;
            write_term(f, lat, t, true)?;
            f.write_str(")")?;
        }
        Formula::Not(a) => {
            f.write_str("not ")?;
            write_formula(f, lat, a, PREC_UNARY)?;
        }
        Formula::Next(a) => {
            f.write_str("next ")?;
            write_formula(f, lat, a, PREC_UNARY)?;
        }
        Formula::And(a, b) => {
            write_formula(f, lat, a, PREC_AND)?;
            f.write_str(" /\\ ")?;
            write_formula(f, lat, b, PREC_UNTIL)?;
        }
        Formula::Until(a, b) => {
            write_formula(f, lat, a, PREC_UNARY)?;
            f.write_str(" until ")?;
            write_formula(f, lat, b, PREC_UNTIL)?;
        }
        Formula::ExistsVar(x, a) => {
            write!(f, "exists {}. ", lat.var_name(*x))?;
            write_formula(f, lat, a, PREC_QUANT)?;
        }
        Formula::ExistsPred(x, a) | Formula::ExistsConstr(x, a) => {
            write!(f, "exists {x}. ")?;
            write_formula(f, lat, a, PREC_QUANT)?;
        }
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}

fn write_term(f: &mut fmt::Formatter<'_>, lat: &Lattice, t: &Term, bare: bool) -> fmt::Result {
    match t {
        Term::Const(c) if bare => write!(f, "{}", lat.show(*c)),
        Term::Const(c) => write!(f, "{{{}}}", lat.show(*c)),
        Term::Var(p) => f.write_str(p),
        Term::Lub(a, b) => {
            write_term(f, lat, a, false)?;
            f.write_str(" + ")?;
            if matches!(**b, Term::Lub(..)) {
                f.write_str("[")?;
                write_term(f, lat, b, false)?;
                f.write_str("]")
            } else {
                write_term(f, lat, b, false)
            }
        }
        Term::Cyl(x, a) => {
            write!(f, "cyl({}, ", lat.var_name(*x))?;
            write_term(f, lat, a, false)?;
            f.write_str(")")
        }
    }
}
