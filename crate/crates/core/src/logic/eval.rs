use std::collections::{BTreeMap, HashMap};

use super::model::{monotone_columns, Model};
use super::LogicError;
use crate::constraint::{Constraint, Lattice, VarId};
use crate::syntax::{Formula, Term, INPUT, OUTPUT};

const I_SLOT: usize = 0;
const O_SLOT: usize = 1;

#[derive(Debug, Clone)]
enum CTerm {
    Const(Constraint),
    Var(usize),
    Lub(Box<CTerm>, Box<CTerm>),
    Cyl(VarId, Box<CTerm>),
}

#[derive(Debug, Clone)]
enum Kind {
    Leq(CTerm, CTerm),
    Pred(usize, CTerm),
    Not(usize),
    And(usize, usize),
    ExistsVar { x: VarId, body: usize, varied: Vec<usize> },
    ExistsPred { slot: usize, body: usize },
    ExistsConstr { slot: usize, body: usize },
    Next(usize),
    Until(usize, usize),
}

#[derive(Debug, Clone)]
struct Node {
    kind: Kind,
    /// Constraint-variable slots free in this subformula.
    gamma_deps: Vec<usize>,
    /// Predicate slots free in this subformula.
    pred_deps: Vec<usize>,
}

struct Compiler<'a> {
    nodes: Vec<Node>,
    pred_slots: usize,
    constr_slots: usize,
    free_constr: Vec<String>,
    model_preds: &'a [String],
}

impl Compiler<'_> {
    fn term(&mut self, t: &Term, env: &[(String, usize)], deps: &mut Vec<usize>) -> Result<CTerm, LogicError> {
        Ok(match t {
            Term::Const(c) => CTerm::Const(*c),
            Term::Var(p) => {
                let slot = match env.iter().rev().find(|(n, _)| n == p) {
                    Some((_, s)) => *s,
                    None => {
                        let i = match self.free_constr.iter().position(|n| n == p) {
                            Some(i) => i,
                            None => {
                                self.free_constr.push(p.clone());
                                self.free_constr.len() - 1
                            }
                        };
                        i
                    }
                };
                if !deps.contains(&slot) {
                    deps.push(slot);
                }
                CTerm::Var(slot)
            }
            Term::Lub(a, b) => CTerm::Lub(Box::new(self.term(a, env, deps)?), Box::new(self.term(b, env, deps)?)),
            Term::Cyl(x, a) => CTerm::Cyl(*x, Box::new(self.term(a, env, deps)?)),
        })
    }

    fn push(&mut self, kind: Kind, gamma_deps: Vec<usize>, pred_deps: Vec<usize>) -> usize {
        let mut g = gamma_deps;
        g.sort_unstable();
        g.dedup();
        let mut p = pred_deps;
        p.sort_unstable();
        p.dedup();
        self.nodes.push(Node {
            kind,
            gamma_deps: g,
            pred_deps: p,
        });
        self.nodes.len() - 1
    }

    fn deps(&self, id: usize) -> (Vec<usize>, Vec<usize>) {
        (self.nodes[id].gamma_deps.clone(), self.nodes[id].pred_deps.clone())
    }

    fn pred_slot(&self, name: &str, penv: &[(String, usize)]) -> Result<usize, LogicError> {
        if let Some((_, s)) = penv.iter().rev().find(|(n, _)| n == name) {
            return Ok(*s);
        }
        self.model_preds
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| LogicError::UnassignedPredicate(name.to_string()))
    }

    fn compile(
        &mut self,
        f: &Formula,
        cenv: &mut Vec<(String, usize)>,
        penv: &mut Vec<(String, usize)>,
    ) -> Result<usize, LogicError> {
        Ok(match f {
            Formula::Leq(a, b) => {
                let mut g = Vec::new();
                let a = self.term(a, cenv, &mut g)?;
                let b = self.term(b, cenv, &mut g)?;
                self.push(Kind::Leq(a, b), g, Vec::new())
            }
            Formula::Pred(x, t) => {
                let slot = self.pred_slot(x, penv)?;
                let mut g = Vec::new();
                let t = self.term(t, cenv, &mut g)?;
                self.push(Kind::Pred(slot, t), g, vec![slot])
            }
            Formula::Not(a) => {
                let a = self.compile(a, cenv, penv)?;
                let (g, p) = self.deps(a);
                self.push(Kind::Not(a), g, p)
            }
            Formula::Next(a) => {
                let a = self.compile(a, cenv, penv)?;
                let (g, p) = self.deps(a);
                self.push(Kind::Next(a), g, p)
            }
            Formula::And(a, b) | Formula::Until(a, b) => {
                let a = self.compile(a, cenv, penv)?;
                let b = self.compile(b, cenv, penv)?;
                let (mut g, mut p) = self.deps(a);
                let (g2, p2) = self.deps(b);
                g.extend(g2);
                p.extend(p2);
                let kind = if matches!(f, Formula::And(..)) {
                    Kind::And(a, b)
                } else {
                    Kind::Until(a, b)
                };
                self.push(kind, g, p)
            }
            Formula::ExistsVar(x, a) => {
                let body = self.compile(a, cenv, penv)?;
                let (g, mut varied) = self.deps(body);
                if varied.contains(&I_SLOT) || varied.contains(&O_SLOT) {
                    varied.extend([I_SLOT, O_SLOT]);
                }
                varied.sort_unstable();
                varied.dedup();
                self.push(
                    Kind::ExistsVar {
                        x: *x,
                        body,
                        varied: varied.clone(),
                    },
                    g,
                    varied,
                )
            }
            Formula::ExistsPred(x, a) => {
                let slot = self.pred_slots;
                self.pred_slots += 1;
                penv.push((x.clone(), slot));
                let body = self.compile(a, cenv, penv);
                penv.pop();
                let body = body?;
                let (g, mut p) = self.deps(body);
                p.retain(|s| *s != slot);
                self.push(Kind::ExistsPred { slot, body }, g, p)
            }
            Formula::ExistsConstr(v, a) => {
                let slot = self.constr_slots;
                self.constr_slots += 1;
                cenv.push((v.clone(), slot));
                let body = self.compile(a, cenv, penv);
                cenv.pop();
                let body = body?;
                let (mut g, p) = self.deps(body);
                g.retain(|s| *s != slot);
                self.push(Kind::ExistsConstr { slot, body }, g, p)
            }
        })
    }
}

type MemoKey = (u32, Vec<u32>, Vec<Constraint>);

/// Evaluates one formula against many models, sharing a cache across calls.
///
/// Models passed to [`Evaluator::holds`] must have exactly the columns given
/// at construction, with `I` and `O` first.
pub struct Evaluator<'l> {
    lat: &'l Lattice,
    nodes: Vec<Node>,
    root: usize,
    model_preds: Vec<String>,
    pred_slots: usize,
    constr_slots: usize,
    free_constr: Vec<String>,
    rows: Vec<Vec<Constraint>>,
    row_ids: HashMap<Vec<Constraint>, u32>,
    projections: HashMap<Vec<Constraint>, u32>,
    memo: HashMap<MemoKey, bool>,
    columns: HashMap<usize, std::sync::Arc<Vec<Vec<Constraint>>>>,
    preimage: HashMap<(VarId, Constraint), Vec<Constraint>>,
}

impl<'l> Evaluator<'l> {
    pub fn new(lat: &'l Lattice, phi: &Formula, model_preds: &[String]) -> Result<Self, LogicError> {
        if model_preds.len() < 2 || model_preds[0] != INPUT || model_preds[1] != OUTPUT {
            return Err(LogicError::BadColumns);
        }
        // Constraint-variable slots: free variables take the low indices in
        // order of first occurrence, binders are numbered afterwards. Slots
        // are assigned in one pass, so bound slots start at a large offset
        // and are renumbered below.
        const BOUND_BASE: usize = 1 << 20;
        let mut c = Compiler {
            nodes: Vec::new(),
            pred_slots: model_preds.len(),
            constr_slots: BOUND_BASE,
            free_constr: Vec::new(),
            model_preds,
        };
        let root = c.compile(phi, &mut Vec::new(), &mut Vec::new())?;
        let nfree = c.free_constr.len();
        let remap = |s: usize| if s >= BOUND_BASE { s - BOUND_BASE + nfree } else { s };
        fn remap_term(t: &mut CTerm, f: &dyn Fn(usize) -> usize) {
            match t {
                CTerm::Const(_) => {}
                CTerm::Var(s) => *s = f(*s),
                CTerm::Lub(a, b) => {
                    remap_term(a, f);
                    remap_term(b, f);
                }
                CTerm::Cyl(_, a) => remap_term(a, f),
            }
        }
        for n in &mut c.nodes {
            for s in &mut n.gamma_deps {
                *s = remap(*s);
            }
            match &mut n.kind {
                Kind::Leq(a, b) => {
                    remap_term(a, &remap);
                    remap_term(b, &remap);
                }
                Kind::Pred(_, t) => remap_term(t, &remap),
                Kind::ExistsConstr { slot, .. } => *slot = remap(*slot),
                _ => {}
            }
        }
        let constr_slots = nfree + (c.constr_slots - BOUND_BASE);
        Ok(Evaluator {
            lat,
            nodes: c.nodes,
            root,
            model_preds: model_preds.to_vec(),
            pred_slots: c.pred_slots,
            constr_slots,
            free_constr: c.free_constr,
            rows: Vec::new(),
            row_ids: HashMap::new(),
            projections: HashMap::new(),
            memo: HashMap::new(),
            columns: HashMap::new(),
            preimage: HashMap::new(),
        })
    }

    /// Free constraint variables, in the order `holds` expects their values.
    pub fn free_constraint_vars(&self) -> &[String] {
        &self.free_constr
    }

    pub fn model_preds(&self) -> &[String] {
        &self.model_preds
    }

    fn intern(&mut self, row: Vec<Constraint>) -> u32 {
        if let Some(&id) = self.row_ids.get(&row) {
            return id;
        }
        let id = self.rows.len() as u32;
        self.rows.push(row.clone());
        self.row_ids.insert(row, id);
        id
    }

    // Cache keys only see the columns a subformula reads, so results are
    // shared across assignments to the other columns.
    fn intern_projection(&mut self, row: u32, cols: &[usize]) -> u32 {
        let r = &self.rows[row as usize];
        let key: Vec<Constraint> = cols.iter().map(|&c| r[c]).collect();
        let next = self.projections.len() as u32;
        *self.projections.entry(key).or_insert(next)
    }

    fn load(&mut self, m: &Model) -> Result<Vec<u32>, LogicError> {
        if m.preds != self.model_preds {
            return Err(LogicError::BadColumns);
        }
        if m.steps.is_empty() {
            return Err(LogicError::EmptyModel);
        }
        let bottom = self.lat.bottom();
        let width = self.pred_slots;
        Ok(m.steps
            .iter()
            .map(|v| {
                let mut row = v.clone();
                row.resize(width, bottom);
                self.intern(row)
            })
            .collect())
    }

    /// `ρ ⊨_γ φ` with `gamma` listing values for
    /// [`Evaluator::free_constraint_vars`].
    pub fn holds(&mut self, m: &Model, gamma: &[Constraint]) -> Result<bool, LogicError> {
        if gamma.len() != self.free_constr.len() {
            let missing = self.free_constr[gamma.len().min(self.free_constr.len())..]
                .first()
                .cloned()
                .unwrap_or_default();
            return Err(LogicError::MissingConstraintVar(missing));
        }
        let seq = self.load(m)?;
        let mut g = vec![self.lat.bottom(); self.constr_slots];
        g[..gamma.len()].copy_from_slice(gamma);
        Ok(self.eval(self.root, &seq, &mut g))
    }

    /// `ρ ⊨ φ`: holds under every assignment of the free constraint
    /// variables. Returns the first refuting assignment, if any.
    pub fn refuting_gamma(&mut self, m: &Model) -> Result<Option<Vec<Constraint>>, LogicError> {
        let seq = self.load(m)?;
        let n = self.free_constr.len();
        let size = self.lat.len();
        let mut idx = vec![0usize; n];
        let mut g = vec![self.lat.bottom(); self.constr_slots];
        loop {
            for (i, &j) in idx.iter().enumerate() {
                g[i] = Constraint(j as u16);
            }
            if !self.eval(self.root, &seq, &mut g) {
                return Ok(Some(g[..n].to_vec()));
            }
            if !super::model::advance(&mut idx, size) {
                return Ok(None);
            }
        }
    }

    pub fn holds_all_gamma(&mut self, m: &Model) -> Result<bool, LogicError> {
        Ok(self.refuting_gamma(m)?.is_none())
    }

    fn term(&self, t: &CTerm, g: &[Constraint]) -> Constraint {
        match t {
            CTerm::Const(c) => *c,
            CTerm::Var(s) => g[*s],
            CTerm::Lub(a, b) => self.lat.lub(self.term(a, g), self.term(b, g)),
            CTerm::Cyl(x, a) => self.lat.exists_var(*x, self.term(a, g)),
        }
    }

    fn eval(&mut self, id: usize, seq: &[u32], g: &mut Vec<Constraint>) -> bool {
        // Atoms and connectives are cheap; only cache the nodes that search.
        let cached = matches!(
            self.nodes[id].kind,
            Kind::ExistsVar { .. } | Kind::ExistsPred { .. } | Kind::ExistsConstr { .. } | Kind::Until(..)
        );
        let key = if cached {
            let gk: Vec<Constraint> = self.nodes[id].gamma_deps.iter().map(|&s| g[s]).collect();
            let cols = std::mem::take(&mut self.nodes[id].pred_deps);
            let proj: Vec<u32> = seq.iter().map(|&r| self.intern_projection(r, &cols)).collect();
            self.nodes[id].pred_deps = cols;
            let key = (id as u32, proj, gk);
            if let Some(&r) = self.memo.get(&key) {
                return r;
            }
            Some(key)
        } else {
            None
        };
        let kind = self.nodes[id].kind.clone();
        let r = match kind {
            Kind::Leq(a, b) => {
                let (a, b) = (self.term(&a, g), self.term(&b, g));
                self.lat.entails(b, a)
            }
            Kind::Pred(slot, t) => {
                let c = self.term(&t, g);
                self.lat.entails(self.rows[seq[0] as usize][slot], c)
            }
            Kind::Not(a) => !self.eval(a, seq, g),
            Kind::And(a, b) => self.eval(a, seq, g) && self.eval(b, seq, g),
            Kind::Next(a) => {
                if seq.len() == 1 {
                    self.eval(a, seq, g)
                } else {
                    self.eval(a, &seq[1..], g)
                }
            }
            Kind::Until(a, b) => {
                let mut r = false;
                for j in 0..seq.len() {
                    if self.eval(b, &seq[j..], g) {
                        r = true;
                        break;
                    }
                    if !self.eval(a, &seq[j..], g) {
                        break;
                    }
                }
                r
            }
            Kind::ExistsConstr { slot, body } => {
                let saved = g[slot];
                let mut r = false;
                for c in self.lat.elements() {
                    g[slot] = c;
                    if self.eval(body, seq, g) {
                        r = true;
                        break;
                    }
                }
                g[slot] = saved;
                r
            }
            Kind::ExistsPred { slot, body } => {
                let cols = self.columns_of(seq.len());
                let mut r = false;
                for col in cols.iter() {
                    let new_seq: Vec<u32> = seq
                        .iter()
                        .zip(col)
                        .map(|(&rid, &c)| {
                            let mut row = self.rows[rid as usize].clone();
                            row[slot] = c;
                            self.intern(row)
                        })
                        .collect();
                    if self.eval(body, &new_seq, g) {
                        r = true;
                        break;
                    }
                }
                r
            }
            Kind::ExistsVar { x, body, varied } => self.exists_var(x, body, &varied, seq, g),
        };
        if let Some(key) = key {
            self.memo.insert(key, r);
        }
        r
    }

    fn columns_of(&mut self, n: usize) -> std::sync::Arc<Vec<Vec<Constraint>>> {
        let lat = self.lat;
        self.columns
            .entry(n)
            .or_insert_with(|| std::sync::Arc::new(monotone_columns(lat, n)))
            .clone()
    }

    fn preimage_of(&mut self, x: VarId, c: Constraint) -> Vec<Constraint> {
        let lat = self.lat;
        let key = (x, lat.exists_var(x, c));
        self.preimage
            .entry(key)
            .or_insert_with(|| lat.elements().filter(|&d| lat.exists_var(x, d) == key.1).collect())
            .clone()
    }

    // Searches admissible ρ′ with ∃x ρ′ = ∃x ρ. Only the columns the body
    // reads are varied; the others keep their values.
    fn exists_var(&mut self, x: VarId, body: usize, varied: &[usize], seq: &[u32], g: &mut Vec<Constraint>) -> bool {
        let n = seq.len();
        let orig: Vec<Vec<Constraint>> = seq.iter().map(|&r| self.rows[r as usize].clone()).collect();
        let choices: Vec<Vec<Vec<Constraint>>> = orig
            .iter()
            .map(|row| varied.iter().map(|&s| self.preimage_of(x, row[s])).collect())
            .collect();
        let mut cur = orig.clone();
        let mut found = false;
        self.search(body, varied, &choices, &mut cur, 0, 0, n, g, &mut found);
        found
    }

    #[allow(clippy::too_many_arguments)]
    fn search(
        &mut self,
        body: usize,
        varied: &[usize],
        choices: &[Vec<Vec<Constraint>>],
        cur: &mut Vec<Vec<Constraint>>,
        t: usize,
        j: usize,
        n: usize,
        g: &mut Vec<Constraint>,
        found: &mut bool,
    ) {
        if *found {
            return;
        }
        if t == n {
            let seq: Vec<u32> = cur.iter().map(|r| self.intern(r.clone())).collect();
            if self.eval(body, &seq, g) {
                *found = true;
            }
            return;
        }
        if j == varied.len() {
            self.search(body, varied, choices, cur, t + 1, 0, n, g, found);
            return;
        }
        let slot = varied[j];
        let lat = self.lat;
        for &v in &choices[t][j] {
            let ok = match slot {
                I_SLOT => t == 0 || lat.entails(v, cur[t - 1][O_SLOT]) && lat.entails(v, cur[t - 1][I_SLOT]),
                O_SLOT => lat.entails(v, cur[t][I_SLOT]) && (t + 1 < n || v == cur[t][I_SLOT]),
                _ => t == 0 || lat.entails(v, cur[t - 1][slot]),
            };
            if !ok {
                continue;
            }
            cur[t][slot] = v;
            self.search(body, varied, choices, cur, t, j + 1, n, g, found);
            if *found {
                return;
            }
        }
    }
}

/// `ρ ⊨_γ φ` for a named constraint assignment.
pub fn holds(
    lat: &Lattice,
    m: &Model,
    gamma: &BTreeMap<String, Constraint>,
    phi: &Formula,
) -> Result<bool, LogicError> {
    let mut ev = Evaluator::new(lat, phi, &m.preds)?;
    let mut g = Vec::new();
    for p in ev.free_constraint_vars() {
        g.push(
            *gamma
                .get(p)
                .ok_or_else(|| LogicError::MissingConstraintVar(p.clone()))?,
        );
    }
    ev.holds(m, &g)
}

/// `ρ ⊨ φ`: `ρ ⊨_γ φ` for every `γ`.
pub fn holds_all_gamma(lat: &Lattice, m: &Model, phi: &Formula) -> Result<bool, LogicError> {
    Evaluator::new(lat, phi, &m.preds)?.holds_all_gamma(m)
}
