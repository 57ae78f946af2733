#![allow(dead_code)]

pub mod corpus;
pub mod proofs;

use std::sync::Arc;

use proptest::prelude::*;
use tccp::constraint::{Constraint, HerbrandEqSystem, Lattice, VarId};
use tccp::syntax::{Agent, Formula, Term};

pub fn lattice(vars: &[&str], consts: &[&str]) -> Arc<Lattice> {
    Arc::new(Lattice::from_system(&HerbrandEqSystem::new(vars.iter().copied(), consts.iter().copied())).unwrap())
}

/// `{x, y}` over `{a}`: six elements.
pub fn small() -> Arc<Lattice> {
    lattice(&["x", "y"], &["a"])
}

/// `{x, y}` over `{a, b}`.
pub fn medium() -> Arc<Lattice> {
    lattice(&["x", "y"], &["a", "b"])
}

pub fn constraint(lat: &Lattice) -> impl Strategy<Value = Constraint> + Clone {
    (0..lat.len() as u16).prop_map(Constraint)
}

pub fn var(lat: &Lattice) -> impl Strategy<Value = VarId> + Clone {
    (0..lat.vars().len() as u16).prop_map(VarId)
}

/// Source-level agents of depth at most `depth`; calls use `procs`.
pub fn agent(lat: &Lattice, depth: u32, procs: Vec<String>) -> BoxedStrategy<Agent> {
    agent_with(lat, depth, procs, true)
}

/// As [`agent`], optionally without `now`.
pub fn agent_with(lat: &Lattice, depth: u32, procs: Vec<String>, with_now: bool) -> BoxedStrategy<Agent> {
    let c = constraint(lat);
    let v = var(lat);
    let mut leaves: Vec<BoxedStrategy<Agent>> =
        vec![Just(Agent::Stop).boxed(), c.clone().prop_map(Agent::Tell).boxed()];
    if !procs.is_empty() {
        leaves.push(
            (proptest::sample::select(procs), v.clone())
                .prop_map(|(p, x)| Agent::Call(p, x))
                .boxed(),
        );
    }
    let leaf = proptest::strategy::Union::new(leaves).boxed();
    leaf.prop_recursive(depth.saturating_sub(1), 24, 3, move |inner| {
        let mut forms: Vec<BoxedStrategy<Agent>> = vec![
            proptest::collection::vec((c.clone(), inner.clone()), 1..3)
                .prop_map(Agent::Choice)
                .boxed(),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Agent::par(a, b))
                .boxed(),
            (v.clone(), inner.clone()).prop_map(|(x, a)| Agent::hide(x, a)).boxed(),
        ];
        if with_now {
            forms.push(
                (c.clone(), inner.clone(), inner)
                    .prop_map(|(c, a, b)| Agent::now(c, a, b))
                    .boxed(),
            );
        }
        proptest::strategy::Union::new(forms)
    })
    .boxed()
}

const CONSTR_NAMES: [&str; 2] = ["p", "q"];
const PRED_NAMES: [&str; 2] = ["X", "Y"];

pub fn term(lat: &Lattice) -> BoxedStrategy<Term> {
    let leaf = prop_oneof![
        constraint(lat).prop_map(Term::Const),
        proptest::sample::select(CONSTR_NAMES.to_vec()).prop_map(Term::var),
    ];
    let v = var(lat);
    leaf.prop_recursive(2, 6, 2, move |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::lub(a, b)),
            (v.clone(), inner).prop_map(|(x, t)| Term::cyl(x, t)),
        ]
    })
    .boxed()
}

/// Formulas over `I`, `O`, `X`, `Y` and the constraint variables `p`, `q`.
pub fn formula(lat: &Lattice, depth: u32) -> BoxedStrategy<Formula> {
    let t = term(lat);
    let preds: Vec<&str> = ["I", "O"].into_iter().chain(PRED_NAMES).collect();
    let leaf = prop_oneof![
        (t.clone(), t.clone()).prop_map(|(a, b)| Formula::leq(a, b)),
        (proptest::sample::select(preds), t).prop_map(|(x, t)| Formula::pred(x, t)),
    ];
    let v = var(lat);
    leaf.prop_recursive(depth, 16, 2, move |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            inner.clone().prop_map(Formula::next),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::until(a, b)),
            (v.clone(), inner.clone()).prop_map(|(x, f)| Formula::exists_var(x, f)),
            (proptest::sample::select(PRED_NAMES.to_vec()), inner.clone())
                .prop_map(|(x, f)| Formula::exists_pred(x, f)),
            (proptest::sample::select(CONSTR_NAMES.to_vec()), inner).prop_map(|(p, f)| Formula::exists_constr(p, f)),
        ]
    })
    .boxed()
}
