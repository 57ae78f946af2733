//! The memoized evaluator against a direct clause-by-clause reading of the
//! satisfaction relation that enumerates quantifier ranges by brute force.

mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use tccp::constraint::{Constraint, Lattice, VarId};
use tccp::logic::{admissible, admissible_models, holds, holds_all_gamma, is_monotone, next_seq, valid_bounded, Model};
use tccp::syntax::macros::stut;
use tccp::syntax::{parse_formula, Formula, Term};

struct Naive<'a> {
    lat: &'a Lattice,
    universe: BTreeMap<usize, Vec<Model>>,
}

impl<'a> Naive<'a> {
    fn new(lat: &'a Lattice, extra: &[String], k: usize) -> Self {
        let mut universe = BTreeMap::new();
        for m in admissible_models(lat, extra, k) {
            universe.entry(m.len()).or_insert_with(Vec::new).push(m);
        }
        Naive { lat, universe }
    }

    fn term(&self, t: &Term, g: &BTreeMap<String, Constraint>) -> Constraint {
        match t {
            Term::Const(c) => *c,
            Term::Var(p) => g[p],
            Term::Lub(a, b) => self.lat.lub(self.term(a, g), self.term(b, g)),
            Term::Cyl(x, a) => self.lat.exists_var(*x, self.term(a, g)),
        }
    }

    fn project(&self, x: VarId, m: &Model) -> Vec<Vec<Constraint>> {
        m.steps
            .iter()
            .map(|v| v.iter().map(|c| self.lat.exists_var(x, *c)).collect())
            .collect()
    }

    fn holds(&self, m: &Model, g: &mut BTreeMap<String, Constraint>, f: &Formula) -> bool {
        let lat = self.lat;
        match f {
            Formula::Leq(a, b) => lat.entails(self.term(b, g), self.term(a, g)),
            Formula::Pred(x, t) => lat.entails(m.value(0, x).unwrap(), self.term(t, g)),
            Formula::Not(a) => !self.holds(m, g, a),
            Formula::And(a, b) => self.holds(m, g, a) && self.holds(m, g, b),
            Formula::Next(a) => self.holds(&next_seq(m), g, a),
            Formula::Until(a, b) => (0..m.len()).any(|j| {
                let at = |i: usize| Model {
                    preds: m.preds.clone(),
                    steps: m.steps[i..].to_vec(),
                };
                self.holds(&at(j), g, b) && (0..j).all(|i| self.holds(&at(i), g, a))
            }),
            Formula::ExistsVar(x, a) => {
                let target = self.project(*x, m);
                self.universe[&m.len()]
                    .iter()
                    .filter(|r| self.project(*x, r) == target)
                    .any(|r| {
                        assert!(admissible(lat, r));
                        self.holds(r, g, a)
                    })
            }
            Formula::ExistsPred(x, a) => {
                let j = m.column(x).unwrap();
                self.universe[&m.len()]
                    .iter()
                    .filter(|r| {
                        (0..r.preds.len())
                            .filter(|&i| i != j)
                            .all(|i| (0..m.len()).all(|t| r.steps[t][i] == m.steps[t][i]))
                    })
                    .any(|r| self.holds(r, g, a))
            }
            Formula::ExistsConstr(p, a) => {
                let saved = g.get(p).copied();
                let r = lat.elements().any(|c| {
                    g.insert(p.clone(), c);
                    self.holds(m, g, a)
                });
                match saved {
                    Some(c) => g.insert(p.clone(), c),
                    None => g.remove(p),
                };
                r
            }
        }
    }
}

fn extra() -> Vec<String> {
    vec!["X".to_string(), "Y".to_string()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn evaluator_agrees_with_brute_force(
        f in common::formula(&common::lattice(&["x"], &["a"]), 3),
        pick in 0usize..10_000,
        gp in 0u16..3,
        gq in 0u16..3,
    ) {
        let lat = common::lattice(&["x"], &["a"]);
        let naive = Naive::new(&lat, &extra(), 2);
        let models: Vec<&Model> = naive.universe.values().flatten().collect();
        let m = models[pick % models.len()];
        let mut g = BTreeMap::from([("p".to_string(), Constraint(gp)), ("q".to_string(), Constraint(gq))]);
        let expected = naive.holds(m, &mut g, &f);
        let got = holds(&lat, m, &g, &f).unwrap();
        prop_assert_eq!(got, expected, "{} on {:?}", f.display(&lat), m.steps);
    }

    #[test]
    fn evaluator_agrees_on_two_variables(
        f in common::formula(&common::small(), 2),
        pick in 0usize..10_000,
        gp in 0u16..6,
        gq in 0u16..6,
    ) {
        let lat = common::small();
        let naive = Naive::new(&lat, &["X".to_string()], 2);
        let models: Vec<&Model> = naive.universe.values().flatten().collect();
        let m = models[pick % models.len()];
        // Y has no column here; bind it away.
        let f = Formula::exists_pred("Y", f);
        let mut g = BTreeMap::from([("p".to_string(), Constraint(gp)), ("q".to_string(), Constraint(gq))]);
        let naive_y = Naive::new(&lat, &["X".to_string(), "Y".to_string()], 2);
        let lifted = Model {
            preds: vec!["I".into(), "O".into(), "X".into(), "Y".into()],
            steps: m.steps.iter().map(|v| { let mut v = v.clone(); v.push(lat.bottom()); v }).collect(),
        };
        let expected = naive_y.holds(&lifted, &mut g, &f);
        let got = holds(&lat, m, &g, &f).unwrap();
        prop_assert_eq!(got, expected, "{} on {:?}", f.display(&lat), m.steps);
    }

    #[test]
    fn admissible_matches_pairwise_check(cols in proptest::collection::vec((0u16..6, 0u16..6, 0u16..6), 1..4)) {
        let lat = common::small();
        let m = Model {
            preds: vec!["I".into(), "O".into(), "X".into()],
            steps: cols.iter().map(|&(i, o, x)| vec![Constraint(i), Constraint(o), Constraint(x)]).collect(),
        };
        let e = |a: Constraint, b: Constraint| lat.entails(a, b);
        let mut ok = true;
        for t in 0..m.len() {
            let v = &m.steps[t];
            ok &= e(v[1], v[0]);
            if t > 0 {
                let u = &m.steps[t - 1];
                ok &= (0..3).all(|j| e(v[j], u[j])) && e(v[0], u[1]);
            }
        }
        prop_assert_eq!(is_monotone(&lat, &m), ok);
    }
}

#[test]
fn stut_holds_exactly_on_stuttering_steps() {
    let lat = common::small();
    for m in admissible_models(&lat, &[], 2) {
        let expect = m.steps[0][0] == m.steps[0][1];
        assert_eq!(holds_all_gamma(&lat, &m, &stut(&lat)).unwrap(), expect);
    }
}

#[test]
fn next_on_a_singleton_is_the_identity() {
    let lat = common::small();
    let xa = lat.atom("x", "a").unwrap();
    let v = vec![xa, xa];
    let one = Model {
        preds: vec!["I".into(), "O".into()],
        steps: vec![v.clone()],
    };
    assert_eq!(next_seq(&one), one);
    let three = Model {
        preds: one.preds.clone(),
        steps: vec![vec![lat.bottom(), lat.bottom()], v.clone(), v.clone()],
    };
    assert_eq!(next_seq(&three).steps, vec![v.clone(), v.clone()]);
    assert_eq!(next_seq(&next_seq(&three)).steps, vec![v]);
    for src in ["O(x=a)", "I(y=a) until O(x=a)", "exists x. O(x=a)"] {
        let f = parse_formula(&lat, src).unwrap();
        for m in admissible_models(&lat, &[], 1) {
            let g = BTreeMap::new();
            assert_eq!(
                holds(&lat, &m, &g, &Formula::next(f.clone())).unwrap(),
                holds(&lat, &m, &g, &f).unwrap()
            );
        }
    }
}

#[test]
fn false_until_is_the_right_operand() {
    let lat = common::small();
    let falsity = Formula::falsity(&lat);
    for src in ["O(x=a)", "next I(y=a)", "forall p. O(p) -> I(p)"] {
        let f = parse_formula(&lat, src).unwrap();
        let u = Formula::until(falsity.clone(), f.clone());
        for m in admissible_models(&lat, &[], 3) {
            assert_eq!(
                holds_all_gamma(&lat, &m, &u).unwrap(),
                holds_all_gamma(&lat, &m, &f).unwrap()
            );
        }
    }
}

#[test]
fn box_and_diamond_abbreviations() {
    let lat = common::small();
    let naive = Naive::new(&lat, &[], 3);
    for src in ["O(x=a)", "I(y=a) /\\ not O(x=y)", "next O(x=a)"] {
        let f = parse_formula(&lat, src).unwrap();
        for m in admissible_models(&lat, &[], 3) {
            let g = BTreeMap::new();
            let ev = holds(&lat, &m, &g, &Formula::eventually(&lat, f.clone())).unwrap();
            let suffix = |i: usize| Model {
                preds: m.preds.clone(),
                steps: m.steps[i..].to_vec(),
            };
            assert_eq!(ev, (0..m.len()).any(|i| naive.holds(&suffix(i), &mut g.clone(), &f)));
            let al = holds(&lat, &m, &g, &Formula::always(&lat, f.clone())).unwrap();
            assert_eq!(al, (0..m.len()).all(|i| naive.holds(&suffix(i), &mut g.clone(), &f)));
        }
    }
}

#[test]
fn free_constraint_variables_range_over_the_lattice() {
    let lat = common::small();
    let m = &admissible_models(&lat, &[], 1)[0];
    assert!(holds_all_gamma(&lat, m, &parse_formula(&lat, "p <= p").unwrap()).unwrap());
    assert!(!holds_all_gamma(&lat, m, &parse_formula(&lat, "p <= q").unwrap()).unwrap());
    let closed = parse_formula(&lat, "O(x=a)").unwrap();
    for m in admissible_models(&lat, &[], 2) {
        assert_eq!(
            holds_all_gamma(&lat, &m, &closed).unwrap(),
            holds(&lat, &m, &BTreeMap::new(), &closed).unwrap()
        );
    }
}

#[test]
fn output_claim_has_a_bottom_counterexample() {
    let lat = common::small();
    let v = valid_bounded(&lat, &parse_formula(&lat, "O(x=a)").unwrap(), 4, 2).unwrap();
    let cx = v.counterexample.unwrap();
    assert_eq!(cx.model.value(0, "O"), Some(lat.bottom()));
}

#[test]
fn worker_count_does_not_change_the_counterexample() {
    let lat = common::small();
    let f = parse_formula(&lat, "I(x=a) \\/ next O(y=a)").unwrap();
    let one = valid_bounded(&lat, &f, 3, 1).unwrap();
    for w in [2, 3, 8] {
        assert_eq!(valid_bounded(&lat, &f, 3, w).unwrap(), one);
    }
}
