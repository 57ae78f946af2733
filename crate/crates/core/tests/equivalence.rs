//! The operational and compositional semantics agree on the corpus and on
//! random agents, except for the single-stutter sequences of `now`.

mod common;

use proptest::prelude::*;
use tccp::checker::{check_equivalence, DiffKind};
use tccp::denotational::{sem_eval_agent, Environment};
use tccp::operational::{reactive_sequences_of, step_all, Configuration};
use tccp::sequence::{Reaction, ReactiveSequence};
use tccp::syntax::{parse_program, parse_program_in, Agent, Program};

fn uses_now(a: &Agent) -> bool {
    match a {
        Agent::Now(..) => true,
        Agent::Stop | Agent::Tell(_) | Agent::Call(..) => false,
        Agent::Choice(bs) => bs.iter().any(|(_, b)| uses_now(b)),
        Agent::Par(a, b) => uses_now(a) || uses_now(b),
        Agent::Hide(_, a) | Agent::HideLocal(_, _, a) => uses_now(a),
    }
}

fn corpus() -> Vec<(&'static str, Program)> {
    common::corpus::PROGRAMS
        .iter()
        .map(|(name, body)| (*name, parse_program(&common::corpus::source(body)).unwrap()))
        .collect()
}

#[test]
fn corpus_covers_every_form_within_depth_three() {
    let progs = corpus();
    assert!(progs.len() >= 30);
    let mut seen = [false; 7];
    for (_, p) in &progs {
        for a in std::iter::once(&p.main).chain(p.decls.iter().map(|d| &d.body)) {
            assert!(a.depth() <= 3, "{}", a.display(p.lat()));
            fn mark(a: &Agent, seen: &mut [bool; 7]) {
                match a {
                    Agent::Stop => seen[0] = true,
                    Agent::Tell(_) => seen[1] = true,
                    Agent::Choice(bs) => {
                        seen[2] = true;
                        bs.iter().for_each(|(_, b)| mark(b, seen));
                    }
                    Agent::Now(_, a, b) => {
                        seen[3] = true;
                        mark(a, seen);
                        mark(b, seen);
                    }
                    Agent::Par(a, b) => {
                        seen[4] = true;
                        mark(a, seen);
                        mark(b, seen);
                    }
                    Agent::Hide(_, a) | Agent::HideLocal(_, _, a) => {
                        seen[5] = true;
                        mark(a, seen);
                    }
                    Agent::Call(..) => seen[6] = true,
                }
            }
            mark(a, &mut seen);
        }
    }
    assert_eq!(seen, [true; 7]);
    assert!(progs
        .iter()
        .any(|(_, p)| !p.decls.is_empty() && p.check_guarded_recursion().is_empty()));
}

#[test]
fn corpus_without_now_agrees_at_every_bound() {
    for (name, p) in corpus() {
        if uses_now(&p.main) || p.decls.iter().any(|d| uses_now(&d.body)) {
            continue;
        }
        for k in 1..=4 {
            let r = check_equivalence(&p, k).unwrap();
            assert!(r.passed(), "{name} at k={k}: {r:?}");
        }
    }
}

#[test]
fn corpus_with_now_differs_only_by_trailing_stutters() {
    for (name, p) in corpus() {
        if !uses_now(&p.main) {
            continue;
        }
        // at k = 1 the longer sequence is out of range on both sides
        for k in 2..=4 {
            let r = check_equivalence(&p, k).unwrap();
            assert!(r.only_operational.is_empty(), "{name} at k={k}");
            assert!(
                r.only_denotational.iter().all(|d| d.kind == DiffKind::TrailingStutter),
                "{name} at k={k}"
            );
        }
    }
}

fn blocked(p: &Program, a: &Agent, d: tccp::constraint::Constraint) -> bool {
    step_all(
        p,
        &Configuration {
            agent: a.clone(),
            store: d,
        },
    )
    .unwrap()
    .is_empty()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn random_agents_without_now_agree(a in common::agent_with(&common::small(), 3, vec!["p".into()], false), k in 1usize..=4) {
        let lat = common::small();
        let p = parse_program_in(lat, "p(x) :: ask(y=a) -> (tell(x=a) || p(x)); main: stop;").unwrap().with_main(a);
        let r = check_equivalence(&p, k).unwrap();
        prop_assert!(r.passed(), "{} at k={}: {:?}", p.main.display(p.lat()), k, r);
    }

    #[test]
    fn now_adds_exactly_the_blocked_singletons(
        c in common::constraint(&common::small()),
        a in common::agent_with(&common::small(), 2, vec![], false),
        b in common::agent_with(&common::small(), 2, vec![], false),
        k in 1usize..=3,
    ) {
        let lat = common::small();
        let p = Program::new(lat.clone(), vec![], Agent::now(c, a.clone(), b.clone()));
        let op = reactive_sequences_of(&p, &p.main, k).unwrap();
        let den = sem_eval_agent(&p, &p.main, &Environment::new(), k).unwrap();
        let mut expected = op.clone();
        for d in lat.elements() {
            let branch = if lat.entails(d, c) { &a } else { &b };
            if blocked(&p, branch, d) {
                expected.insert(ReactiveSequence(vec![Reaction::stutter(d)]));
            }
        }
        prop_assert_eq!(den, expected);
    }
}
