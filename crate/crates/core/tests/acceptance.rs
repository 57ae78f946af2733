//! One line per acceptance criterion; the test fails if any criterion does.

mod common;

use std::collections::BTreeSet;

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;
use tccp::checker::{
    check_equivalence, check_proof, check_sat, parse_proof_script, HIDING_EXAMPLE_PROGRAM, HIDING_EXAMPLE_PROOF,
};
use tccp::constraint::{check_cylindric_axioms, HerbrandEqSystem};
use tccp::logic::valid_bounded;
use tccp::operational::steps_until_blocked;
use tccp::syntax::macros::tell_axiom;
use tccp::syntax::{parse_agent, parse_formula, parse_program, parse_program_in, Agent};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(2, |n| n.get())
}

fn cylindric_axioms() -> Outcome {
    let sys = HerbrandEqSystem::new(["x", "y", "z"], ["a", "b"]);
    let r = check_cylindric_axioms(&sys).unwrap();
    outcome(
        r.passed(),
        format!(
            "{} elements, {} instances, {} violations",
            r.elements,
            r.instances_checked,
            r.violations.len()
        ),
    )
}

fn logic_laws() -> Outcome {
    let lat = common::small();
    let laws = [
        "forall p. forall q. forall X. p <= q -> (X(q) -> X(p))",
        "forall p. forall X. X(p) -> always X(p)",
        "forall p. I(p) -> O(p)",
        "forall p. O(p) -> next I(p)",
    ];
    let mut failed = Vec::new();
    for src in laws {
        let f = parse_formula(&lat, src).unwrap();
        if !valid_bounded(&lat, &f, 4, workers()).unwrap().is_valid() {
            failed.push(src);
        }
    }
    let claim = parse_formula(&lat, "O(x=a)").unwrap();
    let refuted = valid_bounded(&lat, &claim, 4, workers()).unwrap();
    let cx = refuted.counterexample.as_ref();
    let cx_ok = cx.is_some_and(|c| c.model.value(0, "O") == Some(lat.bottom()));
    outcome(
        failed.is_empty() && cx_ok,
        format!(
            "{}/4 laws valid over {} elements at k=4; O(x=a) {}",
            4 - failed.len(),
            lat.len(),
            match cx {
                Some(c) => format!("refuted with v1(O)={}", lat.show(c.model.steps[0][1])),
                None => "not refuted".into(),
            }
        ),
    )
}

fn parallel_timing() -> Outcome {
    let p = parse_program("vars: x; consts: a; main: (ask(x=a) -> stop) || (tell(x=a) -> stop);").unwrap();
    let c = p.lat().atom("x", "a").unwrap();
    let from_c = steps_until_blocked(&p, &p.main, c, 8).unwrap();
    let from_true = steps_until_blocked(&p, &p.main, p.lat().bottom(), 8).unwrap();
    outcome(
        from_c == BTreeSet::from([1]) && from_true == BTreeSet::from([2]),
        format!("from c: {from_c:?} steps, from true: {from_true:?} steps"),
    )
}

fn hiding_example() -> Outcome {
    let p = parse_program(HIDING_EXAMPLE_PROGRAM).unwrap();
    let Agent::Hide(_, body) = &p.main else { unreachable!() };
    let f1 = parse_formula(p.lat(), "next O(y=b)").unwrap();
    let f2 = parse_formula(p.lat(), "I(x=a) \\/ next O(y=b)").unwrap();
    let r1 = check_sat(&p, &p.main, &f1, 5, workers()).unwrap();
    let r2 = check_sat(&p, body, &f2, 5, workers()).unwrap();
    outcome(
        r1.is_valid() && r2.is_valid(),
        format!(
            "exists x.A sat next O(y=b): {} ({} models); A sat I(x=a) \\/ next O(y=b): {} ({} models)",
            if r1.is_valid() { "valid" } else { "refuted" },
            r1.examined,
            if r2.is_valid() { "valid" } else { "refuted" },
            r2.examined
        ),
    )
}

fn semantics_agree() -> Outcome {
    let mut failing = Vec::new();
    let mut stutter_only = true;
    for (name, body) in common::corpus::PROGRAMS {
        let p = parse_program(&common::corpus::source(body)).unwrap();
        let mut bad = Vec::new();
        for k in 1..=4 {
            let r = check_equivalence(&p, k).unwrap();
            if !r.passed() {
                bad.push(format!(
                    "k={k}: +{} op-only, +{} den-only",
                    r.only_operational.len(),
                    r.only_denotational.len()
                ));
                if k >= 2 {
                    stutter_only &= r.only_operational.is_empty()
                        && r.only_denotational
                            .iter()
                            .all(|d| d.kind == tccp::checker::DiffKind::TrailingStutter);
                }
            }
        }
        if !bad.is_empty() {
            failing.push(format!("{name} [{}]", bad.join(", ")));
        }
    }
    outcome(
        failing.is_empty(),
        format!(
            "{} programs, k=1..4, {} with a nonempty symmetric difference{}{}",
            common::corpus::PROGRAMS.len(),
            failing.len(),
            if failing.is_empty() {
                String::new()
            } else {
                format!(": {}", failing.join("; "))
            },
            if failing.is_empty() {
                ""
            } else if stutter_only {
                "; all differences are denotational singletons <d,d> whose operational counterpart has a second stutter"
            } else {
                ""
            }
        ),
    )
}

fn tell_axiom_valid() -> Outcome {
    let p = parse_program(HIDING_EXAMPLE_PROGRAM).unwrap();
    let lat = p.lat();
    let mut refuted = Vec::new();
    for c in lat.elements() {
        let r = check_sat(&p, &Agent::Tell(c), &tell_axiom(lat, c), 4, workers()).unwrap();
        if !r.is_valid() {
            refuted.push(lat.show(c).to_string());
        }
    }
    outcome(
        refuted.is_empty(),
        format!(
            "{}/{} elements valid at k=4{}",
            lat.len() - refuted.len(),
            lat.len(),
            if refuted.is_empty() {
                String::new()
            } else {
                format!("; refuted for {}", refuted.join(", "))
            }
        ),
    )
}

fn proof_replay() -> Outcome {
    let p = parse_program(HIDING_EXAMPLE_PROGRAM).unwrap();
    let t = parse_proof_script(p.lat(), HIDING_EXAMPLE_PROOF).unwrap();
    let bundled = check_proof(&p, &t, 4, workers()).unwrap();
    let mut accepted = 0;
    let mut unsound = Vec::new();
    for case in common::proofs::CASES {
        let p = parse_program(&common::proofs::source(case.program)).unwrap();
        let t = parse_proof_script(p.lat(), case.script).unwrap();
        let r = check_proof(&p, &t, 4, workers()).unwrap();
        if r.accepted {
            accepted += 1;
            if r.unsound() {
                let cx = r.root_check.as_ref().and_then(|c| c.counterexample.as_ref()).unwrap();
                unsound.push(format!("{} on {}", case.name, cx.sequence.display(p.lat())));
            }
        }
    }
    outcome(
        bundled.passed() && unsound.is_empty(),
        format!(
            "bundled script {}; {accepted}/{} trees accepted, {} refuted at the root{}",
            if bundled.passed() {
                "accepted and its root valid"
            } else {
                "fails"
            },
            common::proofs::CASES.len(),
            unsound.len(),
            if unsound.is_empty() {
                String::new()
            } else {
                format!(": {}", unsound.join("; "))
            }
        ),
    )
}

fn round_trip() -> Outcome {
    let lat = common::medium();
    let mut runner = TestRunner::deterministic();
    let agents = common::agent(&lat, 4, vec!["p".into()]);
    let formulas = common::formula(&lat, 4);
    let mut bad = 0;
    for _ in 0..1000 {
        let a = agents.new_tree(&mut runner).unwrap().current();
        let text = a.display(&lat).to_string();
        if parse_agent(&lat, &text).ok().as_ref() != Some(&a) {
            bad += 1;
        }
        let f = formulas.new_tree(&mut runner).unwrap().current();
        let text = f.display(&lat).to_string();
        if parse_formula(&lat, &text).ok().as_ref() != Some(&f) {
            bad += 1;
        }
    }
    let prog = parse_program_in(
        lat.clone(),
        "p(x) :: ask(x=a) -> p(y); main: exists x. p(x) || tell(x=y);",
    )
    .unwrap();
    let text = prog.display().to_string();
    let again = parse_program(&text).unwrap().display().to_string();
    outcome(
        bad == 0 && again == text,
        format!("1000 agents and 1000 formulas, {bad} mismatches"),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 8] = [
        ("cylindric axioms", cylindric_axioms),
        ("logic laws", logic_laws),
        ("parallel timing", parallel_timing),
        ("hiding example", hiding_example),
        ("operational = denotational", semantics_agree),
        ("tell axiom", tell_axiom_valid),
        ("proof replay and soundness", proof_replay),
        ("parser round trip", round_trip),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        println!(
            "criterion {}: {} {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
