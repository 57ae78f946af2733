//! Derivations replayed by the tests, with the programs they are about.

pub const HEADER: &str = "vars: x, y; consts: a, b;";

pub struct Case {
    pub name: &'static str,
    pub program: &'static str,
    pub script: &'static str,
}

pub const CASES: &[Case] = &[
    Case {
        name: "hiding-example",
        program: tccp::checker::HIDING_EXAMPLE_PROGRAM,
        script: tccp::checker::HIDING_EXAMPLE_PROOF,
    },
    Case {
        name: "choice-body",
        program: "main: ask(x=a) -> tell(true) + ask(true) -> tell(y=b);",
        script: "
            tell_b: T1 => tell(y=b)
            out_b:  T7 tell_b => sat O(y=b)
            tell_t: T1 => tell(true)
            out_t:  T7 tell_t => sat O(true)
            choice: T2 out_t out_b => ask(x=a) -> tell(true) + ask(true) -> tell(y=b)
            body:   T7 choice => sat I(x=a) \\/ next O(y=b)",
    },
    Case {
        name: "recursion",
        program: "p(x) :: ask(y=a) -> p(x);\nmain: p(x);",
        script: "
            hyp:  HYP => p(x) sat always stut
            wait: T2 hyp => ask(y=a) -> p(x)
            weak: T7 wait => sat always stut
            rec:  T6 weak => p(x)",
    },
    Case {
        name: "silent-parallel",
        program: "main: tell(true) || tell(true);",
        script: "
            l:    T1 => tell(true)
            r:    T1 => tell(true)
            both: T5(X, Y) l r",
    },
    Case {
        name: "silent-now",
        program: "main: now x=a then tell(true) else tell(true);",
        script: "
            l:   T1 => tell(true)
            r:   T1 => tell(true)
            now: T3 l r => now x=a then tell(true) else tell(true)",
    },
    Case {
        name: "tell-weakened",
        program: "main: tell(x=a);",
        script: "
            ax:  T1 => tell(x=a)
            out: T7 ax => sat O(x=a)",
    },
    Case {
        name: "tell-axiom",
        program: "main: tell(x=a);",
        script: "ax: T1 => tell(x=a)",
    },
    Case {
        name: "tell-vacuous",
        program: "main: tell(x=a);",
        script: "
            ax:    T1 => tell(x=a)
            wrong: T7 ax => sat O(x=b)",
    },
    Case {
        name: "silent-hiding",
        program: "main: exists x. tell(true);",
        script: "
            ax:  T1 => tell(true)
            hid: T4(x) ax",
    },
];

pub fn source(program: &str) -> String {
    if program.trim_start().starts_with("#") || program.contains("vars:") {
        program.to_string()
    } else {
        format!("{HEADER}\n{program}\n")
    }
}
