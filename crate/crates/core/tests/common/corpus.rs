//! Closed programs exercising every agent form at depth at most three.

pub const HEADER: &str = "vars: x, y; consts: a;";

pub const PROGRAMS: &[(&str, &str)] = &[
    ("stop", "main: stop;"),
    ("tell", "main: tell(x=a);"),
    ("tell-true", "main: tell(true);"),
    ("tell-false", "main: tell(false);"),
    ("tell-diagonal", "main: tell(x=y);"),
    ("ask", "main: ask(x=a) -> tell(y=a);"),
    ("ask-true", "main: ask(true) -> tell(x=a);"),
    ("choice", "main: ask(x=a) -> stop + ask(y=a) -> tell(x=y);"),
    ("choice-overlap", "main: ask(x=a) -> stop + ask(x=a) -> tell(y=a);"),
    ("par", "main: tell(x=a) || tell(y=a);"),
    ("ask-par-tell", "main: ask(x=a) -> stop || tell(x=a);"),
    ("tell-then", "main: tell(x=a) -> tell(y=a);"),
    ("ask-par", "main: ask(x=a) -> (tell(y=a) || tell(x=y));"),
    ("ask-diagonal-hide", "main: ask(x=y) -> exists x. tell(x=a);"),
    ("hide", "main: exists x. tell(x=a);"),
    ("hide-diagonal", "main: exists x. tell(x=y);"),
    ("hide-ask", "main: exists x. (ask(x=a) -> tell(y=a));"),
    ("hide-par", "main: exists x. (tell(x=a) || tell(x=y));"),
    ("hide-par-y", "main: exists y. (tell(y=a) || tell(x=y));"),
    ("hide-hide", "main: exists x. exists y. tell(x=y);"),
    ("par-hide", "main: tell(y=a) || exists x. tell(x=y);"),
    ("now-then-blocks", "main: now x=a then stop else tell(y=a);"),
    ("now-else-blocks", "main: now x=a then tell(y=a) else stop;"),
    ("now-both-move", "main: now x=y then tell(x=a) else tell(y=a);"),
    ("now-true", "main: now true then tell(x=a) else tell(y=a);"),
    ("now-ask", "main: now x=a then (ask(y=a) -> tell(x=y)) else tell(y=a);"),
    ("hide-now", "main: exists x. now x=a then tell(y=a) else tell(x=a);"),
    (
        "rec-wait",
        "p(x) :: ask(x=a) -> p(x) + ask(y=a) -> tell(x=a);\nmain: p(x);",
    ),
    ("rec-grow", "p(x) :: ask(true) -> (tell(y=a) || p(x));\nmain: p(x);"),
    ("rec-par", "p(x) :: ask(y=a) -> p(x);\nmain: tell(y=a) || p(x);"),
    ("alias", "p(x) :: ask(x=a) -> tell(y=a);\nmain: p(y);"),
    (
        "now-call",
        "p(x) :: ask(true) -> tell(y=a);\nmain: now x=a then p(x) else stop;",
    ),
];

pub fn source(body: &str) -> String {
    format!("{HEADER}\n{body}\n")
}
