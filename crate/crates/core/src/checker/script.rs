//! The proof-script format.
//!
//! One node per line:
//!
//! ```text
//! id: RULE[(args)] premise... [=> [agent] [sat formula]]
//! ```
//!
//! `#` starts a comment; a line that does not start with `id:` continues
//! the previous node. `RULE` is one of `T1`–`T7` or `HYP`; `T4` takes the
//! hidden variable and `T5` the two fresh predicates, e.g. `T5(X, Y)`. The
//! last node is the conclusion.

use thiserror::Error;

use super::proof::{ProofNode, ProofTree, Rule};
use crate::constraint::Lattice;
use crate::syntax::{parse_agent, parse_formula};

pub const HIDING_EXAMPLE_PROGRAM: &str = include_str!("../../data/hiding.tccp");
pub const HIDING_EXAMPLE_PROOF: &str = include_str!("../../data/hiding.proof");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ScriptError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ScriptError {
    ScriptError {
        line,
        message: message.into(),
    }
}

fn logical_lines(src: &str) -> Vec<(usize, String)> {
    let mut out: Vec<(usize, String)> = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let text = raw.split('#').next().unwrap_or("");
        if text.trim().is_empty() {
            continue;
        }
        let continues = !starts_node(text.trim());
        match out.last_mut() {
            Some((_, prev)) if continues => {
                prev.push(' ');
                prev.push_str(text.trim());
            }
            _ => out.push((i + 1, text.trim().to_string())),
        }
    }
    out
}

fn starts_node(line: &str) -> bool {
    let end = line
        .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
        .unwrap_or(line.len());
    end > 0 && line[end..].trim_start().starts_with(':')
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Splits `text` at the first standalone `sat`.
fn split_sat(text: &str) -> (&str, Option<&str>) {
    let bytes = text.as_bytes();
    let mut i = 0;
    while let Some(off) = text[i..].find("sat") {
        let at = i + off;
        let before = at == 0 || !(bytes[at - 1].is_ascii_alphanumeric() || bytes[at - 1] == b'_');
        let end = at + 3;
        let after = end == bytes.len() || !(bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_');
        if before && after {
            return (&text[..at], Some(&text[end..]));
        }
        i = end;
    }
    (text, None)
}

fn rule(lat: &Lattice, line: usize, name: &str, args: Option<&str>) -> Result<Rule, ScriptError> {
    let args: Vec<&str> = args.map(|a| a.split(',').map(str::trim).collect()).unwrap_or_default();
    let none = |r: Rule| {
        if args.is_empty() {
            Ok(r)
        } else {
            Err(err(line, format!("{name} takes no arguments")))
        }
    };
    match name {
        "T1" => none(Rule::T1),
        "T2" => none(Rule::T2),
        "T3" => none(Rule::T3),
        "T6" => none(Rule::T6),
        "T7" => none(Rule::T7),
        "HYP" => none(Rule::Hyp),
        "T4" => match args.as_slice() {
            [x] => lat.var(x).map(Rule::T4).map_err(|e| err(line, e.to_string())),
            _ => Err(err(line, "T4 takes the hidden variable, e.g. T4(x)")),
        },
        "T5" => match args.as_slice() {
            [x, y] if is_ident(x) && is_ident(y) => Ok(Rule::T5(x.to_string(), y.to_string())),
            _ => Err(err(line, "T5 takes two predicate names, e.g. T5(X, Y)")),
        },
        other => Err(err(line, format!("unknown rule `{other}`"))),
    }
}

pub fn parse_proof_script(lat: &Lattice, src: &str) -> Result<ProofTree, ScriptError> {
    let mut nodes = Vec::new();
    for (line, text) in logical_lines(src) {
        let (head, tail) = match text.split_once("=>") {
            Some((h, t)) => (h, Some(t)),
            None => (text.as_str(), None),
        };
        let (id, rest) = head
            .split_once(':')
            .ok_or_else(|| err(line, "expected `id: RULE ...`"))?;
        let id = id.trim();
        if !is_ident(id) {
            return Err(err(line, format!("bad node id `{id}`")));
        }
        let rest = rest.trim();
        let (rule_text, premises_text) = match rest.find(|c: char| c.is_whitespace() || c == '(') {
            Some(i) => rest.split_at(i),
            None => (rest, ""),
        };
        let (args, premises_text) = match premises_text.trim_start().strip_prefix('(') {
            Some(r) => {
                let (a, r) = r.split_once(')').ok_or_else(|| err(line, "unclosed rule arguments"))?;
                (Some(a), r)
            }
            None => (None, premises_text),
        };
        let rule = rule(lat, line, rule_text, args)?;
        let premises: Vec<String> = premises_text.split_whitespace().map(str::to_string).collect();
        if let Some(p) = premises.iter().find(|p| !is_ident(p)) {
            return Err(err(line, format!("bad premise id `{p}`")));
        }
        let (agent, formula) = match tail {
            None => (None, None),
            Some(t) => {
                let (a, f) = split_sat(t);
                let agent = if a.trim().is_empty() {
                    None
                } else {
                    Some(parse_agent(lat, a).map_err(|e| err(line, format!("agent: {e}")))?)
                };
                let formula = match f {
                    Some(f) => Some(parse_formula(lat, f).map_err(|e| err(line, format!("formula: {e}")))?),
                    None => None,
                };
                (agent, formula)
            }
        };
        nodes.push(ProofNode {
            id: id.to_string(),
            rule,
            premises,
            agent,
            formula,
            line,
        });
    }
    Ok(ProofTree { nodes })
}
