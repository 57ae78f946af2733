use std::sync::Arc;

use thiserror::Error;

use super::agent::Agent;
use super::formula::{Formula, Term, INPUT, OUTPUT};
use super::lexer::{tokenize, Pos, Spanned, Tok};
use super::macros;
use super::program::{Declaration, Program};
use crate::constraint::{Constraint, HerbrandEqSystem, Lattice, VarId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {message}")]
pub struct ParseError {
    pub pos: Pos,
    pub message: String,
}

impl ParseError {
    fn new(pos: Pos, message: impl Into<String>) -> Self {
        ParseError {
            pos,
            message: message.into(),
        }
    }
}

const KEYWORDS: &[&str] = &[
    "stop",
    "tell",
    "ask",
    "now",
    "then",
    "else",
    "exists",
    "forall",
    "main",
    "vars",
    "consts",
    "true",
    "false",
    "not",
    "next",
    "until",
    "always",
    "eventually",
    "stut",
    "loc",
    "inv",
    "par",
    "cyl",
];

fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

struct Cursor {
    toks: Vec<Spanned>,
    i: usize,
}

impl Cursor {
    fn new(src: &str) -> Result<Cursor, ParseError> {
        let toks = tokenize(src).map_err(|(pos, msg)| ParseError::new(pos, msg))?;
        Ok(Cursor { toks, i: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let j = (self.i + n).min(self.toks.len() - 1);
        &self.toks[j].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].tok.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.is_word(w) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn expect_word(&mut self, w: &str) -> Result<(), ParseError> {
        if self.eat_word(w) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{w}`")))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok((s, pos))
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        ParseError::new(self.pos(), format!("expected {wanted}, found {}", self.peek()))
    }

    fn end(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }
}

struct Parser<'a> {
    cur: Cursor,
    lat: &'a Lattice,
}

/// Parses a complete program file: a `vars:`/`consts:` header, declarations
/// `p(x) :: A;`, and a final `main: A;`.
pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let mut cur = Cursor::new(src)?;
    let vars = header_list(&mut cur, "vars")?;
    let consts = header_list(&mut cur, "consts")?;
    for (name, pos) in vars.iter().chain(&consts) {
        if is_keyword(name) {
            return Err(ParseError::new(*pos, format!("`{name}` is reserved")));
        }
    }
    let names: Vec<&str> = vars.iter().chain(&consts).map(|(n, _)| n.as_str()).collect();
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            let pos = vars.iter().chain(&consts).nth(i).unwrap().1;
            return Err(ParseError::new(pos, format!("`{n}` declared twice")));
        }
    }
    let sys = HerbrandEqSystem::new(
        vars.iter().map(|(n, _)| n.clone()),
        consts.iter().map(|(n, _)| n.clone()),
    );
    let lat = Lattice::from_system(&sys).map_err(|e| ParseError::new(Pos::default(), e.to_string()))?;
    let lat = Arc::new(lat);
    let mut p = Parser { cur, lat: &lat };
    let (decls, main) = p.program_body()?;
    Ok(Program {
        lattice: lat.clone(),
        decls,
        main,
    })
}

/// Parses declarations and `main:` against an existing lattice.
pub fn parse_program_in(lat: Arc<Lattice>, src: &str) -> Result<Program, ParseError> {
    let mut p = Parser {
        cur: Cursor::new(src)?,
        lat: &lat,
    };
    let (decls, main) = p.program_body()?;
    Ok(Program {
        lattice: lat.clone(),
        decls,
        main,
    })
}

pub fn parse_agent(lat: &Lattice, src: &str) -> Result<Agent, ParseError> {
    let mut p = Parser {
        cur: Cursor::new(src)?,
        lat,
    };
    let a = p.agent()?;
    p.cur.end()?;
    Ok(a)
}

/// Parses a formula, expanding every derived form and macro to the core
/// grammar.
pub fn parse_formula(lat: &Lattice, src: &str) -> Result<Formula, ParseError> {
    let mut p = Parser {
        cur: Cursor::new(src)?,
        lat,
    };
    let f = p.formula()?;
    p.cur.end()?;
    Ok(f)
}

/// Parses constraint text such as `x=a /\ y=b`.
pub fn parse_constraint(lat: &Lattice, src: &str) -> Result<Constraint, ParseError> {
    let mut p = Parser {
        cur: Cursor::new(src)?,
        lat,
    };
    let c = p.constraint()?;
    p.cur.end()?;
    Ok(c)
}

fn header_list(cur: &mut Cursor, key: &str) -> Result<Vec<(String, Pos)>, ParseError> {
    cur.expect_word(key)?;
    cur.expect(&Tok::Colon)?;
    let mut out = Vec::new();
    if cur.eat(&Tok::Semi) {
        return Ok(out);
    }
    loop {
        out.push(cur.ident()?);
        if !cur.eat(&Tok::Comma) {
            break;
        }
    }
    cur.expect(&Tok::Semi)?;
    Ok(out)
}

impl Parser<'_> {
    fn program_body(&mut self) -> Result<(Vec<Declaration>, Agent), ParseError> {
        let mut decls: Vec<Declaration> = Vec::new();
        loop {
            if self.cur.is_word("main") {
                self.cur.bump();
                self.cur.expect(&Tok::Colon)?;
                let main = self.agent()?;
                self.cur.eat(&Tok::Semi);
                self.cur.end()?;
                return Ok((decls, main));
            }
            let (name, pos) = self.cur.ident()?;
            if is_keyword(&name) {
                return Err(ParseError::new(pos, format!("`{name}` is reserved")));
            }
            if self.lat.is_var(&name) || self.lat.is_const(&name) {
                return Err(ParseError::new(
                    pos,
                    format!("procedure name `{name}` clashes with a variable or constant"),
                ));
            }
            if decls.iter().any(|d| d.name == name) {
                return Err(ParseError::new(pos, format!("procedure `{name}` declared twice")));
            }
            self.cur.expect(&Tok::LParen)?;
            let param = self.var()?;
            self.cur.expect(&Tok::RParen)?;
            self.cur.expect(&Tok::ColonColon)?;
            let body = self.agent()?;
            self.cur.expect(&Tok::Semi)?;
            decls.push(Declaration { name, param, body });
        }
    }

    fn var(&mut self) -> Result<VarId, ParseError> {
        let (name, pos) = self.cur.ident()?;
        self.lat
            .var(&name)
            .map_err(|_| ParseError::new(pos, format!("unknown variable `{name}`")))
    }

    fn constraint(&mut self) -> Result<Constraint, ParseError> {
        let mut c = self.constraint_atom()?;
        while self.cur.eat(&Tok::And) {
            let d = self.constraint_atom()?;
            c = self.lat.lub(c, d);
        }
        Ok(c)
    }

    fn constraint_atom(&mut self) -> Result<Constraint, ParseError> {
        if self.cur.eat_word("true") {
            return Ok(self.lat.bottom());
        }
        if self.cur.eat_word("false") {
            return Ok(self.lat.top());
        }
        let (lhs, pos) = self.cur.ident()?;
        self.cur.expect(&Tok::Eq)?;
        let (rhs, rpos) = self.cur.ident()?;
        self.lat.atom(&lhs, &rhs).map_err(|e| {
            let at = if self.lat.is_var(&lhs) || self.lat.is_const(&lhs) {
                rpos
            } else {
                pos
            };
            ParseError::new(at, e.to_string())
        })
    }

    // agent := choice ('||' choice)*
    fn agent(&mut self) -> Result<Agent, ParseError> {
        let mut a = self.choice()?;
        while self.cur.eat(&Tok::ParBar) {
            let b = self.choice()?;
            a = Agent::par(a, b);
        }
        Ok(a)
    }

    // choice := branch ('+' branch)* | unary
    fn choice(&mut self) -> Result<Agent, ParseError> {
        if !self.cur.is_word("ask") {
            return self.unary();
        }
        let mut branches = vec![self.branch()?];
        while self.cur.eat(&Tok::Plus) {
            if !self.cur.is_word("ask") {
                return Err(self.cur.unexpected("`ask`"));
            }
            branches.push(self.branch()?);
        }
        Ok(Agent::Choice(branches))
    }

    fn branch(&mut self) -> Result<(Constraint, Agent), ParseError> {
        self.cur.expect_word("ask")?;
        self.cur.expect(&Tok::LParen)?;
        let c = self.constraint()?;
        self.cur.expect(&Tok::RParen)?;
        self.cur.expect(&Tok::Arrow)?;
        Ok((c, self.unary()?))
    }

    fn unary(&mut self) -> Result<Agent, ParseError> {
        let pos = self.cur.pos();
        match self.cur.peek().clone() {
            Tok::LParen => {
                self.cur.bump();
                let a = self.agent()?;
                self.cur.expect(&Tok::RParen)?;
                Ok(a)
            }
            Tok::Ident(w) => match w.as_str() {
                "stop" => {
                    self.cur.bump();
                    Ok(Agent::Stop)
                }
                "tell" => {
                    self.cur.bump();
                    self.cur.expect(&Tok::LParen)?;
                    let c = self.constraint()?;
                    self.cur.expect(&Tok::RParen)?;
                    if self.cur.eat(&Tok::Arrow) {
                        let then = self.unary()?;
                        Ok(Agent::tell_then(self.lat, c, then))
                    } else {
                        Ok(Agent::Tell(c))
                    }
                }
                "now" => {
                    self.cur.bump();
                    let c = self.constraint()?;
                    self.cur.expect_word("then")?;
                    let a = self.unary()?;
                    self.cur.expect_word("else")?;
                    let b = self.unary()?;
                    Ok(Agent::now(c, a, b))
                }
                "exists" => {
                    self.cur.bump();
                    let x = self.var()?;
                    self.cur.expect(&Tok::Dot)?;
                    Ok(Agent::hide(x, self.unary()?))
                }
                "ask" => Err(ParseError::new(pos, "a choice in this position must be parenthesized")),
                _ if is_keyword(&w) => Err(self.cur.unexpected("an agent")),
                _ => {
                    self.cur.bump();
                    if self.lat.is_var(&w) || self.lat.is_const(&w) {
                        return Err(ParseError::new(pos, format!("`{w}` is not a procedure")));
                    }
                    self.cur.expect(&Tok::LParen)?;
                    let x = self.var()?;
                    self.cur.expect(&Tok::RParen)?;
                    Ok(Agent::call(w, x))
                }
            },
            _ => Err(self.cur.unexpected("an agent")),
        }
    }

    // formula := quantifier | iff
    fn formula(&mut self) -> Result<Formula, ParseError> {
        if self.cur.is_word("exists") || self.cur.is_word("forall") {
            return self.quantified();
        }
        let a = self.implication()?;
        if self.cur.eat(&Tok::Iff) {
            let b = self.implication()?;
            return Ok(Formula::iff(a, b));
        }
        Ok(a)
    }

    fn quantified(&mut self) -> Result<Formula, ParseError> {
        let universal = self.cur.eat_word("forall");
        if !universal {
            self.cur.expect_word("exists")?;
        }
        let mut binders = Vec::new();
        loop {
            binders.push(self.binder()?);
            if !self.cur.eat(&Tok::Comma) {
                break;
            }
        }
        self.cur.expect(&Tok::Dot)?;
        let mut body = self.formula()?;
        for b in binders.into_iter().rev() {
            body = match (b, universal) {
                (Binder::Var(x), false) => Formula::exists_var(x, body),
                (Binder::Var(x), true) => Formula::forall_var(x, body),
                (Binder::Pred(x), false) => Formula::exists_pred(x, body),
                (Binder::Pred(x), true) => Formula::forall_pred(x, body),
                (Binder::Constr(p), false) => Formula::exists_constr(p, body),
                (Binder::Constr(p), true) => Formula::forall_constr(p, body),
            };
        }
        Ok(body)
    }

    fn binder(&mut self) -> Result<Binder, ParseError> {
        let (name, pos) = self.cur.ident()?;
        if let Ok(x) = self.lat.var(&name) {
            return Ok(Binder::Var(x));
        }
        if name == INPUT || name == OUTPUT {
            return Err(ParseError::new(pos, format!("`{name}` cannot be quantified")));
        }
        if is_keyword(&name) || self.lat.is_const(&name) {
            return Err(ParseError::new(pos, format!("`{name}` cannot be bound")));
        }
        if name.starts_with(|c: char| c.is_ascii_uppercase()) {
            Ok(Binder::Pred(name))
        } else {
            Ok(Binder::Constr(name))
        }
    }

    // implication := disjunction ('->' implication)?
    fn implication(&mut self) -> Result<Formula, ParseError> {
        let a = self.disjunction()?;
        if self.cur.eat(&Tok::Arrow) {
            let b = if self.at_quantifier() {
                self.quantified()?
            } else {
                self.implication()?
            };
            return Ok(Formula::implies(a, b));
        }
        Ok(a)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut a = self.conjunction()?;
        while self.cur.eat(&Tok::Or) {
            let b = self.conjunction()?;
            a = Formula::or(a, b);
        }
        Ok(a)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut a = self.until()?;
        while self.cur.eat(&Tok::And) {
            let b = self.until()?;
            a = Formula::and(a, b);
        }
        Ok(a)
    }

    fn until(&mut self) -> Result<Formula, ParseError> {
        let a = self.temporal()?;
        if self.cur.eat_word("until") {
            let b = self.until()?;
            return Ok(Formula::until(a, b));
        }
        Ok(a)
    }

    fn at_quantifier(&self) -> bool {
        self.cur.is_word("exists") || self.cur.is_word("forall")
    }

    fn temporal(&mut self) -> Result<Formula, ParseError> {
        if self.at_quantifier() {
            return self.quantified();
        }
        if self.cur.eat_word("not") {
            return Ok(Formula::not(self.temporal()?));
        }
        if self.cur.eat_word("next") {
            return Ok(Formula::next(self.temporal()?));
        }
        if self.cur.eat_word("always") {
            let f = self.temporal()?;
            return Ok(Formula::always(self.lat, f));
        }
        if self.cur.eat_word("eventually") {
            let f = self.temporal()?;
            return Ok(Formula::eventually(self.lat, f));
        }
        self.atomic()
    }

    fn atomic(&mut self) -> Result<Formula, ParseError> {
        let pos = self.cur.pos();
        match self.cur.peek().clone() {
            Tok::LParen => {
                self.cur.bump();
                let f = self.formula()?;
                self.cur.expect(&Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(w) if w == "true" => {
                self.cur.bump();
                Ok(Formula::truth(self.lat))
            }
            Tok::Ident(w) if w == "false" => {
                self.cur.bump();
                Ok(Formula::falsity(self.lat))
            }
            Tok::Ident(w) if w == "stut" => {
                self.cur.bump();
                Ok(macros::stut(self.lat))
            }
            Tok::Ident(w) if w == "loc" || w == "inv" => {
                self.cur.bump();
                self.cur.expect(&Tok::LParen)?;
                let x = self.var()?;
                self.cur.expect(&Tok::RParen)?;
                Ok(if w == "loc" {
                    macros::loc(self.lat, x)
                } else {
                    macros::inv(self.lat, x)
                })
            }
            Tok::Ident(w) if w == "par" => {
                self.cur.bump();
                self.cur.expect(&Tok::LParen)?;
                let x = self.pred_name()?;
                self.cur.expect(&Tok::Comma)?;
                let y = self.pred_name()?;
                self.cur.expect(&Tok::RParen)?;
                Ok(macros::par(self.lat, &x, &y))
            }
            Tok::Ident(w) if w.starts_with(|c: char| c.is_ascii_uppercase()) && *self.cur.peek_at(1) == Tok::LParen => {
                self.cur.bump();
                self.cur.bump();
                let t = self.pred_arg()?;
                self.cur.expect(&Tok::RParen)?;
                Ok(Formula::Pred(w, t))
            }
            Tok::Ident(_) | Tok::LBrace | Tok::LBracket => {
                let a = self.term()?;
                let op_pos = self.cur.pos();
                let f = match self.cur.bump() {
                    Tok::Leq => Formula::leq(a, self.term()?),
                    Tok::Eq => Formula::eq(a, self.term()?),
                    Tok::Neq => Formula::neq(a, self.term()?),
                    other => {
                        return Err(ParseError::new(
                            op_pos,
                            format!("expected `<=`, `=` or `!=`, found {other}"),
                        ))
                    }
                };
                Ok(f)
            }
            _ => Err(ParseError::new(
                pos,
                format!("expected a formula, found {}", self.cur.peek()),
            )),
        }
    }

    fn pred_name(&mut self) -> Result<String, ParseError> {
        let (name, pos) = self.cur.ident()?;
        if !name.starts_with(|c: char| c.is_ascii_uppercase()) {
            return Err(ParseError::new(pos, format!("`{name}` is not a predicate variable")));
        }
        Ok(name)
    }

    fn looks_like_constraint(&self) -> bool {
        match self.cur.peek() {
            Tok::Ident(w) if w == "true" || w == "false" => true,
            Tok::Ident(_) => *self.cur.peek_at(1) == Tok::Eq,
            _ => false,
        }
    }

    // Inside `X(...)` a bare constraint literal is accepted in place of `{...}`.
    fn pred_arg(&mut self) -> Result<Term, ParseError> {
        let first = if self.looks_like_constraint() {
            Term::Const(self.constraint()?)
        } else {
            self.term_atom()?
        };
        self.term_rest(first)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let first = self.term_atom()?;
        self.term_rest(first)
    }

    fn term_rest(&mut self, mut t: Term) -> Result<Term, ParseError> {
        while self.cur.eat(&Tok::Plus) {
            let u = self.term_atom()?;
            t = Term::lub(t, u);
        }
        Ok(t)
    }

    fn term_atom(&mut self) -> Result<Term, ParseError> {
        let pos = self.cur.pos();
        match self.cur.peek().clone() {
            Tok::LBrace => {
                self.cur.bump();
                let c = self.constraint()?;
                self.cur.expect(&Tok::RBrace)?;
                Ok(Term::Const(c))
            }
            Tok::LBracket => {
                self.cur.bump();
                let t = self.term()?;
                self.cur.expect(&Tok::RBracket)?;
                Ok(t)
            }
            Tok::Ident(w) if w == "cyl" => {
                self.cur.bump();
                self.cur.expect(&Tok::LParen)?;
                let x = self.var()?;
                self.cur.expect(&Tok::Comma)?;
                let t = self.term()?;
                self.cur.expect(&Tok::RParen)?;
                Ok(Term::cyl(x, t))
            }
            Tok::Ident(w) => {
                if is_keyword(&w) || self.lat.is_var(&w) || self.lat.is_const(&w) {
                    return Err(ParseError::new(
                        pos,
                        format!("`{w}` is not a constraint variable; write constraints as {{...}}"),
                    ));
                }
                if w.starts_with(|c: char| c.is_ascii_uppercase()) {
                    return Err(ParseError::new(pos, format!("predicate `{w}` used as a term")));
                }
                self.cur.bump();
                Ok(Term::Var(w))
            }
            _ => Err(self.cur.unexpected("a term")),
        }
    }
}

enum Binder {
    Var(VarId),
    Pred(String),
    Constr(String),
}
