//! Agents, formulas, programs and their concrete syntax.

pub mod agent;
pub mod formula;
pub mod lexer;
pub mod macros;
pub mod parser;
pub mod program;

pub use agent::Agent;
pub use formula::{Formula, FreeVars, Term, INPUT, OUTPUT};
pub use parser::{parse_agent, parse_constraint, parse_formula, parse_program, parse_program_in, ParseError};
pub use program::{Declaration, GuardViolation, Program, ProgramError};
