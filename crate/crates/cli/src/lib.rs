//! Library surface of the command-line front end: the expression parser and
//! the command dispatcher, kept separate from the binary so integration
//! tests can drive them directly.

pub mod commands;
pub mod parse;
