//! Component-based language specification workbench.
//!
//! The pipeline: `.cbs` text is parsed into a [`CbsSpec`](syntax::CbsSpec),
//! checked by [`analysis`], its languages are compiled into object-language
//! parsers by [`grammar`], programs are mapped to funcon terms by
//! [`translate`] and executed by the rule interpreter in [`interp`].

pub mod analysis;
pub mod diag;
pub mod docs;
pub mod grammar;
pub mod interp;
pub mod lexer;
pub mod library;
pub mod parser;
pub mod printer;
pub mod sorts;
pub mod span;
pub mod syntax;
pub mod term;
pub mod translate;
pub mod value;

pub use diag::{Category, Diagnostic, Severity};
pub use parser::{parse_cbs, parse_term};
pub use span::SourceSpan;
pub use syntax::{merge_specs, CbsSpec};
pub use term::{MetaVar, Term};
pub use value::{Name, Value};
