//! Robustness testing for an intermediate verification language.
//!
//! A *seed* is a program an external verifier accepts. This crate parses
//! seeds, generates semantics-preserving mutants with the operators in
//! [`mutops`], runs a verifier on seed and mutants with the [`harness`], and
//! summarizes the outcomes with the robustness measures in [`metrics`]. A
//! verifier whose verdict flips on a mutant is brittle: the mutant differs
//! from the seed only in details the language defines as immaterial.
//!
//! Pipeline modules, in dependency order:
//!
//! * [`ast`] — the IVL subset's syntax trees, normalization, fingerprints;
//! * [`parser`] / [`typecheck`](mod@typecheck) — text to validated programs;
//! * [`printer`] — deterministic rendering plus lineage headers;
//! * [`mutops`] — the eleven mutation operators and their sites;
//! * [`genloop`] — the weighted random generation loop;
//! * [`harness`] — external verifier execution and verdict classification;
//! * [`metrics`] — robustness measures and report rendering;
//! * [`fixtures`] — the built-in corpus and mock verifiers used by tests.

pub mod ast;
pub mod diag;
pub mod fixtures;
pub mod genloop;
pub mod harness;
pub mod lexer;
pub mod metrics;
pub mod mutops;
pub mod parser;
pub mod printer;
pub mod typecheck;

pub use ast::{normalize, program_fingerprint, Fingerprint, Program};
pub use diag::Diagnostic;
pub use typecheck::{typecheck, ValidatedProgram};

/// Parses and typechecks `source` in one step.
pub fn load_program(source: &str, origin: &str) -> Result<ValidatedProgram, Vec<Diagnostic>> {
    let program = parser::parse(source, origin)?;
    typecheck::typecheck(program, origin)
}
