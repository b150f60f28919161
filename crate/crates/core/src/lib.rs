pub mod dialog;
pub mod engine;
pub mod harness;
pub mod knowledge;
pub mod lexicon;
pub mod semgen;
pub mod syntax;

use thiserror::Error;

/// Crate-level error wrapping every module's error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Engine(#[from] engine::EngineError),
    #[error(transparent)]
    Syntax(#[from] syntax::SyntaxError),
    #[error(transparent)]
    Lexicon(#[from] lexicon::LexiconError),
    #[error(transparent)]
    Semgen(#[from] semgen::SemgenError),
    #[error(transparent)]
    Knowledge(#[from] knowledge::KnowledgeError),
    #[error(transparent)]
    Dialog(#[from] dialog::DialogError),
    #[error(transparent)]
    Harness(#[from] harness::HarnessError),
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}
