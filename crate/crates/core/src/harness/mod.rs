//! Dataset readers, benchmark runners and reports.

pub mod babi;
pub mod dialog;
pub mod qa;
pub mod server;

use std::path::Path;

use thiserror::Error;

pub use babi::{
    parse_babi_dialog, parse_babi_qa, read_babi_dialog, read_babi_qa, story_sentences, DialogRecord, QaQuestion,
    QaRecord,
};
pub use dialog::{dialog_file_name, dialog_task_name, run_dialog_task, DialogReport, TurnRow, DIALOG_TASKS};
pub use qa::{
    qa_file_name, qa_task_name, run_qa_task, CompiledStory, QaOutcome, QaRow, QaSystem, TaskReport, QA_TASKS,
};
pub use server::{router, serve_http, AppState, ServerConfig};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HarnessError {
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("unsupported task: {0}")]
    UnsupportedTask(String),
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}

impl HarnessError {
    pub(crate) fn format(line: usize, msg: impl Into<String>) -> Self {
        HarnessError::Format { line, msg: msg.into() }
    }
}

pub(crate) fn read_file(path: &Path) -> Result<String, HarnessError> {
    std::fs::read_to_string(path).map_err(|e| HarnessError::Io { path: path.display().to_string(), msg: e.to_string() })
}
