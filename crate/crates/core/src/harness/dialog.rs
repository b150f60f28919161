//! Dialog benchmark: replay user turns, compare every agent response.

use std::fmt::Write as _;

use rayon::prelude::*;

use super::babi::DialogRecord;
use super::qa::percent;
use super::HarnessError;
use crate::dialog::{DialogAgent, DialogError, DialogState};

pub const DIALOG_TASKS: [u32; 5] = [1, 2, 3, 4, 5];

pub fn dialog_task_name(task: u32) -> Option<&'static str> {
    Some(match task {
        1 => "API-calls",
        2 => "API-refine",
        3 => "options",
        4 => "phone-address",
        5 => "full-dialogs",
        _ => return None,
    })
}

/// `dialog-babi-task3-options-tst-OOV.txt`
pub fn dialog_file_name(task: u32, oov: bool) -> Option<String> {
    dialog_task_name(task).map(|n| format!("dialog-babi-task{task}-{n}-tst{}.txt", if oov { "-OOV" } else { "" }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TurnRow {
    pub dialog_id: usize,
    pub turn: usize,
    pub user: String,
    pub gold: String,
    pub system: String,
    pub correct: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DialogReport {
    pub task_id: String,
    pub n_responses: usize,
    pub n_correct_responses: usize,
    pub per_response_accuracy: f64,
    pub n_dialogs: usize,
    pub n_correct_dialogs: usize,
    pub per_dialog_accuracy: f64,
    /// Turns where the policy asked for an edge the machine does not have.
    pub illegal_transitions: usize,
    pub rows: Vec<TurnRow>,
}

impl DialogReport {
    pub fn mismatches(&self) -> impl Iterator<Item = &TurnRow> {
        self.rows.iter().filter(|r| !r.correct)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("dialog\tturn\tuser\tgold\tsystem\tcorrect\n");
        for r in &self.rows {
            let _ =
                writeln!(out, "{}\t{}\t{}\t{}\t{}\t{}", r.dialog_id, r.turn, r.user, r.gold, r.system, r.correct as u8);
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = format!(
            "dialog task {}: per-response {}/{} ({:.1}%), per-dialog {}/{} ({:.1}%), illegal transitions {}\n",
            self.task_id,
            self.n_correct_responses,
            self.n_responses,
            self.per_response_accuracy,
            self.n_correct_dialogs,
            self.n_dialogs,
            self.per_dialog_accuracy,
            self.illegal_transitions
        );
        for m in self.mismatches().take(20) {
            let _ = writeln!(
                out,
                "  dialog {} turn {}: `{}` gold=`{}` system=`{}`",
                m.dialog_id, m.turn, m.user, m.gold, m.system
            );
        }
        out
    }
}

fn run_dialog(agent: &DialogAgent, record: &DialogRecord) -> (Vec<TurnRow>, usize) {
    let mut state = DialogState::new(format!("dialog-{}", record.dialog_id)).with_kb(record.kb_facts.clone());
    let mut illegal = 0;
    let rows = record
        .turns
        .iter()
        .enumerate()
        .map(|(i, (user, gold))| {
            let system = match agent.step(&mut state, user) {
                Ok(out) => out.response,
                Err(e) => {
                    if matches!(e, DialogError::IllegalTransition { .. }) {
                        illegal += 1;
                    }
                    format!("<error: {e}>")
                }
            };
            let correct = system == *gold;
            TurnRow {
                dialog_id: record.dialog_id,
                turn: i + 1,
                user: user.clone(),
                gold: gold.clone(),
                system,
                correct,
            }
        })
        .collect();
    (rows, illegal)
}

pub fn run_dialog_task(
    task_id: u32,
    oov: bool,
    records: &[DialogRecord],
    agent: &DialogAgent,
) -> Result<DialogReport, HarnessError> {
    if !DIALOG_TASKS.contains(&task_id) {
        return Err(HarnessError::UnsupportedTask(format!("dialog task {task_id}")));
    }
    let results: Vec<(Vec<TurnRow>, usize)> = records.par_iter().map(|r| run_dialog(agent, r)).collect();
    let n_dialogs = results.len();
    let n_correct_dialogs = results.iter().filter(|(rows, _)| rows.iter().all(|r| r.correct)).count();
    let rows: Vec<TurnRow> = results.iter().flat_map(|(rows, _)| rows.iter().cloned()).collect();
    let n_correct = rows.iter().filter(|r| r.correct).count();
    Ok(DialogReport {
        task_id: format!("{task_id}{}", if oov { "-OOV" } else { "" }),
        n_responses: rows.len(),
        n_correct_responses: n_correct,
        per_response_accuracy: percent(n_correct, rows.len()),
        n_dialogs,
        n_correct_dialogs,
        per_dialog_accuracy: percent(n_correct_dialogs, n_dialogs),
        illegal_transitions: results.iter().map(|(_, n)| n).sum(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::parse_babi_dialog;

    #[test]
    fn file_names() {
        assert_eq!(dialog_file_name(1, false).unwrap(), "dialog-babi-task1-API-calls-tst.txt");
        assert_eq!(dialog_file_name(5, true).unwrap(), "dialog-babi-task5-full-dialogs-tst-OOV.txt");
        assert!(dialog_file_name(6, false).is_none());
    }

    #[test]
    fn scores_a_dialog() {
        let text = "1 hi\thello what can i help you with today\n\
                    2 can you book a table for six people with italian food in rome in a cheap price range\ti'm on it\n\
                    3 <SILENCE>\tok let me look into some options for you\n\
                    4 <SILENCE>\tapi_call italian rome six cheap\n\n\
                    1 hi\thello what can i help you with today\n\
                    2 blorp\ti'm on it\n";
        let recs = parse_babi_dialog(text).unwrap();
        let rep = run_dialog_task(1, false, &recs, &DialogAgent::default()).unwrap();
        assert_eq!((rep.n_responses, rep.n_correct_responses), (6, 5));
        assert_eq!((rep.n_dialogs, rep.n_correct_dialogs), (2, 1));
        assert!(rep.per_dialog_accuracy <= rep.per_response_accuracy);
        assert_eq!(rep.illegal_transitions, 0);
        assert!(run_dialog_task(9, false, &recs, &DialogAgent::default()).is_err());
    }
}
