//! Replays the dialog smoke subsets (or the directory given as the first
//! argument) through the reservation agent, standard and OOV splits.

use std::path::PathBuf;

use denotate::dialog::DialogAgent;
use denotate::harness::{dialog_file_name, read_babi_dialog, run_dialog_task, DIALOG_TASKS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/smoke/dialog"));
    let agent = DialogAgent::default();
    for oov in [false, true] {
        for task in DIALOG_TASKS {
            let path = dir.join(dialog_file_name(task, oov).expect("shipped task"));
            let records = read_babi_dialog(&path)?;
            let report = run_dialog_task(task, oov, &records, &agent)?;
            print!("{}", report.summary());
        }
    }
    Ok(())
}
