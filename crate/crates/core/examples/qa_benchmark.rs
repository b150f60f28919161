//! Scores every shipped QA task on the vendored smoke subsets (or on the
//! directory given as the first argument) and prints one summary per task.

use std::path::PathBuf;

use denotate::harness::{qa_file_name, read_babi_qa, run_qa_task, QaSystem, QA_TASKS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/smoke/qa"));
    let system = QaSystem::default();
    for task in QA_TASKS {
        let path = dir.join(qa_file_name(task, "test").expect("shipped task"));
        let records = read_babi_qa(&path)?;
        let report = run_qa_task(task, &records, &system)?;
        print!("{}", report.summary());
    }
    Ok(())
}
