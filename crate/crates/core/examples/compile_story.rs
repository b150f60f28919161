//! Compiles a short story to facts and answers a few questions about it,
//! each with the English rendering of its proof.

use denotate::harness::QaSystem;

const STORY: [&str; 6] = [
    "John moved to the bedroom.",
    "John got the football there.",
    "John grabbed the apple there.",
    "John picked up the milk there.",
    "John gave the apple to Mary.",
    "John left the football.",
];

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sys = QaSystem::default();
    let compiled = sys.compile(&STORY)?;
    print!("{}", compiled.facts.render());

    for q in ["How many objects is John carrying?", "What is John carrying?", "Where is the football?"] {
        let out = sys.answer(&compiled, STORY.len(), q)?;
        println!("\n{q}  ->  {}   [{}]", out.answer, out.query);
        print!("{}", out.justification);
    }
    Ok(())
}
