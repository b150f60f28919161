//! Parses one controlled-English sentence, prints the tree in both forms and
//! the timestamped facts its verb frames produce.
//!
//!     cargo run --example parse_sentence -- "Mary travelled to the office."

use denotate::lexicon::Lexicon;
use denotate::semgen::{get_sentence_semantics, render_facts};
use denotate::syntax::{write_bracketed, Frontend};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sentence = std::env::args().nth(1).unwrap_or_else(|| "John grabbed the apple there.".to_string());
    let frontend = Frontend::default();
    let tree = frontend.parse(&sentence)?;
    println!("{tree}");
    println!("{}\n", write_bracketed(&tree));

    let semantics = get_sentence_semantics(&tree, &Lexicon::bundled(), 1);
    print!("{}", render_facts(&semantics.facts));
    for d in &semantics.diagnostics {
        eprintln!("note: {d}");
    }
    Ok(())
}
