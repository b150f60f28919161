//! Lists the verb classes, syntactic frames and semantic templates the
//! bundled lexicon holds for the verbs given on the command line.

use denotate::lexicon::{get_vn_frames, Lexicon};

fn main() {
    let lexicon = Lexicon::bundled();
    let verbs: Vec<String> = std::env::args().skip(1).collect();
    let verbs = if verbs.is_empty() { vec!["grab".into(), "give".into(), "go".into()] } else { verbs };
    println!("{} classes, {} frames\n", lexicon.classes.len(), lexicon.frame_count());
    for verb in &verbs {
        let classes = lexicon.get_vn_classes(verb);
        if classes.is_empty() {
            println!("{verb}: not in the lexicon\n");
        }
        for class in classes {
            println!("{verb}: {}", class.class_id);
            for frame in get_vn_frames(class) {
                let syntax: Vec<String> = frame.syntax.iter().map(|s| s.to_string()).collect();
                let semantics: Vec<String> = frame.semantics.iter().map(|t| t.to_string()).collect();
                println!("  {:<22} {}", frame.pattern_name, syntax.join(" "));
                println!("  {:<22} {}", "", semantics.join(", "));
            }
            println!();
        }
    }
}
