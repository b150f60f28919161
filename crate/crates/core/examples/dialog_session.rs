//! One reservation conversation with the agent: state transitions, slot
//! provenance and the reason behind the cuisine suggestion.

use denotate::dialog::{DialogAgent, DialogState};

const TURNS: [&str; 7] = [
    "Good morning",
    "I'd like to reserve a table in London in a cheap price range",
    "<SILENCE>",
    "anything, except Lebanese food",
    "I want to have curry",
    "thai please",
    "for four people please",
];

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let agent = DialogAgent::default();
    let mut state = DialogState::new("example");
    for text in TURNS {
        let out = agent.step(&mut state, text)?;
        println!("user:  {text}\nagent: {}   [{} -> {}]", out.response, out.from, out.to);
        if out.act.starts_with("suggest") {
            println!("why:\n{}", out.justification);
        }
    }
    println!("\nslots: {}", serde_json::to_string_pretty(&state.slots)?);
    Ok(())
}
