//! Default reasoning with negation as failure: birds fly unless they are
//! abnormal, penguins are abnormal. Each answer carries a checked proof.

use denotate::engine::{check_justification, parse_query, parse_rules, render_justification, Program, Solver};

const RULES: &str = "
bird(tweety). bird(pingu). penguin(pingu).
flies(X) :- bird(X), not ab(X).
ab(X) :- penguin(X).
flock_size(N) :- findall(X, flies(X), Xs), set(Xs, S), list_length(S, N).
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let program = Program::new(parse_rules(RULES)?)?;
    let mut solver = Solver::new(&program);
    for q in ["flies(X)", "flies(pingu)", "flock_size(N)"] {
        let answers = solver.solve(&parse_query(q)?)?;
        println!("?- {q}  ({} answers)", answers.len());
        for a in &answers {
            print!("{}", render_justification(&a.justification, usize::MAX));
            check_justification(&a.justification, &program)?;
        }
    }
    Ok(())
}
