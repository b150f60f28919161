//! Goal-directed evaluation of stratified normal logic programs.
//!
//! Programs are range-restricted rules with default negation (`not p`),
//! aggregation (`findall/3`, `set/2`, `list_length/2`), integer arithmetic
//! and comparison. Every answer carries a [`Justification`] proof tree.
//!
//! Classical negation is written as an ordinary predicate with a `neg_`
//! prefix; [`classical_negation_conflicts`] checks that `p` and `neg_p` never
//! hold for the same arguments.

mod justify;
mod parse;
mod program;
mod solve;
mod strata;
mod term;

use thiserror::Error;

pub use justify::{check_justification, render_justification, render_with, JustKind, Justification, Phrasebook};
pub use parse::{parse_program, parse_query, parse_rules, parse_term, parse_text, ParsedText};
pub use program::{Builtin, CompareOp, Literal, Program, Query, Rule};
pub use solve::{prove_naf, solve, Answer, Answers, NafOutcome, Solver, DEFAULT_DEPTH_LIMIT};
pub use strata::{dependency_edges, stratify, Stratification};
pub use term::{match_term, sym, Bindings, PredKey, Sym, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("program is not stratified; negative cycle through {}", cycle.join(", "))]
    UnstratifiableProgram { cycle: Vec<String> },
    #[error("variable {var} is not range restricted in `{rule}`")]
    RangeRestriction { rule: String, var: String },
    #[error("fact `{0}` is not ground")]
    NonGroundFact(String),
    #[error("`{0}` cannot be a clause head")]
    InvalidHead(String),
    #[error("goal recursion exceeded depth {depth}")]
    NonterminationGuard { depth: usize },
    #[error("negated goal `{0}` is not ground")]
    Floundering(String),
    #[error("{builtin}: bad argument `{arg}`")]
    BuiltinTypeError { builtin: String, arg: String },
    #[error("answer `{0}` is not ground")]
    NonGroundAnswer(String),
}

/// Ground atoms `p(args)` for which both `p(args)` and `neg_p(args)` hold.
pub fn classical_negation_conflicts(program: &Program) -> Result<Vec<Term>, EngineError> {
    let mut solver = Solver::new(program);
    let mut out = Vec::new();
    let mut keys: Vec<PredKey> = program.predicates().cloned().collect();
    keys.sort();
    for key in keys {
        let Some(base) = key.name.strip_prefix("neg_") else { continue };
        let pos_key = PredKey { name: sym(base), arity: key.arity };
        if program.clauses_for(&pos_key).next().is_none() {
            continue;
        }
        let args: Vec<Term> = (0..key.arity as u32).map(Term::Var).collect();
        let names = (0..key.arity).map(|i| sym(&format!("A{i}"))).collect();
        let body =
            vec![Literal::Pos(Term::compound(&key.name, args.clone())), Literal::Pos(Term::compound(base, args))];
        for a in solver.solve(&Query { body, var_names: names })? {
            out.push(a.goals[1].clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_negation_conflict_detected() {
        let p = parse_program("loc(a,k). neg_loc(a,k). neg_loc(b,k).").unwrap();
        let c = classical_negation_conflicts(&p).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].to_string(), "loc(a,k)");
    }
}
