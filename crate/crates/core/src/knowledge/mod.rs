//! Commonsense knowledge base and the question side of the QA pipeline:
//! classify a parsed question, build its query, read the answer back.

mod question;
mod readout;

use std::path::Path;

use thiserror::Error;

use crate::engine::{parse_rules, EngineError, Program, Rule, Term};

pub use question::{
    classify_question, generate_query, ClassifiedQuestion, PatternItem, QueryPlan, QuestionTable, QuestionTemplate,
    QuestionType,
};
pub use readout::{
    answer_values, answers_match, candidates, extract_answer, normalize_answer, strip_determiner, three_valued,
    AnswerKind,
};

const BUNDLED_KB: &str = include_str!("../../resources/kb/commonsense.rules");

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KnowledgeError {
    #[error("unsupported question shape `{0}`")]
    UnsupportedQuestion(String),
    #[error("{qtype} needs entity `{name}`")]
    MissingEntity { qtype: String, name: String },
    #[error("no answer for `{0}`")]
    NoAnswer(String),
    #[error("question table line {line}: {msg}")]
    TableFormat { line: usize, msg: String },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Rules shared by every story, each tagged with where it comes from
/// (`inertia`, `possession`, `location`, `default`, `template`).
#[derive(Clone, Debug)]
pub struct CommonsenseKB {
    pub rules: Vec<Rule>,
    program: Program,
}

impl CommonsenseKB {
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_KB).expect("bundled KB is valid")
    }

    /// Parses rule text and checks it stratifies on its own.
    pub fn parse(text: &str) -> Result<Self, KnowledgeError> {
        let rules = parse_rules(text)?;
        let program = Program::new(rules.clone())?;
        Ok(CommonsenseKB { rules, program })
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn tagged<'a>(&'a self, tag: &'a str) -> impl Iterator<Item = &'a Rule> + 'a {
        self.rules.iter().filter(move |r| r.tag.as_deref() == Some(tag))
    }

    /// Template rules defining `predicate`.
    pub fn templates_for(&self, predicate: &str) -> Vec<Rule> {
        self.tagged("template")
            .filter(|r| r.head.as_ref().and_then(Term::functor) == Some(predicate))
            .cloned()
            .collect()
    }

    /// The KB extended with story facts.
    pub fn with_story(&self, facts: impl IntoIterator<Item = Rule>) -> Result<Program, KnowledgeError> {
        Ok(self.program.extended(facts)?)
    }
}

pub fn load_kb(path: &Path) -> Result<CommonsenseKB, crate::Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| crate::Error::Io { path: path.display().to_string(), msg: e.to_string() })?;
    Ok(CommonsenseKB::parse(&text)?)
}

/// `moment(t1,1). ... moment(tn,n).`
pub fn timeline(n: u32) -> Vec<Rule> {
    (1..=n)
        .map(|i| Rule::fact(Term::compound("moment", vec![crate::semgen::time_atom(i), Term::Int(i as i64)])))
        .collect()
}
