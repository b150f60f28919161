//! Controlled-English front end: tokenizer, grammar-driven constituency
//! parser, Penn-style bracketed tree I/O and anaphora resolution.

mod anaphora;
mod grammar;
mod token;
mod tree;

use thiserror::Error;

pub use anaphora::{resolve_anaphora, Resolution};
pub use grammar::Grammar;
pub use token::{tokenize, Gender, Pos, Token, Vocabulary};
pub use tree::{read_bracketed, write_bracketed, Node, NodeId, ParseTree, Shape};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("input has no tokens")]
    EmptyInput,
    #[error("no grammar rule applies at token {index} (`{token}`)")]
    UnparsableSentence { index: usize, token: String },
    #[error("malformed tree at offset {offset}: {msg}")]
    MalformedTree { offset: usize, msg: String },
    #[error("no antecedent for `{word}` (sentence {sentence}, token {index})")]
    UnresolvedAnaphor { sentence: usize, index: usize, word: String },
    #[error("grammar line {line}: {msg}")]
    GrammarFormat { line: usize, msg: String },
    #[error("grammar is left-recursive through `{0}`")]
    LeftRecursion(String),
    #[error("grammar has no symbol `{0}`")]
    UnknownSymbol(String),
    #[error("lemma table line {line}: {msg}")]
    TableFormat { line: usize, msg: String },
}

/// Parses a tokenized sentence with the grammar's start symbols.
pub fn parse_controlled(tokens: &[Token], grammar: &Grammar) -> Result<ParseTree, SyntaxError> {
    grammar.parse_tokens(tokens)
}

/// Vocabulary and grammar bundled together.
#[derive(Clone, Debug)]
pub struct Frontend {
    pub vocab: Vocabulary,
    pub grammar: Grammar,
}

impl Default for Frontend {
    fn default() -> Self {
        Frontend { vocab: Vocabulary::bundled(), grammar: Grammar::bundled() }
    }
}

impl Frontend {
    /// Loads `controlled.cfg` and `lemmas.tsv` from a directory.
    pub fn load_dir(dir: &std::path::Path) -> Result<Self, crate::Error> {
        let read = |name: &str| {
            let p = dir.join(name);
            std::fs::read_to_string(&p)
                .map_err(|e| crate::Error::Io { path: p.display().to_string(), msg: e.to_string() })
        };
        Ok(Frontend {
            vocab: Vocabulary::parse(&read("lemmas.tsv")?)?,
            grammar: Grammar::parse(&read("controlled.cfg")?)?,
        })
    }

    pub fn tokenize(&self, sentence: &str) -> Result<Vec<Token>, SyntaxError> {
        tokenize(sentence, &self.vocab)
    }

    pub fn parse(&self, sentence: &str) -> Result<ParseTree, SyntaxError> {
        parse_controlled(&self.tokenize(sentence)?, &self.grammar)
    }

    /// Chunked parse used for dialog turns.
    pub fn parse_fragment(&self, utterance: &str) -> Result<ParseTree, SyntaxError> {
        self.grammar.parse_as(&self.tokenize(utterance)?, "FRAG")
    }

    pub fn read_bracketed(&self, text: &str) -> Result<ParseTree, SyntaxError> {
        read_bracketed(text, &self.vocab)
    }
}
