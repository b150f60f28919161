//! VerbNet-style verb lexicon: classes of verbs sharing frames, each frame
//! pairing a syntax slot pattern with semantic predicate templates.
//!
//! The file is a JSON list of classes:
//!
//! ```json
//! [{"id": "obtain-13.5.2", "members": ["grab", "pick up"],
//!   "frames": [{"pattern": "NP V NP",
//!               "syntax": [{"cat": "NP", "role": "Agent"}, {"cat": "V"}, {"cat": "NP", "role": "Theme"}],
//!               "semantics": [{"pred": "contact", "args": ["during(E)", "Agent", "Theme"]}],
//!               "example": "She grabbed the rail."}]}]
//! ```
//!
//! Template arguments are `E`, `start(E)`, `during(E)`, `end(E)`, a role
//! name (capitalized, must appear in the frame's syntax) or a lowercase
//! constant. Copular patterns live in a sibling `be_mappings.json`.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const BUNDLED_LEXICON: &str = include_str!("../resources/lexicon/verbnet.json");
const BUNDLED_BE_MAPPINGS: &str = include_str!("../resources/lexicon/be_mappings.json");

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LexiconError {
    #[error("lexicon line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("template `{template}` in {owner} refers to role {role}, which no syntax slot binds")]
    DanglingRole { owner: String, template: String, role: String },
    #[error("duplicate class id `{0}`")]
    DuplicateClass(String),
    #[error("{owner}: {msg}")]
    InvalidFrame { owner: String, msg: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SlotCat {
    NP,
    V,
    PP,
    ADV,
    PREP,
    LEX,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SyntaxSlot {
    pub cat: SlotCat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub literal: Option<String>,
}

impl SyntaxSlot {
    pub fn np(role: &str) -> Self {
        SyntaxSlot { cat: SlotCat::NP, role: Some(role.into()), literal: None }
    }

    pub fn v() -> Self {
        SyntaxSlot { cat: SlotCat::V, role: None, literal: None }
    }

    pub fn pp(role: &str, prep: Option<&str>) -> Self {
        SyntaxSlot { cat: SlotCat::PP, role: Some(role.into()), literal: prep.map(str::to_string) }
    }

    pub fn lex(word: &str) -> Self {
        SyntaxSlot { cat: SlotCat::LEX, role: None, literal: Some(word.into()) }
    }

    fn check(&self) -> Result<(), String> {
        match self.cat {
            SlotCat::V if self.role.is_some() => Err("V slot cannot carry a role".into()),
            SlotCat::NP | SlotCat::PP if self.role.is_none() => Err(format!("{:?} slot needs a role", self.cat)),
            SlotCat::LEX | SlotCat::PREP if self.literal.is_none() => {
                Err(format!("{:?} slot needs a literal", self.cat))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for SyntaxSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.cat, &self.role, &self.literal) {
            (SlotCat::LEX | SlotCat::PREP, _, Some(l)) => write!(f, "'{l}'"),
            (cat, Some(r), _) => write!(f, "{cat:?}.{r}"),
            (cat, None, _) => write!(f, "{cat:?}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    Start,
    During,
    End,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Start => "start",
            Phase::During => "during",
            Phase::End => "end",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ArgSpec {
    Role(String),
    Event,
    Phase(Phase),
    Const(String),
}

impl ArgSpec {
    pub fn parse(s: &str) -> Result<ArgSpec, String> {
        let s = s.trim();
        for phase in [Phase::Start, Phase::During, Phase::End] {
            if s == format!("{}(E)", phase.name()) {
                return Ok(ArgSpec::Phase(phase));
            }
        }
        if s == "E" {
            return Ok(ArgSpec::Event);
        }
        let mut chars = s.chars();
        match chars.next() {
            Some(c) if c.is_uppercase() && s.chars().all(|c| c.is_alphanumeric() || c == '_') => {
                Ok(ArgSpec::Role(s.to_string()))
            }
            Some(c) if c.is_lowercase() && s.chars().all(|c| c.is_alphanumeric() || c == '_') => {
                Ok(ArgSpec::Const(s.to_string()))
            }
            _ => Err(format!("bad template argument `{s}`")),
        }
    }
}

impl fmt::Display for ArgSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArgSpec::Role(r) => f.write_str(r),
            ArgSpec::Event => f.write_str("E"),
            ArgSpec::Phase(p) => write!(f, "{}(E)", p.name()),
            ArgSpec::Const(c) => f.write_str(c),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SemanticTemplate {
    pub predicate: String,
    pub args: Vec<ArgSpec>,
}

impl SemanticTemplate {
    pub fn roles(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|a| match a {
            ArgSpec::Role(r) => Some(r.as_str()),
            _ => None,
        })
    }
}

impl fmt::Display for SemanticTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<String> = self.args.iter().map(|a| a.to_string()).collect();
        write!(f, "{}({})", self.predicate, args.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Frame {
    pub pattern_name: String,
    pub syntax: Vec<SyntaxSlot>,
    pub semantics: Vec<SemanticTemplate>,
    pub example: String,
}

impl Frame {
    pub fn roles(&self) -> impl Iterator<Item = &str> {
        self.syntax.iter().filter_map(|s| s.role.as_deref())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerbNetClass {
    pub class_id: String,
    pub members: Vec<String>,
    pub frames: Vec<Frame>,
}

/// One copular pattern: slot pattern plus fact schemas with plain role arguments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BeMapping {
    pub name: String,
    pub syntax: Vec<SyntaxSlot>,
    pub facts: Vec<SemanticTemplate>,
    pub example: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Lexicon {
    pub classes: Vec<VerbNetClass>,
    pub verb_index: BTreeMap<String, Vec<String>>,
    pub be_mappings: Vec<BeMapping>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTemplate {
    pred: String,
    args: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFrame {
    pattern: String,
    syntax: Vec<SyntaxSlot>,
    semantics: Vec<RawTemplate>,
    #[serde(default)]
    example: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClass {
    id: String,
    members: Vec<String>,
    #[serde(default)]
    frames: Vec<RawFrame>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBe {
    name: String,
    syntax: Vec<SyntaxSlot>,
    facts: Vec<RawTemplate>,
    #[serde(default)]
    example: String,
}

fn json_list<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>, LexiconError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    serde_json::from_str(text).map_err(|e| LexiconError::Format { line: e.line(), msg: e.to_string() })
}

fn build_templates(
    owner: &str,
    raw: Vec<RawTemplate>,
    syntax: &[SyntaxSlot],
) -> Result<Vec<SemanticTemplate>, LexiconError> {
    let roles: HashSet<&str> = syntax.iter().filter_map(|s| s.role.as_deref()).collect();
    raw.into_iter()
        .map(|t| {
            let args = t
                .args
                .iter()
                .map(|a| ArgSpec::parse(a))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|msg| LexiconError::InvalidFrame { owner: owner.to_string(), msg })?;
            let tpl = SemanticTemplate { predicate: t.pred, args };
            if let Some(r) = tpl.roles().find(|r| !roles.contains(r)) {
                return Err(LexiconError::DanglingRole {
                    owner: owner.to_string(),
                    template: tpl.to_string(),
                    role: r.to_string(),
                });
            }
            Ok(tpl)
        })
        .collect()
}

fn check_syntax(owner: &str, syntax: &[SyntaxSlot]) -> Result<(), LexiconError> {
    let invalid = |msg: String| LexiconError::InvalidFrame { owner: owner.to_string(), msg };
    if syntax.is_empty() {
        return Err(invalid("empty syntax".into()));
    }
    if syntax.iter().filter(|s| s.cat == SlotCat::V).count() != 1 {
        return Err(invalid("frame needs exactly one V slot".into()));
    }
    for s in syntax {
        s.check().map_err(invalid)?;
    }
    Ok(())
}

impl Lexicon {
    pub fn bundled() -> Self {
        Self::from_json(BUNDLED_LEXICON, BUNDLED_BE_MAPPINGS).expect("bundled lexicon is valid")
    }

    pub fn from_json(classes_json: &str, be_json: &str) -> Result<Self, LexiconError> {
        let mut lex = Lexicon::default();
        let mut ids = HashSet::new();
        for rc in json_list::<RawClass>(classes_json)? {
            if !ids.insert(rc.id.clone()) {
                return Err(LexiconError::DuplicateClass(rc.id));
            }
            if rc.members.is_empty() {
                return Err(LexiconError::InvalidFrame { owner: rc.id, msg: "class has no members".into() });
            }
            let mut frames = Vec::new();
            for rf in rc.frames {
                let owner = format!("{} frame `{}`", rc.id, rf.pattern);
                check_syntax(&owner, &rf.syntax)?;
                let semantics = build_templates(&owner, rf.semantics, &rf.syntax)?;
                frames.push(Frame { pattern_name: rf.pattern, syntax: rf.syntax, semantics, example: rf.example });
            }
            let members: Vec<String> = rc.members.iter().map(|m| m.trim().to_lowercase()).collect();
            for m in &members {
                lex.verb_index.entry(m.clone()).or_default().push(rc.id.clone());
            }
            lex.classes.push(VerbNetClass { class_id: rc.id, members, frames });
        }
        for rb in json_list::<RawBe>(be_json)? {
            let owner = format!("be mapping `{}`", rb.name);
            check_syntax(&owner, &rb.syntax)?;
            let facts = build_templates(&owner, rb.facts, &rb.syntax)?;
            lex.be_mappings.push(BeMapping { name: rb.name, syntax: rb.syntax, facts, example: rb.example });
        }
        Ok(lex)
    }

    /// Every class whose members include `verb` (multiword lemmas matched whole).
    pub fn get_vn_classes(&self, verb: &str) -> Vec<&VerbNetClass> {
        match self.verb_index.get(verb) {
            Some(ids) => self.classes.iter().filter(|c| ids.contains(&c.class_id)).collect(),
            None => Vec::new(),
        }
    }

    pub fn class(&self, id: &str) -> Option<&VerbNetClass> {
        self.classes.iter().find(|c| c.class_id == id)
    }

    pub fn lemmas(&self) -> impl Iterator<Item = &str> {
        self.verb_index.keys().map(String::as_str)
    }

    pub fn frame_count(&self) -> usize {
        self.classes.iter().map(|c| c.frames.len()).sum()
    }
}

/// Frames of a class, in file order.
pub fn get_vn_frames(class: &VerbNetClass) -> &[Frame] {
    &class.frames
}

fn read(path: &Path) -> Result<String, crate::Error> {
    std::fs::read_to_string(path).map_err(|e| crate::Error::Io { path: path.display().to_string(), msg: e.to_string() })
}

/// Loads a lexicon file; `be_mappings.json` next to it is read when present.
pub fn load_lexicon(path: &Path) -> Result<Lexicon, crate::Error> {
    let classes = read(path)?;
    let be_path = path.with_file_name("be_mappings.json");
    let be = if be_path.exists() { read(&be_path)? } else { String::new() };
    Ok(Lexicon::from_json(&classes, &be)?)
}
