use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use super::SyntaxError;

/// Closed part-of-speech set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pos {
    Noun,
    Propn,
    Verb,
    Prep,
    Det,
    Adj,
    Adv,
    Pron,
    Num,
    Punct,
}

impl Pos {
    pub const ALL: [Pos; 10] =
        [Pos::Noun, Pos::Propn, Pos::Verb, Pos::Prep, Pos::Det, Pos::Adj, Pos::Adv, Pos::Pron, Pos::Num, Pos::Punct];

    pub fn name(self) -> &'static str {
        match self {
            Pos::Noun => "NOUN",
            Pos::Propn => "PROPN",
            Pos::Verb => "VERB",
            Pos::Prep => "PREP",
            Pos::Det => "DET",
            Pos::Adj => "ADJ",
            Pos::Adv => "ADV",
            Pos::Pron => "PRON",
            Pos::Num => "NUM",
            Pos::Punct => "PUNCT",
        }
    }

    /// Label used for leaves of this category in parse trees. Verbs are `V`.
    pub fn leaf_label(self) -> &'static str {
        match self {
            Pos::Verb => "V",
            other => other.name(),
        }
    }

    /// Maps a leaf label (closed-set name, `V`, or a Penn Treebank tag) to a category.
    pub fn from_label(label: &str) -> Option<Pos> {
        let base = match label.split(['-', '=']).next() {
            Some(b) if !b.is_empty() => b,
            _ => label,
        };
        if let Ok(p) = base.parse() {
            return Some(p);
        }
        Some(match base {
            "V" | "VB" | "VBD" | "VBG" | "VBN" | "VBP" | "VBZ" | "MD" => Pos::Verb,
            "NN" | "NNS" => Pos::Noun,
            "NNP" | "NNPS" => Pos::Propn,
            "IN" | "TO" => Pos::Prep,
            "DT" | "PDT" | "WDT" => Pos::Det,
            "JJ" | "JJR" | "JJS" => Pos::Adj,
            "RB" | "RBR" | "RBS" | "RP" | "WRB" | "CC" | "EX" => Pos::Adv,
            "PRP" | "PRP$" | "WP" | "WP$" => Pos::Pron,
            "CD" => Pos::Num,
            "." | "," | ":" | "``" | "''" | "-LRB-" | "-RRB-" => Pos::Punct,
            _ => return None,
        })
    }
}

impl FromStr for Pos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Pos::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| format!("unknown part of speech `{s}`"))
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gender {
    Female,
    Male,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Token {
    pub surface: String,
    pub lemma: String,
    pub pos: Pos,
    pub index: usize,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.surface, self.pos)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Entry {
    lemma: String,
    pos: Pos,
    gender: Option<Gender>,
}

/// Flat inflection and tag table for the closed vocabulary.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocabulary {
    entries: HashMap<String, Entry>,
}

const BUNDLED_LEMMAS: &str = include_str!("../../resources/grammar/lemmas.tsv");

impl Vocabulary {
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_LEMMAS).expect("bundled lemma table is valid")
    }

    /// Reads `surface<TAB>lemma<TAB>POS[<TAB>f|m]` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, SyntaxError> {
        let mut entries = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| SyntaxError::TableFormat { line: i + 1, msg };
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            if cols.len() < 3 {
                return Err(err("expected surface, lemma and pos columns".into()));
            }
            let pos: Pos = cols[2].parse().map_err(err)?;
            let gender = match cols.get(3).copied() {
                None | Some("") => None,
                Some("f") => Some(Gender::Female),
                Some("m") => Some(Gender::Male),
                Some(g) => return Err(err(format!("unknown gender `{g}`"))),
            };
            entries.insert(cols[0].to_lowercase(), Entry { lemma: cols[1].to_lowercase(), pos, gender });
        }
        Ok(Vocabulary { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn gender(&self, lemma: &str) -> Option<Gender> {
        self.entries.get(lemma).and_then(|e| e.gender)
    }

    /// Lemma and category for one word, guessing from shape for unknown words.
    pub fn analyze(&self, surface: &str) -> (String, Pos) {
        let lower = surface.to_lowercase();
        if let Some(e) = self.entries.get(&lower) {
            return (e.lemma.clone(), e.pos);
        }
        if surface.chars().all(|c| !c.is_alphanumeric()) {
            return (lower, Pos::Punct);
        }
        if lower.chars().all(|c| c.is_ascii_digit()) {
            return (lower, Pos::Num);
        }
        if surface.chars().next().is_some_and(char::is_uppercase) {
            return (lower, Pos::Propn);
        }
        if lower.len() > 4 && lower.ends_with("ly") {
            return (lower, Pos::Adv);
        }
        for suffix in ["less", "ful", "ous", "ive", "able"] {
            if lower.len() > suffix.len() + 2 && lower.ends_with(suffix) {
                return (lower, Pos::Adj);
            }
        }
        if let Some(stem) = lower.strip_suffix("ed").filter(|s| s.len() > 2) {
            return (stem.to_string(), Pos::Verb);
        }
        if let Some(stem) = lower.strip_suffix('s').filter(|s| s.len() > 2 && !s.ends_with('s')) {
            return (stem.to_string(), Pos::Noun);
        }
        (lower, Pos::Noun)
    }

    pub fn token(&self, surface: &str, index: usize) -> Token {
        let (lemma, pos) = self.analyze(surface);
        Token { surface: surface.to_string(), lemma, pos, index }
    }
}

fn is_punct(c: char) -> bool {
    matches!(c, '.' | ',' | '?' | '!' | ';' | ':' | '(' | ')' | '"')
}

/// Splits a sentence into tokens. Punctuation is split off words; apostrophes,
/// underscores and `<SILENCE>`-style markers stay inside their word.
pub fn tokenize(sentence: &str, vocab: &Vocabulary) -> Result<Vec<Token>, SyntaxError> {
    let mut words: Vec<&str> = Vec::new();
    for chunk in sentence.split_whitespace() {
        if chunk.starts_with('<') && chunk.ends_with('>') {
            words.push(chunk);
            continue;
        }
        let mut start = 0;
        for (i, c) in chunk.char_indices() {
            if is_punct(c) {
                if start < i {
                    words.push(&chunk[start..i]);
                }
                words.push(&chunk[i..i + c.len_utf8()]);
                start = i + c.len_utf8();
            }
        }
        if start < chunk.len() {
            words.push(&chunk[start..]);
        }
    }
    if words.is_empty() {
        return Err(SyntaxError::EmptyInput);
    }
    Ok(words.into_iter().enumerate().map(|(i, w)| vocab.token(w, i)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moved_sentence() {
        let v = Vocabulary::bundled();
        let toks = tokenize("John moved to the bedroom.", &v).unwrap();
        let got: Vec<(String, Pos)> = toks.iter().map(|t| (t.lemma.clone(), t.pos)).collect();
        assert_eq!(
            got,
            vec![
                ("john".into(), Pos::Propn),
                ("move".into(), Pos::Verb),
                ("to".into(), Pos::Prep),
                ("the".into(), Pos::Det),
                ("bedroom".into(), Pos::Noun),
                (".".into(), Pos::Punct),
            ]
        );
        assert!(toks.iter().enumerate().all(|(i, t)| t.index == i));
    }

    #[test]
    fn empty_and_single() {
        let v = Vocabulary::bundled();
        assert_eq!(tokenize("   ", &v), Err(SyntaxError::EmptyInput));
        let t = tokenize("Mary", &v).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].pos, Pos::Propn);
    }

    #[test]
    fn particles_and_irregulars() {
        let v = Vocabulary::bundled();
        let t = tokenize("John picked up the milk there.", &v).unwrap();
        assert_eq!(t[1].lemma, "pick");
        assert_eq!((t[2].surface.as_str(), t[2].pos), ("up", Pos::Adv));
        assert_eq!(v.analyze("got").0, "get");
        assert_eq!(v.analyze("are").0, "be");
    }

    #[test]
    fn markers_and_apostrophes() {
        let v = Vocabulary::bundled();
        let t = tokenize("<SILENCE>", &v).unwrap();
        assert_eq!(t[0].surface, "<SILENCE>");
        let t = tokenize("i'm on it, thanks!", &v).unwrap();
        let s: Vec<&str> = t.iter().map(|t| t.surface.as_str()).collect();
        assert_eq!(s, ["i'm", "on", "it", ",", "thanks", "!"]);
    }

    #[test]
    fn penn_tags() {
        assert_eq!(Pos::from_label("VBD"), Some(Pos::Verb));
        assert_eq!(Pos::from_label("NNP"), Some(Pos::Propn));
        assert_eq!(Pos::from_label("V"), Some(Pos::Verb));
        assert_eq!(Pos::from_label("NP"), None);
    }
}
