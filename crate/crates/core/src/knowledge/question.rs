use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use super::readout::AnswerKind;
use super::{CommonsenseKB, KnowledgeError};
use crate::engine::{parse_query, Query, Rule, Term};
use crate::semgen::{time_atom, units};
use crate::syntax::{ParseTree, Pos};

const BUNDLED_QUESTIONS: &str = include_str!("../../resources/kb/questions.tsv");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QuestionType {
    WherePerson,
    WhereObject,
    WhatGiven,
    WhoGave,
    GaveToWhom,
    WhoReceived,
    YesNoLocation,
    CountPossessions,
    ListPossessions,
    WhereMaybe,
    WhereBefore,
}

impl QuestionType {
    pub const ALL: [QuestionType; 11] = [
        QuestionType::WherePerson,
        QuestionType::WhereObject,
        QuestionType::WhatGiven,
        QuestionType::WhoGave,
        QuestionType::GaveToWhom,
        QuestionType::WhoReceived,
        QuestionType::YesNoLocation,
        QuestionType::CountPossessions,
        QuestionType::ListPossessions,
        QuestionType::WhereMaybe,
        QuestionType::WhereBefore,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QuestionType::WherePerson => "where_person",
            QuestionType::WhereObject => "where_object",
            QuestionType::WhatGiven => "what_given",
            QuestionType::WhoGave => "who_gave",
            QuestionType::GaveToWhom => "gave_to_whom",
            QuestionType::WhoReceived => "who_received",
            QuestionType::YesNoLocation => "yes_no_location",
            QuestionType::CountPossessions => "count_possessions",
            QuestionType::ListPossessions => "list_possessions",
            QuestionType::WhereMaybe => "where_maybe",
            QuestionType::WhereBefore => "where_before",
        }
    }

    /// Entities the query needs.
    pub fn params(self) -> &'static [&'static str] {
        match self {
            QuestionType::WherePerson | QuestionType::CountPossessions | QuestionType::ListPossessions => &["person"],
            QuestionType::WhereObject | QuestionType::WhoReceived => &["object"],
            QuestionType::WhatGiven => &["giver", "recipient"],
            QuestionType::WhoGave => &["object"],
            QuestionType::GaveToWhom => &["giver", "object"],
            QuestionType::YesNoLocation | QuestionType::WhereMaybe => &["person", "location"],
            QuestionType::WhereBefore => &["object", "location"],
        }
    }

    /// The table rows for `where_maybe` are those of `yes_no_location`.
    fn table_type(self) -> QuestionType {
        match self {
            QuestionType::WhereMaybe => QuestionType::YesNoLocation,
            q => q,
        }
    }
}

impl fmt::Display for QuestionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QuestionType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        QuestionType::ALL.into_iter().find(|q| q.name() == s).ok_or_else(|| format!("unknown question type `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PatternItem {
    Lemma(String),
    /// Any leaf with this label (`NOUN`, `V`, ...).
    Category(String),
    /// A noun phrase bound to a parameter.
    Capture(String),
}

fn is_person_param(name: &str) -> bool {
    matches!(name, "person" | "giver" | "recipient")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuestionTemplate {
    pub qtype: QuestionType,
    pub pattern: Vec<PatternItem>,
    /// Query text with `{time}` and `{param}` holes.
    pub query: String,
    pub answer_var: String,
    pub kind: AnswerKind,
    pub order_var: Option<String>,
}

impl QuestionTemplate {
    fn captures(&self) -> impl Iterator<Item = &str> {
        self.pattern.iter().filter_map(|p| match p {
            PatternItem::Capture(c) => Some(c.as_str()),
            _ => None,
        })
    }
}

/// Question patterns mapped to query templates.
#[derive(Clone, Debug)]
pub struct QuestionTable {
    pub rows: Vec<QuestionTemplate>,
}

/// A question matched against the table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassifiedQuestion {
    pub qtype: QuestionType,
    pub args: BTreeMap<String, String>,
    pub row: usize,
}

impl ClassifiedQuestion {
    /// A location question about someone the story only places
    /// disjunctively becomes `where_maybe`.
    pub fn refine_with_story(&mut self, facts: &[Rule]) {
        if self.qtype != QuestionType::YesNoLocation {
            return;
        }
        let Some(person) = self.args.get("person") else { return };
        let disjunctive = facts.iter().filter_map(|r| r.head.as_ref()).any(|h| {
            h.functor() == Some("possible_location") && h.args().get(1).and_then(Term::as_atom) == Some(person)
        });
        if disjunctive {
            self.qtype = QuestionType::WhereMaybe;
        }
    }
}

/// What to ask the engine and how to read the answers.
#[derive(Clone, Debug)]
pub struct QueryPlan {
    pub qtype: QuestionType,
    /// Reusable rules behind the query predicate (empty when the query
    /// targets a KB fluent directly).
    pub generic_rules: Vec<Rule>,
    pub query: Query,
    pub query_text: String,
    pub answer_var: String,
    pub order_var: Option<String>,
    pub answer_kind: AnswerKind,
    pub args: BTreeMap<String, String>,
}

fn fill(template: &str, args: &BTreeMap<String, String>, time: u32) -> Result<String, String> {
    let mut out = String::new();
    let mut rest = template;
    while let Some(i) = rest.find('{') {
        out.push_str(&rest[..i]);
        let j = rest[i..].find('}').ok_or("unclosed `{`")? + i;
        let name = &rest[i + 1..j];
        if name == "time" {
            out.push_str(&time_atom(time).to_string());
        } else {
            out.push_str(args.get(name).ok_or_else(|| name.to_string())?);
        }
        rest = &rest[j + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

impl QuestionTable {
    pub fn bundled() -> &'static QuestionTable {
        static TABLE: OnceLock<QuestionTable> = OnceLock::new();
        TABLE.get_or_init(|| QuestionTable::parse(BUNDLED_QUESTIONS).expect("bundled question table is valid"))
    }

    pub fn parse(text: &str) -> Result<Self, KnowledgeError> {
        let mut rows = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            let err = |msg: String| KnowledgeError::TableFormat { line: line_no, msg };
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let [qtype, pattern, query, answer, kind, order] = cols[..] else {
                return Err(err(format!("expected 6 columns, found {}", cols.len())));
            };
            let qtype: QuestionType = qtype.parse().map_err(err)?;
            let pattern = pattern
                .split_whitespace()
                .map(|w| {
                    if let Some(name) = w.strip_prefix('{').and_then(|w| w.strip_suffix('}')) {
                        PatternItem::Capture(name.to_string())
                    } else if w.chars().all(|c| c.is_ascii_uppercase()) {
                        PatternItem::Category(w.to_string())
                    } else {
                        PatternItem::Lemma(w.to_string())
                    }
                })
                .collect();
            let row = QuestionTemplate {
                qtype,
                pattern,
                query: query.to_string(),
                answer_var: answer.to_string(),
                kind: kind.parse().map_err(err)?,
                order_var: (order != "-").then(|| order.to_string()),
            };
            let dummy: BTreeMap<String, String> = row.captures().map(|c| (c.to_string(), "x".to_string())).collect();
            let filled = fill(&row.query, &dummy, 1).map_err(|h| err(format!("query hole `{h}` is not captured")))?;
            let q = parse_query(&filled).map_err(|e| err(e.to_string()))?;
            for v in std::iter::once(&row.answer_var).chain(&row.order_var) {
                if !q.var_names.iter().any(|n| n.as_ref() == v) {
                    return Err(err(format!("variable {v} does not occur in the query")));
                }
            }
            rows.push(row);
        }
        Ok(QuestionTable { rows })
    }

    pub fn classify(&self, pt: &ParseTree) -> Result<ClassifiedQuestion, KnowledgeError> {
        let us: Vec<usize> =
            units(pt, pt.root()).into_iter().filter(|&u| pt.token(u).is_none_or(|t| t.pos != Pos::Punct)).collect();
        'rows: for (i, row) in self.rows.iter().enumerate() {
            if row.pattern.len() != us.len() {
                continue;
            }
            let mut args = BTreeMap::new();
            for (item, &u) in row.pattern.iter().zip(&us) {
                let ok = match item {
                    PatternItem::Lemma(l) => pt.token(u).is_some_and(|t| &t.lemma == l),
                    PatternItem::Category(c) => pt.is_leaf(u) && pt.label(u) == c,
                    PatternItem::Capture(name) => {
                        let want = if is_person_param(name) { Pos::Propn } else { Pos::Noun };
                        let np = pt.category(u) == "NP"
                            && pt.leaves_under(u).iter().any(|&l| pt.token(l).is_some_and(|t| t.pos == want));
                        if np {
                            args.insert(name.clone(), pt.normalized(u));
                        }
                        np
                    }
                };
                if !ok {
                    continue 'rows;
                }
            }
            return Ok(ClassifiedQuestion { qtype: row.qtype, args, row: i });
        }
        let shape: Vec<String> = us
            .iter()
            .map(|&u| match pt.token(u) {
                Some(t) if pt.category(u) != "NP" => t.lemma.clone(),
                _ => pt.category(u).to_string(),
            })
            .collect();
        Err(KnowledgeError::UnsupportedQuestion(shape.join(" ")))
    }

    /// Builds the plan from a classified question, using its own row.
    pub fn plan(&self, kb: &CommonsenseKB, q: &ClassifiedQuestion, time: u32) -> Result<QueryPlan, KnowledgeError> {
        self.plan_row(kb, &self.rows[q.row], q.qtype, &q.args, time)
    }

    /// Builds the plan from the first row of `qtype` whose parameters are
    /// all supplied.
    pub fn generate(
        &self,
        kb: &CommonsenseKB,
        qtype: QuestionType,
        args: &BTreeMap<String, String>,
        time: u32,
    ) -> Result<QueryPlan, KnowledgeError> {
        for name in qtype.params() {
            if !args.contains_key(*name) {
                return Err(KnowledgeError::MissingEntity { qtype: qtype.to_string(), name: name.to_string() });
            }
        }
        let row = self
            .rows
            .iter()
            .filter(|r| r.qtype == qtype.table_type())
            .find(|r| r.captures().all(|c| args.contains_key(c)))
            .ok_or_else(|| KnowledgeError::UnsupportedQuestion(qtype.to_string()))?;
        self.plan_row(kb, row, qtype, args, time)
    }

    fn plan_row(
        &self,
        kb: &CommonsenseKB,
        row: &QuestionTemplate,
        qtype: QuestionType,
        args: &BTreeMap<String, String>,
        time: u32,
    ) -> Result<QueryPlan, KnowledgeError> {
        let query_text = fill(&row.query, args, time)
            .map_err(|name| KnowledgeError::MissingEntity { qtype: qtype.to_string(), name })?;
        let query = parse_query(&query_text)?;
        let predicate = query_text.split('(').next().unwrap_or_default();
        Ok(QueryPlan {
            qtype,
            generic_rules: kb.templates_for(predicate),
            query,
            query_text,
            answer_var: row.answer_var.clone(),
            order_var: row.order_var.clone(),
            answer_kind: row.kind,
            args: args.clone(),
        })
    }
}

/// Classifies with the bundled question table.
pub fn classify_question(pt: &ParseTree) -> Result<ClassifiedQuestion, KnowledgeError> {
    QuestionTable::bundled().classify(pt)
}

/// Builds a plan with the bundled table and KB.
pub fn generate_query(
    qtype: QuestionType,
    args: &BTreeMap<String, String>,
    time: u32,
) -> Result<QueryPlan, KnowledgeError> {
    static KB: OnceLock<CommonsenseKB> = OnceLock::new();
    QuestionTable::bundled().generate(KB.get_or_init(CommonsenseKB::bundled), qtype, args, time)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Frontend;

    fn classify(s: &str) -> Result<ClassifiedQuestion, KnowledgeError> {
        classify_question(&Frontend::default().parse(s).unwrap())
    }

    fn args(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn question_shapes() {
        let cases = [
            ("How many objects is John carrying?", QuestionType::CountPossessions),
            ("What did Fred give to Bill?", QuestionType::WhatGiven),
            ("Where is Mary?", QuestionType::WherePerson),
            ("Where is the football?", QuestionType::WhereObject),
            ("What is Daniel carrying?", QuestionType::ListPossessions),
            ("Is Fred in the cinema?", QuestionType::YesNoLocation),
            ("Where was the football before the kitchen?", QuestionType::WhereBefore),
            ("Who gave the cake to Fred?", QuestionType::WhoGave),
            ("Who gave the cake?", QuestionType::WhoGave),
            ("Who did Fred give the cake to?", QuestionType::GaveToWhom),
            ("Who received the football?", QuestionType::WhoReceived),
        ];
        for (q, t) in cases {
            assert_eq!(classify(q).unwrap().qtype, t, "{q}");
        }
        let c = classify("What did Fred give to Bill?").unwrap();
        assert_eq!(c.args, args(&[("giver", "fred"), ("recipient", "bill")]));
    }

    #[test]
    fn unsupported_shape_is_named() {
        let tree = Frontend::default()
            .read_bracketed("(SBARQ (WHADVP (ADV why)) (V is) (NP (DET the) (NOUN sky)) (ADJ blue) (PUNCT ?))")
            .unwrap();
        let err = classify_question(&tree).unwrap_err();
        assert_eq!(err, KnowledgeError::UnsupportedQuestion("why be NP blue".into()));
    }

    #[test]
    fn count_plan() {
        let plan = generate_query(QuestionType::CountPossessions, &args(&[("person", "john")]), 6).unwrap();
        assert_eq!(plan.query_text, "count_object(t6,john,Count)");
        assert_eq!(plan.answer_kind, AnswerKind::Number);
        assert_eq!(plan.generic_rules.len(), 1);
        let plan = generate_query(QuestionType::WherePerson, &args(&[("person", "mary")]), 4).unwrap();
        assert_eq!(plan.query_text, "property(location,t4,mary,L)");
    }

    #[test]
    fn missing_entity() {
        let err = generate_query(QuestionType::WhatGiven, &args(&[("giver", "fred")]), 4).unwrap_err();
        assert!(matches!(err, KnowledgeError::MissingEntity { ref name, .. } if name == "recipient"));
    }

    #[test]
    fn where_maybe_refinement() {
        let mut c = classify("Is Fred in the cinema?").unwrap();
        let facts = crate::engine::parse_rules("possible_location(t1,fred,the_cinema).").unwrap();
        c.refine_with_story(&facts);
        assert_eq!(c.qtype, QuestionType::WhereMaybe);
        let plan = generate_query(c.qtype, &c.args, 1).unwrap();
        assert_eq!(plan.query_text, "location_state(t1,fred,K,L)");
    }

    #[test]
    fn table_errors() {
        assert!(matches!(
            QuestionTable::parse("where_person\twhere be {person}"),
            Err(KnowledgeError::TableFormat { line: 1, .. })
        ));
        let bad = "where_person\twhere be {person}\tproperty(location,{time},{object},L)\tL\tentity\t-";
        assert!(QuestionTable::parse(bad).is_err());
        let bad = "where_person\twhere be {person}\tproperty(location,{time},{person},L)\tX\tentity\t-";
        assert!(QuestionTable::parse(bad).is_err());
    }
}
