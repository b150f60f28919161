use std::collections::BTreeSet;
use std::str::FromStr;

use super::question::QueryPlan;
use super::KnowledgeError;
use crate::engine::{Answers, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AnswerKind {
    Entity,
    EntityList,
    Number,
    YesNoMaybe,
    /// The place an object was in just before a given place.
    Before,
}

impl FromStr for AnswerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "entity" => AnswerKind::Entity,
            "entity_list" => AnswerKind::EntityList,
            "number" => AnswerKind::Number,
            "yes_no_maybe" => AnswerKind::YesNoMaybe,
            "before" => AnswerKind::Before,
            _ => return Err(format!("unknown answer kind `{s}`")),
        })
    }
}

const DETERMINERS: [&str; 5] = ["the", "a", "an", "some", "this"];

/// `the_apple` → `apple`.
pub fn strip_determiner(atom: &str) -> &str {
    for d in DETERMINERS {
        if let Some(rest) = atom.strip_prefix(d).and_then(|r| r.strip_prefix('_')) {
            return rest;
        }
    }
    atom
}

fn atom_text(t: &Term) -> String {
    t.as_atom().map(str::to_string).unwrap_or_else(|| t.to_string())
}

/// `(value, order)` pairs in enumeration order, duplicates removed.
pub fn answer_values(answers: &Answers, plan: &QueryPlan) -> Vec<(String, Option<Term>)> {
    let mut out: Vec<(String, Option<Term>)> = Vec::new();
    for a in answers.iter() {
        let Some(v) = a.get(&plan.answer_var) else { continue };
        let item = (atom_text(v), plan.order_var.as_ref().and_then(|o| a.get(o)).cloned());
        if !out.contains(&item) {
            out.push(item);
        }
    }
    out
}

fn order_key(t: &Option<Term>) -> i64 {
    t.as_ref().and_then(Term::as_int).unwrap_or(0)
}

/// Definite places win; a place among two or more possible places is
/// `maybe`, a single possible place counts as definite (p∨p is p).
pub fn three_valued(
    definite: &BTreeSet<String>,
    possible: &BTreeSet<String>,
    negated: &BTreeSet<String>,
    asked: &str,
) -> &'static str {
    if definite.contains(asked) {
        "yes"
    } else if negated.contains(asked) {
        "no"
    } else if possible.contains(asked) {
        if possible.len() >= 2 {
            "maybe"
        } else {
            "yes"
        }
    } else {
        "no"
    }
}

/// Every distinct rendered value, for mismatch logs.
pub fn candidates(answers: &Answers, plan: &QueryPlan) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for (v, _) in answer_values(answers, plan) {
        let v = strip_determiner(&v).to_string();
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

pub fn extract_answer(answers: &Answers, plan: &QueryPlan) -> Result<String, KnowledgeError> {
    let values = answer_values(answers, plan);
    let none = || KnowledgeError::NoAnswer(plan.query_text.clone());
    match plan.answer_kind {
        AnswerKind::Entity => {
            // With an order variable the latest answer wins; ties keep the
            // first enumerated.
            let best = match plan.order_var {
                Some(_) => values.iter().rev().max_by_key(|(_, o)| order_key(o)),
                None => values.first(),
            };
            best.map(|(v, _)| strip_determiner(v).to_string()).ok_or_else(none)
        }
        AnswerKind::EntityList => {
            let mut sorted = values.clone();
            sorted.sort_by_key(|(_, o)| order_key(o));
            let mut items: Vec<&str> = Vec::new();
            for (v, _) in &sorted {
                let v = strip_determiner(v);
                if !items.contains(&v) {
                    items.push(v);
                }
            }
            Ok(if items.is_empty() { "nothing".to_string() } else { items.join(",") })
        }
        AnswerKind::Number => values.first().map(|(v, _)| v.clone()).ok_or_else(none),
        AnswerKind::YesNoMaybe => {
            let asked = plan.args.get("location").map(String::as_str).unwrap_or_default();
            let mut sets: [BTreeSet<String>; 3] = Default::default();
            for (place, kind) in &values {
                let slot = match kind.as_ref().and_then(Term::as_atom) {
                    Some("definite") => 0,
                    Some("possible") => 1,
                    Some("negated") => 2,
                    _ => continue,
                };
                sets[slot].insert(place.clone());
            }
            Ok(three_valued(&sets[0], &sets[1], &sets[2], asked).to_string())
        }
        AnswerKind::Before => {
            let asked = plan.args.get("location").map(String::as_str).unwrap_or_default();
            let mut sorted = values.clone();
            sorted.sort_by_key(|(_, o)| order_key(o));
            let mut trail: Vec<&str> = Vec::new();
            for (v, _) in &sorted {
                if trail.last() != Some(&v.as_str()) {
                    trail.push(v);
                }
            }
            let at = trail.iter().rposition(|p| *p == asked).filter(|&i| i > 0).ok_or_else(none)?;
            Ok(strip_determiner(trail[at - 1]).to_string())
        }
    }
}

const NUMBER_WORDS: [&str; 11] =
    ["none", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten"];

/// Canonical form for scoring: number words become digits, lists become
/// sorted sets, `nothing` becomes the empty list, determiners are dropped.
pub fn normalize_answer(text: &str) -> String {
    let t = text.trim().to_lowercase();
    if let Some(n) = NUMBER_WORDS.iter().position(|w| *w == t).or_else(|| (t == "zero").then_some(0)) {
        return n.to_string();
    }
    if t == "nothing" {
        return String::new();
    }
    let items: BTreeSet<String> = t
        .split(',')
        .map(|i| {
            let i = i.trim().replace(' ', "_");
            strip_determiner(&i).to_string()
        })
        .filter(|i| !i.is_empty())
        .collect();
    items.into_iter().collect::<Vec<_>>().join(",")
}

pub fn answers_match(system: &str, gold: &str) -> bool {
    normalize_answer(system) == normalize_answer(gold)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn determiners() {
        assert_eq!(strip_determiner("the_apple"), "apple");
        assert_eq!(strip_determiner("theatre"), "theatre");
        assert_eq!(strip_determiner("john"), "john");
    }

    #[test]
    fn readout_table() {
        let e = set(&[]);
        assert_eq!(three_valued(&set(&["c"]), &e, &e, "c"), "yes");
        assert_eq!(three_valued(&e, &set(&["c", "p"]), &e, "c"), "maybe");
        assert_eq!(three_valued(&e, &set(&["c"]), &e, "c"), "yes");
        assert_eq!(three_valued(&e, &set(&["c", "p"]), &e, "k"), "no");
        assert_eq!(three_valued(&e, &e, &set(&["c"]), "c"), "no");
        assert_eq!(three_valued(&set(&["k"]), &e, &e, "c"), "no");
    }

    #[test]
    fn scoring_normalization() {
        assert!(answers_match("1", "one"));
        assert!(answers_match("0", "none"));
        assert!(answers_match("nothing", "nothing"));
        assert!(answers_match("milk,apple", "apple,milk"));
        assert!(answers_match("the_kitchen", "kitchen"));
        assert!(!answers_match("milk", "apple"));
        assert!(!answers_match("0", "nothing") || normalize_answer("0") == normalize_answer("nothing"));
    }
}
