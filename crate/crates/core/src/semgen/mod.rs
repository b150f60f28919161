//! Semantic generation: parse trees to timestamped facts.
//!
//! For each verb in a sentence, every frame of every class of the verb is
//! matched against the tree (climbing from the verb's parent), and the
//! templates of matching frames are instantiated and unioned. Sentences whose
//! main verb is `be` use the lexicon's copular mapping table instead.

mod matching;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::engine::{Rule, Term};
use crate::lexicon::{ArgSpec, Frame, Lexicon, SemanticTemplate, SyntaxSlot};
use crate::syntax::{NodeId, ParseTree, Pos};

pub use matching::{get_matching, skippable, slot_accepts, thematic_roles_at, units, RoleMatch};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemgenError {
    #[error("verb `{0}` does not occur in the tree")]
    VerbNotInTree(String),
    #[error("template `{template}` needs role {role}, which is not bound")]
    UnboundRole { template: String, role: String },
    #[error("no copular mapping applies to `{0}`")]
    UnmappedBePattern(String),
    #[error("no frame of `{verb}` matches `{sentence}`")]
    NoFrameMatched { verb: String, sentence: String },
    #[error("verb `{verb}` is not in the lexicon (`{sentence}`)")]
    UnknownVerb { verb: String, sentence: String },
}

/// Roles grounded for one verb and frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThematicBinding<'l> {
    pub role_values: BTreeMap<String, String>,
    pub verb: String,
    pub frame: &'l Frame,
    pub level: NodeId,
}

/// A ground fact `predicate(t<time>, args...)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SemanticFact {
    pub predicate: String,
    pub time: u32,
    /// Verb lemma of the event, absent for copular facts.
    pub event: Option<String>,
    pub args: Vec<Term>,
}

pub fn time_atom(time: u32) -> Term {
    Term::atom(&format!("t{time}"))
}

impl SemanticFact {
    pub fn to_term(&self) -> Term {
        let mut args = Vec::with_capacity(self.args.len() + 1);
        args.push(time_atom(self.time));
        args.extend(self.args.iter().cloned());
        Term::compound(&self.predicate, args)
    }

    pub fn to_rule(&self) -> Rule {
        Rule::fact(self.to_term())
    }
}

impl fmt::Display for SemanticFact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.", self.to_term())
    }
}

/// One fact per line, in the given order.
pub fn render_facts(facts: &[SemanticFact]) -> String {
    facts.iter().map(|f| format!("{f}\n")).collect()
}

/// Event atom for a verb lemma; multiword lemmas join with `_`.
pub fn event_name(verb: &str) -> String {
    verb.split_whitespace().collect::<Vec<_>>().join("_")
}

fn push_unique(out: &mut Vec<SemanticFact>, f: SemanticFact) {
    if !out.contains(&f) {
        out.push(f);
    }
}

/// How role arguments are written: `agent(john)` or plain `john`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RoleStyle {
    Tagged,
    Plain,
}

pub fn instantiate_templates(
    roles: &BTreeMap<String, String>,
    verb: &str,
    templates: &[SemanticTemplate],
    time: u32,
    style: RoleStyle,
) -> Result<Vec<SemanticFact>, SemgenError> {
    let event = event_name(verb);
    let mut out = Vec::new();
    for tpl in templates {
        let mut args = Vec::with_capacity(tpl.args.len());
        for a in &tpl.args {
            args.push(match a {
                ArgSpec::Role(r) => {
                    let v = roles
                        .get(r)
                        .ok_or_else(|| SemgenError::UnboundRole { template: tpl.to_string(), role: r.clone() })?;
                    match style {
                        RoleStyle::Tagged => Term::compound(&r.to_lowercase(), vec![Term::atom(v)]),
                        RoleStyle::Plain => Term::atom(v),
                    }
                }
                ArgSpec::Event => Term::compound("event", vec![Term::atom(&event)]),
                ArgSpec::Phase(p) => Term::compound(p.name(), vec![Term::atom(&event)]),
                ArgSpec::Const(c) => Term::atom(c),
            });
        }
        let event = (style == RoleStyle::Tagged).then(|| event.clone());
        push_unique(&mut out, SemanticFact { predicate: tpl.predicate.clone(), time, event, args });
    }
    Ok(out)
}

/// Instantiates the frame's templates with the binding, time first.
pub fn instantiate_semantics(
    binding: &ThematicBinding<'_>,
    templates: &[SemanticTemplate],
    time: u32,
) -> Result<Vec<SemanticFact>, SemgenError> {
    instantiate_templates(&binding.role_values, &binding.verb, templates, time, RoleStyle::Tagged)
}

/// Verb leaves with their lexicon lemma; a verb followed by a particle
/// forming a known multiword lemma (`picked up`) uses the multiword form.
pub fn verbs(tree: &ParseTree, lexicon: &Lexicon) -> Vec<(NodeId, String)> {
    let leaves = tree.leaves();
    let mut out = Vec::new();
    for (i, &l) in leaves.iter().enumerate() {
        let tok = tree.token(l).expect("leaf");
        if tok.pos != Pos::Verb {
            continue;
        }
        let multi = leaves
            .get(i + 1)
            .and_then(|&n| tree.token(n))
            .filter(|n| n.pos == Pos::Adv)
            .map(|n| format!("{} {}", tok.lemma, n.lemma))
            .filter(|m| lexicon.verb_index.contains_key(m));
        out.push((l, multi.unwrap_or_else(|| tok.lemma.clone())));
    }
    out
}

/// Algorithm 2 entry point: finds `verb` in the tree and matches `syntax`
/// from its parent upwards.
pub fn get_thematic_roles(
    tree: &ParseTree,
    syntax: &[SyntaxSlot],
    verb: &str,
    lexicon: &Lexicon,
) -> Result<Option<RoleMatch>, SemgenError> {
    let (leaf, _) = verbs(tree, lexicon)
        .into_iter()
        .find(|(l, lemma)| lemma == verb || tree.token(*l).is_some_and(|t| t.lemma == verb))
        .ok_or_else(|| SemgenError::VerbNotInTree(verb.to_string()))?;
    Ok(thematic_roles_at(tree, syntax, leaf))
}

/// Facts for one sentence plus non-fatal diagnostics.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SentenceSemantics {
    pub facts: Vec<SemanticFact>,
    pub diagnostics: Vec<SemgenError>,
}

/// Applies the copular mapping table; the first row that matches wins.
pub fn be_semantics(tree: &ParseTree, lexicon: &Lexicon, time: u32) -> Result<Vec<SemanticFact>, SemgenError> {
    let leaf = verbs(tree, lexicon)
        .into_iter()
        .find(|(_, l)| l == "be")
        .map(|(l, _)| l)
        .ok_or_else(|| SemgenError::VerbNotInTree("be".into()))?;
    be_semantics_at(tree, leaf, lexicon, time)
}

fn be_semantics_at(
    tree: &ParseTree,
    leaf: NodeId,
    lexicon: &Lexicon,
    time: u32,
) -> Result<Vec<SemanticFact>, SemgenError> {
    for row in &lexicon.be_mappings {
        if let Some(m) = thematic_roles_at(tree, &row.syntax, leaf) {
            return instantiate_templates(&m.roles, "be", &row.facts, time, RoleStyle::Plain);
        }
    }
    Err(SemgenError::UnmappedBePattern(tree.sentence_text()))
}

/// Algorithm 1: union over verbs, classes and frames of the instantiated
/// semantics of every matching frame.
pub fn get_sentence_semantics(tree: &ParseTree, lexicon: &Lexicon, time: u32) -> SentenceSemantics {
    let mut out = SentenceSemantics::default();
    for (leaf, verb) in verbs(tree, lexicon) {
        if verb == "be" {
            match be_semantics_at(tree, leaf, lexicon, time) {
                Ok(facts) => facts.into_iter().for_each(|f| push_unique(&mut out.facts, f)),
                Err(e) => out.diagnostics.push(e),
            }
            continue;
        }
        let classes = lexicon.get_vn_classes(&verb);
        if classes.is_empty() {
            out.diagnostics.push(SemgenError::UnknownVerb { verb, sentence: tree.sentence_text() });
            continue;
        }
        let mut matched = false;
        for class in classes {
            for frame in crate::lexicon::get_vn_frames(class) {
                let Some(m) = thematic_roles_at(tree, &frame.syntax, leaf) else { continue };
                matched = true;
                let binding = ThematicBinding { role_values: m.roles, verb: verb.clone(), frame, level: m.level };
                match instantiate_semantics(&binding, &frame.semantics, time) {
                    Ok(facts) => facts.into_iter().for_each(|f| push_unique(&mut out.facts, f)),
                    Err(e) => out.diagnostics.push(e),
                }
            }
        }
        if !matched {
            out.diagnostics.push(SemgenError::NoFrameMatched { verb, sentence: tree.sentence_text() });
        }
    }
    out
}

/// Compiled story: sentence `i` (1-based) contributes facts at time `i`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StoryFacts {
    pub facts: Vec<SemanticFact>,
    /// Per-sentence fact counts, in story order.
    pub counts: Vec<usize>,
    pub diagnostics: Vec<(usize, SemgenError)>,
}

impl StoryFacts {
    pub fn rules(&self) -> Vec<Rule> {
        self.facts.iter().map(SemanticFact::to_rule).collect()
    }

    pub fn render(&self) -> String {
        render_facts(&self.facts)
    }
}

pub fn story_to_program(sentences: &[ParseTree], lexicon: &Lexicon) -> StoryFacts {
    let mut out = StoryFacts::default();
    for (i, tree) in sentences.iter().enumerate() {
        let time = (i + 1) as u32;
        let sem = get_sentence_semantics(tree, lexicon, time);
        out.counts.push(sem.facts.len());
        out.facts.extend(sem.facts);
        out.diagnostics.extend(sem.diagnostics.into_iter().map(|d| (time as usize, d)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Frontend;

    fn sem(s: &str, t: u32) -> SentenceSemantics {
        get_sentence_semantics(&Frontend::default().parse(s).unwrap(), &Lexicon::bundled(), t)
    }

    fn rendered(s: &str, t: u32) -> Vec<String> {
        sem(s, t).facts.iter().map(|f| f.to_string()).collect()
    }

    #[test]
    fn grab_sentence_facts() {
        assert_eq!(
            rendered("John grabbed the apple there.", 3),
            [
                "contact(t3,during(grab),agent(john),theme(the_apple)).",
                "cause(t3,agent(john),event(grab)).",
                "transfer(t3,during(grab),theme(the_apple)).",
            ]
        );
    }

    #[test]
    fn copular_rows() {
        assert_eq!(rendered("Mary is in the kitchen.", 2), ["location(t2,mary,the_kitchen)."]);
        assert_eq!(
            rendered("Fred is either in the cinema or the park.", 1),
            ["possible_location(t1,fred,the_cinema).", "possible_location(t1,fred,the_park)."]
        );
        assert_eq!(
            rendered("Fred is either in the cinema or the cinema.", 1),
            ["possible_location(t1,fred,the_cinema)."]
        );
        assert_eq!(rendered("Julie is no longer in the school.", 4), ["neg_location(t4,julie,the_school)."]);
        assert_eq!(rendered("Daniel is not in the bathroom.", 1), ["neg_location(t1,daniel,the_bathroom)."]);
    }

    #[test]
    fn multiword_and_motion() {
        assert_eq!(
            rendered("John picked up the milk there.", 4),
            [
                "contact(t4,during(pick_up),agent(john),theme(the_milk)).",
                "cause(t4,agent(john),event(pick_up)).",
                "transfer(t4,during(pick_up),theme(the_milk)).",
            ]
        );
        assert_eq!(
            rendered("John moved to the bedroom.", 1),
            ["motion(t1,during(move),theme(john),destination(the_bedroom))."]
        );
    }

    #[test]
    fn no_match_diagnostic() {
        let s = sem("Run!", 1);
        assert!(s.facts.is_empty());
        assert!(matches!(s.diagnostics[0], SemgenError::NoFrameMatched { .. }));
    }

    #[test]
    fn unbound_role() {
        let lex = Lexicon::bundled();
        let frame = &lex.get_vn_classes("grab")[0].frames[0];
        let b = ThematicBinding { role_values: BTreeMap::new(), verb: "grab".into(), frame, level: 0 };
        let give = &lex.get_vn_classes("give")[0].frames[0];
        assert!(matches!(instantiate_semantics(&b, &give.semantics, 1), Err(SemgenError::UnboundRole { .. })));
        assert!(instantiate_semantics(&b, &[], 1).unwrap().is_empty());
    }
}
