use std::collections::HashMap;

use super::token::{Gender, Pos, Vocabulary};
use super::tree::{NodeId, ParseTree, Shape};
use super::SyntaxError;

const LOCATIVE_PREPS: [&str; 4] = ["to", "in", "into", "at"];

#[derive(Clone, Debug)]
enum Kind {
    Person(Option<Gender>),
    Thing,
}

#[derive(Clone, Debug)]
struct Mention {
    shape: Shape,
    kind: Kind,
}

/// Resolved story plus the anaphors that had no antecedent.
#[derive(Clone, Debug, Default)]
pub struct Resolution {
    pub trees: Vec<ParseTree>,
    pub unresolved: Vec<SyntaxError>,
}

fn compatible(pronoun: &str, kind: &Kind) -> bool {
    match (pronoun, kind) {
        ("he" | "him", Kind::Person(g)) => *g != Some(Gender::Female),
        ("she" | "her", Kind::Person(g)) => *g != Some(Gender::Male),
        ("it", Kind::Thing) => true,
        _ => false,
    }
}

fn is_np(t: &ParseTree, id: NodeId) -> bool {
    t.category(id) == "NP"
}

/// The pronoun lemma when `id` is an NP consisting of a single pronoun leaf.
fn pronoun_np(t: &ParseTree, id: NodeId) -> Option<&str> {
    let leaves = t.leaves_under(id);
    match leaves.as_slice() {
        [l] => t.token(*l).filter(|tok| tok.pos == Pos::Pron).map(|tok| tok.lemma.as_str()),
        _ => None,
    }
}

fn is_location_np(t: &ParseTree, id: NodeId) -> bool {
    let Some(pp) = t.parent(id) else { return false };
    if t.category(pp) != "PP" {
        return false;
    }
    t.children(pp)
        .first()
        .and_then(|&p| t.token(p))
        .is_some_and(|tok| tok.pos == Pos::Prep && LOCATIVE_PREPS.contains(&tok.lemma.as_str()))
}

fn subject_np(t: &ParseTree) -> Option<NodeId> {
    let root = t.root();
    if t.category(root) != "S" {
        return None;
    }
    t.children(root).iter().copied().find(|&c| is_np(t, c))
}

fn entity_key(shape: &Shape) -> String {
    ParseTree::from_shape(shape.clone()).normalized(0)
}

/// Replaces `he/she/him/her/it` by the most recent compatible entity NP and
/// locative `there` by the subject's most recent location (falling back to
/// the most recent location overall). Unresolvable anaphors are reported and
/// left in place.
pub fn resolve_anaphora(sentences: &[ParseTree], vocab: &Vocabulary) -> Resolution {
    let mut mentions: Vec<Mention> = Vec::new();
    let mut last_location: Option<Shape> = None;
    let mut location_of: HashMap<String, Shape> = HashMap::new();
    let mut out = Resolution::default();

    for (si, tree) in sentences.iter().enumerate() {
        let mut replacements: Vec<(NodeId, Shape)> = Vec::new();
        let subject = subject_np(tree);
        let mut subject_key: Option<String> = None;
        let mut sentence_location: Option<Shape> = None;

        for id in tree.ids() {
            if is_np(tree, id) && !tree.children(id).iter().any(|&c| is_np(tree, c)) {
                let resolved = if let Some(pron) = pronoun_np(tree, id) {
                    if !matches!(pron, "he" | "she" | "him" | "her" | "it" | "they" | "them") {
                        continue;
                    }
                    let hit = mentions.iter().rev().find(|m| compatible(pron, &m.kind)).cloned();
                    match hit {
                        Some(m) => {
                            replacements.push((id, m.shape.clone()));
                            Some(m)
                        }
                        None => {
                            let leaf = tree.leaves_under(id)[0];
                            let tok = tree.token(leaf).expect("leaf token");
                            out.unresolved.push(SyntaxError::UnresolvedAnaphor {
                                sentence: si,
                                index: tok.index,
                                word: tok.surface.clone(),
                            });
                            None
                        }
                    }
                } else {
                    let shape = tree.shape(id);
                    let toks = tree.leaves_under(id);
                    let propn = toks.iter().filter_map(|&l| tree.token(l)).find(|t| t.pos == Pos::Propn);
                    let kind = match propn {
                        Some(p) => Kind::Person(vocab.gender(&p.lemma)),
                        None => Kind::Thing,
                    };
                    if is_location_np(tree, id) {
                        last_location = Some(shape.clone());
                        sentence_location = Some(shape);
                        None
                    } else {
                        Some(Mention { shape, kind })
                    }
                };
                if let Some(m) = resolved {
                    if Some(id) == subject {
                        subject_key = Some(entity_key(&m.shape));
                    }
                    mentions.push(m);
                }
            } else if let Some(tok) = tree.token(id) {
                if tok.pos == Pos::Adv && tok.lemma == "there" {
                    let own = subject_key.as_ref().and_then(|k| location_of.get(k)).cloned();
                    match own.or_else(|| last_location.clone()) {
                        Some(loc) => replacements.push((id, loc)),
                        None => out.unresolved.push(SyntaxError::UnresolvedAnaphor {
                            sentence: si,
                            index: tok.index,
                            word: tok.surface.clone(),
                        }),
                    }
                }
            }
        }
        if let (Some(k), Some(loc)) = (&subject_key, sentence_location) {
            location_of.insert(k.clone(), loc);
        }
        replacements.sort_by_key(|r| std::cmp::Reverse(r.0));
        let mut t = tree.clone();
        for (id, shape) in replacements {
            t = t.replace(id, shape);
        }
        out.trees.push(t);
    }
    out
}
