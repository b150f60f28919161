//! Partial tree matching between a frame's syntax slots and a parse subtree.
//!
//! The subtree is read as a sequence of units: NP constituents stay whole,
//! every other constituent is flattened into its children. Slots are matched
//! left to right; between slots, determiners, punctuation and adverbs
//! (particles included) may be skipped, and prepositions may be skipped when
//! the next slot is an NP. Units after the last slot are ignored.

use std::collections::BTreeMap;

use crate::lexicon::{SlotCat, SyntaxSlot};
use crate::syntax::{NodeId, ParseTree, Pos};

/// Roles bound by one successful match.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoleMatch {
    pub roles: BTreeMap<String, String>,
    /// Unit index where each slot starts.
    pub positions: Vec<usize>,
    /// Subtree root at which the match was found.
    pub level: NodeId,
}

/// Units of the subtree at `root`, left to right.
pub fn units(tree: &ParseTree, root: NodeId) -> Vec<NodeId> {
    let mut out = Vec::new();
    for &c in tree.children(root) {
        if tree.category(c) == "NP" || tree.is_leaf(c) {
            out.push(c);
        } else {
            out.extend(units(tree, c));
        }
    }
    out
}

fn leaf_pos(tree: &ParseTree, id: NodeId) -> Option<Pos> {
    tree.token(id).map(|t| t.pos)
}

fn leaf_lemma(tree: &ParseTree, id: NodeId) -> Option<&str> {
    tree.token(id).map(|t| t.lemma.as_str())
}

fn is_np(tree: &ParseTree, id: NodeId) -> bool {
    tree.category(id) == "NP"
}

/// Whether `unit` may be passed over while looking for `next` slot.
pub fn skippable(tree: &ParseTree, unit: NodeId, next: &SyntaxSlot) -> bool {
    if is_np(tree, unit) {
        return false;
    }
    match leaf_pos(tree, unit) {
        Some(Pos::Det | Pos::Punct | Pos::Adv) => true,
        Some(Pos::Prep) => next.cat == SlotCat::NP,
        _ => false,
    }
}

/// If `slot` can start at unit `u`, returns the next unit index and the
/// role value it binds.
pub fn slot_accepts(
    tree: &ParseTree,
    units: &[NodeId],
    u: usize,
    slot: &SyntaxSlot,
    verb: NodeId,
) -> Option<(usize, Option<String>)> {
    let id = *units.get(u)?;
    let literal_ok = |id: NodeId| match &slot.literal {
        Some(l) => leaf_lemma(tree, id) == Some(l.as_str()),
        None => true,
    };
    match slot.cat {
        SlotCat::NP => is_np(tree, id).then(|| (u + 1, Some(tree.normalized(id)))),
        SlotCat::V => (id == verb).then_some((u + 1, None)),
        SlotCat::PP => {
            let np = *units.get(u + 1)?;
            (leaf_pos(tree, id) == Some(Pos::Prep) && !is_np(tree, id) && literal_ok(id) && is_np(tree, np))
                .then(|| (u + 2, Some(tree.normalized(np))))
        }
        SlotCat::PREP => {
            (leaf_pos(tree, id) == Some(Pos::Prep) && !is_np(tree, id) && literal_ok(id)).then_some((u + 1, None))
        }
        SlotCat::ADV => (leaf_pos(tree, id) == Some(Pos::Adv) && !is_np(tree, id) && literal_ok(id))
            .then(|| (u + 1, leaf_lemma(tree, id).map(str::to_string))),
        SlotCat::LEX => (tree.is_leaf(id) && literal_ok(id)).then_some((u + 1, None)),
    }
}

/// One-shot match of `syntax` against the units of `root`. Among all
/// order-preserving assignments the one with the earliest slot positions
/// (lexicographically) is returned.
pub fn get_matching(tree: &ParseTree, root: NodeId, syntax: &[SyntaxSlot], verb: NodeId) -> Option<RoleMatch> {
    if tree.is_leaf(root) {
        return None;
    }
    let us = units(tree, root);
    let mut positions = Vec::new();
    let mut roles = Vec::new();
    if search(tree, &us, 0, syntax, verb, &mut positions, &mut roles) {
        let roles = syntax.iter().zip(roles).filter_map(|(slot, v)| Some((slot.role.clone()?, v?))).collect();
        Some(RoleMatch { roles, positions, level: root })
    } else {
        None
    }
}

fn search(
    tree: &ParseTree,
    units: &[NodeId],
    u: usize,
    slots: &[SyntaxSlot],
    verb: NodeId,
    positions: &mut Vec<usize>,
    roles: &mut Vec<Option<String>>,
) -> bool {
    let Some(slot) = slots.get(positions.len()) else { return true };
    if u >= units.len() {
        return false;
    }
    if let Some((next, value)) = slot_accepts(tree, units, u, slot, verb) {
        positions.push(u);
        roles.push(value);
        if search(tree, units, next, slots, verb, positions, roles) {
            return true;
        }
        positions.pop();
        roles.pop();
    }
    skippable(tree, units[u], slot) && search(tree, units, u + 1, slots, verb, positions, roles)
}

/// Climbs from the verb's parent towards the root, returning the first
/// level at which the frame syntax matches.
pub fn thematic_roles_at(tree: &ParseTree, syntax: &[SyntaxSlot], verb: NodeId) -> Option<RoleMatch> {
    let mut root = tree.parent(verb)?;
    loop {
        if let Some(m) = get_matching(tree, root, syntax, verb) {
            return Some(m);
        }
        root = tree.parent(root)?;
    }
}
