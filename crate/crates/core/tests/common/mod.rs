#![allow(dead_code)]

pub mod oracles;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use denotate::syntax::{Pos, Shape, Token};

/// Runner with a fixed seed, overridable through `DENOTATE_SEED`.
pub fn seeded_runner(cases: u32) -> TestRunner {
    let seed: u64 = std::env::var("DENOTATE_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(20_240_611);
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    let config = Config { cases, max_global_rejects: 1_000_000, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &bytes))
}

const WORDS: [(&str, Pos); 14] = [
    ("john", Pos::Propn),
    ("mary", Pos::Propn),
    ("apple", Pos::Noun),
    ("kitchen", Pos::Noun),
    ("grabbed", Pos::Verb),
    ("went", Pos::Verb),
    ("to", Pos::Prep),
    ("in", Pos::Prep),
    ("the", Pos::Det),
    ("there", Pos::Adv),
    ("up", Pos::Adv),
    ("red", Pos::Adj),
    (".", Pos::Punct),
    ("she", Pos::Pron),
];

fn leaf(i: usize) -> Shape {
    let (w, pos) = WORDS[i];
    Shape::Leaf(pos.name().to_string(), Token { surface: w.into(), lemma: w.into(), pos, index: 0 })
}

pub fn count_leaves(s: &Shape) -> usize {
    match s {
        Shape::Leaf(..) => 1,
        Shape::Branch(_, kids) => kids.iter().map(count_leaves).sum(),
    }
}

fn depth(s: &Shape) -> usize {
    match s {
        Shape::Leaf(..) => 1,
        Shape::Branch(_, kids) => 1 + kids.iter().map(depth).max().unwrap_or(0),
    }
}

fn has_verb(s: &Shape) -> bool {
    match s {
        Shape::Leaf(_, t) => t.pos == Pos::Verb,
        Shape::Branch(_, kids) => kids.iter().any(has_verb),
    }
}

/// Random branch-rooted trees, depth ≤ 5, ≤ 12 leaves, at least one verb.
pub fn tree_shape() -> impl Strategy<Value = Shape> {
    let leaf_s = (0..WORDS.len()).prop_map(leaf);
    let inner = leaf_s.prop_recursive(3, 12, 4, |inner| {
        (prop::sample::select(vec!["NP", "VP", "PP", "ADVP", "NP", "S"]), prop::collection::vec(inner, 1..4))
            .prop_map(|(l, kids)| Shape::Branch(l.to_string(), kids))
    });
    (prop::sample::select(vec!["S", "VP", "NP"]), prop::collection::vec(inner, 1..5))
        .prop_map(|(l, kids)| Shape::Branch(l.to_string(), kids))
        .prop_filter("size bounds", |s| count_leaves(s) <= 12 && depth(s) <= 5 && has_verb(s))
}
