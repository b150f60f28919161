mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use common::{seeded_runner, tree_shape};
use denotate::dialog::{DialogAgent, DialogError, DialogState, Provenance, SlotName, Templates};
use denotate::engine::{parse_query, Solver};
use denotate::harness::{read_babi_dialog, run_dialog_task, QaSystem};
use denotate::knowledge::{strip_determiner, three_valued};
use denotate::syntax::{write_bracketed, Frontend, ParseTree};

#[test]
fn bracketed_trees_round_trip() {
    let frontend = Frontend::default();
    seeded_runner(300)
        .run(&tree_shape(), |shape| {
            let tree = ParseTree::from_shape(shape);
            let once = write_bracketed(&tree);
            let back = frontend.read_bracketed(&once).unwrap();
            prop_assert_eq!(write_bracketed(&back), once.clone());
            let before: Vec<_> = tree.tokens().iter().map(|t| (t.surface.clone(), t.pos)).collect();
            let after: Vec<_> = back.tokens().iter().map(|t| (t.surface.clone(), t.pos)).collect();
            prop_assert_eq!(before, after);
            Ok(())
        })
        .unwrap();
}

const PEOPLE: [&str; 4] = ["mary", "john", "sandra", "daniel"];
const PLACES: [&str; 5] = ["kitchen", "garden", "office", "bathroom", "hallway"];
const MOVES: [&str; 4] = ["went to", "journeyed to", "travelled to", "moved to"];

fn title(w: &str) -> String {
    let mut c = w.chars();
    c.next().map(|f| f.to_uppercase().chain(c).collect()).unwrap_or_default()
}

#[test]
fn location_follows_last_move() {
    let sys = QaSystem::default();
    let story = prop::collection::vec((0..PEOPLE.len(), 0..MOVES.len(), 0..PLACES.len()), 1..7);
    seeded_runner(48)
        .run(&story, |moves| {
            let sentences: Vec<String> = moves
                .iter()
                .map(|&(p, m, l)| format!("{} {} the {}.", title(PEOPLE[p]), MOVES[m], PLACES[l]))
                .collect();
            let refs: Vec<&str> = sentences.iter().map(String::as_str).collect();
            let compiled = sys.compile(&refs).unwrap();
            let program = sys.kb.with_story(compiled.prefix_rules(refs.len())).unwrap();
            let mut solver = Solver::new(&program);
            for k in 1..=moves.len() {
                for (p, person) in PEOPLE.iter().enumerate() {
                    let expected: BTreeSet<String> = moves[..k]
                        .iter()
                        .rev()
                        .find(|m| m.0 == p)
                        .map(|m| PLACES[m.2].to_string())
                        .into_iter()
                        .collect();
                    let q = parse_query(&format!("property(location,t{k},{person},L)")).unwrap();
                    let got: BTreeSet<String> = solver
                        .solve(&q)
                        .unwrap()
                        .iter()
                        .map(|a| strip_determiner(&a.get("L").unwrap().to_string()).to_string())
                        .collect();
                    prop_assert_eq!(got, expected, "{} at t{} in {:?}", person, k, sentences);
                }
            }
            Ok(())
        })
        .unwrap();
}

fn slot_values(slot: SlotName) -> &'static [&'static str] {
    match slot {
        SlotName::Cuisine => &["italian", "french", "thai"],
        SlotName::Location => &["paris", "rome", "london"],
        SlotName::PartySize => &["two", "four", "six"],
        SlotName::Price => &["cheap", "moderate", "expensive"],
    }
}

#[test]
fn missing_parameters_are_the_unfilled_slots() {
    let agent = DialogAgent::default();
    seeded_runner(64)
        .run(&prop::collection::vec(prop::option::of(0..3usize), 4), |picks| {
            let mut state = DialogState::new("p");
            for (slot, pick) in SlotName::ALL.into_iter().zip(&picks) {
                if let Some(i) = pick {
                    state.slots.set(slot, slot_values(slot)[*i], Provenance::UserStated);
                }
            }
            let expected: Vec<SlotName> =
                SlotName::ALL.into_iter().zip(&picks).filter(|(_, p)| p.is_none()).map(|(s, _)| s).collect();
            prop_assert_eq!(agent.missing_parameters(&state).unwrap(), expected);
            Ok(())
        })
        .unwrap();
}

const INGREDIENTS: [(&str, &str); 9] = [
    ("indian", "curry"),
    ("thai", "curry"),
    ("italian", "pasta"),
    ("italian", "pizza"),
    ("japanese", "sushi"),
    ("mexican", "tacos"),
    ("chinese", "noodles"),
    ("vietnamese", "noodles"),
    ("lebanese", "hummus"),
];

fn bundled_cuisines() -> Vec<String> {
    include_str!("../resources/dialog/entities.tsv")
        .lines()
        .filter_map(|l| l.strip_prefix("cuisine\t"))
        .map(|c| c.trim().to_string())
        .collect()
}

#[test]
fn suggestions_are_sound_and_complete() {
    let agent = DialogAgent::default();
    let cuisines = bundled_cuisines();
    let n = cuisines.len();
    let ingredient =
        prop::option::of(prop::sample::select(vec!["curry", "pasta", "pizza", "sushi", "tacos", "noodles", "hummus"]));
    let prefs = (
        prop::collection::btree_set(0..n, 0..4),
        prop::collection::btree_set(0..n, 0..3),
        prop::option::of(0..n),
        ingredient,
    );
    seeded_runner(64)
        .run(&prefs, |(excluded, rejected, yesterday, wanted)| {
            let mut state = DialogState::new("p");
            state.preferences.extend(excluded.iter().map(|&i| format!("excluded({})", cuisines[i])));
            state.preferences.extend(rejected.iter().map(|&i| format!("rejected({})", cuisines[i])));
            state.preferences.extend(yesterday.map(|i| format!("time(yesterday,user,{})", cuisines[i])));
            state.preferences.extend(wanted.map(|w| format!("wants_ingredient({w})")));
            let expected: BTreeSet<&str> = (0..n)
                .filter(|i| !excluded.contains(i) && !rejected.contains(i) && yesterday != Some(*i))
                .map(|i| cuisines[i].as_str())
                .filter(|c| wanted.is_none_or(|w| INGREDIENTS.contains(&(*c, w))))
                .collect();
            let got = agent.cuisine_suggestions(&state).unwrap();
            let names: BTreeSet<&str> = got.iter().map(|(c, _)| c.as_str()).collect();
            prop_assert_eq!(names, expected);
            for (_, j) in &got {
                prop_assert!(!j.is_empty());
            }
            Ok(())
        })
        .unwrap();
}

#[test]
fn yesterday_cuisine_is_not_suggested() {
    let rules = include_str!("../resources/dialog/commonsense.rules");
    let entities = "cuisine\tmexican\ncuisine\titalian\ncuisine\tchinese\nlocation\tparis\n";
    let agent = DialogAgent::new(rules, entities, Templates::bundled()).unwrap();
    let mut state = DialogState::new("y");
    state.preferences.push("time(yesterday,user,mexican)".into());
    let got: Vec<String> = agent.cuisine_suggestions(&state).unwrap().into_iter().map(|(c, _)| c).collect();
    assert_eq!(got, ["italian", "chinese"]);
}

type Row = (&'static [&'static str], &'static [&'static str], &'static [&'static str], &'static str);

#[test]
fn three_valued_truth_table() {
    let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<BTreeSet<String>>();
    // (definite, possible, negated, answer for "c")
    let table: [Row; 9] = [
        (&["c"], &[], &[], "yes"),
        (&["c"], &["c", "p"], &["c"], "yes"),
        (&[], &["c", "p"], &[], "maybe"),
        (&[], &["c"], &[], "yes"),
        (&[], &["c", "p"], &["c"], "no"),
        (&[], &["p", "k"], &[], "no"),
        (&[], &[], &["c"], "no"),
        (&["k"], &[], &[], "no"),
        (&[], &[], &[], "no"),
    ];
    for (d, p, n, want) in table {
        assert_eq!(three_valued(&set(d), &set(p), &set(n), "c"), want, "{d:?} {p:?} {n:?}");
    }
}

const UTTERANCES: [&str; 22] = [
    "hello",
    "Good morning",
    "i'd like to book a table",
    "with italian food",
    "in paris",
    "for two people",
    "in a cheap price range",
    "<SILENCE>",
    "no this does not work for me",
    "do you have something else",
    "let's do it",
    "may i have the address of the restaurant",
    "what is the phone number",
    "thanks",
    "no thank you",
    "actually i would prefer with french cuisine",
    "instead could it be in rome",
    "yes",
    "no",
    "purple monkey dishwasher",
    "i want to have curry",
    "anything, except lebanese food",
];

fn small_kb() -> Vec<(String, String, String)> {
    let mut rows = Vec::new();
    for (name, cuisine, loc, rating) in [
        ("resto_a", "italian", "paris", "7"),
        ("resto_b", "italian", "paris", "4"),
        ("resto_c", "french", "rome", "9"),
        ("resto_d", "italian", "paris", "2"),
    ] {
        for (a, v) in [
            ("R_cuisine", cuisine.to_string()),
            ("R_location", loc.to_string()),
            ("R_price", "cheap".to_string()),
            ("R_number", "two".to_string()),
            ("R_rating", rating.to_string()),
            ("R_phone", format!("{name}_phone")),
            ("R_address", format!("{name}_address")),
        ] {
            rows.push((name.to_string(), a.to_string(), v));
        }
    }
    rows
}

#[test]
fn dialog_moves_along_edges() {
    let agent = DialogAgent::default();
    seeded_runner(40)
        .run(&prop::collection::vec(0..UTTERANCES.len(), 1..16), |picks| {
            let mut state = DialogState::new("fsm").with_kb(small_kb());
            for &i in &picks {
                let before = state.clone();
                match agent.step(&mut state, UTTERANCES[i]) {
                    Ok(out) => {
                        prop_assert!(out.from.can_move_to(out.to), "{} -> {}", out.from, out.to);
                        prop_assert_eq!(state.fsm, out.to);
                        prop_assert_eq!(state.history.len(), before.history.len() + 1);
                        if out.act == "offer" || out.act == "next_option" {
                            let offered = state.current_option.clone().unwrap();
                            prop_assert!(!before.rejected_options.contains(&offered), "re-offered {}", offered);
                        }
                        if out.diagnostic.is_some() {
                            prop_assert_eq!(&state.slots, &before.slots);
                        }
                    }
                    Err(e) => {
                        prop_assert!(!matches!(e, DialogError::IllegalTransition { .. }), "{}", e);
                        prop_assert_eq!(&state, &before);
                    }
                }
            }
            Ok(())
        })
        .unwrap();
}

#[test]
fn dialog_accuracy_never_exceeds_response_accuracy() {
    let agent = DialogAgent::default();
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/smoke/dialog");
    let records = read_babi_dialog(&dir.join("dialog-babi-task1-API-calls-tst.txt")).unwrap();
    let records = &records[..6];
    let corrupt = prop::collection::vec((0..records.len(), 0..64usize), 0..6);
    seeded_runner(12)
        .run(&corrupt, |edits| {
            let mut recs = records.to_vec();
            for (d, t) in edits {
                let n = recs[d].turns.len();
                recs[d].turns[t % n].1 = "something else entirely".into();
            }
            let rep = run_dialog_task(1, false, &recs, &agent).unwrap();
            prop_assert!(rep.per_dialog_accuracy <= rep.per_response_accuracy + 1e-9);
            prop_assert_eq!(rep.illegal_transitions, 0);
            Ok(())
        })
        .unwrap();
}
