//! Seeded oracle equivalence checks: the partial tree matcher against
//! brute-force enumeration, the role climb against an ancestor scan, and the
//! goal-directed solver against a bottom-up stratified fixpoint.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use denotate::engine::{parse_query, parse_rules, Program, Solver, Term};
use denotate::lexicon::{SlotCat, SyntaxSlot};
use denotate::semgen::{get_matching, thematic_roles_at};
use denotate::syntax::{NodeId, ParseTree, Pos, Shape};

use super::{seeded_runner, tree_shape};

// Brute-force matcher: enumerate every order-preserving placement of the
// slots over the unit sequence and keep the lexicographically first valid one.

fn oracle_units(t: &ParseTree, root: NodeId, out: &mut Vec<NodeId>) {
    for &c in t.children(root) {
        if t.category(c) == "NP" || t.is_leaf(c) {
            out.push(c);
        } else {
            oracle_units(t, c, out);
        }
    }
}

fn pos(t: &ParseTree, id: NodeId) -> Option<Pos> {
    t.token(id).map(|k| k.pos)
}

fn is_np(t: &ParseTree, id: NodeId) -> bool {
    t.category(id) == "NP"
}

fn can_skip(t: &ParseTree, id: NodeId, next: &SyntaxSlot) -> bool {
    !is_np(t, id)
        && match pos(t, id) {
            Some(Pos::Det | Pos::Punct | Pos::Adv) => true,
            Some(Pos::Prep) => next.cat == SlotCat::NP,
            _ => false,
        }
}

/// Width and bound value of `slot` placed at unit `i`.
fn place(t: &ParseTree, us: &[NodeId], i: usize, slot: &SyntaxSlot, verb: NodeId) -> Option<(usize, Option<String>)> {
    let id = us[i];
    let lemma = t.token(id).map(|k| k.lemma.clone());
    let lit = slot.literal.as_ref().is_none_or(|l| lemma.as_deref() == Some(l.as_str()));
    match slot.cat {
        SlotCat::NP if is_np(t, id) => Some((1, Some(t.normalized(id)))),
        SlotCat::V if id == verb => Some((1, None)),
        SlotCat::PP if !is_np(t, id) && pos(t, id) == Some(Pos::Prep) && lit => {
            let np = *us.get(i + 1)?;
            is_np(t, np).then(|| (2, Some(t.normalized(np))))
        }
        SlotCat::PREP if !is_np(t, id) && pos(t, id) == Some(Pos::Prep) && lit => Some((1, None)),
        SlotCat::ADV if !is_np(t, id) && pos(t, id) == Some(Pos::Adv) && lit => Some((1, lemma)),
        SlotCat::LEX if t.is_leaf(id) && lit => Some((1, None)),
        _ => None,
    }
}

type Placement = (Vec<usize>, BTreeMap<String, String>);

fn brute_force(t: &ParseTree, root: NodeId, slots: &[SyntaxSlot], verb: NodeId) -> Option<Placement> {
    if t.is_leaf(root) {
        return None;
    }
    let mut us = Vec::new();
    oracle_units(t, root, &mut us);
    let mut all: Vec<Vec<usize>> = Vec::new();
    fn combos(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            combos(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    combos(us.len(), slots.len(), 0, &mut Vec::new(), &mut all);
    all.into_iter().find_map(|positions| {
        let mut end = 0;
        let mut roles = BTreeMap::new();
        for (slot, &p) in slots.iter().zip(&positions) {
            if p < end || !(end..p).all(|g| can_skip(t, us[g], slot)) {
                return None;
            }
            let (w, v) = place(t, &us, p, slot, verb)?;
            if let (Some(r), Some(v)) = (&slot.role, v) {
                roles.insert(r.clone(), v);
            }
            end = p + w;
        }
        Some((positions, roles))
    })
}

fn slot_strategy() -> impl Strategy<Value = SyntaxSlot> {
    let lit = |xs: &'static [&'static str]| prop::option::of(prop::sample::select(xs.to_vec()));
    prop_oneof![
        3 => (0..3u8).prop_map(|r| SyntaxSlot::np(&format!("r{r}"))),
        2 => Just(SyntaxSlot::v()),
        1 => lit(&["to", "in"]).prop_map(|l| SyntaxSlot::pp("dest", l)),
        1 => prop::sample::select(vec!["to", "in"])
            .prop_map(|l| SyntaxSlot { cat: SlotCat::PREP, role: None, literal: Some(l.into()) }),
        1 => (prop::bool::ANY, lit(&["there", "up"]))
            .prop_map(|(r, l)| SyntaxSlot { cat: SlotCat::ADV, role: r.then(|| "manner".into()), literal: l.map(str::to_string) }),
        1 => prop::sample::select(vec!["red", "she", "."])
            .prop_map(|l| SyntaxSlot { cat: SlotCat::LEX, role: None, literal: Some(l.into()) }),
    ]
}

fn verb_leaf(t: &ParseTree, pick: usize) -> NodeId {
    let verbs: Vec<NodeId> = t.leaves().into_iter().filter(|&l| pos(t, l) == Some(Pos::Verb)).collect();
    verbs[pick % verbs.len()]
}

/// Seeded comparison of the partial tree matcher with brute force.
pub fn check_matcher(cases: u32) -> Result<(), String> {
    let strategy = (tree_shape(), prop::collection::vec(slot_strategy(), 1..=5), any::<usize>(), any::<usize>());
    let matched = std::cell::Cell::new(0usize);
    seeded_runner(cases)
        .run(&strategy, |(shape, slots, pick, at): (Shape, Vec<SyntaxSlot>, usize, usize)| {
            let t = ParseTree::from_shape(shape);
            let verb = verb_leaf(&t, pick);
            let branches: Vec<NodeId> = t.ids().filter(|&i| !t.is_leaf(i)).collect();
            let root = branches[at % branches.len()];
            let got = get_matching(&t, root, &slots, verb).map(|m| (m.positions, m.roles));
            let want = brute_force(&t, root, &slots, verb);
            matched.set(matched.get() + got.is_some() as usize);
            prop_assert_eq!(got, want);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    // The generator must exercise both outcomes.
    if matched.get() * 50 < cases as usize {
        return Err(format!("only {} matches", matched.get()));
    }
    Ok(())
}

pub fn check_role_climb(cases: u32) -> Result<(), String> {
    let strategy = (tree_shape(), prop::collection::vec(slot_strategy(), 1..=4), any::<usize>());
    seeded_runner(cases)
        .run(&strategy, |(shape, slots, pick): (Shape, Vec<SyntaxSlot>, usize)| {
            let t = ParseTree::from_shape(shape);
            let verb = verb_leaf(&t, pick);
            let want =
                t.ancestors(verb).into_iter().find_map(|a| brute_force(&t, a, &slots, verb).map(|(p, r)| (a, p, r)));
            let got = thematic_roles_at(&t, &slots, verb).map(|m| (m.level, m.positions, m.roles));
            prop_assert_eq!(got, want);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

// Random stratified programs. Predicate p_i may use p_j (j ≤ i) positively
// and p_j (j < i) under negation, so index order is a valid stratification.

const PREDS: usize = 5;
const CONSTS: [&str; 3] = ["a", "b", "c"];
const VARS: [&str; 3] = ["X", "Y", "Z"];

#[derive(Clone, Debug)]
enum Arg {
    Var(usize),
    Const(usize),
}

#[derive(Clone, Debug)]
struct Lit {
    pred: usize,
    args: Vec<Arg>,
}

#[derive(Clone, Debug)]
struct GenRule {
    head: Lit,
    pos: Vec<Lit>,
    neg: Vec<Lit>,
    neq: Option<(usize, usize)>,
}

struct GenProgram {
    arity: Vec<usize>,
    facts: Vec<(usize, Vec<usize>)>,
    rules: Vec<GenRule>,
}

fn gen_program(seed: u64) -> GenProgram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let arity: Vec<usize> = (0..PREDS).map(|_| rng.gen_range(1..=2)).collect();
    let mut facts = Vec::new();
    for (p, &a) in arity.iter().enumerate() {
        // One fact per predicate keeps every predicate defined.
        let n = if p < 2 { rng.gen_range(1..6) } else { rng.gen_range(0..2) };
        for _ in 0..n.max(1) {
            facts.push((p, (0..a).map(|_| rng.gen_range(0..CONSTS.len())).collect()));
        }
    }
    let mut rules = Vec::new();
    for head in 0..PREDS {
        for _ in 0..rng.gen_range(0..=3) {
            let pos: Vec<Lit> = (0..rng.gen_range(1..=3))
                .map(|_| {
                    let pred = rng.gen_range(0..=head);
                    let args = (0..arity[pred])
                        .map(|_| {
                            if rng.gen_bool(0.8) {
                                Arg::Var(rng.gen_range(0..VARS.len()))
                            } else {
                                Arg::Const(rng.gen_range(0..3))
                            }
                        })
                        .collect();
                    Lit { pred, args }
                })
                .collect();
            let bound: Vec<usize> = {
                let mut b: Vec<usize> = pos
                    .iter()
                    .flat_map(|l| l.args.iter())
                    .filter_map(|a| if let Arg::Var(v) = a { Some(*v) } else { None })
                    .collect();
                b.sort();
                b.dedup();
                b
            };
            let pick = |rng: &mut ChaCha8Rng| {
                if !bound.is_empty() && rng.gen_bool(0.8) {
                    Arg::Var(bound[rng.gen_range(0..bound.len())])
                } else {
                    Arg::Const(rng.gen_range(0..3))
                }
            };
            let head_lit = Lit { pred: head, args: (0..arity[head]).map(|_| pick(&mut rng)).collect() };
            let neg = if head > 0 && rng.gen_bool(0.5) {
                let pred = rng.gen_range(0..head);
                vec![Lit { pred, args: (0..arity[pred]).map(|_| pick(&mut rng)).collect() }]
            } else {
                Vec::new()
            };
            let neq = (bound.len() >= 2 && rng.gen_bool(0.2)).then(|| (bound[0], bound[1]));
            rules.push(GenRule { head: head_lit, pos, neg, neq });
        }
    }
    GenProgram { arity, facts, rules }
}

fn lit_text(l: &Lit) -> String {
    let args: Vec<String> = l
        .args
        .iter()
        .map(|a| match a {
            Arg::Var(v) => VARS[*v].to_string(),
            Arg::Const(c) => CONSTS[*c].to_string(),
        })
        .collect();
    format!("p{}({})", l.pred, args.join(","))
}

fn program_text(g: &GenProgram) -> String {
    let mut out = String::new();
    for (p, args) in &g.facts {
        let a: Vec<&str> = args.iter().map(|&c| CONSTS[c]).collect();
        out += &format!("p{p}({}).\n", a.join(","));
    }
    for r in &g.rules {
        let mut body: Vec<String> = r.pos.iter().map(lit_text).collect();
        body.extend(r.neg.iter().map(|l| format!("not {}", lit_text(l))));
        if let Some((x, y)) = r.neq {
            body.push(format!("{} \\= {}", VARS[x], VARS[y]));
        }
        out += &format!("{} :- {}.\n", lit_text(&r.head), body.join(", "));
    }
    out
}

type Model = Vec<BTreeSet<Vec<usize>>>;

fn ground(l: &Lit, env: &[Option<usize>; 3]) -> Option<Vec<usize>> {
    l.args
        .iter()
        .map(|a| match a {
            Arg::Var(v) => env[*v],
            Arg::Const(c) => Some(*c),
        })
        .collect()
}

fn extend(l: &Lit, tuple: &[usize], env: &[Option<usize>; 3]) -> Option<[Option<usize>; 3]> {
    let mut e = *env;
    for (a, &c) in l.args.iter().zip(tuple) {
        match a {
            Arg::Const(k) if *k != c => return None,
            Arg::Var(v) => match e[*v] {
                Some(x) if x != c => return None,
                _ => e[*v] = Some(c),
            },
            _ => {}
        }
    }
    Some(e)
}

fn fire(r: &GenRule, model: &Model, i: usize, env: [Option<usize>; 3], out: &mut Vec<Vec<usize>>) {
    match r.pos.get(i) {
        Some(l) => {
            for t in &model[l.pred] {
                if let Some(e) = extend(l, t, &env) {
                    fire(r, model, i + 1, e, out);
                }
            }
        }
        None => {
            if let Some((x, y)) = r.neq {
                if env[x] == env[y] {
                    return;
                }
            }
            if r.neg.iter().any(|l| ground(l, &env).is_some_and(|t| model[l.pred].contains(&t))) {
                return;
            }
            out.extend(ground(&r.head, &env));
        }
    }
}

fn bottom_up(g: &GenProgram) -> Model {
    let mut model: Model = vec![BTreeSet::new(); PREDS];
    for (p, args) in &g.facts {
        model[*p].insert(args.clone());
    }
    for stratum in 0..PREDS {
        loop {
            let mut new = Vec::new();
            for r in g.rules.iter().filter(|r| r.head.pred == stratum) {
                fire(r, &model, 0, [None; 3], &mut new);
            }
            let before = model[stratum].len();
            model[stratum].extend(new);
            if model[stratum].len() == before {
                break;
            }
        }
    }
    model
}

fn atom_index(t: &Term) -> usize {
    CONSTS.iter().position(|c| Some(*c) == t.as_atom()).expect("constant answer")
}

pub fn check_solver(cases: u32) -> Result<(), String> {
    seeded_runner(cases)
        .run(&any::<u64>(), |seed| {
            let g = gen_program(seed);
            let text = program_text(&g);
            let program = Program::new(parse_rules(&text).unwrap()).unwrap();
            let model = bottom_up(&g);
            let mut solver = Solver::new(&program);
            for (p, &a) in g.arity.iter().enumerate() {
                let vars: Vec<String> = (0..a).map(|i| format!("A{i}")).collect();
                let q = parse_query(&format!("p{p}({})", vars.join(","))).unwrap();
                let got: BTreeSet<Vec<usize>> = solver
                    .solve(&q)
                    .unwrap()
                    .iter()
                    .map(|ans| vars.iter().map(|v| atom_index(ans.get(v).unwrap())).collect())
                    .collect();
                prop_assert_eq!(&got, &model[p], "p{} in\n{}", p, text);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}
