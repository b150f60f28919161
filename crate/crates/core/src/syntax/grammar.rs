//! Context-free grammar over part-of-speech terminals.
//!
//! ```text
//! %start SQ SBARQ S
//! S  -> ADVP? NP VP PUNCT? | VP PUNCT
//! VP -> V 'either' PP 'or' NP
//!     | V ADV* PP ADV?
//! FRAG -> ( NP | V | ADV )+
//! ```
//!
//! Terminals are the part-of-speech names (`V` for verbs) and quoted
//! lemmas. Alternatives are tried in order and the first complete parse
//! wins. Left-recursive grammars are rejected at load time.

use std::collections::{BTreeSet, HashMap};

use super::token::{Pos, Token};
use super::tree::{ParseTree, Shape};
use super::SyntaxError;

const BUNDLED_GRAMMAR: &str = include_str!("../../resources/grammar/controlled.cfg");

/// Upper bound on terminal match attempts for one sentence.
const STEP_BUDGET: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Atom {
    Terminal(Pos),
    Literal(String),
    NonTerminal(usize),
    Group(Vec<Vec<Item>>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Rep {
    One,
    Opt,
    Star,
    Plus,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Item {
    atom: Atom,
    rep: Rep,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grammar {
    names: Vec<String>,
    index: HashMap<String, usize>,
    rules: Vec<Vec<Vec<Item>>>,
    starts: Vec<usize>,
}

fn terminal(name: &str) -> Option<Pos> {
    match name {
        "V" => Some(Pos::Verb),
        other => other.parse().ok(),
    }
}

#[derive(Clone, Debug, PartialEq)]
enum RhsTok {
    Ident(String),
    Lit(String),
    Sym(char),
}

fn lex_rhs(text: &str, line: usize) -> Result<Vec<RhsTok>, SyntaxError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if matches!(c, '|' | '(' | ')' | '?' | '*' | '+') {
            out.push(RhsTok::Sym(c));
            chars.next();
        } else if c == '\'' {
            chars.next();
            let mut lit = String::new();
            loop {
                match chars.next() {
                    Some('\'') => break,
                    Some(ch) => lit.push(ch),
                    None => return Err(SyntaxError::GrammarFormat { line, msg: "unterminated literal".into() }),
                }
            }
            out.push(RhsTok::Lit(lit.to_lowercase()));
        } else if c.is_alphanumeric() || c == '_' {
            let mut id = String::new();
            while let Some(&ch) = chars.peek() {
                if ch.is_alphanumeric() || ch == '_' {
                    id.push(ch);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(RhsTok::Ident(id));
        } else {
            return Err(SyntaxError::GrammarFormat { line, msg: format!("unexpected character {c:?}") });
        }
    }
    Ok(out)
}

struct RhsParser<'a> {
    toks: Vec<RhsTok>,
    pos: usize,
    index: &'a HashMap<String, usize>,
    line: usize,
}

impl RhsParser<'_> {
    fn err(&self, msg: impl Into<String>) -> SyntaxError {
        SyntaxError::GrammarFormat { line: self.line, msg: msg.into() }
    }

    fn alternatives(&mut self) -> Result<Vec<Vec<Item>>, SyntaxError> {
        let mut alts = vec![self.sequence()?];
        while self.toks.get(self.pos) == Some(&RhsTok::Sym('|')) {
            self.pos += 1;
            alts.push(self.sequence()?);
        }
        Ok(alts)
    }

    fn sequence(&mut self) -> Result<Vec<Item>, SyntaxError> {
        let mut items = Vec::new();
        loop {
            let atom = match self.toks.get(self.pos).cloned() {
                Some(RhsTok::Ident(id)) => {
                    self.pos += 1;
                    if let Some(&n) = self.index.get(&id) {
                        Atom::NonTerminal(n)
                    } else if let Some(p) = terminal(&id) {
                        Atom::Terminal(p)
                    } else {
                        return Err(self.err(format!("undefined symbol `{id}`")));
                    }
                }
                Some(RhsTok::Lit(w)) => {
                    self.pos += 1;
                    Atom::Literal(w)
                }
                Some(RhsTok::Sym('(')) => {
                    self.pos += 1;
                    let alts = self.alternatives()?;
                    if self.toks.get(self.pos) != Some(&RhsTok::Sym(')')) {
                        return Err(self.err("expected `)`"));
                    }
                    self.pos += 1;
                    Atom::Group(alts)
                }
                _ => break,
            };
            let rep = match self.toks.get(self.pos) {
                Some(RhsTok::Sym('?')) => Rep::Opt,
                Some(RhsTok::Sym('*')) => Rep::Star,
                Some(RhsTok::Sym('+')) => Rep::Plus,
                _ => Rep::One,
            };
            if rep != Rep::One {
                self.pos += 1;
            }
            items.push(Item { atom, rep });
        }
        if items.is_empty() {
            return Err(self.err("empty alternative"));
        }
        Ok(items)
    }
}

impl Grammar {
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_GRAMMAR).expect("bundled grammar is valid")
    }

    pub fn parse(text: &str) -> Result<Self, SyntaxError> {
        // First pass: gather rule bodies, joining `|` continuation lines.
        let mut bodies: Vec<(String, usize, String)> = Vec::new();
        let mut start_names: Vec<(String, usize)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("%start") {
                start_names.extend(rest.split_whitespace().map(|s| (s.to_string(), line_no)));
            } else if line.starts_with('|') {
                let Some(last) = bodies.last_mut() else {
                    return Err(SyntaxError::GrammarFormat {
                        line: line_no,
                        msg: "continuation without a rule".into(),
                    });
                };
                last.2.push(' ');
                last.2.push_str(line);
            } else if let Some((lhs, rhs)) = line.split_once("->") {
                let lhs = lhs.trim();
                if lhs.is_empty() || !lhs.chars().all(|c| c.is_alphanumeric() || c == '_') || terminal(lhs).is_some() {
                    return Err(SyntaxError::GrammarFormat {
                        line: line_no,
                        msg: format!("bad left-hand side `{lhs}`"),
                    });
                }
                bodies.push((lhs.to_string(), line_no, rhs.trim().to_string()));
            } else {
                return Err(SyntaxError::GrammarFormat { line: line_no, msg: "expected `LHS -> RHS`".into() });
            }
        }
        let mut names = Vec::new();
        let mut index = HashMap::new();
        for (lhs, _, _) in &bodies {
            if !index.contains_key(lhs) {
                index.insert(lhs.clone(), names.len());
                names.push(lhs.clone());
            }
        }
        let mut rules = vec![Vec::new(); names.len()];
        for (lhs, line, rhs) in &bodies {
            let mut p = RhsParser { toks: lex_rhs(rhs, *line)?, pos: 0, index: &index, line: *line };
            let alts = p.alternatives()?;
            if p.pos != p.toks.len() {
                return Err(p.err("trailing symbols"));
            }
            rules[index[lhs]].extend(alts);
        }
        let mut starts = Vec::new();
        for (s, line) in start_names {
            let n = *index
                .get(&s)
                .ok_or_else(|| SyntaxError::GrammarFormat { line, msg: format!("start symbol `{s}` has no rules") })?;
            starts.push(n);
        }
        if starts.is_empty() && !names.is_empty() {
            starts.push(0);
        }
        let g = Grammar { names, index, rules, starts };
        g.check_left_recursion()?;
        Ok(g)
    }

    pub fn start_symbols(&self) -> Vec<&str> {
        self.starts.iter().map(|&s| self.names[s].as_str()).collect()
    }

    pub fn has_symbol(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    fn nullable_items(&self, items: &[Item], nullable: &[bool]) -> bool {
        items.iter().all(|it| self.item_nullable(it, nullable))
    }

    fn item_nullable(&self, it: &Item, nullable: &[bool]) -> bool {
        matches!(it.rep, Rep::Opt | Rep::Star)
            || match &it.atom {
                Atom::NonTerminal(n) => nullable[*n],
                Atom::Group(alts) => alts.iter().any(|a| self.nullable_items(a, nullable)),
                _ => false,
            }
    }

    fn left_corners(&self, items: &[Item], nullable: &[bool], out: &mut BTreeSet<usize>) {
        for it in items {
            match &it.atom {
                Atom::NonTerminal(n) => {
                    out.insert(*n);
                }
                Atom::Group(alts) => {
                    for a in alts {
                        self.left_corners(a, nullable, out);
                    }
                }
                _ => {}
            }
            if !self.item_nullable(it, nullable) {
                break;
            }
        }
    }

    fn check_left_recursion(&self) -> Result<(), SyntaxError> {
        let n = self.names.len();
        let mut nullable = vec![false; n];
        loop {
            let mut changed = false;
            for i in 0..n {
                if !nullable[i] && self.rules[i].iter().any(|a| self.nullable_items(a, &nullable)) {
                    nullable[i] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let corners: Vec<BTreeSet<usize>> = (0..n)
            .map(|i| {
                let mut s = BTreeSet::new();
                for a in &self.rules[i] {
                    self.left_corners(a, &nullable, &mut s);
                }
                s
            })
            .collect();
        for start in 0..n {
            let mut seen = vec![false; n];
            let mut stack: Vec<usize> = corners[start].iter().copied().collect();
            while let Some(x) = stack.pop() {
                if x == start {
                    return Err(SyntaxError::LeftRecursion(self.names[start].clone()));
                }
                if !std::mem::replace(&mut seen[x], true) {
                    stack.extend(corners[x].iter().copied());
                }
            }
        }
        Ok(())
    }

    /// Parses with the declared start symbols, in order.
    pub fn parse_tokens(&self, tokens: &[Token]) -> Result<ParseTree, SyntaxError> {
        self.parse_with(tokens, &self.starts)
    }

    /// Parses with one named start symbol (e.g. `FRAG`).
    pub fn parse_as(&self, tokens: &[Token], start: &str) -> Result<ParseTree, SyntaxError> {
        let s = *self.index.get(start).ok_or_else(|| SyntaxError::UnknownSymbol(start.to_string()))?;
        self.parse_with(tokens, &[s])
    }

    fn parse_with(&self, tokens: &[Token], starts: &[usize]) -> Result<ParseTree, SyntaxError> {
        if tokens.is_empty() {
            return Err(SyntaxError::EmptyInput);
        }
        let mut run = Run { g: self, toks: tokens, furthest: 0, steps: 0 };
        let mut found = None;
        for &s in starts {
            let n = tokens.len();
            let ok = run.nonterminal(s, 0, &mut |run, end, shape| {
                if end == n {
                    found = Some(shape);
                    true
                } else {
                    run.furthest = run.furthest.max(end);
                    false
                }
            });
            if ok {
                break;
            }
        }
        match found {
            Some(shape) => Ok(ParseTree::from_shape(shape)),
            None => {
                let index = run.furthest.min(tokens.len() - 1);
                Err(SyntaxError::UnparsableSentence { index, token: tokens[index].surface.clone() })
            }
        }
    }

    /// Recognizer: true when every internal node expands by some rule and the
    /// root is labeled with a grammar symbol.
    pub fn derives(&self, tree: &ParseTree) -> bool {
        let root = tree.root();
        !tree.is_leaf(root) && tree.ids().filter(|&id| !tree.is_leaf(id)).all(|id| self.node_derives(tree, id))
    }

    fn node_derives(&self, tree: &ParseTree, id: usize) -> bool {
        let Some(&nt) = self.index.get(tree.label(id)) else { return false };
        let kids = tree.children(id);
        self.rules[nt].iter().any(|alt| self.seq_ends(alt, tree, kids, 0).contains(&kids.len()))
    }

    fn seq_ends(&self, items: &[Item], tree: &ParseTree, kids: &[usize], at: usize) -> BTreeSet<usize> {
        let mut cur = BTreeSet::from([at]);
        for it in items {
            let mut next = BTreeSet::new();
            for &p in &cur {
                if matches!(it.rep, Rep::Opt | Rep::Star) {
                    next.insert(p);
                }
                if matches!(it.rep, Rep::Star | Rep::Plus) {
                    let mut frontier = self.atom_ends(&it.atom, tree, kids, p);
                    while !frontier.is_empty() {
                        let mut grow = BTreeSet::new();
                        for &q in &frontier {
                            if next.insert(q) {
                                grow.extend(self.atom_ends(&it.atom, tree, kids, q));
                            }
                        }
                        frontier = grow;
                    }
                } else {
                    next.extend(self.atom_ends(&it.atom, tree, kids, p));
                }
            }
            cur = next;
        }
        cur
    }

    fn atom_ends(&self, atom: &Atom, tree: &ParseTree, kids: &[usize], at: usize) -> BTreeSet<usize> {
        let hit = |ok: bool| if ok { BTreeSet::from([at + 1]) } else { BTreeSet::new() };
        let Some(&kid) = kids.get(at) else {
            return match atom {
                Atom::Group(_) => self.atom_group_ends(atom, tree, kids, at),
                _ => BTreeSet::new(),
            };
        };
        match atom {
            Atom::Terminal(p) => hit(tree.token(kid).is_some_and(|t| t.pos == *p) && tree.label(kid) == p.leaf_label()),
            Atom::Literal(w) => hit(tree.token(kid).is_some_and(|t| &t.lemma == w)),
            Atom::NonTerminal(n) => hit(!tree.is_leaf(kid) && tree.label(kid) == self.names[*n]),
            Atom::Group(_) => self.atom_group_ends(atom, tree, kids, at),
        }
    }

    fn atom_group_ends(&self, atom: &Atom, tree: &ParseTree, kids: &[usize], at: usize) -> BTreeSet<usize> {
        let Atom::Group(alts) = atom else { return BTreeSet::new() };
        alts.iter().flat_map(|a| self.seq_ends(a, tree, kids, at)).collect()
    }
}

type Cont<'k, 'g> = &'k mut dyn FnMut(&mut Run<'g>, usize, Vec<Shape>) -> bool;

struct Run<'g> {
    g: &'g Grammar,
    toks: &'g [Token],
    furthest: usize,
    steps: usize,
}

impl<'g> Run<'g> {
    fn nonterminal(&mut self, nt: usize, pos: usize, k: &mut dyn FnMut(&mut Run<'g>, usize, Shape) -> bool) -> bool {
        let g = self.g;
        let name = &g.names[nt];
        for alt in &g.rules[nt] {
            let mut acc = Vec::new();
            let ok = self.seq(alt, pos, &mut acc, &mut |run, end, kids| k(run, end, Shape::Branch(name.clone(), kids)));
            if ok {
                return true;
            }
        }
        false
    }

    fn seq(&mut self, items: &'g [Item], pos: usize, acc: &mut Vec<Shape>, k: Cont<'_, 'g>) -> bool {
        let Some((first, rest)) = items.split_first() else {
            return k(self, pos, acc.clone());
        };
        self.item(first, pos, &mut |run, end, shapes| {
            let mark = acc.len();
            acc.extend(shapes);
            let ok = run.seq(rest, end, acc, k);
            acc.truncate(mark);
            ok
        })
    }

    fn item(&mut self, it: &'g Item, pos: usize, k: Cont<'_, 'g>) -> bool {
        match it.rep {
            Rep::One => self.atom(&it.atom, pos, k),
            Rep::Opt => self.atom(&it.atom, pos, k) || k(self, pos, Vec::new()),
            Rep::Star => self.star(&it.atom, pos, k),
            Rep::Plus => self.atom(&it.atom, pos, &mut |run, end, shapes| {
                run.star(&it.atom, end, &mut |run, end2, more| {
                    let mut all = shapes.clone();
                    all.extend(more);
                    k(run, end2, all)
                })
            }),
        }
    }

    /// Greedy repetition: more matches are tried before fewer.
    fn star(&mut self, atom: &'g Atom, pos: usize, k: Cont<'_, 'g>) -> bool {
        let more = self.atom(atom, pos, &mut |run, end, shapes| {
            if end == pos {
                return false;
            }
            run.star(atom, end, &mut |run, end2, rest| {
                let mut all = shapes.clone();
                all.extend(rest);
                k(run, end2, all)
            })
        });
        more || k(self, pos, Vec::new())
    }

    fn atom(&mut self, atom: &'g Atom, pos: usize, k: Cont<'_, 'g>) -> bool {
        self.steps += 1;
        if self.steps > STEP_BUDGET {
            return false;
        }
        match atom {
            Atom::Terminal(p) => match self.toks.get(pos) {
                Some(t) if t.pos == *p => k(self, pos + 1, vec![Shape::Leaf(p.leaf_label().to_string(), t.clone())]),
                _ => {
                    self.furthest = self.furthest.max(pos);
                    false
                }
            },
            Atom::Literal(w) => match self.toks.get(pos) {
                Some(t) if &t.lemma == w => {
                    k(self, pos + 1, vec![Shape::Leaf(t.pos.leaf_label().to_string(), t.clone())])
                }
                _ => {
                    self.furthest = self.furthest.max(pos);
                    false
                }
            },
            Atom::NonTerminal(n) => self.nonterminal(*n, pos, &mut |run, end, shape| k(run, end, vec![shape])),
            Atom::Group(alts) => {
                for alt in alts {
                    let mut acc = Vec::new();
                    if self.seq(alt, pos, &mut acc, k) {
                        return true;
                    }
                }
                false
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{tokenize, write_bracketed, Vocabulary};

    fn parse(s: &str) -> Result<ParseTree, SyntaxError> {
        let v = Vocabulary::bundled();
        Grammar::bundled().parse_tokens(&tokenize(s, &v).unwrap())
    }

    #[test]
    fn grabbed_sentence() {
        let t = parse("John grabbed the apple there.").unwrap();
        assert_eq!(
            write_bracketed(&t),
            "(S (NP (PROPN John)) (VP (V grabbed) (NP (DET the) (NOUN apple)) (ADV there)) (PUNCT .))"
        );
    }

    #[test]
    fn yes_no_question() {
        let t = parse("Is Fred in the cinema?").unwrap();
        assert_eq!(
            write_bracketed(&t),
            "(SQ (V Is) (NP (PROPN Fred)) (PP (PREP in) (NP (DET the) (NOUN cinema))) (PUNCT ?))"
        );
    }

    #[test]
    fn out_of_grammar() {
        let e = parse("colorless ideas sleep furiously quickly oddly").unwrap_err();
        assert!(matches!(e, SyntaxError::UnparsableSentence { .. }), "{e:?}");
    }

    #[test]
    fn story_shapes_parse_and_derive() {
        let g = Grammar::bundled();
        let v = Vocabulary::bundled();
        for s in [
            "John moved to the bedroom.",
            "John got the football there.",
            "John picked up the milk there.",
            "John gave the apple to Mary.",
            "John left the football.",
            "Fred went back to the bedroom.",
            "Mary is in the kitchen.",
            "Fred is either in the cinema or the park.",
            "Julie is no longer in the school.",
            "Daniel is not in the bathroom.",
            "After that she moved to the hallway.",
            "Following that he went to the office.",
            "Then she journeyed to the garden.",
            "Afterwards she went back to the kitchen.",
            "Where is Mary?",
            "Where is the football?",
            "Where was the football before the kitchen?",
            "How many objects is John carrying?",
            "What is Daniel carrying?",
            "What did Fred give to Bill?",
            "Who gave the football to Bill?",
            "Who received the football?",
            "Who did Fred give the football to?",
            "Who gave the football?",
            "Bill gave Mary the apple.",
            "Run!",
        ] {
            let t = g.parse_tokens(&tokenize(s, &v).unwrap()).unwrap_or_else(|e| panic!("{s}: {e}"));
            assert!(g.derives(&t), "{s}");
            let leaves: Vec<String> = t.tokens().iter().map(|t| t.surface.clone()).collect();
            let toks: Vec<String> = tokenize(s, &v).unwrap().into_iter().map(|t| t.surface).collect();
            assert_eq!(leaves, toks);
        }
    }

    #[test]
    fn frag_chunks_dialog_turns() {
        let g = Grammar::bundled();
        let v = Vocabulary::bundled();
        let toks = tokenize("can you book a table for six people with french food", &v).unwrap();
        let t = g.parse_as(&toks, "FRAG").unwrap();
        assert_eq!(t.label(t.root()), "FRAG");
        assert!(g.derives(&t));
    }

    #[test]
    fn rejects_left_recursion() {
        assert_eq!(Grammar::parse("A -> A NOUN | NOUN"), Err(SyntaxError::LeftRecursion("A".into())));
        assert_eq!(Grammar::parse("A -> B? A NOUN\nB -> DET"), Err(SyntaxError::LeftRecursion("A".into())));
        assert!(matches!(Grammar::parse("A -> FOO"), Err(SyntaxError::GrammarFormat { line: 1, .. })));
    }

    #[test]
    fn tampered_tree_not_derived() {
        let g = Grammar::bundled();
        let t = parse("Mary is in the kitchen.").unwrap();
        let bad =
            crate::syntax::read_bracketed(&write_bracketed(&t).replace("(VP", "(PP"), &Vocabulary::bundled()).unwrap();
        assert!(!g.derives(&bad));
    }
}
