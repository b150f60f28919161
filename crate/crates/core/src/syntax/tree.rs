use std::fmt;

use super::token::{Pos, Token, Vocabulary};
use super::SyntaxError;

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Node {
    pub label: String,
    pub children: Vec<NodeId>,
    pub token: Option<Token>,
    pub parent: Option<NodeId>,
}

/// Constituency tree stored as a preorder arena; node 0 is the root.
///
/// Leaves carry a token and no children. Token indices are renumbered in leaf
/// order whenever a tree is built, so they are always consecutive from 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParseTree {
    nodes: Vec<Node>,
}

/// Owned recursive form used to build and rewrite trees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    Leaf(String, Token),
    Branch(String, Vec<Shape>),
}

impl Shape {
    pub fn label(&self) -> &str {
        match self {
            Shape::Leaf(l, _) | Shape::Branch(l, _) => l,
        }
    }
}

impl ParseTree {
    pub fn from_shape(shape: Shape) -> ParseTree {
        let mut t = ParseTree { nodes: Vec::new() };
        let mut next_index = 0;
        t.push_shape(shape, None, &mut next_index);
        t
    }

    fn push_shape(&mut self, shape: Shape, parent: Option<NodeId>, next_index: &mut usize) -> NodeId {
        let id = self.nodes.len();
        match shape {
            Shape::Leaf(label, mut token) => {
                token.index = *next_index;
                *next_index += 1;
                self.nodes.push(Node { label, children: Vec::new(), token: Some(token), parent });
            }
            Shape::Branch(label, kids) => {
                self.nodes.push(Node { label, children: Vec::new(), token: None, parent });
                for k in kids {
                    let c = self.push_shape(k, Some(id), next_index);
                    self.nodes[id].children.push(c);
                }
            }
        }
        id
    }

    pub fn leaf(label: &str, token: Token) -> ParseTree {
        Self::from_shape(Shape::Leaf(label.to_string(), token))
    }

    pub fn branch(label: &str, children: Vec<ParseTree>) -> ParseTree {
        Self::from_shape(Shape::Branch(label.to_string(), children.iter().map(|c| c.shape(c.root())).collect()))
    }

    pub fn shape(&self, id: NodeId) -> Shape {
        let n = &self.nodes[id];
        match &n.token {
            Some(tok) => Shape::Leaf(n.label.clone(), tok.clone()),
            None => Shape::Branch(n.label.clone(), n.children.iter().map(|&c| self.shape(c)).collect()),
        }
    }

    /// Copy of the subtree rooted at `id`.
    pub fn subtree(&self, id: NodeId) -> ParseTree {
        Self::from_shape(self.shape(id))
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn label(&self, id: NodeId) -> &str {
        &self.nodes[id].label
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id].children
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id].parent
    }

    pub fn token(&self, id: NodeId) -> Option<&Token> {
        self.nodes[id].token.as_ref()
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        self.nodes[id].token.is_some()
    }

    /// Label without function tags, so `NP-SBJ` reads as `NP`.
    pub fn category(&self, id: NodeId) -> &str {
        let l = &self.nodes[id].label;
        match l.split(['-', '=']).next() {
            Some(b) if !b.is_empty() => b,
            _ => l,
        }
    }

    /// Leaf ids under `id`, left to right.
    pub fn leaves_under(&self, id: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(n) = stack.pop() {
            if self.is_leaf(n) {
                out.push(n);
            } else {
                stack.extend(self.children(n).iter().rev());
            }
        }
        out
    }

    pub fn leaves(&self) -> Vec<NodeId> {
        self.leaves_under(self.root())
    }

    pub fn tokens(&self) -> Vec<&Token> {
        self.leaves().into_iter().filter_map(|l| self.token(l)).collect()
    }

    /// Proper ancestors of `id`, nearest first.
    pub fn ancestors(&self, id: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut cur = self.parent(id);
        while let Some(p) = cur {
            out.push(p);
            cur = self.parent(p);
        }
        out
    }

    /// Surface words under `id` joined by spaces.
    pub fn text(&self, id: NodeId) -> String {
        self.leaves_under(id)
            .iter()
            .filter_map(|&l| self.token(l))
            .map(|t| t.surface.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn sentence_text(&self) -> String {
        self.text(self.root())
    }

    /// Lowercased words under `id` joined by `_`, punctuation dropped
    /// (`the apple` becomes `the_apple`).
    pub fn normalized(&self, id: NodeId) -> String {
        self.leaves_under(id)
            .iter()
            .filter_map(|&l| self.token(l))
            .filter(|t| t.pos != Pos::Punct)
            .map(|t| t.surface.to_lowercase())
            .collect::<Vec<_>>()
            .join("_")
    }

    /// Preorder ids of all nodes.
    pub fn ids(&self) -> std::ops::Range<NodeId> {
        0..self.nodes.len()
    }

    /// Returns a copy with the subtree at `id` replaced by `replacement`.
    pub fn replace(&self, id: NodeId, replacement: Shape) -> ParseTree {
        fn go(t: &ParseTree, n: NodeId, target: NodeId, rep: &Shape) -> Shape {
            if n == target {
                return rep.clone();
            }
            let node = t.node(n);
            match &node.token {
                Some(tok) => Shape::Leaf(node.label.clone(), tok.clone()),
                None => {
                    Shape::Branch(node.label.clone(), node.children.iter().map(|&c| go(t, c, target, rep)).collect())
                }
            }
        }
        ParseTree::from_shape(go(self, self.root(), id, &replacement))
    }
}

fn escape(word: &str) -> String {
    match word {
        "(" => "-LRB-".into(),
        ")" => "-RRB-".into(),
        w => w.to_string(),
    }
}

fn unescape(word: &str) -> String {
    match word {
        "-LRB-" => "(".into(),
        "-RRB-" => ")".into(),
        w => w.to_string(),
    }
}

/// Writes the canonical one-line bracketing; every leaf is `(LABEL word)`.
pub fn write_bracketed(tree: &ParseTree) -> String {
    fn go(t: &ParseTree, id: NodeId, out: &mut String) {
        let n = t.node(id);
        out.push('(');
        out.push_str(&n.label);
        match &n.token {
            Some(tok) => {
                out.push(' ');
                out.push_str(&escape(&tok.surface));
            }
            None => {
                for &c in &n.children {
                    out.push(' ');
                    go(t, c, out);
                }
            }
        }
        out.push(')');
    }
    let mut out = String::new();
    if !tree.is_empty() {
        go(tree, tree.root(), &mut out);
    }
    out
}

impl fmt::Display for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&write_bracketed(self))
    }
}

#[derive(Debug)]
enum Raw {
    Word(String),
    Node(String, Vec<Raw>),
}

struct Reader<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn err(&self, offset: usize, msg: &str) -> SyntaxError {
        SyntaxError::MalformedTree { offset, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn atom(&mut self) -> String {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace() || c == '(' || c == ')' {
                break;
            }
            self.pos += c.len_utf8();
        }
        self.src[start..self.pos].to_string()
    }

    fn node(&mut self) -> Result<Raw, SyntaxError> {
        let open = self.pos;
        self.pos += 1;
        self.skip_ws();
        let label = match self.peek() {
            Some('(') | Some(')') | None => String::new(),
            Some(_) => self.atom(),
        };
        let mut kids = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                None => return Err(self.err(self.src.len(), "unclosed bracket")),
                Some(')') => {
                    self.pos += 1;
                    break;
                }
                Some('(') => kids.push(self.node()?),
                Some(_) => kids.push(Raw::Word(self.atom())),
            }
        }
        if label.is_empty() && kids.len() == 1 && matches!(kids[0], Raw::Node(..)) {
            return Ok(kids.pop().expect("one child"));
        }
        if label.is_empty() {
            return Err(self.err(open, "bracket without a label"));
        }
        if kids.is_empty() {
            return Err(self.err(open, "constituent without children"));
        }
        Ok(Raw::Node(label, kids))
    }
}

fn leaf_shape(label: Option<&str>, word: &str, vocab: &Vocabulary) -> Shape {
    let surface = unescape(word);
    let (lemma, guessed) = vocab.analyze(&surface);
    let pos = label.and_then(Pos::from_label).unwrap_or(guessed);
    let label = label.map(str::to_string).unwrap_or_else(|| pos.leaf_label().to_string());
    Shape::Leaf(label, Token { surface, lemma, pos, index: 0 })
}

fn to_shape(raw: Raw, vocab: &Vocabulary) -> Shape {
    match raw {
        Raw::Word(w) => leaf_shape(None, &w, vocab),
        Raw::Node(label, mut kids) => {
            if kids.len() == 1 {
                if let Raw::Word(w) = &kids[0] {
                    return leaf_shape(Some(&label), w, vocab);
                }
            }
            Shape::Branch(label, kids.drain(..).map(|k| to_shape(k, vocab)).collect())
        }
    }
}

/// Reads a Penn-style labeled bracketing. `(X word)` becomes a leaf labeled
/// `X`; bare words among several children become leaves labeled with their
/// guessed category. An unlabeled outer bracket is unwrapped.
pub fn read_bracketed(text: &str, vocab: &Vocabulary) -> Result<ParseTree, SyntaxError> {
    let mut r = Reader { src: text, pos: 0 };
    r.skip_ws();
    match r.peek() {
        Some('(') => {}
        Some(_) => return Err(r.err(r.pos, "expected `(`")),
        None => return Err(r.err(0, "empty input")),
    }
    let raw = r.node()?;
    r.skip_ws();
    if r.pos < text.len() {
        let msg = if r.peek() == Some(')') { "unbalanced `)`" } else { "text after the tree" };
        return Err(r.err(r.pos, msg));
    }
    Ok(ParseTree::from_shape(to_shape(raw, vocab)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v() -> Vocabulary {
        Vocabulary::bundled()
    }

    #[test]
    fn reads_small_tree() {
        let t = read_bracketed("(S (NP John) (VP (V ran)))", &v()).unwrap();
        assert_eq!(t.label(t.root()), "S");
        assert_eq!(t.leaves().len(), 2);
        let toks = t.tokens();
        assert_eq!(toks[1].lemma, "run");
        assert_eq!(toks[1].pos, Pos::Verb);
        assert_eq!(toks[0].pos, Pos::Propn);
    }

    #[test]
    fn unclosed_reports_end_offset() {
        let e = read_bracketed("(S (NP John", &v()).unwrap_err();
        assert!(matches!(e, SyntaxError::MalformedTree { offset: 11, .. }), "{e:?}");
        let e = read_bracketed("(S (NP John)))", &v()).unwrap_err();
        assert!(matches!(e, SyntaxError::MalformedTree { offset: 13, .. }), "{e:?}");
    }

    #[test]
    fn roundtrip_normalizes_whitespace() {
        let src = "( (S\n  (NP (NNP John))\n  (VP (VBD grabbed) (NP (DT the) (NN apple)))))";
        let t = read_bracketed(src, &v()).unwrap();
        let out = write_bracketed(&t);
        assert_eq!(out, "(S (NP (NNP John)) (VP (VBD grabbed) (NP (DT the) (NN apple))))");
        assert_eq!(read_bracketed(&out, &v()).unwrap(), t);
    }

    #[test]
    fn bare_words_get_category_labels() {
        let t = read_bracketed("(NP the apple)", &v()).unwrap();
        assert_eq!(write_bracketed(&t), "(NP (DET the) (NOUN apple))");
    }

    #[test]
    fn parents_and_indices() {
        let t = read_bracketed("(S (NP (PROPN Mary)) (VP (V went) (PP (PREP to) (NP (DET the) (NOUN office)))))", &v())
            .unwrap();
        for id in t.ids().skip(1) {
            assert!(t.children(t.parent(id).unwrap()).contains(&id));
        }
        let idx: Vec<usize> = t.tokens().iter().map(|t| t.index).collect();
        assert_eq!(idx, vec![0, 1, 2, 3, 4]);
        let office = *t.leaves().last().unwrap();
        assert_eq!(t.normalized(t.parent(office).unwrap()), "the_office");
    }

    #[test]
    fn parens_are_escaped() {
        let tok = Token { surface: "(".into(), lemma: "(".into(), pos: Pos::Punct, index: 0 };
        let t = ParseTree::branch("S", vec![ParseTree::leaf("PUNCT", tok)]);
        let s = write_bracketed(&t);
        assert_eq!(s, "(S (PUNCT -LRB-))");
        assert_eq!(read_bracketed(&s, &v()).unwrap(), t);
    }
}
