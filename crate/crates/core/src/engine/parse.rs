//! Reader for the rule text format.
//!
//! ```text
//! % comment
//! %@ inertia            <- provenance tag for the rules that follow
//! head :- b1, b2, not r1, X < Y, N is M + 1.
//! fact(a).
//! :- p(X), q(X).        <- integrity constraint
//! ?- goal(X).           <- query
//! ```

use super::program::{Builtin, CompareOp, Literal, Program, Query, Rule};
use super::term::{sym, Sym, Term};
use super::EngineError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Atom(String),
    Var(String),
    Int(i64),
    Punct(&'static str),
    Tag(String),
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

const PUNCTS: &[&str] = &[
    ":-", "?-", "=:=", "=\\=", "\\=", "=<", ">=", "//", "(", ")", "[", "]", ",", ".", "<", ">", "=", "+", "-", "*",
    "/", "|",
];

fn lex(src: &str) -> Result<Vec<Spanned>, EngineError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, msg: String| EngineError::Parse { line, col, msg };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start_col = col;
        if c == '%' {
            let start = i;
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            if let Some(tag) = text.strip_prefix("%@") {
                out.push(Spanned { tok: Tok::Tag(tag.trim().to_string()), line, col: start_col });
            }
            col += i - start;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let n = text.parse::<i64>().map_err(|e| err(line, start_col, e.to_string()))?;
            out.push(Spanned { tok: Tok::Int(n), line, col: start_col });
            col += i - start;
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let tok = if c.is_uppercase() || c == '_' { Tok::Var(text) } else { Tok::Atom(text) };
            out.push(Spanned { tok, line, col: start_col });
            col += i - start;
            continue;
        }
        if c == '\'' {
            let mut text = String::new();
            i += 1;
            col += 1;
            loop {
                match chars.get(i) {
                    None => return Err(err(line, start_col, "unterminated quoted atom".into())),
                    Some('\\') if chars.get(i + 1) == Some(&'\'') => {
                        text.push('\'');
                        i += 2;
                        col += 2;
                    }
                    Some('\'') => {
                        i += 1;
                        col += 1;
                        break;
                    }
                    Some(ch) => {
                        text.push(*ch);
                        i += 1;
                        col += 1;
                    }
                }
            }
            out.push(Spanned { tok: Tok::Atom(text), line, col: start_col });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        match PUNCTS.iter().find(|p| rest.starts_with(**p)) {
            Some(p) => {
                out.push(Spanned { tok: Tok::Punct(p), line, col: start_col });
                i += p.len();
                col += p.len();
            }
            None => return Err(err(line, start_col, format!("unexpected character {c:?}"))),
        }
    }
    Ok(out)
}

/// Everything a rule file can contain.
#[derive(Clone, Debug, Default)]
pub struct ParsedText {
    pub rules: Vec<Rule>,
    pub queries: Vec<Query>,
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    names: Vec<Sym>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn peek_at(&self, off: usize) -> Option<&Tok> {
        self.toks.get(self.pos + off).map(|s| &s.tok)
    }

    fn error(&self, msg: impl Into<String>) -> EngineError {
        let (line, col) = match self.toks.get(self.pos).or_else(|| self.toks.last()) {
            Some(s) => (s.line, s.col),
            None => (1, 1),
        };
        EngineError::Parse { line, col, msg: msg.into() }
    }

    fn eat(&mut self, p: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Punct(q)) if *q == p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> Result<(), EngineError> {
        if self.eat(p) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{p}`")))
        }
    }

    fn var(&mut self, name: &str) -> Term {
        if name == "_" {
            self.names.push(sym("_"));
            return Term::Var((self.names.len() - 1) as u32);
        }
        match self.names.iter().position(|n| &**n == name) {
            Some(i) => Term::Var(i as u32),
            None => {
                self.names.push(sym(name));
                Term::Var((self.names.len() - 1) as u32)
            }
        }
    }

    fn parse_file(&mut self) -> Result<ParsedText, EngineError> {
        let mut out = ParsedText::default();
        let mut tag: Option<Sym> = None;
        while let Some(tok) = self.peek().cloned() {
            if let Tok::Tag(t) = tok {
                self.pos += 1;
                tag = if t.is_empty() { None } else { Some(sym(&t)) };
                continue;
            }
            self.names.clear();
            if self.eat("?-") {
                let body = self.body()?;
                self.expect(".")?;
                out.queries.push(Query { body, var_names: std::mem::take(&mut self.names) });
                continue;
            }
            let head = if self.eat(":-") {
                None
            } else {
                let h = self.expr()?;
                if h.pred_key().is_none() {
                    return Err(self.error(format!("invalid clause head `{h}`")));
                }
                if !self.eat(":-") {
                    self.expect(".")?;
                    out.rules.push(Rule {
                        head: Some(h),
                        body: Vec::new(),
                        var_names: std::mem::take(&mut self.names),
                        tag: tag.clone(),
                    });
                    continue;
                }
                Some(h)
            };
            let body = self.body()?;
            self.expect(".")?;
            out.rules.push(Rule { head, body, var_names: std::mem::take(&mut self.names), tag: tag.clone() });
        }
        Ok(out)
    }

    fn body(&mut self) -> Result<Vec<Literal>, EngineError> {
        let mut lits = vec![self.literal()?];
        while self.eat(",") {
            lits.push(self.literal()?);
        }
        Ok(lits)
    }

    fn literal(&mut self) -> Result<Literal, EngineError> {
        if matches!(self.peek(), Some(Tok::Atom(a)) if a == "not")
            && !matches!(self.peek_at(1), Some(Tok::Punct(",")) | Some(Tok::Punct(".")) | None)
        {
            self.pos += 1;
            let t = self.expr()?;
            if t.pred_key().is_none() {
                return Err(self.error(format!("cannot negate `{t}`")));
            }
            return Ok(Literal::Naf(t));
        }
        let lhs = self.expr()?;
        let op = match self.peek() {
            Some(Tok::Punct(p)) => match *p {
                "<" => Some(CompareOp::Lt),
                "=<" => Some(CompareOp::Le),
                ">" => Some(CompareOp::Gt),
                ">=" => Some(CompareOp::Ge),
                "=:=" => Some(CompareOp::ArithEq),
                "=\\=" => Some(CompareOp::ArithNe),
                "=" => {
                    self.pos += 1;
                    let rhs = self.expr()?;
                    return Ok(Literal::Builtin(Builtin::Unify { lhs, rhs }));
                }
                "\\=" => {
                    self.pos += 1;
                    let rhs = self.expr()?;
                    return Ok(Literal::Builtin(Builtin::NotUnify { lhs, rhs }));
                }
                _ => None,
            },
            Some(Tok::Atom(a)) if a == "is" => {
                self.pos += 1;
                let expr = self.expr()?;
                return Ok(Literal::Builtin(Builtin::Is { result: lhs, expr }));
            }
            _ => None,
        };
        if let Some(op) = op {
            self.pos += 1;
            let rhs = self.expr()?;
            return Ok(Literal::Builtin(Builtin::Compare { op, lhs, rhs }));
        }
        classify_call(lhs).map_err(|m| self.error(m))
    }

    fn expr(&mut self) -> Result<Term, EngineError> {
        let mut lhs = self.mul()?;
        loop {
            let op = if self.eat("+") {
                "+"
            } else if self.eat("-") {
                "-"
            } else {
                break;
            };
            let rhs = self.mul()?;
            lhs = Term::Compound(sym(op), vec![lhs, rhs]);
        }
        Ok(lhs)
    }

    fn mul(&mut self) -> Result<Term, EngineError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat("*") {
                "*"
            } else if self.eat("//") {
                "//"
            } else if matches!(self.peek(), Some(Tok::Atom(a)) if a == "mod") {
                self.pos += 1;
                "mod"
            } else {
                break;
            };
            let rhs = self.unary()?;
            lhs = Term::Compound(sym(op), vec![lhs, rhs]);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Term, EngineError> {
        if self.eat("-") {
            return match self.peek().cloned() {
                Some(Tok::Int(n)) => {
                    self.pos += 1;
                    Ok(Term::Int(-n))
                }
                _ => {
                    let t = self.primary()?;
                    Ok(Term::Compound(sym("-"), vec![Term::Int(0), t]))
                }
            };
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Term, EngineError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Term::Int(n))
            }
            Some(Tok::Var(v)) => {
                self.pos += 1;
                Ok(self.var(&v))
            }
            Some(Tok::Atom(a)) => {
                self.pos += 1;
                if self.eat("(") {
                    let mut args = vec![self.expr()?];
                    while self.eat(",") {
                        args.push(self.expr()?);
                    }
                    self.expect(")")?;
                    Ok(Term::Compound(sym(&a), args))
                } else {
                    Ok(Term::Atom(sym(&a)))
                }
            }
            Some(Tok::Punct("[")) => {
                self.pos += 1;
                let mut items = Vec::new();
                if !self.eat("]") {
                    items.push(self.expr()?);
                    while self.eat(",") {
                        items.push(self.expr()?);
                    }
                    if self.eat("|") {
                        return Err(self.error("list tails are not supported"));
                    }
                    self.expect("]")?;
                }
                Ok(Term::List(items))
            }
            Some(Tok::Punct("(")) => {
                self.pos += 1;
                let t = self.expr()?;
                self.expect(")")?;
                Ok(t)
            }
            Some(other) => Err(self.error(format!("unexpected token {other:?}"))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

fn classify_call(t: Term) -> Result<Literal, String> {
    match &t {
        Term::Compound(name, args) => match (&**name, args.len()) {
            ("findall", 3) => {
                if args[1].pred_key().is_none() {
                    return Err(format!("findall goal must be callable: `{}`", args[1]));
                }
                Ok(Literal::Builtin(Builtin::Findall {
                    template: args[0].clone(),
                    goal: args[1].clone(),
                    result: args[2].clone(),
                }))
            }
            ("set", 2) => Ok(Literal::Builtin(Builtin::Set { list: args[0].clone(), result: args[1].clone() })),
            ("list_length", 2) => {
                Ok(Literal::Builtin(Builtin::ListLength { list: args[0].clone(), result: args[1].clone() }))
            }
            ("not", 1) => Ok(Literal::Naf(args[0].clone())),
            _ => Ok(Literal::Pos(t)),
        },
        Term::Atom(_) => Ok(Literal::Pos(t)),
        other => Err(format!("`{other}` is not callable")),
    }
}

pub fn parse_text(src: &str) -> Result<ParsedText, EngineError> {
    let toks = lex(src)?;
    Parser { toks, pos: 0, names: Vec::new() }.parse_file()
}

/// Parses rules and facts into a stratified [`Program`]. Queries are rejected.
pub fn parse_program(src: &str) -> Result<Program, EngineError> {
    let parsed = parse_text(src)?;
    if !parsed.queries.is_empty() {
        return Err(EngineError::Parse { line: 0, col: 0, msg: "queries are not allowed in a program".into() });
    }
    Program::new(parsed.rules)
}

pub fn parse_rules(src: &str) -> Result<Vec<Rule>, EngineError> {
    Ok(parse_text(src)?.rules)
}

/// Parses a single query; the `?-` prefix and final `.` are optional.
pub fn parse_query(src: &str) -> Result<Query, EngineError> {
    let mut text = src.trim().to_string();
    if !text.starts_with("?-") {
        text = format!("?- {text}");
    }
    if !text.ends_with('.') {
        text.push('.');
    }
    let mut parsed = parse_text(&text)?;
    match (parsed.queries.len(), parsed.rules.len()) {
        (1, 0) => Ok(parsed.queries.remove(0)),
        _ => Err(EngineError::Parse { line: 1, col: 1, msg: "expected exactly one query".into() }),
    }
}

/// Parses a single term. Variables are numbered in order of appearance.
pub fn parse_term(src: &str) -> Result<Term, EngineError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, names: Vec::new() };
    let t = p.expr()?;
    p.eat(".");
    if p.pos != p.toks.len() {
        return Err(p.error("trailing input after term"));
    }
    Ok(t)
}
