//! Terms, variable bindings and unification.
//!
//! Variables are numbered per clause. Text-level names are kept on the
//! owning [`Rule`](super::Rule) or [`Query`](super::Query) for display.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

/// Interned-ish symbol. Cheap to clone and shareable across threads.
pub type Sym = Arc<str>;

pub fn sym(s: &str) -> Sym {
    Arc::from(s)
}

/// A first-order term.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Atom(Sym),
    Int(i64),
    Var(u32),
    Compound(Sym, Vec<Term>),
    List(Vec<Term>),
}

/// `name/arity` of a literal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredKey {
    pub name: Sym,
    pub arity: usize,
}

impl fmt::Display for PredKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

impl Term {
    pub fn atom(name: &str) -> Self {
        Term::Atom(sym(name))
    }

    pub fn compound(name: &str, args: Vec<Term>) -> Self {
        if args.is_empty() {
            Term::atom(name)
        } else {
            Term::Compound(sym(name), args)
        }
    }

    /// Predicate key when the term is used as a literal.
    pub fn pred_key(&self) -> Option<PredKey> {
        match self {
            Term::Atom(name) => Some(PredKey { name: name.clone(), arity: 0 }),
            Term::Compound(name, args) => Some(PredKey { name: name.clone(), arity: args.len() }),
            _ => None,
        }
    }

    pub fn functor(&self) -> Option<&str> {
        match self {
            Term::Atom(name) | Term::Compound(name, _) => Some(name),
            _ => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Compound(_, args) | Term::List(args) => args,
            _ => &[],
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Term::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Term::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Atom(_) | Term::Int(_) => true,
            Term::Compound(_, args) | Term::List(args) => args.iter().all(Term::is_ground),
        }
    }

    /// Collects variables in order of first appearance.
    pub fn vars_into(&self, out: &mut Vec<u32>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
            Term::Compound(_, args) | Term::List(args) => {
                for a in args {
                    a.vars_into(out);
                }
            }
            _ => {}
        }
    }

    pub fn vars(&self) -> Vec<u32> {
        let mut out = Vec::new();
        self.vars_into(&mut out);
        out
    }

    pub fn map_vars(&self, f: &mut impl FnMut(u32) -> Term) -> Term {
        match self {
            Term::Var(v) => f(*v),
            Term::Compound(name, args) => Term::Compound(name.clone(), args.iter().map(|a| a.map_vars(f)).collect()),
            Term::List(items) => Term::List(items.iter().map(|a| a.map_vars(f)).collect()),
            other => other.clone(),
        }
    }

    /// Renumbers variables by first appearance, so that two calls that are
    /// variants of each other produce the same key.
    pub fn variant_key(&self) -> Term {
        let mut seen: Vec<u32> = Vec::new();
        self.map_vars(&mut |v| {
            let idx = match seen.iter().position(|s| *s == v) {
                Some(i) => i,
                None => {
                    seen.push(v);
                    seen.len() - 1
                }
            };
            Term::Var(idx as u32)
        })
    }

    pub fn shift_vars(&self, offset: u32) -> Term {
        self.map_vars(&mut |v| Term::Var(v + offset))
    }
}

fn atom_needs_quotes(a: &str) -> bool {
    let mut chars = a.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_ascii_lowercase() => !a.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'),
        Some(_) => !matches!(a, "[]" | "$query"),
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Atom(a) => {
                if atom_needs_quotes(a) {
                    write!(f, "'{}'", a.replace('\'', "\\'"))
                } else {
                    write!(f, "{a}")
                }
            }
            Term::Int(i) => write!(f, "{i}"),
            Term::Var(v) => write!(f, "_G{v}"),
            Term::Compound(name, args) => {
                if atom_needs_quotes(name) {
                    write!(f, "'{}'(", name.replace('\'', "\\'"))?;
                } else {
                    write!(f, "{name}(")?;
                }
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            Term::List(items) => {
                write!(f, "[")?;
                for (i, a) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// Variable bindings. Unification does not perform the occurs check.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bindings {
    map: HashMap<u32, Term>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, v: u32) -> Option<&Term> {
        self.map.get(&v)
    }

    pub fn bind(&mut self, v: u32, t: Term) {
        self.map.insert(v, t);
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    fn walk<'a>(&'a self, mut t: &'a Term) -> &'a Term {
        while let Term::Var(v) = t {
            match self.map.get(v) {
                Some(next) => t = next,
                None => break,
            }
        }
        t
    }

    /// Fully applies the bindings to a term.
    pub fn apply(&self, t: &Term) -> Term {
        match self.walk(t) {
            Term::Compound(name, args) => Term::Compound(name.clone(), args.iter().map(|a| self.apply(a)).collect()),
            Term::List(items) => Term::List(items.iter().map(|a| self.apply(a)).collect()),
            other => other.clone(),
        }
    }

    pub fn unify(&mut self, a: &Term, b: &Term) -> bool {
        let a = self.walk(a).clone();
        let b = self.walk(b).clone();
        match (&a, &b) {
            (Term::Var(x), Term::Var(y)) if x == y => true,
            (Term::Var(x), _) => {
                self.map.insert(*x, b);
                true
            }
            (_, Term::Var(y)) => {
                self.map.insert(*y, a);
                true
            }
            (Term::Atom(x), Term::Atom(y)) => x == y,
            (Term::Int(x), Term::Int(y)) => x == y,
            (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.unify(x, y))
            }
            (Term::List(xs), Term::List(ys)) => {
                xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.unify(x, y))
            }
            _ => false,
        }
    }
}

/// One-way matching: binds variables of `pattern` only; `target` is treated
/// as opaque even if it contains variables.
pub fn match_term(pattern: &Term, target: &Term, b: &mut Bindings) -> bool {
    match pattern {
        Term::Var(v) => match b.get(*v) {
            Some(bound) => bound == target,
            None => {
                b.bind(*v, target.clone());
                true
            }
        },
        Term::Atom(_) | Term::Int(_) => pattern == target,
        Term::Compound(f, xs) => match target {
            Term::Compound(g, ys) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| match_term(x, y, b))
            }
            _ => false,
        },
        Term::List(xs) => match target {
            Term::List(ys) => xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| match_term(x, y, b)),
            _ => false,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unify_binds_through_chains() {
        let mut b = Bindings::new();
        let x = Term::Var(0);
        let y = Term::Var(1);
        assert!(b.unify(&x, &y));
        assert!(b.unify(&y, &Term::atom("a")));
        assert_eq!(b.apply(&x), Term::atom("a"));
    }

    #[test]
    fn unify_rejects_functor_clash() {
        let mut b = Bindings::new();
        let l = Term::compound("f", vec![Term::Var(0)]);
        let r = Term::compound("g", vec![Term::atom("a")]);
        assert!(!b.unify(&l, &r));
    }

    #[test]
    fn variant_keys_agree_up_to_renaming() {
        let a = Term::compound("p", vec![Term::Var(7), Term::atom("c"), Term::Var(3), Term::Var(7)]);
        let b = Term::compound("p", vec![Term::Var(1), Term::atom("c"), Term::Var(9), Term::Var(1)]);
        assert_eq!(a.variant_key(), b.variant_key());
    }

    #[test]
    fn display_is_compact() {
        let t = Term::compound(
            "contact",
            vec![
                Term::atom("t3"),
                Term::compound("during", vec![Term::atom("grab")]),
                Term::List(vec![Term::Int(1), Term::atom("b")]),
            ],
        );
        assert_eq!(t.to_string(), "contact(t3,during(grab),[1,b])");
    }
}
