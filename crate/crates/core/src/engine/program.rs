use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use super::strata::{stratify, Stratification};
use super::term::{PredKey, Sym, Term};
use super::EngineError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CompareOp {
    Lt,
    Le,
    Gt,
    Ge,
    ArithEq,
    ArithNe,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Lt => "<",
            CompareOp::Le => "=<",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
            CompareOp::ArithEq => "=:=",
            CompareOp::ArithNe => "=\\=",
        }
    }
}

/// Built-in calls evaluated by the engine rather than by clause lookup.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    /// `findall(Template, Goal, List)`
    Findall {
        template: Term,
        goal: Term,
        result: Term,
    },
    /// `set(List, Set)`: deduplicate keeping first occurrences.
    Set {
        list: Term,
        result: Term,
    },
    /// `list_length(List, N)`
    ListLength {
        list: Term,
        result: Term,
    },
    Compare {
        op: CompareOp,
        lhs: Term,
        rhs: Term,
    },
    /// `Result is Expr`
    Is {
        result: Term,
        expr: Term,
    },
    Unify {
        lhs: Term,
        rhs: Term,
    },
    NotUnify {
        lhs: Term,
        rhs: Term,
    },
}

impl Builtin {
    /// Rebuilds the call as a plain term, for display and justification.
    pub fn as_term(&self) -> Term {
        match self {
            Builtin::Findall { template, goal, result } => {
                Term::compound("findall", vec![template.clone(), goal.clone(), result.clone()])
            }
            Builtin::Set { list, result } => Term::compound("set", vec![list.clone(), result.clone()]),
            Builtin::ListLength { list, result } => Term::compound("list_length", vec![list.clone(), result.clone()]),
            Builtin::Compare { op, lhs, rhs } => Term::compound(op.symbol(), vec![lhs.clone(), rhs.clone()]),
            Builtin::Is { result, expr } => Term::compound("is", vec![result.clone(), expr.clone()]),
            Builtin::Unify { lhs, rhs } => Term::compound("=", vec![lhs.clone(), rhs.clone()]),
            Builtin::NotUnify { lhs, rhs } => Term::compound("\\=", vec![lhs.clone(), rhs.clone()]),
        }
    }

    pub fn map_terms(&self, f: &mut impl FnMut(&Term) -> Term) -> Builtin {
        match self {
            Builtin::Findall { template, goal, result } => {
                Builtin::Findall { template: f(template), goal: f(goal), result: f(result) }
            }
            Builtin::Set { list, result } => Builtin::Set { list: f(list), result: f(result) },
            Builtin::ListLength { list, result } => Builtin::ListLength { list: f(list), result: f(result) },
            Builtin::Compare { op, lhs, rhs } => Builtin::Compare { op: *op, lhs: f(lhs), rhs: f(rhs) },
            Builtin::Is { result, expr } => Builtin::Is { result: f(result), expr: f(expr) },
            Builtin::Unify { lhs, rhs } => Builtin::Unify { lhs: f(lhs), rhs: f(rhs) },
            Builtin::NotUnify { lhs, rhs } => Builtin::NotUnify { lhs: f(lhs), rhs: f(rhs) },
        }
    }

    /// Variables this builtin is able to bind.
    fn output_vars(&self, out: &mut Vec<u32>) {
        match self {
            Builtin::Findall { result, .. } => result.vars_into(out),
            Builtin::Set { result, .. } | Builtin::ListLength { result, .. } | Builtin::Is { result, .. } => {
                result.vars_into(out)
            }
            Builtin::Unify { lhs, rhs } => {
                lhs.vars_into(out);
                rhs.vars_into(out);
            }
            // Goal variables are moded inputs; they are expected bound at call time.
            Builtin::Compare { .. } | Builtin::NotUnify { .. } => {}
        }
        if let Builtin::Findall { goal, .. } = self {
            goal.vars_into(out);
        }
    }
}

/// A body literal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Literal {
    Pos(Term),
    Naf(Term),
    Builtin(Builtin),
}

impl Literal {
    pub fn map_terms(&self, f: &mut impl FnMut(&Term) -> Term) -> Literal {
        match self {
            Literal::Pos(t) => Literal::Pos(f(t)),
            Literal::Naf(t) => Literal::Naf(f(t)),
            Literal::Builtin(b) => Literal::Builtin(b.map_terms(f)),
        }
    }
}

/// `head :- body.` A missing head makes the rule an integrity constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub head: Option<Term>,
    pub body: Vec<Literal>,
    pub var_names: Vec<Sym>,
    /// Optional provenance tag, set by `%@ tag` directives in rule files.
    pub tag: Option<Sym>,
}

impl Rule {
    pub fn fact(head: Term) -> Self {
        Rule { head: Some(head), body: Vec::new(), var_names: Vec::new(), tag: None }
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty() && self.head.is_some()
    }

    pub fn body_pos(&self) -> impl Iterator<Item = &Term> {
        self.body.iter().filter_map(|l| match l {
            Literal::Pos(t) => Some(t),
            _ => None,
        })
    }

    pub fn body_naf(&self) -> impl Iterator<Item = &Term> {
        self.body.iter().filter_map(|l| match l {
            Literal::Naf(t) => Some(t),
            _ => None,
        })
    }

    pub fn body_builtin(&self) -> impl Iterator<Item = &Builtin> {
        self.body.iter().filter_map(|l| match l {
            Literal::Builtin(b) => Some(b),
            _ => None,
        })
    }

    fn var_name(&self, v: u32) -> String {
        self.var_names.get(v as usize).map(|s| s.to_string()).unwrap_or_else(|| format!("_G{v}"))
    }

    /// Range restriction: head and NAF variables must be bound by a positive
    /// literal or a builtin output. Anonymous variables under `not` are
    /// exempt; they are read existentially.
    pub fn check_range_restricted(&self) -> Result<(), EngineError> {
        let mut bound = Vec::new();
        for t in self.body_pos() {
            t.vars_into(&mut bound);
        }
        for b in self.body_builtin() {
            b.output_vars(&mut bound);
        }
        let mut needed = Vec::new();
        if let Some(h) = &self.head {
            h.vars_into(&mut needed);
        }
        for t in self.body_naf() {
            t.vars_into(&mut needed);
        }
        needed.retain(|&v| !self.var_name(v).starts_with('_'));
        for v in needed {
            if !bound.contains(&v) {
                return Err(EngineError::RangeRestriction { rule: self.to_string(), var: self.var_name(v) });
            }
        }
        Ok(())
    }
}

pub(crate) fn display_with_names(t: &Term, names: &[Sym]) -> String {
    let named = t.map_vars(&mut |v| match names.get(v as usize) {
        Some(n) => Term::Atom(n.clone()),
        None => Term::Var(v),
    });
    // Variable names start uppercase and would be quoted as atoms.
    named.to_string().replace('\'', "")
}

fn display_literal(l: &Literal, names: &[Sym]) -> String {
    match l {
        Literal::Pos(t) => display_with_names(t, names),
        Literal::Naf(t) => format!("not {}", display_with_names(t, names)),
        Literal::Builtin(b) => match b {
            Builtin::Compare { op, lhs, rhs } => {
                format!("{} {} {}", display_with_names(lhs, names), op.symbol(), display_with_names(rhs, names))
            }
            Builtin::Is { result, expr } => {
                format!("{} is {}", display_with_names(result, names), display_with_names(expr, names))
            }
            Builtin::Unify { lhs, rhs } => {
                format!("{} = {}", display_with_names(lhs, names), display_with_names(rhs, names))
            }
            Builtin::NotUnify { lhs, rhs } => {
                format!("{} \\= {}", display_with_names(lhs, names), display_with_names(rhs, names))
            }
            other => display_with_names(&other.as_term(), names),
        },
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(h) = &self.head {
            write!(f, "{}", display_with_names(h, &self.var_names))?;
            if !self.body.is_empty() {
                write!(f, " :- ")?;
            }
        } else {
            write!(f, ":- ")?;
        }
        for (i, l) in self.body.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", display_literal(l, &self.var_names))?;
        }
        write!(f, ".")
    }
}

/// `?- body.`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub body: Vec<Literal>,
    pub var_names: Vec<Sym>,
}

impl Query {
    pub fn single(goal: Term, var_names: Vec<Sym>) -> Self {
        Query { body: vec![Literal::Pos(goal)], var_names }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?- ")?;
        for (i, l) in self.body.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", display_literal(l, &self.var_names))?;
        }
        write!(f, ".")
    }
}

/// A validated, stratified program. Immutable; share it freely.
#[derive(Clone, Debug)]
pub struct Program {
    clauses: Vec<Arc<Rule>>,
    by_pred: HashMap<PredKey, Vec<usize>>,
    facts: HashSet<Term>,
    constraints: Vec<Arc<Rule>>,
    strata: Stratification,
}

impl Program {
    pub fn new(rules: impl IntoIterator<Item = Rule>) -> Result<Self, EngineError> {
        let mut p = Program {
            clauses: Vec::new(),
            by_pred: HashMap::new(),
            facts: HashSet::new(),
            constraints: Vec::new(),
            strata: Stratification::default(),
        };
        for r in rules {
            p.push(Arc::new(r))?;
        }
        p.strata = stratify(&p)?;
        Ok(p)
    }

    fn push(&mut self, rule: Arc<Rule>) -> Result<(), EngineError> {
        rule.check_range_restricted()?;
        let Some(head) = &rule.head else {
            self.constraints.push(rule);
            return Ok(());
        };
        let key = head.pred_key().ok_or_else(|| EngineError::InvalidHead(head.to_string()))?;
        if rule.is_fact() {
            if !head.is_ground() {
                return Err(EngineError::NonGroundFact(head.to_string()));
            }
            if !self.facts.insert(head.clone()) {
                return Ok(());
            }
        }
        self.by_pred.entry(key).or_default().push(self.clauses.len());
        self.clauses.push(rule);
        Ok(())
    }

    /// Returns a new program with extra rules or facts appended.
    pub fn extended(&self, rules: impl IntoIterator<Item = Rule>) -> Result<Self, EngineError> {
        let mut p = self.clone();
        for r in rules {
            p.push(Arc::new(r))?;
        }
        p.strata = stratify(&p)?;
        Ok(p)
    }

    pub fn clauses(&self) -> &[Arc<Rule>] {
        &self.clauses
    }

    pub fn rules(&self) -> impl Iterator<Item = &Arc<Rule>> {
        self.clauses.iter().filter(|r| !r.is_fact())
    }

    pub fn facts(&self) -> &HashSet<Term> {
        &self.facts
    }

    pub fn constraints(&self) -> &[Arc<Rule>] {
        &self.constraints
    }

    pub fn clauses_for(&self, key: &PredKey) -> impl Iterator<Item = &Arc<Rule>> {
        self.by_pred.get(key).into_iter().flatten().map(move |&i| &self.clauses[i])
    }

    pub fn predicates(&self) -> impl Iterator<Item = &PredKey> {
        self.by_pred.keys()
    }

    pub fn stratification(&self) -> &Stratification {
        &self.strata
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty() && self.constraints.is_empty()
    }
}
