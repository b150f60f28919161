//! Proof trees: construction happens in the solver, this module renders them
//! as indented English and checks them against the program.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use super::program::{Literal, Program, Query, Rule};
use super::solve::Solver;
use super::term::{match_term, sym, Bindings, Term};

#[derive(Clone, Debug)]
pub enum JustKind {
    Fact,
    Rule(Arc<Rule>),
    NafFailure,
    Builtin,
    /// Synthetic root for multi-literal queries.
    Query,
}

#[derive(Clone, Debug)]
pub struct Justification {
    pub goal: Term,
    pub kind: JustKind,
    pub children: Vec<Arc<Justification>>,
}

impl Justification {
    /// Ground goals of all fact leaves, depth first.
    pub fn fact_leaves(&self) -> Vec<Term> {
        let mut out = Vec::new();
        self.walk(&mut |j| {
            if matches!(j.kind, JustKind::Fact) {
                out.push(j.goal.clone());
            }
        });
        out
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    pub fn walk(&self, f: &mut impl FnMut(&Justification)) {
        f(self);
        for c in &self.children {
            c.walk(f);
        }
    }
}

/// Predicate phrase templates. `{1}`..`{n}` refer to literal arguments;
/// role wrappers such as `agent(john)` are shown as their content.
#[derive(Clone, Debug)]
pub struct Phrasebook {
    templates: HashMap<(String, usize), String>,
}

impl Default for Phrasebook {
    fn default() -> Self {
        let mut pb = Phrasebook { templates: HashMap::new() };
        for (name, arity, text) in [
            ("location", 3, "{2} is at {3} at {1}"),
            ("possible_location", 3, "{2} is possibly at {3} at {1}"),
            ("neg_location", 3, "{2} is not at {3} at {1}"),
            ("contact", 4, "{3} is in contact with {4} during the {2} event at {1}"),
            ("cause", 3, "{2} causes the {3} event at {1}"),
            ("transfer", 3, "{3} is transferred during the {2} event at {1}"),
            ("motion", 4, "{3} moves to {4} during the {2} event at {1}"),
            ("has_possession", 4, "{3} has {4} at the {2} of the event at {1}"),
            ("release", 4, "{3} releases {4} at the {2} of the event at {1}"),
            ("isa", 3, "{2} is a {3} at {1}"),
            ("moment", 2, "{1} is moment number {2}"),
            ("property", 4, "{3} has {1} {4} at {2}"),
            ("count_object", 3, "{2} is carrying {3} objects at {1}"),
            ("list_object", 3, "{2} is carrying {3} at {1}"),
            ("possession", 3, "{2} has {3} at {1}"),
            ("acquires", 3, "{2} acquires {3} at {1}"),
            ("releases", 3, "{2} gives up {3} at {1}"),
            ("changes_hands", 2, "{2} changes hands at {1}"),
            ("held", 2, "someone holds {2} at {1}"),
            ("moved", 2, "{2} changes place at {1}"),
            ("location_event", 3, "{2} arrives at {3} at {1}"),
            ("next", 2, "{2} follows {1}"),
            ("given", 5, "{3} gives {4} to {5} at {1}"),
            ("received", 4, "{4} receives {3} at {1}"),
            ("action", 2, "{1} does the action {2}"),
            ("missing_parameter", 1, "the parameter {1} is missing"),
            ("query_parameter", 1, "{1} is a parameter of the request"),
            ("query_parameter_value", 2, "the parameter {1} has value {2}"),
            ("cuisine_suggestion", 2, "{2} cuisine can be suggested to {1}"),
            ("cuisine_exception", 2, "{1} would not like {2} cuisine"),
        ] {
            pb.insert(name, arity, text);
        }
        pb
    }
}

impl Phrasebook {
    pub fn empty() -> Self {
        Phrasebook { templates: HashMap::new() }
    }

    pub fn insert(&mut self, name: &str, arity: usize, template: &str) {
        self.templates.insert((name.to_string(), arity), template.to_string());
    }

    /// Loads `name/arity<TAB>template` lines on top of the current table.
    pub fn load_tsv(&mut self, text: &str) -> Result<(), String> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, template) = line.split_once('\t').ok_or_else(|| format!("line {}: missing tab", i + 1))?;
            let (name, arity) = key.rsplit_once('/').ok_or_else(|| format!("line {}: expected name/arity", i + 1))?;
            let arity: usize = arity.parse().map_err(|_| format!("line {}: bad arity", i + 1))?;
            self.insert(name, arity, template);
        }
        Ok(())
    }

    pub fn phrase(&self, goal: &Term) -> String {
        let (name, args) = match goal {
            Term::Atom(a) => (a.to_string(), Vec::new()),
            Term::Compound(f, args) => (f.to_string(), args.clone()),
            other => return other.to_string(),
        };
        match self.templates.get(&(name.clone(), args.len())) {
            Some(t) => {
                let mut out = t.clone();
                for (i, a) in args.iter().enumerate().rev() {
                    out = out.replace(&format!("{{{}}}", i + 1), &plain(a));
                }
                out
            }
            None => format!("{goal} holds"),
        }
    }

    fn builtin_phrase(&self, goal: &Term) -> String {
        let args = goal.args();
        match (goal.functor(), args.len()) {
            (Some("findall"), 3) => {
                format!("collecting every {} such that {} gives {}", args[0], self.phrase(&args[1]), args[2])
            }
            (Some("set"), 2) => format!("{} without duplicates is {}", args[0], args[1]),
            (Some("list_length"), 2) => format!("{} has {} elements", args[0], args[1]),
            (Some("is"), 2) => format!("{} is {}", args[0], args[1]),
            (Some(op), 2) => format!("{} {} {}", args[0], op, args[1]),
            _ => goal.to_string(),
        }
    }
}

fn plain(t: &Term) -> String {
    match t {
        Term::Compound(f, args) if args.len() == 1 => match &**f {
            "start" | "during" | "end" => args[0].to_string(),
            _ => plain(&args[0]),
        },
        other => other.to_string(),
    }
}

/// Renders one line per node with two-space indentation per level. Nodes at
/// `depth_limit` that have children are followed by a `…` line.
pub fn render_justification(j: &Justification, depth_limit: usize) -> String {
    render_with(j, depth_limit, &Phrasebook::default())
}

pub fn render_with(j: &Justification, depth_limit: usize, book: &Phrasebook) -> String {
    let mut out = String::new();
    render_node(j, 0, depth_limit, book, &mut out);
    out
}

fn render_node(j: &Justification, depth: usize, limit: usize, book: &Phrasebook, out: &mut String) {
    let indent = "  ".repeat(depth);
    let text = match &j.kind {
        JustKind::Fact => format!("{} (fact)", book.phrase(&j.goal)),
        JustKind::Rule(_) => format!("{}, because", book.phrase(&j.goal)),
        JustKind::NafFailure => format!("it is not the case that {}", book.phrase(&j.goal)),
        JustKind::Builtin => book.builtin_phrase(&j.goal),
        JustKind::Query => "the query holds, because".to_string(),
    };
    let _ = writeln!(out, "{indent}{text}");
    if j.children.is_empty() {
        return;
    }
    if depth >= limit {
        let _ = writeln!(out, "{indent}  …");
        return;
    }
    for c in &j.children {
        render_node(c, depth + 1, limit, book, out);
    }
}

/// Checks that every rule node's goal is an instance of its rule head and
/// that its children match the instantiated body, literal by literal. NAF
/// nodes are re-checked for unprovability.
pub fn check_justification(j: &Justification, program: &Program) -> Result<(), String> {
    let mut solver = Solver::new(program);
    check_node(j, program, &mut solver)
}

fn check_node(j: &Justification, program: &Program, solver: &mut Solver<'_>) -> Result<(), String> {
    match &j.kind {
        JustKind::Fact => {
            if !program.facts().contains(&j.goal) {
                return Err(format!("{} is not a program fact", j.goal));
            }
        }
        JustKind::NafFailure => {
            let provable = if j.goal.is_ground() {
                !solver.prove_naf(&j.goal).map_err(|e| e.to_string())?.succeeded
            } else {
                let names = (0..=j.goal.vars().into_iter().max().unwrap_or(0)).map(|_| sym("_")).collect();
                let q = Query { body: vec![Literal::Naf(j.goal.clone())], var_names: names };
                solver.solve(&q).map_err(|e| e.to_string())?.is_empty()
            };
            if provable {
                return Err(format!("negated goal {} is provable", j.goal));
            }
        }
        JustKind::Builtin => {
            if j.goal.functor() == Some("findall") {
                let args = j.goal.args();
                let n = match &args[2] {
                    Term::List(items) => items.len(),
                    _ => return Err(format!("findall result is not a list: {}", j.goal)),
                };
                if n != j.children.len() {
                    return Err(format!("findall has {} children for {} items", j.children.len(), n));
                }
                for c in &j.children {
                    let mut b = Bindings::new();
                    if !b.unify(&args[1], &c.goal) {
                        return Err(format!("findall child {} does not match {}", c.goal, args[1]));
                    }
                    check_node(c, program, solver)?;
                }
            }
        }
        JustKind::Query => {
            for c in &j.children {
                check_node(c, program, solver)?;
            }
        }
        JustKind::Rule(rule) => {
            let head = rule.head.as_ref().ok_or("constraint used as rule")?;
            let mut b = Bindings::new();
            if !match_term(head, &j.goal, &mut b) {
                return Err(format!("{} is not an instance of {}", j.goal, rule));
            }
            if rule.body.len() != j.children.len() {
                return Err(format!(
                    "{} has {} children for {} body literals",
                    j.goal,
                    j.children.len(),
                    rule.body.len()
                ));
            }
            for (lit, child) in rule.body.iter().zip(&j.children) {
                let (pattern, kind_ok) = match lit {
                    Literal::Pos(t) => (t.clone(), matches!(child.kind, JustKind::Fact | JustKind::Rule(_))),
                    Literal::Naf(t) => (t.clone(), matches!(child.kind, JustKind::NafFailure)),
                    Literal::Builtin(bi) => (bi.as_term(), matches!(child.kind, JustKind::Builtin)),
                };
                if !kind_ok {
                    return Err(format!("child {} has the wrong kind for `{}`", child.goal, rule));
                }
                if !match_term(&pattern, &child.goal, &mut b) {
                    return Err(format!("child {} does not match body of `{}`", child.goal, rule));
                }
                check_node(child, program, solver)?;
            }
        }
    }
    Ok(())
}
