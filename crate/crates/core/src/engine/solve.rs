//! Goal-directed evaluation with call tabling.
//!
//! Every call is resolved against a table keyed by the call's variant. A
//! table that is re-entered while still being evaluated returns its current
//! answers and reports the ancestor's stack position; the leader of such a
//! recursive component iterates until no table gains an answer, then marks
//! the whole component complete. Negated and aggregated calls are always
//! evaluated to completion, which stratification guarantees is possible.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use super::justify::{JustKind, Justification};
use super::program::{Builtin, CompareOp, Literal, Program, Query, Rule};
use super::term::{Bindings, Sym, Term};
use super::EngineError;

pub const DEFAULT_DEPTH_LIMIT: usize = 10_000;

/// Call variables are shifted past any clause-local variable numbering.
const CALL_VAR_OFFSET: u32 = 1 << 24;
const INDEPENDENT: usize = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    Active(usize),
    Incomplete,
    Complete,
}

#[derive(Debug)]
struct Table {
    key: Term,
    answers: Vec<Term>,
    justs: Vec<Arc<Justification>>,
    seen: HashSet<Term>,
    status: Status,
    /// Leader iteration in which an incomplete table was last evaluated,
    /// and the lowest stack position it depended on then.
    epoch: u64,
    low: usize,
}

/// One solution of a query.
#[derive(Clone, Debug)]
pub struct Answer {
    /// Query variable name → ground value, for named (non-`_`) variables.
    pub bindings: BTreeMap<String, Term>,
    /// The query body instantiated with the bindings.
    pub goals: Vec<Term>,
    pub justification: Arc<Justification>,
}

impl Answer {
    pub fn get(&self, var: &str) -> Option<&Term> {
        self.bindings.get(var)
    }
}

/// Answers of a query, in deterministic order.
#[derive(Clone, Debug, Default)]
pub struct Answers {
    items: Vec<Answer>,
}

impl Answers {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn as_slice(&self) -> &[Answer] {
        &self.items
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Answer> {
        self.items.iter()
    }
}

impl IntoIterator for Answers {
    type Item = Answer;
    type IntoIter = std::vec::IntoIter<Answer>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.into_iter()
    }
}

impl<'a> IntoIterator for &'a Answers {
    type Item = &'a Answer;
    type IntoIter = std::slice::Iter<'a, Answer>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

/// Outcome of a negation-as-failure proof attempt.
#[derive(Clone, Debug)]
pub struct NafOutcome {
    pub succeeded: bool,
    pub justification: Arc<Justification>,
}

/// Evaluation state for one program. Tables live as long as the solver, so
/// repeated queries on the same solver reuse completed work.
pub struct Solver<'p> {
    program: &'p Program,
    tables: Vec<Table>,
    index: HashMap<Term, usize>,
    stack: Vec<usize>,
    pending: Vec<usize>,
    new_answers: u64,
    epoch: u64,
    depth_limit: usize,
}

type Partial = (Bindings, Vec<Arc<Justification>>);

impl<'p> Solver<'p> {
    pub fn new(program: &'p Program) -> Self {
        Self::with_depth_limit(program, DEFAULT_DEPTH_LIMIT)
    }

    pub fn with_depth_limit(program: &'p Program, depth_limit: usize) -> Self {
        Solver {
            program,
            tables: Vec::new(),
            index: HashMap::new(),
            stack: Vec::new(),
            pending: Vec::new(),
            new_answers: 0,
            epoch: 0,
            depth_limit,
        }
    }

    pub fn program(&self) -> &Program {
        self.program
    }

    /// Enumerates the ground instances of the query true in the program's
    /// perfect model.
    pub fn solve(&mut self, query: &Query) -> Result<Answers, EngineError> {
        let mut low = INDEPENDENT;
        let mut partials = Vec::new();
        self.eval_body(&query.body, &query.var_names, 0, Bindings::new(), Vec::new(), &mut low, &mut partials)?;
        let mut seen = HashSet::new();
        let mut items = Vec::new();
        for (b, children) in partials {
            let goals: Vec<Term> = query
                .body
                .iter()
                .map(|l| match l {
                    Literal::Pos(t) | Literal::Naf(t) => b.apply(t),
                    Literal::Builtin(bi) => b.apply(&bi.as_term()),
                })
                .collect();
            if !seen.insert(goals.clone()) {
                continue;
            }
            let mut bindings = BTreeMap::new();
            for (i, name) in query.var_names.iter().enumerate() {
                if name.starts_with('_') {
                    continue;
                }
                let v = b.apply(&Term::Var(i as u32));
                if !v.is_ground() {
                    return Err(EngineError::NonGroundAnswer(format!("{name} = {v}")));
                }
                bindings.insert(name.to_string(), v);
            }
            let justification = if children.len() == 1 {
                children.into_iter().next().expect("one child")
            } else {
                Arc::new(Justification {
                    goal: Term::compound("$query", goals.clone()),
                    kind: JustKind::Query,
                    children,
                })
            };
            items.push(Answer { bindings, goals, justification });
        }
        Ok(Answers { items })
    }

    /// Succeeds iff the ground goal has no proof.
    pub fn prove_naf(&mut self, goal: &Term) -> Result<NafOutcome, EngineError> {
        if !goal.is_ground() {
            return Err(EngineError::Floundering(goal.to_string()));
        }
        let (id, low) = self.call(goal)?;
        debug_assert_eq!(low, INDEPENDENT);
        let table = &self.tables[id];
        let succeeded = table.answers.is_empty();
        let justification = Arc::new(Justification {
            goal: goal.clone(),
            kind: JustKind::NafFailure,
            children: if succeeded { Vec::new() } else { vec![table.justs[0].clone()] },
        });
        Ok(NafOutcome { succeeded, justification })
    }

    /// Evaluates all integrity constraints; returns the instantiated bodies
    /// of violated ones.
    pub fn constraint_violations(&mut self) -> Result<Vec<String>, EngineError> {
        let mut out = Vec::new();
        for c in self.program.constraints().to_vec() {
            let q = Query { body: c.body.clone(), var_names: c.var_names.clone() };
            for a in self.solve(&q)? {
                let body: Vec<String> = a.goals.iter().map(|g| g.to_string()).collect();
                out.push(body.join(", "));
            }
        }
        Ok(out)
    }

    fn call(&mut self, goal: &Term) -> Result<(usize, usize), EngineError> {
        let key = goal.variant_key();
        let id = match self.index.get(&key) {
            Some(&id) => match self.tables[id].status {
                Status::Complete => return Ok((id, INDEPENDENT)),
                Status::Active(pos) => return Ok((id, pos)),
                // Already evaluated in this round of the enclosing fixpoint.
                Status::Incomplete if self.tables[id].epoch == self.epoch => return Ok((id, self.tables[id].low)),
                Status::Incomplete => id,
            },
            None => {
                let id = self.tables.len();
                self.tables.push(Table {
                    key: key.clone(),
                    answers: Vec::new(),
                    justs: Vec::new(),
                    seen: HashSet::new(),
                    status: Status::Incomplete,
                    epoch: u64::MAX,
                    low: INDEPENDENT,
                });
                self.index.insert(key, id);
                id
            }
        };
        let pos = self.stack.len();
        if pos >= self.depth_limit {
            return Err(EngineError::NonterminationGuard { depth: pos });
        }
        self.stack.push(id);
        self.tables[id].status = Status::Active(pos);
        let pending_mark = self.pending.len();

        let key = self.tables[id].key.clone();
        let pred = key.pred_key().ok_or_else(|| EngineError::InvalidHead(key.to_string()))?;
        let clauses: Vec<Arc<Rule>> = self.program.clauses_for(&pred).cloned().collect();
        let goal = key.shift_vars(CALL_VAR_OFFSET);
        let mut low = INDEPENDENT;
        loop {
            let before = self.new_answers;
            if low == pos {
                self.epoch += 1;
            }
            for clause in &clauses {
                let Some(head) = &clause.head else { continue };
                let mut b = Bindings::new();
                if !b.unify(head, &goal) {
                    continue;
                }
                let mut partials = Vec::new();
                self.eval_body(&clause.body, &clause.var_names, 0, b, Vec::new(), &mut low, &mut partials)?;
                for (b, children) in partials {
                    let answer = b.apply(&goal);
                    if !answer.is_ground() {
                        return Err(EngineError::NonGroundAnswer(answer.to_string()));
                    }
                    let table = &mut self.tables[id];
                    if table.seen.insert(answer.clone()) {
                        let kind = if clause.is_fact() { JustKind::Fact } else { JustKind::Rule(clause.clone()) };
                        table.justs.push(Arc::new(Justification { goal: answer.clone(), kind, children }));
                        table.answers.push(answer);
                        self.new_answers += 1;
                    }
                }
            }
            if low < pos || self.new_answers == before || low == INDEPENDENT {
                break;
            }
        }
        self.stack.pop();
        if low < pos {
            let epoch = self.epoch;
            let table = &mut self.tables[id];
            table.status = Status::Incomplete;
            table.epoch = epoch;
            table.low = low;
            self.pending.push(id);
            Ok((id, low))
        } else {
            self.tables[id].status = Status::Complete;
            for p in self.pending.drain(pending_mark..) {
                self.tables[p].status = Status::Complete;
            }
            Ok((id, INDEPENDENT))
        }
    }

    /// Calls `goal` and requires its table to be complete.
    fn call_complete(&mut self, goal: &Term) -> Result<usize, EngineError> {
        let (id, low) = self.call(goal)?;
        if low != INDEPENDENT {
            return Err(EngineError::UnstratifiableProgram { cycle: vec![goal.to_string()] });
        }
        Ok(id)
    }

    #[allow(clippy::too_many_arguments)]
    fn eval_body(
        &mut self,
        body: &[Literal],
        names: &[Sym],
        i: usize,
        b: Bindings,
        children: Vec<Arc<Justification>>,
        low: &mut usize,
        out: &mut Vec<Partial>,
    ) -> Result<(), EngineError> {
        let Some(lit) = body.get(i) else {
            out.push((b, children));
            return Ok(());
        };
        match lit {
            Literal::Pos(t) => {
                let inst = b.apply(t);
                let (id, l) = self.call(&inst)?;
                *low = (*low).min(l);
                let answers: Vec<(Term, Arc<Justification>)> =
                    self.tables[id].answers.iter().cloned().zip(self.tables[id].justs.iter().cloned()).collect();
                for (a, j) in answers {
                    let mut b2 = b.clone();
                    if b2.unify(&inst, &a) {
                        let mut c2 = children.clone();
                        c2.push(j);
                        self.eval_body(body, names, i + 1, b2, c2, low, out)?;
                    }
                }
            }
            Literal::Naf(t) => {
                let inst = b.apply(t);
                // Anonymous variables are existential inside the negation.
                let anonymous = |v: &u32| names.get(*v as usize).is_some_and(|n| n.starts_with('_'));
                if !inst.vars().iter().all(anonymous) {
                    return Err(EngineError::Floundering(inst.to_string()));
                }
                let id = self.call_complete(&inst)?;
                if self.tables[id].answers.is_empty() {
                    let mut c2 = children;
                    c2.push(Arc::new(Justification { goal: inst, kind: JustKind::NafFailure, children: Vec::new() }));
                    self.eval_body(body, names, i + 1, b, c2, low, out)?;
                }
            }
            Literal::Builtin(bi) => {
                for (b2, node) in self.eval_builtin(bi, &b)? {
                    let mut c2 = children.clone();
                    c2.push(node);
                    self.eval_body(body, names, i + 1, b2, c2, low, out)?;
                }
            }
        }
        Ok(())
    }

    fn eval_builtin(&mut self, bi: &Builtin, b: &Bindings) -> Result<Vec<(Bindings, Arc<Justification>)>, EngineError> {
        let mut b2 = b.clone();
        let mut children = Vec::new();
        let ok = match bi {
            Builtin::Findall { template, goal, result } => {
                let inst = b.apply(goal);
                let id = self.call_complete(&inst)?;
                let mut items = Vec::new();
                for (a, j) in self.tables[id].answers.iter().zip(&self.tables[id].justs) {
                    let mut local = b.clone();
                    if local.unify(&inst, a) {
                        let item = local.apply(template);
                        if !item.is_ground() {
                            return Err(EngineError::BuiltinTypeError {
                                builtin: "findall".into(),
                                arg: item.to_string(),
                            });
                        }
                        items.push(item);
                        children.push(j.clone());
                    }
                }
                b2.unify(result, &Term::List(items))
            }
            Builtin::Set { list, result } => {
                let items = expect_list("set", &b.apply(list))?;
                let mut seen = HashSet::new();
                let dedup: Vec<Term> = items.into_iter().filter(|t| seen.insert(t.clone())).collect();
                b2.unify(result, &Term::List(dedup))
            }
            Builtin::ListLength { list, result } => {
                let items = expect_list("list_length", &b.apply(list))?;
                b2.unify(result, &Term::Int(items.len() as i64))
            }
            Builtin::Compare { op, lhs, rhs } => {
                let l = eval_arith(&b.apply(lhs), op.symbol())?;
                let r = eval_arith(&b.apply(rhs), op.symbol())?;
                match op {
                    CompareOp::Lt => l < r,
                    CompareOp::Le => l <= r,
                    CompareOp::Gt => l > r,
                    CompareOp::Ge => l >= r,
                    CompareOp::ArithEq => l == r,
                    CompareOp::ArithNe => l != r,
                }
            }
            Builtin::Is { result, expr } => {
                let v = eval_arith(&b.apply(expr), "is")?;
                b2.unify(result, &Term::Int(v))
            }
            Builtin::Unify { lhs, rhs } => b2.unify(lhs, rhs),
            Builtin::NotUnify { lhs, rhs } => {
                let mut probe = b.clone();
                !probe.unify(lhs, rhs)
            }
        };
        if !ok {
            return Ok(Vec::new());
        }
        let goal = b2.apply(&bi.as_term());
        Ok(vec![(b2, Arc::new(Justification { goal, kind: JustKind::Builtin, children }))])
    }
}

fn expect_list(builtin: &str, t: &Term) -> Result<Vec<Term>, EngineError> {
    match t {
        Term::List(items) => Ok(items.clone()),
        other => Err(EngineError::BuiltinTypeError { builtin: builtin.into(), arg: other.to_string() }),
    }
}

fn eval_arith(t: &Term, builtin: &str) -> Result<i64, EngineError> {
    let type_err = || EngineError::BuiltinTypeError { builtin: builtin.into(), arg: t.to_string() };
    match t {
        Term::Int(i) => Ok(*i),
        Term::Compound(op, args) if args.len() == 2 => {
            let a = eval_arith(&args[0], builtin)?;
            let c = eval_arith(&args[1], builtin)?;
            match &**op {
                "+" => a.checked_add(c).ok_or_else(type_err),
                "-" => a.checked_sub(c).ok_or_else(type_err),
                "*" => a.checked_mul(c).ok_or_else(type_err),
                "//" if c != 0 => Ok(a.div_euclid(c)),
                "mod" if c != 0 => Ok(a.rem_euclid(c)),
                _ => Err(type_err()),
            }
        }
        _ => Err(type_err()),
    }
}

/// Convenience: solve one query against a program with a fresh solver.
pub fn solve(query: &Query, program: &Program) -> Result<Answers, EngineError> {
    Solver::new(program).solve(query)
}

/// Convenience: NAF proof attempt with a fresh solver.
pub fn prove_naf(goal: &Term, program: &Program) -> Result<NafOutcome, EngineError> {
    Solver::new(program).prove_naf(goal)
}
