//! End-to-end story QA: compile, classify, query, read out, score.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;

use super::babi::QaRecord;
use super::HarnessError;
use crate::engine::{check_justification, render_with, Phrasebook, Rule, Solver, DEFAULT_DEPTH_LIMIT};
use crate::knowledge::{
    answers_match, candidates, extract_answer, timeline, AnswerKind, CommonsenseKB, QuestionTable, QuestionType,
};
use crate::lexicon::Lexicon;
use crate::semgen::{story_to_program, StoryFacts};
use crate::syntax::{resolve_anaphora, Frontend, ParseTree};

/// QA tasks with question templates.
pub const QA_TASKS: [u32; 9] = [1, 2, 5, 6, 7, 8, 9, 10, 11];

pub fn qa_task_name(task: u32) -> Option<&'static str> {
    Some(match task {
        1 => "single-supporting-fact",
        2 => "two-supporting-facts",
        5 => "three-arg-relations",
        6 => "yes-no-questions",
        7 => "counting",
        8 => "lists-sets",
        9 => "simple-negation",
        10 => "indefinite-knowledge",
        11 => "basic-coreference",
        _ => return None,
    })
}

/// `qa7_counting_test.txt`
pub fn qa_file_name(task: u32, split: &str) -> Option<String> {
    qa_task_name(task).map(|n| format!("qa{task}_{n}_{split}.txt"))
}

/// Everything needed to answer questions about stories.
#[derive(Clone, Debug)]
pub struct QaSystem {
    pub frontend: Frontend,
    pub lexicon: Lexicon,
    pub kb: CommonsenseKB,
    pub questions: QuestionTable,
    pub phrasebook: Phrasebook,
    pub depth_limit: usize,
}

impl Default for QaSystem {
    fn default() -> Self {
        QaSystem {
            frontend: Frontend::default(),
            lexicon: Lexicon::bundled(),
            kb: CommonsenseKB::bundled(),
            questions: QuestionTable::bundled().clone(),
            phrasebook: Phrasebook::default(),
            depth_limit: DEFAULT_DEPTH_LIMIT,
        }
    }
}

/// A story compiled once and queried at any prefix.
#[derive(Clone, Debug)]
pub struct CompiledStory {
    pub trees: Vec<ParseTree>,
    pub facts: StoryFacts,
    pub diagnostics: Vec<String>,
}

impl CompiledStory {
    /// Facts of the first `k` statements plus their timeline.
    pub fn prefix_rules(&self, k: usize) -> Vec<Rule> {
        let mut rules: Vec<Rule> =
            self.facts.facts.iter().filter(|f| f.time as usize <= k).map(|f| f.to_rule()).collect();
        rules.extend(timeline(k as u32));
        rules
    }
}

#[derive(Clone, Debug)]
pub struct QaOutcome {
    pub qtype: QuestionType,
    pub query: String,
    pub answer: String,
    pub candidates: Vec<String>,
    pub justification: String,
    /// Every enumerated answer's proof tree passed the checker.
    pub justified: bool,
    pub solve_seconds: f64,
}

impl QaSystem {
    pub fn compile(&self, sentences: &[&str]) -> Result<CompiledStory, crate::Error> {
        let trees = sentences.iter().map(|s| self.frontend.parse(s)).collect::<Result<Vec<_>, _>>()?;
        Ok(self.compile_trees(&trees))
    }

    /// Compiles already parsed sentences.
    pub fn compile_trees(&self, trees: &[ParseTree]) -> CompiledStory {
        let resolved = resolve_anaphora(trees, &self.frontend.vocab);
        let facts = story_to_program(&resolved.trees, &self.lexicon);
        let mut diagnostics: Vec<String> = resolved.unresolved.iter().map(|e| e.to_string()).collect();
        diagnostics.extend(facts.diagnostics.iter().map(|(t, e)| format!("t{t}: {e}")));
        CompiledStory { trees: resolved.trees, facts, diagnostics }
    }

    /// Answers a question asked after the first `context` statements.
    pub fn answer(&self, story: &CompiledStory, context: usize, question: &str) -> Result<QaOutcome, crate::Error> {
        let start = Instant::now();
        let tree = self.frontend.parse(question)?;
        let facts = story.prefix_rules(context);
        let mut classified = self.questions.classify(&tree)?;
        classified.refine_with_story(&facts);
        let plan = self.questions.plan(&self.kb, &classified, context as u32)?;
        let program = self.kb.with_story(facts)?;
        let mut solver = Solver::with_depth_limit(&program, self.depth_limit);
        let answers = solver.solve(&plan.query)?;
        let answer = extract_answer(&answers, &plan)?;
        let justified = answers.iter().all(|a| check_justification(&a.justification, &program).is_ok());
        let chosen = answers.iter().find(|a| match plan.answer_kind {
            AnswerKind::Entity | AnswerKind::Before => a
                .get(&plan.answer_var)
                .and_then(|t| t.as_atom())
                .is_some_and(|v| crate::knowledge::strip_determiner(v) == answer),
            AnswerKind::YesNoMaybe => {
                a.get(&plan.answer_var).and_then(|t| t.as_atom()) == plan.args.get("location").map(String::as_str)
            }
            _ => true,
        });
        let justification = match chosen {
            Some(a) => render_with(&a.justification, self.depth_limit, &self.phrasebook),
            None => format!("no proof of {}\n", plan.query_text),
        };
        Ok(QaOutcome {
            qtype: classified.qtype,
            query: plan.query_text.clone(),
            candidates: candidates(&answers, &plan),
            answer,
            justification,
            justified,
            solve_seconds: start.elapsed().as_secs_f64(),
        })
    }

    /// Compiles a story text and answers one question at its end.
    pub fn ask(&self, story: &[&str], question: &str) -> Result<QaOutcome, crate::Error> {
        let compiled = self.compile(story)?;
        self.answer(&compiled, story.len(), question)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QaRow {
    pub story_id: usize,
    pub line: usize,
    pub question: String,
    pub gold: String,
    pub system: String,
    pub correct: bool,
    pub qtype: String,
    pub candidates: Vec<String>,
    pub justification: String,
    pub justified: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaskReport {
    pub task_id: String,
    pub n_questions: usize,
    pub n_correct: usize,
    pub accuracy: f64,
    pub mean_seconds_per_question: f64,
    pub mean_compile_seconds: f64,
    pub mean_solve_seconds: f64,
    pub mismatches: Vec<QaRow>,
    pub rows: Vec<QaRow>,
    /// Answers whose proof tree failed the checker.
    pub unjustified: usize,
}

fn tsv_field(s: &str) -> String {
    s.replace(['\t', '\n'], " ")
}

impl TaskReport {
    /// One row per question. Timing is left out so reports are reproducible.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("story\tline\tquestion\tgold\tsystem\tcorrect\tqtype\tcandidates\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.story_id,
                r.line,
                tsv_field(&r.question),
                tsv_field(&r.gold),
                tsv_field(&r.system),
                r.correct as u8,
                r.qtype,
                tsv_field(&r.candidates.join(","))
            );
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = format!(
            "task {}: {}/{} correct ({:.1}%), {:.4} s/question (compile {:.4}, solve {:.4})\n",
            self.task_id,
            self.n_correct,
            self.n_questions,
            self.accuracy,
            self.mean_seconds_per_question,
            self.mean_compile_seconds,
            self.mean_solve_seconds
        );
        for m in &self.mismatches {
            let _ = writeln!(
                out,
                "  story {} line {}: {} gold={} system={} candidates=[{}]",
                m.story_id,
                m.line,
                m.question,
                m.gold,
                m.system,
                m.candidates.join(",")
            );
            for l in m.justification.lines() {
                let _ = writeln!(out, "      {l}");
            }
        }
        out
    }
}

pub(crate) fn percent(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        100.0 * n as f64 / d as f64
    }
}

struct StoryResult {
    rows: Vec<QaRow>,
    compile_seconds: f64,
    solve_seconds: f64,
}

fn run_story(system: &QaSystem, rec: &QaRecord) -> StoryResult {
    let start = Instant::now();
    let texts: Vec<&str> = rec.sentences.iter().map(|(_, s)| s.as_str()).collect();
    let compiled = system.compile(&texts);
    let compile_seconds = start.elapsed().as_secs_f64();
    let mut solve_seconds = 0.0;
    let mut rows = Vec::new();
    for q in &rec.questions {
        let outcome = compiled
            .as_ref()
            .map_err(|e| e.to_string())
            .and_then(|c| system.answer(c, q.context, &q.text).map_err(|e| e.to_string()));
        let row = match outcome {
            Ok(o) => {
                solve_seconds += o.solve_seconds;
                QaRow {
                    story_id: rec.story_id,
                    line: q.line,
                    question: q.text.clone(),
                    gold: q.answer.clone(),
                    correct: answers_match(&o.answer, &q.answer),
                    system: o.answer,
                    qtype: o.qtype.to_string(),
                    candidates: o.candidates,
                    justification: o.justification,
                    justified: o.justified,
                }
            }
            Err(e) => QaRow {
                story_id: rec.story_id,
                line: q.line,
                question: q.text.clone(),
                gold: q.answer.clone(),
                system: format!("<error: {e}>"),
                correct: false,
                qtype: "-".into(),
                candidates: Vec::new(),
                justification: String::new(),
                justified: true,
            },
        };
        rows.push(row);
    }
    StoryResult { rows, compile_seconds, solve_seconds }
}

/// Runs every question of every story; stories are evaluated in parallel.
pub fn run_qa_task(task_id: u32, records: &[QaRecord], system: &QaSystem) -> Result<TaskReport, HarnessError> {
    if !QA_TASKS.contains(&task_id) {
        return Err(HarnessError::UnsupportedTask(format!("qa task {task_id}")));
    }
    let results: Vec<StoryResult> = records.par_iter().map(|r| run_story(system, r)).collect();
    let rows: Vec<QaRow> = results.iter().flat_map(|r| r.rows.iter().cloned()).collect();
    let n = rows.len();
    let n_correct = rows.iter().filter(|r| r.correct).count();
    let compile: f64 = results.iter().map(|r| r.compile_seconds).sum();
    let solve: f64 = results.iter().map(|r| r.solve_seconds).sum();
    let per = |x: f64| if n == 0 { 0.0 } else { x / n as f64 };
    Ok(TaskReport {
        task_id: task_id.to_string(),
        n_questions: n,
        n_correct,
        accuracy: percent(n_correct, n),
        mean_seconds_per_question: per(compile + solve),
        mean_compile_seconds: per(compile),
        mean_solve_seconds: per(solve),
        mismatches: rows.iter().filter(|r| !r.correct).cloned().collect(),
        unjustified: rows.iter().filter(|r| !r.justified).count(),
        rows,
    })
}
