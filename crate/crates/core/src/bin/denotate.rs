use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use denotate::dialog::{DialogAgent, DialogState};
use denotate::engine::{check_justification, parse_query, render_with, Solver};
use denotate::harness::{
    dialog_file_name, qa_file_name, read_babi_dialog, read_babi_qa, run_dialog_task, run_qa_task, serve_http,
    story_sentences, HarnessError, QaSystem, ServerConfig, DIALOG_TASKS, QA_TASKS,
};
use denotate::knowledge::load_kb;
use denotate::lexicon::load_lexicon;
use denotate::syntax::Frontend;
use denotate::Error;

const EXIT_FORMAT: u8 = 1;
const EXIT_ACCURACY: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(version, about = "Controlled English to logic facts, goal-directed QA and a reservation dialog agent")]
struct Cli {
    /// Lexicon directory (classes.json and be_mappings.json).
    #[arg(long, global = true)]
    lexicon: Option<PathBuf>,
    /// Commonsense rule file for QA.
    #[arg(long, global = true)]
    kb: Option<PathBuf>,
    /// Directory with controlled.cfg and lemmas.tsv.
    #[arg(long, global = true)]
    grammar: Option<PathBuf>,
    /// Seed for the randomized test generators (exported as DENOTATE_SEED).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    depth_limit: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a story to timestamped facts.
    Compile {
        story: PathBuf,
        /// Bracketed parse trees, one per line, used instead of the parser.
        #[arg(long)]
        trees: Option<PathBuf>,
    },
    /// Run queries against a compiled story and the commonsense KB.
    Query {
        story: PathBuf,
        query_file: PathBuf,
        #[arg(long)]
        justify: bool,
    },
    /// Score a bAbI QA task.
    Qa {
        #[arg(long)]
        task: u32,
        #[arg(long, env = "DATA_DIR")]
        data: Option<PathBuf>,
        /// Only the first K stories.
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Exit 2 when accuracy (percent) is below this.
        #[arg(long)]
        assert_accuracy: Option<f64>,
    },
    /// Replay a bAbI dialog task.
    Dialog {
        #[arg(long)]
        task: u32,
        #[arg(long)]
        oov: bool,
        #[arg(long, env = "DATA_DIR")]
        data: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        assert_accuracy: Option<f64>,
    },
    /// Serve the dialog HTTP API and the chat UI.
    Serve {
        #[arg(long, env = "PORT", default_value_t = 8080)]
        port: u16,
    },
    /// Talk to the reservation agent in the terminal.
    Repl,
}

enum Failure {
    Usage(String),
    Accuracy(String),
    Other(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Harness(HarnessError::UnsupportedTask(t)) => Failure::Usage(format!("unsupported task: {t}")),
            e => Failure::Other(e),
        }
    }
}

fn io(path: &Path, e: std::io::Error) -> Error {
    Error::Io { path: path.display().to_string(), msg: e.to_string() }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| io(path, e))
}

fn smoke_dir(kind: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/smoke").join(kind)
}

fn qa_system(cli: &Cli) -> Result<QaSystem, Error> {
    let mut sys = QaSystem::default();
    if let Some(dir) = &cli.grammar {
        sys.frontend = Frontend::load_dir(dir)?;
    }
    if let Some(dir) = &cli.lexicon {
        sys.lexicon = load_lexicon(dir)?;
    }
    if let Some(path) = &cli.kb {
        sys.kb = load_kb(path)?;
    }
    if let Some(d) = cli.depth_limit {
        sys.depth_limit = d;
    }
    Ok(sys)
}

fn dialog_agent(cli: &Cli) -> Result<DialogAgent, Error> {
    let mut agent = DialogAgent::default();
    if let Some(dir) = &cli.grammar {
        agent.frontend = Frontend::load_dir(dir)?;
    }
    if let Some(dir) = &cli.lexicon {
        agent.lexicon = load_lexicon(dir)?;
    }
    if let Some(d) = cli.depth_limit {
        agent.depth_limit = d;
    }
    Ok(agent)
}

fn check_accuracy(got: f64, want: Option<f64>) -> Result<(), Failure> {
    match want {
        Some(x) if got < x => Err(Failure::Accuracy(format!("accuracy {got:.1} below {x:.1}"))),
        _ => Ok(()),
    }
}

fn write_report(path: &Option<PathBuf>, tsv: &str) -> Result<(), Error> {
    if let Some(p) = path {
        std::fs::write(p, tsv).map_err(|e| io(p, e))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Compile { story, trees } => {
            let sys = qa_system(cli)?;
            let compiled = match trees {
                Some(path) => {
                    let text = read(path)?;
                    let parsed = text
                        .lines()
                        .filter(|l| !l.trim().is_empty())
                        .map(|l| sys.frontend.read_bracketed(l))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(Error::from)?;
                    sys.compile_trees(&parsed)
                }
                None => {
                    let sentences = story_sentences(&read(story)?);
                    let refs: Vec<&str> = sentences.iter().map(String::as_str).collect();
                    sys.compile(&refs)?
                }
            };
            print!("{}", compiled.facts.render());
            for d in &compiled.diagnostics {
                eprintln!("warning: {d}");
            }
        }
        Command::Query { story, query_file, justify } => {
            let sys = qa_system(cli)?;
            let sentences = story_sentences(&read(story)?);
            let refs: Vec<&str> = sentences.iter().map(String::as_str).collect();
            let compiled = sys.compile(&refs)?;
            let program = sys.kb.with_story(compiled.prefix_rules(refs.len())).map_err(Error::from)?;
            for line in read(query_file)?.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('%')) {
                let query = parse_query(line).map_err(Error::from)?;
                let answers = Solver::with_depth_limit(&program, sys.depth_limit).solve(&query).map_err(Error::from)?;
                println!("{query}");
                if answers.is_empty() {
                    println!("  no");
                }
                for a in answers.iter() {
                    let b: Vec<String> = a.bindings.iter().map(|(k, v)| format!("{k} = {v}")).collect();
                    println!("  {}", if b.is_empty() { "yes".to_string() } else { b.join(", ") });
                    if *justify {
                        print!("{}", render_with(&a.justification, usize::MAX, &sys.phrasebook));
                        if let Err(e) = check_justification(&a.justification, &program) {
                            println!("  invalid justification: {e}");
                        }
                    }
                }
            }
        }
        Command::Qa { task, data, limit, report, assert_accuracy } => {
            let name = qa_file_name(*task, "test")
                .filter(|_| QA_TASKS.contains(task))
                .ok_or_else(|| Failure::Usage(format!("unsupported qa task {task}; choose from {QA_TASKS:?}")))?;
            let dir = data.clone().unwrap_or_else(|| smoke_dir("qa"));
            let mut records = read_babi_qa(&dir.join(name)).map_err(Error::from)?;
            if let Some(k) = limit {
                records.truncate(*k);
            }
            let rep = run_qa_task(*task, &records, &qa_system(cli)?).map_err(Error::from)?;
            write_report(report, &rep.to_tsv())?;
            print!("{}", rep.summary());
            check_accuracy(rep.accuracy, *assert_accuracy)?;
        }
        Command::Dialog { task, oov, data, report, assert_accuracy } => {
            let name = dialog_file_name(*task, *oov).ok_or_else(|| {
                Failure::Usage(format!("unsupported dialog task {task}; choose from {DIALOG_TASKS:?}"))
            })?;
            let dir = data.clone().unwrap_or_else(|| smoke_dir("dialog"));
            let records = read_babi_dialog(&dir.join(name)).map_err(Error::from)?;
            let rep = run_dialog_task(*task, *oov, &records, &dialog_agent(cli)?).map_err(Error::from)?;
            write_report(report, &rep.to_tsv())?;
            print!("{}", rep.summary());
            check_accuracy(rep.per_response_accuracy, *assert_accuracy)?;
        }
        Command::Serve { port } => {
            let config = ServerConfig { port: *port, ..ServerConfig::from_env() };
            let agent = dialog_agent(cli)?;
            let rt = tokio::runtime::Runtime::new().map_err(|e| io(Path::new("tokio runtime"), e))?;
            rt.block_on(serve_http(config, agent))?;
        }
        Command::Repl => {
            let agent = dialog_agent(cli)?;
            let mut state = DialogState::new("repl");
            let stdin = std::io::stdin();
            eprintln!("type an utterance; :state shows the dialog state, :why the last justification, :quit exits");
            let mut out = std::io::stdout();
            let _ = write!(out, "> ");
            let _ = out.flush();
            for line in stdin.lock().lines() {
                let line = line.map_err(|e| io(Path::new("stdin"), e))?;
                match line.trim() {
                    ":quit" => break,
                    ":state" => println!("{}", state.to_json()),
                    ":why" => println!("{}", state.last_justification),
                    "" => {}
                    text => match agent.step(&mut state, text) {
                        Ok(o) => println!("{}  [{}]", o.response, o.to),
                        Err(e) => eprintln!("error: {e}"),
                    },
                }
                let _ = write!(out, "> ");
                let _ = out.flush();
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(seed) = cli.seed {
        std::env::set_var("DENOTATE_SEED", seed.to_string());
    }
    tracing_subscriber::fmt().with_writer(std::io::stderr).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Accuracy(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(EXIT_ACCURACY)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FORMAT)
        }
    }
}
