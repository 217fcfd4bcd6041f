use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use indrec_core::candidates::generate_capped;
use indrec_core::frontend::{parse_candidate, parse_theory, Candidate, ParseOptions, TheoryEnv};
use indrec_core::harness::{evaluate, EvalReport};
use indrec_core::heuristics::{default_heuristics, load_heuristics, score_one, EvalContext, Evaluator, HeuristicOutcome, HeuristicSet, Phase, TreeIndex};
use indrec_core::kernel::Prop;
use indrec_core::pipeline::{advise_with_budget, expand_arbitrary, Config, PipelineError, Recommendation};
use indrec_core::tactic;

const EXIT_INPUT: u8 = 1;
const EXIT_UNKNOWN_GOAL: u8 = 2;
const EXIT_PRUNED: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "indrec", version, about = "Recommend induction tactics for equational goals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank induction tactics for goals of a theory file.
    Advise {
        path: PathBuf,
        /// Only this goal; all goals otherwise.
        #[arg(long)]
        goal: Option<String>,
        #[arg(long, default_value_t = 10)]
        top: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Show how each heuristic scores one tactic.
    Explain {
        path: PathBuf,
        #[arg(long)]
        goal: String,
        /// The tactic, e.g. "induct xs arbitrary: ys".
        #[arg(long)]
        candidate: String,
        #[command(flatten)]
        common: Common,
    },
    /// Measure coincidence with the expected tactics of a corpus directory.
    Eval {
        dir: PathBuf,
        #[arg(long, default_value_t = 10)]
        top: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Print an intermediate stage of the pipeline.
    Dump {
        path: PathBuf,
        #[arg(long)]
        goal: String,
        #[arg(long, value_enum)]
        stage: Option<Stage>,
        /// Same as --stage candidates.
        #[arg(long)]
        dump_candidates: bool,
        /// Same as --stage subgoals.
        #[arg(long)]
        dump_subgoals: bool,
        /// Tactic for the subgoals and expanded stages.
        #[arg(long)]
        candidate: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    timeout_ms: Option<u64>,
    /// Heuristic file replacing the shipped set.
    #[arg(long)]
    heuristics: Option<PathBuf>,
    #[arg(long)]
    json: bool,
    /// Parse without the standard prelude.
    #[arg(long)]
    no_prelude: bool,
    /// Count a structural rule on a single term as matching no rule.
    #[arg(long)]
    normalize_default_rule: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Stage {
    /// Step 1: every generated candidate.
    Candidates,
    /// Step 2: each candidate with its verdict.
    Pruned,
    /// Step 3: induction scores of the surviving candidates.
    Scores,
    /// Step 4: arbitrary sets expanded from one candidate.
    Expanded,
    /// Subgoals produced by one candidate.
    Subgoals,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

fn fail<T>(code: u8, message: impl Into<String>) -> Result<T, Failure> {
    Err(Failure {
        code,
        message: message.into(),
    })
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Failure {
        let code = match e {
            PipelineError::UnknownGoal(_) => EXIT_UNKNOWN_GOAL,
            PipelineError::Heuristic(_) => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("indrec: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<String, Failure> {
    match command {
        Command::Advise { path, goal, top, common } => advise(&path, goal.as_deref(), top, &common),
        Command::Explain {
            path,
            goal,
            candidate,
            common,
        } => explain(&path, &goal, &candidate, &common),
        Command::Eval { dir, top, common } => eval(&dir, top, &common),
        Command::Dump {
            path,
            goal,
            stage,
            dump_candidates,
            dump_subgoals,
            candidate,
            common,
        } => {
            let stages: Vec<Stage> = stage
                .into_iter()
                .chain(dump_candidates.then_some(Stage::Candidates))
                .chain(dump_subgoals.then_some(Stage::Subgoals))
                .collect();
            match stages.as_slice() {
                [s] => dump(&path, &goal, *s, candidate.as_deref(), &common),
                [] => fail(EXIT_USAGE, "dump needs a stage: --stage NAME, --dump-candidates or --dump-subgoals"),
                _ => fail(EXIT_USAGE, "dump takes exactly one stage"),
            }
        }
    }
}

fn parse_options(common: &Common) -> ParseOptions {
    ParseOptions {
        prelude: !common.no_prelude,
    }
}

fn load_env(path: &Path, common: &Common) -> Result<TheoryEnv, Failure> {
    let text = std::fs::read_to_string(path).or_else(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))?;
    parse_theory(&text, &parse_options(common)).or_else(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn load_set(common: &Common) -> Result<HeuristicSet, Failure> {
    match &common.heuristics {
        None => Ok(default_heuristics()),
        Some(p) => {
            let text = std::fs::read_to_string(p).or_else(|e| fail(EXIT_INPUT, format!("{}: {e}", p.display())))?;
            load_heuristics(&text).or_else(|e| fail(EXIT_INPUT, format!("{}: {e}", p.display())))
        }
    }
}

fn config(common: &Common, top: usize) -> Config {
    Config {
        top_n: top,
        timeout_ms: common.timeout_ms,
        normalize_default_rule: common.normalize_default_rule,
        ..Config::default()
    }
}

fn goal_prop<'e>(env: &'e TheoryEnv, goal: &str) -> Result<&'e Prop, Failure> {
    match env.goal(goal) {
        Some(g) => Ok(&g.prop),
        None => fail(EXIT_UNKNOWN_GOAL, format!("unknown goal `{goal}`")),
    }
}

fn candidate(env: &TheoryEnv, goal: &Prop, text: &str) -> Result<Candidate, Failure> {
    parse_candidate(text, env, goal).or_else(|e| fail(EXIT_INPUT, format!("candidate `{text}`: {e}")))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct AdviceDoc<'a> {
    tool_version: &'static str,
    goal: &'a str,
    config: &'a Config,
    recommendations: &'a [Recommendation],
    timing_ms: f64,
}

/// Budget used when neither the command line nor the config sets one.
const DEFAULT_BUDGET: Duration = Duration::from_millis(5000);

fn advise(path: &Path, goal: Option<&str>, top: usize, common: &Common) -> Result<String, Failure> {
    let env = load_env(path, common)?;
    let hs = load_set(common)?;
    let config = config(common, top);
    let budget = config.timeout_ms.map_or(DEFAULT_BUDGET, Duration::from_millis);
    let goals: Vec<&str> = match goal {
        Some(g) => vec![g],
        None => env.goals.iter().map(|g| g.name.as_str()).collect(),
    };
    let mut docs = Vec::new();
    for g in &goals {
        let advice = advise_with_budget(&env, &hs, g, &config, budget)?;
        if advice.truncated {
            log::warn!("{g}: stopped after {} ms; recommendations are partial", budget.as_millis());
        }
        docs.push((*g, advice));
    }
    if common.json {
        let render: Vec<AdviceDoc> = docs
            .iter()
            .map(|(g, a)| AdviceDoc {
                tool_version: env!("CARGO_PKG_VERSION"),
                goal: g,
                config: &config,
                recommendations: &a.recommendations,
                timing_ms: a.elapsed.as_secs_f64() * 1000.0,
            })
            .collect();
        return Ok(if goal.is_some() { to_json(&render[0]) } else { to_json(&render) });
    }
    let mut out = String::new();
    for (g, a) in &docs {
        if goal.is_none() {
            writeln!(out, "goal {g}").unwrap();
        }
        for r in &a.recommendations {
            writeln!(out, "{:>2}  {:>4}  {}", r.rank, r.total, r.tactic).unwrap();
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct ExplainDoc<'a> {
    goal: &'a str,
    tactic: String,
    induction_points: i64,
    generalisation_points: i64,
    total: i64,
    heuristics: Vec<HeuristicOutcome>,
}

fn explain(path: &Path, goal: &str, text: &str, common: &Common) -> Result<String, Failure> {
    let env = load_env(path, common)?;
    let hs = load_set(common)?;
    let prop = goal_prop(&env, goal)?;
    let c = candidate(&env, prop, text)?;
    if let Err(reason) = tactic::check(&env, prop, &c) {
        return fail(EXIT_PRUNED, format!("`{c}` is pruned: {reason}"));
    }
    let ev = Evaluator::new(&env, &hs);
    let tree = TreeIndex::goal(prop);
    // Induction heuristics see the tactic before generalisation, as in the
    // pipeline.
    let bare = Candidate {
        arbitrary: Default::default(),
        ..c.clone()
    };
    let err = |e| Failure {
        code: EXIT_INPUT,
        message: format!("{e}"),
    };
    let ind = score_one(&ev, Phase::Induction, &EvalContext { tree: &tree, candidate: &bare }).map_err(err)?;
    let gen = score_one(&ev, Phase::Generalisation, &EvalContext { tree: &tree, candidate: &c }).map_err(err)?;
    let doc = ExplainDoc {
        goal,
        tactic: c.to_string(),
        induction_points: ind.points,
        generalisation_points: gen.points,
        total: ind.points + gen.points,
        heuristics: ind.breakdown.into_iter().chain(gen.breakdown).collect(),
    };
    if common.json {
        return Ok(to_json(&doc));
    }
    let width = doc.heuristics.iter().map(|h| h.name.len()).max().unwrap_or(9).max(9);
    let mut out = String::new();
    writeln!(out, "{}", doc.tactic).unwrap();
    writeln!(out, "{:<width$}  {:<14}  {:<5}  {:>6}  {:>6}", "heuristic", "phase", "holds", "weight", "points").unwrap();
    for h in &doc.heuristics {
        writeln!(
            out,
            "{:<width$}  {:<14}  {:<5}  {:>6}  {:>6}",
            h.name,
            h.phase.to_string(),
            h.holds,
            h.weight,
            h.contribution
        )
        .unwrap();
    }
    writeln!(
        out,
        "total {} (induction {}, generalisation {})",
        doc.total, doc.induction_points, doc.generalisation_points
    )
    .unwrap();
    Ok(out)
}

fn read_corpus(dir: &Path) -> Result<Vec<(String, String)>, Failure> {
    let entries = std::fs::read_dir(dir).or_else(|e| fail(EXIT_INPUT, format!("{}: {e}", dir.display())))?;
    let mut out = Vec::new();
    for entry in entries {
        let p = entry.or_else(|e| fail(EXIT_INPUT, e.to_string()))?.path();
        if p.extension().is_some_and(|x| x == "thy") {
            let text = std::fs::read_to_string(&p).or_else(|e| fail(EXIT_INPUT, format!("{}: {e}", p.display())))?;
            out.push((p.file_name().unwrap().to_string_lossy().into_owned(), text));
        }
    }
    out.sort();
    Ok(out)
}

fn eval(dir: &Path, top: usize, common: &Common) -> Result<String, Failure> {
    let sources = read_corpus(dir)?;
    let hs = load_set(common)?;
    let config = config(common, top);
    let budget = config.timeout_ms.map_or(DEFAULT_BUDGET, Duration::from_millis);
    let report = evaluate(&sources, &hs, &config, &parse_options(common), budget);
    for f in &report.failures {
        eprintln!("indrec: {}: {}", f.file, f.message);
    }
    if let Err(e) = report.check_invariants() {
        log::error!("report invariant violated: {e}");
    }
    Ok(if common.json { to_json(&report) } else { render_report(&report) })
}

fn percent(x: f64) -> String {
    format!("{:.1}%", x * 100.0)
}

fn render_report(r: &EvalReport) -> String {
    let mut out = String::new();
    for g in &r.goals {
        let rank = g.rank.map_or("-".to_string(), |k| k.to_string());
        writeln!(out, "{:<12} {:<22} rank {:>2}  {:>8.1} ms  expect {}", g.file, g.goal, rank, g.elapsed_ms, g.expected).unwrap();
    }
    writeln!(out).unwrap();
    for f in &r.files {
        let rates: Vec<String> = f.coincidence.iter().map(|c| format!("@{} {}", c.at, percent(c.rate))).collect();
        writeln!(out, "{:<12} {} goals, {} skipped  {}", f.file, f.evaluated, f.skipped, rates.join("  ")).unwrap();
    }
    writeln!(out).unwrap();
    writeln!(
        out,
        "goals: {} evaluated, {} skipped, {} failures",
        r.evaluated,
        r.skipped,
        r.failures.len()
    )
    .unwrap();
    for c in &r.coincidence {
        writeln!(out, "coincidence@{:<2}  {}", c.at, percent(c.rate)).unwrap();
    }
    for t in &r.return_rate {
        writeln!(out, "return rate {:>4} ms  {}", t.at, percent(t.rate)).unwrap();
    }
    writeln!(out, "median {:.1} ms", r.median_ms).unwrap();
    out
}

fn dump(path: &Path, goal: &str, stage: Stage, text: Option<&str>, common: &Common) -> Result<String, Failure> {
    let env = load_env(path, common)?;
    let prop = goal_prop(&env, goal)?;
    let config = config(common, 10);
    let need_candidate = || match text {
        Some(t) => candidate(&env, prop, t),
        None => fail(EXIT_USAGE, "this stage needs --candidate"),
    };
    let mut out = String::new();
    match stage {
        Stage::Candidates => {
            for c in generate_capped(&env, prop, config.candidate_cap) {
                writeln!(out, "{c}").unwrap();
            }
        }
        Stage::Pruned => {
            for c in generate_capped(&env, prop, config.candidate_cap) {
                match tactic::check(&env, prop, &c) {
                    Ok(_) => writeln!(out, "keep   {c}").unwrap(),
                    Err(reason) => writeln!(out, "prune  {c}  ({reason})").unwrap(),
                }
            }
        }
        Stage::Scores => {
            let hs = load_set(common)?;
            let ev = Evaluator::new(&env, &hs);
            let tree = TreeIndex::goal(prop);
            let start = Instant::now();
            let mut rows = Vec::new();
            for c in generate_capped(&env, prop, config.candidate_cap) {
                if tactic::check(&env, prop, &c).is_ok() {
                    let s = score_one(&ev, Phase::Induction, &EvalContext { tree: &tree, candidate: &c }).map_err(|e| Failure {
                        code: EXIT_INPUT,
                        message: e.to_string(),
                    })?;
                    rows.push((s.points, c.to_string()));
                }
            }
            rows.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
            for (points, c) in rows {
                writeln!(out, "{points:>4}  {c}").unwrap();
            }
            log::info!("scored in {:?}", start.elapsed());
        }
        Stage::Expanded => {
            let c = need_candidate()?;
            for e in expand_arbitrary(prop, &c, config.powerset_cap) {
                let verdict = match tactic::check(&env, prop, &e) {
                    Ok(_) => "keep".to_string(),
                    Err(reason) => format!("drop ({reason})"),
                };
                writeln!(out, "{e}  {verdict}").unwrap();
            }
        }
        Stage::Subgoals => {
            let c = need_candidate()?;
            match tactic::check(&env, prop, &c) {
                Ok(subgoals) => {
                    for s in subgoals {
                        writeln!(out, "{s}").unwrap();
                    }
                }
                Err(reason) => return fail(EXIT_PRUNED, format!("`{c}` is pruned: {reason}")),
            }
        }
    }
    Ok(out)
}
