use std::path::PathBuf;
use std::process::ExitCode;

use arena::analyze::{analysis_report, parse_matches};
use arena::report::{prepare_out_dir, write_atomic, write_reports};
use arena::{run_tournament, score, ConfigError, ScenarioSource, TournamentConfig, TournamentError};
use clap::{Args, Parser, Subcommand};
use multideal::agents::AgentSpec;
use multideal::record::{replay, MatchRecord, RecordError, ReplayKind};
use multideal::scenario::{generate, scenario_to_string, Family, GenParams};

#[derive(Parser)]
#[command(name = "arena", version, about = "Multi-deal negotiation tournaments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a round-robin tournament and write reports.
    Tournament(TournamentArgs),
    /// Scenario utilities.
    #[command(subcommand)]
    Scenario(ScenarioCommand),
    /// Summarize a match log.
    Analyze {
        #[arg(long)]
        matches: PathBuf,
        /// List Nash distances per match.
        #[arg(long)]
        nash: bool,
        /// Report how many deals were Pareto efficient.
        #[arg(long)]
        pareto: bool,
    },
    /// Audit a recorded match and re-run it from its seed.
    Replay {
        /// A JSON match record, or a path to a JSONL log.
        #[arg(long = "match")]
        record: String,
        /// 1-based line to replay when given a log; all lines otherwise.
        #[arg(long)]
        line: Option<usize>,
    },
}

#[derive(Args)]
struct TournamentArgs {
    /// Comma-separated agent specs, e.g. `contingent:p=0.8,conceder,random`.
    #[arg(long)]
    agents: String,
    #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
    scenario_dir: Option<PathBuf>,
    /// Generated scenarios as `family:count`.
    #[arg(long)]
    gen: Option<String>,
    /// Edges per generated scenario.
    #[arg(long, default_value_t = 3)]
    edges: usize,
    #[arg(long, default_value_t = 1)]
    reps: u32,
    #[arg(long, default_value_t = multideal::protocol::DEFAULT_DEADLINE_ROUNDS)]
    deadline: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum ScenarioCommand {
    /// Write a generated scenario file.
    Gen {
        #[arg(long)]
        family: Family,
        #[arg(long, default_value_t = 3)]
        edges: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Config(String),
    Io(String),
    Mismatch(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Mismatch(_) => 1,
            Failure::Config(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        if e.is_io() {
            Failure::Io(e.to_string())
        } else {
            Failure::Config(e.to_string())
        }
    }
}

fn io(e: impl std::fmt::Display) -> Failure {
    Failure::Io(e.to_string())
}

fn config(e: impl std::fmt::Display) -> Failure {
    Failure::Config(e.to_string())
}

fn tournament(args: TournamentArgs) -> Result<(), Failure> {
    let agents = AgentSpec::parse_list(&args.agents).map_err(config)?;
    let source = match (args.scenario_dir, args.gen) {
        (Some(dir), _) => ScenarioSource::Directory(dir),
        (None, Some(g)) => ScenarioSource::generated(&g, args.edges)?,
        (None, None) => return Err(Failure::Config("need --scenario-dir or --gen".into())),
    };
    let mut cfg = TournamentConfig::new(agents, source);
    cfg.reps = args.reps;
    cfg.deadline = args.deadline;
    cfg.master_seed = args.seed;
    cfg.jobs = args
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    cfg.validate()?;
    prepare_out_dir(&args.out).map_err(io)?;
    let t = run_tournament(&cfg).map_err(|e| match e {
        TournamentError::Config(c) => Failure::from(c),
        other => Failure::Io(other.to_string()),
    })?;
    let scores = score(&t.matches, &cfg.agent_names());
    write_reports(&args.out, &t, &scores).map_err(io)?;
    print!("{}", arena::report::scores_table(&scores));
    log::info!("reports written to {}", args.out.display());
    Ok(())
}

fn scenario_gen(family: Family, edges: usize, seed: u64, out: PathBuf) -> Result<(), Failure> {
    let scenario = generate(family, &GenParams::new(edges, seed)).map_err(config)?;
    write_atomic(&out, scenario_to_string(&scenario).as_bytes()).map_err(io)?;
    println!("{} -> {}", scenario.id(), out.display());
    Ok(())
}

fn analyze(path: PathBuf, nash: bool, pareto: bool) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&path).map_err(|e| io(format!("{}: {e}", path.display())))?;
    let matches = parse_matches(&text).map_err(config)?;
    print!("{}", analysis_report(&matches, nash, pareto).map_err(config)?);
    Ok(())
}

fn replay_records(arg: String, line: Option<usize>) -> Result<(), Failure> {
    let records: Vec<(usize, MatchRecord)> = if arg.trim_start().starts_with('{') {
        vec![(1, MatchRecord::from_json(&arg).map_err(config)?)]
    } else {
        let text = std::fs::read_to_string(&arg).map_err(|e| io(format!("{arg}: {e}")))?;
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(n, l)| !l.trim().is_empty() && line.is_none_or(|want| *n == want))
            .collect();
        if lines.is_empty() {
            return Err(Failure::Config(format!("{arg}: no match record{}", line.map_or(String::new(), |n| format!(" on line {n}")))));
        }
        lines
            .into_iter()
            .map(|(n, l)| MatchRecord::from_json(l).map(|r| (n, r)).map_err(|e| config(format!("line {n}: {e}"))))
            .collect::<Result<_, _>>()?
    };
    let mut failed = 0;
    for (n, r) in &records {
        match replay(r) {
            Ok(ReplayKind::Rerun) => println!("match {} (line {n}): identical", r.match_id),
            Ok(ReplayKind::AuditOnly) => println!("match {} (line {n}): audit ok, center not replayable", r.match_id),
            Err(e @ (RecordError::Mismatch(_) | RecordError::Protocol(_) | RecordError::Outcome(_))) => {
                failed += 1;
                println!("match {} (line {n}): {e}", r.match_id);
            }
            Err(e) => return Err(config(format!("match {} (line {n}): {e}", r.match_id))),
        }
    }
    if failed > 0 {
        return Err(Failure::Mismatch(format!("{failed} of {} matches did not replay", records.len())));
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Tournament(args) => tournament(args),
        Command::Scenario(ScenarioCommand::Gen { family, edges, seed, out }) => scenario_gen(family, edges, seed, out),
        Command::Analyze { matches, nash, pareto } => analyze(matches, nash, pareto),
        Command::Replay { record, line } => replay_records(record, line),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Config(m) | Failure::Io(m) | Failure::Mismatch(m)) = &f;
            eprintln!("arena: {m}");
            ExitCode::from(f.code())
        }
    }
}
