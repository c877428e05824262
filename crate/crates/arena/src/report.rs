use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use multideal::record::MatchRecord;
use serde::Serialize;
use thiserror::Error;

use crate::run::Tournament;
use crate::score::ScoreRecord;

pub const SCORES_TXT: &str = "scores.txt";
pub const SCORES_CSV: &str = "scores.csv";
pub const MATCHES_JSONL: &str = "matches.jsonl";
pub const SUMMARY_JSON: &str = "summary.json";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{} is not a directory", .0.display())]
    NotADirectory(PathBuf),
    #[error("scores csv: {0}")]
    Csv(#[from] csv::Error),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ReportError + '_ {
    move |source| ReportError::Io { path: path.to_path_buf(), source }
}

/// Creates `dir` if needed and checks a file can be written there, so a bad
/// output location fails before any work is done.
pub fn prepare_out_dir(dir: &Path) -> Result<(), ReportError> {
    if dir.exists() && !dir.is_dir() {
        return Err(ReportError::NotADirectory(dir.to_path_buf()));
    }
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    Ok(())
}

/// Writes through a temp file in the same directory and renames it into
/// place, so readers never see a half-written report.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), ReportError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(contents).map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| ReportError::Io { path: path.to_path_buf(), source: e.error })?;
    Ok(())
}

fn cell(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |v| format!("{v:.3}"))
}

pub fn scores_table(scores: &[ScoreRecord]) -> String {
    let width = scores.iter().map(|s| s.agent.len()).max().unwrap_or(5).max(5);
    let mut out = format!(
        "{:>4}  {:<width$}  {:>6}  {:>6}  {:>6}  {:>6}  {:>6}\n",
        "rank", "agent", "center", "edge", "final", "nash", "agree"
    );
    for s in scores {
        let rank = s.rank.map_or_else(|| "-".into(), |r| r.to_string());
        let _ = writeln!(
            out,
            "{rank:>4}  {:<width$}  {:>6}  {:>6}  {:>6}  {:>6}  {:>6.3}{}",
            s.agent,
            cell(s.center_mean),
            cell(s.edge_mean),
            cell(s.final_score),
            cell(s.mean_nash_distance),
            s.agreement_rate,
            if s.flagged { "  (missing a role)" } else { "" }
        );
    }
    out
}

pub fn scores_csv(scores: &[ScoreRecord]) -> Result<String, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for s in scores {
        w.serialize(s)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error()).map_err(|e| ReportError::Io {
        path: SCORES_CSV.into(),
        source: e,
    })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn parse_scores_csv(text: &str) -> Result<Vec<ScoreRecord>, ReportError> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(Into::into)
}

pub fn matches_jsonl(matches: &[MatchRecord]) -> String {
    let mut out = String::new();
    for m in matches {
        out.push_str(&m.to_json_line());
        out.push('\n');
    }
    out
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    agents: Vec<String>,
    scenarios: Vec<&'a str>,
    reps: u32,
    deadline: u32,
    seed: u64,
    matches: usize,
    faults: usize,
    scores: &'a [ScoreRecord],
}

pub fn summary_json(t: &Tournament, scores: &[ScoreRecord]) -> String {
    let summary = Summary {
        agents: t.config.agent_names(),
        scenarios: t.scenarios.iter().map(|s| s.id()).collect(),
        reps: t.config.reps,
        deadline: t.config.deadline,
        seed: t.config.master_seed,
        matches: t.matches.len(),
        faults: t.matches.iter().map(|m| m.faults).sum(),
        scores,
    };
    let mut s = serde_json::to_string_pretty(&summary).expect("summary serializes");
    s.push('\n');
    s
}

/// Writes all four reports into `dir`.
pub fn write_reports(dir: &Path, t: &Tournament, scores: &[ScoreRecord]) -> Result<(), ReportError> {
    prepare_out_dir(dir)?;
    write_atomic(&dir.join(SCORES_TXT), scores_table(scores).as_bytes())?;
    write_atomic(&dir.join(SCORES_CSV), scores_csv(scores)?.as_bytes())?;
    write_atomic(&dir.join(MATCHES_JSONL), matches_jsonl(&t.matches).as_bytes())?;
    write_atomic(&dir.join(SUMMARY_JSON), summary_json(t, scores).as_bytes())?;
    Ok(())
}
