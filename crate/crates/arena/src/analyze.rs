use std::fmt::Write as _;

use multideal::outcome::Slot;
use multideal::record::{slot_points, MatchRecord, RecordError};
use thiserror::Error;

use crate::report::scores_table;
use crate::score::score;

#[derive(Debug, Error)]
#[error("line {line}: {source}")]
pub struct LineError {
    pub line: usize,
    pub source: RecordError,
}

/// Parses a JSONL match log, skipping blank lines. Line numbers are 1-based.
pub fn parse_matches(text: &str) -> Result<Vec<MatchRecord>, LineError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| MatchRecord::from_json(l).map_err(|source| LineError { line: i + 1, source }))
        .collect()
}

/// Agent names in order of first appearance.
pub fn agents_in(matches: &[MatchRecord]) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    for m in matches {
        for a in std::iter::once(&m.center).chain(&m.edges) {
            if !names.contains(a) {
                names.push(a.clone());
            }
        }
    }
    names
}

/// For each slot, whether the deal reached is Pareto efficient in that
/// slot's bilateral space; `None` where there was no deal.
pub fn pareto_efficiency(m: &MatchRecord) -> Result<Vec<Option<bool>>, RecordError> {
    let scenario = m.scenario()?;
    let agreements = &m.result.agreements;
    (0..scenario.edge_count())
        .map(|k| {
            let Some(deal) = agreements.get(k).and_then(Slot::deal) else {
                return Ok(None);
            };
            let points = slot_points(&scenario, agreements, k)?;
            let a = &points[scenario.subnegotiation(k).space.index_of(deal)];
            let dominated = points
                .iter()
                .any(|p| p.u_a >= a.u_a && p.u_b >= a.u_b && (p.u_a > a.u_a || p.u_b > a.u_b));
            Ok(Some(!dominated))
        })
        .collect()
}

pub fn analysis_report(matches: &[MatchRecord], nash: bool, pareto: bool) -> Result<String, RecordError> {
    let agents = agents_in(matches);
    let slots: usize = matches.iter().map(|m| m.slots.len()).sum();
    let agreed: usize = matches.iter().map(MatchRecord::agreement_count).sum();
    let faults: usize = matches.iter().map(|m| m.faults).sum();
    let mut out = format!(
        "{} matches, {} agents, {slots} slots, {agreed} agreements, {faults} faults\n\n",
        matches.len(),
        agents.len()
    );
    out.push_str(&scores_table(&score(matches, &agents)));

    if nash {
        out.push_str("\nnash distance by match (agreed slots)\n");
        for m in matches {
            let d: Vec<String> = m
                .slots
                .iter()
                .map(|s| s.nash_distance.map_or_else(|| "-".into(), |d| format!("{d:.3}")))
                .collect();
            let _ = writeln!(out, "{:>6}  {:<12}  {}", m.match_id, m.center, d.join(" "));
        }
    }
    if pareto {
        let (mut efficient, mut deals) = (0, 0);
        for m in matches {
            for e in pareto_efficiency(m)?.into_iter().flatten() {
                deals += 1;
                efficient += e as usize;
            }
        }
        let rate = if deals == 0 { 0.0 } else { efficient as f64 / deals as f64 };
        let _ = writeln!(out, "\npareto efficient deals: {efficient}/{deals} ({rate:.3})");
    }
    Ok(out)
}
