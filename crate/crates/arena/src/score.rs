use std::cmp::Reverse;

use multideal::record::MatchRecord;
use serde::{Deserialize, Serialize};

/// Per-agent tournament score. Role means are `None` when the agent never
/// played that role; `final` is then omitted and the record flagged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub rank: Option<usize>,
    pub agent: String,
    pub center_mean: Option<f64>,
    pub edge_mean: Option<f64>,
    #[serde(rename = "final")]
    pub final_score: Option<f64>,
    pub mean_nash_distance: Option<f64>,
    pub agreement_rate: f64,
    pub center_sessions: usize,
    pub edge_sessions: usize,
    pub flagged: bool,
}

impl ScoreRecord {
    pub fn from_means(agent: impl Into<String>, center_mean: Option<f64>, edge_mean: Option<f64>) -> Self {
        let final_score = match (center_mean, edge_mean) {
            (Some(c), Some(e)) => Some((c + e) / 2.0),
            _ => None,
        };
        Self {
            rank: None,
            agent: agent.into(),
            center_mean,
            edge_mean,
            final_score,
            mean_nash_distance: None,
            agreement_rate: 0.0,
            center_sessions: 0,
            edge_sessions: 0,
            flagged: final_score.is_none(),
        }
    }
}

/// Scores are compared at the three decimals they are reported with,
/// rounding half up. The small nudge keeps values such as 0.3985, which is
/// stored just below its decimal form, on the upper side.
pub fn rank_key(score: f64) -> i64 {
    (score * 1000.0 + 0.5 + 1e-9).floor() as i64
}

/// Sorts by final score, best first, and assigns competition ranks: equal
/// keys share a rank and the following rank is skipped. Unscored agents go
/// last without a rank.
pub fn rank_records(records: &mut [ScoreRecord]) {
    records.sort_by_key(|r| Reverse(r.final_score.map(rank_key)));
    let keys: Vec<Option<i64>> = records.iter().map(|r| r.final_score.map(rank_key)).collect();
    for (i, r) in records.iter_mut().enumerate() {
        r.rank = keys[i].map(|k| 1 + keys.iter().filter(|o| o.is_some_and(|o| o > k)).count());
    }
}

#[derive(Default)]
struct Tally {
    center: (f64, usize),
    edge: (f64, usize),
    nash: (f64, usize),
    slots: (usize, usize),
}

fn mean((sum, n): (f64, usize)) -> Option<f64> {
    (n > 0).then(|| sum / n as f64)
}

/// Center mean over the agent's center matches; edge mean over every
/// edge slot it played, a slot without a deal counting 0. Nash distance and
/// agreement rate cover every slot the agent took part in.
pub fn score(matches: &[MatchRecord], agents: &[String]) -> Vec<ScoreRecord> {
    let mut tallies: Vec<Tally> = agents.iter().map(|_| Tally::default()).collect();
    let index = |name: &str| agents.iter().position(|a| a == name);
    for m in matches {
        if let Some(c) = index(&m.center) {
            let t = &mut tallies[c];
            t.center.0 += m.result.center_utility;
            t.center.1 += 1;
            for s in &m.slots {
                t.slots.1 += 1;
                t.slots.0 += s.agreed as usize;
                if let Some(d) = s.nash_distance {
                    t.nash.0 += d;
                    t.nash.1 += 1;
                }
            }
        }
        for (k, edge) in m.edges.iter().enumerate() {
            let Some(e) = index(edge) else { continue };
            let t = &mut tallies[e];
            t.edge.0 += m.result.edge_utilities[k];
            t.edge.1 += 1;
            let s = &m.slots[k];
            t.slots.1 += 1;
            t.slots.0 += s.agreed as usize;
            if let Some(d) = s.nash_distance {
                t.nash.0 += d;
                t.nash.1 += 1;
            }
        }
    }
    let mut records: Vec<ScoreRecord> = agents
        .iter()
        .zip(&tallies)
        .map(|(name, t)| {
            let mut r = ScoreRecord::from_means(name.clone(), mean(t.center), mean(t.edge));
            r.mean_nash_distance = mean(t.nash);
            r.agreement_rate = if t.slots.1 == 0 { 0.0 } else { t.slots.0 as f64 / t.slots.1 as f64 };
            r.center_sessions = t.center.1;
            r.edge_sessions = t.edge.1;
            r
        })
        .collect();
    rank_records(&mut records);
    records
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_key_rounds_half_up() {
        assert_eq!(rank_key(0.3985), 399);
        assert_eq!(rank_key(0.399), 399);
        assert_eq!(rank_key(0.3984), 398);
        assert_eq!(rank_key(0.382), 382);
    }

    #[test]
    fn shared_ranks_skip() {
        let mut r = vec![
            ScoreRecord::from_means("c", Some(0.5), Some(0.1)),
            ScoreRecord::from_means("a", Some(0.714), Some(0.084)),
            ScoreRecord::from_means("none", Some(0.9), None),
            ScoreRecord::from_means("b", Some(0.733), Some(0.064)),
        ];
        rank_records(&mut r);
        let got: Vec<(&str, Option<usize>)> = r.iter().map(|r| (r.agent.as_str(), r.rank)).collect();
        assert_eq!(got, vec![("a", Some(1)), ("b", Some(1)), ("c", Some(3)), ("none", None)]);
        assert!(r[3].flagged);
    }
}
