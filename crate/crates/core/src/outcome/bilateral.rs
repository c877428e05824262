//! Two-party analytics over one subnegotiation: Pareto frontier, Nash
//! bargaining point (disagreement at the origin) and Nash distance.

use serde::{Deserialize, Serialize};

use crate::error::OutcomeError;
use crate::outcome::{Outcome, OutcomeSpace, SideUtility, ENUMERATION_CAP};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BilateralPoint {
    /// Canonical index of `outcome` in its space.
    pub index: usize,
    pub outcome: Outcome,
    pub u_a: f64,
    pub u_b: f64,
}

impl BilateralPoint {
    pub fn product(&self) -> f64 {
        self.u_a * self.u_b
    }

    pub fn utilities(&self) -> (f64, f64) {
        (self.u_a, self.u_b)
    }
}

/// Tabulates both utilities over the whole space.
pub fn bilateral_points(
    space: &OutcomeSpace,
    u_a: &SideUtility,
    u_b: &SideUtility,
) -> Result<Vec<BilateralPoint>, OutcomeError> {
    space.bounded_len(ENUMERATION_CAP)?;
    space
        .enumerate()
        .enumerate()
        .map(|(index, o)| {
            Ok(BilateralPoint {
                index,
                u_a: u_a.eval(space, &o)?,
                u_b: u_b.eval(space, &o)?,
                outcome: o,
            })
        })
        .collect()
}

/// Weakly undominated subset, returned in canonical-index order.
pub fn pareto_frontier(points: &[BilateralPoint]) -> Vec<BilateralPoint> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| {
        let (p, q) = (&points[i], &points[j]);
        q.u_a
            .total_cmp(&p.u_a)
            .then(q.u_b.total_cmp(&p.u_b))
            .then(p.index.cmp(&q.index))
    });

    // Sweep by decreasing u_a. Within a group of equal u_a only the top u_b
    // survives, and only if it beats every u_b seen at strictly larger u_a.
    let mut keep = Vec::new();
    let mut best_b = f64::NEG_INFINITY;
    let mut g = 0;
    while g < order.len() {
        let ua = points[order[g]].u_a;
        let mut end = g;
        while end < order.len() && points[order[end]].u_a == ua {
            end += 1;
        }
        let top_b = points[order[g]].u_b;
        if top_b > best_b {
            keep.extend(order[g..end].iter().copied().filter(|&i| points[i].u_b == top_b));
            best_b = top_b;
        }
        g = end;
    }
    keep.sort_by_key(|&i| points[i].index);
    keep.into_iter().map(|i| points[i].clone()).collect()
}

/// Product-maximizing point; ties go to the lowest canonical index.
pub fn nash_point_of(points: &[BilateralPoint]) -> Option<&BilateralPoint> {
    let mut best: Option<&BilateralPoint> = None;
    for p in points {
        match best {
            Some(b) if p.product() < b.product() || (p.product() == b.product() && p.index >= b.index) => {}
            _ => best = Some(p),
        }
    }
    best
}

pub fn nash_point(space: &OutcomeSpace, u_a: &SideUtility, u_b: &SideUtility) -> Result<BilateralPoint, OutcomeError> {
    let points = bilateral_points(space, u_a, u_b)?;
    Ok(nash_point_of(&points).cloned().expect("spaces are never empty"))
}

pub fn nash_distance(achieved: (f64, f64), nash: (f64, f64)) -> f64 {
    (achieved.0 - nash.0).hypot(achieved.1 - nash.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(pairs: &[(f64, f64)]) -> Vec<BilateralPoint> {
        pairs
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| BilateralPoint {
                index: i,
                outcome: Outcome::new(vec![i]),
                u_a: a,
                u_b: b,
            })
            .collect()
    }

    fn pairs(ps: &[BilateralPoint]) -> Vec<(f64, f64)> {
        ps.iter().map(BilateralPoint::utilities).collect()
    }

    #[test]
    fn frontier_keeps_tradeoff_curve() {
        let p = pts(&[(1.0, 0.2), (0.6, 0.6), (0.2, 1.0)]);
        assert_eq!(pairs(&pareto_frontier(&p)), vec![(1.0, 0.2), (0.6, 0.6), (0.2, 1.0)]);
    }

    #[test]
    fn frontier_drops_dominated() {
        let p = pts(&[(0.5, 0.5), (0.6, 0.6)]);
        assert_eq!(pairs(&pareto_frontier(&p)), vec![(0.6, 0.6)]);
        let single = pts(&[(0.3, 0.1)]);
        assert_eq!(pareto_frontier(&single), single);
    }

    #[test]
    fn frontier_handles_ties() {
        // equal points do not dominate each other; equal u_a with lower u_b does not survive
        let p = pts(&[(0.5, 0.5), (0.5, 0.5), (0.5, 0.4), (0.4, 0.5), (0.2, 0.9)]);
        assert_eq!(pairs(&pareto_frontier(&p)), vec![(0.5, 0.5), (0.5, 0.5), (0.2, 0.9)]);
    }

    #[test]
    fn nash_examples() {
        let p = pts(&[(1.0, 0.2), (0.6, 0.6), (0.2, 1.0)]);
        let n = nash_point_of(&p).unwrap();
        assert_eq!(n.index, 1);
        assert!((n.product() - 0.36).abs() < 1e-12);

        let zeros = pts(&[(0.0, 1.0), (1.0, 0.0), (0.0, 0.0)]);
        assert_eq!(nash_point_of(&zeros).unwrap().index, 0);
    }

    #[test]
    fn distance_examples() {
        assert_eq!(nash_distance((0.6, 0.6), (0.6, 0.6)), 0.0);
        assert!((nash_distance((0.0, 0.0), (0.6, 0.6)) - 0.72f64.sqrt()).abs() < 1e-12);
        assert!((nash_distance((0.0, 0.0), (0.6, 0.6)) - 0.8485).abs() < 1e-4);
        assert!((nash_distance((1.0, 0.0), (0.0, 1.0)) - std::f64::consts::SQRT_2).abs() < 1e-12);
    }
}
