//! Pareto frontier over (score, cost) points: higher score is better,
//! lower cost is better.

use serde::{Deserialize, Serialize};

/// One agent's position on the score-vs-cost plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreCost {
    pub score: f64,
    pub cost: f64,
}

impl ScoreCost {
    /// True when `self` dominates `other`: at least as good on both axes
    /// and strictly better on one.
    pub fn dominates(&self, other: &ScoreCost) -> bool {
        self.score >= other.score
            && self.cost <= other.cost
            && (self.score > other.score || self.cost < other.cost)
    }
}

/// Indices of the frontier members, ordered by (cost, score, index).
pub fn pareto_frontier_indices(points: &[ScoreCost]) -> Vec<usize> {
    let mut frontier: Vec<usize> = (0..points.len())
        .filter(|&i| !points.iter().any(|q| q.dominates(&points[i])))
        .collect();
    frontier.sort_by(|&a, &b| {
        points[a]
            .cost
            .partial_cmp(&points[b].cost)
            .unwrap()
            .then(points[a].score.partial_cmp(&points[b].score).unwrap())
            .then(a.cmp(&b))
    });
    frontier
}

/// Frontier members themselves, sorted by cost.
pub fn pareto_frontier(points: &[ScoreCost]) -> Vec<ScoreCost> {
    pareto_frontier_indices(points).into_iter().map(|i| points[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(score: f64, cost: f64) -> ScoreCost {
        ScoreCost { score, cost }
    }

    #[test]
    fn single_point_is_frontier() {
        assert_eq!(pareto_frontier(&[pt(10.0, 1.0)]), vec![pt(10.0, 1.0)]);
    }

    #[test]
    fn hand_example() {
        let points = [pt(50.0, 1.0), pt(60.0, 2.0), pt(40.0, 0.5), pt(55.0, 3.0)];
        let frontier = pareto_frontier(&points);
        assert_eq!(frontier, vec![pt(40.0, 0.5), pt(50.0, 1.0), pt(60.0, 2.0)]);
    }

    #[test]
    fn duplicate_dominated_point_excluded() {
        let points = [pt(50.0, 1.0), pt(40.0, 2.0), pt(40.0, 2.0)];
        let frontier = pareto_frontier(&points);
        assert_eq!(frontier, vec![pt(50.0, 1.0)]);
    }

    #[test]
    fn empty_input() {
        assert!(pareto_frontier(&[]).is_empty());
    }
}
