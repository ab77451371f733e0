//! Performance measurement: inverted generational distance in objective
//! (IGD) and decision (IGDX) space, and Friedman-style mean-rank
//! aggregation.

use crate::dominance::euclidean;

/// Paired reference matrices: decision points and their objective images,
/// row for row, plus whether accepted local branches are included.
#[derive(Debug, Clone)]
pub struct ReferenceSet {
    pub decisions: Vec<Vec<f64>>,
    pub objectives: Vec<Vec<f64>>,
    pub includes_local: bool,
}

impl ReferenceSet {
    pub fn len(&self) -> usize {
        self.objectives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objectives.is_empty()
    }
}

fn mean_min_distance(obtained: &[Vec<f64>], reference: &[Vec<f64>]) -> f64 {
    assert!(!reference.is_empty(), "empty reference set");
    if obtained.is_empty() {
        return f64::INFINITY;
    }
    let total: f64 = reference
        .iter()
        .map(|r| {
            obtained
                .iter()
                .map(|o| euclidean(o, r))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    total / reference.len() as f64
}

/// Mean over reference objective points of the distance to the nearest
/// obtained objective vector. Empty obtained sets score +inf.
pub fn igd(objectives: &[Vec<f64>], reference: &ReferenceSet) -> f64 {
    mean_min_distance(objectives, &reference.objectives)
}

/// As [`igd`] but over decision vectors against the reference Pareto-set
/// sample. Callers decide the coordinate scale; the harness reports IGDX on
/// vectors normalized to `[0,1]^D`.
pub fn igdx(decisions: &[Vec<f64>], reference: &ReferenceSet) -> f64 {
    mean_min_distance(decisions, &reference.decisions)
}

/// Ranks per problem (column) and the per-algorithm mean.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    /// ranks[algorithm][problem], 1 = best, ties averaged.
    pub ranks: Vec<Vec<f64>>,
    /// Mean rank per algorithm over all problems.
    pub mean: Vec<f64>,
}

/// Average-rank aggregation of a score matrix (algorithms x problems).
/// Within each problem, algorithms are ranked 1..A with tied scores sharing
/// the mean of the positions they occupy; per-problem ranks therefore
/// always sum to A(A+1)/2.
pub fn mean_ranks(scores: &[Vec<f64>], smaller_is_better: bool) -> RankTable {
    let algos = scores.len();
    assert!(algos > 0, "no algorithms to rank");
    let problems = scores[0].len();
    assert!(problems > 0, "no problems to rank over");
    assert!(
        scores.iter().all(|row| row.len() == problems),
        "ragged score matrix"
    );
    let mut ranks = vec![vec![0.0; problems]; algos];
    for j in 0..problems {
        let mut order: Vec<usize> = (0..algos).collect();
        order.sort_by(|&a, &b| {
            let (x, y) = (scores[a][j], scores[b][j]);
            if smaller_is_better {
                x.total_cmp(&y)
            } else {
                y.total_cmp(&x)
            }
        });
        let mut pos = 0;
        while pos < algos {
            let mut end = pos + 1;
            while end < algos && scores[order[end]][j] == scores[order[pos]][j] {
                end += 1;
            }
            // positions pos..end are tied; average of 1-based positions
            let avg = (pos + 1..=end).sum::<usize>() as f64 / (end - pos) as f64;
            for &i in &order[pos..end] {
                ranks[i][j] = avg;
            }
            pos = end;
        }
    }
    let mean = ranks
        .iter()
        .map(|row| row.iter().sum::<f64>() / problems as f64)
        .collect();
    RankTable { ranks, mean }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn refset(objs: &[&[f64]]) -> ReferenceSet {
        ReferenceSet {
            decisions: objs.iter().map(|o| o.to_vec()).collect(),
            objectives: objs.iter().map(|o| o.to_vec()).collect(),
            includes_local: false,
        }
    }

    #[test]
    fn igd_hand_examples() {
        let reference = refset(&[&[0.0, 0.0]]);
        assert_eq!(igd(&[vec![1.0, 0.0]], &reference), 1.0);
        let reference = refset(&[&[0.0, 0.0], &[2.0, 0.0]]);
        assert_eq!(igd(&[vec![1.0, 0.0]], &reference), 1.0);
        // self-distance
        assert_eq!(igd(&reference.objectives.clone(), &reference), 0.0);
        // empty obtained set
        assert_eq!(igd(&[], &reference), f64::INFINITY);
    }

    #[test]
    fn igdx_branch_coverage_example() {
        // two branch points; covering only one leaves half the mean at the
        // branch distance
        let reference = refset(&[&[-0.5, 0.3], &[0.5, 0.3]]);
        let one_branch = vec![vec![0.5, 0.3]];
        let both = vec![vec![0.5, 0.3], vec![-0.5, 0.3]];
        assert_eq!(igdx(&one_branch, &reference), 0.5);
        assert_eq!(igdx(&both, &reference), 0.0);
    }

    #[test]
    fn igdx_never_grows_when_adding_solutions() {
        let reference = refset(&[&[0.0, 0.0], &[1.0, 1.0], &[0.3, 0.9]]);
        let mut obtained = vec![vec![0.9, 0.9]];
        let mut last = igdx(&obtained, &reference);
        for p in [[0.1, 0.0], [0.5, 0.5], [0.3, 0.8], [0.0, 0.0]] {
            obtained.push(p.to_vec());
            let now = igdx(&obtained, &reference);
            assert!(now <= last);
            last = now;
        }
    }

    #[test]
    fn mean_ranks_basics_and_ties() {
        let t = mean_ranks(&[vec![0.1], vec![0.2]], true);
        assert_eq!(t.ranks, vec![vec![1.0], vec![2.0]]);
        assert_eq!(t.mean, vec![1.0, 2.0]);

        let t = mean_ranks(&[vec![0.1], vec![0.1]], true);
        assert_eq!(t.ranks, vec![vec![1.5], vec![1.5]]);

        // 3 algorithms x 2 problems
        let t = mean_ranks(&[vec![1.0, 3.0], vec![2.0, 1.0], vec![3.0, 2.0]], true);
        assert_eq!(t.mean, vec![2.0, 1.5, 2.5]);

        // larger-is-better flips the order
        let t = mean_ranks(&[vec![1.0], vec![2.0]], false);
        assert_eq!(t.ranks, vec![vec![2.0], vec![1.0]]);
    }

    #[test]
    fn rank_columns_sum_to_triangular_number() {
        let scores = vec![
            vec![0.5, 0.5, 0.2],
            vec![0.5, 0.1, 0.2],
            vec![0.5, 0.9, 0.2],
            vec![0.2, 0.9, 0.2],
        ];
        let t = mean_ranks(&scores, true);
        for j in 0..3 {
            let col: f64 = (0..4).map(|i| t.ranks[i][j]).sum();
            assert!((col - 10.0).abs() < 1e-12, "column {j} sums to {col}");
        }
    }
}
