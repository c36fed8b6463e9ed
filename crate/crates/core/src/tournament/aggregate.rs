use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Counts units where `x` scores higher, where `y` does, and exact ties.
pub fn pairwise_counts(x: &[f64], y: &[f64]) -> (u32, u32, u32) {
    x.iter().zip(y).fold((0, 0, 0), |(n, m, t), (a, b)| {
        if a > b {
            (n + 1, m, t)
        } else if b > a {
            (n, m + 1, t)
        } else {
            (n, m, t + 1)
        }
    })
}

/// Mean rank per agent over all units; rank 1 is the best score and tied
/// agents share the mean of the positions they occupy.
pub fn avg_rankings(unit_scores: &[Vec<f64>]) -> Result<Vec<f64>> {
    let agents = unit_scores.len();
    let units = unit_scores.first().map_or(0, Vec::len);
    if let Some(bad) = unit_scores.iter().find(|s| s.len() != units) {
        return Err(Error::DimensionMismatch {
            expected: units,
            found: bad.len(),
        });
    }
    if units == 0 {
        return Ok(vec![0.0; agents]);
    }
    let mut sums = vec![0.0; agents];
    let mut order: Vec<usize> = (0..agents).collect();
    for u in 0..units {
        order.sort_by(|&a, &b| unit_scores[b][u].total_cmp(&unit_scores[a][u]));
        let mut i = 0;
        while i < agents {
            let mut j = i + 1;
            while j < agents && unit_scores[order[j]][u] == unit_scores[order[i]][u] {
                j += 1;
            }
            // positions i+1 ..= j share their mean rank
            let rank = (i + 1 + j) as f64 / 2.0;
            for &a in &order[i..j] {
                sums[a] += rank;
            }
            i = j;
        }
    }
    Ok(sums.into_iter().map(|s| s / units as f64).collect())
}

/// Pairwise win matrix with the derived summary rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TournamentResult {
    pub labels: Vec<String>,
    /// `wins[i][j]`: units where agent i beat agent j. Diagonal unused.
    pub wins: Vec<Vec<u32>>,
    pub ties: Vec<Vec<u32>>,
    /// Percent; mean over opponents of `wins[i][j] / (wins[i][j] + wins[j][i])`.
    pub avg_wins: Vec<f64>,
    /// Mean rank over units (empty if built from a bare matrix).
    pub avg_ranking: Vec<f64>,
    /// Score per agent per comparison unit.
    pub unit_scores: Vec<Vec<f64>>,
}

impl TournamentResult {
    /// Builds the summary from a square win matrix and tie matrix.
    pub fn from_matrix(labels: Vec<String>, wins: Vec<Vec<u32>>, ties: Vec<Vec<u32>>) -> Result<Self> {
        let n = labels.len();
        for m in [&wins, &ties] {
            if m.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: m.len(),
                });
            }
            if let Some(row) = m.iter().find(|r| r.len() != n) {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
        }
        let mut result = TournamentResult {
            labels,
            wins,
            ties,
            avg_wins: Vec::new(),
            avg_ranking: Vec::new(),
            unit_scores: Vec::new(),
        };
        let everyone: Vec<usize> = (0..n).collect();
        result.avg_wins = (0..n).map(|i| result.avg_wins_against(i, &everyone)).collect();
        Ok(result)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Share of decided units won by `i` against `j`; 0.5 when every unit
    /// was tied.
    pub fn win_rate(&self, i: usize, j: usize) -> f64 {
        let n = self.wins[i][j] as f64;
        let m = self.wins[j][i] as f64;
        if n + m == 0.0 {
            0.5
        } else {
            n / (n + m)
        }
    }

    /// Average win rate of `i` (percent) against the agents in `pool`,
    /// skipping `i` itself.
    pub fn avg_wins_against(&self, i: usize, pool: &[usize]) -> f64 {
        let rates: Vec<f64> = pool.iter().filter(|&&j| j != i).map(|&j| self.win_rate(i, j)).collect();
        if rates.is_empty() {
            return f64::NAN;
        }
        100.0 * rates.iter().sum::<f64>() / rates.len() as f64
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Builds the full tournament summary from per-unit scores.
pub fn aggregate(labels: Vec<String>, unit_scores: Vec<Vec<f64>>) -> Result<TournamentResult> {
    let n = labels.len();
    if unit_scores.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: unit_scores.len(),
        });
    }
    let avg_ranking = avg_rankings(&unit_scores)?;
    let mut wins = vec![vec![0; n]; n];
    let mut ties = vec![vec![0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b, t) = pairwise_counts(&unit_scores[i], &unit_scores[j]);
            wins[i][j] = a;
            wins[j][i] = b;
            ties[i][j] = t;
            ties[j][i] = t;
        }
    }
    let mut result = TournamentResult::from_matrix(labels, wins, ties)?;
    result.avg_ranking = avg_ranking;
    result.unit_scores = unit_scores;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("a{i}")).collect()
    }

    #[test]
    fn counting_example() {
        assert_eq!(pairwise_counts(&[10.0, 5.0, 7.0], &[8.0, 6.0, 1.0]), (2, 1, 0));
        assert_eq!(pairwise_counts(&[1.0, 2.0], &[1.0, 2.0]), (0, 0, 2));
    }

    #[test]
    fn two_agent_matrix() {
        let r = TournamentResult::from_matrix(labels(2), vec![vec![0, 60], vec![40, 0]], vec![vec![0; 2]; 2]).unwrap();
        assert_eq!(r.avg_wins, vec![60.0, 40.0]);
    }

    #[test]
    fn all_ties_split_evenly() {
        let r = TournamentResult::from_matrix(labels(3), vec![vec![0; 3]; 3], vec![vec![100; 3]; 3]).unwrap();
        assert_eq!(r.avg_wins, vec![50.0; 3]);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(TournamentResult::from_matrix(labels(2), vec![vec![0, 1]], vec![vec![0; 2]; 2]).is_err());
        assert!(TournamentResult::from_matrix(labels(2), vec![vec![0, 1], vec![0]], vec![vec![0; 2]; 2]).is_err());
        assert!(aggregate(labels(2), vec![vec![1.0]]).is_err());
        assert!(aggregate(labels(2), vec![vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn rankings_share_ties() {
        let scores = vec![vec![3.0, 1.0], vec![3.0, 2.0], vec![1.0, 3.0]];
        // unit 0: a0,a1 tie for 1st (1.5), a2 3rd; unit 1: a2, a1, a0
        assert_eq!(avg_rankings(&scores).unwrap(), vec![2.25, 1.75, 2.0]);
    }

    #[test]
    fn invariant_counts_sum_to_units() {
        let scores = vec![
            vec![1.0, 2.0, 3.0, 3.0],
            vec![0.0, 2.0, 4.0, 1.0],
            vec![5.0, 5.0, 5.0, 5.0],
        ];
        let r = aggregate(labels(3), scores).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(r.wins[i][j] + r.wins[j][i] + r.ties[i][j], 4);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn permutation_equivariant(
            scores in prop::collection::vec(prop::collection::vec(-5i32..5, 6), 4),
            rot in 0usize..4,
        ) {
            let scores: Vec<Vec<f64>> = scores.into_iter().map(|r| r.into_iter().map(f64::from).collect()).collect();
            let base = aggregate(labels(4), scores.clone()).unwrap();
            let perm: Vec<usize> = (0..4).map(|i| (i + rot) % 4).collect();
            let permuted: Vec<Vec<f64>> = perm.iter().map(|&p| scores[p].clone()).collect();
            let other = aggregate(labels(4), permuted).unwrap();
            for (new, &old) in perm.iter().enumerate() {
                prop_assert!((other.avg_wins[new] - base.avg_wins[old]).abs() < 1e-9);
                prop_assert!((other.avg_ranking[new] - base.avg_ranking[old]).abs() < 1e-9);
                for (new_j, &old_j) in perm.iter().enumerate() {
                    prop_assert_eq!(other.wins[new][new_j], base.wins[old][old_j]);
                }
            }
        }

        #[test]
        fn antisymmetric_counts(x in prop::collection::vec(-3i32..3, 10), y in prop::collection::vec(-3i32..3, 10)) {
            let x: Vec<f64> = x.into_iter().map(f64::from).collect();
            let y: Vec<f64> = y.into_iter().map(f64::from).collect();
            let (n, m, t) = pairwise_counts(&x, &y);
            prop_assert_eq!(pairwise_counts(&y, &x), (m, n, t));
            prop_assert_eq!(n + m + t, 10);
        }
    }
}
