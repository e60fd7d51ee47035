use serde::{Deserialize, Serialize};

use crate::allocation::CostMatrix;
use crate::error::{Error, Result};

/// A perfect matching in rank space: row `i` is served by column
/// `assignment[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matching {
    pub assignment: Vec<usize>,
    pub total_energy: f64,
}

impl Matching {
    /// Sums the matched entries of `costs`; `None` if any is forbidden.
    pub fn from_assignment(costs: &CostMatrix, assignment: Vec<usize>) -> Option<Matching> {
        let mut total = 0.0;
        for (row, &col) in assignment.iter().enumerate() {
            total += costs.get(row, col)?;
        }
        Some(Matching {
            assignment,
            total_energy: total,
        })
    }

    /// Pairs in original indices: (sensor, server).
    pub fn pairs<'a>(&'a self, costs: &'a CostMatrix) -> impl Iterator<Item = (usize, usize)> + 'a {
        self.assignment
            .iter()
            .enumerate()
            .map(|(row, &col)| (costs.row_order()[row], costs.col_order()[col]))
    }
}

/// Minimum-total-energy perfect matching (Hungarian method with dual
/// potentials, O(n³)). Forbidden entries are never relaxed, so no
/// arithmetic ever touches an infinite cost. Fails with
/// [`Error::Infeasible`] when the allowed pairs admit no perfect matching.
pub fn km_solve(costs: &CostMatrix) -> Result<Matching> {
    let n = costs.n();
    if n == 0 {
        return Ok(Matching {
            assignment: Vec::new(),
            total_energy: 0.0,
        });
    }
    // 1-based rows/columns; column 0 is the virtual root.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for row in 1..=n {
        owner[0] = row;
        let mut col0 = 0usize;
        let mut min_slack: Vec<Option<f64>> = vec![None; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[col0] = true;
            let r0 = owner[col0];
            let mut delta: Option<f64> = None;
            let mut col1 = 0usize;
            for col in 1..=n {
                if used[col] {
                    continue;
                }
                if let Some(c) = costs.get(r0 - 1, col - 1) {
                    let reduced = c - u[r0] - v[col];
                    if min_slack[col].is_none_or(|m| reduced < m) {
                        min_slack[col] = Some(reduced);
                        way[col] = col0;
                    }
                }
                if let Some(m) = min_slack[col] {
                    if delta.is_none_or(|d| m < d) {
                        delta = Some(m);
                        col1 = col;
                    }
                }
            }
            let delta = delta.ok_or(Error::Infeasible)?;
            for col in 0..=n {
                if used[col] {
                    u[owner[col]] += delta;
                    v[col] -= delta;
                } else if let Some(m) = min_slack[col].as_mut() {
                    *m -= delta;
                }
            }
            col0 = col1;
            if owner[col0] == 0 {
                break;
            }
        }
        loop {
            let prev = way[col0];
            owner[col0] = owner[prev];
            col0 = prev;
            if col0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for col in 1..=n {
        assignment[owner[col] - 1] = col - 1;
    }
    Matching::from_assignment(costs, assignment).ok_or(Error::Infeasible)
}
