use serde::{Deserialize, Serialize};

use crate::allocation::{km_solve, CostMatrix, Matching};
use crate::error::{Error, Result};

/// Allocation schemes compared in the offloading experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    /// Masked KM with dissatisfaction threshold ε.
    Proposed,
    /// Unmasked KM, minimum energy.
    Ecm,
    /// Rank i takes rank i.
    Bidding,
    /// Rank bands matched independently by KM.
    Group,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Proposed, Scheme::Ecm, Scheme::Bidding, Scheme::Group];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::Ecm => "ecm",
            Scheme::Bidding => "bidding",
            Scheme::Group => "group",
        }
    }
}

/// Highest-Gas sensor gets the strongest server, and so on down.
pub fn bidding_allocate(costs: &CostMatrix) -> Result<Matching> {
    Matching::from_assignment(costs, (0..costs.n()).collect()).ok_or(Error::Infeasible)
}

/// Minimum-energy matching ignoring dissatisfaction.
pub fn ecm_allocate(costs: &CostMatrix) -> Result<Matching> {
    km_solve(costs)
}

/// Minimum-energy matching with every assigned pair within `epsilon`
/// ranks. `costs` is the unmasked ranked matrix.
pub fn proposed_allocate(costs: &CostMatrix, epsilon: usize) -> Result<Matching> {
    km_solve(&costs.masked(epsilon))
}

/// Splits both rankings into `n_groups` contiguous bands of
/// `⌊n/n_groups⌋` (the last band absorbs the remainder) and runs KM inside
/// each band.
pub fn group_allocate(costs: &CostMatrix, n_groups: usize) -> Result<Matching> {
    let n = costs.n();
    if n_groups == 0 || n_groups > n {
        return Err(Error::Config(format!("group count {n_groups} outside [1, {n}]")));
    }
    let base = n / n_groups;
    let mut assignment = Vec::with_capacity(n);
    for g in 0..n_groups {
        let start = g * base;
        let end = if g + 1 == n_groups { n } else { start + base };
        let local = km_solve(&costs.block(start..end))?;
        assignment.extend(local.assignment.into_iter().map(|c| c + start));
    }
    Matching::from_assignment(costs, assignment).ok_or(Error::Infeasible)
}

/// Largest rank gap over all assigned pairs.
pub fn max_dissatisfaction(matching: &Matching) -> usize {
    matching
        .assignment
        .iter()
        .enumerate()
        .map(|(row, &col)| row.abs_diff(col))
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::{RankedInstance, Server, Task};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn random_instance(rng: &mut impl Rng, n: usize, extra: usize) -> RankedInstance {
        let tasks: Vec<Task> = (0..n)
            .map(|_| Task {
                data_bits: rng.random_range(1e6..10e6),
                gas: rng.random_range(0.0..100.0),
                power_w: 0.01,
                ergodic_rate: rng.random_range(0.5..20.0),
            })
            .collect();
        let servers: Vec<Server> = (0..n + extra)
            .map(|_| Server {
                cycles_per_sec: rng.random_range(4e10..6e10),
                cycles_per_bit: rng.random_range(5.0..15.0),
                energy_coeff: 1e-27,
            })
            .collect();
        RankedInstance::new(&tasks, &servers, 3e5).unwrap()
    }

    #[test]
    fn bidding_is_identity() {
        let m = CostMatrix::from_rows(vec![vec![3.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let b = bidding_allocate(&m).unwrap();
        assert_eq!(b.assignment, vec![0, 1]);
        assert_eq!(b.total_energy, 6.0);
        assert_eq!(max_dissatisfaction(&b), 0);
    }

    #[test]
    fn ecm_can_exceed_threshold() {
        // Cheapest matching crosses the whole ranking.
        let m = CostMatrix::from_rows(vec![
            vec![10.0, 10.0, 1.0],
            vec![10.0, 1.0, 10.0],
            vec![1.0, 10.0, 10.0],
        ])
        .unwrap();
        let e = ecm_allocate(&m).unwrap();
        assert_eq!(e.total_energy, 3.0);
        assert_eq!(max_dissatisfaction(&e), 2);
        let p = proposed_allocate(&m, 1).unwrap();
        assert!(max_dissatisfaction(&p) <= 1);
        assert_eq!(p.total_energy, 21.0);
    }

    #[test]
    fn group_bands() {
        let m = CostMatrix::from_rows(vec![
            vec![5.0, 1.0, 1.0, 1.0, 1.0],
            vec![1.0, 5.0, 1.0, 1.0, 1.0],
            vec![1.0, 1.0, 5.0, 9.0, 1.0],
            vec![1.0, 1.0, 1.0, 5.0, 9.0],
            vec![1.0, 1.0, 9.0, 1.0, 5.0],
        ])
        .unwrap();
        // bands {0,1} and {2,3,4}
        let g = group_allocate(&m, 2).unwrap();
        assert_eq!(g.assignment, vec![1, 0, 4, 2, 3]);
        assert_eq!(g.total_energy, 5.0);
        assert!(group_allocate(&m, 0).is_err());
        assert!(group_allocate(&m, 6).is_err());
    }

    #[test]
    fn epsilon_zero_equals_bidding_and_full_equals_ecm() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for n in 1..10 {
            let inst = random_instance(&mut rng, n, 2);
            let costs = inst.costs();
            let p0 = proposed_allocate(&costs, 0).unwrap();
            assert_eq!(p0, bidding_allocate(&costs).unwrap());
            let full = proposed_allocate(&costs, n - 1).unwrap();
            let ecm = ecm_allocate(&costs).unwrap();
            assert!((full.total_energy - ecm.total_energy).abs() <= 1e-12 * ecm.total_energy);
        }
    }

    #[test]
    fn group_boundary_cases() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in 1..8 {
            let costs = random_instance(&mut rng, n, 1).costs();
            assert_eq!(group_allocate(&costs, n).unwrap(), bidding_allocate(&costs).unwrap());
            assert_eq!(group_allocate(&costs, 1).unwrap(), ecm_allocate(&costs).unwrap());
        }
    }

    #[test]
    fn group_matches_blockwise_enumeration() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        let perms2 = [[0usize, 1], [1, 0]];
        for _ in 0..20 {
            let costs = random_instance(&mut rng, 4, 0).costs();
            let mut best = f64::INFINITY;
            for p in &perms2 {
                for q in &perms2 {
                    let assignment = [p[0], p[1], 2 + q[0], 2 + q[1]];
                    let total: f64 = (0..4).map(|r| costs.get(r, assignment[r]).unwrap()).sum();
                    best = best.min(total);
                }
            }
            let g = group_allocate(&costs, 2).unwrap();
            assert!((g.total_energy - best).abs() <= 1e-12 * best);
            assert!(g.total_energy >= ecm_allocate(&costs).unwrap().total_energy);
        }
    }

    proptest! {
        #[test]
        fn scheme_ordering(seed in any::<u64>(), n in 1usize..=9, extra in 0usize..3, groups in 1usize..=4) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let inst = random_instance(&mut rng, n, extra);
            let costs = inst.costs();
            let tol = 1e-9;
            let ecm = ecm_allocate(&costs).unwrap();
            let bid = bidding_allocate(&costs).unwrap();
            let mut prev = f64::INFINITY;
            for eps in 0..n {
                let p = proposed_allocate(&costs, eps).unwrap();
                prop_assert!(max_dissatisfaction(&p) <= eps);
                prop_assert!(p.total_energy >= ecm.total_energy * (1.0 - tol));
                prop_assert!(p.total_energy <= bid.total_energy * (1.0 + tol));
                prop_assert!(p.total_energy <= prev * (1.0 + tol));
                prev = p.total_energy;
            }
            if groups <= n {
                let g = group_allocate(&costs, groups).unwrap();
                prop_assert!(g.total_energy >= ecm.total_energy * (1.0 - tol));
                prop_assert!(g.total_energy <= bid.total_energy * (1.0 + tol));
            }
        }
    }
}
