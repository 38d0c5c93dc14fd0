use crate::base::dominance::{constrained, pareto, Dominance};
use crate::base::problem::Solution;
use crate::error::{Error, Result};

/// Fast non-dominated sort over objective vectors (minimization).
///
/// Returns fronts of indices; front `k` is non-dominated once fronts `< k`
/// are removed. Indices within a front are ascending.
pub fn non_dominated_sort(objectives: &[Vec<f64>]) -> Result<Vec<Vec<usize>>> {
    if let Some(first) = objectives.first() {
        for f in objectives {
            if f.len() != first.len() {
                return Err(Error::LengthMismatch {
                    expected: first.len(),
                    actual: f.len(),
                });
            }
        }
    }
    Ok(sort_by_relation(objectives.len(), |i, j| {
        pareto(&objectives[i], &objectives[j])
    }))
}

/// Non-dominated sort of evaluated solutions under constraint-domination.
pub fn constrained_sort(population: &[Solution]) -> Vec<Vec<usize>> {
    let keys: Vec<(&[f64], f64)> = population
        .iter()
        .map(|s| {
            let e = s.eval.as_ref().expect("sorted solutions are evaluated");
            (e.f.as_slice(), e.violation())
        })
        .collect();
    sort_by_relation(keys.len(), |i, j| {
        constrained(keys[i].0, keys[i].1, keys[j].0, keys[j].1)
    })
}

fn sort_by_relation(n: usize, relation: impl Fn(usize, usize) -> Dominance) -> Vec<Vec<usize>> {
    let mut dominated_by = vec![0usize; n];
    let mut dominates: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            match relation(i, j) {
                Dominance::ADominatesB => {
                    dominates[i].push(j);
                    dominated_by[j] += 1;
                }
                Dominance::BDominatesA => {
                    dominates[j].push(i);
                    dominated_by[i] += 1;
                }
                _ => {}
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Crowding distance of each member of one front.
///
/// Per objective, the two extreme members (ties broken by index) get
/// infinity and interior members accumulate the normalized gap between
/// their neighbours. An objective with zero range contributes nothing.
pub fn crowding_distance(front: &[Vec<f64>]) -> Vec<f64> {
    let n = front.len();
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let m = front[0].len();
    let mut dist = vec![0.0; n];
    let mut order: Vec<usize> = (0..n).collect();
    #[allow(clippy::needless_range_loop)]
    for k in 0..m {
        order.sort_by(|&a, &b| front[a][k].total_cmp(&front[b][k]).then(a.cmp(&b)));
        let lo = front[order[0]][k];
        let hi = front[order[n - 1]][k];
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        for w in order.windows(3) {
            let gap = front[w[2]][k] - front[w[0]][k];
            dist[w[1]] += gap / range;
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(points: &[&[f64]]) -> Vec<Vec<f64>> {
        points.iter().map(|p| p.to_vec()).collect()
    }

    #[test]
    fn small_sorts() {
        assert_eq!(non_dominated_sort(&v(&[&[1.0, 1.0]])).unwrap(), vec![vec![0]]);
        assert_eq!(
            non_dominated_sort(&v(&[&[1.0, 2.0], &[2.0, 1.0], &[2.0, 2.0]])).unwrap(),
            vec![vec![0, 1], vec![2]]
        );
        assert_eq!(
            non_dominated_sort(&v(&[&[0.0, 0.0], &[1.0, 1.0], &[2.0, 2.0]])).unwrap(),
            vec![vec![0], vec![1], vec![2]]
        );
        assert!(non_dominated_sort(&[]).unwrap().is_empty());
        assert!(non_dominated_sort(&v(&[&[1.0], &[1.0, 2.0]])).is_err());
    }

    #[test]
    fn duplicates_share_a_front() {
        let f = non_dominated_sort(&v(&[&[1.0, 1.0], &[1.0, 1.0], &[0.0, 5.0]])).unwrap();
        assert_eq!(f, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn crowding_boundary_rule() {
        let d = crowding_distance(&v(&[&[0.0, 1.0], &[1.0, 0.0]]));
        assert!(d.iter().all(|x| x.is_infinite()));
        assert!(crowding_distance(&[]).is_empty());
    }

    #[test]
    fn crowding_three_points() {
        let d = crowding_distance(&v(&[&[0.0, 1.0], &[0.5, 0.5], &[1.0, 0.0]]));
        assert!(d[0].is_infinite() && d[2].is_infinite());
        assert_eq!(d[1], 2.0);
    }

    #[test]
    fn crowding_identical_points() {
        let d = crowding_distance(&v(&[&[1.0, 1.0], &[1.0, 1.0], &[1.0, 1.0]]));
        assert!(d[0].is_infinite());
        assert_eq!(d[1], 0.0);
        assert!(d[2].is_infinite());
    }

    #[test]
    fn crowding_zero_range_objective() {
        let d = crowding_distance(&v(&[&[0.0, 3.0], &[0.25, 3.0], &[1.0, 3.0], &[0.5, 3.0]]));
        // Objective 2 is constant: its contribution is zero, but its index
        // tie-break still marks members 0 and 3 as extremes.
        assert!(d[0].is_infinite() && d[2].is_infinite() && d[3].is_infinite());
        assert_eq!(d[1], 0.5);
    }
}
