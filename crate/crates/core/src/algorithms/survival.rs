//! Environmental selection for the ask-tell algorithms.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::algorithms::refdirs::ReferenceDirections;
use crate::algorithms::sorting::{constrained_sort, crowding_distance};
use crate::base::dominance::scalar_order;
use crate::base::problem::Solution;

fn eval_of(s: &Solution) -> &crate::base::problem::Evaluation {
    s.eval.as_ref().expect("survival operates on evaluated solutions")
}

/// Shuffled-then-stable order so that ties never depend on input position.
fn shuffled_indices<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    idx
}

/// (mu + lambda) truncation by constraint violation, then objective.
pub fn truncate_scalar<R: Rng + ?Sized>(
    merged: Vec<Solution>,
    pop_size: usize,
    rng: &mut R,
) -> Vec<Solution> {
    let mut idx = shuffled_indices(merged.len(), rng);
    idx.sort_by(|&a, &b| scalar_order(eval_of(&merged[a]), eval_of(&merged[b])));
    idx.truncate(pop_size);
    take(merged, &idx)
}

fn take(pool: Vec<Solution>, idx: &[usize]) -> Vec<Solution> {
    let mut slots: Vec<Option<Solution>> = pool.into_iter().map(Some).collect();
    idx.iter()
        .map(|&i| slots[i].take().expect("index selected once"))
        .collect()
}

/// Front rank and crowding distance of every member.
pub fn rank_and_crowding(population: &[Solution]) -> (Vec<usize>, Vec<f64>) {
    let fronts = constrained_sort(population);
    let mut rank = vec![0; population.len()];
    let mut crowd = vec![0.0; population.len()];
    for (r, front) in fronts.iter().enumerate() {
        let objs: Vec<Vec<f64>> = front.iter().map(|&i| eval_of(&population[i]).f.clone()).collect();
        let cd = crowding_distance(&objs);
        for (&i, d) in front.iter().zip(cd) {
            rank[i] = r;
            crowd[i] = d;
        }
    }
    (rank, crowd)
}

/// NSGA-II survival: whole fronts first, the split front by crowding distance.
pub fn rank_and_crowding_survival<R: Rng + ?Sized>(
    merged: Vec<Solution>,
    pop_size: usize,
    rng: &mut R,
) -> Vec<Solution> {
    if merged.len() <= pop_size {
        return merged;
    }
    let fronts = constrained_sort(&merged);
    let mut chosen = Vec::with_capacity(pop_size);
    for front in fronts {
        if chosen.len() + front.len() <= pop_size {
            chosen.extend(front);
            if chosen.len() == pop_size {
                break;
            }
            continue;
        }
        let objs: Vec<Vec<f64>> = front.iter().map(|&i| eval_of(&merged[i]).f.clone()).collect();
        let cd = crowding_distance(&objs);
        let mut order = shuffled_indices(front.len(), rng);
        order.sort_by(|&a, &b| cd[b].total_cmp(&cd[a]));
        let need = pop_size - chosen.len();
        chosen.extend(order.into_iter().take(need).map(|k| front[k]));
        break;
    }
    take(merged, &chosen)
}

/// NSGA-III survival with reference-direction niching.
///
/// Objectives are translated by the ideal point and scaled by intercepts of
/// the hyperplane through the extreme points; if that system is singular or
/// yields non-positive intercepts, the nadir of the first front is used.
/// The split front is filled niche by niche, least crowded direction first
/// (random tie-break), taking the closest member of each niche first.
pub fn nsga3_survive<R: Rng + ?Sized>(
    merged: Vec<Solution>,
    directions: &ReferenceDirections,
    pop_size: usize,
    rng: &mut R,
) -> Vec<Solution> {
    if merged.len() <= pop_size {
        return merged;
    }
    let fronts = constrained_sort(&merged);
    let mut before: Vec<usize> = Vec::new();
    let mut last: Vec<usize> = Vec::new();
    for front in &fronts {
        if before.len() + front.len() <= pop_size {
            before.extend(front);
            if before.len() == pop_size {
                break;
            }
        } else {
            last = front.clone();
            break;
        }
    }
    if last.is_empty() {
        return take(merged, &before);
    }

    let st: Vec<usize> = before.iter().chain(&last).copied().collect();
    let objs: Vec<Vec<f64>> = st.iter().map(|&i| eval_of(&merged[i]).f.clone()).collect();
    let first: Vec<usize> = (0..fronts[0].len().min(st.len())).collect();
    let normalized = normalize(&objs, &first);
    let (niche, dist) = associate(&normalized, directions);

    let mut count = vec![0usize; directions.len()];
    for k in 0..before.len() {
        count[niche[k]] += 1;
    }
    // Last-front members per niche, closest first.
    let mut pending: Vec<Vec<usize>> = vec![Vec::new(); directions.len()];
    for k in before.len()..st.len() {
        pending[niche[k]].push(k);
    }
    for members in pending.iter_mut() {
        members.sort_by(|&a, &b| dist[b].total_cmp(&dist[a]).then(b.cmp(&a)));
    }

    let mut chosen = before.clone();
    while chosen.len() < pop_size {
        let min = (0..directions.len())
            .filter(|&d| !pending[d].is_empty())
            .map(|d| count[d])
            .min()
            .expect("last front still has members");
        let ties: Vec<usize> = (0..directions.len())
            .filter(|&d| !pending[d].is_empty() && count[d] == min)
            .collect();
        let d = *ties.choose(rng).expect("non-empty ties");
        let k = pending[d].pop().expect("non-empty niche");
        chosen.push(st[k]);
        count[d] += 1;
    }
    take(merged, &chosen)
}

/// Ideal-point translation and intercept scaling.
pub(crate) fn normalize(objs: &[Vec<f64>], first_front: &[usize]) -> Vec<Vec<f64>> {
    let m = objs[0].len();
    let mut ideal = vec![f64::INFINITY; m];
    for f in objs {
        for (z, v) in ideal.iter_mut().zip(f) {
            *z = z.min(*v);
        }
    }
    let shifted: Vec<Vec<f64>> = objs
        .iter()
        .map(|f| f.iter().zip(&ideal).map(|(v, z)| v - z).collect())
        .collect();

    let intercepts = hyperplane_intercepts(&shifted).unwrap_or_else(|| {
        let mut nadir = vec![0.0f64; m];
        for &i in first_front {
            for (n, v) in nadir.iter_mut().zip(&shifted[i]) {
                *n = n.max(*v);
            }
        }
        for (j, n) in nadir.iter_mut().enumerate() {
            if *n <= 1e-10 {
                *n = shifted.iter().map(|f| f[j]).fold(0.0, f64::max);
            }
            if *n <= 1e-10 {
                *n = 1.0;
            }
        }
        nadir
    });
    shifted
        .into_iter()
        .map(|f| f.iter().zip(&intercepts).map(|(v, a)| v / a).collect())
        .collect()
}

fn hyperplane_intercepts(shifted: &[Vec<f64>]) -> Option<Vec<f64>> {
    let m = shifted[0].len();
    let mut extremes = DMatrix::<f64>::zeros(m, m);
    for axis in 0..m {
        let asf = |f: &Vec<f64>| {
            f.iter()
                .enumerate()
                .map(|(j, v)| if j == axis { *v } else { v / 1e-6 })
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let best = (0..shifted.len())
            .min_by(|&a, &b| asf(&shifted[a]).total_cmp(&asf(&shifted[b])).then(a.cmp(&b)))?;
        for j in 0..m {
            extremes[(axis, j)] = shifted[best][j];
        }
    }
    let b = extremes.lu().solve(&DVector::from_element(m, 1.0))?;
    let intercepts: Vec<f64> = b.iter().map(|v| 1.0 / v).collect();
    if intercepts.iter().all(|a| a.is_finite() && *a > 1e-6) {
        Some(intercepts)
    } else {
        None
    }
}

/// Nearest direction by perpendicular distance, with that distance.
pub(crate) fn associate(
    normalized: &[Vec<f64>],
    directions: &ReferenceDirections,
) -> (Vec<usize>, Vec<f64>) {
    let dirs = directions.directions();
    let norms: Vec<f64> = dirs.iter().map(|w| w.iter().map(|v| v * v).sum()).collect();
    let mut niche = Vec::with_capacity(normalized.len());
    let mut dist = Vec::with_capacity(normalized.len());
    for f in normalized {
        let mut best = (usize::MAX, f64::INFINITY);
        for (d, (w, nw)) in dirs.iter().zip(&norms).enumerate() {
            let t: f64 = f.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / nw;
            let perp: f64 = f
                .iter()
                .zip(w)
                .map(|(a, b)| (a - t * b).powi(2))
                .sum::<f64>()
                .sqrt();
            if perp.total_cmp(&best.1) == Ordering::Less {
                best = (d, perp);
            }
        }
        niche.push(best.0);
        dist.push(best.1);
    }
    (niche, dist)
}
