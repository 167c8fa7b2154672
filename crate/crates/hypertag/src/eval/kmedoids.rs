//! K-medoids clustering over a precomputed distance matrix.
//!
//! Works with any metric the caller can tabulate, which is what lets the same
//! code cluster points on the Poincare ball and in Euclidean space. All tie
//! breaks go to the lowest index, so a run is a pure function of its inputs.

use crate::error::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Symmetric distance lookup table for `n` points.
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
}

impl DistanceMatrix {
    /// Tabulates `dist` over all unordered pairs; the diagonal is zero.
    pub fn tabulate(n: usize, mut dist: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = dist(i, j);
                values[i * n + j] = d;
                values[j * n + i] = d;
            }
        }
        DistanceMatrix { n, values }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }
}

const MAX_ITERS: usize = 100;

/// Partitions the points into `k` clusters; returns one medoid-list index per
/// point. Initialization picks a seeded random first medoid, then repeatedly
/// the point farthest from the chosen set; refinement alternates nearest-medoid
/// assignment with per-cluster medoid recomputation until stable (at most 100
/// rounds).
pub fn k_medoids(dist: &DistanceMatrix, k: usize, seed: u64) -> Result<Vec<usize>> {
    let n = dist.len();
    if k < 2 {
        return Err(Error::invalid(format!("k must be at least 2, got {k}")));
    }
    if k > n {
        return Err(Error::invalid(format!("k = {k} exceeds the number of points ({n})")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut medoids = vec![rng.random_range(0..n)];
    while medoids.len() < k {
        let next = (0..n)
            .filter(|i| !medoids.contains(i))
            .max_by(|&a, &b| {
                let da = nearest(dist, &medoids, a).1;
                let db = nearest(dist, &medoids, b).1;
                da.partial_cmp(&db).unwrap().then(b.cmp(&a))
            })
            .expect("k <= n leaves a candidate");
        medoids.push(next);
    }

    let mut assignment = vec![0usize; n];
    for _ in 0..MAX_ITERS {
        for (i, slot) in assignment.iter_mut().enumerate() {
            *slot = nearest(dist, &medoids, i).0;
        }
        let mut changed = false;
        for (c, medoid) in medoids.iter_mut().enumerate() {
            let members: Vec<usize> =
                (0..n).filter(|&i| assignment[i] == c).collect();
            if members.is_empty() {
                continue;
            }
            let best = *members
                .iter()
                .min_by(|&&a, &&b| {
                    let ca: f64 = members.iter().map(|&m| dist.get(a, m)).sum();
                    let cb: f64 = members.iter().map(|&m| dist.get(b, m)).sum();
                    ca.partial_cmp(&cb).unwrap().then(a.cmp(&b))
                })
                .expect("cluster is non-empty");
            if best != *medoid {
                *medoid = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    for (i, slot) in assignment.iter_mut().enumerate() {
        *slot = nearest(dist, &medoids, i).0;
    }
    Ok(assignment)
}

/// Index into `medoids` of the closest medoid to `point`, with its distance.
/// Ties keep the earliest medoid.
fn nearest(dist: &DistanceMatrix, medoids: &[usize], point: usize) -> (usize, f64) {
    let mut best = (0usize, f64::INFINITY);
    for (c, &m) in medoids.iter().enumerate() {
        let d = dist.get(point, m);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}
