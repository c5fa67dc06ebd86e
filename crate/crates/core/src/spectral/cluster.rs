//! Spectral embedding plus seeded Lloyd k-means.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::LaplacianAnalysis;
use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusteringResult {
    pub k: usize,
    /// Row `i` is vertex `i` in the span of the `k` lowest eigenvectors, unit length.
    pub embedding: Vec<Vec<f64>>,
    pub assignment: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub iterations: usize,
    /// Objective after each assignment step.
    pub objective_history: Vec<f64>,
}

impl ClusteringResult {
    /// Vertex sets per cluster label, empty clusters dropped, ordered by smallest vertex.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut by_label: Vec<Vec<usize>> = vec![Vec::new(); self.k];
        for (v, &c) in self.assignment.iter().enumerate() {
            by_label[c].push(v);
        }
        let mut out: Vec<Vec<usize>> = by_label.into_iter().filter(|c| !c.is_empty()).collect();
        out.sort();
        out
    }

    pub fn objective(&self) -> f64 {
        self.objective_history.last().copied().unwrap_or(0.0)
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(p: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centre) in centroids.iter().enumerate() {
        let d = dist2(p, centre);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// Farthest-first seeding: the first centre is drawn from `seed`, each
/// later one is the unchosen point farthest from all chosen centres.
pub fn farthest_first(points: &[Vec<f64>], k: usize, seed: u64) -> Vec<usize> {
    let n = points.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = vec![rng.gen_range(0..n)];
    while chosen.len() < k {
        let mut best: Option<(usize, f64)> = None;
        for i in (0..n).filter(|i| !chosen.contains(i)) {
            let d = chosen.iter().map(|&c| dist2(&points[i], &points[c])).fold(f64::INFINITY, f64::min);
            if best.is_none_or(|(_, bd)| d > bd) {
                best = Some((i, d));
            }
        }
        chosen.push(best.expect("k <= n leaves an unchosen point").0);
    }
    chosen
}

/// Lloyd iterations from farthest-first centres. Stops when assignments repeat.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> Result<(Vec<usize>, Vec<Vec<f64>>, usize, Vec<f64>)> {
    let n = points.len();
    if k == 0 || k > n {
        return Err(Error::Precondition(format!("k = {k} must lie in 1..={n}")));
    }
    let mut centroids: Vec<Vec<f64>> = farthest_first(points, k, seed).into_iter().map(|i| points[i].clone()).collect();
    let mut assignment: Vec<usize> = Vec::new();
    let mut history = Vec::new();
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut objective = 0.0;
        let next: Vec<usize> = points
            .iter()
            .map(|p| {
                let (c, d) = nearest(p, &centroids);
                objective += d;
                c
            })
            .collect();
        history.push(objective);
        if next == assignment {
            break;
        }
        assignment = next;
        for (c, centre) in centroids.iter_mut().enumerate() {
            let members: Vec<&Vec<f64>> = points.iter().zip(&assignment).filter(|(_, &a)| a == c).map(|(p, _)| p).collect();
            if members.is_empty() {
                continue;
            }
            for (d, coord) in centre.iter_mut().enumerate() {
                *coord = members.iter().map(|p| p[d]).sum::<f64>() / members.len() as f64;
            }
        }
    }
    Ok((assignment, centroids, iterations, history))
}

/// Rows of the `k` lowest eigenvectors, each scaled to unit length.
pub fn spectral_embedding(analysis: &LaplacianAnalysis, k: usize) -> Vec<Vec<f64>> {
    let n = analysis.len();
    (0..n)
        .map(|i| {
            let row: Vec<f64> = analysis.eigen.vectors[..k].iter().map(|v| v[i]).collect();
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                row
            } else {
                row.into_iter().map(|x| x / norm).collect()
            }
        })
        .collect()
}

/// Spectral clustering into `k` groups.
///
/// With exactly `k` components the result must equal the component
/// partition; anything else is reported as a consistency failure.
pub fn spectral_cluster(analysis: &LaplacianAnalysis, k: usize, seed: u64) -> Result<ClusteringResult> {
    let n = analysis.len();
    if k == 0 || k > n {
        return Err(Error::Precondition(format!("k = {k} must lie in 1..={n}")));
    }
    let embedding = spectral_embedding(analysis, k);
    let (assignment, centroids, iterations, objective_history) = kmeans(&embedding, k, seed)?;
    if objective_history.windows(2).any(|w| w[1] > w[0] + 1e-12) {
        return Err(Error::Consistency(format!("k-means objective increased: {objective_history:?}")));
    }
    let result = ClusteringResult { k, embedding, assignment, centroids, iterations, objective_history };
    if analysis.components.len() == k && result.clusters() != analysis.components {
        return Err(Error::Consistency(format!(
            "{k} components {:?} but clustering gave {:?}",
            analysis.components,
            result.clusters()
        )));
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_obvious_groups() {
        let pts = vec![vec![0.0, 0.0], vec![0.1, 0.0], vec![5.0, 5.0], vec![5.1, 5.0]];
        for seed in 0..10 {
            let (a, _, _, hist) = kmeans(&pts, 2, seed).unwrap();
            assert_eq!(a[0], a[1]);
            assert_eq!(a[2], a[3]);
            assert_ne!(a[0], a[2]);
            assert!(hist.windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn k_out_of_range() {
        let pts = vec![vec![0.0]];
        assert!(kmeans(&pts, 0, 1).is_err());
        assert!(kmeans(&pts, 2, 1).is_err());
    }

    #[test]
    fn farthest_first_is_seed_stable() {
        let pts: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64]).collect();
        assert_eq!(farthest_first(&pts, 3, 7), farthest_first(&pts, 3, 7));
        let c = farthest_first(&pts, 2, 7);
        assert!(c[1] == 0 || c[1] == 5);
    }

    proptest! {
        #[test]
        fn objective_never_increases(
            coords in proptest::collection::vec(-10i32..10, 2..24),
            k in 1usize..4,
            seed in any::<u64>(),
        ) {
            let pts: Vec<Vec<f64>> = coords.chunks(2).filter(|c| c.len() == 2).map(|c| vec![c[0] as f64, c[1] as f64]).collect();
            prop_assume!(k <= pts.len());
            let (a, _, iters, hist) = kmeans(&pts, k, seed).unwrap();
            prop_assert!(a.iter().all(|&c| c < k));
            prop_assert_eq!(a.len(), pts.len());
            prop_assert!(iters <= MAX_ITERATIONS);
            prop_assert!(hist.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        }
    }
}
