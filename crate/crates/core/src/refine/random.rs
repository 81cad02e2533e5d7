use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{l2_normalize_rows, normalized};
use crate::model::{EmbeddingMatrix, Metric};

use super::{assign_with, Assignment};

/// Outcome of unsupervised k-means. Cluster ids carry no category meaning.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub assignments: Vec<usize>,
    /// Assignments computed in each iteration; the last equals `assignments`.
    pub assignments_per_iter: Vec<Vec<usize>>,
    pub centroids: EmbeddingMatrix,
    pub objective_per_iter: Vec<f64>,
    /// Documents whose embeddings seeded the centroids, in centroid order.
    pub initial_indices: Vec<usize>,
    pub iterations_run: usize,
    pub converged: bool,
}

/// `k` distinct document indices drawn without replacement from a ChaCha8
/// stream seeded with `seed`.
pub fn initial_centroid_indices(n_docs: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k == 0 || k > n_docs {
        return Err(Error::KTooLarge { k, n: n_docs });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sample(&mut rng, n_docs, k).into_vec())
}

/// Standard Lloyd's k-means from randomly chosen documents.
///
/// No interpolation. An empty cluster is reseeded at the document farthest
/// from its assigned centroid. Under cosine distance documents are
/// unit-normalized and centroids are projected back onto the sphere.
pub fn cluster_random_init(
    docs: &EmbeddingMatrix,
    k: usize,
    seed: u64,
    metric: Metric,
    max_iters: usize,
) -> Result<Clustering> {
    cluster_random_init_with(Exec::default(), docs, k, seed, metric, max_iters)
}

pub fn cluster_random_init_with(
    exec: Exec,
    docs: &EmbeddingMatrix,
    k: usize,
    seed: u64,
    metric: Metric,
    max_iters: usize,
) -> Result<Clustering> {
    if max_iters == 0 {
        return Err(Error::Invalid("max_iters must be at least 1".into()));
    }
    let initial_indices = initial_centroid_indices(docs.rows(), k, seed)?;
    let docs = match metric {
        Metric::CosineDistance => l2_normalize_rows(docs)?,
        Metric::SquaredL2 => docs.clone(),
    };
    let mut centroids = docs.select_rows(&initial_indices)?;
    let mut objective_per_iter = Vec::new();
    let mut assignments_per_iter = Vec::new();
    let mut previous: Option<Vec<usize>> = None;
    let mut converged = false;
    let mut last: Option<Assignment> = None;

    for iter in 0..max_iters {
        let assignment = assign_with(exec, &docs, &centroids, metric)?;
        objective_per_iter.push(assignment.objective);
        assignments_per_iter.push(assignment.predictions.clone());
        if previous.as_deref() == Some(&assignment.predictions[..]) {
            converged = true;
            last = Some(assignment);
            break;
        }
        let next = lloyd_update(&docs, &assignment, k, metric)?;
        if next == centroids {
            converged = true;
            last = Some(assignment);
            break;
        }
        if iter + 1 == max_iters {
            // Keep the centroids that produced the returned assignments.
            last = Some(assignment);
            break;
        }
        centroids = next;
        previous = Some(assignment.predictions.clone());
        last = Some(assignment);
    }

    let last = last.expect("max_iters >= 1 guarantees one iteration");
    Ok(Clustering {
        assignments: last.predictions,
        assignments_per_iter,
        centroids,
        iterations_run: objective_per_iter.len(),
        objective_per_iter,
        initial_indices,
        converged,
    })
}

fn lloyd_update(
    docs: &EmbeddingMatrix,
    assignment: &Assignment,
    k: usize,
    metric: Metric,
) -> Result<EmbeddingMatrix> {
    let dim = docs.dim();
    let mut sums = vec![0.0; k * dim];
    let mut counts = vec![0usize; k];
    for (t, &c) in assignment.predictions.iter().enumerate() {
        counts[c] += 1;
        for (s, x) in sums[c * dim..(c + 1) * dim].iter_mut().zip(docs.row(t)) {
            *s += x;
        }
    }

    let mut centroids: Vec<Option<Vec<f64>>> = (0..k)
        .map(|c| {
            if counts[c] == 0 {
                return None;
            }
            let count = counts[c] as f64;
            let mean: Vec<f64> = sums[c * dim..(c + 1) * dim]
                .iter()
                .map(|s| s / count)
                .collect();
            match metric {
                Metric::SquaredL2 => Some(mean),
                // A zero mean has no direction; reseed it like an empty cluster.
                Metric::CosineDistance => normalized(&mean),
            }
        })
        .collect();

    let mut taken = vec![false; docs.rows()];
    for slot in centroids.iter_mut().filter(|c| c.is_none()) {
        let mut farthest: Option<(usize, f64)> = None;
        for (t, &c) in assignment.predictions.iter().enumerate() {
            if taken[t] {
                continue;
            }
            let d = assignment.distance_row(t)[c];
            if farthest.is_none_or(|(_, best)| d > best) {
                farthest = Some((t, d));
            }
        }
        let (t, _) = farthest.expect("k <= n leaves a document for every empty cluster");
        taken[t] = true;
        *slot = Some(docs.row(t).to_vec());
    }

    let data = centroids.into_iter().flatten().flatten().collect();
    EmbeddingMatrix::new(k, dim, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs() -> EmbeddingMatrix {
        EmbeddingMatrix::from_rows(&[[0.0, 0.0], [10.0, 10.0], [0.1, 0.0], [10.0, 10.1]]).unwrap()
    }

    #[test]
    fn separated_pairs_form_clusters() {
        for seed in 0..20 {
            let c = cluster_random_init(&pairs(), 2, seed, Metric::SquaredL2, 100).unwrap();
            assert_eq!(c.assignments[0], c.assignments[2], "seed {seed}");
            assert_eq!(c.assignments[1], c.assignments[3], "seed {seed}");
            assert_ne!(c.assignments[0], c.assignments[1], "seed {seed}");
        }
    }

    #[test]
    fn k_equal_n_gives_singletons() {
        let c = cluster_random_init(&pairs(), 4, 7, Metric::SquaredL2, 100).unwrap();
        let mut seen = c.assignments.clone();
        seen.sort_unstable();
        assert_eq!(seen, vec![0, 1, 2, 3]);
        assert_eq!(*c.objective_per_iter.last().unwrap(), 0.0);
    }

    #[test]
    fn zero_row_rejected_under_cosine() {
        let r = cluster_random_init(&pairs(), 2, 42, Metric::CosineDistance, 100);
        assert!(matches!(r, Err(Error::ZeroVector { row: 0 })));
    }

    #[test]
    fn same_seed_same_result() {
        let a = cluster_random_init(&pairs(), 3, 42, Metric::SquaredL2, 100).unwrap();
        let b = cluster_random_init(&pairs(), 3, 42, Metric::SquaredL2, 100).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn k_larger_than_n_fails() {
        assert!(matches!(
            cluster_random_init(&pairs(), 5, 0, Metric::SquaredL2, 100),
            Err(Error::KTooLarge { k: 5, n: 4 })
        ));
    }

    #[test]
    fn empty_cluster_reseeds_to_farthest_point() {
        let docs = EmbeddingMatrix::from_rows(&[[0.0], [1.0], [10.0]]).unwrap();
        // Two centroids at the same place: the second never wins a tie.
        let assignment = Assignment {
            predictions: vec![0, 0, 0],
            distances: vec![1.0, 1.0, 0.0, 0.0, 81.0, 81.0],
            objective: 82.0,
        };
        let c = lloyd_update(&docs, &assignment, 2, Metric::SquaredL2).unwrap();
        assert_eq!(c.row(1), [10.0]);
    }
}
