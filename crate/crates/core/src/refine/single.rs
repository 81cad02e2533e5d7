use crate::error::{Error, Result};
use crate::geometry::{js_unchecked, row_softmax};
use crate::model::{
    argmin, Centroids, EarlyStopping, Polarity, ProbabilityMatrix, RefinementConfig,
    RefinementResult, ScoreMatrix,
};

/// Single-encoder refinement over softmaxed score rows.
///
/// Centroids start one-hot, distances are Jensen-Shannon divergences, and a
/// centroid moves to the plain mean of its assigned rows (no interpolation;
/// `config.weights` is ignored). A centroid with no members keeps its
/// previous value. `RefinementConfig::single()` selects the last iteration.
pub fn refine_single(scores: &ScoreMatrix, config: &RefinementConfig) -> Result<RefinementResult> {
    config.validate()?;
    if scores.polarity() != Polarity::HigherBetter {
        return Err(Error::Polarity(
            "single-encoder refinement needs higher-is-better scores".into(),
        ));
    }
    let probs = row_softmax(scores);
    let (n, k) = (probs.n_docs(), probs.k());

    let mut centroids = vec![0.0; k * k];
    for c in 0..k {
        centroids[c * k + c] = 1.0;
    }

    let mut predictions_per_iter: Vec<Vec<usize>> = Vec::new();
    let mut objective_per_iter = Vec::new();
    let mut selected: Option<(usize, f64, Vec<f64>, Vec<f64>)> = None;
    let mut converged = false;

    for iter in 0..config.max_iters {
        let rows: Vec<Vec<f64>> = config.exec.map_indices(n, |t| {
            let p = probs.row(t);
            centroids
                .chunks_exact(k)
                .map(|r| js_unchecked(p, r))
                .collect()
        });
        let mut predictions = Vec::with_capacity(n);
        let mut distances = Vec::with_capacity(n * k);
        let mut objective = 0.0;
        for row in rows {
            let best = argmin(&row);
            objective += row[best];
            predictions.push(best);
            distances.extend(row);
        }

        let take = match (&selected, config.early_stopping) {
            (None, _) | (Some(_), EarlyStopping::LastIteration) => true,
            (Some((_, best, _, _)), EarlyStopping::MinObjective) => objective < *best,
        };
        if take {
            selected = Some((iter, objective, centroids.clone(), distances));
        }
        let repeated = predictions_per_iter.last() == Some(&predictions);
        objective_per_iter.push(objective);
        if repeated {
            predictions_per_iter.push(predictions);
            converged = true;
            break;
        }

        let next = mean_update(&probs, &predictions, &centroids);
        predictions_per_iter.push(predictions);
        if next == centroids {
            converged = true;
            break;
        }
        centroids = next;
    }

    let (iter, _, centroids, distances) =
        selected.expect("max_iters >= 1 guarantees one iteration");
    Ok(RefinementResult {
        final_predictions: predictions_per_iter[iter].clone(),
        iterations_run: predictions_per_iter.len(),
        predictions_per_iter,
        objective_per_iter,
        selected_iter: iter,
        final_centroids: Centroids::Probability(ProbabilityMatrix::new(k, k, centroids)?),
        selected_distances: ScoreMatrix::new(n, k, distances, Polarity::LowerBetter)?,
        converged,
    })
}

fn mean_update(probs: &ProbabilityMatrix, predictions: &[usize], previous: &[f64]) -> Vec<f64> {
    let k = probs.k();
    let mut sums = vec![0.0; k * k];
    let mut counts = vec![0usize; k];
    for (row, &c) in probs.iter_rows().zip(predictions) {
        counts[c] += 1;
        for (s, p) in sums[c * k..(c + 1) * k].iter_mut().zip(row) {
            *s += p;
        }
    }
    for c in 0..k {
        let slot = &mut sums[c * k..(c + 1) * k];
        if counts[c] == 0 {
            slot.copy_from_slice(&previous[c * k..(c + 1) * k]);
        } else {
            let count = counts[c] as f64;
            slot.iter_mut().for_each(|s| *s /= count);
        }
    }
    sums
}
