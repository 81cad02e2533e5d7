use crate::error::{Error, Result};
use crate::geometry::{l2_normalize_rows, normalized};
use crate::model::{
    argmin, Centroids, EarlyStopping, EmbeddingMatrix, Metric, Polarity, RefinementConfig,
    RefinementResult, ScoreMatrix,
};

use super::{assign_with, update_centroids, AugmentedInputs, LabeledAnchors};

/// Dual-encoder refinement.
///
/// Centroids start at the category embeddings. Each iteration assigns every
/// document to its nearest centroid, records the predictions and the
/// objective (sum of assigned distances, measured against the centroids
/// entering the iteration), then moves each centroid to the configured
/// interpolation of its cluster mean and its category embedding. Iteration
/// stops once assignments repeat, or the centroids stop moving, or after
/// `max_iters`.
///
/// Under [`Metric::CosineDistance`] all inputs are unit-normalized first.
///
/// Augmented categories add centroids that take part in assignment, update
/// and objective; recorded predictions are restricted to the first `k`
/// centroids. Augmented texts take part in clustering but are left out of
/// the recorded predictions.
pub fn refine_dual(
    docs: &EmbeddingMatrix,
    categories: &EmbeddingMatrix,
    config: &RefinementConfig,
    augmented: Option<&AugmentedInputs>,
) -> Result<RefinementResult> {
    refine_dual_traced(docs, categories, config, augmented).map(|(r, _)| r)
}

/// [`refine_dual`] that also returns the centroids entering every iteration.
pub fn refine_dual_traced(
    docs: &EmbeddingMatrix,
    categories: &EmbeddingMatrix,
    config: &RefinementConfig,
    augmented: Option<&AugmentedInputs>,
) -> Result<(RefinementResult, Vec<EmbeddingMatrix>)> {
    if config.weights.anchor() > 0.0 {
        return Err(Error::WeightMismatch(
            "anchor weight is positive; use few-shot refinement".into(),
        ));
    }
    let empty = AugmentedInputs::default();
    let augmented = augmented.unwrap_or(&empty);
    if augmented.n_categories() != config.n_augmented_categories
        || augmented.n_texts() != config.n_augmented_texts
    {
        return Err(Error::Invalid(format!(
            "config expects {} augmented categories and {} augmented texts, got {} and {}",
            config.n_augmented_categories,
            config.n_augmented_texts,
            augmented.n_categories(),
            augmented.n_texts()
        )));
    }
    let problem = Problem::build(docs, categories, augmented, config.metric)?;
    run(&problem, None, config)
}

/// Few-shot refinement: [`refine_dual`] with a three-way centroid update
/// that also pulls toward the mean of each category's labeled anchors.
///
/// Anchors never enter the cluster means and receive no predictions.
pub fn refine_fewshot(
    docs: &EmbeddingMatrix,
    categories: &EmbeddingMatrix,
    anchors: &LabeledAnchors,
    config: &RefinementConfig,
) -> Result<RefinementResult> {
    refine_fewshot_traced(docs, categories, anchors, config).map(|(r, _)| r)
}

pub fn refine_fewshot_traced(
    docs: &EmbeddingMatrix,
    categories: &EmbeddingMatrix,
    anchors: &LabeledAnchors,
    config: &RefinementConfig,
) -> Result<(RefinementResult, Vec<EmbeddingMatrix>)> {
    if anchors.k() != categories.rows() {
        return Err(Error::LengthMismatch {
            left: anchors.k(),
            right: categories.rows(),
        });
    }
    if anchors.docs().dim() != docs.dim() {
        return Err(Error::DimensionMismatch {
            context: "anchor documents".into(),
            expected: docs.dim(),
            found: anchors.docs().dim(),
        });
    }
    let problem = Problem::build(docs, categories, &AugmentedInputs::default(), config.metric)?;
    let normalized;
    let anchors = match config.metric {
        Metric::CosineDistance => {
            normalized = anchors.normalized()?;
            &normalized
        }
        Metric::SquaredL2 => anchors,
    };
    run(&problem, Some(anchors), config)
}

struct Problem {
    /// Evaluation documents followed by augmented texts.
    docs: EmbeddingMatrix,
    n_eval: usize,
    /// Category embeddings followed by augmented categories.
    initial: EmbeddingMatrix,
    k: usize,
}

impl Problem {
    fn build(
        docs: &EmbeddingMatrix,
        categories: &EmbeddingMatrix,
        augmented: &AugmentedInputs,
        metric: Metric,
    ) -> Result<Self> {
        if docs.dim() != categories.dim() {
            return Err(Error::DimensionMismatch {
                context: "category embeddings".into(),
                expected: docs.dim(),
                found: categories.dim(),
            });
        }
        let mut all_docs = docs.clone();
        if let Some(extra) = &augmented.extra_texts {
            all_docs = all_docs.stack(extra)?;
        }
        let mut initial = categories.clone();
        if let Some(extra) = &augmented.extra_categories {
            initial = initial.stack(extra)?;
        }
        if metric == Metric::CosineDistance {
            all_docs = l2_normalize_rows(&all_docs)?;
            initial = l2_normalize_rows(&initial)?;
        }
        Ok(Self {
            docs: all_docs,
            n_eval: docs.rows(),
            initial,
            k: categories.rows(),
        })
    }
}

struct Selected {
    iter: usize,
    objective: f64,
    centroids: EmbeddingMatrix,
    distances: Vec<f64>,
}

fn run(
    problem: &Problem,
    anchors: Option<&LabeledAnchors>,
    config: &RefinementConfig,
) -> Result<(RefinementResult, Vec<EmbeddingMatrix>)> {
    config.validate()?;
    let n_eval = problem.n_eval;
    let k = problem.k;
    let n_centroids = problem.initial.rows();

    let mut centroids = problem.initial.clone();
    let mut history = Vec::new();
    let mut predictions_per_iter = Vec::new();
    let mut objective_per_iter = Vec::new();
    let mut previous: Option<Vec<usize>> = None;
    let mut selected: Option<Selected> = None;
    let mut converged = false;

    for iter in 0..config.max_iters {
        let assignment = assign_with(config.exec, &problem.docs, &centroids, config.metric)?;

        // Evaluation rows restricted to the real categories.
        let mut distances = Vec::with_capacity(n_eval * k);
        let mut predictions = Vec::with_capacity(n_eval);
        for t in 0..n_eval {
            let row = &assignment.distances[t * n_centroids..t * n_centroids + k];
            predictions.push(if n_centroids == k {
                assignment.predictions[t]
            } else {
                argmin(row)
            });
            distances.extend_from_slice(row);
        }

        let objective = assignment.objective;
        let take = match (&selected, config.early_stopping) {
            (None, _) | (Some(_), EarlyStopping::LastIteration) => true,
            (Some(best), EarlyStopping::MinObjective) => objective < best.objective,
        };
        if take {
            selected = Some(Selected {
                iter,
                objective,
                centroids: centroids.clone(),
                distances,
            });
        }
        predictions_per_iter.push(predictions);
        objective_per_iter.push(objective);
        history.push(centroids.clone());

        if previous.as_deref() == Some(&assignment.predictions[..]) {
            converged = true;
            break;
        }

        let mut next = update_centroids(
            &problem.docs,
            &assignment.predictions,
            &problem.initial,
            anchors,
            config.weights,
        )?;
        if config.metric == Metric::CosineDistance && config.renormalize_centroids {
            next = renormalize(next)?;
        }
        if next == centroids {
            converged = true;
            break;
        }
        centroids = next;
        previous = Some(assignment.predictions);
    }

    let selected = selected.expect("max_iters >= 1 guarantees one iteration");
    let result = RefinementResult {
        final_predictions: predictions_per_iter[selected.iter].clone(),
        iterations_run: predictions_per_iter.len(),
        predictions_per_iter,
        objective_per_iter,
        selected_iter: selected.iter,
        final_centroids: Centroids::Embedding(selected.centroids),
        selected_distances: ScoreMatrix::new(n_eval, k, selected.distances, Polarity::LowerBetter)?,
        converged,
    };
    Ok((result, history))
}

fn renormalize(m: EmbeddingMatrix) -> Result<EmbeddingMatrix> {
    let (rows, dim) = (m.rows(), m.dim());
    let mut data = Vec::with_capacity(rows * dim);
    for (row, values) in m.iter_rows().enumerate() {
        data.extend(normalized(values).ok_or(Error::ZeroVector { row })?);
    }
    EmbeddingMatrix::new(rows, dim, data)
}
