//! Label refinement by modified k-means.
//!
//! Four procedures share the assignment step defined here:
//!
//! * [`refine_dual`] clusters document embeddings with centroids seeded from
//!   category embeddings and interpolated back toward them on every update.
//! * [`refine_fewshot`] adds the mean of a few labeled documents per category
//!   to that interpolation.
//! * [`refine_single`] clusters softmaxed score rows under the
//!   Jensen-Shannon divergence, starting from one-hot centroids.
//! * [`cluster_random_init`] is plain Lloyd's k-means from sampled documents.
//!
//! Every argmin breaks ties toward the lowest index.

mod dual;
mod random;
mod single;

pub use dual::{refine_dual, refine_dual_traced, refine_fewshot, refine_fewshot_traced};
pub use random::{
    cluster_random_init, cluster_random_init_with, initial_centroid_indices, Clustering,
};
pub use single::refine_single;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{self, cluster_mean};
use crate::model::{argmin, CentroidWeights, EmbeddingMatrix, Metric};

/// Labeled documents grouped by category, with their per-category means.
///
/// The means are computed once at construction and never change.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledAnchors {
    docs: EmbeddingMatrix,
    labels: Vec<usize>,
    members: Vec<Vec<usize>>,
    anchor_centroids: EmbeddingMatrix,
}

impl LabeledAnchors {
    pub fn new(docs: EmbeddingMatrix, labels: Vec<usize>, k: usize) -> Result<Self> {
        if labels.len() != docs.rows() {
            return Err(Error::LengthMismatch {
                left: labels.len(),
                right: docs.rows(),
            });
        }
        let mut members = vec![Vec::new(); k];
        for (index, &label) in labels.iter().enumerate() {
            if label >= k {
                return Err(Error::LabelOutOfRange { index, label, k });
            }
            members[label].push(index);
        }
        let mut data = Vec::with_capacity(k * docs.dim());
        for (c, rows) in members.iter().enumerate() {
            let mean = cluster_mean(&docs, rows)
                .map_err(|_| Error::EmptyInput(format!("category {c} has no labeled anchors")))?;
            data.extend(mean);
        }
        let anchor_centroids = EmbeddingMatrix::new(k, docs.dim(), data)?;
        Ok(Self {
            docs,
            labels,
            members,
            anchor_centroids,
        })
    }

    pub fn k(&self) -> usize {
        self.members.len()
    }

    pub fn docs(&self) -> &EmbeddingMatrix {
        &self.docs
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn members(&self, category: usize) -> &[usize] {
        &self.members[category]
    }

    pub fn anchor_centroids(&self) -> &EmbeddingMatrix {
        &self.anchor_centroids
    }

    /// Rebuilds the anchors from unit-normalized documents.
    pub fn normalized(&self) -> Result<Self> {
        Self::new(
            geometry::l2_normalize_rows(&self.docs)?,
            self.labels.clone(),
            self.k(),
        )
    }
}

/// Extra inputs that take part in clustering but not in evaluation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AugmentedInputs {
    /// Extra centroids appended after the real categories.
    pub extra_categories: Option<EmbeddingMatrix>,
    /// Extra documents appended after the evaluation documents.
    pub extra_texts: Option<EmbeddingMatrix>,
}

impl AugmentedInputs {
    pub fn n_categories(&self) -> usize {
        self.extra_categories
            .as_ref()
            .map_or(0, EmbeddingMatrix::rows)
    }

    pub fn n_texts(&self) -> usize {
        self.extra_texts.as_ref().map_or(0, EmbeddingMatrix::rows)
    }
}

/// Output of one assignment step.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub predictions: Vec<usize>,
    /// Row-major documents × centroids distances.
    pub distances: Vec<f64>,
    pub objective: f64,
}

impl Assignment {
    pub fn distance_row(&self, doc: usize) -> &[f64] {
        let k = self.distances.len() / self.predictions.len();
        &self.distances[doc * k..(doc + 1) * k]
    }
}

pub fn assign(
    docs: &EmbeddingMatrix,
    centroids: &EmbeddingMatrix,
    metric: Metric,
) -> Result<Assignment> {
    assign_with(Exec::default(), docs, centroids, metric)
}

pub fn assign_with(
    exec: Exec,
    docs: &EmbeddingMatrix,
    centroids: &EmbeddingMatrix,
    metric: Metric,
) -> Result<Assignment> {
    if docs.dim() != centroids.dim() {
        return Err(Error::DimensionMismatch {
            context: "centroids".into(),
            expected: docs.dim(),
            found: centroids.dim(),
        });
    }
    let k = centroids.rows();
    let rows: Vec<Vec<f64>> = match metric {
        Metric::SquaredL2 => exec.map_indices(docs.rows(), |t| {
            let doc = docs.row(t);
            centroids
                .iter_rows()
                .map(|c| geometry::squared_l2_unchecked(doc, c))
                .collect()
        }),
        Metric::CosineDistance => {
            let centroid_norms = centroids
                .iter_rows()
                .enumerate()
                .map(|(row, c)| nonzero_norm(c, row))
                .collect::<Result<Vec<_>>>()?;
            exec.try_map_indices(docs.rows(), |t| {
                let doc = docs.row(t);
                let doc_norm = nonzero_norm(doc, t)?;
                Ok(centroids
                    .iter_rows()
                    .zip(&centroid_norms)
                    .map(|(c, &cn)| cosine_from_parts(geometry::dot(doc, c), doc_norm, cn))
                    .collect())
            })?
        }
    };
    let mut predictions = Vec::with_capacity(rows.len());
    let mut distances = Vec::with_capacity(rows.len() * k);
    let mut objective = 0.0;
    for row in rows {
        let best = argmin(&row);
        objective += row[best];
        predictions.push(best);
        distances.extend(row);
    }
    Ok(Assignment {
        predictions,
        distances,
        objective,
    })
}

fn nonzero_norm(v: &[f64], row: usize) -> Result<f64> {
    let n = geometry::norm(v);
    if n == 0.0 {
        Err(Error::ZeroVector { row })
    } else {
        Ok(n)
    }
}

fn cosine_from_parts(dot: f64, nu: f64, nv: f64) -> f64 {
    1.0 - (dot / (nu * nv)).clamp(-1.0, 1.0)
}

/// Interpolated centroid update.
///
/// `r_c = w_mean * mean(assigned docs) + w_anchor * anchor_mean_c + w_category * initial_c`.
/// A cluster with no assigned documents gets `(w_mean + w_category) * initial_c
/// + w_anchor * anchor_mean_c`.
pub fn update_centroids(
    docs: &EmbeddingMatrix,
    predictions: &[usize],
    initial: &EmbeddingMatrix,
    anchors: Option<&LabeledAnchors>,
    weights: CentroidWeights,
) -> Result<EmbeddingMatrix> {
    if predictions.len() != docs.rows() {
        return Err(Error::LengthMismatch {
            left: predictions.len(),
            right: docs.rows(),
        });
    }
    if docs.dim() != initial.dim() {
        return Err(Error::DimensionMismatch {
            context: "initial centroids".into(),
            expected: docs.dim(),
            found: initial.dim(),
        });
    }
    let k = initial.rows();
    match (anchors, weights.anchor() > 0.0) {
        (Some(a), true) => {
            if a.k() != k {
                return Err(Error::WeightMismatch(format!(
                    "anchors cover {} categories, centroids {}",
                    a.k(),
                    k
                )));
            }
            if a.anchor_centroids().dim() != docs.dim() {
                return Err(Error::DimensionMismatch {
                    context: "anchor centroids".into(),
                    expected: docs.dim(),
                    found: a.anchor_centroids().dim(),
                });
            }
        }
        (None, false) => {}
        (Some(_), false) => {
            return Err(Error::WeightMismatch(
                "anchors given but anchor weight is 0".into(),
            ))
        }
        (None, true) => {
            return Err(Error::WeightMismatch(
                "anchor weight is positive but no anchors given".into(),
            ))
        }
    }

    let dim = docs.dim();
    let mut sums = vec![0.0; k * dim];
    let mut counts = vec![0usize; k];
    for (t, &c) in predictions.iter().enumerate() {
        if c >= k {
            return Err(Error::LabelOutOfRange {
                index: t,
                label: c,
                k,
            });
        }
        counts[c] += 1;
        for (s, x) in sums[c * dim..(c + 1) * dim].iter_mut().zip(docs.row(t)) {
            *s += x;
        }
    }

    let mut data = Vec::with_capacity(k * dim);
    for c in 0..k {
        let init = initial.row(c);
        let anchor = anchors.map(|a| a.anchor_centroids().row(c));
        let sum = &sums[c * dim..(c + 1) * dim];
        for j in 0..dim {
            let mut value = if counts[c] == 0 {
                (weights.mean() + weights.category()) * init[j]
            } else {
                weights.mean() * (sum[j] / counts[c] as f64) + weights.category() * init[j]
            };
            if let Some(anchor) = anchor {
                value += weights.anchor() * anchor[j];
            }
            data.push(value);
        }
    }
    EmbeddingMatrix::new(k, dim, data)
}
