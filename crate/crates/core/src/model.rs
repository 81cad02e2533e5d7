//! Domain types shared by the refinement and evaluation code.
//!
//! All matrices are row-major `f64` and immutable once constructed; the
//! constructors enforce finiteness and shape so downstream code can index
//! without re-checking.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::exec::Exec;

fn check_finite(data: &[f64], cols: usize) -> Result<()> {
    match data.iter().position(|v| !v.is_finite()) {
        Some(pos) => Err(Error::NonFinite {
            row: pos / cols,
            col: pos % cols,
        }),
        None => Ok(()),
    }
}

/// Dense row-per-item vectors (documents or categories).
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    rows: usize,
    dim: usize,
    data: Vec<f64>,
    ids: Option<Vec<String>>,
}

impl EmbeddingMatrix {
    pub fn new(rows: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 {
            return Err(Error::EmptyInput("embedding matrix has no rows".into()));
        }
        if dim == 0 {
            return Err(Error::EmptyInput(
                "embedding matrix has zero dimension".into(),
            ));
        }
        if data.len() != rows * dim {
            return Err(Error::DimensionMismatch {
                context: "embedding data length".into(),
                expected: rows * dim,
                found: data.len(),
            });
        }
        check_finite(&data, dim)?;
        Ok(Self {
            rows,
            dim,
            data,
            ids: None,
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::EmptyInput("embedding matrix has no rows".into()))?;
        let dim = first.as_ref().len();
        let mut data = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    context: "embedding row".into(),
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), dim, data)
    }

    /// Attaches per-row identifiers. Ids are metadata; rows stay positional.
    pub fn with_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.rows {
            return Err(Error::LengthMismatch {
                left: ids.len(),
                right: self.rows,
            });
        }
        let mut seen = HashSet::with_capacity(ids.len());
        for (row, id) in ids.iter().enumerate() {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateId {
                    id: id.clone(),
                    row,
                });
            }
        }
        self.ids = Some(ids);
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn ids(&self) -> Option<&[String]> {
        self.ids.as_deref()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter_rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    /// Row-wise concatenation. Ids are kept only when both sides carry them.
    pub fn stack(&self, other: &EmbeddingMatrix) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                context: "stacked embeddings".into(),
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        let stacked = Self::new(self.rows + other.rows, self.dim, data)?;
        match (&self.ids, &other.ids) {
            (Some(a), Some(b)) => stacked.with_ids(a.iter().chain(b).cloned().collect()),
            _ => Ok(stacked),
        }
    }

    /// Copies the selected rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            if i >= self.rows {
                return Err(Error::LabelOutOfRange {
                    index: i,
                    label: i,
                    k: self.rows,
                });
            }
            data.extend_from_slice(self.row(i));
        }
        Self::new(indices.len(), self.dim, data)
    }
}

/// Ordered category descriptions. Position is the category index everywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategorySet {
    names: Vec<String>,
}

impl CategorySet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names
            .into_iter()
            .map(|s| s.into().trim().to_string())
            .collect();
        if names.len() < 2 {
            return Err(Error::EmptyInput(format!(
                "need at least 2 categories, found {}",
                names.len()
            )));
        }
        if let Some(i) = names.iter().position(|n| n.is_empty()) {
            return Err(Error::EmptyInput(format!("category {i} has an empty name")));
        }
        Ok(Self { names })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn k(&self) -> usize {
        self.names.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name.trim())
    }

    /// True when two categories share a description.
    pub fn has_duplicates(&self) -> bool {
        let mut seen = HashSet::new();
        !self.names.iter().all(|n| seen.insert(n))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Polarity {
    #[default]
    HigherBetter,
    LowerBetter,
}

impl Polarity {
    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::HigherBetter => "higher",
            Polarity::LowerBetter => "lower",
        }
    }
}

/// Documents × categories relevance scores.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    n_docs: usize,
    k: usize,
    scores: Vec<f64>,
    polarity: Polarity,
}

impl ScoreMatrix {
    pub fn new(n_docs: usize, k: usize, scores: Vec<f64>, polarity: Polarity) -> Result<Self> {
        if n_docs == 0 || k == 0 {
            return Err(Error::EmptyInput(
                "score matrix has a zero dimension".into(),
            ));
        }
        if scores.len() != n_docs * k {
            return Err(Error::DimensionMismatch {
                context: "score data length".into(),
                expected: n_docs * k,
                found: scores.len(),
            });
        }
        check_finite(&scores, k)?;
        Ok(Self {
            n_docs,
            k,
            scores,
            polarity,
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R], polarity: Polarity) -> Result<Self> {
        let k = rows.first().map_or(0, |r| r.as_ref().len());
        let mut scores = Vec::with_capacity(rows.len() * k);
        for row in rows {
            let row = row.as_ref();
            if row.len() != k {
                return Err(Error::DimensionMismatch {
                    context: "score row".into(),
                    expected: k,
                    found: row.len(),
                });
            }
            scores.extend_from_slice(row);
        }
        Self::new(rows.len(), k, scores, polarity)
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.scores[i * self.k..(i + 1) * self.k]
    }

    pub fn iter_rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.scores.chunks_exact(self.k)
    }

    /// Best category per row under the matrix polarity, lowest index on ties.
    pub fn best_per_row(&self) -> Vec<usize> {
        self.iter_rows()
            .map(|row| match self.polarity {
                Polarity::LowerBetter => argmin(row),
                Polarity::HigherBetter => argmax(row),
            })
            .collect()
    }
}

/// Row-stochastic matrix; every row is a distribution over categories.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMatrix {
    n_docs: usize,
    k: usize,
    probs: Vec<f64>,
}

impl ProbabilityMatrix {
    pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

    pub fn new(n_docs: usize, k: usize, probs: Vec<f64>) -> Result<Self> {
        if n_docs == 0 || k == 0 {
            return Err(Error::EmptyInput(
                "probability matrix has a zero dimension".into(),
            ));
        }
        if probs.len() != n_docs * k {
            return Err(Error::DimensionMismatch {
                context: "probability data length".into(),
                expected: n_docs * k,
                found: probs.len(),
            });
        }
        check_finite(&probs, k)?;
        for (r, row) in probs.chunks_exact(k).enumerate() {
            if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                return Err(Error::Invalid(format!(
                    "row {r} has an entry outside [0, 1]"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > Self::ROW_SUM_TOLERANCE {
                return Err(Error::Invalid(format!("row {r} sums to {sum}, not 1")));
            }
        }
        Ok(Self { n_docs, k, probs })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let k = rows.first().map_or(0, |r| r.as_ref().len());
        let mut probs = Vec::with_capacity(rows.len() * k);
        for row in rows {
            let row = row.as_ref();
            if row.len() != k {
                return Err(Error::DimensionMismatch {
                    context: "probability row".into(),
                    expected: k,
                    found: row.len(),
                });
            }
            probs.extend_from_slice(row);
        }
        Self::new(rows.len(), k, probs)
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.probs[i * self.k..(i + 1) * self.k]
    }

    pub fn iter_rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.probs.chunks_exact(self.k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    #[default]
    CosineDistance,
    SquaredL2,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::CosineDistance => "cosine",
            Metric::SquaredL2 => "squared-l2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EarlyStopping {
    #[default]
    MinObjective,
    LastIteration,
}

impl EarlyStopping {
    pub fn as_str(self) -> &'static str {
        match self {
            EarlyStopping::MinObjective => "min-objective",
            EarlyStopping::LastIteration => "last-iteration",
        }
    }
}

/// Interpolation weights for the centroid update:
/// `mean * cluster_mean + anchor * anchor_mean + category * initial_embedding`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentroidWeights {
    mean: f64,
    anchor: f64,
    category: f64,
}

impl CentroidWeights {
    pub const SUM_TOLERANCE: f64 = 1e-12;

    /// Halfway between the cluster mean and the category embedding.
    pub const DUAL: Self = Self {
        mean: 0.5,
        anchor: 0.0,
        category: 0.5,
    };

    /// Mean, anchor mean and twice the category embedding, over four.
    pub const FEW_SHOT: Self = Self {
        mean: 0.25,
        anchor: 0.25,
        category: 0.5,
    };

    /// Standard k-means.
    pub const PLAIN: Self = Self {
        mean: 1.0,
        anchor: 0.0,
        category: 0.0,
    };

    pub fn new(mean: f64, anchor: f64, category: f64) -> Result<Self> {
        for (name, w) in [("mean", mean), ("anchor", anchor), ("category", category)] {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::WeightMismatch(format!(
                    "{name} weight {w} must be a nonnegative real"
                )));
            }
        }
        let sum = mean + anchor + category;
        if (sum - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(Error::WeightMismatch(format!(
                "weights sum to {sum}, not 1"
            )));
        }
        Ok(Self {
            mean,
            anchor,
            category,
        })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn category(&self) -> f64 {
        self.category
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementConfig {
    pub metric: Metric,
    pub max_iters: usize,
    pub weights: CentroidWeights,
    pub early_stopping: EarlyStopping,
    pub seed: u64,
    /// Re-project interpolated centroids onto the unit sphere under cosine.
    pub renormalize_centroids: bool,
    pub n_augmented_categories: usize,
    pub n_augmented_texts: usize,
    /// Not part of the result contract; both strategies give identical output.
    pub exec: Exec,
}

impl RefinementConfig {
    pub const DEFAULT_MAX_ITERS: usize = 100;

    pub fn dual() -> Self {
        Self {
            metric: Metric::CosineDistance,
            max_iters: Self::DEFAULT_MAX_ITERS,
            weights: CentroidWeights::DUAL,
            early_stopping: EarlyStopping::MinObjective,
            seed: 0,
            renormalize_centroids: true,
            n_augmented_categories: 0,
            n_augmented_texts: 0,
            exec: Exec::default(),
        }
    }

    pub fn few_shot() -> Self {
        Self {
            weights: CentroidWeights::FEW_SHOT,
            ..Self::dual()
        }
    }

    pub fn single() -> Self {
        Self {
            weights: CentroidWeights::PLAIN,
            early_stopping: EarlyStopping::LastIteration,
            ..Self::dual()
        }
    }

    pub fn with_metric(mut self, metric: Metric) -> Self {
        self.metric = metric;
        self
    }

    pub fn with_weights(mut self, weights: CentroidWeights) -> Self {
        self.weights = weights;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::Invalid("max_iters must be at least 1".into()));
        }
        // Weights are validated at construction; re-check in case of a
        // hand-built struct literal.
        CentroidWeights::new(
            self.weights.mean,
            self.weights.anchor,
            self.weights.category,
        )?;
        Ok(())
    }
}

impl Default for RefinementConfig {
    fn default() -> Self {
        Self::dual()
    }
}

/// Centroids of a finished run: embeddings for the dual paths, distributions
/// for the single-encoder path.
#[derive(Debug, Clone, PartialEq)]
pub enum Centroids {
    Embedding(EmbeddingMatrix),
    Probability(ProbabilityMatrix),
}

impl Centroids {
    pub fn rows(&self) -> usize {
        match self {
            Centroids::Embedding(m) => m.rows(),
            Centroids::Probability(m) => m.n_docs(),
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        match self {
            Centroids::Embedding(m) => m.row(i),
            Centroids::Probability(m) => m.row(i),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementResult {
    /// Predictions over the evaluation documents, one vector per iteration.
    pub predictions_per_iter: Vec<Vec<usize>>,
    pub objective_per_iter: Vec<f64>,
    pub selected_iter: usize,
    pub final_predictions: Vec<usize>,
    /// Centroids that produced `final_predictions` (those entering the
    /// selected iteration), including any augmented centroids.
    pub final_centroids: Centroids,
    /// Distances from each evaluation document to each real category at the
    /// selected iteration.
    pub selected_distances: ScoreMatrix,
    pub converged: bool,
    pub iterations_run: usize,
}

/// Gold category index per evaluation document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldLabels {
    labels: Vec<usize>,
}

impl GoldLabels {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if let Some(index) = labels.iter().position(|&l| l >= k) {
            return Err(Error::LabelOutOfRange {
                index,
                label: labels[index],
                k,
            });
        }
        Ok(Self { labels })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Documents and categories whose shapes have been checked against each other.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub docs: EmbeddingMatrix,
    pub cats: EmbeddingMatrix,
    pub gold: Option<GoldLabels>,
}

impl Dataset {
    pub fn k(&self) -> usize {
        self.cats.rows()
    }
}

pub fn validate_dataset(
    docs: EmbeddingMatrix,
    cats: EmbeddingMatrix,
    gold: Option<&[usize]>,
) -> Result<Dataset> {
    if docs.dim() != cats.dim() {
        return Err(Error::DimensionMismatch {
            context: "category embeddings".into(),
            expected: docs.dim(),
            found: cats.dim(),
        });
    }
    if cats.rows() < 2 {
        return Err(Error::EmptyInput(format!(
            "need at least 2 categories, found {}",
            cats.rows()
        )));
    }
    let gold = match gold {
        Some(labels) => {
            if labels.len() != docs.rows() {
                return Err(Error::DimensionMismatch {
                    context: "gold labels".into(),
                    expected: docs.rows(),
                    found: labels.len(),
                });
            }
            Some(GoldLabels::new(labels.to_vec(), cats.rows())?)
        }
        None => None,
    };
    Ok(Dataset { docs, cats, gold })
}

/// Index of the smallest value; the lowest index wins ties.
pub fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = i;
        }
    }
    best
}

/// Index of the largest value; the lowest index wins ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}
