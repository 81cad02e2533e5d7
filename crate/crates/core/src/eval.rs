//! Accuracy metrics, label ensembles and label-name robustness sweeps.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::model::{CategorySet, EmbeddingMatrix, GoldLabels, RefinementConfig, ScoreMatrix};
use crate::refine::refine_dual;

fn check_lengths(preds: &[usize], gold: &[usize]) -> Result<()> {
    if preds.len() != gold.len() {
        return Err(Error::LengthMismatch {
            left: preds.len(),
            right: gold.len(),
        });
    }
    if preds.is_empty() {
        return Err(Error::EmptyInput("no predictions to score".into()));
    }
    Ok(())
}

/// Fraction of positions where the prediction equals the gold label.
pub fn accuracy(preds: &[usize], gold: &[usize]) -> Result<f64> {
    check_lengths(preds, gold)?;
    let hits = preds.iter().zip(gold).filter(|(p, g)| p == g).count();
    Ok(hits as f64 / preds.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OneToOne {
    pub accuracy: f64,
    /// `mapping[cluster]` is the category the cluster is mapped to.
    pub mapping: Vec<usize>,
}

/// Accuracy under the best bijection between predicted clusters and gold
/// categories, found by maximizing matched counts on the k×k coincidence
/// matrix.
pub fn one_to_one_accuracy(preds: &[usize], gold: &[usize], k: usize) -> Result<OneToOne> {
    check_lengths(preds, gold)?;
    let mut counts = vec![vec![0i64; k]; k];
    for (index, (&p, &g)) in preds.iter().zip(gold).enumerate() {
        for label in [p, g] {
            if label >= k {
                return Err(Error::LabelOutOfRange { index, label, k });
            }
        }
        counts[p][g] += 1;
    }
    let mapping = max_weight_matching(&counts);
    let hits: i64 = mapping.iter().enumerate().map(|(p, &g)| counts[p][g]).sum();
    Ok(OneToOne {
        accuracy: hits as f64 / preds.len() as f64,
        mapping,
    })
}

/// Hungarian algorithm (shortest augmenting paths with potentials) on a
/// square matrix, maximizing total weight. Returns `assignment[row] = col`.
pub fn max_weight_matching(weights: &[Vec<i64>]) -> Vec<usize> {
    let n = weights.len();
    if n == 0 {
        return Vec::new();
    }
    // 1-based arrays; column 0 is the virtual start.
    let cost = |i: usize, j: usize| -weights[i - 1][j - 1];
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut min_to = vec![i64::MAX; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost(i0, j) - u[i0] - v[j];
                if reduced < min_to[j] {
                    min_to[j] = reduced;
                    way[j] = j0;
                }
                if min_to[j] < delta {
                    delta = min_to[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_to[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        assignment[row_of[j] - 1] = j - 1;
    }
    assignment
}

/// Sums score (or distance) matrices from several label-name settings and
/// takes the per-row best under their shared polarity.
pub fn ensemble(runs: &[ScoreMatrix]) -> Result<Vec<usize>> {
    let first = runs
        .first()
        .ok_or_else(|| Error::EmptyInput("ensemble needs at least one run".into()))?;
    let mut total = first.scores().to_vec();
    for run in &runs[1..] {
        if run.n_docs() != first.n_docs() || run.k() != first.k() {
            return Err(Error::ShapeMismatch {
                expected_rows: first.n_docs(),
                expected_cols: first.k(),
                rows: run.n_docs(),
                cols: run.k(),
            });
        }
        if run.polarity() != first.polarity() {
            return Err(Error::MixedPolarity);
        }
        for (t, s) in total.iter_mut().zip(run.scores()) {
            *t += s;
        }
    }
    let summed = ScoreMatrix::new(first.n_docs(), first.k(), total, first.polarity())?;
    Ok(summed.best_per_row())
}

/// Encodes category descriptions into the document embedding space.
pub trait CategoryEncoder {
    fn encode_categories(&self, categories: &CategorySet) -> Result<EmbeddingMatrix>;
}

/// Label-name sets to evaluate: explicit sets plus combinations drawn from
/// per-category synonym pools.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepSpec {
    pub label_sets: Vec<CategorySet>,
    /// One pool of alternative names per category.
    pub synonym_pools: Vec<Vec<String>>,
    /// Sample this many pool combinations without replacement; `None` (or a
    /// count at least the total) enumerates all of them.
    pub sample_count: Option<usize>,
    pub seed: u64,
}

impl SweepSpec {
    /// Number of pool combinations, or `None` on overflow.
    pub fn combination_count(&self) -> Option<usize> {
        if self.synonym_pools.is_empty() {
            return Some(0);
        }
        self.synonym_pools
            .iter()
            .try_fold(1usize, |acc, pool| acc.checked_mul(pool.len()))
    }

    /// All label sets of the sweep, explicit sets first, then pool
    /// combinations in lexicographic order of synonym indices.
    pub fn generate(&self) -> Result<Vec<CategorySet>> {
        let mut sets = self.label_sets.clone();
        if !self.synonym_pools.is_empty() {
            if let Some(i) = self.synonym_pools.iter().position(Vec::is_empty) {
                return Err(Error::EmptyInput(format!("synonym pool {i} is empty")));
            }
            let total = self
                .combination_count()
                .ok_or_else(|| Error::Invalid("too many synonym combinations".into()))?;
            let picks: Vec<usize> = match self.sample_count {
                Some(count) if count < total => {
                    let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                    let mut picks = sample(&mut rng, total, count).into_vec();
                    picks.sort_unstable();
                    picks
                }
                _ => (0..total).collect(),
            };
            for pick in picks {
                sets.push(CategorySet::new(self.combination(pick))?);
            }
        }
        if let Some(first) = sets.first() {
            if let Some(bad) = sets.iter().find(|s| s.k() != first.k()) {
                return Err(Error::LengthMismatch {
                    left: first.k(),
                    right: bad.k(),
                });
            }
        }
        Ok(sets)
    }

    // Mixed-radix decode; the last category varies fastest.
    fn combination(&self, mut index: usize) -> Vec<String> {
        let mut names = vec![String::new(); self.synonym_pools.len()];
        for (slot, pool) in names.iter_mut().zip(&self.synonym_pools).rev() {
            *slot = pool[index % pool.len()].clone();
            index /= pool.len();
        }
        names
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub run_id: usize,
    pub label_names: Vec<String>,
    pub accuracy_before: f64,
    pub accuracy_after: f64,
    pub improved: bool,
    pub duplicate_names: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub runs: Vec<RunRecord>,
    pub run_count: usize,
    pub improved_count: usize,
    pub fraction_improved: f64,
    pub mean_accuracy_before: f64,
    pub mean_accuracy_after: f64,
    pub duplicate_name_runs: usize,
}

impl EvaluationReport {
    pub fn from_runs(runs: Vec<RunRecord>) -> Result<Self> {
        if runs.is_empty() {
            return Err(Error::EmptyInput("sweep produced no runs".into()));
        }
        let n = runs.len() as f64;
        let improved_count = runs.iter().filter(|r| r.improved).count();
        Ok(Self {
            run_count: runs.len(),
            improved_count,
            fraction_improved: improved_count as f64 / n,
            mean_accuracy_before: runs.iter().map(|r| r.accuracy_before).sum::<f64>() / n,
            mean_accuracy_after: runs.iter().map(|r| r.accuracy_after).sum::<f64>() / n,
            duplicate_name_runs: runs.iter().filter(|r| r.duplicate_names).count(),
            runs,
        })
    }

    /// `(run_id, initial accuracy, gain)` per run.
    pub fn scatter(&self) -> Vec<(usize, f64, f64)> {
        self.runs
            .iter()
            .map(|r| {
                (
                    r.run_id,
                    r.accuracy_before,
                    r.accuracy_after - r.accuracy_before,
                )
            })
            .collect()
    }
}

/// Runs dual refinement once per generated label set and compares accuracy
/// before (nearest category embedding) and after refinement.
pub fn run_sweep<E>(
    docs: &EmbeddingMatrix,
    gold: &GoldLabels,
    spec: &SweepSpec,
    config: &RefinementConfig,
    encoder: &E,
) -> Result<EvaluationReport>
where
    E: CategoryEncoder + Sync + ?Sized,
{
    if gold.len() != docs.rows() {
        return Err(Error::LengthMismatch {
            left: gold.len(),
            right: docs.rows(),
        });
    }
    let sets = spec.generate()?;
    // Runs fan out across workers; each run stays sequential inside.
    let inner = RefinementConfig {
        exec: Exec::Sequential,
        ..config.clone()
    };
    let runs = config.exec.try_map_indices(sets.len(), |run_id| {
        let set = &sets[run_id];
        let categories = encoder.encode_categories(set)?;
        let result = refine_dual(docs, &categories, &inner, None)?;
        let accuracy_before = accuracy(&result.predictions_per_iter[0], gold.labels())?;
        let accuracy_after = accuracy(&result.final_predictions, gold.labels())?;
        Ok::<_, Error>(RunRecord {
            run_id,
            label_names: set.names().to_vec(),
            accuracy_before,
            accuracy_after,
            improved: accuracy_after > accuracy_before,
            duplicate_names: set.has_duplicates(),
        })
    })?;
    EvaluationReport::from_runs(runs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Metric, Polarity};

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&[0, 1, 2], &[0, 1, 2]).unwrap(), 1.0);
        assert_eq!(accuracy(&[0, 0, 1, 1], &[1, 1, 0, 0]).unwrap(), 0.0);
        assert_eq!(accuracy(&[0, 1, 1, 1], &[0, 1, 0, 1]).unwrap(), 0.75);
        assert!(matches!(
            accuracy(&[0], &[0, 1]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn one_to_one_examples() {
        let swap = one_to_one_accuracy(&[0, 0, 1, 1], &[1, 1, 0, 0], 2).unwrap();
        assert_eq!(swap.accuracy, 1.0);
        assert_eq!(swap.mapping, vec![1, 0]);
        let id = one_to_one_accuracy(&[0, 1, 2], &[0, 1, 2], 3).unwrap();
        assert_eq!((id.accuracy, id.mapping), (1.0, vec![0, 1, 2]));
        // Both bijections score 2 of 4.
        let half = one_to_one_accuracy(&[0, 1, 0, 1], &[0, 0, 1, 1], 2).unwrap();
        assert_eq!(half.accuracy, 0.5);
        assert!(one_to_one_accuracy(&[0, 3], &[0, 1], 2).is_err());
    }

    #[test]
    fn hungarian_small_cases() {
        assert_eq!(max_weight_matching(&[vec![5]]), vec![0]);
        let w = vec![vec![1, 9, 1], vec![9, 1, 1], vec![1, 1, 9]];
        assert_eq!(max_weight_matching(&w), vec![1, 0, 2]);
    }

    fn matrix(rows: &[[f64; 2]], polarity: Polarity) -> ScoreMatrix {
        ScoreMatrix::from_rows(rows, polarity).unwrap()
    }

    #[test]
    fn ensemble_examples() {
        let a = matrix(&[[0.1, 0.3], [0.9, 0.2]], Polarity::LowerBetter);
        assert_eq!(ensemble(std::slice::from_ref(&a)).unwrap(), vec![0, 1]);
        assert_eq!(ensemble(&[a.clone(), a.clone()]).unwrap(), vec![0, 1]);
        // A prefers 0 by 0.1, B prefers 1 by 0.3.
        let a = matrix(&[[0.6, 0.5]], Polarity::HigherBetter);
        let b = matrix(&[[0.2, 0.5]], Polarity::HigherBetter);
        assert_eq!(ensemble(&[a, b]).unwrap(), vec![1]);
    }

    #[test]
    fn ensemble_rejects_bad_inputs() {
        let a = matrix(&[[0.1, 0.3]], Polarity::LowerBetter);
        let b = matrix(&[[0.1, 0.3]], Polarity::HigherBetter);
        let c = matrix(&[[0.1, 0.3], [0.0, 0.0]], Polarity::LowerBetter);
        assert!(matches!(
            ensemble(&[a.clone(), b]),
            Err(Error::MixedPolarity)
        ));
        assert!(matches!(
            ensemble(&[a, c]),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(ensemble(&[]).is_err());
    }

    #[test]
    fn pool_enumeration_is_lexicographic() {
        let spec = SweepSpec {
            synonym_pools: vec![
                vec!["a".into(), "b".into()],
                vec!["x".into(), "y".into(), "z".into()],
            ],
            ..Default::default()
        };
        let sets = spec.generate().unwrap();
        assert_eq!(sets.len(), 6);
        let flat: Vec<String> = sets.iter().map(|s| s.names().join("+")).collect();
        assert_eq!(flat, ["a+x", "a+y", "a+z", "b+x", "b+y", "b+z"]);
    }

    #[test]
    fn pool_sampling_is_seeded() {
        let spec = SweepSpec {
            synonym_pools: vec![
                (0..10).map(|i| format!("a{i}")).collect(),
                (0..10).map(|i| format!("b{i}")).collect(),
            ],
            sample_count: Some(7),
            seed: 3,
            ..Default::default()
        };
        let first = spec.generate().unwrap();
        assert_eq!(first.len(), 7);
        assert_eq!(first, spec.generate().unwrap());
        let other = SweepSpec {
            seed: 4,
            ..spec.clone()
        }
        .generate()
        .unwrap();
        assert_ne!(first, other);
    }

    struct Fixed(Vec<(String, Vec<f64>)>);

    impl CategoryEncoder for Fixed {
        fn encode_categories(&self, categories: &CategorySet) -> Result<EmbeddingMatrix> {
            let rows: Vec<Vec<f64>> = categories
                .names()
                .iter()
                .map(|n| self.0.iter().find(|(k, _)| k == n).unwrap().1.clone())
                .collect();
            EmbeddingMatrix::from_rows(&rows)
        }
    }

    #[test]
    fn sweep_aggregates_runs() {
        let docs =
            EmbeddingMatrix::from_rows(&[[0.0, 1.0], [0.0, 0.9], [1.0, 0.0], [0.9, 0.0]]).unwrap();
        let gold = GoldLabels::new(vec![0, 0, 1, 1], 2).unwrap();
        let encoder = Fixed(vec![
            ("up".into(), vec![0.0, 0.5]),
            ("north".into(), vec![0.3, 0.5]),
            ("right".into(), vec![0.5, 0.0]),
        ]);
        let spec = SweepSpec {
            synonym_pools: vec![vec!["up".into(), "north".into()], vec!["right".into()]],
            ..Default::default()
        };
        let config = RefinementConfig::dual().with_metric(Metric::SquaredL2);
        let report = run_sweep(&docs, &gold, &spec, &config, &encoder).unwrap();
        assert_eq!(report.run_count, 2);
        assert_eq!(report.runs[1].label_names, ["north", "right"]);
        let mean = report.runs.iter().map(|r| r.accuracy_after).sum::<f64>() / 2.0;
        assert!((report.mean_accuracy_after - mean).abs() < 1e-12);
        assert_eq!(report.scatter().len(), 2);
    }
}
