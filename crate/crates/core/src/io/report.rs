//! Report documents.
//!
//! A report is UTF-8 text: a `kind = ...` header, then `[section]` blocks.
//! A section holds `key = value` lines and/or tab-separated row lines, in a
//! fixed order, so identical inputs give byte-identical files. Reals are
//! written in shortest round-trip form and read back bit-exactly.
//!
//! ```text
//! # labelrefine report
//! kind = refinement
//! algorithm = dual
//!
//! [config]
//! metric = squared-l2
//! ...
//!
//! [predictions]
//! 0<TAB>0<TAB>world
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::{fmt_real, read_to_string, write_string};
use crate::error::{Error, Result};
use crate::eval::{EvaluationReport, OneToOne, RunRecord};
use crate::exec::Exec;
use crate::model::{
    CentroidWeights, Centroids, EarlyStopping, EmbeddingMatrix, Metric, Polarity,
    ProbabilityMatrix, RefinementConfig, RefinementResult, ScoreMatrix,
};
use crate::refine::Clustering;

const BANNER: &str = "# labelrefine report";

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Section {
    pub name: String,
    pub fields: Vec<(String, String)>,
    pub rows: Vec<String>,
}

impl Section {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            ..Default::default()
        }
    }

    fn field(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.fields.push((key.to_string(), value.to_string()));
        self
    }

    fn row(&mut self, cells: &[&str]) -> &mut Self {
        self.rows.push(cells.join("\t"));
        self
    }

    pub fn get(&self, key: &str) -> Result<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| Error::Invalid(format!("report section [{}] lacks {key}", self.name)))
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let raw = self.get(key)?;
        raw.parse()
            .map_err(|_| Error::Invalid(format!("bad value {raw:?} for {key} in [{}]", self.name)))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Document {
    pub header: Section,
    pub sections: Vec<Section>,
}

impl Document {
    fn new(kind: &str) -> Self {
        let mut header = Section::new("");
        header.field("kind", kind);
        Self {
            header,
            sections: Vec::new(),
        }
    }

    pub fn kind(&self) -> Result<&str> {
        self.header.get("kind")
    }

    pub fn section(&self, name: &str) -> Result<&Section> {
        self.sections
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::Invalid(format!("report lacks section [{name}]")))
    }

    pub fn has_section(&self, name: &str) -> bool {
        self.sections.iter().any(|s| s.name == name)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(BANNER);
        out.push('\n');
        for (k, v) in &self.header.fields {
            writeln!(out, "{k} = {v}").unwrap();
        }
        for s in &self.sections {
            writeln!(out, "\n[{}]", s.name).unwrap();
            for (k, v) in &s.fields {
                writeln!(out, "{k} = {v}").unwrap();
            }
            for r in &s.rows {
                out.push_str(r);
                out.push('\n');
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = Document::default();
        let mut current: Option<Section> = None;
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                if let Some(done) = current.take() {
                    doc.sections.push(done);
                }
                current = Some(Section::new(name));
                continue;
            }
            let target = current.as_mut().unwrap_or(&mut doc.header);
            if line.contains('\t') {
                target.rows.push(line.to_string());
            } else {
                let (k, v) = line
                    .split_once(" = ")
                    .ok_or_else(|| Error::Invalid(format!("report line {}: {line:?}", i + 1)))?;
                target.fields.push((k.to_string(), v.to_string()));
            }
        }
        if let Some(done) = current {
            doc.sections.push(done);
        }
        Ok(doc)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        write_string(path.as_ref(), &self.render())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&read_to_string(path.as_ref())?)
    }
}

fn join_reals(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| fmt_real(*v))
        .collect::<Vec<_>>()
        .join(" ")
}

fn join_indices(values: &[usize]) -> String {
    values
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn split_reals(raw: &str) -> Result<Vec<f64>> {
    raw.split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::Invalid(format!("bad real {t:?} in report")))
        })
        .collect()
}

fn split_indices(raw: &str) -> Result<Vec<usize>> {
    raw.split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::Invalid(format!("bad index {t:?} in report")))
        })
        .collect()
}

/// Splits `position\trest`, checking positions run 0, 1, 2, ...
fn indexed_rows(section: &Section) -> Result<Vec<&str>> {
    section
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let (pos, rest) = r.split_once('\t').expect("rows contain a tab");
            if pos.parse::<usize>().ok() != Some(i) {
                return Err(Error::Invalid(format!(
                    "[{}] row {i} is labeled {pos:?}",
                    section.name
                )));
            }
            Ok(rest)
        })
        .collect()
}

fn matrix_rows(section: &Section) -> Result<(usize, usize, Vec<f64>)> {
    let rows = indexed_rows(section)?;
    let mut data = Vec::new();
    let mut dim = None;
    for rest in &rows {
        let values = split_reals(rest)?;
        if *dim.get_or_insert(values.len()) != values.len() {
            return Err(Error::Invalid(format!(
                "[{}] rows are ragged",
                section.name
            )));
        }
        data.extend(values);
    }
    Ok((rows.len(), dim.unwrap_or(0), data))
}

fn matrix_section(name: &str, rows: impl Iterator<Item = impl AsRef<[f64]>>) -> Section {
    let mut s = Section::new(name);
    for (i, row) in rows.enumerate() {
        s.row(&[&i.to_string(), &join_reals(row.as_ref())]);
    }
    s
}

fn metric_from(raw: &str) -> Result<Metric> {
    match raw {
        "cosine" => Ok(Metric::CosineDistance),
        "squared-l2" => Ok(Metric::SquaredL2),
        other => Err(Error::Invalid(format!("unknown metric {other:?}"))),
    }
}

fn early_stopping_from(raw: &str) -> Result<EarlyStopping> {
    match raw {
        "min-objective" => Ok(EarlyStopping::MinObjective),
        "last-iteration" => Ok(EarlyStopping::LastIteration),
        other => Err(Error::Invalid(format!(
            "unknown early stopping mode {other:?}"
        ))),
    }
}

fn config_section(config: &RefinementConfig) -> Section {
    let mut s = Section::new("config");
    s.field("metric", config.metric.as_str())
        .field("max_iters", config.max_iters)
        .field("w_mean", fmt_real(config.weights.mean()))
        .field("w_anchor", fmt_real(config.weights.anchor()))
        .field("w_category", fmt_real(config.weights.category()))
        .field("early_stopping", config.early_stopping.as_str())
        .field("seed", config.seed)
        .field("renormalize_centroids", config.renormalize_centroids)
        .field("n_augmented_categories", config.n_augmented_categories)
        .field("n_augmented_texts", config.n_augmented_texts);
    s
}

fn config_from(s: &Section) -> Result<RefinementConfig> {
    Ok(RefinementConfig {
        metric: metric_from(s.get("metric")?)?,
        max_iters: s.parse("max_iters")?,
        weights: CentroidWeights::new(
            s.parse("w_mean")?,
            s.parse("w_anchor")?,
            s.parse("w_category")?,
        )?,
        early_stopping: early_stopping_from(s.get("early_stopping")?)?,
        seed: s.parse("seed")?,
        renormalize_centroids: s.parse("renormalize_centroids")?,
        n_augmented_categories: s.parse("n_augmented_categories")?,
        n_augmented_texts: s.parse("n_augmented_texts")?,
        exec: Exec::default(),
    })
}

/// Accuracy against gold labels, plain and under the best cluster mapping.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub accuracy: f64,
    pub one_to_one: OneToOne,
}

fn metrics_section(m: &Metrics, n_docs: usize) -> Section {
    let mut s = Section::new("metrics");
    s.field("n_docs", n_docs)
        .field("accuracy", fmt_real(m.accuracy))
        .field("one_to_one_accuracy", fmt_real(m.one_to_one.accuracy))
        .field("one_to_one_mapping", join_indices(&m.one_to_one.mapping));
    s
}

fn metrics_from(s: &Section) -> Result<Metrics> {
    Ok(Metrics {
        accuracy: s.parse("accuracy")?,
        one_to_one: OneToOne {
            accuracy: s.parse("one_to_one_accuracy")?,
            mapping: split_indices(s.get("one_to_one_mapping")?)?,
        },
    })
}

fn category_name(names: Option<&[String]>, index: usize) -> String {
    names
        .and_then(|n| n.get(index))
        .cloned()
        .unwrap_or_else(|| format!("c{index}"))
}

fn categories_section(names: &[String]) -> Section {
    let mut s = Section::new("categories");
    for (i, n) in names.iter().enumerate() {
        s.row(&[&i.to_string(), n]);
    }
    s
}

fn predictions_section(predictions: &[usize], names: Option<&[String]>) -> Section {
    let mut s = Section::new("predictions");
    for (t, &p) in predictions.iter().enumerate() {
        s.row(&[&t.to_string(), &p.to_string(), &category_name(names, p)]);
    }
    s
}

fn predictions_from(s: &Section) -> Result<Vec<usize>> {
    indexed_rows(s)?
        .into_iter()
        .map(|rest| {
            let index = rest.split('\t').next().unwrap_or_default();
            index
                .parse()
                .map_err(|_| Error::Invalid(format!("bad prediction {index:?}")))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Dual,
    FewShot,
    Single,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Dual => "dual",
            Algorithm::FewShot => "fewshot",
            Algorithm::Single => "single",
        }
    }

    fn from_str(raw: &str) -> Result<Self> {
        match raw {
            "dual" => Ok(Algorithm::Dual),
            "fewshot" => Ok(Algorithm::FewShot),
            "single" => Ok(Algorithm::Single),
            other => Err(Error::Invalid(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementReport {
    pub algorithm: Algorithm,
    pub config: RefinementConfig,
    pub result: RefinementResult,
    pub category_names: Option<Vec<String>>,
    pub metrics: Option<Metrics>,
}

impl RefinementReport {
    pub fn to_document(&self) -> Document {
        let r = &self.result;
        let mut doc = Document::new("refinement");
        doc.header.field("algorithm", self.algorithm.as_str());
        doc.sections.push(config_section(&self.config));

        let mut result = Section::new("result");
        result
            .field("n_docs", r.final_predictions.len())
            .field("k", r.selected_distances.k())
            .field("iterations_run", r.iterations_run)
            .field("converged", r.converged)
            .field("selected_iter", r.selected_iter)
            .field("objective_per_iter", join_reals(&r.objective_per_iter));
        doc.sections.push(result);

        if let Some(m) = &self.metrics {
            doc.sections
                .push(metrics_section(m, r.final_predictions.len()));
        }
        if let Some(names) = &self.category_names {
            doc.sections.push(categories_section(names));
        }
        doc.sections.push(predictions_section(
            &r.final_predictions,
            self.category_names.as_deref(),
        ));

        let mut iterations = Section::new("iterations");
        for (i, p) in r.predictions_per_iter.iter().enumerate() {
            iterations.row(&[&i.to_string(), &join_indices(p)]);
        }
        doc.sections.push(iterations);

        let mut centroids = match &r.final_centroids {
            Centroids::Embedding(m) => matrix_section("centroids", m.iter_rows()),
            Centroids::Probability(m) => matrix_section("centroids", m.iter_rows()),
        };
        let kind = match r.final_centroids {
            Centroids::Embedding(_) => "embedding",
            Centroids::Probability(_) => "probability",
        };
        centroids.fields.push(("kind".into(), kind.into()));
        doc.sections.push(centroids);

        let mut distances = matrix_section("distances", r.selected_distances.iter_rows());
        distances.fields.push((
            "polarity".into(),
            r.selected_distances.polarity().as_str().into(),
        ));
        doc.sections.push(distances);
        doc
    }

    pub fn from_document(doc: &Document) -> Result<Self> {
        if doc.kind()? != "refinement" {
            return Err(Error::Invalid(format!(
                "expected a refinement report, found {}",
                doc.kind()?
            )));
        }
        let algorithm = Algorithm::from_str(doc.header.get("algorithm")?)?;
        let config = config_from(doc.section("config")?)?;
        let result = doc.section("result")?;

        let predictions_per_iter = indexed_rows(doc.section("iterations")?)?
            .into_iter()
            .map(split_indices)
            .collect::<Result<Vec<_>>>()?;

        let centroid_section = doc.section("centroids")?;
        let (rows, dim, data) = matrix_rows(centroid_section)?;
        let final_centroids = match centroid_section.get("kind")? {
            "embedding" => Centroids::Embedding(EmbeddingMatrix::new(rows, dim, data)?),
            "probability" => Centroids::Probability(ProbabilityMatrix::new(rows, dim, data)?),
            other => return Err(Error::Invalid(format!("unknown centroid kind {other:?}"))),
        };

        let distance_section = doc.section("distances")?;
        let (n, k, data) = matrix_rows(distance_section)?;
        let polarity = match distance_section.get("polarity")? {
            "lower" => Polarity::LowerBetter,
            _ => Polarity::HigherBetter,
        };

        let category_names = if doc.has_section("categories") {
            Some(
                indexed_rows(doc.section("categories")?)?
                    .into_iter()
                    .map(str::to_string)
                    .collect(),
            )
        } else {
            None
        };
        let metrics = if doc.has_section("metrics") {
            Some(metrics_from(doc.section("metrics")?)?)
        } else {
            None
        };

        Ok(Self {
            algorithm,
            config,
            result: RefinementResult {
                predictions_per_iter,
                objective_per_iter: split_reals(result.get("objective_per_iter")?)?,
                selected_iter: result.parse("selected_iter")?,
                final_predictions: predictions_from(doc.section("predictions")?)?,
                final_centroids,
                selected_distances: ScoreMatrix::new(n, k, data, polarity)?,
                converged: result.parse("converged")?,
                iterations_run: result.parse("iterations_run")?,
            },
            category_names,
            metrics,
        })
    }
}

pub fn write_refinement_report(report: &RefinementReport, path: impl AsRef<Path>) -> Result<()> {
    report.to_document().write(path)
}

pub fn read_refinement_report(path: impl AsRef<Path>) -> Result<RefinementReport> {
    RefinementReport::from_document(&Document::read(path)?)
}

/// Report for unsupervised k-means from random documents.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringReport {
    pub metric: Metric,
    pub k: usize,
    pub seed: u64,
    pub max_iters: usize,
    pub clustering: Clustering,
    pub category_names: Option<Vec<String>>,
    pub metrics: Option<Metrics>,
}

impl ClusteringReport {
    pub fn to_document(&self) -> Document {
        let c = &self.clustering;
        let mut doc = Document::new("clustering");
        let mut config = Section::new("config");
        config
            .field("metric", self.metric.as_str())
            .field("k", self.k)
            .field("seed", self.seed)
            .field("max_iters", self.max_iters);
        doc.sections.push(config);

        let mut result = Section::new("result");
        result
            .field("n_docs", c.assignments.len())
            .field("iterations_run", c.iterations_run)
            .field("converged", c.converged)
            .field("initial_indices", join_indices(&c.initial_indices))
            .field("objective_per_iter", join_reals(&c.objective_per_iter));
        doc.sections.push(result);

        if let Some(m) = &self.metrics {
            doc.sections.push(metrics_section(m, c.assignments.len()));
        }
        let mut iterations = Section::new("iterations");
        for (i, a) in c.assignments_per_iter.iter().enumerate() {
            iterations.row(&[&i.to_string(), &join_indices(a)]);
        }
        doc.sections.push(iterations);
        // Cluster ids are reported as-is; the mapped category follows when a
        // mapping is known.
        let mut preds = Section::new("predictions");
        for (t, &cluster) in c.assignments.iter().enumerate() {
            match &self.metrics {
                Some(m) => {
                    let category = m.one_to_one.mapping[cluster];
                    preds.row(&[
                        &t.to_string(),
                        &cluster.to_string(),
                        &category.to_string(),
                        &category_name(self.category_names.as_deref(), category),
                    ]);
                }
                None => {
                    preds.row(&[&t.to_string(), &cluster.to_string()]);
                }
            }
        }
        doc.sections.push(preds);
        doc.sections
            .push(matrix_section("centroids", c.centroids.iter_rows()));
        doc
    }
}

/// Report for summed label-ensemble predictions.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleReport {
    pub run_count: usize,
    pub polarity: Polarity,
    pub predictions: Vec<usize>,
    pub category_names: Option<Vec<String>>,
    pub metrics: Option<Metrics>,
}

impl EnsembleReport {
    pub fn to_document(&self) -> Document {
        let mut doc = Document::new("ensemble");
        let mut inputs = Section::new("inputs");
        inputs
            .field("run_count", self.run_count)
            .field("polarity", self.polarity.as_str());
        doc.sections.push(inputs);
        if let Some(m) = &self.metrics {
            doc.sections
                .push(metrics_section(m, self.predictions.len()));
        }
        doc.sections.push(predictions_section(
            &self.predictions,
            self.category_names.as_deref(),
        ));
        doc
    }
}

/// Report comparing a prediction file against gold labels.
pub fn evaluation_document(metrics: &Metrics, n_docs: usize, k: usize) -> Document {
    let mut doc = Document::new("evaluation");
    let mut s = metrics_section(metrics, n_docs);
    s.field("k", k);
    doc.sections.push(s);
    doc
}

/// Report for a label-name sweep.
pub fn sweep_document(report: &EvaluationReport, config: &RefinementConfig) -> Document {
    let mut doc = Document::new("sweep");
    doc.sections.push(config_section(config));
    let mut summary = Section::new("summary");
    summary
        .field("run_count", report.run_count)
        .field("improved_count", report.improved_count)
        .field("fraction_improved", fmt_real(report.fraction_improved))
        .field(
            "mean_accuracy_before",
            fmt_real(report.mean_accuracy_before),
        )
        .field("mean_accuracy_after", fmt_real(report.mean_accuracy_after))
        .field("duplicate_name_runs", report.duplicate_name_runs);
    doc.sections.push(summary);
    let mut runs = Section::new("runs");
    for r in &report.runs {
        runs.row(&[
            &r.run_id.to_string(),
            &fmt_real(r.accuracy_before),
            &fmt_real(r.accuracy_after),
            &r.improved.to_string(),
            &r.duplicate_names.to_string(),
            &r.label_names.join("; "),
        ]);
    }
    doc.sections.push(runs);
    doc
}

pub fn read_sweep_report(path: impl AsRef<Path>) -> Result<(EvaluationReport, RefinementConfig)> {
    let doc = Document::read(path)?;
    if doc.kind()? != "sweep" {
        return Err(Error::Invalid(format!(
            "expected a sweep report, found {}",
            doc.kind()?
        )));
    }
    let config = config_from(doc.section("config")?)?;
    let runs = indexed_rows(doc.section("runs")?)?
        .into_iter()
        .enumerate()
        .map(|(run_id, rest)| {
            let cells: Vec<&str> = rest.split('\t').collect();
            let [before, after, improved, duplicates, names] = cells[..] else {
                return Err(Error::Invalid(format!(
                    "run {run_id} has {} cells",
                    cells.len()
                )));
            };
            let bad = |what: &str| Error::Invalid(format!("run {run_id}: bad {what}"));
            Ok(RunRecord {
                run_id,
                label_names: names.split("; ").map(str::to_string).collect(),
                accuracy_before: before.parse().map_err(|_| bad("accuracy_before"))?,
                accuracy_after: after.parse().map_err(|_| bad("accuracy_after"))?,
                improved: improved.parse().map_err(|_| bad("improved"))?,
                duplicate_names: duplicates.parse().map_err(|_| bad("duplicate flag"))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let report = EvaluationReport::from_runs(runs)?;
    let summary = doc.section("summary")?;
    if summary.parse::<usize>("run_count")? != report.run_count {
        return Err(Error::Invalid(
            "summary run_count disagrees with runs".into(),
        ));
    }
    Ok((report, config))
}

/// `run_id\tinitial_accuracy\tgain` table for plotting.
pub fn scatter_table(report: &EvaluationReport) -> String {
    let mut out = String::from("run_id\tinitial_accuracy\tgain\n");
    for (id, initial, gain) in report.scatter() {
        writeln!(out, "{id}\t{}\t{}", fmt_real(initial), fmt_real(gain)).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::refine::refine_dual;

    fn micro_report() -> RefinementReport {
        let docs =
            EmbeddingMatrix::from_rows(&[[0.0, 1.0], [0.0, 0.9], [1.0, 0.0], [0.9, 0.0]]).unwrap();
        let cats = EmbeddingMatrix::from_rows(&[[0.0, 0.5], [0.5, 0.0]]).unwrap();
        let config = RefinementConfig::dual().with_metric(Metric::SquaredL2);
        let result = refine_dual(&docs, &cats, &config, None).unwrap();
        RefinementReport {
            algorithm: Algorithm::Dual,
            config,
            result,
            category_names: Some(vec!["up".into(), "right side".into()]),
            metrics: Some(Metrics {
                accuracy: 0.75,
                one_to_one: OneToOne {
                    accuracy: 0.75,
                    mapping: vec![0, 1],
                },
            }),
        }
    }

    #[test]
    fn refinement_report_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.txt");
        let report = micro_report();
        write_refinement_report(&report, &path).unwrap();
        let back = read_refinement_report(&path).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn report_lists_predictions_with_names() {
        let text = micro_report().to_document().render();
        assert!(text.contains("\naccuracy = 0.75\n"));
        assert!(text.contains("[predictions]\n0\t0\tup\n1\t0\tup\n2\t1\tright side\n"));
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn unwritable_path_is_an_io_error() {
        let err =
            write_refinement_report(&micro_report(), "/nonexistent-dir/x/report.txt").unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn sweep_report_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.txt");
        let report = EvaluationReport::from_runs(vec![
            RunRecord {
                run_id: 0,
                label_names: vec!["world".into(), "science technology".into()],
                accuracy_before: 0.5,
                accuracy_after: 0.75,
                improved: true,
                duplicate_names: false,
            },
            RunRecord {
                run_id: 1,
                label_names: vec!["world".into(), "world".into()],
                accuracy_before: 0.5,
                accuracy_after: 0.25,
                improved: false,
                duplicate_names: true,
            },
        ])
        .unwrap();
        let config = RefinementConfig::dual();
        sweep_document(&report, &config).write(&path).unwrap();
        let (back, back_config) = read_sweep_report(&path).unwrap();
        assert_eq!(back, report);
        assert_eq!(back_config, config);
        assert_eq!(
            scatter_table(&report),
            "run_id\tinitial_accuracy\tgain\n0\t0.5\t0.25\n1\t0.5\t-0.25\n"
        );
    }
}
