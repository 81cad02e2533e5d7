//! Command-line front end.
//!
//! Every subcommand reads a manifest (`key=value` lines naming input files)
//! and writes one report. Exit status is 0 on success, 1 on data errors and
//! 2 on usage errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::encode::encode_texts;
use crate::error::{Error, Result};
use crate::eval::{accuracy, ensemble, one_to_one_accuracy, run_sweep, SweepSpec};
use crate::exec::Exec;
use crate::io::report::{
    evaluation_document, scatter_table, sweep_document, write_refinement_report, Algorithm,
    ClusteringReport, EnsembleReport, Metrics, RefinementReport,
};
use crate::io::{
    load_category_set, load_embeddings, load_labels, load_score_matrix, load_vectors,
    read_to_string, write_embeddings, write_labels, write_score_matrix, write_string, Manifest,
};
use crate::model::{
    validate_dataset, CategorySet, CentroidWeights, EarlyStopping, EmbeddingMatrix, GoldLabels,
    Metric, RefinementConfig, RefinementResult,
};
use crate::refine::{
    cluster_random_init_with, refine_dual, refine_fewshot, refine_single, AugmentedInputs,
    LabeledAnchors,
};

#[derive(Debug, Parser)]
#[command(
    name = "labelrefine",
    version,
    about = "k-means label refinement for dataless text classifiers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Average word vectors over texts and category names; writes docs.vec,
    /// cats.vec, names.txt and manifest.txt into the output directory.
    Encode(EncodeArgs),
    /// Dual-encoder refinement with interpolated centroids.
    RefineDual(DualArgs),
    /// Single-encoder refinement over softmaxed score rows.
    RefineSingle(SingleArgs),
    /// Dual-encoder refinement anchored by labeled documents.
    RefineFewshot(FewShotArgs),
    /// Unsupervised k-means from randomly chosen documents.
    ClusterRandom(ClusterArgs),
    /// Sum score matrices from several label-name settings.
    Ensemble(IoArgs),
    /// Accuracy and one-to-one accuracy of a prediction file.
    Eval(EvalArgs),
    /// Refinement over many label-name sets.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Cosine,
    #[value(name = "squared-l2", alias = "l2")]
    SquaredL2,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Cosine => Metric::CosineDistance,
            MetricArg::SquaredL2 => Metric::SquaredL2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EarlyStoppingArg {
    MinObjective,
    LastIteration,
}

impl From<EarlyStoppingArg> for EarlyStopping {
    fn from(e: EarlyStoppingArg) -> Self {
        match e {
            EarlyStoppingArg::MinObjective => EarlyStopping::MinObjective,
            EarlyStoppingArg::LastIteration => EarlyStopping::LastIteration,
        }
    }
}

#[derive(Debug, Args)]
pub struct IoArgs {
    /// Manifest naming the input files.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Report path.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct Parallelism {
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub io: IoArgs,
    /// Match tokens case-sensitively instead of lower-casing them.
    #[arg(long)]
    pub case_sensitive: bool,
}

#[derive(Debug, Args)]
pub struct LoopArgs {
    #[arg(long, value_enum, default_value_t = MetricArg::Cosine)]
    pub metric: MetricArg,
    #[arg(long, default_value_t = RefinementConfig::DEFAULT_MAX_ITERS)]
    pub max_iters: usize,
    #[arg(long, value_enum, default_value_t = EarlyStoppingArg::MinObjective)]
    pub early_stopping: EarlyStoppingArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Re-project centroids onto the unit sphere after each update (cosine only).
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub renormalize_centroids: bool,
    /// Also write the selected iteration's distances as a score matrix.
    #[arg(long)]
    pub scores_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DualArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[command(flatten)]
    pub run: LoopArgs,
    #[arg(long, default_value_t = 0.5)]
    pub w_mean: f64,
    #[arg(long, default_value_t = 0.0)]
    pub w_anchor: f64,
    #[arg(long, default_value_t = 0.5)]
    pub w_category: f64,
    #[command(flatten)]
    pub par: Parallelism,
}

#[derive(Debug, Args)]
pub struct FewShotArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[command(flatten)]
    pub run: LoopArgs,
    #[arg(long, default_value_t = 0.25)]
    pub w_mean: f64,
    #[arg(long, default_value_t = 0.25)]
    pub w_anchor: f64,
    #[arg(long, default_value_t = 0.5)]
    pub w_category: f64,
    #[command(flatten)]
    pub par: Parallelism,
}

#[derive(Debug, Args)]
pub struct SingleArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[arg(long, default_value_t = RefinementConfig::DEFAULT_MAX_ITERS)]
    pub max_iters: usize,
    #[arg(long, value_enum, default_value_t = EarlyStoppingArg::LastIteration)]
    pub early_stopping: EarlyStoppingArg,
    /// Also write the selected iteration's divergences as a score matrix.
    #[arg(long)]
    pub scores_out: Option<PathBuf>,
    #[command(flatten)]
    pub par: Parallelism,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[arg(long, value_enum, default_value_t = MetricArg::Cosine)]
    pub metric: MetricArg,
    #[arg(long, default_value_t = RefinementConfig::DEFAULT_MAX_ITERS)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Cluster count (default: number of categories in the manifest).
    #[arg(long)]
    pub k: Option<usize>,
    #[command(flatten)]
    pub par: Parallelism,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub io: IoArgs,
    /// Category count (default: from names=, else the largest label + 1).
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[command(flatten)]
    pub run: LoopArgs,
    #[arg(long, default_value_t = 0.5)]
    pub w_mean: f64,
    #[arg(long, default_value_t = 0.5)]
    pub w_category: f64,
    /// Sample this many synonym combinations instead of enumerating all.
    #[arg(long)]
    pub sample_count: Option<usize>,
    /// Scatter table path (default: <output>.scatter.tsv).
    #[arg(long)]
    pub scatter: Option<PathBuf>,
    /// Lower-case tokens before word-vector lookup.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub lowercase: bool,
    #[command(flatten)]
    pub par: Parallelism,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            1
        }
    }
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Encode(a) => encode(a),
        Command::RefineDual(a) => {
            let weights = CentroidWeights::new(a.w_mean, a.w_anchor, a.w_category)?;
            with_jobs(a.par.jobs, |exec| dual(&a.io, &a.run, weights, exec))
        }
        Command::RefineFewshot(a) => {
            let weights = CentroidWeights::new(a.w_mean, a.w_anchor, a.w_category)?;
            with_jobs(a.par.jobs, |exec| fewshot(&a.io, &a.run, weights, exec))
        }
        Command::RefineSingle(a) => with_jobs(a.par.jobs, |exec| single(&a, exec)),
        Command::ClusterRandom(a) => with_jobs(a.par.jobs, |exec| cluster(&a, exec)),
        Command::Ensemble(a) => ensemble_cmd(&a),
        Command::Eval(a) => eval_cmd(&a),
        Command::Sweep(a) => with_jobs(a.par.jobs, |exec| sweep(&a, exec)),
    }
}

fn with_jobs<T>(jobs: Option<usize>, f: impl FnOnce(Exec) -> Result<T> + Send) -> Result<T>
where
    T: Send,
{
    match jobs {
        Some(0) => Err(Error::Invalid("--jobs must be at least 1".into())),
        Some(1) => f(Exec::Sequential),
        #[cfg(feature = "parallel")]
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Invalid(format!("cannot start {n} workers: {e}")))?
            .install(|| f(Exec::Parallel)),
        #[cfg(not(feature = "parallel"))]
        Some(_) => f(Exec::Sequential),
        None => f(Exec::default()),
    }
}

fn config_from(run: &LoopArgs, weights: CentroidWeights, exec: Exec) -> RefinementConfig {
    RefinementConfig {
        metric: run.metric.into(),
        max_iters: run.max_iters,
        weights,
        early_stopping: run.early_stopping.into(),
        seed: run.seed,
        renormalize_centroids: run.renormalize_centroids,
        n_augmented_categories: 0,
        n_augmented_texts: 0,
        exec,
    }
}

fn load_names(manifest: &Manifest) -> Result<Option<CategorySet>> {
    manifest.path("names").map(load_category_set).transpose()
}

/// Names file if given, else the category embedding ids.
fn category_names(
    names: Option<&CategorySet>,
    cats: &EmbeddingMatrix,
) -> Result<Option<Vec<String>>> {
    match names {
        Some(n) if n.k() != cats.rows() => Err(Error::LengthMismatch {
            left: n.k(),
            right: cats.rows(),
        }),
        Some(n) => Ok(Some(n.names().to_vec())),
        None => Ok(cats.ids().map(<[String]>::to_vec)),
    }
}

fn load_gold(
    manifest: &Manifest,
    names: Option<&CategorySet>,
    k: usize,
) -> Result<Option<Vec<usize>>> {
    manifest
        .path("gold")
        .map(|p| load_labels(p, names, Some(k)))
        .transpose()
}

fn metrics(preds: &[usize], gold: &[usize], k: usize) -> Result<Metrics> {
    Ok(Metrics {
        accuracy: accuracy(preds, gold)?,
        one_to_one: one_to_one_accuracy(preds, gold, k)?,
    })
}

fn finish_refinement(
    io: &IoArgs,
    scores_out: Option<&Path>,
    algorithm: Algorithm,
    config: RefinementConfig,
    result: RefinementResult,
    category_names: Option<Vec<String>>,
    gold: Option<&[usize]>,
) -> Result<()> {
    let k = result.selected_distances.k();
    let metrics = gold
        .map(|g| metrics(&result.final_predictions, g, k))
        .transpose()?;
    if let Some(path) = scores_out {
        write_score_matrix(&result.selected_distances, path)?;
    }
    let report = RefinementReport {
        algorithm,
        config,
        result,
        category_names,
        metrics,
    };
    write_refinement_report(&report, &io.output)
}

fn dual(io: &IoArgs, run: &LoopArgs, weights: CentroidWeights, exec: Exec) -> Result<()> {
    let manifest = Manifest::load(&io.manifest)?;
    let names = load_names(&manifest)?;
    let docs = load_embeddings(manifest.require("docs")?)?;
    let cats = load_embeddings(manifest.require("cats")?)?;
    let gold = load_gold(&manifest, names.as_ref(), cats.rows())?;
    let dataset = validate_dataset(docs, cats, gold.as_deref())?;
    let augmented = AugmentedInputs {
        extra_categories: manifest.path("aug_cats").map(load_embeddings).transpose()?,
        extra_texts: manifest.path("aug_text").map(load_embeddings).transpose()?,
    };
    let mut config = config_from(run, weights, exec);
    config.n_augmented_categories = augmented.n_categories();
    config.n_augmented_texts = augmented.n_texts();
    let result = refine_dual(&dataset.docs, &dataset.cats, &config, Some(&augmented))?;
    let names = category_names(names.as_ref(), &dataset.cats)?;
    finish_refinement(
        io,
        run.scores_out.as_deref(),
        Algorithm::Dual,
        config,
        result,
        names,
        gold.as_deref(),
    )
}

fn fewshot(io: &IoArgs, run: &LoopArgs, weights: CentroidWeights, exec: Exec) -> Result<()> {
    let manifest = Manifest::load(&io.manifest)?;
    let names = load_names(&manifest)?;
    let docs = load_embeddings(manifest.require("docs")?)?;
    let cats = load_embeddings(manifest.require("cats")?)?;
    let k = cats.rows();
    let gold = load_gold(&manifest, names.as_ref(), k)?;
    let dataset = validate_dataset(docs, cats, gold.as_deref())?;
    let anchor_docs = load_embeddings(manifest.require("anchors")?)?;
    let anchor_labels = load_labels(manifest.require("anchor_labels")?, names.as_ref(), Some(k))?;
    let anchors = LabeledAnchors::new(anchor_docs, anchor_labels, k)?;
    let config = config_from(run, weights, exec);
    let result = refine_fewshot(&dataset.docs, &dataset.cats, &anchors, &config)?;
    let names = category_names(names.as_ref(), &dataset.cats)?;
    finish_refinement(
        io,
        run.scores_out.as_deref(),
        Algorithm::FewShot,
        config,
        result,
        names,
        gold.as_deref(),
    )
}

fn single(a: &SingleArgs, exec: Exec) -> Result<()> {
    let manifest = Manifest::load(&a.io.manifest)?;
    let names = load_names(&manifest)?;
    let scores = load_score_matrix(manifest.require("scores")?)?;
    if let Some(n) = &names {
        if n.k() != scores.k() {
            return Err(Error::LengthMismatch {
                left: n.k(),
                right: scores.k(),
            });
        }
    }
    let gold = load_gold(&manifest, names.as_ref(), scores.k())?;
    if let Some(g) = &gold {
        GoldLabels::new(g.clone(), scores.k())?;
        if g.len() != scores.n_docs() {
            return Err(Error::LengthMismatch {
                left: g.len(),
                right: scores.n_docs(),
            });
        }
    }
    let config = RefinementConfig {
        max_iters: a.max_iters,
        early_stopping: a.early_stopping.into(),
        exec,
        ..RefinementConfig::single()
    };
    let result = refine_single(&scores, &config)?;
    finish_refinement(
        &a.io,
        a.scores_out.as_deref(),
        Algorithm::Single,
        config,
        result,
        names.map(|n| n.names().to_vec()),
        gold.as_deref(),
    )
}

fn cluster(a: &ClusterArgs, exec: Exec) -> Result<()> {
    let manifest = Manifest::load(&a.io.manifest)?;
    let names = load_names(&manifest)?;
    let docs = load_embeddings(manifest.require("docs")?)?;
    let cats = manifest.path("cats").map(load_embeddings).transpose()?;
    let k = a
        .k
        .or(names.as_ref().map(CategorySet::k))
        .or(cats.as_ref().map(EmbeddingMatrix::rows))
        .ok_or_else(|| Error::Invalid("pass --k or name the categories in the manifest".into()))?;
    let gold = load_gold(&manifest, names.as_ref(), k)?;
    if let Some(g) = &gold {
        if g.len() != docs.rows() {
            return Err(Error::LengthMismatch {
                left: g.len(),
                right: docs.rows(),
            });
        }
    }
    let metric: Metric = a.metric.into();
    let clustering = cluster_random_init_with(exec, &docs, k, a.seed, metric, a.max_iters)?;
    let metrics = gold
        .as_deref()
        .map(|g| metrics(&clustering.assignments, g, k))
        .transpose()?;
    let category_names = match (&names, &cats) {
        (Some(n), _) => Some(n.names().to_vec()),
        (None, Some(c)) => c.ids().map(<[String]>::to_vec),
        _ => None,
    };
    let report = ClusteringReport {
        metric,
        k,
        seed: a.seed,
        max_iters: a.max_iters,
        clustering,
        category_names,
        metrics,
    };
    report.to_document().write(&a.io.output)
}

fn ensemble_cmd(a: &IoArgs) -> Result<()> {
    let manifest = Manifest::load(&a.manifest)?;
    let paths = manifest.paths("runs");
    if paths.is_empty() {
        return Err(Error::Invalid("manifest is missing runs=".into()));
    }
    let runs = paths
        .iter()
        .map(load_score_matrix)
        .collect::<Result<Vec<_>>>()?;
    let predictions = ensemble(&runs)?;
    let k = runs[0].k();
    let names = load_names(&manifest)?;
    let gold = load_gold(&manifest, names.as_ref(), k)?;
    let metrics = gold
        .as_deref()
        .map(|g| metrics(&predictions, g, k))
        .transpose()?;
    let report = EnsembleReport {
        run_count: runs.len(),
        polarity: runs[0].polarity(),
        predictions,
        category_names: names.map(|n| n.names().to_vec()),
        metrics,
    };
    report.to_document().write(&a.output)
}

fn eval_cmd(a: &EvalArgs) -> Result<()> {
    let manifest = Manifest::load(&a.io.manifest)?;
    let names = load_names(&manifest)?;
    let k_hint = a.k.or(names.as_ref().map(CategorySet::k));
    let preds = load_labels(manifest.require("preds")?, names.as_ref(), k_hint)?;
    let gold = load_labels(manifest.require("gold")?, names.as_ref(), k_hint)?;
    let k = k_hint.unwrap_or_else(|| preds.iter().chain(&gold).max().map_or(1, |m| m + 1));
    let m = metrics(&preds, &gold, k)?;
    evaluation_document(&m, preds.len(), k).write(&a.io.output)
}

fn sweep(a: &SweepArgs, exec: Exec) -> Result<()> {
    let manifest = Manifest::load(&a.io.manifest)?;
    let docs = load_embeddings(manifest.require("docs")?)?;
    let table = load_vectors(manifest.require("vectors")?)?.with_lowercase(a.lowercase);
    let label_sets = match manifest.path("label_sets") {
        Some(p) => read_semicolon_lines(&p)?
            .into_iter()
            .map(CategorySet::new)
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    let synonym_pools = match manifest.path("pools") {
        Some(p) => read_semicolon_lines(&p)?,
        None => Vec::new(),
    };
    if label_sets.is_empty() && synonym_pools.is_empty() {
        return Err(Error::Invalid(
            "manifest needs label_sets= or pools=".into(),
        ));
    }
    let spec = SweepSpec {
        label_sets,
        synonym_pools,
        sample_count: a.sample_count,
        seed: a.run.seed,
    };
    let k = spec
        .label_sets
        .first()
        .map(CategorySet::k)
        .unwrap_or(spec.synonym_pools.len());
    let names = load_names(&manifest)?;
    let gold_labels = load_labels(manifest.require("gold")?, names.as_ref(), Some(k))?;
    let gold = GoldLabels::new(gold_labels, k)?;
    let weights = CentroidWeights::new(a.w_mean, 0.0, a.w_category)?;
    let config = config_from(&a.run, weights, exec);
    let report = run_sweep(&docs, &gold, &spec, &config, &table)?;
    sweep_document(&report, &config).write(&a.io.output)?;
    let scatter = a.scatter.clone().unwrap_or_else(|| {
        let mut p = a.io.output.clone().into_os_string();
        p.push(".scatter.tsv");
        PathBuf::from(p)
    });
    write_string(&scatter, &scatter_table(&report))
}

/// One entry per non-blank line, items separated by `;`; empty items dropped.
fn read_semicolon_lines(path: &Path) -> Result<Vec<Vec<String>>> {
    Ok(read_to_string(path)?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.split(';')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect()
        })
        .collect())
}

fn encode(a: EncodeArgs) -> Result<()> {
    let manifest = Manifest::load(&a.io.manifest)?;
    let table = load_vectors(manifest.require("vectors")?)?.with_lowercase(!a.case_sensitive);
    let names = load_category_set(manifest.require("names")?)?;
    let texts_path = manifest.require("texts")?;
    let texts = read_to_string(&texts_path)?;
    let lines: Vec<&str> = texts.lines().collect();
    if lines.is_empty() {
        return Err(Error::EmptyInput(format!(
            "{} has no texts",
            texts_path.display()
        )));
    }
    let docs = encode_texts(&lines, &table)?
        .with_ids((0..lines.len()).map(|i| format!("d{i}")).collect())?;
    let cats = encode_texts(names.names(), &table)?.with_ids(
        names
            .names()
            .iter()
            .map(|n| n.replace(char::is_whitespace, "_"))
            .collect(),
    )?;

    let out = &a.io.output;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    write_embeddings(&docs, out.join("docs.vec"))?;
    write_embeddings(&cats, out.join("cats.vec"))?;
    let mut listing = names.names().join("\n");
    listing.push('\n');
    write_string(&out.join("names.txt"), &listing)?;
    let mut generated = String::from("docs=docs.vec\ncats=cats.vec\nnames=names.txt\n");
    if let Some(gold_path) = manifest.path("gold") {
        let gold = load_labels(gold_path, Some(&names), None)?;
        if gold.len() != docs.rows() {
            return Err(Error::LengthMismatch {
                left: gold.len(),
                right: docs.rows(),
            });
        }
        write_labels(&gold, out.join("gold.txt"))?;
        generated.push_str("gold=gold.txt\n");
    }
    write_string(&out.join("manifest.txt"), &generated)
}
