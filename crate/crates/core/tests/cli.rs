use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use labelrefine::io::report::{read_refinement_report, Document};
use labelrefine::io::{load_embeddings, load_score_matrix, write_labels};
use labelrefine::model::Polarity;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_labelrefine"))
        .args(args)
        .output()
        .unwrap()
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn refine_dual_on_micro_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.txt");
    let manifest = fixtures().join("micro/manifest.txt");
    let out = run(&[
        "refine-dual",
        "--manifest",
        arg(&manifest),
        "--output",
        arg(&report),
        "--metric",
        "squared-l2",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = read_refinement_report(&report).unwrap();
    assert_eq!(r.result.final_predictions, vec![0, 0, 1, 1]);
    assert!((r.result.objective_per_iter[0] - 0.82).abs() < 1e-9);
    assert_eq!(r.metrics.unwrap().accuracy, 1.0);
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.contains("0\t0\tfirst"));
}

#[test]
fn eval_reports_both_accuracies() {
    let dir = tempfile::tempdir().unwrap();
    write_labels(&[1, 1, 0, 0], dir.path().join("preds.txt")).unwrap();
    std::fs::copy(
        fixtures().join("micro/gold.txt"),
        dir.path().join("gold.txt"),
    )
    .unwrap();
    std::fs::copy(
        fixtures().join("micro/names.txt"),
        dir.path().join("names.txt"),
    )
    .unwrap();
    std::fs::write(
        dir.path().join("m.txt"),
        "preds=preds.txt\ngold=gold.txt\nnames=names.txt\n",
    )
    .unwrap();
    let report = dir.path().join("eval.txt");
    let out = run(&[
        "eval",
        "--manifest",
        arg(&dir.path().join("m.txt")),
        "--output",
        arg(&report),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc = Document::read(&report).unwrap();
    let metrics = doc.section("metrics").unwrap();
    assert_eq!(metrics.get("accuracy").unwrap(), "0.0");
    assert_eq!(metrics.get("one_to_one_accuracy").unwrap(), "1.0");
}

#[test]
fn eval_of_gold_against_itself_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    let gold = fixtures().join("micro/gold.txt");
    let names = fixtures().join("micro/names.txt");
    std::fs::write(
        dir.path().join("m.txt"),
        format!(
            "preds={}\ngold={}\nnames={}\n",
            gold.display(),
            gold.display(),
            names.display()
        ),
    )
    .unwrap();
    let report = dir.path().join("eval.txt");
    let out = run(&[
        "eval",
        "--manifest",
        arg(&dir.path().join("m.txt")),
        "--output",
        arg(&report),
    ]);
    assert!(out.status.success());
    let doc = Document::read(&report).unwrap();
    assert_eq!(
        doc.section("metrics").unwrap().get("accuracy").unwrap(),
        "1.0"
    );
}

#[test]
fn usage_errors_exit_2() {
    let out = run(&["refine-dual", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "refine-dual",
        "--manifest",
        "m",
        "--output",
        "o",
        "--metric",
        "l1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn data_errors_exit_1_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("docs.vec"), "d0 1 0\nd1 0 1 2\n").unwrap();
    std::fs::write(dir.path().join("cats.vec"), "a 1 0\nb 0 1\n").unwrap();
    std::fs::write(dir.path().join("m.txt"), "docs=docs.vec\ncats=cats.vec\n").unwrap();
    let out = run(&[
        "refine-dual",
        "--manifest",
        arg(&dir.path().join("m.txt")),
        "--output",
        arg(&dir.path().join("r.txt")),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.trim_end().lines().count(), 1, "{stderr}");
    assert!(stderr.contains("docs.vec"), "{stderr}");
    assert!(!dir.path().join("r.txt").exists());
}

#[test]
fn help_names_every_flag_and_default() {
    let expected: &[(&str, &[&str])] = &[
        ("encode", &["--manifest", "--output", "--case-sensitive"]),
        (
            "refine-dual",
            &[
                "--metric",
                "--max-iters",
                "--w-mean",
                "--w-anchor",
                "--w-category",
                "--early-stopping",
                "--seed",
                "--renormalize-centroids",
                "--jobs",
                "[default: 100]",
                "[default: 0.5]",
            ],
        ),
        ("refine-fewshot", &["--w-anchor", "[default: 0.25]"]),
        (
            "refine-single",
            &["--max-iters", "[default: last-iteration]"],
        ),
        ("cluster-random", &["--k", "--seed", "--metric"]),
        ("ensemble", &["--manifest", "--output"]),
        ("eval", &["--manifest", "--k"]),
        ("sweep", &["--sample-count", "--scatter", "--seed"]),
    ];
    for (command, flags) in expected {
        let out = run(&[command, "--help"]);
        assert!(out.status.success());
        let help = String::from_utf8_lossy(&out.stdout);
        for flag in *flags {
            assert!(help.contains(flag), "{command} --help lacks {flag}");
        }
    }
}

/// Files in the layout an external encoder writes: a word2vec header, ids,
/// exponent and negative-zero literals, a polarity line on scores.
#[test]
fn exporter_formats_load() {
    let docs = load_embeddings(fixtures().join("export/docs.vec")).unwrap();
    assert_eq!((docs.rows(), docs.dim()), (3, 4));
    assert_eq!(docs.row(0)[2], 1e-5);
    let cats = load_embeddings(fixtures().join("export/cats.vec")).unwrap();
    assert_eq!((cats.rows(), cats.dim()), (4, 4));
    let scores = load_score_matrix(fixtures().join("export/scores.tsv")).unwrap();
    assert_eq!((scores.n_docs(), scores.k()), (2, 4));
    assert_eq!(scores.polarity(), Polarity::HigherBetter);

    let dir = tempfile::tempdir().unwrap();
    for (command, manifest) in [
        ("refine-dual", "export/manifest.txt"),
        ("refine-single", "export/single_manifest.txt"),
    ] {
        let report = dir.path().join(command);
        let out = run(&[
            command,
            "--manifest",
            arg(&fixtures().join(manifest)),
            "--output",
            arg(&report),
        ]);
        assert!(
            out.status.success(),
            "{command}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let r = read_refinement_report(&report).unwrap();
        assert_eq!(
            r.result.final_predictions.len(),
            if command == "refine-dual" { 3 } else { 2 }
        );
    }
}

#[test]
fn encode_then_refine() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("words.vec"),
        "red 1 0\ncrimson 0.9 0.1\nblue 0 1\nnavy 0.1 0.9\n",
    )
    .unwrap();
    std::fs::write(
        d.join("texts.txt"),
        "Red crimson\nnavy BLUE\ncrimson\nnavy unknown\n",
    )
    .unwrap();
    std::fs::write(d.join("names.txt"), "red\nblue\n").unwrap();
    std::fs::write(d.join("gold.txt"), "red\nblue\nred\nblue\n").unwrap();
    std::fs::write(
        d.join("m.txt"),
        "vectors=words.vec\ntexts=texts.txt\nnames=names.txt\ngold=gold.txt\n",
    )
    .unwrap();
    let encoded = d.join("encoded");
    let out = run(&[
        "encode",
        "--manifest",
        arg(&d.join("m.txt")),
        "--output",
        arg(&encoded),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(load_embeddings(encoded.join("docs.vec")).unwrap().rows(), 4);

    let report = d.join("r.txt");
    let out = run(&[
        "refine-dual",
        "--manifest",
        arg(&encoded.join("manifest.txt")),
        "--output",
        arg(&report),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = read_refinement_report(&report).unwrap();
    assert_eq!(r.result.final_predictions, vec![0, 1, 0, 1]);
    assert_eq!(r.metrics.unwrap().accuracy, 1.0);
}

#[test]
fn encode_rejects_all_oov_text() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("words.vec"), "red 1 0\nblue 0 1\n").unwrap();
    std::fs::write(d.join("texts.txt"), "red\nzzz qqq\n").unwrap();
    std::fs::write(d.join("names.txt"), "red\nblue\n").unwrap();
    std::fs::write(
        d.join("m.txt"),
        "vectors=words.vec\ntexts=texts.txt\nnames=names.txt\n",
    )
    .unwrap();
    let out = run(&[
        "encode",
        "--manifest",
        arg(&d.join("m.txt")),
        "--output",
        arg(&d.join("e")),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("text 1"));
}
