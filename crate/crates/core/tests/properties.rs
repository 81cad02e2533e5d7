use proptest::prelude::*;

use labelrefine::encode::encode_average;
use labelrefine::eval::{accuracy, one_to_one_accuracy};
#[cfg(feature = "parallel")]
use labelrefine::exec::Exec;
use labelrefine::geometry::{
    cluster_mean, cosine_distance, js_divergence, normalized, row_softmax, squared_l2_distance,
};
use labelrefine::io::{
    load_embeddings, load_score_matrix, parse_vectors, write_embeddings, write_score_matrix,
};
use labelrefine::model::{
    argmax, Centroids, EmbeddingMatrix, Metric, Polarity, RefinementConfig, ScoreMatrix,
};
use labelrefine::refine::{cluster_random_init, refine_dual, refine_single};

fn distribution(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), 0.0..1.0f64], k).prop_map(|mut v| {
        if v.iter().all(|&x| x == 0.0) {
            v[0] = 1.0;
        }
        let total: f64 = v.iter().sum();
        v.iter().map(|x| x / total).collect()
    })
}

fn distribution_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..=10).prop_flat_map(|k| (distribution(k), distribution(k)))
}

/// `n` rows of `d` finite coordinates.
fn rows(n: std::ops::RangeInclusive<usize>, d: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-5.0..5.0f64, d), n)
}

/// Small integers, so that means and interpolations are exact.
fn grid_rows(n: std::ops::RangeInclusive<usize>, d: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec((-4i32..=4).prop_map(f64::from), d), n)
}

fn matrix(rows: &[Vec<f64>]) -> EmbeddingMatrix {
    EmbeddingMatrix::from_rows(rows).unwrap()
}

proptest! {
    #[test]
    fn js_is_symmetric_and_bounded((p, q) in distribution_pair()) {
        let pq = js_divergence(&p, &q).unwrap();
        let qp = js_divergence(&q, &p).unwrap();
        prop_assert!((pq - qp).abs() <= 1e-12);
        prop_assert!((0.0..=std::f64::consts::LN_2 + 1e-12).contains(&pq));
        prop_assert_eq!(js_divergence(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn softmax_rows_are_distributions_with_the_same_argmax(
        scores in (1usize..6, 1usize..8).prop_flat_map(|(n, k)| rows(n..=n, k))
    ) {
        let s = ScoreMatrix::from_rows(&scores, Polarity::HigherBetter).unwrap();
        let p = row_softmax(&s);
        for (row, probs) in scores.iter().zip(p.iter_rows()) {
            let total: f64 = probs.iter().sum();
            prop_assert!((total - 1.0).abs() <= 1e-12);
            prop_assert!(probs.iter().all(|&x| (0.0..=1.0).contains(&x)));
            let best = argmax(row);
            let unique = row.iter().filter(|&&x| x == row[best]).count() == 1;
            if unique {
                prop_assert_eq!(argmax(probs), best);
            }
        }
    }

    #[test]
    fn cosine_is_half_squared_l2_on_the_unit_sphere(
        (u, v) in (1usize..10).prop_flat_map(|d| (
            prop::collection::vec(-3.0..3.0f64, d),
            prop::collection::vec(-3.0..3.0f64, d),
        ))
    ) {
        let (Some(u), Some(v)) = (normalized(&u), normalized(&v)) else {
            return Ok(());
        };
        let cos = cosine_distance(&u, &v).unwrap();
        let l2 = squared_l2_distance(&u, &v).unwrap();
        prop_assert!((cos - 0.5 * l2).abs() <= 1e-12);
    }

    #[test]
    fn cluster_mean_minimizes_squared_distance(
        (points, other) in (1usize..6).prop_flat_map(|d| (
            rows(1..=20, d),
            prop::collection::vec(-5.0..5.0f64, d),
        ))
    ) {
        let m = matrix(&points);
        let members: Vec<usize> = (0..points.len()).collect();
        let mean = cluster_mean(&m, &members).unwrap();
        let cost = |c: &[f64]| -> f64 {
            points.iter().map(|p| squared_l2_distance(p, c).unwrap()).sum()
        };
        prop_assert!(cost(&mean) <= cost(&other) + 1e-9);
    }

    #[test]
    fn document_order_does_not_change_assignments(
        (docs, cats, rotate) in (2usize..=4, 1usize..=4).prop_flat_map(|(k, d)| (
            grid_rows(k..=30, d),
            grid_rows(k..=k, d),
            0usize..30,
        ))
    ) {
        let n = docs.len();
        let shift = rotate % n;
        let mut permuted = docs.clone();
        permuted.rotate_left(shift);
        let config = RefinementConfig::dual().with_metric(Metric::SquaredL2);
        let a = refine_dual(&matrix(&docs), &matrix(&cats), &config, None).unwrap();
        let b = refine_dual(&matrix(&permuted), &matrix(&cats), &config, None).unwrap();
        prop_assert_eq!(a.predictions_per_iter.len(), b.predictions_per_iter.len());
        for (pa, pb) in a.predictions_per_iter.iter().zip(&b.predictions_per_iter) {
            let mut rotated = pa.clone();
            rotated.rotate_left(shift);
            prop_assert_eq!(&rotated, pb);
        }
        for (oa, ob) in a.objective_per_iter.iter().zip(&b.objective_per_iter) {
            prop_assert!((oa - ob).abs() <= 1e-9 * (1.0 + oa.abs()));
        }
    }

    #[test]
    fn refine_dual_selects_a_recorded_iteration(
        (docs, cats) in (2usize..=4, 1usize..=5).prop_flat_map(|(k, d)| (
            rows(k..=30, d),
            rows(k..=k, d),
        )),
        cosine in any::<bool>(),
    ) {
        let metric = if cosine { Metric::CosineDistance } else { Metric::SquaredL2 };
        let config = RefinementConfig::dual().with_metric(metric);
        let Ok(r) = refine_dual(&matrix(&docs), &matrix(&cats), &config, None) else {
            // Only a zero row can fail, and only under cosine.
            prop_assert!(cosine);
            return Ok(());
        };
        prop_assert_eq!(r.iterations_run, r.predictions_per_iter.len());
        prop_assert!(r.iterations_run <= config.max_iters);
        prop_assert_eq!(&r.final_predictions, &r.predictions_per_iter[r.selected_iter]);
        let min = r.objective_per_iter.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(r.objective_per_iter[r.selected_iter], min);
        prop_assert!(r.final_predictions.iter().all(|&c| c < cats.len()));
    }

    #[test]
    fn refine_single_keeps_centroids_on_the_simplex(
        scores in (1usize..20, 2usize..6).prop_flat_map(|(n, k)| rows(n..=n, k))
    ) {
        let s = ScoreMatrix::from_rows(&scores, Polarity::HigherBetter).unwrap();
        let r = refine_single(&s, &RefinementConfig::single()).unwrap();
        let Centroids::Probability(c) = &r.final_centroids else {
            return Err(TestCaseError::fail("expected probability centroids"));
        };
        for row in c.iter_rows() {
            let total: f64 = row.iter().sum();
            prop_assert!((total - 1.0).abs() <= 1e-9);
            prop_assert!(row.iter().all(|&x| x >= 0.0));
        }
        prop_assert!(r.final_predictions.iter().all(|&p| p < s.k()));
    }

    #[test]
    fn random_init_assignments_are_in_range(
        docs in rows(4..=30, 3),
        k in 1usize..=4,
        seed in any::<u64>(),
    ) {
        let c = cluster_random_init(&matrix(&docs), k, seed, Metric::SquaredL2, 100).unwrap();
        prop_assert!(c.assignments.iter().all(|&a| a < k));
        prop_assert_eq!(c.centroids.rows(), k);
        prop_assert_eq!(c.assignments_per_iter.last(), Some(&c.assignments));
        let mut init = c.initial_indices.clone();
        init.sort_unstable();
        init.dedup();
        prop_assert_eq!(init.len(), k);
    }

    #[test]
    fn one_to_one_dominates_accuracy(
        (preds, gold, k) in (1usize..=6, 1usize..50).prop_flat_map(|(k, n)| (
            prop::collection::vec(0..k, n),
            prop::collection::vec(0..k, n),
            Just(k),
        ))
    ) {
        let o = one_to_one_accuracy(&preds, &gold, k).unwrap();
        prop_assert!(o.accuracy >= accuracy(&preds, &gold).unwrap());
        prop_assert!(o.accuracy <= 1.0);
        let mut mapping = o.mapping.clone();
        mapping.sort_unstable();
        prop_assert_eq!(mapping, (0..k).collect::<Vec<_>>());
    }

    #[test]
    fn token_order_does_not_change_average(
        tokens in prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "zz"]), 1..12),
        rotate in 0usize..12,
    ) {
        let table = parse_vectors(
            "a 0.1 2.0 -1\nb 3.5 0.25 7\nc -0.3 1e-3 4\n",
            std::path::Path::new("t.vec"),
        ).unwrap();
        let mut other = tokens.clone();
        other.rotate_left(rotate % tokens.len());
        let a = encode_average(&tokens.join(" "), &table);
        let b = encode_average(&other.join(" "), &table);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                for (x, y) in a.iter().zip(&b) {
                    prop_assert!((x - y).abs() <= 1e-12);
                }
            }
            (a, b) => prop_assert!(a.is_err() && b.is_err()),
        }
    }

    #[test]
    fn embeddings_round_trip_bit_exactly(
        data in (1usize..6).prop_flat_map(|d| rows(1..=8, d)),
    ) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.vec");
        let ids = (0..data.len()).map(|i| format!("row{i}")).collect();
        let m = matrix(&data).with_ids(ids).unwrap();
        write_embeddings(&m, &path).unwrap();
        prop_assert_eq!(load_embeddings(&path).unwrap(), m);
    }

    #[test]
    fn score_matrix_round_trips_bit_exactly(
        data in (1usize..6).prop_flat_map(|k| rows(1..=8, k)),
        lower in any::<bool>(),
    ) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.tsv");
        let polarity = if lower { Polarity::LowerBetter } else { Polarity::HigherBetter };
        let s = ScoreMatrix::from_rows(&data, polarity).unwrap();
        write_score_matrix(&s, &path).unwrap();
        prop_assert_eq!(load_score_matrix(&path).unwrap(), s);
    }
}

#[cfg(feature = "parallel")]
proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parallel_matches_sequential_bit_for_bit(
        (docs, cats) in (2usize..=5, 1usize..=8).prop_flat_map(|(k, d)| (
            rows(k..=200, d),
            rows(k..=k, d),
        )),
        cosine in any::<bool>(),
    ) {
        let metric = if cosine { Metric::CosineDistance } else { Metric::SquaredL2 };
        let config = RefinementConfig::dual().with_metric(metric);
        let (docs, cats) = (matrix(&docs), matrix(&cats));
        let seq = refine_dual(&docs, &cats, &config.clone().with_exec(Exec::Sequential), None);
        let par = refine_dual(&docs, &cats, &config.with_exec(Exec::Parallel), None);
        match (seq, par) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (a, b) => prop_assert!(a.is_err() && b.is_err()),
        }
    }
}
