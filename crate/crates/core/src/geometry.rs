//! Distances, normalization, softmax and divergences.
//!
//! Logarithms are natural, so the Jensen-Shannon divergence is bounded by
//! `ln 2`. KL terms use the convention `0 · ln 0 = 0`.

use crate::error::{Error, Result};
use crate::model::{EmbeddingMatrix, ProbabilityMatrix, ScoreMatrix};

fn check_dims(u: &[f64], v: &[f64]) -> Result<()> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            context: "vector pair".into(),
            expected: u.len(),
            found: v.len(),
        });
    }
    Ok(())
}

pub fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub fn norm(u: &[f64]) -> f64 {
    dot(u, u).sqrt()
}

/// Unit vector in the direction of `u`, or `None` for the zero vector.
pub fn normalized(u: &[f64]) -> Option<Vec<f64>> {
    let n = norm(u);
    (n > 0.0 && n.is_finite()).then(|| u.iter().map(|x| x / n).collect())
}

pub fn l2_normalize_rows(m: &EmbeddingMatrix) -> Result<EmbeddingMatrix> {
    let mut data = Vec::with_capacity(m.data().len());
    for (row, values) in m.iter_rows().enumerate() {
        let unit = normalized(values).ok_or(Error::ZeroVector { row })?;
        data.extend(unit);
    }
    let out = EmbeddingMatrix::new(m.rows(), m.dim(), data)?;
    match m.ids() {
        Some(ids) => out.with_ids(ids.to_vec()),
        None => Ok(out),
    }
}

/// `1 - cos(u, v)`, in `[0, 2]`.
pub fn cosine_distance(u: &[f64], v: &[f64]) -> Result<f64> {
    check_dims(u, v)?;
    let nu = norm(u);
    if nu == 0.0 {
        return Err(Error::ZeroVector { row: 0 });
    }
    let nv = norm(v);
    if nv == 0.0 {
        return Err(Error::ZeroVector { row: 1 });
    }
    let cos = (dot(u, v) / (nu * nv)).clamp(-1.0, 1.0);
    Ok(1.0 - cos)
}

pub fn squared_l2_distance(u: &[f64], v: &[f64]) -> Result<f64> {
    check_dims(u, v)?;
    Ok(squared_l2_unchecked(u, v))
}

pub(crate) fn squared_l2_unchecked(u: &[f64], v: &[f64]) -> f64 {
    u.iter()
        .zip(v)
        .map(|(a, b)| {
            let d = a - b;
            d * d
        })
        .sum()
}

/// Max-shifted softmax over each row.
pub fn row_softmax(s: &ScoreMatrix) -> ProbabilityMatrix {
    let mut probs = Vec::with_capacity(s.scores().len());
    for row in s.iter_rows() {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let start = probs.len();
        probs.extend(row.iter().map(|x| (x - max).exp()));
        let total: f64 = probs[start..].iter().sum();
        for p in &mut probs[start..] {
            *p /= total;
        }
    }
    ProbabilityMatrix::new(s.n_docs(), s.k(), probs)
        .expect("softmax of finite scores is a valid distribution")
}

fn kl_term(p: f64, q: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        p * (p / q).ln()
    }
}

pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    check_dims(p, q)?;
    let mut total = 0.0;
    for (index, (&pi, &qi)) in p.iter().zip(q).enumerate() {
        if pi > 0.0 && qi == 0.0 {
            return Err(Error::InfiniteDivergence { index });
        }
        total += kl_term(pi, qi);
    }
    Ok(total.max(0.0))
}

pub fn js_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    check_dims(p, q)?;
    Ok(js_unchecked(p, q))
}

// Each index contributes (a + b) / 2 with a and b swapped under p <-> q;
// float addition commutes, so the result is exactly symmetric.
pub(crate) fn js_unchecked(p: &[f64], q: &[f64]) -> f64 {
    let total: f64 = p
        .iter()
        .zip(q)
        .map(|(&pi, &qi)| {
            let mi = 0.5 * (pi + qi);
            0.5 * (kl_term(pi, mi) + kl_term(qi, mi))
        })
        .sum();
    total.max(0.0)
}

/// Componentwise mean of the listed rows.
pub fn cluster_mean(m: &EmbeddingMatrix, members: &[usize]) -> Result<Vec<f64>> {
    if members.is_empty() {
        return Err(Error::EmptyCluster);
    }
    let mut sum = vec![0.0; m.dim()];
    for &i in members {
        if i >= m.rows() {
            return Err(Error::LabelOutOfRange {
                index: i,
                label: i,
                k: m.rows(),
            });
        }
        for (s, x) in sum.iter_mut().zip(m.row(i)) {
            *s += x;
        }
    }
    let count = members.len() as f64;
    Ok(sum.into_iter().map(|s| s / count).collect())
}
