use std::path::Path;

use super::{fmt_real, parse_real, read_to_string, write_string};
use crate::error::{Error, Result};
use crate::model::{Polarity, ScoreMatrix};

const POLARITY_HEADER: &str = "#polarity=";

pub fn parse_score_matrix(text: &str, path: &Path) -> Result<ScoreMatrix> {
    let mut polarity = Polarity::HigherBetter;
    let mut k: Option<usize> = None;
    let mut n_docs = 0;
    let mut scores = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(value) = trimmed.strip_prefix(POLARITY_HEADER) {
            if n_docs > 0 {
                return Err(Error::parse(path, line, "polarity header after data rows"));
            }
            polarity = match value.trim() {
                "higher" => Polarity::HigherBetter,
                "lower" => Polarity::LowerBetter,
                other => {
                    return Err(Error::parse(
                        path,
                        line,
                        format!("unknown polarity {other:?}"),
                    ))
                }
            };
            continue;
        }
        let row = trimmed
            .split('\t')
            .map(|f| parse_real(f.trim(), path, line))
            .collect::<Result<Vec<f64>>>()?;
        match k {
            Some(k) if k != row.len() => {
                return Err(Error::RaggedRows {
                    path: path.into(),
                    line,
                    expected: k,
                    found: row.len(),
                })
            }
            Some(_) => {}
            None => k = Some(row.len()),
        }
        scores.extend(row);
        n_docs += 1;
    }
    let k = k.ok_or_else(|| Error::EmptyInput(format!("{} has no score rows", path.display())))?;
    ScoreMatrix::new(n_docs, k, scores, polarity)
}

pub fn load_score_matrix(path: impl AsRef<Path>) -> Result<ScoreMatrix> {
    let path = path.as_ref();
    parse_score_matrix(&read_to_string(path)?, path)
}

pub fn write_score_matrix(m: &ScoreMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut out = format!("{POLARITY_HEADER}{}\n", m.polarity().as_str());
    for row in m.iter_rows() {
        let fields: Vec<String> = row.iter().map(|v| fmt_real(*v)).collect();
        out.push_str(&fields.join("\t"));
        out.push('\n');
    }
    write_string(path.as_ref(), &out)
}
