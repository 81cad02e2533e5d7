//! File formats.
//!
//! | file | layout |
//! |------|--------|
//! | word / embedding vectors | word2vec text: `token v1 ... vd` per line, optional `count dim` first line |
//! | score matrix | tab-separated reals, one document per row, optional `#polarity=higher\|lower` first line |
//! | category names | one description per line |
//! | labels | one category index or exact category name per line |
//! | manifest | `key=value` lines naming the files above |
//! | report | sectioned `key = value` text, see [`report`] |
//!
//! All loaders widen to `f64` and reject `NaN`/`inf` literals.

mod labels;
mod manifest;
pub mod report;
mod scores;
mod vectors;

use std::path::Path;

pub use labels::{load_category_set, load_labels, write_labels};
pub use manifest::Manifest;
pub use scores::{load_score_matrix, parse_score_matrix, write_score_matrix};
pub use vectors::{
    load_embeddings, load_vectors, parse_vectors, write_embeddings, WordVectorTable,
};

use crate::error::{Error, Result};

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_string(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Parses a finite real; `line` is 1-based.
pub(crate) fn parse_real(token: &str, path: &Path, line: usize) -> Result<f64> {
    match token.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(Error::parse(
            path,
            line,
            format!("non-finite value {token:?}"),
        )),
        Err(_) => Err(Error::parse(
            path,
            line,
            format!("cannot parse {token:?} as a real"),
        )),
    }
}

/// Shortest decimal form that parses back to the same `f64`.
pub(crate) fn fmt_real(v: f64) -> String {
    format!("{v:?}")
}
