use std::path::Path;

use super::{read_to_string, write_string};
use crate::error::{Error, Result};
use crate::model::CategorySet;

/// One category description per line; blank lines are skipped.
pub fn load_category_set(path: impl AsRef<Path>) -> Result<CategorySet> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    CategorySet::new(text.lines().map(str::trim).filter(|l| !l.is_empty()))
}

/// One label per line: a category index, or an exact category name when
/// `categories` is given. Indices take precedence over names.
pub fn load_labels(
    path: impl AsRef<Path>,
    categories: Option<&CategorySet>,
    k: Option<usize>,
) -> Result<Vec<usize>> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    let k = k.or(categories.map(CategorySet::k));
    let mut labels = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let value = raw.trim();
        if value.is_empty() {
            continue;
        }
        let label = match value.parse::<usize>() {
            Ok(index) => index,
            Err(_) => categories
                .and_then(|c| c.index_of(value))
                .ok_or_else(|| Error::parse(path, line, format!("unknown category {value:?}")))?,
        };
        if let Some(k) = k {
            if label >= k {
                return Err(Error::parse(
                    path,
                    line,
                    format!("label {label} out of range for {k} categories"),
                ));
            }
        }
        labels.push(label);
    }
    if labels.is_empty() {
        return Err(Error::EmptyInput(format!(
            "{} has no labels",
            path.display()
        )));
    }
    Ok(labels)
}

pub fn write_labels(labels: &[usize], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::with_capacity(labels.len() * 3);
    for l in labels {
        out.push_str(&l.to_string());
        out.push('\n');
    }
    write_string(path.as_ref(), &out)
}
