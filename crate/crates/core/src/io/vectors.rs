use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{fmt_real, parse_real, read_to_string, write_string};
use crate::error::{Error, Result};
use crate::model::EmbeddingMatrix;

/// Word vectors keyed by token.
#[derive(Debug, Clone, PartialEq)]
pub struct WordVectorTable {
    index: HashMap<String, usize>,
    tokens: Vec<String>,
    vectors: Vec<f64>,
    dim: usize,
    lowercase: bool,
}

impl WordVectorTable {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn lowercase(&self) -> bool {
        self.lowercase
    }

    /// Lookups lower-case the query first when enabled (the default).
    pub fn with_lowercase(mut self, lowercase: bool) -> Self {
        self.lowercase = lowercase;
        self
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        let i = if self.lowercase {
            *self.index.get(token.to_lowercase().as_str())?
        } else {
            *self.index.get(token)?
        };
        Some(&self.vectors[i * self.dim..(i + 1) * self.dim])
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }
}

struct Row<'a> {
    line: usize,
    token: &'a str,
    values: Vec<f64>,
}

fn parse_rows<'a>(text: &'a str, path: &Path) -> Result<(Vec<Row<'a>>, usize)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty())
        .peekable();

    let mut declared: Option<(usize, usize, usize)> = None;
    if let Some(&(line, first)) = lines.peek() {
        let fields: Vec<&str> = first.split_whitespace().collect();
        if let [count, dim] = fields[..] {
            if let (Ok(count), Ok(dim)) = (count.parse::<usize>(), dim.parse::<usize>()) {
                if dim == 0 {
                    return Err(Error::parse(path, line, "header declares zero dimensions"));
                }
                declared = Some((line, count, dim));
                lines.next();
            }
        }
    }

    let mut dim = declared.map(|(_, _, d)| d);
    let mut rows = Vec::new();
    for (line, text) in lines {
        let mut fields = text.split_whitespace();
        let token = fields.next().expect("line is not blank");
        let values = fields
            .map(|f| parse_real(f, path, line))
            .collect::<Result<Vec<f64>>>()?;
        if values.is_empty() {
            return Err(Error::parse(
                path,
                line,
                format!("token {token:?} has no values"),
            ));
        }
        match dim {
            Some(d) if d != values.len() => {
                return Err(Error::InconsistentDim {
                    path: path.into(),
                    line,
                    expected: d,
                    found: values.len(),
                })
            }
            Some(_) => {}
            None => dim = Some(values.len()),
        }
        rows.push(Row {
            line,
            token,
            values,
        });
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput(format!(
            "{} has no vectors",
            path.display()
        )));
    }
    if let Some((line, count, _)) = declared {
        if count != rows.len() {
            return Err(Error::parse(
                path,
                line,
                format!("header declares {count} rows, found {}", rows.len()),
            ));
        }
    }
    Ok((rows, dim.expect("at least one row")))
}

/// Parses word2vec text format. Repeated tokens keep their first vector.
pub fn parse_vectors(text: &str, path: &Path) -> Result<WordVectorTable> {
    let (rows, dim) = parse_rows(text, path)?;
    let mut index = HashMap::with_capacity(rows.len());
    let mut tokens = Vec::with_capacity(rows.len());
    let mut vectors = Vec::with_capacity(rows.len() * dim);
    for row in rows {
        if index.contains_key(row.token) {
            continue;
        }
        index.insert(row.token.to_string(), tokens.len());
        tokens.push(row.token.to_string());
        vectors.extend(row.values);
    }
    Ok(WordVectorTable {
        index,
        tokens,
        vectors,
        dim,
        lowercase: true,
    })
}

pub fn load_vectors(path: impl AsRef<Path>) -> Result<WordVectorTable> {
    let path = path.as_ref();
    parse_vectors(&read_to_string(path)?, path)
}

/// Loads a positional embedding matrix in word2vec text format; the leading
/// token of each line becomes the row id and must be unique.
pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingMatrix> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    let (rows, dim) = parse_rows(&text, path)?;
    let mut ids = Vec::with_capacity(rows.len());
    let mut data = Vec::with_capacity(rows.len() * dim);
    let mut seen = HashMap::with_capacity(rows.len());
    for row in rows {
        if let Some(first) = seen.insert(row.token, row.line) {
            return Err(Error::parse(
                path,
                row.line,
                format!("id {:?} already used on line {first}", row.token),
            ));
        }
        ids.push(row.token.to_string());
        data.extend(row.values);
    }
    EmbeddingMatrix::new(ids.len(), dim, data)?.with_ids(ids)
}

/// Writes `rows dim` followed by one `id v1 ... vd` line per row. Rows
/// without ids are labeled by position.
pub fn write_embeddings(m: &EmbeddingMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    writeln!(out, "{} {}", m.rows(), m.dim()).unwrap();
    for (i, row) in m.iter_rows().enumerate() {
        match m.ids() {
            Some(ids) => out.push_str(&ids[i]),
            None => write!(out, "{i}").unwrap(),
        }
        for v in row {
            out.push(' ');
            out.push_str(&fmt_real(*v));
        }
        out.push('\n');
    }
    write_string(path.as_ref(), &out)
}
