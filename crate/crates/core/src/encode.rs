//! Averaged word-vector encoder for documents and category descriptions.

use crate::error::{Error, Result};
use crate::eval::CategoryEncoder;
use crate::io::WordVectorTable;
use crate::model::{CategorySet, EmbeddingMatrix};

/// Mean of the vectors of the in-vocabulary whitespace tokens of `text`.
pub fn encode_average(text: &str, table: &WordVectorTable) -> Result<Vec<f64>> {
    let mut sum = vec![0.0; table.dim()];
    let mut hits = 0usize;
    for token in text.split_whitespace() {
        if let Some(v) = table.get(token) {
            for (s, x) in sum.iter_mut().zip(v) {
                *s += x;
            }
            hits += 1;
        }
    }
    if hits == 0 {
        return Err(Error::AllOov(text.to_string()));
    }
    let n = hits as f64;
    Ok(sum.into_iter().map(|s| s / n).collect())
}

/// Encodes each text into one row; an all-OOV text reports its position.
pub fn encode_texts<S: AsRef<str>>(
    texts: &[S],
    table: &WordVectorTable,
) -> Result<EmbeddingMatrix> {
    let mut data = Vec::with_capacity(texts.len() * table.dim());
    for (i, text) in texts.iter().enumerate() {
        let v = encode_average(text.as_ref(), table)
            .map_err(|e| Error::Invalid(format!("text {i}: {e}")))?;
        data.extend(v);
    }
    EmbeddingMatrix::new(texts.len(), table.dim(), data)
}

impl CategoryEncoder for WordVectorTable {
    fn encode_categories(&self, categories: &CategorySet) -> Result<EmbeddingMatrix> {
        encode_texts(categories.names(), self)
    }
}

#[cfg(test)]
mod tests {
    use std::path::Path;

    use super::*;
    use crate::io::parse_vectors;

    fn table() -> WordVectorTable {
        parse_vectors("a 1 0\nb 0 1\n", Path::new("t.vec")).unwrap()
    }

    #[test]
    fn averages_tokens() {
        assert_eq!(encode_average("a b", &table()).unwrap(), vec![0.5, 0.5]);
        assert_eq!(encode_average("a a", &table()).unwrap(), vec![1.0, 0.0]);
        assert_eq!(encode_average("A zzz b", &table()).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn all_oov_is_an_error() {
        assert!(matches!(
            encode_average("zzz", &table()),
            Err(Error::AllOov(_))
        ));
        assert!(matches!(
            encode_average("", &table()),
            Err(Error::AllOov(_))
        ));
    }

    #[test]
    fn category_encoder_keeps_order() {
        let cats = CategorySet::new(["b", "a b", "a"]).unwrap();
        let m = table().encode_categories(&cats).unwrap();
        assert_eq!(m.row(0), [0.0, 1.0]);
        assert_eq!(m.row(1), [0.5, 0.5]);
        assert_eq!(m.row(2), [1.0, 0.0]);
    }
}
