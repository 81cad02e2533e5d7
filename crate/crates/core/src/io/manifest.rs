use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use super::read_to_string;
use crate::error::{Error, Result};

/// Keys a manifest may set.
pub const KEYS: &[&str] = &[
    "docs",
    "cats",
    "names",
    "gold",
    "anchors",
    "anchor_labels",
    "aug_cats",
    "aug_text",
    "scores",
    "runs",
    "preds",
    "vectors",
    "texts",
    "pools",
    "label_sets",
];

/// `key=value` lines naming a dataset's files. Relative paths resolve
/// against the manifest's directory; `#` starts a comment line.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    base: PathBuf,
    entries: BTreeMap<String, String>,
}

impl Manifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = read_to_string(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, path, base)
    }

    pub fn parse(text: &str, path: &Path, base: PathBuf) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed
                .split_once('=')
                .ok_or_else(|| Error::parse(path, line, "expected key=value"))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(Error::parse(path, line, format!("unknown key {key:?}")));
            }
            if value.is_empty() {
                return Err(Error::parse(path, line, format!("empty value for {key:?}")));
            }
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(Error::parse(path, line, format!("duplicate key {key:?}")));
            }
        }
        Ok(Self { base, entries })
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.entries.get(key).map(|v| self.base.join(v))
    }

    pub fn require(&self, key: &str) -> Result<PathBuf> {
        self.path(key)
            .ok_or_else(|| Error::Invalid(format!("manifest is missing {key}=")))
    }

    /// Comma-separated list of paths.
    pub fn paths(&self, key: &str) -> Vec<PathBuf> {
        self.entries
            .get(key)
            .map(|v| {
                v.split(',')
                    .map(str::trim)
                    .filter(|p| !p.is_empty())
                    .map(|p| self.base.join(p))
                    .collect()
            })
            .unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Manifest> {
        Manifest::parse(text, Path::new("m.txt"), PathBuf::from("/data"))
    }

    #[test]
    fn resolves_relative_paths() {
        let m =
            parse("# dataset\ndocs = docs.vec\ncats=/abs/cats.vec\nruns=a.tsv, b.tsv\n").unwrap();
        assert_eq!(m.path("docs"), Some(PathBuf::from("/data/docs.vec")));
        assert_eq!(m.path("cats"), Some(PathBuf::from("/abs/cats.vec")));
        assert_eq!(m.paths("runs").len(), 2);
        assert!(m.require("gold").is_err());
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        assert!(parse("dcos=x\n").is_err());
        assert!(parse("docs=x\ndocs=y\n").is_err());
        assert!(parse("docs\n").is_err());
    }
}
