use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub label: String,
    pub split: Split,
}

/// Labeled image list read from a `path,label,split` CSV.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn new(entries: Vec<ManifestEntry>) -> Result<Self> {
        let m = DatasetManifest { entries };
        m.validate()?;
        Ok(m)
    }

    /// Reads a manifest; relative paths are resolved against the manifest's
    /// directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let mut m = Self::parse(&text)?;
        for e in &mut m.entries {
            if e.path.is_relative() {
                e.path = base.join(&e.path);
            }
        }
        Ok(m)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = rdr
            .headers()
            .map_err(|e| Error::Manifest(e.to_string()))?
            .clone();
        if headers.iter().collect::<Vec<_>>() != ["path", "label", "split"] {
            return Err(Error::Manifest(format!(
                "header must be `path,label,split`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let entries = rdr
            .deserialize()
            .collect::<std::result::Result<Vec<ManifestEntry>, _>>()
            .map_err(|e| Error::Manifest(e.to_string()))?;
        Self::new(entries)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for e in &self.entries {
            w.serialize(e).expect("in-memory CSV write");
        }
        String::from_utf8(w.into_inner().expect("flush to Vec")).expect("UTF-8 CSV")
    }

    fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for e in &self.entries {
            if !seen.insert(&e.path) {
                return Err(Error::Manifest(format!(
                    "duplicate path {}",
                    e.path.display()
                )));
            }
        }
        let train: HashSet<&str> = self.split(Split::Train).map(|e| e.label.as_str()).collect();
        if let Some(e) = self
            .split(Split::Test)
            .find(|e| !train.contains(e.label.as_str()))
        {
            return Err(Error::Manifest(format!(
                "test label {:?} has no training entry",
                e.label
            )));
        }
        Ok(())
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(move |e| e.split == split)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_round_trips() {
        let text = "path,label,split\na.pgm,cat,train\nb.pgm,cat,test\n";
        let m = DatasetManifest::parse(text).unwrap();
        assert_eq!(m.entries.len(), 2);
        assert_eq!(m.entries[1].split, Split::Test);
        assert_eq!(DatasetManifest::parse(&m.to_csv()).unwrap(), m);
    }

    #[test]
    fn rejects_duplicates_and_orphan_test_labels() {
        assert!(DatasetManifest::parse("path,label,split\na,x,train\na,x,test\n").is_err());
        assert!(DatasetManifest::parse("path,label,split\na,x,train\nb,y,test\n").is_err());
        assert!(DatasetManifest::parse("file,label,split\na,x,train\n").is_err());
        assert!(DatasetManifest::parse("path,label,split\na,x,validation\n").is_err());
    }
}
