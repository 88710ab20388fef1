use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, FormatError, Result};

pub const MANIFEST_HEADER: [&str; 3] = ["path", "label", "split"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Split {
    #[serde(rename = "train")]
    Train,
    #[serde(rename = "test-iid")]
    TestIid,
    #[serde(rename = "test-ood")]
    TestOod,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::TestIid => "test-iid",
            Split::TestOod => "test-ood",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "test-iid" => Ok(Split::TestIid),
            "test-ood" => Ok(Split::TestOod),
            other => Err(format!(
                "unknown split `{other}` (expected train, test-iid or test-ood)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleEntry {
    /// Relative to the manifest's directory.
    pub path: String,
    pub label: String,
    pub split: Split,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DatasetManifest {
    entries: Vec<SampleEntry>,
}

impl DatasetManifest {
    /// Builds a manifest, rejecting duplicate paths.
    pub fn new(entries: Vec<SampleEntry>) -> Result<Self> {
        let mut seen = HashSet::new();
        for e in &entries {
            if !seen.insert(e.path.as_str()) {
                return Err(Error::Validation(format!(
                    "duplicate manifest path `{}`",
                    e.path
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[SampleEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Distinct labels in first-appearance order.
    pub fn labels(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for e in &self.entries {
            if !out.contains(&e.label.as_str()) {
                out.push(&e.label);
            }
        }
        out
    }

    pub fn select<'a>(
        &'a self,
        label: Option<&'a str>,
        split: Option<Split>,
    ) -> impl Iterator<Item = &'a SampleEntry> + 'a {
        self.entries.iter().filter(move |e| {
            label.is_none_or(|l| e.label == l) && split.is_none_or(|s| e.split == s)
        })
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(MANIFEST_HEADER).expect("in-memory write");
        for e in &self.entries {
            w.write_record([e.path.as_str(), e.label.as_str(), e.split.as_str()])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}

/// Parses a `path,label,split` CSV. `#` lines and blank lines are skipped.
pub fn parse_manifest(text: &str) -> Result<DatasetManifest> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());

    let line_err = |line: u64, message: String| Error::Format(FormatError::Line { line, message });
    let mut entries = Vec::new();
    let mut header_seen = false;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            line_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if !header_seen {
            let fields: Vec<&str> = record.iter().collect();
            if fields != MANIFEST_HEADER {
                return Err(line_err(
                    line,
                    format!("expected header `path,label,split`, found `{}`", fields.join(",")),
                ));
            }
            header_seen = true;
            continue;
        }
        if record.len() != 3 {
            return Err(line_err(
                line,
                format!("expected 3 fields, found {}", record.len()),
            ));
        }
        let (path, label, split) = (&record[0], &record[1], &record[2]);
        if path.is_empty() || label.is_empty() {
            return Err(line_err(line, "empty path or label".into()));
        }
        let split = split.parse().map_err(|m| line_err(line, m))?;
        entries.push(SampleEntry {
            path: path.to_string(),
            label: label.to_string(),
            split,
        });
    }
    if !header_seen {
        return Err(line_err(1, "missing header `path,label,split`".into()));
    }
    DatasetManifest::new(entries)
}
