use serde::{Deserialize, Serialize};

use super::rng::{CounterRng, TAG_PLAN_SHUFFLE};
use super::CorruptionSpec;
use crate::error::{Error, Result};
use crate::io::{DatasetManifest, Split};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanEntry {
    pub path: String,
    pub label: String,
    pub corrupted: bool,
}

/// Which samples of one split receive the shortcut.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorruptionPlan {
    pub split: Split,
    pub spec: CorruptionSpec,
    /// Every sample of the split, in manifest order.
    pub entries: Vec<PlanEntry>,
}

impl CorruptionPlan {
    pub fn seed(&self) -> u64 {
        self.spec.seed
    }

    pub fn marked(&self) -> impl Iterator<Item = &PlanEntry> {
        self.entries.iter().filter(|e| e.corrupted)
    }

    pub fn marked_count(&self) -> usize {
        self.marked().count()
    }

    /// `path,corrupted` with `1` for marked samples and `0` otherwise.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(["path", "corrupted"]).expect("in-memory write");
        for e in &self.entries {
            w.write_record([e.path.as_str(), if e.corrupted { "1" } else { "0" }])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}

/// `round(p * n)` with halves rounded up.
pub(crate) fn marked_target(fraction: f64, n: usize) -> usize {
    (fraction * n as f64 + 0.5).floor() as usize
}

/// Marks `round(p * n)` of the `n` target-class samples in `split`.
///
/// Target paths are sorted, shuffled with the stream `(seed, TAG_PLAN_SHUFFLE, 0)`
/// and the leading ones marked. Samples of other classes are never marked.
pub fn plan_corruption(
    manifest: &DatasetManifest,
    spec: &CorruptionSpec,
    split: Split,
) -> Result<CorruptionPlan> {
    spec.validate()?;
    let mut targets: Vec<&str> = manifest
        .select(Some(&spec.target_label), Some(split))
        .map(|e| e.path.as_str())
        .collect();
    if targets.is_empty() {
        return Err(Error::Validation(format!(
            "label `{}` has no samples in split `{split}`",
            spec.target_label
        )));
    }
    targets.sort_unstable();
    CounterRng::new(spec.seed, TAG_PLAN_SHUFFLE, 0).shuffle(&mut targets);
    let chosen = &targets[..marked_target(spec.fraction, targets.len())];

    let entries = manifest
        .select(None, Some(split))
        .map(|e| PlanEntry {
            path: e.path.clone(),
            label: e.label.clone(),
            corrupted: e.label == spec.target_label && chosen.contains(&e.path.as_str()),
        })
        .collect();
    Ok(CorruptionPlan {
        split,
        spec: spec.clone(),
        entries,
    })
}
