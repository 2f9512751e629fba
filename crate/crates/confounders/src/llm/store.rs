//! JSON-lines score cache: one [`LikelihoodScore`] per line, append-only
//! while fetching, so partial progress survives a crash and completed pairs
//! are never re-requested.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

use super::{Condition, LikelihoodScore};

type Key = (usize, Condition, String);

/// In-memory view of the cache, optionally bound to a JSONL file that every
/// insert is appended to.
#[derive(Debug, Default)]
pub struct ScoreStore {
    path: Option<PathBuf>,
    scores: BTreeMap<Key, LikelihoodScore>,
}

impl ScoreStore {
    /// A store with no backing file; inserts stay in memory.
    pub fn in_memory() -> Self {
        ScoreStore::default()
    }

    /// Open (or create) a file-backed store, loading and validating any
    /// existing lines.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut store = ScoreStore {
            path: Some(path.clone()),
            scores: BTreeMap::new(),
        };
        if path.exists() {
            let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
            for (line_no, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(|e| Error::io(&path, e))?;
                if line.trim().is_empty() {
                    continue;
                }
                let score: LikelihoodScore =
                    serde_json::from_str(&line).map_err(|e| Error::InvalidParam {
                        reason: format!("{}: line {}: {e}", path.display(), line_no + 1),
                    })?;
                store.insert_in_memory(score)?;
            }
        }
        Ok(store)
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn get(
        &self,
        patient_id: usize,
        condition: Condition,
        model_id: &str,
    ) -> Option<&LikelihoodScore> {
        self.scores
            .get(&(patient_id, condition, model_id.to_string()))
    }

    pub fn contains(&self, patient_id: usize, condition: Condition, model_id: &str) -> bool {
        self.get(patient_id, condition, model_id).is_some()
    }

    /// Iterate scores in deterministic (patient, condition, model) order.
    pub fn iter(&self) -> impl Iterator<Item = &LikelihoodScore> {
        self.scores.values()
    }

    /// Distinct model ids present in the store, sorted.
    pub fn model_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.scores.keys().map(|k| k.2.clone()).collect();
        ids.sort();
        ids.dedup();
        ids
    }

    /// The (patient, condition) pairs still needed for `model_id`.
    pub fn missing_for(
        &self,
        dataset: &Dataset,
        conditions: &[Condition],
        model_id: &str,
    ) -> Vec<(usize, Condition)> {
        let mut missing = Vec::new();
        for record in dataset.records() {
            for &c in conditions {
                if !self.contains(record.id, c, model_id) {
                    missing.push((record.id, c));
                }
            }
        }
        missing
    }

    /// Validate and insert; appends to the backing file when one is bound.
    /// Re-inserting an identical score is a no-op; a conflicting one is an
    /// error.
    pub fn insert(&mut self, score: LikelihoodScore) -> Result<()> {
        let appended = self.insert_in_memory(score)?;
        if let (Some(score), Some(path)) = (appended, self.path.clone()) {
            let mut file = OpenOptions::new()
                .create(true)
                .append(true)
                .open(&path)
                .map_err(|e| Error::io(&path, e))?;
            let mut line = serde_json::to_string(&score)?;
            line.push('\n');
            file.write_all(line.as_bytes())
                .map_err(|e| Error::io(&path, e))?;
            file.sync_data().map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }

    /// Returns the score if it was newly added (and so needs appending).
    fn insert_in_memory(&mut self, score: LikelihoodScore) -> Result<Option<LikelihoodScore>> {
        if !(0.0..=1.0).contains(&score.value) || !score.value.is_finite() {
            return Err(Error::OutOfRange {
                value: score.value,
                raw: score.raw_response,
            });
        }
        let key = (score.patient_id, score.condition, score.model_id.clone());
        if let Some(existing) = self.scores.get(&key) {
            if *existing == score {
                return Ok(None);
            }
            return Err(Error::DuplicateScore {
                patient_id: score.patient_id,
                condition: score.condition,
                model_id: score.model_id,
            });
        }
        self.scores.insert(key, score.clone());
        Ok(Some(score))
    }
}
