//! Loading, validation, and summary of the clinical dataset.
//!
//! The expected file is an RFC-4180 CSV with a header row and the ten
//! columns of the public Coimbra release: `Age, BMI, Glucose, Insulin,
//! HOMA, Leptin, Adiponectin, Resistin, MCP.1, Classification`. Column
//! order is free; `MCP-1`/`MCP_1` spellings are accepted via the default
//! alias map.
//!
//! Label encoding follows the public release: `Classification` **1 =
//! healthy control, 2 = breast-cancer patient**. A differently encoded
//! copy will load with inverted classes, so check the class counts a
//! loader reports (the Coimbra file has 64 cancer / 52 healthy).

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Clinical feature names, in the fixed column order used everywhere in
/// this crate.
pub const FEATURE_NAMES: [&str; 9] = [
    "age",
    "bmi",
    "glucose",
    "insulin",
    "homa",
    "leptin",
    "adiponectin",
    "resistin",
    "mcp1",
];

/// CSV header names of the public release, aligned with [`FEATURE_NAMES`].
const CSV_FEATURE_HEADERS: [&str; 9] = [
    "Age",
    "BMI",
    "Glucose",
    "Insulin",
    "HOMA",
    "Leptin",
    "Adiponectin",
    "Resistin",
    "MCP.1",
];

const CSV_LABEL_HEADER: &str = "Classification";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Healthy,
    Cancer,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Healthy => write!(f, "Healthy"),
            Label::Cancer => write!(f, "Cancer"),
        }
    }
}

/// One subject: nine strictly positive, finite measurements plus the
/// diagnosis label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatientRecord {
    pub id: usize,
    pub age: f64,
    pub bmi: f64,
    pub glucose: f64,
    pub insulin: f64,
    pub homa: f64,
    pub leptin: f64,
    pub adiponectin: f64,
    pub resistin: f64,
    pub mcp1: f64,
    pub label: Label,
}

impl PatientRecord {
    /// The nine measurements in [`FEATURE_NAMES`] order.
    pub fn features(&self) -> [f64; 9] {
        [
            self.age,
            self.bmi,
            self.glucose,
            self.insulin,
            self.homa,
            self.leptin,
            self.adiponectin,
            self.resistin,
            self.mcp1,
        ]
    }

    fn validate(&self) -> std::result::Result<(), String> {
        for (name, value) in FEATURE_NAMES.iter().zip(self.features()) {
            if !value.is_finite() {
                return Err(format!("{name} is not finite"));
            }
            if value <= 0.0 {
                return Err(format!("{name} must be strictly positive, got {value}"));
            }
        }
        Ok(())
    }
}

/// An immutable, validated cohort. Record ids are contiguous from 0 and
/// match file order.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    records: Vec<PatientRecord>,
    n_cancer: usize,
    n_healthy: usize,
}

impl Dataset {
    /// Build from records, re-checking every invariant.
    pub fn from_records(records: Vec<PatientRecord>) -> Result<Self> {
        for (i, r) in records.iter().enumerate() {
            if r.id != i {
                return Err(Error::InvalidParam {
                    reason: format!("record {i} has id {}, ids must be contiguous from 0", r.id),
                });
            }
            if let Err(reason) = r.validate() {
                return Err(Error::InvalidParam {
                    reason: format!("record {i}: {reason}"),
                });
            }
        }
        let n_cancer = records.iter().filter(|r| r.label == Label::Cancer).count();
        let n_healthy = records.len() - n_cancer;
        Ok(Dataset {
            records,
            n_cancer,
            n_healthy,
        })
    }

    pub fn records(&self) -> &[PatientRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn n_cancer(&self) -> usize {
        self.n_cancer
    }

    pub fn n_healthy(&self) -> usize {
        self.n_healthy
    }

    /// Labels as booleans, cancer = `true` (the positive class).
    pub fn labels(&self) -> Vec<bool> {
        self.records
            .iter()
            .map(|r| r.label == Label::Cancer)
            .collect()
    }
}

/// Maps alternate header spellings to the canonical ones.
#[derive(Debug, Clone)]
pub struct HeaderAliases {
    map: HashMap<String, String>,
}

impl Default for HeaderAliases {
    fn default() -> Self {
        let mut map = HashMap::new();
        for alias in ["MCP-1", "MCP_1", "MCP 1"] {
            map.insert(alias.to_string(), "MCP.1".to_string());
        }
        HeaderAliases { map }
    }
}

impl HeaderAliases {
    pub fn empty() -> Self {
        HeaderAliases {
            map: HashMap::new(),
        }
    }

    pub fn with_alias(mut self, alias: &str, canonical: &str) -> Self {
        self.map.insert(alias.to_string(), canonical.to_string());
        self
    }

    fn canonicalize<'a>(&'a self, header: &'a str) -> &'a str {
        let trimmed = header.trim();
        self.map.get(trimmed).map(String::as_str).unwrap_or(trimmed)
    }
}

/// Load a dataset with the default header aliases.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    load_dataset_with(path, &HeaderAliases::default())
}

/// Load a dataset, resolving header names through `aliases`.
///
/// Any malformed cell is an error carrying the 1-based data row number and
/// the column name; nothing is imputed or clamped.
pub fn load_dataset_with(path: impl AsRef<Path>, aliases: &HeaderAliases) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let headers = reader.headers()?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::MissingHeader { path: path.into() });
    }

    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, h) in headers.iter().enumerate() {
        index.insert(aliases.canonicalize(h), i);
    }
    let mut columns = [0usize; 9];
    for (slot, name) in columns.iter_mut().zip(CSV_FEATURE_HEADERS) {
        *slot = *index.get(name).ok_or_else(|| Error::MissingColumn {
            path: path.into(),
            column: name.to_string(),
        })?;
    }
    let label_col = *index
        .get(CSV_LABEL_HEADER)
        .ok_or_else(|| Error::MissingColumn {
            path: path.into(),
            column: CSV_LABEL_HEADER.to_string(),
        })?;

    let cell_error = |row: usize, column: &str, reason: String| Error::InvalidCell {
        path: path.into(),
        row,
        column: column.to_string(),
        reason,
    };

    let mut records = Vec::new();
    for (row_idx, row) in reader.records().enumerate() {
        let row = row?;
        let row_no = row_idx + 1;
        let mut values = [0f64; 9];
        for (slot, (&col, name)) in values
            .iter_mut()
            .zip(columns.iter().zip(CSV_FEATURE_HEADERS))
        {
            let cell = row
                .get(col)
                .ok_or_else(|| cell_error(row_no, name, "missing cell".into()))?;
            if cell.is_empty() {
                return Err(cell_error(row_no, name, "empty cell".into()));
            }
            let v: f64 = cell
                .parse()
                .map_err(|_| cell_error(row_no, name, format!("not a number: {cell:?}")))?;
            if !v.is_finite() {
                return Err(cell_error(row_no, name, format!("not finite: {cell:?}")));
            }
            if v <= 0.0 {
                return Err(cell_error(
                    row_no,
                    name,
                    format!("must be strictly positive, got {cell}"),
                ));
            }
            *slot = v;
        }
        let label_cell = row
            .get(label_col)
            .ok_or_else(|| cell_error(row_no, CSV_LABEL_HEADER, "missing cell".into()))?;
        let label = match label_cell {
            "1" => Label::Healthy,
            "2" => Label::Cancer,
            other => {
                return Err(cell_error(
                    row_no,
                    CSV_LABEL_HEADER,
                    format!("label must be 1 (healthy) or 2 (cancer), got {other:?}"),
                ))
            }
        };
        records.push(PatientRecord {
            id: records.len(),
            age: values[0],
            bmi: values[1],
            glucose: values[2],
            insulin: values[3],
            homa: values[4],
            leptin: values[5],
            adiponectin: values[6],
            resistin: values[7],
            mcp1: values[8],
            label,
        });
    }

    Dataset::from_records(records)
}

/// Write a dataset back out with the canonical header. Round-trips exactly:
/// floats are printed with the shortest representation that re-parses to
/// the same value.
pub fn write_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path)?;
    let mut header: Vec<&str> = CSV_FEATURE_HEADERS.to_vec();
    header.push(CSV_LABEL_HEADER);
    writer.write_record(&header)?;
    for r in dataset.records() {
        let mut row: Vec<String> = r.features().iter().map(|v| format!("{v}")).collect();
        row.push(match r.label {
            Label::Healthy => "1".to_string(),
            Label::Cancer => "2".to_string(),
        });
        writer.write_record(&row)?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct FeatureSummary {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DatasetSummary {
    pub n_records: usize,
    pub n_cancer: usize,
    pub n_healthy: usize,
    pub features: Vec<FeatureSummary>,
}

impl DatasetSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

impl fmt::Display for DatasetSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} records ({} cancer, {} healthy)",
            self.n_records, self.n_cancer, self.n_healthy
        )?;
        writeln!(
            f,
            "{:<12} {:>12} {:>12} {:>12}",
            "feature", "min", "max", "mean"
        )?;
        for s in &self.features {
            writeln!(
                f,
                "{:<12} {:>12.3} {:>12.3} {:>12.3}",
                s.name, s.min, s.max, s.mean
            )?;
        }
        Ok(())
    }
}

/// Per-feature min/max/mean plus class counts.
pub fn summarize(dataset: &Dataset) -> Result<DatasetSummary> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = dataset.len() as f64;
    let features = FEATURE_NAMES
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let mut min = f64::INFINITY;
            let mut max = f64::NEG_INFINITY;
            let mut sum = 0.0;
            for r in dataset.records() {
                let v = r.features()[i];
                min = min.min(v);
                max = max.max(v);
                sum += v;
            }
            FeatureSummary {
                name: name.to_string(),
                min,
                max,
                mean: sum / n,
            }
        })
        .collect();
    Ok(DatasetSummary {
        n_records: dataset.len(),
        n_cancer: dataset.n_cancer(),
        n_healthy: dataset.n_healthy(),
        features,
    })
}
