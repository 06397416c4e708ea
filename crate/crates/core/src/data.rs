//! Tabular cohort data: typed feature columns, explicit missing cells and
//! binary labels (1 = positive / dropout, 0 = negative).

use std::collections::{BTreeSet, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FeatureKind {
    Numeric,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub kind: FeatureKind,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Missing,
    Numeric(f64),
    Category(String),
}

impl Cell {
    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }
}

/// An immutable n × p grid of cells with one binary label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    target: String,
    schema: Vec<FeatureSpec>,
    rows: Vec<Vec<Cell>>,
    labels: Vec<u8>,
}

impl Dataset {
    /// Builds a dataset, checking every invariant of the schema and cells.
    pub fn new(
        target: impl Into<String>,
        schema: Vec<FeatureSpec>,
        rows: Vec<Vec<Cell>>,
        labels: Vec<u8>,
    ) -> Result<Self> {
        let mut names = HashSet::new();
        for (i, spec) in schema.iter().enumerate() {
            if spec.index != i {
                return Err(Error::InvalidDataset(format!(
                    "feature `{}` has index {}, expected {i}",
                    spec.name, spec.index
                )));
            }
            if !names.insert(spec.name.as_str()) {
                return Err(Error::InvalidDataset(format!(
                    "duplicate feature name `{}`",
                    spec.name
                )));
            }
        }
        if rows.len() != labels.len() {
            return Err(Error::LengthMismatch(rows.len(), labels.len()));
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != schema.len() {
                return Err(Error::InvalidDataset(format!(
                    "row {r} has {} cells, schema has {}",
                    row.len(),
                    schema.len()
                )));
            }
            for (cell, spec) in row.iter().zip(&schema) {
                let ok = match (cell, spec.kind) {
                    (Cell::Missing, _) => true,
                    (Cell::Numeric(v), FeatureKind::Numeric) => v.is_finite(),
                    (Cell::Category(_), FeatureKind::Categorical) => true,
                    _ => false,
                };
                if !ok {
                    return Err(Error::InvalidDataset(format!(
                        "row {r}, feature `{}`: cell {cell:?} does not match {:?}",
                        spec.name, spec.kind
                    )));
                }
            }
        }
        if let Some(&bad) = labels.iter().find(|&&l| l > 1) {
            return Err(Error::InvalidDataset(format!("label {bad} is not binary")));
        }
        Ok(Self {
            target: target.into(),
            schema,
            rows,
            labels,
        })
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn schema(&self) -> &[FeatureSpec] {
        &self.schema
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.schema.len()
    }

    pub fn cell(&self, row: usize, feature: usize) -> &Cell {
        &self.rows[row][feature]
    }

    pub fn column(&self, feature: usize) -> impl Iterator<Item = &Cell> + '_ {
        self.rows.iter().map(move |r| &r[feature])
    }

    pub fn class_counts(&self) -> [usize; 2] {
        crate::sampling::class_counts(&self.labels)
    }

    pub fn missing_count(&self, feature: usize) -> Result<usize> {
        if feature >= self.schema.len() {
            return Err(Error::IndexOutOfRange {
                index: feature,
                len: self.schema.len(),
            });
        }
        Ok(self.column(feature).filter(|c| c.is_missing()).count())
    }

    /// Fraction of rows whose cell in `feature` is missing.
    pub fn missing_fraction(&self, feature: usize) -> Result<f64> {
        let missing = self.missing_count(feature)?;
        if self.rows.is_empty() {
            return Ok(0.0);
        }
        Ok(missing as f64 / self.rows.len() as f64)
    }

    pub fn total_missing(&self) -> usize {
        self.rows
            .iter()
            .flatten()
            .filter(|c| c.is_missing())
            .count()
    }

    /// Row subset in the given order (indices may repeat).
    pub fn select_rows(&self, indices: &[usize]) -> Dataset {
        Dataset {
            target: self.target.clone(),
            schema: self.schema.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// Keeps only the listed features, in the listed order, re-indexing the schema.
    pub fn select_features(&self, features: &[usize]) -> Dataset {
        let schema = features
            .iter()
            .enumerate()
            .map(|(new, &old)| FeatureSpec {
                index: new,
                ..self.schema[old].clone()
            })
            .collect();
        let rows = self
            .rows
            .iter()
            .map(|r| features.iter().map(|&f| r[f].clone()).collect())
            .collect();
        Dataset {
            target: self.target.clone(),
            schema,
            rows,
            labels: self.labels.clone(),
        }
    }

    pub(crate) fn with_rows(&self, schema: Vec<FeatureSpec>, rows: Vec<Vec<Cell>>) -> Dataset {
        Dataset {
            target: self.target.clone(),
            schema,
            rows,
            labels: self.labels.clone(),
        }
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.schema.iter().position(|s| s.name == name)
    }
}

/// How to interpret a cohort CSV.
#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub target_column: String,
    pub categorical_columns: BTreeSet<String>,
    /// Treat any column holding a non-numeric token as categorical instead of failing.
    pub infer_categorical: bool,
    pub missing_tokens: BTreeSet<String>,
    pub positive_token: String,
    pub negative_token: String,
}

impl CsvOptions {
    pub fn new(target_column: impl Into<String>) -> Self {
        Self {
            target_column: target_column.into(),
            categorical_columns: BTreeSet::new(),
            infer_categorical: false,
            missing_tokens: ["", "NA", "NaN"].iter().map(|s| s.to_string()).collect(),
            positive_token: "1".into(),
            negative_token: "0".into(),
        }
    }

    pub fn categorical<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.categorical_columns
            .extend(names.into_iter().map(Into::into));
        self
    }

    pub fn infer_categorical(mut self, on: bool) -> Self {
        self.infer_categorical = on;
        self
    }

    pub fn label_tokens(
        mut self,
        positive: impl Into<String>,
        negative: impl Into<String>,
    ) -> Self {
        self.positive_token = positive.into();
        self.negative_token = negative.into();
        self
    }
}

pub fn load_csv(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, opts)
}

/// Parses a header-first, RFC-4180 CSV. Column order is kept, minus the target.
pub fn read_csv<R: Read>(reader: R, opts: &CsvOptions) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::MalformedCsv(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let target_pos = header
        .iter()
        .position(|h| *h == opts.target_column)
        .ok_or_else(|| Error::UnknownTarget(opts.target_column.clone()))?;

    let mut raw: Vec<Vec<String>> = Vec::new();
    let mut labels = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        // 1-based data row number, header excluded
        let row = i + 1;
        let rec = rec.map_err(|e| Error::MalformedCsv(e.to_string()))?;
        let value = &rec[target_pos];
        let label = if value == opts.positive_token {
            1
        } else if value == opts.negative_token {
            0
        } else {
            return Err(Error::UnparsableLabel {
                row,
                value: value.to_string(),
            });
        };
        labels.push(label);
        raw.push(
            rec.iter()
                .enumerate()
                .filter(|&(c, _)| c != target_pos)
                .map(|(_, v)| v.to_string())
                .collect(),
        );
    }

    let names: Vec<&String> = header
        .iter()
        .enumerate()
        .filter(|&(c, _)| c != target_pos)
        .map(|(_, h)| h)
        .collect();
    let is_missing = |v: &str| opts.missing_tokens.contains(v);

    let mut schema = Vec::with_capacity(names.len());
    for (index, name) in names.iter().enumerate() {
        let declared = opts.categorical_columns.contains(name.as_str());
        let kind = if declared {
            FeatureKind::Categorical
        } else {
            let bad = raw
                .iter()
                .enumerate()
                .find(|(_, r)| !is_missing(&r[index]) && parse_number(&r[index]).is_none());
            match bad {
                None => FeatureKind::Numeric,
                Some(_) if opts.infer_categorical => FeatureKind::Categorical,
                Some((r, row)) => {
                    return Err(Error::NonNumericValue {
                        row: r + 1,
                        column: name.to_string(),
                        value: row[index].clone(),
                    })
                }
            }
        };
        schema.push(FeatureSpec {
            name: name.to_string(),
            kind,
            index,
        });
    }

    let rows = raw
        .into_iter()
        .map(|r| {
            r.into_iter()
                .zip(&schema)
                .map(|(v, spec)| {
                    if is_missing(&v) {
                        Cell::Missing
                    } else {
                        match spec.kind {
                            FeatureKind::Numeric => Cell::Numeric(
                                parse_number(&v).expect("numeric column checked above"),
                            ),
                            FeatureKind::Categorical => Cell::Category(v),
                        }
                    }
                })
                .collect()
        })
        .collect();

    Dataset::new(opts.target_column.clone(), schema, rows, labels)
}

fn parse_number(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Writes the dataset with the target as the last column. Missing cells are empty.
pub fn write_csv<W: Write>(ds: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let map = |e: csv::Error| Error::MalformedCsv(e.to_string());
    let mut header: Vec<&str> = ds.schema.iter().map(|s| s.name.as_str()).collect();
    header.push(&ds.target);
    w.write_record(&header).map_err(map)?;
    for (row, &label) in ds.rows.iter().zip(&ds.labels) {
        let mut rec: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Missing => String::new(),
                Cell::Numeric(v) => v.to_string(),
                Cell::Category(t) => t.clone(),
            })
            .collect();
        rec.push(label.to_string());
        w.write_record(&rec).map_err(map)?;
    }
    w.flush().map_err(|e| Error::MalformedCsv(e.to_string()))?;
    Ok(())
}

pub fn save_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(ds, std::io::BufWriter::new(file))
}
