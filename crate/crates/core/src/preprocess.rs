//! Missing-data handling and one-hot encoding.
//!
//! Features with more than `threshold` missing cells are dropped. The
//! remaining missing cells are filled with the median (numeric) or mode
//! (categorical) of a temporary class-balanced subsample: every minority row
//! plus an equally sized random draw of majority rows. Categorical columns are
//! then expanded into one indicator column per observed category.

use std::collections::BTreeMap;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::data::{Cell, Dataset, FeatureKind, FeatureSpec};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::seeded;
use crate::sampling::random_undersample;

/// Drops every feature whose missing fraction is strictly greater than
/// `threshold`. Returns the reduced dataset and the dropped indices.
pub fn filter_by_missingness(ds: &Dataset, threshold: f64) -> Result<(Dataset, Vec<usize>)> {
    let (retained, dropped) = split_by_missingness(ds, threshold)?;
    Ok((ds.select_features(&retained), dropped))
}

fn split_by_missingness(ds: &Dataset, threshold: f64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::ConfigInvalid(format!(
            "missingness threshold {threshold} outside [0, 1]"
        )));
    }
    let mut retained = Vec::new();
    let mut dropped = Vec::new();
    for f in 0..ds.n_features() {
        if ds.missing_fraction(f)? > threshold {
            dropped.push(f);
        } else {
            retained.push(f);
        }
    }
    Ok((retained, dropped))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FillValue {
    Median(f64),
    Mode(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureFill {
    pub feature: String,
    pub fill: FillValue,
    /// The balanced subsample had no present cell; the statistic comes from
    /// the whole input dataset instead.
    pub fallback: bool,
}

/// Fitted missing-data treatment for one dataset schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImputationPlan {
    pub source_schema: Vec<FeatureSpec>,
    pub retained: Vec<usize>,
    pub dropped: Vec<usize>,
    /// Parallel to `retained`.
    pub fills: Vec<FeatureFill>,
    pub balance_seed: u64,
    /// Row count of the temporary balanced dataset.
    pub balanced_rows: usize,
}

impl ImputationPlan {
    pub fn retained_schema(&self) -> Vec<FeatureSpec> {
        self.retained
            .iter()
            .enumerate()
            .map(|(new, &old)| FeatureSpec {
                index: new,
                ..self.source_schema[old].clone()
            })
            .collect()
    }

    pub fn dropped_names(&self) -> Vec<String> {
        self.dropped
            .iter()
            .map(|&f| self.source_schema[f].name.clone())
            .collect()
    }
}

/// Imputation plan over all features of `ds` (no missingness filter).
pub fn build_imputation_plan(ds: &Dataset, seed: u64) -> Result<ImputationPlan> {
    let all: Vec<usize> = (0..ds.n_features()).collect();
    plan_for(ds, all, Vec::new(), seed)
}

/// Missingness filter followed by imputation-plan construction, both
/// computed from `ds` alone.
pub fn fit_plan(ds: &Dataset, threshold: f64, seed: u64) -> Result<ImputationPlan> {
    let (retained, dropped) = split_by_missingness(ds, threshold)?;
    plan_for(ds, retained, dropped, seed)
}

fn plan_for(
    ds: &Dataset,
    retained: Vec<usize>,
    dropped: Vec<usize>,
    seed: u64,
) -> Result<ImputationPlan> {
    let balanced = random_undersample(ds.labels(), &mut seeded(seed))?;
    let mut fills = Vec::with_capacity(retained.len());
    for &f in &retained {
        let spec = &ds.schema()[f];
        let sub = balanced.indices.iter().map(|&i| ds.cell(i, f));
        let (fill, fallback) = match statistic(spec.kind, sub) {
            Some(v) => (v, false),
            None => {
                warn!(
                    "feature `{}` has no present value in the balanced subsample; using the full-data statistic",
                    spec.name
                );
                let v = statistic(spec.kind, ds.column(f))
                    .ok_or_else(|| Error::AllMissingFeature(spec.name.clone()))?;
                (v, true)
            }
        };
        fills.push(FeatureFill {
            feature: spec.name.clone(),
            fill,
            fallback,
        });
    }
    Ok(ImputationPlan {
        source_schema: ds.schema().to_vec(),
        retained,
        dropped,
        fills,
        balance_seed: seed,
        balanced_rows: balanced.len(),
    })
}

fn statistic<'a>(kind: FeatureKind, cells: impl Iterator<Item = &'a Cell>) -> Option<FillValue> {
    match kind {
        FeatureKind::Numeric => {
            let values: Vec<f64> = cells
                .filter_map(|c| match c {
                    Cell::Numeric(v) => Some(*v),
                    _ => None,
                })
                .collect();
            median(values).map(FillValue::Median)
        }
        FeatureKind::Categorical => mode(cells.filter_map(|c| match c {
            Cell::Category(t) => Some(t.as_str()),
            _ => None,
        }))
        .map(FillValue::Mode),
    }
}

/// Median; even-sized samples average the two central order statistics.
pub fn median(mut values: Vec<f64>) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    })
}

/// Most frequent token; ties go to the lexicographically smallest.
pub fn mode<'a>(tokens: impl Iterator<Item = &'a str>) -> Option<String> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for t in tokens {
        *counts.entry(t).or_default() += 1;
    }
    let mut best: Option<(&str, usize)> = None;
    for (t, c) in counts {
        if best.is_none_or(|(_, bc)| c > bc) {
            best = Some((t, c));
        }
    }
    best.map(|(t, _)| t.to_string())
}

/// Fills missing cells of retained features and drops the rest.
///
/// Accepts a dataset in either the plan's source schema or its retained
/// schema, so applying a plan twice is the same as applying it once.
pub fn apply_imputation(ds: &Dataset, plan: &ImputationPlan) -> Result<Dataset> {
    let reduced = if ds.schema() == plan.source_schema.as_slice() {
        ds.select_features(&plan.retained)
    } else if ds.schema() == plan.retained_schema().as_slice() {
        ds.clone()
    } else {
        return Err(Error::SchemaMismatch(format!(
            "dataset has {} features ({}), plan expects {}",
            ds.n_features(),
            ds.schema()
                .iter()
                .map(|s| s.name.as_str())
                .collect::<Vec<_>>()
                .join(","),
            plan.source_schema.len()
        )));
    };
    let rows = reduced
        .rows()
        .iter()
        .map(|row| {
            row.iter()
                .zip(&plan.fills)
                .map(|(cell, fill)| match (cell, &fill.fill) {
                    (Cell::Missing, FillValue::Median(v)) => Cell::Numeric(*v),
                    (Cell::Missing, FillValue::Mode(t)) => Cell::Category(t.clone()),
                    (c, _) => c.clone(),
                })
                .collect()
        })
        .collect();
    Ok(reduced.with_rows(reduced.schema().to_vec(), rows))
}

/// Where an encoded column came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnOrigin {
    pub feature: String,
    pub source_index: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub category: Option<String>,
}

/// Fully numeric design matrix with labels and per-column provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedMatrix {
    pub x: Matrix,
    pub column_origin: Vec<ColumnOrigin>,
    pub labels: Vec<u8>,
}

impl EncodedMatrix {
    pub fn n_rows(&self) -> usize {
        self.x.n_rows()
    }

    pub fn n_cols(&self) -> usize {
        self.x.n_cols()
    }

    pub fn select_rows(&self, indices: &[usize]) -> EncodedMatrix {
        EncodedMatrix {
            x: self.x.select_rows(indices),
            column_origin: self.column_origin.clone(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    pub fn column_names(&self) -> Vec<String> {
        self.column_origin
            .iter()
            .map(|o| match &o.category {
                Some(c) => format!("{}={c}", o.feature),
                None => o.feature.clone(),
            })
            .collect()
    }

    pub fn write_csv<W: std::io::Write>(&self, target: &str, writer: W) -> Result<()> {
        let map = |e: csv::Error| Error::MalformedCsv(e.to_string());
        let mut w = csv::Writer::from_writer(writer);
        let mut header = self.column_names();
        header.push(target.to_string());
        w.write_record(&header).map_err(map)?;
        for (row, label) in self.x.rows().zip(&self.labels) {
            let mut rec: Vec<String> = row.iter().map(f64::to_string).collect();
            rec.push(label.to_string());
            w.write_record(&rec).map_err(map)?;
        }
        w.flush().map_err(|e| Error::MalformedCsv(e.to_string()))
    }
}

/// Category vocabulary learned from a complete dataset. Categories are kept
/// in sorted order and none is dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneHotEncoder {
    schema: Vec<FeatureSpec>,
    categories: Vec<Option<Vec<String>>>,
}

impl OneHotEncoder {
    pub fn fit(ds: &Dataset) -> Result<Self> {
        check_complete(ds)?;
        let categories = ds
            .schema()
            .iter()
            .map(|spec| match spec.kind {
                FeatureKind::Numeric => None,
                FeatureKind::Categorical => {
                    let mut cats: Vec<String> = ds
                        .column(spec.index)
                        .filter_map(|c| match c {
                            Cell::Category(t) => Some(t.clone()),
                            _ => None,
                        })
                        .collect();
                    cats.sort();
                    cats.dedup();
                    Some(cats)
                }
            })
            .collect();
        Ok(Self {
            schema: ds.schema().to_vec(),
            categories,
        })
    }

    pub fn column_origin(&self) -> Vec<ColumnOrigin> {
        let mut out = Vec::new();
        for (spec, cats) in self.schema.iter().zip(&self.categories) {
            match cats {
                None => out.push(ColumnOrigin {
                    feature: spec.name.clone(),
                    source_index: spec.index,
                    category: None,
                }),
                Some(cats) => out.extend(cats.iter().map(|c| ColumnOrigin {
                    feature: spec.name.clone(),
                    source_index: spec.index,
                    category: Some(c.clone()),
                })),
            }
        }
        out
    }

    pub fn categories(&self, feature: usize) -> Option<&[String]> {
        self.categories.get(feature)?.as_deref()
    }

    pub fn transform(&self, ds: &Dataset) -> Result<EncodedMatrix> {
        if ds.schema() != self.schema.as_slice() {
            return Err(Error::SchemaMismatch(
                "dataset schema differs from the encoder's".into(),
            ));
        }
        check_complete(ds)?;
        let origin = self.column_origin();
        let q = origin.len();
        let mut data = Vec::with_capacity(ds.n_rows() * q);
        for row in ds.rows() {
            for ((cell, cats), spec) in row.iter().zip(&self.categories).zip(&self.schema) {
                match (cell, cats) {
                    (Cell::Numeric(v), None) => data.push(*v),
                    (Cell::Category(t), Some(cats)) => {
                        let hit = cats.binary_search(t).map_err(|_| Error::UnseenCategory {
                            feature: spec.name.clone(),
                            token: t.clone(),
                        })?;
                        data.extend((0..cats.len()).map(|k| if k == hit { 1.0 } else { 0.0 }));
                    }
                    _ => unreachable!("cells validated against schema"),
                }
            }
        }
        Ok(EncodedMatrix {
            x: Matrix::new(data, ds.n_rows(), q)?,
            column_origin: origin,
            labels: ds.labels().to_vec(),
        })
    }
}

fn check_complete(ds: &Dataset) -> Result<()> {
    for (r, row) in ds.rows().iter().enumerate() {
        if let Some(f) = row.iter().position(Cell::is_missing) {
            return Err(Error::MissingCellPresent {
                row: r,
                feature: ds.schema()[f].name.clone(),
            });
        }
    }
    Ok(())
}

/// One-hot encodes a complete dataset using its own category vocabulary.
pub fn one_hot_encode(ds: &Dataset) -> Result<EncodedMatrix> {
    OneHotEncoder::fit(ds)?.transform(ds)
}

/// Imputation plan plus encoder, fitted on one dataset and applied to others
/// with the same schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preprocessor {
    pub plan: ImputationPlan,
    pub encoder: OneHotEncoder,
}

impl Preprocessor {
    pub fn fit(ds: &Dataset, threshold: f64, seed: u64) -> Result<Self> {
        let plan = fit_plan(ds, threshold, seed)?;
        let encoder = OneHotEncoder::fit(&apply_imputation(ds, &plan)?)?;
        Ok(Self { plan, encoder })
    }

    /// Categories never seen at fit time are replaced by the feature's mode
    /// fill value before encoding.
    pub fn transform(&self, ds: &Dataset) -> Result<EncodedMatrix> {
        let imputed = apply_imputation(ds, &self.plan)?;
        let rows = imputed
            .rows()
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(f, cell)| match (cell, self.encoder.categories(f)) {
                        (Cell::Category(t), Some(cats)) if cats.binary_search(t).is_err() => {
                            match &self.plan.fills[f].fill {
                                FillValue::Mode(m) => Cell::Category(m.clone()),
                                FillValue::Median(_) => cell.clone(),
                            }
                        }
                        _ => cell.clone(),
                    })
                    .collect()
            })
            .collect();
        self.encoder
            .transform(&imputed.with_rows(imputed.schema().to_vec(), rows))
    }
}
