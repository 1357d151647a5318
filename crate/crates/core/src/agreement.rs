//! Krippendorff's alpha for nominal codes.
//!
//! Values are pooled into a coincidence matrix: every ordered pair of values
//! from different coders on the same item adds `1 / (m_u - 1)`, where `m_u`
//! is the number of values that item received. Items with a single value are
//! not pairable and contribute nothing.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::Serialize;

use crate::{Error, Result};

/// Items by annotators; `None` marks a missing label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationMatrix {
    pub items: Vec<String>,
    pub annotators: Vec<String>,
    pub labels: Vec<Vec<Option<String>>>,
}

impl AnnotationMatrix {
    pub fn new(
        items: Vec<String>,
        annotators: Vec<String>,
        labels: Vec<Vec<Option<String>>>,
    ) -> Result<Self> {
        if annotators.len() < 2 {
            return Err(Error::InvalidInput(
                "an annotation matrix needs at least two annotators".into(),
            ));
        }
        if labels.len() != items.len() || labels.iter().any(|row| row.len() != annotators.len()) {
            return Err(Error::InvalidInput(
                "annotation matrix rows must have one cell per annotator".into(),
            ));
        }
        Ok(AnnotationMatrix {
            items,
            annotators,
            labels,
        })
    }

    /// Builds a matrix from string labels where the empty string is missing.
    pub fn from_rows<S: AsRef<str>>(annotators: &[&str], rows: &[(&str, Vec<S>)]) -> Result<Self> {
        Self::new(
            rows.iter().map(|(id, _)| id.to_string()).collect(),
            annotators.iter().map(|a| a.to_string()).collect(),
            rows.iter()
                .map(|(_, cells)| {
                    cells
                        .iter()
                        .map(|c| Some(c.as_ref().trim().to_string()).filter(|s| !s.is_empty()))
                        .collect()
                })
                .collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AgreementResult {
    pub alpha: f64,
    pub observed_disagreement: f64,
    pub expected_disagreement: f64,
    /// Number of pairable values (values on items with at least two labels).
    pub n_pairable: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    #[default]
    Nominal,
}

pub fn krippendorff_alpha(matrix: &AnnotationMatrix, metric: Metric) -> Result<AgreementResult> {
    let Metric::Nominal = metric;

    let mut index: BTreeMap<&str, usize> = BTreeMap::new();
    for v in matrix.labels.iter().flatten().flatten() {
        let next = index.len();
        index.entry(v.as_str()).or_insert(next);
    }
    let q = index.len();
    let mut coincidence = vec![vec![0.0f64; q]; q];

    let mut any_pairable = false;
    for row in &matrix.labels {
        let values: Vec<usize> = row.iter().flatten().map(|v| index[v.as_str()]).collect();
        let m = values.len();
        if m < 2 {
            continue;
        }
        any_pairable = true;
        let mut counts = vec![0usize; q];
        for &v in &values {
            counts[v] += 1;
        }
        let w = 1.0 / (m - 1) as f64;
        for c in 0..q {
            if counts[c] == 0 {
                continue;
            }
            for k in 0..q {
                let pairs = if c == k {
                    counts[c] * (counts[c] - 1)
                } else {
                    counts[c] * counts[k]
                };
                coincidence[c][k] += pairs as f64 * w;
            }
        }
    }
    if !any_pairable {
        return Err(Error::AgreementUndefined(
            "no item has two or more labels".into(),
        ));
    }

    let marginals: Vec<f64> = coincidence.iter().map(|row| row.iter().sum()).collect();
    let n: f64 = marginals.iter().sum();
    let mut disagree_observed = 0.0;
    let mut disagree_expected = 0.0;
    for c in 0..q {
        for k in 0..q {
            if c != k {
                disagree_observed += coincidence[c][k];
                disagree_expected += marginals[c] * marginals[k];
            }
        }
    }
    let d_o = disagree_observed / n;
    let d_e = disagree_expected / (n * (n - 1.0));
    if d_e <= 0.0 {
        return Err(Error::AgreementUndefined(
            "only one category value occurs among pairable labels".into(),
        ));
    }
    Ok(AgreementResult {
        alpha: 1.0 - d_o / d_e,
        observed_disagreement: d_o,
        expected_disagreement: d_e,
        n_pairable: n.round() as usize,
    })
}

pub fn read_wide_csv(path: &Path) -> Result<AnnotationMatrix> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_wide_csv(file, path)
}

/// Parses `doc_id,<annotator_1>,<annotator_2>,...`; empty cells are missing.
pub fn parse_wide_csv<R: Read>(reader: R, path: &Path) -> Result<AnnotationMatrix> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.get(0) != Some("doc_id") {
        return Err(Error::Malformed {
            path: path.into(),
            line: 1,
            message: "first column must be `doc_id`".into(),
        });
    }
    let annotators: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    let mut items = Vec::new();
    let mut labels = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        items.push(rec[0].to_string());
        labels.push(
            rec.iter()
                .skip(1)
                .map(|c| Some(c.to_string()).filter(|s| !s.is_empty()))
                .collect(),
        );
    }
    AnnotationMatrix::new(items, annotators, labels)
}
