use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::Serialize;

use super::{Activity, Issue};
use crate::{Error, Result};

/// A calendar month, written `YYYY-MM`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Month {
    pub year: i32,
    pub month: u32,
}

impl Month {
    pub fn of(date: NaiveDate) -> Self {
        Month {
            year: date.year(),
            month: date.month(),
        }
    }

    pub fn first_day(self) -> NaiveDate {
        NaiveDate::from_ymd_opt(self.year, self.month, 1).expect("valid month")
    }

    pub fn days(self) -> impl Iterator<Item = NaiveDate> {
        let first = self.first_day();
        first
            .iter_days()
            .take_while(move |d| d.month() == first.month())
    }
}

impl fmt::Display for Month {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for Month {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let bad = || format!("invalid month `{s}` (expected YYYY-MM)");
        let (y, m) = s.trim().split_once('-').ok_or_else(bad)?;
        let year: i32 = y.parse().map_err(|_| bad())?;
        let month: u32 = m.parse().map_err(|_| bad())?;
        if !(1..=12).contains(&month) || y.len() != 4 {
            return Err(bad());
        }
        Ok(Month { year, month })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestRow {
    pub issue: Issue,
    pub activity: Activity,
    pub month: Month,
    pub count: u64,
}

/// Declared collection months and tweet counts.
#[derive(Debug, Clone, Default)]
pub struct CorpusManifest {
    rows: Vec<ManifestRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ManifestSummary {
    pub per_issue: BTreeMap<Issue, u64>,
    pub total: u64,
}

impl CorpusManifest {
    pub fn new(rows: Vec<ManifestRow>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for r in &rows {
            if !seen.insert((r.issue, r.month)) {
                return Err(Error::DuplicateManifestRow {
                    path: "<memory>".into(),
                    issue: r.issue.to_string(),
                    month: r.month.to_string(),
                });
            }
        }
        Ok(CorpusManifest { rows })
    }

    pub fn rows(&self) -> &[ManifestRow] {
        &self.rows
    }

    pub fn months(&self, issue: Issue) -> BTreeSet<Month> {
        self.rows
            .iter()
            .filter(|r| r.issue == issue)
            .map(|r| r.month)
            .collect()
    }

    pub fn covers(&self, issue: Issue, date: NaiveDate) -> bool {
        self.rows
            .iter()
            .any(|r| r.issue == issue && r.month == Month::of(date))
    }

    /// Sums declared counts per issue and overall.
    pub fn summarize(&self) -> ManifestSummary {
        let mut summary = ManifestSummary::default();
        for r in &self.rows {
            *summary.per_issue.entry(r.issue).or_default() += r.count;
            summary.total += r.count;
        }
        summary
    }
}

pub fn ingest_manifest(path: &Path) -> Result<CorpusManifest> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_manifest(file, path)
}

pub fn parse_manifest<R: Read>(reader: R, path: &Path) -> Result<CorpusManifest> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let expected = ["issue", "activity", "month", "count"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::Malformed {
            path: path.into(),
            line: 1,
            message: format!("header must be `{}`", expected.join(",")),
        });
    }
    let mut rows = Vec::new();
    let mut seen: BTreeMap<(Issue, Month), usize> = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec?;
        let malformed = |message: String| Error::Malformed {
            path: path.into(),
            line,
            message,
        };
        let issue: Issue = rec[0].parse().map_err(malformed)?;
        let activity: Activity = rec[1].parse().map_err(malformed)?;
        let month: Month = rec[2].parse().map_err(malformed)?;
        let count: u64 = rec[3]
            .replace(',', "")
            .parse()
            .map_err(|_| malformed(format!("count must be a non-negative integer, got `{}`", &rec[3])))?;
        if seen.insert((issue, month), line).is_some() {
            return Err(Error::DuplicateManifestRow {
                path: path.into(),
                issue: issue.to_string(),
                month: month.to_string(),
            });
        }
        rows.push(ManifestRow {
            issue,
            activity,
            month,
            count,
        });
    }
    Ok(CorpusManifest { rows })
}
