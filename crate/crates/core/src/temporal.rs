//! Daily counts and proportions of core framing tasks.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::Serialize;

use crate::corpus::{AuthorRole, CorpusManifest, Issue, LabeledCorpus, Month};
use crate::{Error, Result};

/// Event dates marked on the default series.
pub const DEFAULT_EVENTS: [(&str, &str); 3] = [
    ("2018-03-24", "March for Our Lives"),
    ("2018-06-20", "Executive order ending family separation"),
    ("2018-06-24", "Pride parades"),
];

pub const SERIES_HEADER: [&str; 12] = [
    "date",
    "issue",
    "role",
    "n_relevant",
    "n_diagnostic",
    "n_prognostic",
    "n_motivational",
    "prop_diagnostic",
    "prop_prognostic",
    "prop_motivational",
    "missing",
    "event",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DailyRow {
    pub date: NaiveDate,
    pub issue: Issue,
    pub role: Option<AuthorRole>,
    pub n_relevant: u64,
    pub n_diagnostic: u64,
    pub n_prognostic: u64,
    pub n_motivational: u64,
    pub missing: bool,
    pub event: Option<String>,
}

impl DailyRow {
    fn prop(&self, n: u64) -> Option<f64> {
        (self.n_relevant > 0).then(|| n as f64 / self.n_relevant as f64)
    }

    pub fn prop_diagnostic(&self) -> Option<f64> {
        self.prop(self.n_diagnostic)
    }

    pub fn prop_prognostic(&self) -> Option<f64> {
        self.prop(self.n_prognostic)
    }

    pub fn prop_motivational(&self) -> Option<f64> {
        self.prop(self.n_motivational)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DailySeries {
    /// Sorted by issue, role, then date.
    pub rows: Vec<DailyRow>,
    pub warnings: Vec<String>,
}

type Key = (Issue, Option<AuthorRole>, NaiveDate);

#[derive(Default, Clone, Copy)]
struct Tally {
    n: u64,
    diagnostic: u64,
    prognostic: u64,
    motivational: u64,
}

/// One row per day of each issue's months (from the manifest, or the months
/// observed in the corpus when none is given), optionally split by author role.
/// Relevant messages dated outside the span still get a row, with a warning.
pub fn aggregate_daily(
    corpus: &LabeledCorpus,
    manifest: Option<&CorpusManifest>,
    by_role: bool,
) -> DailySeries {
    let mut tallies: BTreeMap<Key, Tally> = BTreeMap::new();
    let mut observed: BTreeMap<Issue, BTreeSet<Month>> = BTreeMap::new();
    for r in corpus.relevant() {
        let date = r.doc.date();
        let role = by_role.then_some(r.doc.author_role);
        let t = tallies.entry((r.doc.issue, role, date)).or_default();
        t.n += 1;
        t.diagnostic += u64::from(r.labels.diagnostic);
        t.prognostic += u64::from(r.labels.prognostic);
        t.motivational += u64::from(r.labels.motivational);
        observed.entry(r.doc.issue).or_default().insert(Month::of(date));
    }

    let span: BTreeMap<Issue, BTreeSet<Month>> = match manifest {
        Some(m) => Issue::ALL
            .iter()
            .map(|&i| (i, m.months(i)))
            .filter(|(_, months)| !months.is_empty())
            .collect(),
        None => observed,
    };
    let roles: Vec<Option<AuthorRole>> = if by_role {
        AuthorRole::ALL.iter().copied().map(Some).collect()
    } else {
        vec![None]
    };

    let mut warnings = Vec::new();
    let mut keys: BTreeSet<Key> = BTreeSet::new();
    for (&issue, months) in &span {
        for &role in &roles {
            for m in months {
                keys.extend(m.days().map(|d| (issue, role, d)));
            }
        }
    }
    for (&(issue, role, date), t) in &tallies {
        if !keys.contains(&(issue, role, date)) {
            warnings.push(format!(
                "{} relevant {issue} message(s) dated {date} fall outside the collection span",
                t.n
            ));
            keys.insert((issue, role, date));
        }
    }

    let rows = keys
        .into_iter()
        .map(|(issue, role, date)| {
            let t = tallies.get(&(issue, role, date)).copied().unwrap_or_default();
            DailyRow {
                date,
                issue,
                role,
                n_relevant: t.n,
                n_diagnostic: t.diagnostic,
                n_prognostic: t.prognostic,
                n_motivational: t.motivational,
                missing: t.n == 0,
                event: None,
            }
        })
        .collect();
    DailySeries { rows, warnings }
}

/// Flags rows on each event date. Several events on one date are joined
/// with `; `.
pub fn mark_events(mut series: DailySeries, events: &[(NaiveDate, String)]) -> Result<DailySeries> {
    if events.is_empty() {
        return Ok(series);
    }
    let (Some(start), Some(end)) = (
        series.rows.iter().map(|r| r.date).min(),
        series.rows.iter().map(|r| r.date).max(),
    ) else {
        return Err(Error::Empty("cannot mark events on an empty series".into()));
    };
    let mut by_date: BTreeMap<NaiveDate, Vec<&str>> = BTreeMap::new();
    for (date, label) in events {
        if *date < start || *date > end {
            return Err(Error::EventOutOfSpan {
                date: date.to_string(),
                start: start.to_string(),
                end: end.to_string(),
            });
        }
        by_date.entry(*date).or_default().push(label);
    }
    for row in &mut series.rows {
        if let Some(labels) = by_date.get(&row.date) {
            row.event = Some(labels.join("; "));
        }
    }
    Ok(series)
}

pub fn default_events() -> Vec<(NaiveDate, String)> {
    DEFAULT_EVENTS
        .iter()
        .map(|(d, l)| (d.parse().expect("valid default date"), l.to_string()))
        .collect()
}

/// Events from a `date,label` CSV.
pub fn read_events(path: &Path) -> Result<Vec<(NaiveDate, String)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_events(file, path)
}

pub fn parse_events<R: Read>(reader: R, path: &Path) -> Result<Vec<(NaiveDate, String)>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    if rdr.headers()?.iter().collect::<Vec<_>>() != ["date", "label"] {
        return Err(Error::Malformed {
            path: path.into(),
            line: 1,
            message: "header must be `date,label`".into(),
        });
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let date = rec[0].parse().map_err(|e| Error::Malformed {
            path: path.into(),
            line: i + 2,
            message: format!("bad date `{}`: {e}", &rec[0]),
        })?;
        out.push((date, rec[1].to_string()));
    }
    Ok(out)
}

pub fn write_series<W: Write>(out: W, series: &DailySeries) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SERIES_HEADER)?;
    let opt = |p: Option<f64>| p.map(|v| v.to_string()).unwrap_or_default();
    for r in &series.rows {
        w.write_record([
            r.date.to_string(),
            r.issue.to_string(),
            r.role.map(|x| x.to_string()).unwrap_or_default(),
            r.n_relevant.to_string(),
            r.n_diagnostic.to_string(),
            r.n_prognostic.to_string(),
            r.n_motivational.to_string(),
            opt(r.prop_diagnostic()),
            opt(r.prop_prognostic()),
            opt(r.prop_motivational()),
            r.missing.to_string(),
            r.event.clone().unwrap_or_default(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(Path::new("<output>"), e))?;
    Ok(())
}
