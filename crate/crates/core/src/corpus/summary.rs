use std::collections::BTreeMap;

use super::{Issue, LabeledCorpus, LabelSet, Stance, FRAME_FIELDS};
use crate::{Error, Result};

/// Histogram of how many core framing tasks (0..=3) each relevant tweet carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FrameCountHistogram(pub [u64; 4]);

impl FrameCountHistogram {
    pub fn add(&mut self, labels: &LabelSet) {
        self.0[labels.core_task_count()] += 1;
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    /// Mean number of tasks per tweet; `None` for an empty histogram.
    pub fn mean(&self) -> Option<f64> {
        let n = self.total();
        if n == 0 {
            return None;
        }
        let weighted: u64 = self.0.iter().enumerate().map(|(k, c)| k as u64 * c).sum();
        Some(weighted as f64 / n as f64)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IssueStats {
    pub n_documents: u64,
    pub n_relevant: u64,
    pub stance: BTreeMap<Stance, u64>,
    /// Counts of each boolean frame field among relevant tweets.
    pub frames: BTreeMap<&'static str, u64>,
    pub frame_counts: FrameCountHistogram,
}

impl IssueStats {
    fn add(&mut self, labels: &LabelSet) {
        self.n_documents += 1;
        if !labels.relevant {
            return;
        }
        self.n_relevant += 1;
        if let Some(s) = labels.stance {
            *self.stance.entry(s).or_default() += 1;
        }
        for field in FRAME_FIELDS {
            if labels.flag(field) == Some(true) {
                *self.frames.entry(field).or_default() += 1;
            }
        }
        self.frame_counts.add(labels);
    }

    pub fn relevance_rate(&self) -> f64 {
        self.n_relevant as f64 / self.n_documents as f64
    }

    /// `(metric, value)` pairs in a fixed order for tabular output.
    pub fn metrics(&self) -> Vec<(String, f64)> {
        let mut m = vec![
            ("n_documents".to_string(), self.n_documents as f64),
            ("n_relevant".to_string(), self.n_relevant as f64),
            ("relevance_rate".to_string(), self.relevance_rate()),
        ];
        for s in Stance::ALL {
            m.push((
                format!("stance_{s}"),
                self.stance.get(s).copied().unwrap_or(0) as f64,
            ));
        }
        for field in FRAME_FIELDS {
            m.push((field.to_string(), self.frames.get(field).copied().unwrap_or(0) as f64));
        }
        for (k, c) in self.frame_counts.0.iter().enumerate() {
            m.push((format!("frame_count_{k}"), *c as f64));
        }
        if let Some(mean) = self.frame_counts.mean() {
            m.push(("frame_count_mean".to_string(), mean));
        }
        m
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StatsReport {
    pub per_issue: BTreeMap<Issue, IssueStats>,
    pub overall: IssueStats,
}

/// Label prevalence per issue and the distribution of core-task counts.
pub fn dataset_stats(corpus: &LabeledCorpus) -> Result<StatsReport> {
    if corpus.is_empty() {
        return Err(Error::Empty("labeled corpus".into()));
    }
    let mut report = StatsReport::default();
    for r in corpus.iter() {
        report.per_issue.entry(r.doc.issue).or_default().add(&r.labels);
        report.overall.add(&r.labels);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Activity, AuthorRole, Document, LabelKind, LabeledDoc, TweetType};
    use chrono::{TimeZone, Utc};

    fn doc(i: usize) -> Document {
        Document {
            id: format!("d{i}"),
            text: String::new(),
            timestamp: Utc.with_ymd_and_hms(2018, 3, 1, 0, 0, 0).unwrap(),
            issue: Issue::Guns,
            activity: Activity::High,
            author_role: AuthorRole::Other,
            tweet_type: TweetType::Broadcast,
        }
    }

    fn relevant() -> LabelSet {
        LabelSet {
            relevant: true,
            stance: Some(Stance::Neutral),
            ..Default::default()
        }
    }

    #[test]
    fn ten_doc_fixture() {
        let records = (0..10)
            .map(|i| {
                let mut labels = relevant();
                if i < 4 {
                    labels.problem_id = true;
                    labels = labels.with_derived_tasks();
                }
                LabeledDoc { doc: doc(i), labels }
            })
            .collect();
        let report = dataset_stats(&LabeledCorpus::new(LabelKind::Gold, records)).unwrap();
        let guns = &report.per_issue[&Issue::Guns];
        assert_eq!(guns.frames["diagnostic"], 4);
        assert_eq!(guns.frame_counts.0, [6, 4, 0, 0]);
        assert!((guns.frame_counts.mean().unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(guns.relevance_rate(), 1.0);
    }

    #[test]
    fn one_task_each_gives_mean_one() {
        let records = (0..5)
            .map(|i| {
                let mut labels = relevant();
                labels.solution = true;
                LabeledDoc { doc: doc(i), labels: labels.with_derived_tasks() }
            })
            .collect();
        let report = dataset_stats(&LabeledCorpus::new(LabelKind::Gold, records)).unwrap();
        assert_eq!(report.overall.frame_counts.0, [0, 5, 0, 0]);
        assert_eq!(report.overall.frame_counts.mean(), Some(1.0));
    }

    #[test]
    fn irrelevant_tweets_only_count_as_documents() {
        let records = vec![
            LabeledDoc { doc: doc(0), labels: LabelSet::default() },
            LabeledDoc { doc: doc(1), labels: relevant() },
        ];
        let report = dataset_stats(&LabeledCorpus::new(LabelKind::Gold, records)).unwrap();
        assert_eq!(report.overall.n_documents, 2);
        assert_eq!(report.overall.frame_counts.total(), 1);
        assert_eq!(report.overall.relevance_rate(), 0.5);
        assert!(dataset_stats(&LabeledCorpus::new(LabelKind::Gold, vec![])).is_err());
    }
}
