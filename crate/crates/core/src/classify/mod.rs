//! Baseline multi-label classifier, evaluation metrics and the F1 exclusion
//! rule.
//!
//! Any other model's outputs can enter the analysis stack as an inferred
//! `labels.csv`; this module only supplies a reproducible baseline and the
//! evaluation protocol.

mod cv;
mod metrics;
mod model;
mod vectorize;

pub use cv::{cross_validate, CvReport, CvSummary, FoldReport};
pub use metrics::{
    apply_exclusion_rule, evaluate, metrics_from_matrix, Confusion, LabelMetrics, MetricsReport,
};
pub use model::{
    merge_predictions, MergedRow, predict, train, BinaryHead, Heads, HyperParams, Model, MultinomialHead,
    Prediction, TrainConfig, TrainReport, MODEL_FORMAT_VERSION,
};
pub use vectorize::{FeatureConfig, Vectorizer};

use crate::corpus::{string_enum, LabelSet, LabeledDoc, Stance};

string_enum!(
    /// The four classification problems.
    Task {
        Relevance => "relevance",
        Stance => "stance",
        CoreTasks => "core_tasks",
        FrameElements => "frame_elements",
    }
);

impl Task {
    pub fn labels(self) -> &'static [&'static str] {
        match self {
            Task::Relevance => &["relevant"],
            Task::Stance => &["progressive", "conservative", "neutral"],
            Task::CoreTasks => &["diagnostic", "prognostic", "motivational"],
            Task::FrameElements => &[
                "problem_id",
                "blame",
                "solution",
                "tactics",
                "solidarity",
                "counterframing",
                "motivational_elem",
            ],
        }
    }

    /// Whether the categories are mutually exclusive (one multinomial head).
    pub fn is_multiclass(self) -> bool {
        self == Task::Stance
    }

    /// Relevance is learned on every message; stance and framing only on
    /// relevant ones (and stance only where a stance is coded).
    pub fn is_eligible(self, labels: &LabelSet) -> bool {
        match self {
            Task::Relevance => true,
            Task::Stance => labels.relevant && labels.stance.is_some(),
            Task::CoreTasks | Task::FrameElements => labels.relevant,
        }
    }

    /// One-vs-rest indicator vector of a label set for this task.
    pub fn indicators(self, labels: &LabelSet) -> Vec<bool> {
        match self {
            Task::Stance => Stance::ALL.iter().map(|s| labels.stance == Some(*s)).collect(),
            _ => self
                .labels()
                .iter()
                .map(|l| labels.flag(l).unwrap_or(false))
                .collect(),
        }
    }

    pub(crate) fn eligible(self, records: &[LabeledDoc]) -> Vec<&LabeledDoc> {
        records.iter().filter(|r| self.is_eligible(&r.labels)).collect()
    }
}
