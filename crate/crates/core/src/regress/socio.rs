use rayon::prelude::*;

use super::design::{Dataset, DesignSpec, FactorSpec};
use super::logit::{fit_logistic, FitOptions, RegressionResult};
use crate::corpus::LabeledCorpus;
use crate::lexstats::{Person, PronounRecord};
use crate::{Error, Result};

/// Binary framing indicators modelled as outcomes.
pub const OUTCOMES: [&str; 8] = [
    "diagnostic",
    "prognostic",
    "motivational",
    "problem_id",
    "blame",
    "solution",
    "tactics",
    "solidarity",
];

pub fn socio_design(outcome: &str, include_stance: bool) -> DesignSpec {
    let mut factors = vec![FactorSpec::new("issue", "guns")];
    if include_stance {
        factors.push(FactorSpec::new("stance", "neutral"));
    }
    factors.extend([
        FactorSpec::new("activity", "average"),
        FactorSpec::new("role", "other"),
        FactorSpec::new("type", "broadcast"),
    ]);
    DesignSpec {
        outcome: outcome.to_string(),
        factors,
    }
}

/// One row per relevant message. With `include_stance`, rows lacking a stance
/// are dropped rather than imputed.
pub fn socio_dataset(corpus: &LabeledCorpus, include_stance: bool) -> Result<Dataset> {
    let rows: Vec<_> = corpus
        .relevant()
        .filter(|r| !include_stance || r.labels.stance.is_some())
        .collect();
    if rows.is_empty() {
        return Err(Error::Empty("no relevant messages to model".into()));
    }
    let mut d = Dataset::new(rows.len());
    let col = |f: &dyn Fn(&crate::corpus::LabeledDoc) -> String| rows.iter().map(|r| f(r)).collect();
    d.add_factor("issue", col(&|r| r.doc.issue.to_string()))?;
    if include_stance {
        d.add_factor(
            "stance",
            col(&|r| r.labels.stance.map(|s| s.to_string()).unwrap_or_default()),
        )?;
    }
    d.add_factor("activity", col(&|r| r.doc.activity.to_string()))?;
    d.add_factor("role", col(&|r| r.doc.author_role.to_string()))?;
    d.add_factor("type", col(&|r| r.doc.tweet_type.to_string()))?;
    for name in OUTCOMES {
        let y = rows
            .iter()
            .map(|r| r.labels.flag(name).expect("known framing field"))
            .collect();
        d.add_outcome(name, y)?;
    }
    Ok(d)
}

fn flag_level(b: bool) -> String {
    if b { "1" } else { "0" }.to_string()
}

/// Pronoun tokens as observations: framing flags ("0"/"1", reference "0")
/// and issue as factors, one outcome per person class.
pub fn pronoun_dataset(records: &[PronounRecord]) -> Result<Dataset> {
    if records.is_empty() {
        return Err(Error::Empty("pronoun dataset is empty".into()));
    }
    let mut d = Dataset::new(records.len());
    d.add_factor("diagnostic", records.iter().map(|r| flag_level(r.diagnostic)).collect())?;
    d.add_factor("prognostic", records.iter().map(|r| flag_level(r.prognostic)).collect())?;
    d.add_factor("motivational", records.iter().map(|r| flag_level(r.motivational)).collect())?;
    d.add_factor("issue", records.iter().map(|r| r.issue.to_string()).collect())?;
    for p in Person::ALL {
        d.add_outcome(p.as_str(), records.iter().map(|r| r.person == *p).collect())?;
    }
    Ok(d)
}

/// One-vs-rest models, one per person class, in `Person::ALL` order.
/// Issue is coded against guns when guns pronouns occur, otherwise against
/// the first issue present.
pub fn fit_pronoun_models(
    records: &[PronounRecord],
    opts: &FitOptions,
) -> Result<Vec<(Person, RegressionResult)>> {
    let data = pronoun_dataset(records)?;
    let mut issues: Vec<&String> = data.factor("issue")?.iter().collect();
    issues.sort();
    let issue_ref = if issues.iter().any(|i| *i == "guns") {
        "guns".to_string()
    } else {
        issues[0].clone()
    };
    let factors = vec![
        FactorSpec::new("diagnostic", "0"),
        FactorSpec::new("prognostic", "0"),
        FactorSpec::new("motivational", "0"),
        FactorSpec::new("issue", &issue_ref),
    ];
    Person::ALL
        .par_iter()
        .map(|&p| {
            let spec = DesignSpec {
                outcome: p.as_str().to_string(),
                factors: factors.clone(),
            };
            fit_logistic(&data, &spec, opts).map(|r| (p, r))
        })
        .collect()
}
