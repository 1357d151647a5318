use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{FeatureConfig, Task, Vectorizer};
use crate::corpus::{LabelSet, LabeledDoc, Stance};
use crate::stats::sigmoid;
use crate::{Error, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    /// L2 penalty on weights (the intercept is not penalized).
    pub l2: f64,
    /// Number of full-batch gradient epochs.
    pub epochs: usize,
    /// Initial step size; adapted by backtracking.
    pub step: f64,
}

impl Default for HyperParams {
    fn default() -> Self {
        HyperParams {
            l2: 1e-3,
            epochs: 300,
            step: 4.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub features: FeatureConfig,
    pub hyper: HyperParams,
}

impl TrainConfig {
    /// FNV-1a digest of the canonical JSON form of the config.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let h = json.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
            (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
        });
        format!("{h:016x}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BinaryHead {
    Logistic { weights: Vec<f64>, bias: f64 },
    /// Label never (or always) positive in training.
    Constant { probability: f64 },
}

impl BinaryHead {
    fn probability(&self, x: &[u32]) -> f64 {
        match self {
            BinaryHead::Logistic { weights, bias } => {
                sigmoid(bias + x.iter().map(|&j| weights[j as usize]).sum::<f64>())
            }
            BinaryHead::Constant { probability } => *probability,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultinomialHead {
    /// One weight row per class.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl MultinomialHead {
    fn logits(&self, x: &[u32]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(w, b)| b + x.iter().map(|&j| w[j as usize]).sum::<f64>())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Heads {
    Binary(Vec<BinaryHead>),
    Multinomial(MultinomialHead),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub format_version: u32,
    pub task: Task,
    pub labels: Vec<String>,
    pub config: TrainConfig,
    pub config_hash: String,
    pub seed: u64,
    pub n_train: usize,
    pub vectorizer: Vectorizer,
    pub heads: Heads,
}

impl Model {
    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer(out, self)?;
        Ok(())
    }

    pub fn read_json<R: Read>(reader: R) -> Result<Self> {
        let mut m: Model = serde_json::from_reader(reader)?;
        if m.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::IncompatibleModel(format!(
                "format version {} (expected {MODEL_FORMAT_VERSION})",
                m.format_version
            )));
        }
        if m.config.hash() != m.config_hash {
            return Err(Error::IncompatibleModel("config hash does not match config".into()));
        }
        let v = std::mem::replace(
            &mut m.vectorizer,
            Vectorizer::from_vocabulary(Vec::new(), FeatureConfig::default()),
        );
        m.vectorizer = Vectorizer::from_vocabulary(v.vocabulary, v.config);
        let dim = m.vectorizer.dim();
        let ok = match &m.heads {
            Heads::Binary(hs) => {
                hs.len() == m.labels.len()
                    && hs.iter().all(|h| match h {
                        BinaryHead::Logistic { weights, .. } => weights.len() == dim,
                        BinaryHead::Constant { .. } => true,
                    })
            }
            Heads::Multinomial(h) => {
                h.weights.len() == m.labels.len() && h.weights.iter().all(|w| w.len() == dim)
            }
        };
        if !ok {
            return Err(Error::IncompatibleModel(
                "weight dimensions do not match vocabulary and labels".into(),
            ));
        }
        Ok(m)
    }
}

/// Per-label training diagnostics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainReport {
    /// Objective value after each accepted epoch, per head.
    pub loss_traces: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

struct Objective<'a> {
    rows: &'a [Vec<u32>],
    dim: usize,
    l2: f64,
}

impl Objective<'_> {
    fn penalty(&self, w: &[f64]) -> f64 {
        0.5 * self.l2 * w.iter().map(|v| v * v).sum::<f64>()
    }

    fn binary_loss(&self, y: &[bool], w: &[f64], b: f64) -> f64 {
        let n = self.rows.len() as f64;
        let data: f64 = self
            .rows
            .iter()
            .zip(y)
            .map(|(x, &yi)| {
                let z = b + x.iter().map(|&j| w[j as usize]).sum::<f64>();
                softplus(z) - if yi { z } else { 0.0 }
            })
            .sum();
        data / n + self.penalty(w)
    }

    fn binary_grad(&self, y: &[bool], w: &[f64], b: f64) -> (Vec<f64>, f64) {
        let n = self.rows.len() as f64;
        let mut gw = vec![0.0; self.dim];
        let mut gb = 0.0;
        for (x, &yi) in self.rows.iter().zip(y) {
            let z = b + x.iter().map(|&j| w[j as usize]).sum::<f64>();
            let r = sigmoid(z) - f64::from(u8::from(yi));
            gb += r;
            for &j in x {
                gw[j as usize] += r;
            }
        }
        for (g, wj) in gw.iter_mut().zip(w) {
            *g = *g / n + self.l2 * wj;
        }
        (gw, gb / n)
    }

    fn multi_loss(&self, y: &[usize], w: &[Vec<f64>], b: &[f64]) -> f64 {
        let n = self.rows.len() as f64;
        let data: f64 = self
            .rows
            .iter()
            .zip(y)
            .map(|(x, &yi)| {
                let z: Vec<f64> = w
                    .iter()
                    .zip(b)
                    .map(|(wc, bc)| bc + x.iter().map(|&j| wc[j as usize]).sum::<f64>())
                    .collect();
                log_sum_exp(&z) - z[yi]
            })
            .sum();
        data / n + w.iter().map(|wc| self.penalty(wc)).sum::<f64>()
    }

    fn multi_grad(&self, y: &[usize], w: &[Vec<f64>], b: &[f64]) -> (Vec<Vec<f64>>, Vec<f64>) {
        let n = self.rows.len() as f64;
        let k = w.len();
        let mut gw = vec![vec![0.0; self.dim]; k];
        let mut gb = vec![0.0; k];
        for (x, &yi) in self.rows.iter().zip(y) {
            let z: Vec<f64> = w
                .iter()
                .zip(b)
                .map(|(wc, bc)| bc + x.iter().map(|&j| wc[j as usize]).sum::<f64>())
                .collect();
            let lse = log_sum_exp(&z);
            for c in 0..k {
                let r = (z[c] - lse).exp() - if c == yi { 1.0 } else { 0.0 };
                gb[c] += r;
                for &j in x {
                    gw[c][j as usize] += r;
                }
            }
        }
        for c in 0..k {
            for (g, wj) in gw[c].iter_mut().zip(&w[c]) {
                *g = *g / n + self.l2 * wj;
            }
            gb[c] /= n;
        }
        (gw, gb)
    }
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn log_sum_exp(z: &[f64]) -> f64 {
    let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + z.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// Backtracking gradient descent over a flat parameter vector. Each epoch
/// either lowers the objective or halves the step until it does, so the
/// recorded losses never increase.
fn descend(
    mut params: Vec<f64>,
    hyper: &HyperParams,
    loss: impl Fn(&[f64]) -> f64,
    grad: impl Fn(&[f64]) -> Vec<f64>,
) -> (Vec<f64>, Vec<f64>) {
    let mut step = hyper.step;
    let mut current = loss(&params);
    let mut trace = vec![current];
    for _ in 0..hyper.epochs {
        let g = grad(&params);
        let gnorm2: f64 = g.iter().map(|v| v * v).sum();
        if gnorm2 < 1e-20 {
            break;
        }
        let mut accepted = false;
        for _ in 0..60 {
            let candidate: Vec<f64> = params.iter().zip(&g).map(|(p, gi)| p - step * gi).collect();
            let l = loss(&candidate);
            // Armijo sufficient-decrease condition.
            if l <= current - 0.5 * step * gnorm2 {
                params = candidate;
                current = l;
                accepted = true;
                step *= 1.25;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        trace.push(current);
    }
    (params, trace)
}

fn train_rows<'a>(records: &[&'a LabeledDoc]) -> Vec<&'a str> {
    records.iter().map(|r| r.doc.text.as_str()).collect()
}

/// Fits one head per label (or one multinomial head for stance) on the
/// eligible records. The optimizer is full-batch and starts from zero, so the
/// result depends only on the data and config; `seed` is recorded for
/// provenance.
pub fn train(records: &[LabeledDoc], task: Task, config: &TrainConfig, seed: u64) -> Result<(Model, TrainReport)> {
    let eligible = task.eligible(records);
    if eligible.is_empty() {
        return Err(Error::Empty(format!("training set for task {task}")));
    }
    let vectorizer = Vectorizer::fit(train_rows(&eligible), config.features.clone());
    let rows: Vec<Vec<u32>> = eligible.iter().map(|r| vectorizer.transform(&r.doc.text)).collect();
    let dim = vectorizer.dim();
    let obj = Objective {
        rows: &rows,
        dim,
        l2: config.hyper.l2,
    };
    let mut report = TrainReport::default();
    let labels: Vec<String> = task.labels().iter().map(|s| s.to_string()).collect();

    let heads = if task.is_multiclass() {
        let y: Vec<usize> = eligible
            .iter()
            .map(|r| r.labels.stance.expect("eligible stance").index())
            .collect();
        let k = labels.len();
        for (c, name) in labels.iter().enumerate() {
            if !y.contains(&c) {
                report.warnings.push(format!("class `{name}` absent from training data"));
            }
        }
        let unflatten = |p: &[f64]| -> (Vec<Vec<f64>>, Vec<f64>) {
            let w = (0..k).map(|c| p[c * dim..(c + 1) * dim].to_vec()).collect();
            (w, p[k * dim..].to_vec())
        };
        let (params, trace) = descend(
            vec![0.0; k * dim + k],
            &config.hyper,
            |p| {
                let (w, b) = unflatten(p);
                obj.multi_loss(&y, &w, &b)
            },
            |p| {
                let (w, b) = unflatten(p);
                let (gw, gb) = obj.multi_grad(&y, &w, &b);
                gw.into_iter().flatten().chain(gb).collect()
            },
        );
        report.loss_traces.push(trace);
        let (weights, bias) = unflatten(&params);
        Heads::Multinomial(MultinomialHead { weights, bias })
    } else {
        let mut heads = Vec::with_capacity(labels.len());
        for (li, name) in labels.iter().enumerate() {
            let y: Vec<bool> = eligible.iter().map(|r| task.indicators(&r.labels)[li]).collect();
            let positives = y.iter().filter(|v| **v).count();
            if positives == 0 || positives == y.len() {
                let probability = if positives == 0 { 0.0 } else { 1.0 };
                report.warnings.push(format!(
                    "label `{name}` is {} in training data; using a constant predictor",
                    if positives == 0 { "never positive" } else { "always positive" }
                ));
                report.loss_traces.push(Vec::new());
                heads.push(BinaryHead::Constant { probability });
                continue;
            }
            let (params, trace) = descend(
                vec![0.0; dim + 1],
                &config.hyper,
                |p| obj.binary_loss(&y, &p[..dim], p[dim]),
                |p| {
                    let (mut gw, gb) = obj.binary_grad(&y, &p[..dim], p[dim]);
                    gw.push(gb);
                    gw
                },
            );
            report.loss_traces.push(trace);
            heads.push(BinaryHead::Logistic {
                weights: params[..dim].to_vec(),
                bias: params[dim],
            });
        }
        Heads::Binary(heads)
    };

    let model = Model {
        format_version: MODEL_FORMAT_VERSION,
        task,
        labels,
        config: config.clone(),
        config_hash: config.hash(),
        seed,
        n_train: eligible.len(),
        vectorizer,
        heads,
    };
    Ok((model, report))
}

/// Predicted labels and probabilities for one document and one task.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub doc_id: String,
    /// One indicator per task label (exactly one set for stance).
    pub values: Vec<bool>,
    pub probabilities: Vec<f64>,
}

/// Binary labels are positive when `p >= threshold`; stance takes the
/// argmax of the logits, ties going to the earliest class in
/// `progressive, conservative, neutral` order.
pub fn predict<'a, I>(model: &Model, docs: I, threshold: f64) -> Vec<Prediction>
where
    I: IntoIterator<Item = (&'a str, &'a str)>,
{
    docs.into_iter()
        .map(|(id, text)| {
            let x = model.vectorizer.transform(text);
            let (values, probabilities) = match &model.heads {
                Heads::Binary(heads) => {
                    let p: Vec<f64> = heads.iter().map(|h| h.probability(&x)).collect();
                    (p.iter().map(|&pi| pi >= threshold).collect(), p)
                }
                Heads::Multinomial(head) => {
                    let z = head.logits(&x);
                    let mut best = 0;
                    for c in 1..z.len() {
                        if z[c] > z[best] {
                            best = c;
                        }
                    }
                    let lse = log_sum_exp(&z);
                    let p = z.iter().map(|v| (v - lse).exp()).collect();
                    ((0..z.len()).map(|c| c == best).collect(), p)
                }
            };
            Prediction {
                doc_id: id.to_string(),
                values,
                probabilities,
            }
        })
        .collect()
}

/// Document id, merged labels, and every head's probability by column name.
pub type MergedRow = (String, LabelSet, BTreeMap<String, f64>);

/// Combines per-task predictions into inferred label sets, in `doc_ids`
/// order. Without a relevance model every document is treated as relevant;
/// when one is given, stance and frames of predicted-irrelevant documents
/// are cleared (their probabilities are still reported).
pub fn merge_predictions(
    doc_ids: &[String],
    per_task: &[(Task, &[Prediction])],
) -> Result<Vec<MergedRow>> {
    let mut rows: Vec<MergedRow> = doc_ids
        .iter()
        .map(|id| {
            (
                id.clone(),
                LabelSet {
                    relevant: true,
                    ..LabelSet::default()
                },
                BTreeMap::new(),
            )
        })
        .collect();
    let position: BTreeMap<&str, usize> = doc_ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    for (task, preds) in per_task {
        for p in preds.iter() {
            let &i = position.get(p.doc_id.as_str()).ok_or_else(|| {
                Error::IdMismatch(format!("prediction for unknown document `{}`", p.doc_id))
            })?;
            let (_, labels, probs) = &mut rows[i];
            for (li, name) in task.labels().iter().enumerate() {
                probs.insert(format!("p_{name}"), p.probabilities[li]);
            }
            match task {
                Task::Stance => {
                    labels.stance = p.values.iter().position(|v| *v).map(|c| Stance::ALL[c]);
                }
                _ => {
                    for (name, &v) in task.labels().iter().zip(&p.values) {
                        labels.set_flag(name, v);
                    }
                }
            }
        }
    }
    for (_, labels, _) in &mut rows {
        if !labels.relevant {
            *labels = LabelSet::default();
        }
    }
    Ok(rows)
}
