//! Quantitative toolkit for analyzing collective-action framing in
//! social-media corpora.
//!
//! The crate is organized by pipeline stage:
//!
//! - [`corpus`]: documents, gold/inferred labels, CoNLL-U parses, manifests,
//!   dataset statistics and deterministic train/test/fold splits.
//! - [`agreement`]: Krippendorff's alpha for nominal codes.
//! - [`lexstats`]: feature extraction and log-odds ratios with an
//!   informative Dirichlet prior; pronoun-person datasets.
//! - [`classify`]: a baseline bag-of-ngrams logistic classifier, multi-label
//!   evaluation and the F1 exclusion rule.
//! - [`regress`]: logistic regression (Newton/IRLS), Wald tests,
//!   Holm-Bonferroni and average marginal effects.
//! - [`alignment`]: bootstrapped relative entropy between framing-strategy
//!   distributions.
//! - [`temporal`]: daily framing-task series.
//!
//! All stochastic steps draw from [`seed::substream`], so every result is a
//! pure function of its inputs and one master seed.

#![forbid(unsafe_code)]

pub mod agreement;
pub mod alignment;
pub mod classify;
pub mod corpus;
pub mod error;
pub mod lexstats;
pub mod regress;
pub mod seed;
pub mod stats;
pub mod temporal;

pub use error::{Error, Result};
