use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: duplicate id `{id}` on lines {first} and {second}")]
    DuplicateId {
        path: PathBuf,
        id: String,
        first: usize,
        second: usize,
    },

    #[error("{path}:{line}: unknown document id `{id}`")]
    UnknownDocId {
        path: PathBuf,
        line: usize,
        id: String,
    },

    #[error("{path}:{line}: gold label for `{id}` violates coding logic: {violation}")]
    GoldConsistency {
        path: PathBuf,
        line: usize,
        id: String,
        violation: String,
    },

    #[error("{path}:{line}: expected 10 tab-separated columns, found {found}")]
    ColumnCount {
        path: PathBuf,
        line: usize,
        found: usize,
    },

    #[error(
        "{path}:{line}: head {head} of token {token} is out of range for sentence {sentence} with {len} tokens"
    )]
    HeadOutOfRange {
        path: PathBuf,
        line: usize,
        sentence: usize,
        token: u32,
        head: u32,
        len: usize,
    },

    #[error("{path}: sentence {sentence} has no `# doc_id =` comment")]
    MissingDocId { path: PathBuf, sentence: usize },

    #[error("{path}: duplicate manifest row for ({issue}, {month})")]
    DuplicateManifestRow {
        path: PathBuf,
        issue: String,
        month: String,
    },

    #[error("{0}")]
    InvalidInput(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("corpus of {size} items cannot be split into a {test_fraction} test set and {k} folds")]
    CorpusTooSmall {
        size: usize,
        k: usize,
        test_fraction: f64,
    },

    #[error("agreement undefined: {0}")]
    AgreementUndefined(String),

    #[error("document ids differ between gold and predicted labels: {0}")]
    IdMismatch(String),

    #[error("outcome `{0}` has a single class")]
    SingleClass(String),

    #[error("logistic fit did not converge after {iterations} iterations (gradient max-norm {grad_norm:e})")]
    NotConverged { iterations: usize, grad_norm: f64 },

    #[error("quasi-complete separation: |beta| for `{column}` exceeded {limit}")]
    QuasiSeparation { column: String, limit: f64 },

    #[error("information matrix is singular; check for collinear or empty levels")]
    Singular,

    #[error("distributions have different supports ({0} vs {1})")]
    SupportMismatch(usize, usize),

    #[error("event date {date} lies outside the series span {start}..={end}")]
    EventOutOfSpan {
        date: String,
        start: String,
        end: String,
    },

    #[error("model is incompatible: {0}")]
    IncompatibleModel(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
