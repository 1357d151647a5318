mod align;
mod classify;
mod data;
mod lexstats;
mod regress;
mod temporal;

pub use align::align;
pub use classify::{crossval, evaluate, predict, train};
pub use data::{agreement, ingest, stats, validate};
pub use lexstats::lexstats;
pub use regress::regress;
pub use temporal::temporal;

use anyhow::Result;
use frameforge_core::corpus::{ingest_documents, ingest_labels, Corpus, IngestOptions, LabelKind, LabeledCorpus};

use crate::args::{DocsArgs, LabeledArgs};
use crate::run::Run;

pub(crate) fn load_docs(run: &mut Run, args: &DocsArgs) -> Result<Corpus> {
    let (corpus, report) = ingest_documents(
        run.input(&args.docs)?,
        IngestOptions {
            lenient: args.lenient,
        },
    )?;
    for r in &report.rejected {
        eprintln!("warning: {}:{}: skipped: {}", args.docs.display(), r.line, r.reason);
    }
    Ok(corpus)
}

pub(crate) fn load_labeled(run: &mut Run, args: &LabeledArgs, default: LabelKind) -> Result<LabeledCorpus> {
    let corpus = load_docs(run, &args.docs)?;
    let kind = args.label_kind.map(LabelKind::from).unwrap_or(default);
    let (labeled, report) = ingest_labels(run.input(&args.labels)?, kind, &corpus)?;
    if !report.warnings.is_empty() {
        eprintln!(
            "warning: {} label rows break the coding logic (see `validate`)",
            report.warnings.len()
        );
    }
    Ok(labeled)
}

/// CSV bytes from a header and string rows.
pub(crate) fn csv_bytes<I, R>(header: &[&str], rows: I) -> Result<Vec<u8>>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    Ok(w.into_inner()?)
}
