use anyhow::Result;
use frameforge_core::corpus::{ingest_manifest, LabelKind};
use frameforge_core::temporal::{aggregate_daily, default_events, mark_events, read_events, write_series};

use super::load_labeled;
use crate::args::TemporalArgs;
use crate::run::Run;

pub fn temporal(run: &mut Run, args: &TemporalArgs) -> Result<()> {
    let labeled = load_labeled(run, &args.data, LabelKind::Inferred)?;
    let manifest = match &args.manifest {
        Some(p) => Some(ingest_manifest(run.input(p)?)?),
        None => None,
    };
    let series = aggregate_daily(&labeled, manifest.as_ref(), args.by_role);
    for w in &series.warnings {
        eprintln!("warning: {w}");
    }
    let series = if args.no_events {
        series
    } else if let Some(path) = &args.events {
        let events = read_events(run.input(path)?)?;
        mark_events(series, &events)?
    } else {
        let dates: std::collections::BTreeSet<_> = series.rows.iter().map(|r| r.date).collect();
        let events: Vec<_> = default_events().into_iter().filter(|(d, _)| dates.contains(d)).collect();
        mark_events(series, &events)?
    };
    let mut bytes = Vec::new();
    write_series(&mut bytes, &series)?;
    run.emit("temporal.csv", &bytes)
}
