mod args;
mod commands;
mod config;
mod run;

use std::fs;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;

use args::{Cli, Command};
use run::{digest_file, Run, RunManifest};

enum Failure {
    Usage(clap::Error),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

fn execute(raw: Vec<String>) -> Result<(), Failure> {
    let argv = config::expand(raw).map_err(|e| {
        Failure::Usage(clap::Error::raw(clap::error::ErrorKind::InvalidValue, format!("{e:#}\n")))
    })?;
    let cli = Cli::try_parse_from(&argv).map_err(Failure::Usage)?;
    if let Some(n) = cli.jobs {
        // A pool may already exist when replay re-enters; keep it.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    frameforge_core::lexstats::check_lexicons().map_err(anyhow::Error::from)?;

    if let Command::Replay(r) = &cli.command {
        return replay(&r.manifest, &cli.out).map_err(Failure::Data);
    }
    let mut run = Run::new(&cli.out, cli.command.name(), config::recorded_argv(&argv))?;
    match &cli.command {
        Command::Ingest(a) => commands::ingest(&mut run, a),
        Command::Validate(a) => commands::validate(&mut run, a),
        Command::Stats(a) => commands::stats(&mut run, a),
        Command::Agreement(a) => commands::agreement(&mut run, a),
        Command::Lexstats(a) => commands::lexstats(&mut run, a),
        Command::Train(a) => commands::train(&mut run, a),
        Command::Predict(a) => commands::predict(&mut run, a),
        Command::Evaluate(a) => commands::evaluate(&mut run, a),
        Command::Crossval(a) => commands::crossval(&mut run, a),
        Command::Regress(a) => commands::regress(&mut run, a),
        Command::Align(a) => commands::align(&mut run, a),
        Command::Temporal(a) => commands::temporal(&mut run, a),
        Command::Replay(_) => unreachable!(),
    }?;
    run.finish()?;
    Ok(())
}

/// Re-runs a recorded command into `out` after checking that its inputs are
/// unchanged, then compares every output digest with the record.
fn replay(manifest_path: &std::path::Path, out: &std::path::Path) -> Result<()> {
    let text = fs::read_to_string(manifest_path)
        .with_context(|| format!("reading {}", manifest_path.display()))?;
    let recorded: RunManifest =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", manifest_path.display()))?;
    for input in &recorded.inputs {
        let now = digest_file(input.path.as_ref())?;
        if now != input.sha256 {
            bail!("input {} changed since the recorded run", input.path);
        }
    }
    if recorded.version != run::VERSION {
        eprintln!(
            "warning: recorded with version {}, replaying with {}",
            recorded.version,
            run::VERSION
        );
    }
    let mut argv = vec![run::TOOL.to_string()];
    argv.extend(recorded.argv.iter().cloned());
    argv.push("--out".into());
    argv.push(out.display().to_string());
    match execute(argv) {
        Ok(()) => {}
        Err(Failure::Usage(e)) => bail!("recorded arguments no longer parse: {e}"),
        Err(Failure::Data(e)) => return Err(e.context("replayed run failed")),
    }
    let mut mismatched = Vec::new();
    for o in &recorded.outputs {
        if digest_file(&out.join(&o.path))? != o.sha256 {
            mismatched.push(o.path.clone());
        }
    }
    if !mismatched.is_empty() {
        bail!("replay differs from the record in: {}", mismatched.join(", "));
    }
    eprintln!("replay: {} outputs identical", recorded.outputs.len());
    Ok(())
}

fn main() -> ExitCode {
    match execute(std::env::args().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            let _ = e.print();
            ExitCode::from(e.exit_code() as u8)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
