//! Config files: flat `key = value` lines whose keys are long flag names.
//! Values are spliced into argv unless the flag already appears there, so
//! flags override the file and the file overrides built-in defaults.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::{Arg, CommandFactory};

use crate::args::Cli;

const GLOBAL_WITH_VALUE: [&str; 3] = ["--out", "--config", "--jobs"];

fn parse_file(path: &Path) -> Result<Vec<(usize, String, String)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("{}:{}: expected `key = value`", path.display(), i + 1);
        };
        let key = key.trim().replace('_', "-");
        let value = value.trim().trim_matches('"').to_string();
        if key.is_empty() {
            bail!("{}:{}: empty key", path.display(), i + 1);
        }
        entries.push((i + 1, key, value));
    }
    Ok(entries)
}

/// The `--config` value and the index of the subcommand token, skipping
/// global flags and their values.
fn scan(argv: &[String]) -> (Option<String>, Option<usize>) {
    let mut config = None;
    let mut sub = None;
    let mut i = 1;
    while i < argv.len() {
        let a = &argv[i];
        if let Some(v) = a.strip_prefix("--config=") {
            config = Some(v.to_string());
        } else if a == "--config" {
            config = argv.get(i + 1).cloned();
            i += 1;
        } else if GLOBAL_WITH_VALUE.contains(&a.as_str()) {
            i += 1;
        } else if sub.is_none() && !a.starts_with('-') {
            sub = Some(i);
        }
        i += 1;
    }
    (config, sub)
}

fn mentions(argv: &[String], long: &str) -> bool {
    let flag = format!("--{long}");
    let prefix = format!("{flag}=");
    argv.iter().any(|a| *a == flag || a.starts_with(&prefix))
}

fn tokens_for(arg: &Arg, key: &str, value: &str) -> Result<Vec<String>> {
    if arg.get_action().takes_values() {
        return Ok(vec![format!("--{key}"), value.to_string()]);
    }
    match value {
        "true" | "1" | "yes" => Ok(vec![format!("--{key}")]),
        "false" | "0" | "no" => Ok(vec![]),
        other => bail!("config key `{key}` is a switch; `{other}` is not a boolean"),
    }
}

/// Expands `--config` into explicit flags. Keys unknown to every subcommand
/// are an error; keys that only other subcommands accept are ignored, so one
/// file can serve several commands.
pub fn expand(argv: Vec<String>) -> Result<Vec<String>> {
    let (Some(path), sub) = scan(&argv) else {
        return Ok(argv);
    };
    let entries = parse_file(Path::new(&path))?;
    let cmd = Cli::command();
    let sub_cmd = sub.and_then(|i| cmd.find_subcommand(&argv[i]).map(|c| (i, c)));
    let mut global = Vec::new();
    let mut local = Vec::new();
    for (line, key, value) in entries {
        if key == "config" {
            bail!("{path}:{line}: config files cannot include other config files");
        }
        if mentions(&argv, &key) {
            continue;
        }
        let known_anywhere = cmd
            .get_subcommands()
            .flat_map(|s| s.get_arguments())
            .chain(cmd.get_arguments())
            .any(|a| a.get_long() == Some(key.as_str()));
        if !known_anywhere {
            bail!("{path}:{line}: unknown option `{key}`");
        }
        if let Some(arg) = cmd.get_arguments().find(|a| a.get_long() == Some(key.as_str())) {
            global.extend(tokens_for(arg, &key, &value)?);
        } else if let Some((_, sc)) = &sub_cmd {
            if let Some(arg) = sc.get_arguments().find(|a| a.get_long() == Some(key.as_str())) {
                local.extend(tokens_for(arg, &key, &value)?);
            }
        }
    }
    let mut out = argv;
    if let Some((i, _)) = sub_cmd {
        let tail = out.split_off(i + 1);
        out.extend(local);
        out.extend(tail);
    }
    out.extend(global);
    Ok(out)
}

/// argv without the program name and without `--out`, `--config` and
/// `--jobs`, which do not affect results.
pub fn recorded_argv(argv: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut i = 1;
    while i < argv.len() {
        let a = &argv[i];
        if GLOBAL_WITH_VALUE.contains(&a.as_str()) {
            i += 2;
            continue;
        }
        if GLOBAL_WITH_VALUE.iter().any(|g| a.starts_with(&format!("{g}="))) {
            i += 1;
            continue;
        }
        out.push(a.clone());
        i += 1;
    }
    out
}
