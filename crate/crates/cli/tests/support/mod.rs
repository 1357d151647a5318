//! Synthetic corpora written straight to disk in the documented formats.

#![allow(dead_code)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const ISSUES: [&str; 3] = ["guns", "immigration", "lgbtq"];
pub const ROLES: [&str; 3] = ["journalist", "smo", "other"];
pub const TYPES: [&str; 3] = ["broadcast", "quote", "reply"];
pub const STANCES: [&str; 3] = ["progressive", "conservative", "neutral"];
pub const ELEMENTS: [&str; 7] = [
    "problem_id",
    "blame",
    "solution",
    "tactics",
    "solidarity",
    "counterframing",
    "motivational_elem",
];

pub struct Fixture {
    pub dir: tempfile::TempDir,
    pub docs: PathBuf,
    pub labels: PathBuf,
    pub tokens: PathBuf,
    pub manifest: PathBuf,
    pub n_relevant: usize,
}

/// Marker words per frame element, so text carries the labels.
fn marker(element: &str) -> &'static [&'static str] {
    match element {
        "problem_id" => &["crisis", "problem"],
        "blame" => &["they", "failed", "their"],
        "solution" => &["we", "need", "reform"],
        "tactics" => &["vote", "boycott"],
        "solidarity" => &["our", "together"],
        "counterframing" => &["lies"],
        _ => &["you", "join", "march"],
    }
}

const FILLER: [&str; 12] = [
    "today", "people", "city", "news", "policy", "week", "school", "border", "rights", "law", "state", "time",
];
const PRONOUNS: [&str; 8] = ["i", "we", "you", "your", "he", "she", "they", "it"];
const VERBS: [&str; 6] = ["need", "failed", "join", "vote", "march", "boycott"];

/// `n` documents over March and June 2018. About 80% are relevant; each
/// relevant document gets random frame elements, and the core tasks follow
/// from them.
pub fn corpus(n: usize, seed: u64) -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut docs = String::new();
    let mut labels = String::from(
        "doc_id,relevant,stance,diagnostic,prognostic,motivational,problem_id,blame,solution,tactics,solidarity,counterframing,motivational_elem\n",
    );
    let mut conllu = String::new();
    let mut n_relevant = 0;
    for i in 0..n {
        let id = format!("t{i:05}");
        let issue = ISSUES[rng.gen_range(0..3)];
        let month = if rng.gen_bool(0.5) { 3 } else { 6 };
        let day = rng.gen_range(1..=if month == 3 { 31 } else { 30 });
        let (h, m) = (rng.gen_range(0..24), rng.gen_range(0..60));
        let relevant = rng.gen_bool(0.8);
        let elements: Vec<bool> = ELEMENTS.iter().map(|_| relevant && rng.gen_bool(0.3)).collect();
        let mut words: Vec<&str> = (0..rng.gen_range(3..7)).map(|_| FILLER[rng.gen_range(0..FILLER.len())]).collect();
        if rng.gen_bool(0.6) {
            words.insert(0, PRONOUNS[rng.gen_range(0..PRONOUNS.len())]);
        }
        for (e, on) in ELEMENTS.iter().zip(&elements) {
            if *on {
                words.extend(marker(e));
            }
        }
        let text = words.join(" ");
        writeln!(
            docs,
            r#"{{"id":"{id}","text":"{text}","timestamp":"2018-{month:02}-{day:02}T{h:02}:{m:02}:00Z","issue":"{issue}","activity":"{}","author_role":"{}","tweet_type":"{}"}}"#,
            if rng.gen_bool(0.5) { "high" } else { "average" },
            ROLES[rng.gen_range(0..3)],
            TYPES[rng.gen_range(0..3)],
        )
        .unwrap();

        let b = |v: bool| if v { "1" } else { "0" };
        if relevant {
            n_relevant += 1;
            let e = &elements;
            let diagnostic = e[0] || e[1];
            let prognostic = e[2] || e[3] || e[4] || e[5];
            let motivational = e[6];
            write!(
                labels,
                "{id},1,{},{},{},{}",
                STANCES[rng.gen_range(0..3)],
                b(diagnostic),
                b(prognostic),
                b(motivational)
            )
            .unwrap();
            for v in e {
                write!(labels, ",{}", b(*v)).unwrap();
            }
            labels.push('\n');
        } else {
            writeln!(labels, "{id},0,,,,,,,,,,,").unwrap();
        }

        writeln!(conllu, "# doc_id = {id}").unwrap();
        let root = words.iter().position(|w| VERBS.contains(w)).map(|p| p + 1).unwrap_or(1);
        for (k, w) in words.iter().enumerate() {
            let idx = k + 1;
            let upos = if VERBS.contains(w) {
                "VERB"
            } else if PRONOUNS.contains(w) || ["their", "our"].contains(w) {
                "PRON"
            } else {
                "NOUN"
            };
            let (head, rel) = if idx == root {
                (0, "root")
            } else if upos == "PRON" && idx < root {
                (root, "nsubj")
            } else if upos == "NOUN" && idx == root + 1 {
                (root, "obj")
            } else {
                (root, "dep")
            };
            writeln!(conllu, "{idx}\t{w}\t{w}\t{upos}\t_\t_\t{head}\t{rel}\t_\t_").unwrap();
        }
        conllu.push('\n');
    }
    let manifest = "issue,activity,month,count\n\
        guns,high,2018-03,1000\nguns,average,2018-06,500\n\
        immigration,average,2018-03,700\nimmigration,high,2018-06,900\n\
        lgbtq,average,2018-03,300\nlgbtq,high,2018-06,400\n";
    let write = |name: &str, body: &str| -> PathBuf {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        p
    };
    Fixture {
        docs: write("documents.jsonl", &docs),
        labels: write("labels.csv", &labels),
        tokens: write("tokens.conllu", &conllu),
        manifest: write("manifest.csv", manifest),
        n_relevant,
        dir,
    }
}

pub fn frameforge(cwd: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frameforge"))
        .current_dir(cwd)
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn header(path: &Path) -> String {
    read(path).lines().next().unwrap_or_default().to_string()
}
