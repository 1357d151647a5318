//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod support;
#[path = "../../core/tests/support/oracles.rs"]
mod oracles;

use std::collections::BTreeMap;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use chrono::{TimeZone, Utc};
use frameforge_core::agreement::{krippendorff_alpha, AnnotationMatrix, Metric};
use frameforge_core::alignment::{
    bootstrap_alignment, kl_divergence, rank_by_divergence, BootstrapOptions, StrategyDistribution,
};
use frameforge_core::classify::{
    apply_exclusion_rule, cross_validate, metrics_from_matrix, Task, TrainConfig,
};
use frameforge_core::corpus::{
    dataset_stats, parse_manifest, Activity, AuthorRole, Document, Issue, LabelKind, LabelSet,
    LabeledCorpus, LabeledDoc, Stance, TokenStore, TweetType,
};
use frameforge_core::lexstats::{build_pronoun_dataset, log_odds_idp, log_odds_with_prior, Counts, Person};
use frameforge_core::regress::{
    ame_point, fit_logistic, fit_pronoun_models, holm_bonferroni, Dataset, DesignLayout, DesignSpec,
    FactorSpec, FitOptions, FittedModel,
};
use frameforge_core::temporal::aggregate_daily;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

fn doc(i: usize, issue: Issue, secs: i64, text: String) -> Document {
    Document {
        id: format!("d{i:06}"),
        text,
        timestamp: Utc.timestamp_opt(1_527_811_200 + secs, 0).unwrap(),
        issue,
        activity: Activity::High,
        author_role: AuthorRole::ALL[i % 3],
        tweet_type: TweetType::ALL[i % 3],
    }
}

fn manifest_arithmetic() -> Outcome {
    let start = Instant::now();
    let csv = "issue,activity,month,count\n\
        guns,high,2018-03,633027\n\
        guns,average,2018-06,189134\n\
        immigration,high,2018-06,513284\n\
        immigration,average,2018-07,249776\n\
        lgbtq,high,2018-06,172006\n\
        lgbtq,average,2019-04,95695\n";
    let m = parse_manifest(csv.as_bytes(), Path::new("monthly.csv")).map_err(|e| e.to_string())?;
    let s = m.summarize();
    let elapsed = start.elapsed().as_secs_f64();
    let got = [Issue::Guns, Issue::Immigration, Issue::Lgbtq].map(|i| s.per_issue[&i]);
    ensure!(got == [822_161, 763_060, 267_701], "sums {got:?}");
    ensure!(elapsed < 1.0, "took {elapsed:.3}s");
    Ok(format!("guns {} immigration {} lgbtq {} in {elapsed:.4}s", got[0], got[1], got[2]))
}

fn frame_count_mean() -> Outcome {
    // Histogram of core-task counts 0..=3 per issue.
    let table = [
        (Issue::Guns, [223, 618, 325, 119], 1.26),
        (Issue::Immigration, [244, 810, 448, 121], 1.27),
        (Issue::Lgbtq, [444, 1091, 355, 61], 1.02),
    ];
    let mut records = Vec::new();
    for (issue, hist, _) in table {
        for (k, &n) in hist.iter().enumerate() {
            for _ in 0..n {
                let labels = LabelSet {
                    relevant: true,
                    stance: Some(Stance::Neutral),
                    problem_id: k >= 1,
                    solution: k >= 2,
                    motivational_elem: k >= 3,
                    ..Default::default()
                }
                .with_derived_tasks();
                records.push(LabeledDoc {
                    doc: doc(records.len(), issue, 0, String::new()),
                    labels,
                });
            }
        }
    }
    let stats = dataset_stats(&LabeledCorpus::new(LabelKind::Gold, records)).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for (issue, _, expected) in table {
        let mean = stats.per_issue[&issue].frame_counts.mean().unwrap();
        ensure!((mean - expected).abs() <= 0.005, "{issue} mean {mean} vs {expected}");
        parts.push(format!("{issue} {mean:.4}"));
    }
    Ok(parts.join(", "))
}

fn exclusion_rule() -> Outcome {
    let elements: BTreeMap<String, f64> = [
        ("problem_id", 0.869),
        ("blame", 0.773),
        ("solution", 0.685),
        ("tactics", 0.594),
        ("solidarity", 0.777),
        ("counterframing", 0.473),
        ("motivational_elem", 0.697),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    let excluded = apply_exclusion_rule(&elements, 0.5);
    ensure!(excluded.iter().eq(["counterframing"].iter()), "frame elements excluded {excluded:?}");
    let lgbtq: BTreeMap<String, f64> = [("progressive", 0.879), ("neutral", 0.656), ("conservative", 0.410)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    let flagged = apply_exclusion_rule(&lgbtq, 0.5);
    ensure!(flagged.iter().eq(["conservative"].iter()), "lgbtq stance flagged {flagged:?}");
    Ok("elements {counterframing}; lgbtq stance {conservative}".into())
}

fn alpha_oracle() -> Outcome {
    let start = Instant::now();
    let mut r = rng(101);
    let (mut defined, mut undefined) = (0, 0);
    // Undefined draws (one coder, one category) are checked but not counted.
    for case in 0.. {
        if defined == 1000 {
            break;
        }
        let items = r.gen_range(1..=10);
        let coders = r.gen_range(1..=3);
        let cats = r.gen_range(1..=3);
        let rows: Vec<Vec<Option<u32>>> = (0..items)
            .map(|_| (0..coders).map(|_| r.gen_bool(0.8).then(|| r.gen_range(0..cats))).collect())
            .collect();
        let got = AnnotationMatrix::new(
            (0..items).map(|i| format!("i{i}")).collect(),
            (0..coders).map(|a| format!("a{a}")).collect(),
            rows.iter().map(|row| row.iter().map(|v| v.map(|v| format!("c{v}"))).collect()).collect(),
        )
        .and_then(|m| krippendorff_alpha(&m, Metric::Nominal));
        match (oracles::alpha_nominal(&rows), got) {
            (Some(expected), Ok(res)) => {
                ensure!((res.alpha - expected).abs() <= 1e-12, "case {case}: {} vs {expected}", res.alpha);
                defined += 1;
            }
            (None, Err(_)) => undefined += 1,
            (e, g) => return Err(format!("case {case}: oracle {e:?}, library {:?}", g.map(|r| r.alpha))),
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure!(elapsed < 10.0, "took {elapsed:.2}s");
    Ok(format!("{defined} matched to 1e-12, {undefined} more undefined in both, {elapsed:.3}s"))
}

fn random_counts(r: &mut ChaCha8Rng, vocab: usize) -> Counts {
    let mut c = Counts::new();
    for w in 0..vocab {
        if r.gen_bool(0.7) {
            c.insert(format!("w{w}"), r.gen_range(1..300));
        }
    }
    c
}

fn log_odds_oracle() -> Outcome {
    let mut r = rng(202);
    let mut worst: f64 = 0.0;
    for case in 0..1000 {
        let group = random_counts(&mut r, 30);
        let mut background = group.clone();
        for (w, c) in random_counts(&mut r, 40) {
            *background.entry(w).or_default() += c;
        }
        if group.is_empty() {
            continue;
        }
        let kappa = r.gen_range(0.5..2000.0);
        let out = log_odds_idp(&group, &background, kappa).map_err(|e| e.to_string())?;
        let n1 = group.values().sum::<u64>() as f64;
        let n2 = background.values().sum::<u64>() as f64;
        ensure!(out.results.len() == background.len(), "case {case}: feature count");
        for res in &out.results {
            let y1 = group.get(&res.feature).copied().unwrap_or(0) as f64;
            let y2 = background[&res.feature] as f64;
            let (d, s2, z) = oracles::log_odds(y1, n1, y2, n2, y2, n2, kappa);
            for (a, b) in [(res.delta, d), (res.sigma2, s2), (res.z, z)] {
                worst = worst.max((a - b).abs() / b.abs().max(1.0));
                ensure!(close(a, b, 1e-12), "case {case} `{}`: {a} vs {b}", res.feature);
            }
        }

        let same = log_odds_idp(&background, &background, kappa).map_err(|e| e.to_string())?;
        ensure!(same.results.iter().all(|x| x.delta == 0.0), "case {case}: identical corpora give non-zero delta");

        let other = random_counts(&mut r, 30);
        let mut prior = group.clone();
        for (w, c) in &other {
            *prior.entry(w.clone()).or_default() += c;
        }
        let ab = log_odds_with_prior(&group, &other, &prior, kappa).map_err(|e| e.to_string())?;
        let ba = log_odds_with_prior(&other, &group, &prior, kappa).map_err(|e| e.to_string())?;
        for x in &ab.results {
            let y = ba.results.iter().find(|y| y.feature == x.feature).ok_or("feature lost on swap")?;
            ensure!(x.delta == -y.delta, "case {case}: swap gives {} and {}", x.delta, y.delta);
        }
    }
    Ok(format!("1000 tables, worst relative error {worst:.2e}; identical corpora and swap exact"))
}

fn metrics_oracle() -> Outcome {
    let mut r = rng(303);
    let mut zero_division = 0;
    for case in 0..1000 {
        let k = r.gen_range(1..=7);
        let n = r.gen_range(0..40);
        let rate = r.gen_range(0.0..0.6);
        let draw = |r: &mut ChaCha8Rng| -> Vec<Vec<bool>> {
            (0..n).map(|_| (0..k).map(|_| r.gen_bool(rate)).collect()).collect()
        };
        let gold = draw(&mut r);
        let pred = draw(&mut r);
        let names: Vec<String> = (0..k).map(|j| format!("l{j}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let m = metrics_from_matrix(&refs, &gold, &pred).map_err(|e| e.to_string())?;
        let mut pooled = (0, 0, 0);
        let mut sum = 0.0;
        for j in 0..k {
            let g: Vec<bool> = gold.iter().map(|row| row[j]).collect();
            let p: Vec<bool> = pred.iter().map(|row| row[j]).collect();
            let (tp, fp, fn_) = oracles::confusion(&g, &p);
            let c = &m.labels[j].confusion;
            ensure!((c.tp, c.fp, c.fn_) == (tp, fp, fn_), "case {case} label {j}: counts differ");
            let f1 = oracles::f1_via_pr(tp, fp, fn_);
            if tp + fp + fn_ == 0 || tp == 0 {
                zero_division += 1;
                ensure!(m.labels[j].f1 == f1, "case {case} label {j}: convention {} vs {f1}", m.labels[j].f1);
            }
            ensure!((m.labels[j].f1 - f1).abs() <= 1e-12, "case {case} label {j}: f1 {} vs {f1}", m.labels[j].f1);
            pooled = (pooled.0 + tp, pooled.1 + fp, pooled.2 + fn_);
            sum += f1;
        }
        ensure!((m.macro_f1 - sum / k as f64).abs() <= 1e-12, "case {case}: macro");
        let micro = oracles::f1_via_pr(pooled.0, pooled.1, pooled.2);
        ensure!((m.micro_f1 - micro).abs() <= 1e-12, "case {case}: micro");
    }
    Ok(format!("1000 sets, counts exact, {zero_division} zero-division labels exact"))
}

/// Core tasks marked by dedicated words, buried in shared filler.
fn separable_corpus(n: usize, seed: u64) -> LabeledCorpus {
    let mut r = rng(seed);
    let filler = ["people", "today", "city", "news", "policy", "week", "rights", "law"];
    let records = (0..n)
        .map(|i| {
            let labels = LabelSet {
                relevant: true,
                stance: Some(Stance::ALL[r.gen_range(0..3)]),
                blame: r.gen_bool(0.5),
                solution: r.gen_bool(0.4),
                motivational_elem: r.gen_bool(0.3),
                ..Default::default()
            }
            .with_derived_tasks();
            let mut words: Vec<&str> = (0..r.gen_range(3..8)).map(|_| filler[r.gen_range(0..filler.len())]).collect();
            for (on, w) in [(labels.diagnostic, "culprits"), (labels.prognostic, "remedy"), (labels.motivational, "rally")] {
                if on {
                    words.insert(r.gen_range(0..=words.len()), w);
                }
            }
            LabeledDoc {
                doc: doc(i, Issue::ALL[i % 3], i as i64 * 60, words.join(" ")),
                labels,
            }
        })
        .collect();
    LabeledCorpus::new(LabelKind::Gold, records)
}

fn classifier_protocol() -> Outcome {
    let corpus = separable_corpus(2000, 404);
    let config = TrainConfig::default();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| cross_validate(&corpus, Task::CoreTasks, &config, 5, 0.2, 17, 0.5))
            .map_err(|e| e.to_string())
    };
    let first = run(4)?;
    let second = run(1)?;
    let macro_f1 = first.summary.macro_f1_mean;
    ensure!(macro_f1 >= 0.9, "macro F1 {macro_f1}");
    ensure!(first.folds == second.folds, "fold metrics differ between runs");
    let bits: Vec<u64> = first.folds.iter().map(|f| f.dev.macro_f1.to_bits()).collect();
    let again: Vec<u64> = second.folds.iter().map(|f| f.dev.macro_f1.to_bits()).collect();
    ensure!(bits == again, "fold macro F1 bits differ");
    Ok(format!("5-fold dev macro F1 {macro_f1:.4}, folds bit-identical across runs"))
}

fn regression_recovery() -> Outcome {
    let timer = Instant::now();
    // Balanced binary factors keep every standard error near 2/sqrt(n).
    let factors: [(&str, &[&str], &[f64]); 5] = [
        ("a", &["a0", "a1"], &[0.0, 0.5]),
        ("b", &["b0", "b1"], &[0.0, -0.4]),
        ("c", &["c0", "c1"], &[0.0, 0.3]),
        ("d", &["d0", "d1"], &[0.0, -0.6]),
        ("e", &["e0", "e1"], &[0.0, 0.2]),
    ];
    let intercept = 0.0;
    let n = 50_000;
    let mut r = rng(505);
    let mut columns: Vec<Vec<String>> = vec![Vec::new(); 5];
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let mut eta = intercept;
        for (f, (_, levels, betas)) in factors.iter().enumerate() {
            let l = r.gen_range(0..levels.len());
            eta += betas[l];
            columns[f].push(levels[l].to_string());
        }
        y.push(r.gen::<f64>() < 1.0 / (1.0 + (-eta).exp()));
    }
    let mut data = Dataset::new(n);
    for ((name, _, _), col) in factors.iter().zip(columns) {
        data.add_factor(name, col).map_err(|e| e.to_string())?;
    }
    data.add_outcome("y", y).map_err(|e| e.to_string())?;
    let spec = DesignSpec {
        outcome: "y".into(),
        factors: factors.iter().map(|(name, levels, _)| FactorSpec::new(name, levels[0])).collect(),
    };
    let fit = fit_logistic(&data, &spec, &FitOptions::default()).map_err(|e| e.to_string())?;
    let mut max_err = (fit.intercept.beta - intercept).abs();
    let mut worst = ("(intercept)".to_string(), max_err / fit.intercept.se);
    for (name, levels, betas) in factors {
        for (level, beta) in levels.iter().zip(betas).skip(1) {
            let c = fit.coefficient(name, level).ok_or(format!("missing {name}:{level}"))?;
            let err = (c.beta - beta).abs();
            if err > max_err {
                max_err = err;
                worst = (format!("{name}:{level}"), err / c.se);
            }
        }
    }
    ensure!(max_err < 0.05, "max |beta_hat - beta| = {max_err:.4} at {} ({:.2} standard errors)", worst.0, worst.1);
    let fit_secs = timer.elapsed().as_secs_f64();

    // Single-factor AME against its closed form.
    let mut worst_ame: f64 = 0.0;
    for case in 0..500 {
        let m = r.gen_range(3..60);
        let (b0, b1, b2) = (r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0));
        let mut d = Dataset::new(m);
        let levels = ["ref", "l1", "l2"];
        d.add_factor("f", (0..m).map(|i| levels[i % 3].to_string()).collect()).map_err(|e| e.to_string())?;
        d.add_outcome("y", (0..m).map(|i| i % 2 == 0).collect()).map_err(|e| e.to_string())?;
        let spec = DesignSpec { outcome: "y".into(), factors: vec![FactorSpec::new("f", "ref")] };
        let layout = DesignLayout::from_data(&d, &spec.factors).map_err(|e| e.to_string())?;
        let model = FittedModel { spec, layout, beta: vec![b0, b1, b2], converged: true };
        for (level, b) in [("l1", b1), ("l2", b2)] {
            let got = ame_point(&model, &d, "f", level).map_err(|e| e.to_string())?;
            let err = (got - oracles::single_factor_ame(b0, b)).abs();
            worst_ame = worst_ame.max(err);
            ensure!(err < 1e-10, "case {case} level {level}: AME error {err}");
        }
    }

    for case in 0..10_000 {
        let m = r.gen_range(0..25);
        let p: Vec<f64> = (0..m)
            .map(|_| match r.gen_range(0..10) {
                0 => 0.0,
                1 => 1.0,
                2 => 0.01,
                _ => r.gen::<f64>().powi(3),
            })
            .collect();
        let got = holm_bonferroni(&p, 0.05).map_err(|e| e.to_string())?;
        let (adjusted, reject) = oracles::holm_enumerate(&p, 0.05);
        ensure!(got.adjusted == adjusted && got.reject == reject, "case {case}: Holm differs on {p:?}");
    }
    Ok(format!(
        "max coefficient error {max_err:.4} (n=50000, fit {fit_secs:.2}s); AME worst {worst_ame:.1e}; Holm 10000 vectors exact"
    ))
}

fn pronoun_signal() -> Outcome {
    // Third-person pronouns are planted far more often in diagnostic tweets;
    // the other pronouns and framing flags are independent of them.
    let mut r = rng(606);
    let third = ["they", "them", "their", "he", "she", "it"];
    let other = ["we", "our", "i", "my", "you", "your"];
    let records: Vec<LabeledDoc> = (0..4000)
        .map(|i| {
            let diagnostic = r.gen_bool(0.5);
            let prognostic = r.gen_bool(0.4);
            let motivational = r.gen_bool(0.25);
            let p_third = if diagnostic { 0.7 } else { 0.2 };
            let pronoun = if r.gen_bool(p_third) {
                third[r.gen_range(0..third.len())]
            } else {
                other[r.gen_range(0..other.len())]
            };
            let labels = LabelSet {
                relevant: true,
                stance: Some(Stance::Neutral),
                diagnostic,
                prognostic,
                motivational,
                ..Default::default()
            };
            let issue = [Issue::Guns, Issue::Immigration, Issue::Lgbtq][r.gen_range(0..3)];
            LabeledDoc {
                doc: doc(i, issue, 0, format!("{pronoun} said the policy matters")),
                labels,
            }
        })
        .collect();
    let corpus = LabeledCorpus::new(LabelKind::Inferred, records);
    let pronouns = build_pronoun_dataset(&corpus, &TokenStore::default());
    ensure!(pronouns.len() == 4000, "{} pronoun records", pronouns.len());
    let fits = fit_pronoun_models(&pronouns, &FitOptions::default()).map_err(|e| e.to_string())?;
    let model = &fits.iter().find(|(p, _)| *p == Person::Third).ok_or("no third-person model")?.1;
    let framing: Vec<_> = model
        .coefficients
        .iter()
        .filter(|c| ["diagnostic", "prognostic", "motivational"].contains(&c.factor.as_str()))
        .collect();
    let best = framing
        .iter()
        .max_by(|a, b| a.beta.total_cmp(&b.beta))
        .ok_or("no framing coefficients")?;
    ensure!(best.factor == "diagnostic" && best.beta > 0.0, "largest framing effect is {}={}", best.factor, best.beta);
    Ok(format!("third-person model: diagnostic beta {:.3}, p_holm {:.1e}", best.beta, best.p_holm))
}

fn alignment() -> Outcome {
    let mut r = rng(707);
    let p = StrategyDistribution::from_counts((0..8).map(|_| r.gen_range(0..500)).collect());
    ensure!(kl_divergence(&p.probabilities, &p.probabilities).map_err(|e| e.to_string())? == 0.0, "KL(P||P) != 0");

    let pool: Vec<LabelSet> = (0..3000)
        .map(|_| LabelSet {
            relevant: true,
            stance: Some(Stance::Progressive),
            problem_id: r.gen_bool(0.5),
            blame: r.gen_bool(0.3),
            solution: r.gen_bool(0.3),
            tactics: r.gen_bool(0.15),
            solidarity: r.gen_bool(0.2),
            counterframing: r.gen_bool(0.05),
            motivational_elem: r.gen_bool(0.15),
            ..Default::default()
        }
        .with_derived_tasks())
        .collect();
    let group: Vec<&LabelSet> = pool.iter().collect();
    let opts = BootstrapOptions { n_replicates: 1000, sample_size: 10_000, symmetric: false };
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| bootstrap_alignment(("g", "g"), &group, &group, &opts, 99))
            .map_err(|e| e.to_string())
    };
    let a = run(4)?;
    let b = run(2)?;
    ensure!(a.kl_mean < 0.005, "same-group mean {}", a.kl_mean);
    ensure!(a.kl_mean.to_bits() == b.kl_mean.to_bits(), "kl_mean {} vs {}", a.kl_mean, b.kl_mean);

    let means = [
        ("progressive guns vs immigration", 0.049),
        ("conservative guns vs immigration", 0.052),
        ("guns progressive vs conservative", 0.090),
        ("immigration progressive vs conservative", 0.097),
    ];
    let ranked = rank_by_divergence(&means);
    let order: Vec<&str> = ranked.iter().map(|x| x.0).collect();
    ensure!(order == [means[0].0, means[1].0, means[2].0, means[3].0], "ranking {order:?}");
    Ok(format!("KL(P||P)=0; same-group mean {:.5}; bit-identical; most aligned: {}", a.kl_mean, order[0]))
}

fn temporal_conservation() -> Outcome {
    let mut r = rng(808);
    for case in 0..100 {
        let n = r.gen_range(0..400);
        let records: Vec<LabeledDoc> = (0..n)
            .map(|i| {
                let relevant = r.gen_bool(0.7);
                let flags: u8 = r.gen_range(0..8);
                LabeledDoc {
                    doc: doc(i, Issue::ALL[r.gen_range(0..3)], r.gen_range(0..45 * 86_400), String::new()),
                    labels: LabelSet {
                        relevant,
                        stance: relevant.then_some(Stance::Neutral),
                        diagnostic: relevant && flags & 1 != 0,
                        prognostic: relevant && flags & 2 != 0,
                        motivational: relevant && flags & 4 != 0,
                        ..Default::default()
                    },
                }
            })
            .collect();
        let relevant = records.iter().filter(|x| x.labels.relevant).count() as u64;
        let corpus = LabeledCorpus::new(LabelKind::Inferred, records);
        for by_role in [false, true] {
            let s = aggregate_daily(&corpus, None, by_role);
            let total: u64 = s.rows.iter().map(|x| x.n_relevant).sum();
            ensure!(total == relevant, "case {case}: {total} vs {relevant}");
        }
    }

    let all_three: Vec<LabeledDoc> = (0..50)
        .map(|i| LabeledDoc {
            doc: doc(i, Issue::Guns, (i as i64 % 5) * 86_400, String::new()),
            labels: LabelSet {
                relevant: true,
                stance: Some(Stance::Neutral),
                problem_id: true,
                solution: true,
                motivational_elem: true,
                ..Default::default()
            }
            .with_derived_tasks(),
        })
        .collect();
    let s = aggregate_daily(&LabeledCorpus::new(LabelKind::Inferred, all_three), None, false);
    for row in s.rows.iter().filter(|x| !x.missing) {
        ensure!(
            row.n_diagnostic == row.n_relevant && row.n_prognostic == row.n_relevant && row.n_motivational == row.n_relevant,
            "{}: {row:?}",
            row.date
        );
    }
    let total: u64 = s.rows.iter().map(|x| x.n_diagnostic).sum();
    ensure!(total == 50, "all-three tweets gave {total} diagnostic counts");
    Ok("100 corpora conserved; all-three-task tweets counted once per task".into())
}

fn end_to_end_determinism() -> Outcome {
    let fx = support::corpus(300, 909);
    let root = fx.dir.path();
    let s = |p: &Path| p.to_string_lossy().into_owned();
    let (docs, labels, tokens, manifest) = (s(&fx.docs), s(&fx.labels), s(&fx.tokens), s(&fx.manifest));
    let agreement = root.join("blame.csv");
    fs::write(&agreement, "doc_id,a1,a2,a3\nx1,1,1,0\nx2,0,0,0\nx3,1,1,\nx4,0,1,0\n").unwrap();
    let agreement = s(&agreement);

    let run_all = |out: &Path| -> Result<(), String> {
        let o = s(out);
        let d = ["--docs", docs.as_str(), "--labels", labels.as_str()];
        let model = |t: &str| s(&out.join(format!("model_{t}.json")));
        let cmds: Vec<Vec<String>> = vec![
            vec!["ingest".into(), "--docs".into(), docs.clone()],
            [&["validate", "--tokens", &tokens, "--manifest", &manifest][..], &d].concat().iter().map(|x| x.to_string()).collect(),
            [&["stats", "--manifest", &manifest][..], &d].concat().iter().map(|x| x.to_string()).collect(),
            vec!["agreement".into(), agreement.clone()],
            [&["lexstats", "--kind", "word,subj_verb", "--tokens", &tokens, "--min-count", "1"][..], &d].concat().iter().map(|x| x.to_string()).collect(),
            [&["train", "--task", "relevance", "--seed", "5", "--epochs", "40"][..], &d].concat().iter().map(|x| x.to_string()).collect(),
            [&["train", "--task", "core_tasks", "--seed", "5", "--epochs", "40"][..], &d].concat().iter().map(|x| x.to_string()).collect(),
            vec!["predict".into(), "--docs".into(), docs.clone(), "--model".into(), model("relevance"), "--model".into(), model("core_tasks")],
            [&["crossval", "--task", "core_tasks", "--seed", "5", "--epochs", "40"][..], &d].concat().iter().map(|x| x.to_string()).collect(),
            [&["regress", "--seed", "5", "--bootstrap", "25"][..], &d].concat().iter().map(|x| x.to_string()).collect(),
            [&["regress", "--seed", "5", "--bootstrap", "25", "--pronouns", "--tokens", &tokens][..], &d].concat().iter().map(|x| x.to_string()).collect(),
            [&["align", "--seed", "5", "--replicates", "50", "--sample-size", "500"][..], &d].concat().iter().map(|x| x.to_string()).collect(),
            [&["temporal", "--manifest", &manifest, "--by-role"][..], &d].concat().iter().map(|x| x.to_string()).collect(),
        ];
        for mut cmd in cmds {
            cmd.extend(["--out".into(), o.clone()]);
            let refs: Vec<&str> = cmd.iter().map(String::as_str).collect();
            let res = support::frameforge(root, &refs);
            if !res.status.success() {
                return Err(format!("{} failed: {}", cmd[0], String::from_utf8_lossy(&res.stderr)));
            }
        }
        let pred = s(&out.join("predictions.csv"));
        let res = support::frameforge(
            root,
            &["evaluate", "--docs", &docs, "--gold", &labels, "--pred", &pred, "--task", "relevance,core_tasks", "--out", &o],
        );
        if !res.status.success() {
            return Err(format!("evaluate failed: {}", String::from_utf8_lossy(&res.stderr)));
        }
        Ok(())
    };
    let first = root.join("first");
    run_all(&first)?;

    let snapshot = |dir: &Path| -> BTreeMap<String, Vec<u8>> {
        fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
            .collect()
    };
    let original = snapshot(&first);
    let manifests: Vec<String> = original.keys().filter(|k| k.ends_with(".run.json")).cloned().collect();
    ensure!(manifests.len() == 14, "{} run manifests", manifests.len());
    let mut replayed = 0;
    for name in &manifests {
        let out = root.join(format!("replay-{name}"));
        let res = support::frameforge(root, &["replay", &s(&first.join(name)), "--out", &s(&out)]);
        ensure!(res.status.success(), "replay of {name}: {}", String::from_utf8_lossy(&res.stderr));
        for (file, bytes) in snapshot(&out) {
            if let Some(orig) = original.get(&file) {
                ensure!(*orig == bytes, "{name}: {file} differs on replay");
                replayed += 1;
            }
        }
    }
    let second = root.join("second");
    run_all(&second)?;
    // Manifests name files under each output directory, so only outputs
    // are compared across the two directories.
    let strip = |m: BTreeMap<String, Vec<u8>>| -> BTreeMap<String, Vec<u8>> {
        m.into_iter().filter(|(k, _)| !k.ends_with(".run.json")).collect()
    };
    let again = strip(snapshot(&second));
    let base = strip(original.clone());
    let differing: Vec<&String> = base.keys().filter(|k| again.get(*k) != base.get(*k)).collect();
    ensure!(differing.is_empty() && again.len() == base.len(), "second full run differs in {differing:?}");
    Ok(format!("{} commands replayed, {replayed} files byte-identical", manifests.len()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("manifest arithmetic", manifest_arithmetic),
        ("frame-count mean", frame_count_mean),
        ("exclusion rule", exclusion_rule),
        ("krippendorff alpha oracle", alpha_oracle),
        ("log-odds oracle", log_odds_oracle),
        ("metrics oracle", metrics_oracle),
        ("classifier protocol", classifier_protocol),
        ("regression recovery", regression_recovery),
        ("pronoun analysis", pronoun_signal),
        ("alignment", alignment),
        ("temporal conservation", temporal_conservation),
        ("end-to-end determinism", end_to_end_determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name} ({secs:.2}s): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name} ({secs:.2}s): {why}");
            }
        }
    }
    println!("{} of {} criteria passed", 12 - failed, 12);
    if failed > 0 {
        std::process::exit(1);
    }
}
