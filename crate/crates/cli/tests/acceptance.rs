//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any failed.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::Parser;
use spamsmote::classify::logistic_objective;
use spamsmote::fixture::{corpus_to_csv, generate_corpus, FixtureConfig};
use spamsmote::pipeline::featurize;
use spamsmote::resample::SmoteTarget;
use spamsmote::rng::SeededRng;
use spamsmote::{
    balance_training_set, compare, confusion, knn, metrics, smote, split, train, Algorithm, ConfusionMatrix,
    FeatureMatrix, Label, Preprocessor, SmoteConfig, SparseVector, TfIdfModel, TokenSequence, TrainConfig,
};
use spamsmote_cli::{run, Cli};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_secs: f64) -> Result<(), String> {
    check(elapsed.as_secs_f64() < limit_secs, || {
        format!("took {:.2}s, limit {limit_secs}s", elapsed.as_secs_f64())
    })
}

fn label(spam: bool) -> Label {
    if spam {
        Label::Spam
    } else {
        Label::NonSpam
    }
}

fn random_sparse(rng: &mut SeededRng, dim: usize, density: f64, levels: Option<usize>) -> SparseVector {
    let dense: Vec<f64> = (0..dim)
        .map(|_| {
            if rng.next_f64() >= density {
                return 0.0;
            }
            match levels {
                Some(l) => (1 + rng.below(l)) as f64,
                None => rng.next_f64() * 4.0 - 2.0,
            }
        })
        .collect();
    SparseVector::from_dense(&dense)
}

fn balance_arithmetic() -> Outcome {
    let start = Instant::now();
    // A 251/41 generated corpus splits 80/20 into exactly 201/33.
    let corpus = generate_corpus(&FixtureConfig { seed: 7, ..FixtureConfig::default() });
    let s = split(&corpus, 0.8, 7).map_err(|e| e.to_string())?;
    let f = featurize(&Preprocessor::default(), &s.train, &s.test).map_err(|e| e.to_string())?;
    let counts = f.train.class_counts();
    check(counts.non_spam == 201 && counts.spam == 33, || format!("train split {counts:?}"))?;
    let (balanced, report) = balance_training_set(&f.train, &SmoteConfig::with_seed(7)).map_err(|e| e.to_string())?;
    let after = balanced.class_counts();
    check(after.non_spam == 201 && after.spam == 201, || format!("balanced {after:?}"))?;
    check(report.synthetic_created == 168 && balanced.len() == 402, || {
        format!("{} synthetic, {} rows", report.synthetic_created, balanced.len())
    })?;
    check(report.minority_before + report.synthetic_created == report.majority, || "report arithmetic".into())?;
    within(start.elapsed(), 1.0)?;
    Ok(format!("201/33 -> 201/201 with 168 synthetic in {:.3}s", start.elapsed().as_secs_f64()))
}

fn smote_geometry() -> Outcome {
    let start = Instant::now();
    let mut rng = SeededRng::new(0x5107E);
    let mut samples_checked = 0usize;
    for set in 0..1000 {
        let dim = 1 + rng.below(50);
        let t = 2 + rng.below(39);
        let density = 0.1 + 0.8 * rng.next_f64();
        let minority: Vec<SparseVector> = (0..t).map(|_| random_sparse(&mut rng, dim, density, None)).collect();
        let extra = rng.below(2 * t + 1);
        let config = SmoteConfig {
            k: 1 + rng.below(6),
            seed: rng.next_u64(),
            target: SmoteTarget::Equalize,
        };
        let out = smote(&minority, t + extra, &config).map_err(|e| e.to_string())?;
        check(out.len() == extra, || format!("set {set}: {} samples, wanted {extra}", out.len()))?;
        for s in &out {
            let (a, b) = (&minority[s.base], &minority[s.neighbor]);
            for c in 0..dim {
                let (x, y, v) = (a.get(c), b.get(c), s.vector.get(c));
                check(x.min(y) - 1e-12 <= v && v <= x.max(y) + 1e-12, || {
                    format!("set {set}: coordinate {c} = {v} outside [{x}, {y}]")
                })?;
            }
            for &c in s.vector.indices() {
                check(a.get(c) != 0.0 || b.get(c) != 0.0, || format!("set {set}: coordinate {c} outside parent supports"))?;
            }
            samples_checked += 1;
        }
    }
    within(start.elapsed(), 30.0)?;
    Ok(format!("1000 sets, {samples_checked} synthetic samples in {:.2}s", start.elapsed().as_secs_f64()))
}

fn knn_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = SeededRng::new(0xC0FFEE);
    let mut queries = 0usize;
    for set in 0..200 {
        let n = 2 + rng.below(199);
        let dim = 1 + rng.below(20);
        // Small integer levels make distance ties common.
        let levels = if set % 2 == 0 { Some(3) } else { None };
        let points: Vec<SparseVector> = (0..n).map(|_| random_sparse(&mut rng, dim, 0.4, levels)).collect();
        let dense: Vec<Vec<f64>> = points.iter().map(SparseVector::to_dense).collect();
        let k = 1 + rng.below(10);
        for q in 0..n {
            let mut all: Vec<(f64, usize)> = (0..n)
                .filter(|&i| i != q)
                .map(|i| (dense[q].iter().zip(&dense[i]).map(|(a, b)| (a - b) * (a - b)).sum(), i))
                .collect();
            all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let want: Vec<usize> = all.iter().take(k).map(|p| p.1).collect();
            let got = knn(&points, q, k).map_err(|e| e.to_string())?;
            check(got == want, || format!("set {set} query {q}: {got:?} != {want:?}"))?;
            queries += 1;
        }
    }
    within(start.elapsed(), 30.0)?;
    Ok(format!("200 sets, {queries} queries in {:.2}s", start.elapsed().as_secs_f64()))
}

fn tfidf_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = SeededRng::new(0x7F1DF);
    let words = ["spam", "buy", "pills", "linux", "python", "forum", "help", "video", "cheap"];
    let mut entries = 0usize;
    for corpus_no in 0..100 {
        let docs: Vec<Vec<String>> = (0..1 + rng.below(10))
            .map(|_| (0..rng.below(51)).map(|_| words[rng.below(words.len())].to_string()).collect())
            .collect();
        let seqs: Vec<TokenSequence> = docs.iter().map(|d| TokenSequence::new("d", d.clone())).collect();
        let model = TfIdfModel::fit(&seqs).map_err(|e| e.to_string())?;
        let n = docs.len() as f64;
        let df = |t: &str| docs.iter().filter(|d| d.iter().any(|x| x == t)).count() as f64;
        for (d, s) in docs.iter().zip(&seqs) {
            let v = model.transform(s);
            let len = d.len() as f64;
            let mut seen: HashMap<&str, ()> = HashMap::new();
            for t in d {
                if seen.insert(t, ()).is_some() {
                    continue;
                }
                let tf = d.iter().filter(|x| *x == t).count() as f64 / len;
                let want = tf * (n / df(t)).ln();
                let got = v.get(model.term_index(t).ok_or("term missing")?);
                check((got - want).abs() <= 1e-9, || format!("corpus {corpus_no} term {t}: {got} vs {want}"))?;
                entries += 1;
            }
            check(v.values().iter().all(|&x| x > 0.0), || "non-positive stored value".into())?;
        }
    }
    within(start.elapsed(), 10.0)?;
    Ok(format!("100 corpora, {entries} entries in {:.3}s", start.elapsed().as_secs_f64()))
}

fn metric_identities() -> Outcome {
    let start = Instant::now();
    let mut rng = SeededRng::new(0x3E7);
    for case in 0..1000 {
        let n = 1 + rng.below(200);
        let pred: Vec<Label> = (0..n).map(|_| label(rng.below(2) == 1)).collect();
        let act: Vec<Label> = (0..n).map(|_| label(rng.below(2) == 1)).collect();
        let m = metrics(confusion(&pred, &act).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let count = |p: Label, a: Label| pred.iter().zip(&act).filter(|(x, y)| **x == p && **y == a).count();
        let (tp, fp) = (count(Label::Spam, Label::Spam), count(Label::Spam, Label::NonSpam));
        let (fn_, tn) = (count(Label::NonSpam, Label::Spam), count(Label::NonSpam, Label::NonSpam));
        check(m.matrix == ConfusionMatrix { tp, fp, fn_, tn }, || format!("case {case}: counts differ"))?;
        check((m.accuracy - (tp + tn) as f64 / n as f64).abs() <= 1e-12, || format!("case {case}: accuracy"))?;
        let prec = (tp + fp > 0).then(|| tp as f64 / (tp + fp) as f64);
        let rec = (tp + fn_ > 0).then(|| tp as f64 / (tp + fn_) as f64);
        let close = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(x), Some(y)) => (x - y).abs() <= 1e-12,
            (None, None) => true,
            _ => false,
        };
        check(close(m.precision, prec) && close(m.recall, rec), || format!("case {case}: ratios"))?;
    }
    let nb = metrics(ConfusionMatrix { tp: 7, fp: 0, fn_: 3, tn: 62 }).map_err(|e| e.to_string())?;
    let f1 = nb.f1.ok_or("f1 undefined")?;
    check(nb.precision == Some(1.0) && nb.recall == Some(0.7), || "precision/recall".into())?;
    check((f1 - 0.82).abs() <= 0.005, || format!("f1 {f1}"))?;
    within(start.elapsed(), 5.0)?;
    Ok(format!("1000 recounts agree; P=1.0 R=0.7 gives F1 {f1:.4}"))
}

fn degenerate_rendering() -> Outcome {
    let actual: Vec<Label> = (0..100).map(|i| label(i >= 95)).collect();
    let predicted = vec![Label::NonSpam; 100];
    let m = metrics(confusion(&predicted, &actual).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    check(m.matrix == ConfusionMatrix { tp: 0, fp: 0, fn_: 5, tn: 95 }, || format!("{:?}", m.matrix))?;
    check(m.accuracy == 0.95, || format!("accuracy {}", m.accuracy))?;
    check(m.recall == Some(0.0), || format!("recall {:?}", m.recall))?;
    check(m.precision.is_none() && m.precision_or_zero() == 0.0, || "precision should be undefined".into())?;
    Ok("accuracy 0.95, recall 0, precision undefined (shown as 0.00)".into())
}

fn gradient_check() -> Outcome {
    let start = Instant::now();
    let mut rng = SeededRng::new(0x6AD);
    let mut worst = 0.0f64;
    for problem in 0..20 {
        let dim = 1 + rng.below(10);
        let n = 2 + rng.below(29);
        let rows: Vec<SparseVector> = (0..n).map(|_| random_sparse(&mut rng, dim, 0.6, None)).collect();
        let labels: Vec<Label> = (0..n).map(|_| label(rng.below(2) == 1)).collect();
        let m = FeatureMatrix::new(dim, rows, labels).map_err(|e| e.to_string())?;
        let w: Vec<f64> = (0..dim).map(|_| rng.gaussian()).collect();
        let b = rng.gaussian();
        let l2 = rng.next_f64() * 0.1;
        let (_, grad, grad_b) = logistic_objective(&m, &w, b, l2);
        let h = 1e-5;
        let loss = |w: &[f64], b: f64| logistic_objective(&m, w, b, l2).0;
        let mut pairs = Vec::new();
        for i in 0..dim {
            let (mut up, mut down) = (w.clone(), w.clone());
            up[i] += h;
            down[i] -= h;
            pairs.push((grad[i], (loss(&up, b) - loss(&down, b)) / (2.0 * h)));
        }
        pairs.push((grad_b, (loss(&w, b + h) - loss(&w, b - h)) / (2.0 * h)));
        for (a, fd) in pairs {
            let rel = (a - fd).abs() / a.abs().max(fd.abs()).max(1e-8);
            worst = worst.max(rel);
            check(rel <= 1e-4, || format!("problem {problem}: analytic {a} vs numeric {fd}"))?;
        }
    }
    within(start.elapsed(), 5.0)?;
    Ok(format!("20 problems, worst relative error {worst:.2e}"))
}

fn train_accuracy(m: &FeatureMatrix, config: &TrainConfig) -> Result<f64, String> {
    let model = train(m, config).map_err(|e| e.to_string())?;
    let pred = model.predict_batch(m).map_err(|e| e.to_string())?;
    Ok(pred.iter().zip(m.labels()).filter(|(a, b)| a == b).count() as f64 / m.len() as f64)
}

fn classifier_sanity() -> Outcome {
    let corpus = generate_corpus(&FixtureConfig::separable(100, 100, 5));
    let f = featurize(&Preprocessor::default(), &corpus, &corpus).map_err(|e| e.to_string())?;
    let lr = train_accuracy(&f.train, &TrainConfig::new(Algorithm::Logistic))?;
    let svm = train_accuracy(&f.train, &TrainConfig::new(Algorithm::Svm))?;
    check(lr >= 0.95, || format!("logistic train accuracy {lr} on separable text"))?;
    check(svm >= 0.95, || format!("svm train accuracy {svm} on separable text"))?;

    // Two Gaussian-ish blobs on either side of x0 + x1 = 0.
    let mut rng = SeededRng::new(0x5EB);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..120 {
        let spam = i % 2 == 0;
        let side = if spam { 1.0 } else { -1.0 };
        let p = [side * (1.0 + rng.next_f64()), side * (1.0 + rng.next_f64()) + 0.3 * rng.gaussian()];
        rows.push(SparseVector::from_dense(&p));
        labels.push(label(spam));
    }
    let blobs = FeatureMatrix::new(2, rows, labels).map_err(|e| e.to_string())?;
    let lr_blobs = train_accuracy(&blobs, &TrainConfig::new(Algorithm::Logistic))?;
    let svm_blobs = train_accuracy(&blobs, &TrainConfig::new(Algorithm::Svm))?;
    check(lr_blobs >= 0.95 && svm_blobs >= 0.95, || format!("blobs: LR {lr_blobs}, SVM {svm_blobs}"))?;

    let xor_points = [([0.0, 0.0], false), ([1.0, 1.0], false), ([1.0, 0.0], true), ([0.0, 1.0], true)];
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for _ in 0..5 {
        for (p, spam) in xor_points {
            rows.push(SparseVector::from_dense(&p));
            labels.push(label(spam));
        }
    }
    let xor = FeatureMatrix::new(2, rows, labels).map_err(|e| e.to_string())?;
    let tree = train_accuracy(&xor, &TrainConfig { tree_max_depth: Some(2), ..TrainConfig::new(Algorithm::Tree) })?;
    check(tree == 1.0, || format!("tree xor accuracy {tree}"))?;
    Ok(format!(
        "separable text LR {lr:.3} SVM {svm:.3}; separable blobs LR {lr_blobs:.3} SVM {svm_blobs:.3}; XOR depth-2 tree {tree:.1}"
    ))
}

fn directional_benefit() -> Outcome {
    let start = Instant::now();
    let mut details = Vec::new();
    for seed in [7u64, 11, 13] {
        let train_corpus = generate_corpus(&FixtureConfig {
            non_spam: 201,
            spam: 33,
            seed,
            id_prefix: "train".into(),
            ..FixtureConfig::default()
        });
        let test_corpus = generate_corpus(&FixtureConfig {
            non_spam: 20,
            spam: 20,
            seed: seed ^ 0xABCD,
            id_prefix: "test".into(),
            ..FixtureConfig::default()
        });
        let f = featurize(&Preprocessor::default(), &train_corpus, &test_corpus).map_err(|e| e.to_string())?;
        let configs: BTreeMap<Algorithm, TrainConfig> = [Algorithm::Nb, Algorithm::Svm]
            .into_iter()
            .map(|a| (a, TrainConfig { seed, ..TrainConfig::new(a) }))
            .collect();
        let report = compare(&f.train, &f.test, &[Algorithm::Nb, Algorithm::Svm], &SmoteConfig::with_seed(seed), &configs)
            .map_err(|e| e.to_string())?;
        for r in &report.results {
            let (with, without) = (r.with_smote.f1_or_zero(), r.without_smote.f1_or_zero());
            check(with >= without, || format!("seed {seed} {}: F1 {with:.3} < {without:.3}", r.algorithm))?;
            details.push(format!("{}@{seed} {with:.2}/{without:.2}", r.algorithm));
        }
    }
    within(start.elapsed(), 60.0)?;
    Ok(format!("F1 with/without: {}", details.join(", ")))
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let cli = Cli::try_parse_from(std::iter::once("spamsmote").chain(args.iter().copied())).map_err(|e| e.to_string())?;
    let mut sink = Vec::new();
    run(&cli, &mut sink).map_err(|e| e.to_string())
}

fn read(path: &Path) -> Result<Vec<u8>, String> {
    fs::read(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let data = dir.path().join("forum.csv");
    fs::write(&data, corpus_to_csv(&generate_corpus(&FixtureConfig { seed: 3, ..FixtureConfig::default() })))
        .map_err(|e| e.to_string())?;
    let data = data.to_str().ok_or("path")?;
    let mut bundles = Vec::new();
    let mut reports = Vec::new();
    for run_no in 0..2 {
        for algo in ["nb", "logistic", "svm", "tree"] {
            let out = dir.path().join(format!("{algo}-{run_no}.json"));
            run_cli(&[
                "--seed", "7", "--out", out.to_str().ok_or("path")?, "train", "--data", data, "--algo", algo,
                "--smote", "on", "--tree-max-features", "20",
            ])?;
            bundles.push(read(&out)?);
        }
        let prefix = dir.path().join(format!("report-{run_no}"));
        run_cli(&["--seed", "7", "--out", prefix.to_str().ok_or("path")?, "report", "--data", data])?;
        reports.push(read(&prefix.with_extension("json"))?);
    }
    check(bundles[..4] == bundles[4..], || "model bundles differ between runs".into())?;
    check(reports[0] == reports[1], || "report JSON differs between runs".into())?;
    Ok(format!(
        "4 bundles ({} bytes total) and report JSON ({} bytes) identical across runs",
        bundles[..4].iter().map(Vec::len).sum::<usize>(),
        reports[0].len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("balance arithmetic", balance_arithmetic),
        ("SMOTE geometry", smote_geometry),
        ("kNN oracle", knn_oracle),
        ("TF-IDF oracle", tfidf_oracle),
        ("metric identities", metric_identities),
        ("degenerate-metric rendering", degenerate_rendering),
        ("gradient check", gradient_check),
        ("classifier sanity", classifier_sanity),
        ("directional SMOTE benefit", directional_benefit),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS  {:>2}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {:>2}. {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
