use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn vmwe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vmwe")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(code(&vmwe(&["--help"])), 0);
    assert_eq!(code(&vmwe(&["run", "--help"])), 0);
    assert_eq!(code(&vmwe(&["run", "--bogus"])), 1);
    assert_eq!(code(&vmwe(&["rank", "--method", "pca", "--features", "x", "--out", "y"])), 1);
}

#[test]
fn invalid_config_exits_with_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "folds = 5\n").unwrap();
    let out = vmwe(&["run", "--config", p(&cfg)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("'train'"));

    fs::write(&cfg, "train = \"missing.cupt\"\n").unwrap();
    assert_eq!(code(&vmwe(&["run", "--config", p(&cfg)])), 1);

    fs::write(&cfg, format!("train = {:?}\nsurprise = 1\n", fixture("pipeline_train.cupt"))).unwrap();
    assert_eq!(code(&vmwe(&["run", "--config", p(&cfg)])), 1);

    let missing = dir.path().join("nope.jsonl");
    assert_eq!(code(&vmwe(&["featurize", "--lexicon", p(&missing), "--candidates", p(&missing), "--out", "x"])), 1);
}

#[test]
fn stage_failure_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cupt");
    fs::write(&bad, "# sent_id = 1\n1\tx\tx\tNOUN\n\n").unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "train = \"bad.cupt\"\n").unwrap();
    let out = vmwe(&["run", "--config", p(&cfg), "--out", p(&dir.path().join("run"))]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("stage 'read' failed"));
}

#[test]
fn run_smoke_on_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    let start = Instant::now();
    let out = vmwe(&["--jobs", "2", "run", "--config", p(&fixture("run.toml")), "--out", p(&run)]);
    assert!(start.elapsed().as_secs() < 10, "took {:?}", start.elapsed());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("| FREQ") && stdout.contains("seen/LVC"));

    let fp = fs::read_to_string(run.join("summary.txt")).unwrap();
    let fp = fp.lines().next().unwrap().strip_prefix("# fingerprint=").unwrap().to_string();
    assert_eq!(fp.len(), 64);
    for name in [
        "config.json",
        "lexicon.json",
        "train.candidates.jsonl",
        "train.extraction.json",
        "train.features.jsonl",
        "train.matrix.tsv",
        "rankings/freq.json",
        "rankings/forest.json",
        "tuning/gain-svm.json",
        "tuning/chi2-tree.json",
        "summary.tsv",
        "model.json",
        "test.predictions.jsonl",
        "system.cupt",
        "evaluation.json",
        "evaluation.txt",
    ] {
        let text = fs::read_to_string(run.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(text.contains(&fp), "{name} lacks the run fingerprint");
    }
    let system = fs::read_to_string(run.join("system.cupt")).unwrap();
    assert!(system.lines().any(|l| l.ends_with("\t1:LVC")));
}

#[test]
fn stages_chain_by_hand() {
    let dir = tempfile::tempdir().unwrap();
    let d = |n: &str| dir.path().join(n);
    let train = fixture("pipeline_train.cupt");
    let test = fixture("pipeline_test.cupt");
    let steps: Vec<Vec<String>> = vec![
        vec!["lexicon", "--train", p(&train), "--out", p(&d("lex.json"))],
        vec!["extract", "--lexicon", p(&d("lex.json")), "--corpus", p(&train), "--out", p(&d("tr.cands.jsonl")), "--report", p(&d("tr.report.json"))],
        vec!["featurize", "--lexicon", p(&d("lex.json")), "--candidates", p(&d("tr.cands.jsonl")), "--out", p(&d("tr.feats.jsonl")), "--tsv", p(&d("tr.tsv"))],
        vec!["rank", "--method", "chi2", "--features", p(&d("tr.feats.jsonl")), "--out", p(&d("chi2.json"))],
        vec!["tune", "--ranking", p(&d("chi2.json")), "--candidates", p(&d("tr.feats.jsonl")), "--classifier", "svm", "--folds", "5", "--out", p(&d("tune.json"))],
        vec!["train", "--candidates", p(&d("tr.feats.jsonl")), "--tuning", p(&d("tune.json")), "--out", p(&d("model.json"))],
        vec!["extract", "--lexicon", p(&d("lex.json")), "--corpus", p(&test), "--out", p(&d("te.cands.jsonl"))],
        vec!["predict", "--model", p(&d("model.json")), "--candidates", p(&d("te.cands.jsonl")), "--lexicon", p(&d("lex.json")), "--out", p(&d("te.pred.jsonl")), "--corpus", p(&test), "--cupt", p(&d("system.cupt"))],
        vec!["evaluate", "--gold", p(&test), "--pred", p(&d("system.cupt")), "--lexicon", p(&d("lex.json")), "--scope", "standard", "--out", p(&d("eval.json"))],
        vec!["evaluate", "--predictions", p(&d("te.pred.jsonl")), "--features", p(&d("te.cands.jsonl")), "--lexicon", p(&d("lex.json"))],
        vec!["sample", "--lexicon", p(&d("lex.json")), "--strata", p(&fixture("strata.toml")), "--part", &format!("a={}", p(&train)), "--part", &format!("b={}", p(&test)), "--cap", "6", "--out", p(&d("sample.jsonl"))],
    ]
    .into_iter()
    .map(|s| s.into_iter().map(String::from).collect())
    .collect();
    for step in &steps {
        let args: Vec<&str> = step.iter().map(String::as_str).collect();
        let out = vmwe(&args);
        assert_eq!(code(&out), 0, "{}: {}", step[0], String::from_utf8_lossy(&out.stderr));
    }
    let stdout = String::from_utf8_lossy(&vmwe(&["evaluate", "--gold", p(&test), "--pred", p(&d("system.cupt")), "--lexicon", p(&d("lex.json"))]).stdout).to_string();
    assert!(stdout.contains("seen"), "{stdout}");
    assert!(d("sample.types.json").is_file());
}
