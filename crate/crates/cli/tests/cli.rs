use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

fn tempqa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tempqa")).args(args).output().expect("binary runs")
}

fn corpus() -> String {
    fixtures().join("corpus").display().to_string()
}

fn benchmark() -> String {
    fixtures().join("benchmark.jsonl").display().to_string()
}

fn ask(question: &str, extra: &[&str]) -> Output {
    let corpus = corpus();
    let mut args = vec!["ask", question, "--corpus", &corpus, "--reference-time", "2023-01-01"];
    args.extend_from_slice(extra);
    tempqa(&args)
}

#[test]
fn answered_question_exits_zero_with_json() {
    let out = ask("What award did Thomas Keneally receive in the year 1982?", &[]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["answers"][0]["label"], "Man Booker Prize");
    assert_eq!(v["refused"], false);
}

#[test]
fn refused_question_exits_three() {
    let out = ask("Record company of Queen in 14 March 1850?", &["--trace"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stdout).contains("Refused"));
}

#[test]
fn fallback_answers_corrupted_question() {
    let out = ask("Record company of Queen in 14 March 1850?", &["--fallback", "on-refusal"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["fallback_used"], true);
}

#[test]
fn errors_exit_one() {
    let out = tempqa(&["ask", "q", "--index", "/nonexistent/index.json", "--reference-time", "2023-01-01"]);
    assert_eq!(out.status.code(), Some(1));
    let corpus = corpus();
    assert_eq!(tempqa(&["ask", "q", "--corpus", &corpus]).status.code(), Some(1));
    assert_eq!(tempqa(&["ask", "q", "--corpus", &corpus, "--reference-time", "2023-01-01", "--mode", "bogus"]).status.code(), Some(1));
}

#[test]
fn malformed_corpus_reports_its_location() {
    let d = tempfile::tempdir().unwrap();
    for f in ["entities.jsonl", "kb_facts.jsonl", "text.jsonl", "tables.jsonl", "infoboxes.jsonl"] {
        std::fs::copy(fixtures().join("corpus").join(f), d.path().join(f)).unwrap();
    }
    std::fs::write(d.path().join("kb_facts.jsonl"), "{not json\n").unwrap();
    let dir = d.path().display().to_string();
    let out = tempqa(&["ingest", "--corpus", &dir, "--out", &d.path().join("i.json").display().to_string()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("kb_facts.jsonl:1"), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn ingest_then_ask_from_index() {
    let d = tempfile::tempdir().unwrap();
    let index = d.path().join("index.json").display().to_string();
    let corpus = corpus();
    assert_eq!(tempqa(&["ingest", "--corpus", &corpus, "--out", &index]).status.code(), Some(0));
    let out = tempqa(&["ask", "Record company of Queen in 1975?", "--index", &index, "--reference-time", "2023-01-01"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn eval_reports_three_metrics() {
    let d = tempfile::tempdir().unwrap();
    let report = d.path().join("report.json");
    let (corpus, bench) = (corpus(), benchmark());
    let out = tempqa(&["eval", &bench, "--corpus", &corpus, "--out", &report.display().to_string()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    for k in ["p_at_1", "mrr", "hit_at_5"] {
        assert!(v["metrics"][k].is_number(), "{k}");
    }
}

#[test]
fn forge_and_corrupt_are_reproducible() {
    let d = tempfile::tempdir().unwrap();
    let corpus = corpus();
    let run = |name: &str| {
        let out = d.path().join(name);
        assert_eq!(tempqa(&["forge", "--corpus", &corpus, "--seed", "7", "--out", &out.display().to_string()]).status.code(), Some(0));
        ["train.jsonl", "dev.jsonl", "test.jsonl", "train_pairs.jsonl"].map(|f| std::fs::read(out.join(f)).unwrap())
    };
    assert_eq!(run("a"), run("b"));

    let bench = benchmark();
    let corrupt = || tempqa(&["corrupt", &bench, "--corpus", &corpus, "--seed", "3"]);
    let (a, b) = (corrupt(), corrupt());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stderr).contains("q-raab: no explicit temporal value"));
}

#[test]
fn verify_flags_unfaithful_lautner_answer() {
    let corpus = corpus();
    let out = tempqa(&[
        "verify", "What movies starring Taylor Lautner in 2011?", "--corpus", &corpus, "--reference-time", "2023-01-01", "--mode", "unfaith",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["temporal_satisfied"], false);
}
