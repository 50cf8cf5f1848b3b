use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/toy").join(name)
}

fn semclust(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semclust"))
        .args(args)
        .env_remove("SEMCLUST_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn build(dir: &Path) -> PathBuf {
    let idx = dir.join("idx");
    let o = semclust(&["--config", s(&fixture("run.toml")), "index", "--index-dir", s(&idx)]);
    assert!(o.status.success(), "{}", stderr(&o));
    idx
}

fn search(idx: &Path, system: &str, out: &Path, extra: &[&str]) -> Output {
    let queries = fixture("queries.tsv");
    let mut args = vec![
        "search",
        "--index-dir",
        s(idx),
        "--queries",
        s(&queries),
        "--system",
        system,
        "-o",
        s(out),
    ];
    args.extend_from_slice(extra);
    semclust(&args)
}

#[test]
fn index_reports_and_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let idx = dir.path().join("idx");
    let o = semclust(&["--config", s(&fixture("run.toml")), "index", "--index-dir", s(&idx)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("clusters: "), "{text}");
    assert!(text.contains("vocabulary: 23"), "{text}");
    assert!(text.contains("estimated from synonym pairs"), "{text}");
    assert!(idx.join("manifest.json").exists());
}

#[test]
fn default_epsilon_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let o = semclust(&[
        "index",
        "--corpus",
        s(&fixture("corpus.jsonl")),
        "--embeddings",
        s(&fixture("embeddings.vec")),
        "--index-dir",
        s(&dir.path().join("idx")),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("epsilon: 0.35 (default"), "{}", stdout(&o));
}

#[test]
fn missing_embeddings_path_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nowhere.vec");
    let o = semclust(&[
        "index",
        "--corpus",
        s(&fixture("corpus.jsonl")),
        "--embeddings",
        s(&missing),
        "--index-dir",
        s(&dir.path().join("idx")),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("nowhere.vec"), "{}", stderr(&o));
}

#[test]
fn rebuild_gives_identical_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let (ia, ib) = (build(a.path()), build(b.path()));
    for name in ["manifest.json", "clusters.json", "documents.json", "stats.json", "vectors.txt"] {
        assert_eq!(std::fs::read(ia.join(name)).unwrap(), std::fs::read(ib.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn bm25_run_matches_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let idx = build(dir.path());
    let run = dir.path().join("bm25.run");
    let o = search(&idx, "bm25", &run, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        std::fs::read_to_string(&run).unwrap(),
        std::fs::read_to_string(fixture("golden_bm25.run")).unwrap()
    );
}

#[test]
fn combined_with_k_one_writes_one_line_per_query() {
    let dir = tempfile::tempdir().unwrap();
    let idx = build(dir.path());
    let run = dir.path().join("c.run");
    let o = search(&idx, "combined", &run, &["--k", "1", "--embeddings", s(&fixture("embeddings.vec"))]);
    assert!(o.status.success(), "{}", stderr(&o));
    let lines: Vec<String> = std::fs::read_to_string(&run).unwrap().lines().map(String::from).collect();
    assert_eq!(lines.len(), 5);
    assert!(lines.iter().all(|l| l.ends_with(" combined") && l.split(' ').nth(3) == Some("1")));
}

#[test]
fn searches_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let idx = build(dir.path());
    for system in ["semantic", "combined", "avg-baseline"] {
        let (x, y) = (dir.path().join("x.run"), dir.path().join("y.run"));
        assert!(search(&idx, system, &x, &[]).status.success());
        assert!(search(&idx, system, &y, &[]).status.success());
        assert_eq!(std::fs::read(&x).unwrap(), std::fs::read(&y).unwrap(), "{system}");
    }
}

#[test]
fn unknown_system_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let idx = build(dir.path());
    let o = search(&idx, "tfidf", &dir.path().join("x.run"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("tfidf"));
}

#[test]
fn mismatched_parameters_are_refused() {
    let dir = tempfile::tempdir().unwrap();
    let idx = build(dir.path());
    for flag in [["--epsilon", "0.2"], ["--gamma", "2"], ["--k1", "2.0"], ["--b", "0.5"]] {
        let o = search(&idx, "bm25", &dir.path().join("x.run"), &flag);
        assert_eq!(o.status.code(), Some(5), "{flag:?}");
        assert!(stderr(&o).contains("manifest"), "{}", stderr(&o));
    }
}

#[test]
fn evaluate_golden_run_matches_reference_report() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("report.json");
    let o = semclust(&[
        "evaluate",
        "--run",
        s(&fixture("golden_bm25.run")),
        "--qrels",
        s(&fixture("qrels.txt")),
        "--json",
        s(&json),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("MAP"));
    let got: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let want: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("golden_bm25_report.json")).unwrap()).unwrap();
    for key in ["map", "r_prec", "mrr"] {
        let (g, w) = (got[key].as_f64().unwrap(), want[key].as_f64().unwrap());
        assert!((g - w).abs() < 1e-12, "{key}: {g} vs {w}");
    }
    assert_eq!(got["queries"], want["queries"]);
}

#[test]
fn compare_with_itself_reports_no_difference() {
    let o = semclust(&[
        "compare",
        "--run-a",
        s(&fixture("golden_bm25.run")),
        "--run-b",
        s(&fixture("golden_bm25.run")),
        "--qrels",
        s(&fixture("qrels.txt")),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("no difference"), "{}", stdout(&o));
}

#[test]
fn compare_two_systems() {
    let dir = tempfile::tempdir().unwrap();
    let idx = build(dir.path());
    let (a, b) = (dir.path().join("a.run"), dir.path().join("b.run"));
    assert!(search(&idx, "avg-baseline", &a, &[]).status.success());
    assert!(search(&idx, "bm25", &b, &[]).status.success());
    let o = semclust(&[
        "compare",
        "--run-a",
        s(&a),
        "--run-b",
        s(&b),
        "--qrels",
        s(&fixture("qrels.txt")),
        "--metric",
        "rr",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("df: 4") || text.contains("no difference"), "{text}");
}

#[test]
fn reformulate_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let o = semclust(&[
            "--config",
            s(&fixture("run.toml")),
            "reformulate",
            "--p",
            "0.5",
            "--seed",
            seed,
            "-o",
            s(&out),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        std::fs::read_to_string(out).unwrap()
    };
    assert_eq!(run("a.tsv", "17"), run("b.tsv", "17"));
    let all = {
        let out = dir.path().join("all.tsv");
        let o = semclust(&["--config", s(&fixture("run.toml")), "reformulate", "--p", "1", "-o", s(&out)]);
        assert!(o.status.success());
        std::fs::read_to_string(out).unwrap()
    };
    assert!(!all.contains("\tcar ") && !all.contains(" fruit"), "{all}");
}

#[test]
fn cluster_stats_on_all_entity_vocabulary() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("ne.jsonl");
    std::fs::write(
        &corpus,
        "{\"id\": \"a\", \"text\": \"We met Alice and Bob.\"}\n{\"id\": \"b\", \"text\": \"Then Alice saw Carol.\"}\n",
    )
    .unwrap();
    let gazetteer = dir.path().join("gaz.txt");
    std::fs::write(&gazetteer, "we\nmet\nand\nthen\nsaw\n").unwrap();
    let idx = dir.path().join("idx");
    let o = semclust(&[
        "index",
        "--corpus",
        s(&corpus),
        "--embeddings",
        s(&fixture("embeddings.vec")),
        "--gazetteer",
        s(&gazetteer),
        "--index-dir",
        s(&idx),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = semclust(&["cluster-stats", "--index-dir", s(&idx)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("singleton fraction: 1.0000"), "{}", stdout(&o));
}

#[test]
fn estimate_epsilon_prints_mean() {
    let o = semclust(&[
        "estimate-epsilon",
        "--embeddings",
        s(&fixture("embeddings.vec")),
        "--synonym-pairs",
        s(&fixture("pairs.tsv")),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let line = stdout(&o).lines().next().unwrap().to_string();
    let eps: f64 = line.trim_start_matches("epsilon: ").parse().unwrap();
    assert!(eps > 0.04 && eps < 0.06, "{eps}");
}

#[test]
fn config_from_environment_and_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_semclust"))
        .args(["estimate-epsilon"])
        .env("SEMCLUST_CONFIG", fixture("run.toml"))
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "gama = 1.0\n").unwrap();
    let o = semclust(&["--config", s(&bad), "estimate-epsilon"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("gama"), "{}", stderr(&o));
}

#[test]
fn parse_and_validation_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.vec");
    std::fs::write(&bad, "1 3\nword 1 0\n").unwrap();
    let o = semclust(&[
        "estimate-epsilon",
        "--embeddings",
        s(&bad),
        "--synonym-pairs",
        s(&fixture("pairs.tsv")),
    ]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(stderr(&o).contains("bad.vec:2"), "{}", stderr(&o));

    let o = semclust(&[
        "--config",
        s(&fixture("run.toml")),
        "reformulate",
        "--p",
        "1.5",
        "-o",
        s(&dir.path().join("x.tsv")),
    ]);
    assert_eq!(o.status.code(), Some(5), "{}", stderr(&o));

    let o = semclust(&["search"]);
    assert_eq!(o.status.code(), Some(2));
}
