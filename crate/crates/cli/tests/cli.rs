//! End-to-end tests of the geez-forge binary: every command, the exit-code
//! taxonomy, and the CLI-equals-library contract.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_geez-forge"));
    // Keep tests hermetic even if the environment sets a default config.
    cmd.env_remove("GEEZ_FORGE_CONFIG");
    cmd
}

fn write_file(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn run_with_stdin(mut cmd: Command, input: &str) -> Output {
    cmd.stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped());
    let mut child = cmd.spawn().unwrap();
    // A child that fails fast may close stdin before we finish writing;
    // the broken pipe is expected there, not a test failure.
    let _ = child.stdin.as_mut().unwrap().write_all(input.as_bytes());
    child.wait_with_output().unwrap()
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

#[test]
fn version_names_model_format() {
    let output = bin().arg("--version").output().unwrap();
    assert!(output.status.success());
    let text = stdout(&output);
    assert!(text.contains("geez-forge"));
    assert!(text.contains("model format 1"));
}

#[test]
fn usage_error_exits_1() {
    let output = bin().arg("score").arg("nonsense-metric").output().unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn missing_file_exits_3() {
    let output = bin()
        .args(["score", "bleu", "--hyp", "/nonexistent/h", "--ref", "/nonexistent/r"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
}

#[test]
fn length_mismatch_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let hyp = write_file(dir.path(), "h.txt", "a\nb\n");
    let reference = write_file(dir.path(), "r.txt", "a\n");
    let output = bin()
        .args(["score", "bleu"])
        .arg("--hyp")
        .arg(&hyp)
        .arg("--ref")
        .arg(&reference)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn score_chrf_identity_prints_100() {
    let dir = tempfile::tempdir().unwrap();
    let hyp = write_file(dir.path(), "h.txt", "ሰላም ዓለም\nhello world\n");
    let output = bin()
        .args(["score", "chrf"])
        .arg("--hyp")
        .arg(&hyp)
        .arg("--ref")
        .arg(&hyp)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(stdout(&output).trim(), "chrF = 100.00");
}

#[test]
fn normalize_stdin_to_stdout() {
    let output = run_with_stdin(
        {
            let mut c = bin();
            c.arg("normalize");
            c
        },
        "ሠናይ   ፀሓይ\n",
    );
    assert!(output.status.success());
    assert_eq!(stdout(&output), "ሰናይ ጸሃይ\n");
}

#[test]
fn normalize_in_place_rewrites_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_file(dir.path(), "text.txt", "ሠላም\nፀሓይ\n");
    let output = bin()
        .args(["normalize", "--in-place"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(output.status.success());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "ሰላም\nጸሃይ\n");
}

#[test]
fn normalize_without_in_place_leaves_input_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_file(dir.path(), "text.txt", "ሠላም\n");
    let output = bin().arg("normalize").arg(&path).output().unwrap();
    assert!(output.status.success());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "ሠላም\n");
    assert_eq!(stdout(&output), "ሰላም\n");
}

#[test]
fn tokenizer_round_trip_through_pipes() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_file(
        dir.path(),
        "corpus.txt",
        "ሰላም ዓለም\nሰላም ክቡር ዓለም\nደሓን ኩን\n",
    );
    let model = dir.path().join("model.json");
    let output = bin()
        .args(["tokenizer", "train", "--vocab-size", "64", "--min-pair-frequency", "1"])
        .arg("--corpus")
        .arg(&corpus)
        .arg("--out")
        .arg(&model)
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");

    let encode = run_with_stdin(
        {
            let mut c = bin();
            c.args(["tokenizer", "encode", "--model"]).arg(&model);
            c
        },
        "ሰላም ዓለም\n",
    );
    assert!(encode.status.success());
    let ids_line = stdout(&encode);
    assert!(ids_line.trim().split(' ').all(|t| t.parse::<u32>().is_ok()));

    let decode = run_with_stdin(
        {
            let mut c = bin();
            c.args(["tokenizer", "decode", "--model"]).arg(&model);
            c
        },
        &ids_line,
    );
    assert!(decode.status.success());
    // Decode returns the normalized input (ዓ folds to ኣ by default).
    assert_eq!(stdout(&decode), "ሰላም ኣለም\n");

    // CLI equals library: same ids as encoding through the API.
    let loaded = geez_forge::subword::TokenizerModel::load(&model).unwrap();
    let api_ids: Vec<String> = loaded
        .encode("ሰላም ዓለም")
        .ids
        .iter()
        .map(u32::to_string)
        .collect();
    assert_eq!(ids_line.trim(), api_ids.join(" "));

    let pieces = run_with_stdin(
        {
            let mut c = bin();
            c.args(["tokenizer", "encode", "--pieces", "--model"]).arg(&model);
            c
        },
        "ሰላም ዓለም\n",
    );
    assert_eq!(
        stdout(&pieces).trim(),
        loaded.encode("ሰላም ዓለም").pieces.join(" ")
    );
}

#[test]
fn tokenizer_rejects_bad_model_version() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_file(dir.path(), "c.txt", "ab ab\n");
    let model = dir.path().join("m.json");
    assert!(bin()
        .args(["tokenizer", "train", "--vocab-size", "16"])
        .arg("--corpus")
        .arg(&corpus)
        .arg("--out")
        .arg(&model)
        .output()
        .unwrap()
        .status
        .success());
    let tampered = std::fs::read_to_string(&model)
        .unwrap()
        .replace("\"version\": \"1\"", "\"version\": \"99\"");
    std::fs::write(&model, tampered).unwrap();
    let output = run_with_stdin(
        {
            let mut c = bin();
            c.args(["tokenizer", "encode", "--model"]).arg(&model);
            c
        },
        "ab\n",
    );
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn corpus_clean_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(
        dir.path(),
        "corpus.tsv",
        "good morning\tሰላም ብሩህ\nbad row with latin target\tlatin text here\n",
    );
    let out = dir.path().join("kept.tsv");
    let report = dir.path().join("report.json");
    let output = bin()
        .args(["corpus", "clean"])
        .arg("--in")
        .arg(&input)
        .arg("--out")
        .arg(&out)
        .arg("--report")
        .arg(&report)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(report["removed_count"], 1);
    assert_eq!(report["kept_count"], 1);
    let kept = std::fs::read_to_string(&out).unwrap();
    assert_eq!(kept, "good morning\tሰላም ብሩህ\n");
}

#[test]
fn corpus_clean_malformed_row_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "bad.tsv", "no tab on this line\n");
    let output = bin()
        .args(["corpus", "clean"])
        .arg("--in")
        .arg(&input)
        .arg("--out")
        .arg(dir.path().join("out.tsv"))
        .arg("--report")
        .arg(dir.path().join("report.json"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn corpus_split_writes_three_files() {
    let dir = tempfile::tempdir().unwrap();
    let rows: String = (0..10).map(|i| format!("src {i}\ttgt {i}\n")).collect();
    let input = write_file(dir.path(), "corpus.tsv", &rows);
    let prefix = dir.path().join("part").display().to_string();
    let output = bin()
        .args(["corpus", "split", "--ratios", "0.8,0.1,0.1", "--seed", "42"])
        .arg("--in")
        .arg(&input)
        .args(["--out-prefix", &prefix])
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let count = |name: &str| {
        std::fs::read_to_string(format!("{prefix}.{name}.tsv"))
            .unwrap()
            .lines()
            .count()
    };
    assert_eq!((count("train"), count("valid"), count("test")), (8, 1, 1));

    // Bad ratios are a usage error.
    let bad = bin()
        .args(["corpus", "split", "--ratios", "1.0,0,0"])
        .arg("--in")
        .arg(&input)
        .args(["--out-prefix", &prefix])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn corpus_stats_renders_total_row() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(
        dir.path(),
        "corpus.tsv",
        "a b c\tሀ ለ\teducation\nd e\tሐ መ ሠ\teducation\n",
    );
    let output = bin()
        .args(["corpus", "stats"])
        .arg("--in")
        .arg(&input)
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = stdout(&output);
    assert!(text.contains("Education\t–\t2\t2.5 / 2.5"));
    assert!(text.contains("Total\t–\t2\t–"));

    let json_output = bin()
        .args(["corpus", "stats", "--format", "json"])
        .arg("--in")
        .arg(&input)
        .output()
        .unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&json_output)).unwrap();
    assert_eq!(parsed[0]["domain"], "education");
}

#[test]
fn significance_reports_adjusted_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let refs = write_file(dir.path(), "ref.txt", "a b c\nd e f\ng h i\nj k l\n");
    let hyp_a = write_file(dir.path(), "a.txt", "a b x\nd y f\nz h i\nj k w\n");
    let output = bin()
        .args([
            "significance",
            "--metric",
            "chrf",
            "--resamples",
            "200",
            "--seed",
            "42",
            "--alpha",
            "0.05",
            "--family-size",
            "10",
        ])
        .arg("--hyp-a")
        .arg(&hyp_a)
        .arg("--hyp-b")
        .arg(&refs)
        .arg("--ref")
        .arg(&refs)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let result: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(result["adjusted_alpha"], 0.005);
    assert_eq!(result["score_b"], 100.0);
    assert_eq!(result["n_resamples"], 200);
    assert_eq!(result["seed"], 42);
}

#[test]
fn report_table_and_compare() {
    let dir = tempfile::tempdir().unwrap();
    let entries = serde_json::json!([
        {"system": "base", "direction": "en_to_ti", "domain": "in-domain", "metric": "bleu", "value": 17.6},
        {"system": "base", "direction": "en_to_ti", "domain": "in-domain", "metric": "chrf", "value": 39.59},
        {"system": "ours", "direction": "en_to_ti", "domain": "in-domain", "metric": "bleu", "value": 25.4},
        {"system": "ours", "direction": "en_to_ti", "domain": "in-domain", "metric": "chrf", "value": 51.03}
    ]);
    let input = write_file(dir.path(), "entries.json", &entries.to_string());

    let table = bin()
        .args(["report", "table"])
        .arg("--in")
        .arg(&input)
        .output()
        .unwrap();
    assert!(table.status.success());
    let text = stdout(&table);
    assert!(text.contains("base\ten_to_ti\t17.60\t39.59"));
    assert!(text.contains("ours\ten_to_ti\t25.40\t51.03"));

    let compare = bin()
        .args(["report", "compare", "--baseline", "base", "--candidate", "ours"])
        .arg("--in")
        .arg(&input)
        .output()
        .unwrap();
    assert!(compare.status.success());
    let text = stdout(&compare);
    assert!(text.contains("+7.80"));
    assert!(text.contains("+11.44"));

    let missing = bin()
        .args(["report", "compare", "--baseline", "nope", "--candidate", "ours"])
        .arg("--in")
        .arg(&input)
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn env_var_supplies_default_config() {
    let dir = tempfile::tempdir().unwrap();
    // Identity config: no folding, no collapsing.
    let cfg = write_file(
        dir.path(),
        "norm.json",
        r#"{"unicode_canonicalization": false, "strip_controls": false,
            "collapse_whitespace": false, "char_map": []}"#,
    );
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_geez-forge"));
    cmd.env("GEEZ_FORGE_CONFIG", &cfg).arg("normalize");
    let output = run_with_stdin(cmd, "ሠናይ   ፀሓይ\n");
    assert!(output.status.success());
    // Untouched: the identity config took precedence over the built-in table.
    assert_eq!(stdout(&output), "ሠናይ   ፀሓይ\n");
}

#[test]
fn bad_config_file_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_file(
        dir.path(),
        "norm.json",
        r#"{"unicode_canonicalization": true, "strip_controls": true,
            "collapse_whitespace": true, "char_map": [["ሀ", "ሀ"]]}"#,
    );
    let mut cmd = bin();
    cmd.arg("normalize").arg("--config").arg(&cfg);
    let output = run_with_stdin(cmd, "x\n");
    assert_eq!(output.status.code(), Some(1));
}
