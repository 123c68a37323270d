use std::path::Path;
use std::process::{Command, Output};

fn arithsemi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arithsemi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn generate_poly_f2() {
    let out = arithsemi(&["generate", "--semigroup", "polyfq", "--q", "2", "--nmax", "10"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "n,P,G,lambda,g_norm,r");
    assert_eq!(rows.len(), 12);
    let g: Vec<u64> = rows[1..].iter().map(|r| r.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert_eq!(g, (0..=10).map(|n| 1u64 << n).collect::<Vec<_>>());
}

#[test]
fn generate_one_degree() {
    let out = arithsemi(&["generate", "--q", "3", "--nmax", "1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().count(), 3);
}

#[test]
fn generate_writes_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("seq.csv");
    let out = arithsemi(&["generate", "--q", "2", "--nmax", "100", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 102);
}

#[test]
fn negative_generator_count_is_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.csv", "n,P,G\n0,,1\n1,2,\n2,-1,\n");
    let out = arithsemi(&["generate", "--semigroup", "file", "--pfile", &p, "--nmax", "2"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("not a semigroup"), "{}", stderr(&out));
}

#[test]
fn explicit_files_roundtrip_through_generate() {
    let dir = tempfile::tempdir().unwrap();
    let out = arithsemi(&["generate", "--q", "3", "--nmax", "12"]);
    let table = write(dir.path(), "t.csv", &stdout(&out));
    let from_g = arithsemi(&["generate", "--semigroup", "file", "--gfile", &table, "--nmax", "12"]);
    assert_eq!(code(&from_g), 0, "{}", stderr(&from_g));
    let from_p = arithsemi(&["generate", "--semigroup", "file", "--pfile", &table, "--nmax", "12"]);
    assert_eq!(code(&from_p), 0);
    let pg = |o: &Output| -> Vec<String> {
        stdout(o).lines().map(|l| l.split(',').take(3).collect::<Vec<_>>().join(",")).collect()
    };
    assert_eq!(pg(&from_g), pg(&out));
    assert_eq!(pg(&from_p), pg(&out));
}

#[test]
fn usage_errors() {
    assert_eq!(code(&arithsemi(&["generate", "--q", "1", "--nmax", "5"])), 2);
    assert_eq!(code(&arithsemi(&["generate", "--q", "2"])), 2);
    assert_eq!(code(&arithsemi(&["frobnicate"])), 2);
    assert_eq!(code(&arithsemi(&["generate", "--nmax", "5", "--semigroup", "file"])), 2);
    assert_eq!(code(&arithsemi(&["verify", "--nmax", "80", "--tol", "unknown=1"])), 2);
    assert_eq!(code(&arithsemi(&["verify", "--nmax", "80", "--tol", "lemma3=-1"])), 2);
    assert_eq!(code(&arithsemi(&["generate", "--nmax", "5", "--format", "json"])), 2);
    assert_eq!(code(&arithsemi(&["--help"])), 0);
}

#[test]
fn config_errors_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "nmax = 50\ncolour = \"blue\"\n");
    assert_eq!(code(&arithsemi(&["generate", "--config", &bad])), 3);
    let broken = write(dir.path(), "broken.toml", "nmax = [\n");
    assert_eq!(code(&arithsemi(&["generate", "--config", &broken])), 3);
    let good = write(dir.path(), "good.toml", "nmax = 50\nq = 3\n");
    let out = arithsemi(&["generate", "--config", &good, "--nmax", "8"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 10);
    assert!(text.lines().last().unwrap().starts_with("8,"));
    assert!(text.contains("\n1,3,3,"));
}

#[test]
fn io_errors() {
    let out = arithsemi(&["generate", "--semigroup", "file", "--pfile", "/nonexistent/p.csv", "--nmax", "4"]);
    assert_eq!(code(&out), 4);
    let out = arithsemi(&["generate", "--nmax", "4", "--out", "/nonexistent/dir/out.csv"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn identity_command() {
    let out = arithsemi(&["identity", "--semigroup", "polyfq", "--q", "5", "--nmax", "300"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = arithsemi(&["identity", "--semigroup", "perturbed", "--q", "2", "--nmax", "60", "--seed", "7"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn constants_command() {
    let out = arithsemi(&["constants", "--q", "2", "--nmax", "400"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let c = &doc["constants"];
    let value = |k: &str| c[k]["value"].as_f64().unwrap();
    assert!((value("C_2") - 0.5614595).abs() < 1e-6);
    assert!((value("C_3") - 1.38272).abs() < 1e-5);
    assert!((value("C_M") - 0.452233).abs() < 1e-6);
    // 0.124983 is gamma - 0.452233, so it inherits the rounding of C_M
    assert!((value("C_1") - 0.124983).abs() < 2e-6);
    assert!((value("C_1") - (value("gamma") - value("C_M"))).abs() < 1e-15);
    assert_eq!(doc["schema_version"], 1);
}

#[test]
fn constants_of_q3_use_a_equal_one() {
    let out = arithsemi(&["constants", "--q", "3", "--nmax", "300", "--digits", "12"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let c2 = doc["constants"]["C_2"]["value"].as_f64().unwrap();
    assert!((c2 - (-0.5772156649015329f64).exp()).abs() < 1e-11);
    assert_eq!(doc["constants"]["A"]["value"].as_f64(), Some(1.0));
}

#[test]
fn constants_of_the_zero_semigroup() {
    let dir = tempfile::tempdir().unwrap();
    let rows: String = (1..=80).map(|n| format!("{n},0,\n")).collect();
    let p = write(dir.path(), "zero.csv", &format!("n,P,G\n0,,1\n{rows}"));
    let out = arithsemi(&["constants", "--semigroup", "file", "--pfile", &p, "--q", "2", "--nmax", "80"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["degenerate"], true);
    assert_eq!(doc["constants"]["C_M"]["value"].as_f64(), Some(0.0));
    assert_eq!(doc["constants"]["C_3"]["value"].as_f64(), Some(0.0));
    let out = arithsemi(&["verify", "--semigroup", "file", "--pfile", &p, "--q", "2", "--nmax", "80"]);
    assert_eq!(code(&out), 5);
    assert!(stderr(&out).contains("nondegenerate"));
}

#[test]
fn verify_passes_and_fails_with_named_checks() {
    let out = arithsemi(&["verify", "--q", "2", "--nmax", "2000"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    let out = arithsemi(&["verify", "--q", "2", "--nmax", "2000", "--tol", "mertens_sum=1e-6"]);
    assert_eq!(code(&out), 5);
    assert!(stderr(&out).contains("mertens_sum"));
    assert!(!stdout(&out).is_empty());
}

#[test]
fn verify_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = arithsemi(&["verify", "--semigroup", "perturbed", "--q", "3", "--nmax", "200", "--seed", "11",
            "--threads", "2", "--out", path.to_str().unwrap()]);
        assert!(matches!(code(&out), 0 | 5), "{}", stderr(&out));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn meissel_scan() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let out = arithsemi(&["meissel", "--alpha", "0.5,0.2,0.1", "--nmax", "1000", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "alpha,series,tail_bound,J,identity_residual,D_over_alpha");
    assert_eq!(rows.len(), 4);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path.with_extension("json")).unwrap()).unwrap();
    assert_eq!(json["evaluations"].as_array().unwrap().len(), 3);

    let out = arithsemi(&["meissel", "--alpha", "0.25", "--nmax", "500", "--k", "400", "--format", "json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["evaluations"][0]["K"], 400);
    assert_eq!(json["evaluations"][0]["N"], 500);
    assert_eq!(code(&arithsemi(&["meissel", "--alpha", "0.1,0.2", "--nmax", "200"])), 1);
    assert_eq!(code(&arithsemi(&["meissel", "--alpha", "x", "--nmax", "200"])), 2);
}
