use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_degdiv"))
}

fn run_to(dir: &Path, name: &str, args: &[&str]) -> (i32, Vec<u8>) {
    let out = dir.join(name);
    let mut full = vec!["degdiv", "--out", out.to_str().unwrap()];
    full.extend_from_slice(args);
    let code = degdiv::cli::run(full);
    (code, fs::read(&out).unwrap_or_default())
}

#[test]
fn envelope_shape() {
    let dir = tempfile::tempdir().unwrap();
    let (code, bytes) = run_to(dir.path(), "cm.json", &["cm", "--g", "1"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["manifest"]["command"], "cm");
    assert_eq!(v["manifest"]["verdict"], "report-only");
    assert_eq!(v["manifest"]["code_version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["body"]["c"], "144");
    let text = String::from_utf8(bytes).unwrap();
    assert!(!text.contains("unix_ms"));
    let side: Value = serde_json::from_slice(&fs::read(dir.path().join("cm.json.run.json")).unwrap()).unwrap();
    assert!(side["started_unix_ms"].as_u64().is_some());
}

#[test]
fn parameters_are_sorted() {
    let dir = tempfile::tempdir().unwrap();
    let (_, bytes) = run_to(dir.path(), "s.json", &["semigroup", "--generators", "5,3"]);
    let text = String::from_utf8(bytes).unwrap();
    let (a, b) = (text.find("\"check\"").unwrap(), text.find("\"generators\"").unwrap());
    assert!(a < b);
}

#[test]
fn output_independent_of_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["verify-cases", "--primes", "5,7", "--details"],
        &["verify-cases", "--primes", "13", "--mode", "sampled", "--count", "40", "--seed", "7"],
        &["genus", "--n-max", "60", "--reach", "4,10"],
        &["ew", "--c", "2", "--epsilon", "1/4", "--x", "20000"],
        &["bepsilon", "--cm-g", "1", "--epsilon", "1/2", "--x", "20000"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let mut outputs = Vec::new();
        for jobs in ["1", "3"] {
            let mut a = vec!["--jobs", jobs];
            a.extend_from_slice(args);
            let (code, bytes) = run_to(dir.path(), &format!("{i}-{jobs}.json"), &a);
            assert_eq!(code, 0, "{args:?}");
            outputs.push(bytes);
        }
        assert_eq!(outputs[0], outputs[1], "{args:?}");
        assert!(!outputs[0].is_empty());
    }
}

#[test]
fn sampled_seed_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["enumerate", "--p", "13", "--mode", "sampled", "--count", "30", "--seed", "11"];
    let (code, bytes) = run_to(dir.path(), "e.json", &args);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(v["manifest"]["seed"], 11);
    let (_, again) = run_to(dir.path(), "e2.json", &args);
    assert_eq!(bytes, again);
}

#[test]
fn cache_dir_gives_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let base = ["verify-cases", "--primes", "7"];
    let (_, plain) = run_to(dir.path(), "a.json", &base);
    let mut cached = vec!["--cache-dir", cache.to_str().unwrap()];
    cached.extend_from_slice(&base);
    let (_, first) = run_to(dir.path(), "b.json", &cached);
    let (_, second) = run_to(dir.path(), "c.json", &cached);
    assert_eq!(plain, first);
    assert_eq!(first, second);
    assert!(fs::read_dir(&cache).unwrap().count() >= 1);
}

#[test]
fn exit_codes() {
    let status = |args: &[&str]| bin().args(args).output().unwrap().status.code().unwrap();
    assert_eq!(status(&["--help"]), 0);
    assert_eq!(status(&["--version"]), 0);
    assert_eq!(status(&["frobnicate"]), 2);
    assert_eq!(status(&["semigroup"]), 2);
    assert_eq!(status(&["verify-cases", "--primes", "4"]), 2);
    assert_eq!(status(&["verify-cases", "--primes", "13"]), 2);
    assert_eq!(status(&["ew", "--c", "1", "--cutoff", "3", "--epsilon", "0.5"]), 2);
    assert_eq!(status(&["bepsilon", "--cm-g", "1", "--epsilon", "0"]), 2);
    assert_eq!(status(&["classify", "--p", "7", "--gen", "1,2,3"]), 2);
    assert_eq!(status(&["classify", "--p", "7", "--gen", "1,1,0,1"]), 0);
    assert_eq!(status(&["verify-lemmas", "--p-max", "13"]), 0);
}

#[test]
fn input_errors_name_path_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(&spec, r#"{"clauses":[{"kind":"div","m":3}],"extra":1}"#).unwrap();
    let out = bin().args(["density", "--spec", spec.to_str().unwrap(), "--x", "100"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("spec.json") && err.contains("extra"), "{err}");

    let profile = dir.path().join("profile.json");
    fs::write(&profile, r#"{"p2_c":"many","p1_rule":{"kind":"constant","n":2},"dim_g":1}"#).unwrap();
    let out = bin().args(["bepsilon", "--profile", profile.to_str().unwrap(), "--epsilon", "0.5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("profile.json") && err.contains("p2_c"), "{err}");

    let missing = dir.path().join("nope.json");
    let out = bin().args(["density", "--spec", missing.to_str().unwrap(), "--x", "10"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn density_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(&spec, r#"{"clauses":[{"kind":"div","m":2},{"kind":"div","m":3}]}"#).unwrap();
    let (code, bytes) = run_to(dir.path(), "d.csv", &["--format", "csv", "density", "--spec", spec.to_str().unwrap(), "--x", "600"]);
    assert_eq!(code, 0);
    let text = String::from_utf8(bytes).unwrap();
    assert_eq!(text, "x,count,density,approx\n600,400,2/3,0.6666666666666666\n");
}

#[test]
fn csv_inferred_from_out_extension() {
    let dir = tempfile::tempdir().unwrap();
    let (code, bytes) = run_to(dir.path(), "genus.csv", &["genus", "--n-max", "30"]);
    assert_eq!(code, 0);
    let text = String::from_utf8(bytes).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,genus,min_guaranteed_degree"));
    assert!(text.lines().any(|l| l == "11,1,2"));
    assert_eq!(text.lines().count(), 31);
}

#[test]
fn spec_examples_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let profile = dir.path().join("cm1.json");
    fs::write(&profile, r#"{"p2_c":144,"p1_rule":{"kind":"valuation_shift","c":144},"dim_g":1,"si_prime_cutoff":37}"#)
        .unwrap();
    let (code, bytes) = run_to(
        dir.path(),
        "b.json",
        &["bepsilon", "--profile", profile.to_str().unwrap(), "--epsilon", "0.5", "--x", "1000000"],
    );
    assert_eq!(code, 0);
    let v: Value = serde_json::from_slice(&bytes).unwrap();
    let r = &v["body"]["reports"][0];
    assert_eq!(r["certified"], true);
    assert!(r["excluded_density"]["approx"].as_f64().unwrap() <= 0.5);
    let (code, _) = run_to(dir.path(), "v.json", &["verify-cases", "--primes", "13", "--mode", "sampled", "--count", "300", "--seed", "7"]);
    assert_eq!(code, 0);
    let (code, _) = run_to(dir.path(), "l.json", &["verify-lemmas", "--p-max", "31"]);
    assert_eq!(code, 0);
}
