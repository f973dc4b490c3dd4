use std::path::{Path, PathBuf};
use std::process::Command;

use mif_cli::Instance;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn mif(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_mif"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path: PathBuf = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn flow_file(entries: &[(&str, &str, &str)]) -> String {
    let flows: Vec<String> = entries
        .iter()
        .map(|(t, h, f)| format!(r#"{{"tail": "{t}", "head": "{h}", "flow": "{f}"}}"#))
        .collect();
    format!(r#"{{"format": "mif-flow/1", "flows": [{}]}}"#, flows.join(", "))
}

const TABLE_INSTANCE: &str = r#"{
  "format": "mif-instance/1",
  "nodes": ["a", "b", "c", "t"],
  "sink": "t",
  "edges": [
    {"tail": "a", "head": "t", "capacity": 1},
    {"tail": "b", "head": "t", "capacity": 1},
    {"tail": "c", "head": "t", "capacity": 1}
  ],
  "entropy_table": {
    "a": 1, "b": 1, "c": 1,
    "a,b": 2, "a,c": 1, "b,c": 2, "a,b,c": 2
  }
}"#;

#[test]
fn solve_example1() {
    let r = mif(&["solve", &fixture("example1.json")]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("value: 2\n"));
    assert!(r.stdout.contains("rates: (1, 0.2, 0.4, 0.4)\n"));
    assert!(r.stdout.contains("3 -> t  1.4/2\n"));
}

#[test]
fn solve_example2_integral() {
    let dir = tempfile::tempdir().unwrap();
    let flow = dir.path().join("flow.json");
    let r = mif(&[
        "solve",
        &fixture("example2.json"),
        "--integral",
        "--flow-out",
        flow.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("value: 4\n"));
    assert!(r.stdout.contains("iterations: 4\n"));
    let text = std::fs::read_to_string(flow).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    for e in doc["flows"].as_array().unwrap() {
        assert!(!e["flow"].as_str().unwrap().contains(['.', '/']), "{e}");
    }
}

#[test]
fn integrality_and_axiom_failures() {
    let r = mif(&["solve", &fixture("example1.json"), "--integral"]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("not integral"));

    let dir = tempfile::tempdir().unwrap();
    // H(a) + H(b) = 2 < H(a,b) = 3.
    let bad = TABLE_INSTANCE
        .replace(r#""a,b": 2"#, r#""a,b": 3"#)
        .replace(r#""a,b,c": 2"#, r#""a,b,c": 3"#);
    let path = write(&dir, "bad.json", &bad);
    let r = mif(&["solve", &path]);
    assert_eq!(r.code, 4, "{}", r.stderr);
    assert!(r.stderr.contains("not submodular"), "{}", r.stderr);
    assert!(r.stderr.contains("A = {a}, B = {b}"), "{}", r.stderr);

    let r = mif(&["solve", &write(&dir, "ok.json", TABLE_INSTANCE)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("example1.json")).unwrap();
    let float = text.replacen(r#""capacity": "1""#, r#""capacity": 1.0"#, 1);
    for path in [
        write(&dir, "float.json", &float),
        write(&dir, "garbage.json", "{"),
        write(&dir, "version.json", &text.replace("mif-instance/1", "mif-instance/9")),
        dir.path().join("missing.json").to_string_lossy().into_owned(),
    ] {
        let r = mif(&["solve", &path]);
        assert_eq!(r.code, 2, "{path}: {}", r.stderr);
        assert!(r.stderr.starts_with("error: "));
    }
    assert_eq!(mif(&["solve"]).code, 2);
}

#[test]
fn verify_reports() {
    let dir = tempfile::tempdir().unwrap();
    let inst = fixture("example1.json");
    let good = write(
        &dir,
        "good.json",
        &flow_file(&[("1", "3", "1"), ("3", "t", "1.4"), ("4", "2", "0.4"), ("2", "t", "3/5")]),
    );
    let r = mif(&["verify", &inst, &good]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    for line in [
        "capacity: ok",
        "source polyhedron: ok",
        "flow polyhedron: ok",
        "slepian-wolf: ok",
    ] {
        assert!(r.stdout.contains(line), "{line}");
    }

    let over = write(&dir, "over.json", &flow_file(&[("2", "t", "1")]));
    let r = mif(&["verify", &inst, &over]);
    assert_eq!(r.code, 1);
    assert!(
        r.stdout.contains("capacity: FAIL f(2,t) = 1 outside [0, 0.6]"),
        "{}",
        r.stdout
    );

    let rate = write(&dir, "rate.json", &flow_file(&[("3", "t", "2")]));
    let r = mif(&["verify", &inst, &rate]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("capacity: ok"));
    assert!(
        r.stdout.contains("source polyhedron: FAIL x({3}) = 2 > H({3}) = 0.4"),
        "{}",
        r.stdout
    );

    let r = mif(&[
        "verify",
        &inst,
        &write(&dir, "bad.json", &flow_file(&[("3", "1", "1")])),
    ]);
    assert_eq!(r.code, 2);
}

#[test]
fn verify_slepian_wolf_policy() {
    let dir = tempfile::tempdir().unwrap();
    let inst = fixture("example1-cut.json");
    let flow = dir.path().join("f.json");
    assert_eq!(mif(&["solve", &inst, "--flow-out", flow.to_str().unwrap()]).code, 0);
    let f = flow.to_str().unwrap();
    let r = mif(&["verify", &inst, f]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("slepian-wolf: not met"));
    assert_eq!(mif(&["verify", &inst, f, "--require-slepian-wolf"]).code, 1);
}

#[test]
fn trace_files_replay() {
    let dir = tempfile::tempdir().unwrap();
    let inst = fixture("example1.json");
    let trace = dir.path().join("trace.json");
    let t = trace.to_str().unwrap();
    assert_eq!(mif(&["solve", &inst, "--trace", t]).code, 0);
    let r = mif(&["verify", &inst, t]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert!(r.stdout.contains("replay: ok"));

    let text = std::fs::read_to_string(&trace).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["format"], "mif-trace/1");
    assert_eq!(doc["iterations"].as_array().unwrap().len(), 3);
    doc["iterations"][1]["beta"] = "0.5".into();
    let tampered = write(&dir, "tampered.json", &doc.to_string());
    let r = mif(&["verify", &inst, &tampered]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("replay: FAIL"));

    let dist = dir.path().join("dist.json");
    let r = mif(&["solve", &inst, "--distributed", "--trace", dist.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("rounds: "));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&dist).unwrap()).unwrap();
    assert!(!doc["simulation"]["log"].as_array().unwrap().is_empty());
    let central: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["iterations"], central["iterations"]);
    assert_eq!(doc["result"], central["result"]);
}

#[test]
fn max_value_outputs() {
    let r = mif(&["max-value", &fixture("example1.json")]);
    assert_eq!(r.stdout, "value: 2\nwitness: {1,2,3,4}\n");
    let r = mif(&["max-value", &fixture("example1-cut.json")]);
    assert!(r.stdout.starts_with("value: 1.6\n"));

    let dir = tempfile::tempdir().unwrap();
    let silent = TABLE_INSTANCE
        .replace(": 1,", ": 0,")
        .replace(": 1\n", ": 0\n")
        .replace(": 2,", ": 0,")
        .replace(": 2\n", ": 0\n");
    let r = mif(&["max-value", &write(&dir, "silent.json", &silent)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.starts_with("value: 0\n"), "{}", r.stdout);
}

#[test]
fn dot_exports() {
    let inst = fixture("example1.json");
    let r = mif(&["export", &inst, "--dot"]);
    assert!(r.stdout.contains(r#""1" -> "3" [label="2"];"#));
    assert!(r.stdout.starts_with("digraph network {"));
    assert_eq!(mif(&["export", &inst]).stdout, r.stdout);

    let dir = tempfile::tempdir().unwrap();
    let after_first = write(&dir, "f.json", &flow_file(&[("2", "t", "0.6")]));
    let r = mif(&["export", &inst, "--flow", &after_first, "--aux"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(
        r.stdout
            .contains(r#""2" -> "3" [label="0.4", class=Dependence, style=dashed];"#),
        "{}",
        r.stdout
    );
    assert!(r.stdout.contains(r#""t" -> "2" [label="0.6", class=Backward"#));

    let over = write(&dir, "over.json", &flow_file(&[("2", "t", "1")]));
    assert_eq!(mif(&["export", &inst, "--flow", &over, "--aux"]).code, 2);
}

#[test]
fn json_export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["example1.json", "example2.json", "example1-cut.json"] {
        let path = fixture(name);
        let original = Instance::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let r = mif(&["export", &path, "--json"]);
        assert_eq!(r.code, 0);
        assert_eq!(Instance::from_json(&r.stdout).unwrap(), original);
        let again = mif(&["export", &write(&dir, name, &r.stdout), "--json"]);
        assert_eq!(again.stdout, r.stdout);
    }
    let table = write(&dir, "table.json", TABLE_INSTANCE);
    let r = mif(&["export", &table, "--json"]);
    assert_eq!(
        Instance::from_json(&r.stdout).unwrap(),
        Instance::from_json(TABLE_INSTANCE).unwrap()
    );
}

#[test]
fn outputs_are_byte_identical() {
    for args in [
        vec!["solve", "example1.json"],
        vec!["solve", "example1.json", "--distributed"],
        vec!["sink-select", "example1.json", "--candidates", "1,2,3,4,t"],
    ] {
        let mut args: Vec<String> = args.into_iter().map(String::from).collect();
        args[1] = fixture(&args[1]);
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(mif(&refs).stdout, mif(&refs).stdout);
    }
}

#[test]
fn sink_selection() {
    let r = mif(&["sink-select", &fixture("example1.json")]);
    assert_eq!(r.stdout, "rank  node  value\n1     t     2\n");
    let r = mif(&["sink-select", &fixture("example1-cut.json")]);
    assert!(r.stdout.contains("1     t     1.6\n"));

    let dir = tempfile::tempdir().unwrap();
    let pair = r#"{
      "format": "mif-instance/1",
      "nodes": ["u", "v"],
      "sink": "v",
      "edges": [{"tail": "u", "head": "v", "capacity": 1}, {"tail": "v", "head": "u", "capacity": 1}],
      "source": {"bits": [{"name": "x", "entropy": 1}, {"name": "y", "entropy": 1}],
                 "observes": {"u": ["x"], "v": ["y"]}},
      "candidates": ["v", "u"]
    }"#;
    let r = mif(&["sink-select", &write(&dir, "pair.json", pair)]);
    assert_eq!(r.stdout, "rank  node  value\n1     u     1\n2     v     1\n");

    let table = write(&dir, "table.json", TABLE_INSTANCE);
    assert_eq!(mif(&["sink-select", &table]).code, 2);
}
