use std::path::PathBuf;
use std::process::Command;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).display().to_string()
}

fn odta(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_odta")).args(args).env_remove("ODTA_SEED").env_remove("ODTA_SOLVER_BUDGET").output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn sample_tree_views() {
    let (code, out) = odta(&["strrep", &fixture("sample.tree")]);
    assert_eq!(code, 0);
    assert!(out.contains("word: {b,c} {a,b,c} {a,b} {a,c} {a,b}\n"), "{out}");
    assert!(out.contains("classes: {a,b}=4,7; {a,c}=6; {b,c}=1; {a,b,c}=2\n"), "{out}");
    let (code, out) = odta(&["zones", &fixture("sample.tree")]);
    assert_eq!(code, 0);
    assert!(out.contains("zones: 8\n"));
}

#[test]
fn single_node_views() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("one.tree");
    std::fs::write(&p, "(a@5)\n").unwrap();
    let p = p.display().to_string();
    assert!(odta(&["strrep", &p]).1.contains("word: {a}\n"));
    assert!(odta(&["zones", &p]).1.contains("zonal-word: {{a}}\n"));
    assert!(odta(&["profile", &p]).1.contains("profile: (a/AAA@5)\n"));
}

#[test]
fn witness_goes_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.tree");
    let (code, out) = odta(&["empty", &fixture("one-value.odta"), "--out", w.to_str().unwrap()]);
    assert_eq!(code, 0);
    let tree = std::fs::read_to_string(&w).unwrap();
    assert!(out.contains(&format!("witness: {}", tree.trim())));
    // the witness is a member
    let (code, _) = odta(&["member", &fixture("one-value.odta"), w.to_str().unwrap()]);
    assert_eq!(code, 0);
}

#[test]
fn environment_fallbacks() {
    let run = |env: &[(&str, &str)], args: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_odta"));
        c.args(args);
        for (k, v) in env {
            c.env(k, v);
        }
        String::from_utf8(c.output().unwrap().stdout).unwrap()
    };
    assert_eq!(run(&[("ODTA_SEED", "9")], &["gen", "weak"]), run(&[], &["gen", "weak", "--seed", "9"]));
    let caps = run(&[("ODTA_SOLVER_BUDGET", "77")], &["member", &fixture("class-size-2.odta"), &fixture("sample.tree")]);
    assert!(caps.contains("solver-budget=77"), "{caps}");
}
