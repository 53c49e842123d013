use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn hkm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hkm")).args(args).output().expect("run hkm")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hkm-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn pell_first_solution() {
    let o = hkm(&["pell", "17", "1", "--format", "csv"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "k,a,s\n1,66,16\n");
    let o = hkm(&["pell", "5", "3"]);
    let s = stdout(&o);
    assert!(s.contains("\"a\": 3, \"s\": 1") && s.contains("\"a\": 7, \"s\": 3") && s.contains("\"a\": 18, \"s\": 8"));
}

#[test]
fn fm_table() {
    let o = hkm(&["fm", "5", "1", "10", "--format", "csv"]);
    assert!(o.status.success());
    let want = "n,numerator,denominator\n-1,1,1\n0,5,1\n1,11,1\n2,0,1\n3,0,1\n4,-54,1\n5,55,1\n6,44,1\n7,0,1\n8,0,1\n9,-395,1\n10,340,1\n";
    assert_eq!(stdout(&o), want);
}

#[test]
fn asym_exact() {
    let o = hkm(&["asym", "5", "6", "9", "--exact", "--format", "csv"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let row: Vec<&str> = s.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[4], "-35408776");
    let rel: f64 = row[6].parse().unwrap();
    assert!(rel <= 3e-5);
}

#[test]
fn deterministic_files() {
    let (a, b) = (tmp("f1a.json"), tmp("f1b.json"));
    for path in [&a, &b] {
        let o = hkm(&["fm", "5", "1", "--order", "80", "--out", path.to_str().unwrap()]);
        assert!(o.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let (x, y) = (tmp("phi_a.json"), tmp("phi_b.json"));
    for path in [&x, &y] {
        let o = hkm(&["phi", "5", a.to_str().unwrap(), "8", "--out", path.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(fs::read(&x).unwrap(), fs::read(&y).unwrap());
    assert!(hkm(&["check", x.to_str().unwrap()]).status.success());
}

#[test]
fn exit_codes() {
    assert_eq!(hkm(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(hkm(&["pell"]).status.code(), Some(2));
    assert_eq!(hkm(&["embed", "5", "2", "3"]).status.code(), Some(1));
    assert_eq!(hkm(&["embed", "5", "1", "4"]).status.code(), Some(0));

    let bad = tmp("bad_f1.json");
    fs::write(&bad, "{\"p\": 5, \"m\": 1, \"coeffs\": [[-1, 1, 1], [0, 5, 1], [1, 11, 1], [2, 7, 1]]}").unwrap();
    let o = hkm(&["verify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("plus-support violations: 1"));

    let f1 = tmp("f1_for_tamper.json");
    assert!(hkm(&["fm", "5", "1", "--order", "80", "--out", f1.to_str().unwrap()]).status.success());
    let series = tmp("phi_tamper.json");
    assert!(hkm(&["phi", "5", f1.to_str().unwrap(), "6", "--out", series.to_str().unwrap()]).status.success());
    let text = fs::read_to_string(&series).unwrap();
    // the leading coefficient of the offset term is listed as "[0, 1, 1, 1]"
    assert!(text.contains("[0, 1, 1, 1]"));
    fs::write(&series, text.replace("[0, 1, 1, 1]", "[0, 1, 2, 1]")).unwrap();
    let o = hkm(&["check", series.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("status: FAILED"));
}

#[test]
fn phi_needs_depth() {
    let f1 = tmp("f1_short.json");
    assert!(hkm(&["fm", "5", "1", "--order", "20", "--out", f1.to_str().unwrap()]).status.success());
    let o = hkm(&["phi", "5", f1.to_str().unwrap(), "15"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("insufficient precision"));
}
