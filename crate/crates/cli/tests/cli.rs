use std::fs;
use std::process::{Command, Output};

fn dhss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dhss")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn seeded_deal_is_reproducible_and_warns() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = dhss(&[
            "deal", "--modulus", "0x47", "--levels", "3,4", "--thresholds", "2,3", "--out-dir",
            dir.path().to_str().unwrap(), "--seed", "42", "--insecure-deterministic",
        ]);
        assert!(out.status.success());
        assert!(String::from_utf8_lossy(&out.stderr).contains("WARNING"));
        assert!(stdout(&out).starts_with("secret: "));
    }
    for f in ["bulletin.json", "share-1.json", "share-7.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap());
    }
    assert!(!a.path().join("share-8.json").exists());
}

#[test]
fn inspect_lists_public_values() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert!(dhss(&["deal", "--modulus", "71", "--levels", "3,4", "--thresholds", "2,3", "--secret", "1e", "--out-dir", d])
        .status
        .success());
    let out = dhss(&["inspect", "--bulletin", dir.path().join("bulletin.json").to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("levels      [3, 4] (n = 7)"));
    assert!(text.contains("level 1: alpha = 1"));
    assert_eq!(text.matches("I_").count(), 1 + 3);
}

#[test]
fn gpn_demos() {
    let one = stdout(&dhss(&["gpn-demo", "example1"]));
    assert!(one.contains("a_{1,1} = 59s + 4s_4 + 8s_5"));
    assert!(one.contains("s_6 = 47s_4 + 25s_5"));
    assert!(one.contains("verdict: secret FREE"));
    let two = stdout(&dhss(&["gpn-demo", "example2"]));
    assert!(two.contains("verdict: secret DETERMINED, s = 19s_4 + 53s_5"));
    let custom = dhss(&[
        "gpn-demo", "custom", "--modulus", "71", "--abscissae", "1,2,3,7,35,9,10", "--n1", "3", "--t1", "2", "--t2", "3",
        "--coalition", "4,5",
    ]);
    assert!(custom.status.success());
    assert_eq!(stdout(&custom), two);
    assert_eq!(dhss(&["gpn-demo", "custom", "--modulus", "71"]).status.code(), Some(1));
}

#[test]
fn perfectness_check_reports() {
    let out = dhss(&[
        "perfectness-check", "--modulus", "13", "--levels", "1,1", "--thresholds", "1,2", "--json", "--seed", "1",
        "--insecure-deterministic",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["coalitionCount"], 1);
    assert_eq!(v["checkedPairs"], 13);
    let guarded = dhss(&["perfectness-check", "--modulus", "13", "--levels", "10,10", "--thresholds", "2,3"]);
    assert_eq!(guarded.status.code(), Some(3));
}

#[test]
fn help_and_version_succeed() {
    assert!(dhss(&["--help"]).status.success());
    assert!(dhss(&["--version"]).status.success());
    assert_eq!(dhss(&[]).status.code(), Some(1));
    assert_eq!(dhss(&["deal", "--modulus", "71"]).status.code(), Some(1));
}
