use std::process::{Command, Output};

fn amalgam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_amalgam"))
        .args(args)
        .current_dir(concat!(env!("CARGO_MANIFEST_DIR"), "/../.."))
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn reduce_and_theta() {
    let o = amalgam(&["reduce", "--group", "gamma", "g0 g0"]);
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(0), "e"));
    let o = amalgam(&["theta", "--word", "h:0"]);
    assert_eq!(stdout(&o).trim(), "(-1,1)");
    let o = amalgam(&["mul", "g0 h:1", "g0 h:1", "g0 h:1"]);
    assert_eq!(stdout(&o).trim(), "e");
}

#[test]
fn kernel_of_sl2_is_z2() {
    let o = amalgam(&["kernel", "--spec", "specs/sl2.json", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["ker"].as_array().unwrap().len(), 2);
    assert!(stdout(&amalgam(&["kernel", "--spec", "specs/sl2.json"])).contains("(order 2)"));
}

#[test]
fn classify_modes_agree() {
    for spec in ["specs/s3.json", "specs/sl2.json", "specs/direct.json", "specs/free.json"] {
        let text = stdout(&amalgam(&["classify", "--spec", spec]));
        let json: serde_json::Value =
            serde_json::from_slice(&amalgam(&["classify", "--spec", spec, "--json"]).stdout).unwrap();
        let trivial = json["ker_trivial"].as_bool().unwrap();
        assert!(text.contains(&format!("ker trivial: {trivial}")), "{spec}");
        assert_eq!(json["all_equivalent"], true);
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["kernel", "--depth", "2", "--json", "--jobs", "2"];
    assert_eq!(amalgam(&args).stdout, amalgam(&args).stdout);
}

#[test]
fn conjugate_out_exit_codes() {
    let o = amalgam(&["conjugate-out", "--group", "s3", "h:1"]);
    assert_eq!(o.status.code(), Some(0));
    let o = amalgam(&["conjugate-out", "--max-len", "4", "--json", "h:0"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "failure");
    assert_eq!(v["stuck_conjugate"], "h:0");
}

#[test]
fn tree_exports() {
    let dot = stdout(&amalgam(&["tree", "--radius", "1"]));
    assert_eq!(dot.lines().filter(|l| l.contains(" -- ")).count(), 5);
    assert_eq!(dot.lines().filter(|l| l.trim_end().ends_with("\";")).count(), 6);
    let o = amalgam(&["tree", "--radius", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["vertices"].as_array().unwrap().len(), 6);
    assert_eq!(amalgam(&["tree", "--format", "svg"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(amalgam(&["reduce", "g0 g2"]).status.code(), Some(2));
    assert_eq!(amalgam(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(amalgam(&["kernel", "--group", "nope"]).status.code(), Some(2));
    assert_eq!(amalgam(&["classify"]).status.code(), Some(2));
    assert_eq!(amalgam(&["kernel", "--spec", "specs/missing.json"]).status.code(), Some(2));
}

#[test]
fn verify_presentation_passes() {
    let o = amalgam(&["verify-presentation", "--max-len", "3"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn selftest_passes() {
    let o = amalgam(&["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 10);
}
