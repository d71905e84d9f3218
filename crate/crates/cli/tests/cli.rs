//! End-to-end behavior of the `wbk` binary: exit codes, verdict output,
//! reproducible reports, render output.

use std::path::Path;
use std::process::{Command, Output};

fn wbk(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wbk"))
        .args(args)
        .current_dir(dir)
        .env("WBK_NO_TIMESTAMP", "1")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const REGION_TRUE: &str = r#"{
  "kind": "region",
  "u": {"dim": 1, "boxes": [{"iv": [{"lo": "1/4", "lo_open": true, "hi": "3/4", "hi_open": true}]}]},
  "v": {"dim": 1, "boxes": [{"iv": [{"lo": "0", "lo_open": true, "hi": "1", "hi_open": true}]}]},
  "k": {"dim": 1, "boxes": [{"iv": [{"lo": "0", "lo_open": false, "hi": "1", "hi_open": false}]}]}
}"#;

const REGION_FALSE: &str = r#"{
  "kind": "region",
  "u": {"dim": 1, "boxes": [{"iv": [{"lo": "0", "lo_open": true, "hi": "1", "hi_open": true}]}]},
  "v": {"dim": 1, "boxes": [{"iv": [{"lo": "0", "lo_open": true, "hi": "1", "hi_open": true}]}]},
  "k": {"dim": 1, "boxes": [{"iv": [{"lo": "0", "lo_open": false, "hi": "1", "hi_open": false}]}]}
}"#;

#[test]
fn check_region_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let yes = write(dir.path(), "yes.json", REGION_TRUE);
    let no = write(dir.path(), "no.json", REGION_FALSE);

    let out = wbk(&["check", "region-ll", "-i", &yes], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("true\n"));
    assert!(stdout.contains("\"verdict\": true"));

    let out = wbk(&["check", "region-ll", "-i", &no], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("false\n"));
}

#[test]
fn malformed_input_is_exit_2_not_a_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{ not json");
    let out = wbk(&["check", "region-ll", "-i", &bad], dir.path());
    assert_eq!(out.status.code(), Some(2));

    // Openness precondition violation is an input error, distinct from a
    // false verdict.
    let not_open = write(
        dir.path(),
        "notopen.json",
        r#"{
          "kind": "region",
          "u": {"dim": 1, "boxes": [{"iv": [{"lo": "0", "lo_open": false, "hi": "1/2", "hi_open": false}]}]},
          "v": {"dim": 1, "boxes": [{"iv": [{"lo": "0", "lo_open": true, "hi": "1", "hi_open": true}]}]},
          "k": {"dim": 1, "boxes": [{"iv": [{"lo": "0", "lo_open": false, "hi": "1", "hi_open": false}]}]}
        }"#,
    );
    let out = wbk(&["check", "region-ll", "-i", &not_open], dir.path());
    assert_eq!(out.status.code(), Some(2));

    let missing = dir.path().join("missing.json").to_string_lossy().into_owned();
    let out = wbk(&["check", "region-ll", "-i", &missing], dir.path());
    assert_eq!(out.status.code(), Some(2));

    // Unknown flags are usage errors.
    let out = wbk(&["verify", "agreement", "--nonsense"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    // Out-of-range poset ids are input errors, not verdicts.
    let bad_ids = write(
        dir.path(),
        "badids.json",
        r#"{"kind": "poset", "poset": {"n": 2, "leq": [[true, true], [false, true]]}, "x": 0, "y": 5}"#,
    );
    let out = wbk(&["check", "poset-ll", "-i", &bad_ids], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_cuntz_reports_epsilon() {
    let dir = tempfile::tempdir().unwrap();
    let space = r#"{"dim": 1, "boxes": [{"iv": [{"lo": "0", "lo_open": false, "hi": "2", "hi_open": false}]}]}"#;
    let instance = format!(
        r#"{{
          "kind": "cuntz",
          "a": {{"space": {space}, "bp": ["0", "3/4", "1", "5/4", "2"], "val": ["0", "0", "1", "0", "0"]}},
          "b": {{"space": {space}, "bp": ["0", "1", "2"], "val": ["0", "1", "0"]}}
        }}"#
    );
    let path = write(dir.path(), "cuntz.json", &instance);
    let out = wbk(&["check", "cuntz-ll", "-i", &path], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("true\n"));
    assert!(stdout.contains("\"epsilon\": \"3/8\""));
}

#[test]
fn check_poset_prints_both_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    // Diamond: 0 < 1, 2 < 3.
    let instance = r#"{
      "kind": "poset",
      "poset": {"n": 4, "leq": [
        [true, true, true, true],
        [false, true, false, true],
        [false, false, true, true],
        [false, false, false, true]
      ]},
      "x": 3,
      "y": 3
    }"#;
    let path = write(dir.path(), "poset.json", instance);
    let out = wbk(&["check", "poset-ll", "-i", &path], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("literal: false / directed: true\n"));
}

#[test]
fn check_ideal_pair() {
    let dir = tempfile::tempdir().unwrap();
    let ambient = r#"{"dim": 1, "boxes": [{"iv": [{"lo": "0", "lo_open": false, "hi": "1", "hi_open": false}]}]}"#;
    let instance = format!(
        r#"{{
          "kind": "ideal",
          "i": {{"ambient": {ambient}, "carrier": {{"dim": 1, "boxes": [{{"iv": [{{"lo": "1/4", "lo_open": true, "hi": "3/4", "hi_open": true}}]}}]}}}},
          "j": {{"ambient": {ambient}, "carrier": {{"dim": 1, "boxes": [{{"iv": [{{"lo": "0", "lo_open": true, "hi": "1", "hi_open": true}}]}}]}}}}
        }}"#
    );
    let path = write(dir.path(), "ideal.json", &instance);
    let out = wbk(&["check", "ideal-ll", "-i", &path], dir.path());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_report_bytes_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = || wbk(&["verify", "agreement", "--count", "40", "--seed", "9"], dir.path());
    let a = run();
    let b = run();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let jobs1 = wbk(
        &["verify", "agreement", "--count", "40", "--seed", "9", "--jobs", "1"],
        dir.path(),
    );
    assert_eq!(a.stdout, jobs1.stdout);
}

#[test]
fn verify_rejects_zero_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = wbk(&["verify", "agreement", "--count", "0"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn render_writes_deterministic_svg_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "inst.json", REGION_TRUE);

    let svg1 = dir.path().join("a.svg");
    let svg2 = dir.path().join("b.svg");
    for out in [&svg1, &svg2] {
        let r = wbk(
            &["render", "-i", &inst, "-o", out.to_str().unwrap(), "--format", "svg"],
            dir.path(),
        );
        assert_eq!(r.status.code(), Some(0));
    }
    let a = std::fs::read(&svg1).unwrap();
    let b = std::fs::read(&svg2).unwrap();
    assert_eq!(a, b);
    assert!(String::from_utf8(a).unwrap().contains("<svg"));

    let csv = dir.path().join("a.csv");
    let r = wbk(
        &["render", "-i", &inst, "-o", csv.to_str().unwrap(), "--format", "csv"],
        dir.path(),
    );
    assert_eq!(r.status.code(), Some(0));
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("x,in_u,in_v,in_k"));

    // Poset payloads are not renderable: exit 2.
    let poset = write(
        dir.path(),
        "p.json",
        r#"{"kind": "poset", "poset": {"n": 1, "leq": [[true]]}, "x": 0, "y": 0}"#,
    );
    let out = wbk(
        &["render", "-i", &poset, "-o", dir.path().join("p.svg").to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));

    // Dimensions above two are not renderable either: exit 2.
    let iv = r#"{"lo": "0", "lo_open": true, "hi": "1", "hi_open": true}"#;
    let civ = r#"{"lo": "0", "lo_open": false, "hi": "1", "hi_open": false}"#;
    let three_d = write(
        dir.path(),
        "cube.json",
        &format!(
            r#"{{"kind": "region",
                 "u": {{"dim": 3, "boxes": [{{"iv": [{iv}, {iv}, {iv}]}}]}},
                 "v": {{"dim": 3, "boxes": [{{"iv": [{iv}, {iv}, {iv}]}}]}},
                 "k": {{"dim": 3, "boxes": [{{"iv": [{civ}, {civ}, {civ}]}}]}}}}"#
        ),
    );
    let out = wbk(
        &["render", "-i", &three_d, "-o", dir.path().join("cube.svg").to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn render_2d_product_draws_nested_rectangles() {
    let dir = tempfile::tempdir().unwrap();
    // U = (1/4,3/4)^2 inside V = (0,1)^2 inside K = [0,1]^2.
    let sq = |lo: &str, hi: &str, open: bool| {
        format!(
            r#"{{"dim": 2, "boxes": [{{"iv": [
                {{"lo": "{lo}", "lo_open": {open}, "hi": "{hi}", "hi_open": {open}}},
                {{"lo": "{lo}", "lo_open": {open}, "hi": "{hi}", "hi_open": {open}}}
            ]}}]}}"#
        )
    };
    let instance = format!(
        r#"{{"kind": "region", "u": {}, "v": {}, "k": {}}}"#,
        sq("1/4", "3/4", true),
        sq("0", "1", true),
        sq("0", "1", false),
    );
    let path = write(dir.path(), "sq.json", &instance);
    let out_path = dir.path().join("sq.svg");
    let out = wbk(
        &["render", "-i", &path, "-o", out_path.to_str().unwrap(), "--format", "svg"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let svg = std::fs::read_to_string(&out_path).unwrap();
    assert!(svg.contains("compactly contained: true"));
    assert!(svg.contains("<rect"));
    // Open faces are dashed, the closed ambient ones are not.
    assert!(svg.contains("stroke-dasharray"));

    // Tensor instances render as nested product rectangles too.
    let space = r#"{"dim": 1, "boxes": [{"iv": [{"lo": "0", "lo_open": false, "hi": "2", "hi_open": false}]}]}"#;
    let tent = |bp: &str, val: &str| format!(r#"{{"space": {space}, "bp": {bp}, "val": {val}}}"#);
    let a = tent(r#"["0", "3/4", "1", "5/4", "2"]"#, r#"["0", "0", "1", "0", "0"]"#);
    let b = tent(r#"["0", "1", "2"]"#, r#"["0", "1", "0"]"#);
    let instance = format!(
        r#"{{"kind": "tensor", "a1": {a}, "b1": {b}, "a2": {a}, "b2": {b}}}"#
    );
    let path = write(dir.path(), "tensor.json", &instance);
    let out_path = dir.path().join("tensor.svg");
    let out = wbk(
        &["render", "-i", &path, "-o", out_path.to_str().unwrap(), "--format", "svg"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let svg = std::fs::read_to_string(&out_path).unwrap();
    assert!(svg.contains("tensor supports"));
    assert!(svg.matches("<rect").count() >= 3);
}

#[test]
fn render_cutdown_marks_level_and_support() {
    let dir = tempfile::tempdir().unwrap();
    let space = r#"{"dim": 1, "boxes": [{"iv": [{"lo": "0", "lo_open": false, "hi": "2", "hi_open": false}]}]}"#;
    let instance = format!(
        r#"{{
          "kind": "cutdown",
          "f": {{"space": {space}, "bp": ["0", "1", "2"], "val": ["0", "1", "0"]}},
          "epsilon": "1/2"
        }}"#
    );
    let path = write(dir.path(), "cut.json", &instance);
    let out_path = dir.path().join("cut.svg");
    let out = wbk(
        &["render", "-i", &path, "-o", out_path.to_str().unwrap(), "--format", "svg"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let svg = std::fs::read_to_string(&out_path).unwrap();
    // The level line carries its exact label.
    assert!(svg.contains(">1/2</text>"));
    assert!(svg.contains("stroke-dasharray"));
}
