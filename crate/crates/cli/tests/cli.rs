use std::path::Path;
use std::process::{Command, Output};

fn airwrite(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_airwrite"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = airwrite(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn synth_then_recognize_appends_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let frames = dir.path().join("frames");
    let result = dir.path().join("result.txt");
    let report = dir.path().join("report.json");
    let glyphs = dir.path().join("glyphs");
    ok(&[
        "synth",
        "--text",
        "HI YOU",
        "--out",
        p(&frames),
        "--jitter",
        "1",
        "--seed",
        "3",
    ]);
    assert!(frames.join("000001.ppm").exists());

    let args = [
        "recognize",
        "--frames",
        p(&frames),
        "--out",
        p(&result),
        "--report",
        p(&report),
        "--dump-glyphs",
        p(&glyphs),
    ];
    assert_eq!(ok(&args).trim(), "HI YOU");
    ok(&args[..5]);
    assert_eq!(
        std::fs::read_to_string(&result).unwrap(),
        "HI YOU\nHI YOU\n"
    );

    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["text"], "HI YOU");
    let per_char = json["per_char"].as_array().unwrap();
    assert_eq!(per_char.len(), 5);
    assert_eq!(per_char[0]["label"], "H");
    assert!(per_char[0]["score"].as_f64().unwrap() > 0.0);
    assert_eq!(per_char[0]["frames"].as_array().unwrap().len(), 2);
    assert!(json["timings"]["total_s"].as_f64().unwrap() > 0.0);
    assert_eq!(json["timings"]["per_char_s"].as_array().unwrap().len(), 5);
    assert_eq!(std::fs::read_dir(&glyphs).unwrap().count(), 5);
    assert!(glyphs.join("000_H.pgm").exists());
}

#[test]
fn exported_templates_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let templates = dir.path().join("templates");
    let frames = dir.path().join("frames");
    assert!(ok(&["templates", "--out", p(&templates)]).contains("78 templates"));
    assert_eq!(std::fs::read_dir(templates.join("Q")).unwrap().count(), 3);
    ok(&["synth", "--text", "QUIZ", "--out", p(&frames)]);
    assert_eq!(
        ok(&[
            "recognize",
            "--frames",
            p(&frames),
            "--templates",
            p(&templates)
        ])
        .trim(),
        "QUIZ"
    );

    // a set with only some letters can only answer with those letters
    let partial = dir.path().join("partial");
    for l in ["Q", "U"] {
        let from = templates.join(l);
        let to = partial.join(l);
        std::fs::create_dir_all(&to).unwrap();
        for entry in std::fs::read_dir(from).unwrap() {
            let entry = entry.unwrap();
            std::fs::copy(entry.path(), to.join(entry.file_name())).unwrap();
        }
    }
    let text = ok(&[
        "recognize",
        "--frames",
        p(&frames),
        "--templates",
        p(&partial),
    ]);
    assert!(text.trim().chars().all(|c| c == 'Q' || c == 'U'), "{text}");
}

#[test]
fn flags_and_config_file_change_segmentation() {
    let dir = tempfile::tempdir().unwrap();
    let frames = dir.path().join("frames");
    ok(&["synth", "--text", "LV", "--out", p(&frames)]);
    let f = p(&frames);
    assert_eq!(ok(&["recognize", "--frames", f]).trim(), "LV");
    // a dwell longer than the rendered pause merges the two letters into one stroke
    let merged = ok(&["recognize", "--frames", f, "--dwell-frames", "40"]);
    assert_eq!(merged.trim().len(), 1);

    let cfg = dir.path().join("p.toml");
    std::fs::write(
        &cfg,
        "connectivity = \"four\"\n[tracker]\ndwell_frames = 40\n",
    )
    .unwrap();
    assert_eq!(
        ok(&["recognize", "--frames", f, "--config", p(&cfg)])
            .trim()
            .len(),
        1
    );
    assert_eq!(
        ok(&[
            "recognize",
            "--frames",
            f,
            "--config",
            p(&cfg),
            "--dwell-frames",
            "15"
        ])
        .trim(),
        "LV"
    );
    // ungated detection still tracks the clean synthetic dot
    assert_eq!(
        ok(&[
            "recognize",
            "--frames",
            f,
            "--edge-gate",
            "off",
            "--connectivity",
            "4"
        ])
        .trim(),
        "LV"
    );
}

#[test]
fn bad_input_fails_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["recognize", "--frames", p(dir.path())],
        vec![
            "recognize",
            "--frames",
            p(dir.path()),
            "--gaussian-window",
            "4",
        ],
        vec![
            "recognize",
            "--frames",
            p(dir.path()),
            "--connectivity",
            "6",
        ],
        vec![
            "recognize",
            "--frames",
            p(dir.path()),
            "--templates",
            "/nonexistent/dir",
        ],
        vec!["synth", "--text", "H3LLO", "--out", p(dir.path())],
    ];
    for args in cases {
        let out = airwrite(&args);
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn eval_prints_the_table() {
    let out = ok(&["eval", "--letters", "OX", "--seeds", "2", "--jitter", "1"]);
    assert!(out.contains("AVERAGE Accuracy"), "{out}");
}
