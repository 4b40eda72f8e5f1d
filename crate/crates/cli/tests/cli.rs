use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;
use wvc_core::classify::roc_accuracy;

fn wvc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wvc"))
        .current_dir(dir)
        .env_remove("WVC_JOBS")
        .args(args)
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = wvc(dir, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

/// A small grating corpus, a fast configuration and a trained model.
struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let dir = TempDir::new().unwrap();
        let d = dir.path();
        ok(
            d,
            &[
                "gen-textures",
                "-o",
                "tex",
                "--side",
                "64",
                "--train",
                "3",
                "--test",
                "2",
                "--seed",
                "5",
            ],
        );
        fs::write(
            d.join("fast.cfg"),
            "patch_counts = 4x20, 8x20\nselect_k = 16\n",
        )
        .unwrap();
        ok(
            d,
            &[
                "--config",
                "fast.cfg",
                "train",
                "tex/manifest.csv",
                "-o",
                "m.wvc",
                "--seed",
                "7",
            ],
        );
        Fixture { dir }
    }

    fn path(&self) -> &Path {
        self.dir.path()
    }

    fn images(&self, split: &str) -> Vec<(String, String)> {
        fs::read_to_string(self.path().join("tex/manifest.csv"))
            .unwrap()
            .lines()
            .skip(1)
            .filter(|l| l.ends_with(split))
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                (format!("tex/{}", f[0]), f[1].to_string())
            })
            .collect()
    }
}

#[test]
fn train_twice_gives_identical_model_files() {
    let f = Fixture::new();
    let d = f.path();
    for jobs in ["1", "3"] {
        ok(
            d,
            &[
                "--config",
                "fast.cfg",
                "--jobs",
                jobs,
                "train",
                "tex/manifest.csv",
                "-o",
                "again.wvc",
                "--seed",
                "7",
            ],
        );
        assert_eq!(
            fs::read(d.join("m.wvc")).unwrap(),
            fs::read(d.join("again.wvc")).unwrap()
        );
    }
    ok(
        d,
        &[
            "--config",
            "fast.cfg",
            "train",
            "tex/manifest.csv",
            "-o",
            "other.wvc",
            "--seed",
            "8",
        ],
    );
    assert_ne!(
        fs::read(d.join("m.wvc")).unwrap(),
        fs::read(d.join("other.wvc")).unwrap()
    );
}

#[test]
fn evaluate_reports_accuracy_confusion_and_roc() {
    let f = Fixture::new();
    let d = f.path();
    let text = ok(d, &["evaluate", "m.wvc", "tex/manifest.csv"]);
    assert!(text.starts_with("accuracy "), "{text}");
    assert!(text.contains("confusion (rows: truth, columns: predicted)"));
    let n: usize = text
        .lines()
        .skip_while(|l| !l.starts_with("truth"))
        .skip(1)
        .take_while(|l| !l.is_empty())
        .map(|l| {
            l.split(',')
                .skip(1)
                .map(|c| c.parse::<usize>().unwrap())
                .sum::<usize>()
        })
        .sum();
    assert_eq!(n, 8);
}

/// Relabels some test images so the confusion matrix is not diagonal, then
/// recomputes every ROC line from the printed counts.
#[test]
fn roc_lines_follow_from_the_confusion_counts() {
    let f = Fixture::new();
    let d = f.path();
    let mut manifest = String::from("path,label,split\n");
    for (p, l) in f.images("train") {
        manifest.push_str(&format!("{p},{l},train\n"));
    }
    let labels: Vec<String> = {
        let mut l: Vec<String> = f.images("train").into_iter().map(|x| x.1).collect();
        l.dedup();
        l
    };
    for (i, (p, l)) in f.images("test").into_iter().enumerate() {
        let l = if i % 3 == 0 {
            labels[(i / 3) % labels.len()].clone()
        } else {
            l
        };
        manifest.push_str(&format!("{p},{l},test\n"));
    }
    fs::write(d.join("mixed.csv"), manifest).unwrap();
    let text = ok(d, &["evaluate", "m.wvc", "mixed.csv"]);

    let lines: Vec<&str> = text.lines().collect();
    let head = lines.iter().position(|l| l.starts_with("truth")).unwrap();
    let names: Vec<&str> = lines[head].split(',').skip(1).collect();
    let counts: Vec<Vec<usize>> = lines[head + 1..head + 1 + names.len()]
        .iter()
        .map(|l| l.split(',').skip(1).map(|c| c.parse().unwrap()).collect())
        .collect();
    let total: usize = counts.iter().flatten().sum();
    let diagonal: usize = (0..names.len()).map(|i| counts[i][i]).sum();
    assert!(diagonal < total, "relabeling should cost some accuracy");
    let roc = lines.iter().position(|l| *l == "label,x,y,p,r").unwrap();
    for (i, line) in lines[roc + 1..roc + 1 + names.len()].iter().enumerate() {
        let v: Vec<&str> = line.split(',').collect();
        assert_eq!(v[0], names[i]);
        let pos: usize = counts[i].iter().sum();
        let fp: usize = (0..names.len())
            .filter(|&t| t != i)
            .map(|t| counts[t][i])
            .sum();
        let x = if total == pos {
            0.0
        } else {
            fp as f64 / (total - pos) as f64
        };
        let y = if pos == 0 {
            1.0
        } else {
            counts[i][i] as f64 / pos as f64
        };
        let p = pos as f64 / total as f64;
        let parsed: Vec<f64> = v[1..].iter().map(|s| s.parse().unwrap()).collect();
        assert_eq!(parsed, vec![x, y, p, roc_accuracy(x, y, p)], "{line}");
    }
}

#[test]
fn predict_writes_csv_in_input_order() {
    let f = Fixture::new();
    let d = f.path();
    let tests = f.images("test");
    let mut args = vec!["predict", "m.wvc"];
    args.extend(tests.iter().rev().map(|t| t.0.as_str()));
    let one = ok(d, &args);
    let mut lines = one.lines();
    assert_eq!(lines.next(), Some("path,predicted,distance,neighbor"));
    for (line, t) in lines.zip(tests.iter().rev()) {
        assert!(line.starts_with(&format!("{},", t.0)), "{line}");
    }
    let mut serial = vec!["--jobs", "1"];
    serial.extend(&args);
    assert_eq!(ok(d, &serial), one);
}

#[test]
fn predict_with_mismatched_histogram_width_exits_2() {
    let f = Fixture::new();
    let d = f.path();
    let img = f.images("test")[0].0.clone();
    let out = wvc(d, &["predict", "m.wvc", &img, "--hist-bins", "32"]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("width mismatch"), "{err}");
}

#[test]
fn feedback_emits_one_json_line_per_cluster() {
    let f = Fixture::new();
    let d = f.path();
    let img = f.images("test")[0].0.clone();
    let text = ok(d, &["feedback", "m.wvc", &img, "--feedback-k", "3"]);
    let lines: Vec<serde_json::Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 3);
    let mut members = 0;
    for (i, v) in lines.iter().enumerate() {
        assert_eq!(v["cluster"], i);
        assert!(v["label"].as_str().unwrap().starts_with("deg"));
        assert!(["ok", "low_confidence"].contains(&v["flag"].as_str().unwrap()));
        assert!(v["centroid_x"].is_f64() && v["centroid_y"].is_f64());
        members += v["members"].as_array().unwrap().len();
    }
    assert_eq!(members, 16);
    assert_eq!(
        ok(d, &["feedback", "m.wvc", &img, "--feedback-k", "3"]),
        text
    );
}

#[test]
fn inspect_lists_the_selection_report() {
    let f = Fixture::new();
    let d = f.path();
    let text = ok(d, &["inspect", "m.wvc"]);
    assert!(text.contains("40 patches, 16 selected"), "{text}");
    let csv: Vec<&str> = text
        .lines()
        .skip_while(|l| *l != "patch_index,variance,kept")
        .collect();
    assert_eq!(csv.len(), 41);
    assert_eq!(csv[1..].iter().filter(|l| l.ends_with(",true")).count(), 16);
    ok(d, &["inspect", "m.wvc", "--selection-csv", "sel.csv"]);
    assert_eq!(
        fs::read_to_string(d.join("sel.csv")).unwrap(),
        csv.join("\n") + "\n"
    );
}

#[test]
fn usage_errors_exit_1() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    fs::write(d.join("bad.cfg"), "levels = three\n").unwrap();
    for args in [
        vec!["--bogus", "inspect", "m.wvc"],
        vec!["train"],
        vec!["--config", "bad.cfg", "inspect", "m.wvc"],
        vec!["--config", "missing.cfg", "inspect", "m.wvc"],
        vec!["--select-k", "0", "inspect", "m.wvc"],
        vec!["--levels", "9", "train", "x.csv", "-o", "m.wvc"],
        vec!["simulate-res", "a.pgm", "--factor", "0", "-o", "b.pgm"],
    ] {
        assert_eq!(code(&wvc(d, &args)), 1, "{args:?}");
    }
    let out = Command::new(env!("CARGO_BIN_EXE_wvc"))
        .current_dir(d)
        .env("WVC_JOBS", "many")
        .args(["inspect", "m.wvc"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
    assert_eq!(code(&wvc(d, &["--help"])), 0);
}

#[test]
fn data_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    fs::write(d.join("junk.wvc"), b"not a model").unwrap();
    fs::write(d.join("orphan.csv"), "path,label,split\na.pgm,x,test\n").unwrap();
    fs::write(d.join("s.toml"), "t_end = 1.0\n").unwrap();
    for args in [
        vec!["inspect", "missing.wvc"],
        vec!["inspect", "junk.wvc"],
        vec!["train", "missing.csv", "-o", "m.wvc"],
        vec!["train", "orphan.csv", "-o", "m.wvc"],
        vec!["dynamics", "s.toml"],
        vec!["simulate-res", "missing.pgm", "-o", "b.pgm"],
    ] {
        let out = wvc(d, &args);
        assert_eq!(
            code(&out),
            2,
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn simulate_res_halves_the_image() {
    let f = Fixture::new();
    let d = f.path();
    let img = f.images("train")[0].0.clone();
    ok(
        d,
        &["simulate-res", &img, "--factor", "2", "-o", "half.pgm"],
    );
    let bytes = fs::read(d.join("half.pgm")).unwrap();
    assert!(bytes.starts_with(b"P5\n32 32\n255\n"));
}

#[test]
fn spectrogram_cuts_full_segments() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: 8000,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut w = hound::WavWriter::create(d.join("tone.wav"), spec).unwrap();
    for i in 0..8000 * 11 {
        let s = (2.0 * std::f64::consts::PI * 500.0 * i as f64 / 8000.0).sin();
        w.write_sample((s * 10_000.0) as i16).unwrap();
    }
    w.finalize().unwrap();
    let text = ok(
        d,
        &[
            "spectrogram",
            "tone.wav",
            "-o",
            "spec",
            "--frame",
            "256",
            "--hop",
            "128",
        ],
    );
    let files: Vec<PathBuf> = text.lines().map(PathBuf::from).collect();
    assert_eq!(files.len(), 2);
    assert!(files[0].ends_with("tone_000.pgm"));
    // 129 frequency rows, (40000 - 256) / 128 + 1 frames
    let bytes = fs::read(d.join(&files[1])).unwrap();
    assert!(bytes.starts_with(b"P5\n311 129\n255\n"));
    let out = wvc(
        d,
        &["spectrogram", "tone.wav", "-o", "spec", "--frame", "300"],
    );
    assert_eq!(code(&out), 1);
}

#[test]
fn dynamics_writes_the_trajectory() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    fs::write(
        d.join("osc.toml"),
        "t_end = 1.0\ndt = 0.01\n[oscillator]\nalpha = 1.0\nbeta = 1.0\nc = 1.0\ncurrent = { constant = 1.5 }\n",
    )
    .unwrap();
    let text = ok(d, &["dynamics", "osc.toml"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,component_0,component_1");
    assert_eq!(lines.len(), 102);
    ok(d, &["dynamics", "osc.toml", "-o", "out.csv"]);
    assert_eq!(fs::read_to_string(d.join("out.csv")).unwrap(), text);
}
