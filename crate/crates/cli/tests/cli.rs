use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::io::Write;

fn svmd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_svmd")).args(args).output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("svmd-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn report(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn gen_is_deterministic() {
    let a = svmd(&["gen", "1", "--sigma", "0.1", "--seed", "3"]);
    let b = svmd(&["gen", "1", "--sigma", "0.1", "--seed", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = svmd(&["gen", "1", "--sigma", "0.1", "--seed", "4"]);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(String::from_utf8(a.stdout).unwrap().lines().count(), 5000);
}

#[test]
fn gen_first_row_and_bad_id() {
    let out = svmd(&["gen-signal", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("0.0,0.0"));
    let bad = svmd(&["gen", "9"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(!bad.stderr.is_empty());
}

#[test]
fn malformed_row_names_its_line() {
    let dir = scratch("malformed");
    let mut csv = String::from("t,value\n");
    for k in 0..40 {
        csv.push_str(&format!("{},{}\n", k as f64 * 0.001, (k as f64).sin()));
    }
    csv = csv.replacen("0.007,", "0.007,abc", 1);
    let p = dir.join("in.csv");
    std::fs::write(&p, csv).unwrap();
    let out = svmd(&["decompose", p.to_str().unwrap(), "--out", dir.join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    // header is line 1, t = 0.007 is line 9
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 9"), "{:?}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn short_input_rejected() {
    let dir = scratch("short");
    let p = dir.join("in.csv");
    std::fs::write(&p, "1\n2\n3\n").unwrap();
    let out = svmd(&["decompose", p.to_str().unwrap(), "--rate", "100", "--out", dir.join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = svmd(&["bench", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn signal_one_from_stdin_has_three_modes() {
    let dir = scratch("signal1");
    let truth = dir.join("truth.csv");
    let gen = svmd(&["gen", "1", "--sigma", "0.1", "--truth-out", truth.to_str().unwrap()]);
    assert!(gen.status.success());
    let out_dir = dir.join("o");
    let mut child = Command::new(env!("CARGO_BIN_EXE_svmd"))
        .args(["decompose", "-", "--truth", truth.to_str().unwrap(), "--plot", "--out", out_dir.to_str().unwrap()])
        .stdin(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&gen.stdout).unwrap();
    assert!(child.wait().unwrap().success());

    let r = report(&out_dir);
    assert_eq!(r["mode_count"], 3);
    let metrics = r["metrics"].as_array().unwrap();
    assert_eq!(metrics.len(), 3);
    assert!(metrics.iter().all(|m| m["er"].as_f64().unwrap() < 0.1));
    for f in ["modes.csv", "manifest.json", "plot.svg"] {
        assert!(out_dir.join(f).exists(), "{f} missing");
    }
    let modes = std::fs::read_to_string(out_dir.join("modes.csv")).unwrap();
    assert_eq!(modes.lines().next(), Some("t,mode_1,mode_2,mode_3,residual"));
    assert_eq!(modes.lines().count(), 5001);
}

#[test]
fn plain_cosine_is_one_mode() {
    let dir = scratch("cosine");
    let csv: String = (0..2000)
        .map(|k| format!("{}\n", (2.0 * std::f64::consts::PI * 50.0 * k as f64 / 1000.0).cos()))
        .collect();
    let p = dir.join("cos.csv");
    std::fs::write(&p, csv).unwrap();
    let o = dir.join("o");
    let out = svmd(&[
        "decompose",
        p.to_str().unwrap(),
        "--rate",
        "1000",
        "--no-elongate",
        "--no-refine",
        "--out",
        o.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&o);
    assert_eq!(r["mode_count"], 1);
    assert!((r["modes"][0]["center_hz"].as_f64().unwrap() - 50.0).abs() < 1e-6);

    let modes = std::fs::read_to_string(o.join("modes.csv")).unwrap();
    let (mut num, mut den) = (0.0f64, 0.0f64);
    for (k, line) in modes.lines().skip(1).enumerate() {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        let truth = (2.0 * std::f64::consts::PI * 50.0 * k as f64 / 1000.0).cos();
        num += (v[1] - truth).powi(2);
        den += truth * truth;
    }
    assert!((num / den).sqrt() < 1e-2);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = scratch("rerun");
    let gen = svmd(&["gen", "2", "--sigma", "0.1", "--seed", "1"]);
    let p = dir.join("s2.csv");
    std::fs::write(&p, gen.stdout).unwrap();
    let run = |name: &str| {
        let o = dir.join(name);
        let out = svmd(&["decompose", p.to_str().unwrap(), "--out", o.to_str().unwrap()]);
        assert!(out.status.success());
        o
    };
    let (a, b) = (run("a"), run("b"));
    for f in ["modes.csv", "report.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f} differs");
    }
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["config"]["method"], "svmd");
    assert_eq!(m["input"]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn vmd_method_uses_k() {
    let dir = scratch("vmd");
    let gen = svmd(&["gen", "1", "--sigma", "0.1"]);
    let p = dir.join("s1.csv");
    std::fs::write(&p, gen.stdout).unwrap();
    let o = dir.join("o");
    let out = svmd(&["decompose", p.to_str().unwrap(), "--method", "vmd", "--k", "4", "--out", o.to_str().unwrap()]);
    assert!(out.status.success());
    let r = report(&o);
    assert_eq!(r["mode_count"], 4);
    assert!(r["verdict"].is_null());
}
