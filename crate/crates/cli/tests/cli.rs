use std::fs;
use std::net::UdpSocket;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Duration;

use serde_json::Value;

use singingbot_cli::{run_compare, CompareInputs, CompareSettings};
use singingbot_core::edr::VaTrajectory;
use singingbot_core::formats::{
    parse_actuator_csv, write_blendshape_csv, write_dataset_csv, write_va_csv,
};
use singingbot_core::retarget::default_profile;
use singingbot_core::wire::decode_stream;
use singingbot_core::{
    ActuatorVector, BlendshapeFrame, Error, PairedDataset, PairedSample, VaPoint, Validation,
    NUM_CHANNELS,
};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_singingbot"));
    c.env_remove("SINGINGBOT_PROFILE");
    c
}

fn ok(out: Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}\nstderr: {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

struct Fixture {
    dir: tempfile::TempDir,
}

impl Fixture {
    fn new() -> Self {
        let f = Self {
            dir: tempfile::tempdir().unwrap(),
        };
        let frames: Vec<BlendshapeFrame> = (0..20)
            .map(|i| {
                let t = i as f64 / 19.0;
                BlendshapeFrame::neutral(i as f64 * 40.0)
                    .with("jawOpen", t)
                    .unwrap()
                    .with("mouthSmileLeft", 1.0 - t)
                    .unwrap()
            })
            .collect();
        fs::write(f.path("clip.csv"), write_blendshape_csv(&frames)).unwrap();

        let samples = (0..8)
            .map(|i| {
                let mut bs = [0.0; NUM_CHANNELS];
                bs[17] = i as f64 / 7.0;
                PairedSample::new(bs, ActuatorVector::new(vec![i as f64 / 7.0; 32]).unwrap())
                    .unwrap()
            })
            .collect();
        fs::write(
            f.path("dataset.csv"),
            write_dataset_csv(&PairedDataset::new(samples).unwrap()),
        )
        .unwrap();

        let ring = |r: f64| {
            VaTrajectory::new(
                (0..40)
                    .map(|i| {
                        let a = i as f64 * 0.7;
                        VaPoint::new(r * a.cos(), r * a.sin()).unwrap()
                    })
                    .collect(),
            )
            .unwrap()
        };
        fs::write(f.path("va_wide.csv"), write_va_csv(&ring(0.8))).unwrap();
        fs::write(f.path("va_narrow.csv"), write_va_csv(&ring(0.2))).unwrap();
        let flat = VaTrajectory::new(vec![VaPoint::new(0.3, -0.1).unwrap(); 30]).unwrap();
        fs::write(f.path("va_flat.csv"), write_va_csv(&flat)).unwrap();
        f
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn motors(path: &Path) -> Vec<ActuatorVector> {
    parse_actuator_csv(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn retarget_writes_one_row_per_frame() {
    let f = Fixture::new();
    ok(bin()
        .args(["retarget", "-i"])
        .arg(f.path("clip.csv"))
        .arg("-o")
        .arg(f.path("out.csv"))
        .output()
        .unwrap());
    let m = motors(&f.path("out.csv"));
    assert_eq!(m.len(), 20);
    assert!(m.iter().all(|v| v.len() == 32));
    // jaw opens over the clip
    assert!(m[19].values()[17] > m[0].values()[17]);
}

#[test]
fn retarget_reports_missing_column() {
    let f = Fixture::new();
    let text = fs::read_to_string(f.path("clip.csv"))
        .unwrap()
        .replace("jawOpen", "jawOpn");
    fs::write(f.path("bad.csv"), text).unwrap();
    let out = bin()
        .args(["retarget", "-i"])
        .arg(f.path("bad.csv"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("jawOpen"));
}

#[test]
fn lenient_flag_clamps_out_of_range() {
    let f = Fixture::new();
    let frame = BlendshapeFrame::neutral(0.0).with("jawOpen", 0.5).unwrap();
    let text = write_blendshape_csv(&[frame]).replace(",0.5,", ",1.2,");
    fs::write(f.path("hot.csv"), &text).unwrap();
    let strict = bin()
        .args(["retarget", "-i"])
        .arg(f.path("hot.csv"))
        .output()
        .unwrap();
    assert!(!strict.status.success());
    let lenient = bin()
        .args(["--lenient", "retarget", "-i"])
        .arg(f.path("hot.csv"))
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&lenient.stderr).contains("clamped 1"));
    ok(lenient);
}

#[test]
fn baselines_from_cli() {
    let f = Fixture::new();
    let rt = |seed: &str| {
        ok(bin()
            .args(["--seed", seed, "baseline", "rt", "--dataset"])
            .arg(f.path("dataset.csv"))
            .arg("-i")
            .arg(f.path("clip.csv"))
            .output()
            .unwrap())
    };
    assert_eq!(rt("7"), rt("7"));
    assert_ne!(rt("7"), rt("8"));
    assert_eq!(rt("7").lines().count(), 21);

    let nnr = ok(bin()
        .args(["baseline", "nnr", "--raw", "--dataset"])
        .arg(f.path("dataset.csv"))
        .arg("-i")
        .arg(f.path("clip.csv"))
        .output()
        .unwrap());
    let rows = parse_actuator_csv(&nnr).unwrap();
    assert_eq!(rows.len(), 20);
    // the last frame has jawOpen 1.0, matching sample 7 on that channel
    assert_eq!(rows[19].values()[0], 1.0);
}

#[test]
fn edr_prints_values_and_plots() {
    let f = Fixture::new();
    let out = ok(bin()
        .arg("edr")
        .arg(f.path("va_wide.csv"))
        .arg(f.path("va_flat.csv"))
        .arg("--plot")
        .arg(f.path("hull.svg"))
        .output()
        .unwrap());
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[0].starts_with("va_wide\t"));
    assert_eq!(lines[1], "va_flat\t0.000000");
    let svg = fs::read_to_string(f.path("hull.svg")).unwrap();
    assert_eq!(svg.matches("<polygon").count(), 2);
}

#[test]
fn compare_writes_report() {
    let f = Fixture::new();
    let run = |out: &str| {
        ok(bin()
            .args(["compare", "-i"])
            .arg(f.path("clip.csv"))
            .arg("--dataset")
            .arg(f.path("dataset.csv"))
            .arg("--va")
            .arg(format!("ours={}", f.path("va_wide.csv").display()))
            .arg("--va")
            .arg(format!("rt={}", f.path("va_flat.csv").display()))
            .arg("--va")
            .arg(format!("nnr={}", f.path("va_wide.csv").display()))
            .arg("-o")
            .arg(f.path(out))
            .output()
            .unwrap())
    };
    run("a");
    run("b");
    for name in [
        "motors_ours.csv",
        "motors_rt.csv",
        "motors_nnr.csv",
        "report.json",
        "report.md",
        "edr.svg",
    ] {
        let a = fs::read(f.path("a").join(name)).unwrap();
        let b = fs::read(f.path("b").join(name)).unwrap();
        if name != "report.md" && name != "report.json" {
            assert_eq!(a, b, "{name} differs between runs");
        }
    }
    let report: Value =
        serde_json::from_str(&fs::read_to_string(f.path("a/report.json")).unwrap()).unwrap();
    let edr = report["edr"].as_array().unwrap();
    assert_eq!(edr.len(), 3);
    assert_eq!(edr[0]["edr"], edr[2]["edr"]);
    assert_eq!(edr[1]["edr"], 0.0);
    assert!(edr[0]["edr"].as_f64().unwrap() > 0.0);
    assert_eq!(report["frames"], 20);
    let md = fs::read_to_string(f.path("a/report.md")).unwrap();
    assert!(md.contains("| rt | 30 | 0.0000 |"));
    assert_eq!(motors(&f.path("a/motors_rt.csv")).len(), 20);
}

#[test]
fn compare_aggregates_parse_errors() {
    let f = Fixture::new();
    fs::write(f.path("broken.csv"), "frame,valence\n0,0.1\n").unwrap();
    let settings = CompareSettings {
        sigma: 1.0,
        seed: 42,
        trim_fraction: 0.05,
        validation: Validation::Strict,
        fps: 25,
        raw_nnr: false,
    };
    let inputs = CompareInputs {
        blendshapes: f.path("missing.csv"),
        dataset: f.path("dataset.csv"),
        va: vec![
            ("ours".into(), f.path("broken.csv")),
            ("rt".into(), f.path("va_flat.csv")),
        ],
        output_dir: f.path("out"),
    };
    match run_compare(&inputs, &default_profile(), &settings) {
        Err(Error::Aggregate(errs)) => {
            assert_eq!(errs.len(), 2);
            let text: Vec<String> = errs.iter().map(|e| e.to_string()).collect();
            assert!(text[0].contains("missing.csv"));
            assert!(text[1].contains("broken.csv") && text[1].contains("arousal"));
        }
        other => panic!("expected aggregated errors, got {other:?}"),
    }
    assert!(!f.path("out").exists());
}

#[test]
fn stream_to_file_and_udp() {
    let f = Fixture::new();
    ok(bin()
        .args(["retarget", "-i"])
        .arg(f.path("clip.csv"))
        .arg("-o")
        .arg(f.path("m.csv"))
        .output()
        .unwrap());
    ok(bin()
        .args(["stream", "-i"])
        .arg(f.path("m.csv"))
        .arg("--file")
        .arg(f.path("m.bin"))
        .output()
        .unwrap());
    let frames = decode_stream(&fs::read(f.path("m.bin")).unwrap()).unwrap();
    assert_eq!(frames.len(), 20);
    assert_eq!(frames[19].frame_index, 19);

    let rx = UdpSocket::bind("127.0.0.1:0").unwrap();
    rx.set_read_timeout(Some(Duration::from_secs(3))).unwrap();
    let out = ok(bin()
        .args(["--fps", "100", "stream", "-i"])
        .arg(f.path("m.csv"))
        .arg("--udp")
        .arg(rx.local_addr().unwrap().to_string())
        .output()
        .unwrap());
    assert!(out.starts_with("sent 20 frames"));
    let mut buf = [0u8; 256];
    assert_eq!(rx.recv(&mut buf).unwrap(), 10 + 64);
}

#[test]
fn profile_from_env_and_flag() {
    let f = Fixture::new();
    let doc = singingbot_core::retarget::default_profile_document();
    fs::write(f.path("p.yaml"), doc.to_yaml()).unwrap();
    ok(bin()
        .env("SINGINGBOT_PROFILE", f.path("p.yaml"))
        .args(["retarget", "-i"])
        .arg(f.path("clip.csv"))
        .output()
        .unwrap());
    fs::write(
        f.path("bad.yaml"),
        "robot: {dof: 0, rest_pose: []}\nmappings: {}\n",
    )
    .unwrap();
    let out = bin()
        .args(["retarget", "-i"])
        .arg(f.path("clip.csv"))
        .arg("--profile")
        .arg(f.path("bad.yaml"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("robot.dof"));
}
