use std::f64::consts::FRAC_1_SQRT_2;
use std::fs;
use std::path::Path;
use std::process::Command as Process;

use clap::Parser;
use hubbard_gf::cli::commands::compare_files;
use hubbard_gf::cli::format::{Axis, SeriesFile};
use hubbard_gf::cli::{run, Cli};
use hubbard_gf::{HubbardModel, HubbardParams, SectorKey};
use serde_json::Value;
use tempfile::TempDir;

fn invoke(args: &[&str]) -> String {
    let cli =
        Cli::try_parse_from(std::iter::once("hubbard-gf").chain(args.iter().copied())).unwrap();
    let mut out = Vec::new();
    run(&cli, &mut out).unwrap();
    String::from_utf8(out).unwrap()
}

fn out_dir(dir: &TempDir) -> &str {
    dir.path().to_str().unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn info_report() {
    let text = invoke(&["info"]);
    assert!(text.contains("U = 0.6830907036"));
    assert!(text.contains("sector (2,2) dimension 36"));
    let small = invoke(&["--set", "sites=2", "info"]);
    assert!(small.contains("sector (1,1) dimension 4"));
    assert!(small.contains("sector (2,1) dimension 2"));
}

#[test]
fn groundstate_report() {
    let dir = TempDir::new().unwrap();
    invoke(&["--out", out_dir(&dir), "groundstate"]);
    let doc = read_json(&dir.path().join("groundstate.json"));
    assert!(doc["max_coefficient_delta"].as_f64().unwrap() < 1e-6);
    assert!(doc["normalization_residual"].as_f64().unwrap() < 1e-12);
    assert_eq!(doc["coefficients"][0]["determinant"], "0u1u0d1d");
    assert!(
        (doc["coefficients"][0]["value"]["re"].as_f64().unwrap() - 0.6895316741725).abs() < 1e-6
    );
    assert_eq!(doc["degenerate"], false);

    let free = TempDir::new().unwrap();
    invoke(&["--out", out_dir(&free), "--set", "u=0", "groundstate"]);
    let doc = read_json(&free.path().join("groundstate.json"));
    let e0 = doc["energy"].as_f64().unwrap();
    let band = hubbard_gf::bandstructure(&HubbardParams::<f64>::default()).unwrap();
    assert!((e0 - 2.0 * (band.energy(0) + band.energy(1))).abs() < 1e-12);
    assert!((e0 - doc["band_filling_energy"].as_f64().unwrap()).abs() < 1e-12);
    assert_eq!(doc["degenerate"], true);
}

#[test]
fn ucc_report() {
    let dir = TempDir::new().unwrap();
    let text = invoke(&["--out", out_dir(&dir), "ucc"]);
    assert!(text.contains("fidelity from printed digits"));
    let doc = read_json(&dir.path().join("ucc.json"));
    let amp = &doc["amplitudes"][1];
    assert_eq!(amp["determinant"], "0u3u0d3d");
    assert!((amp["value"]["re"].as_f64().unwrap() - -0.6886258223794277).abs() < 1e-9);
    assert!((doc["fidelity"].as_f64().unwrap() - 0.99979).abs() < 2e-4);
    assert!(doc["max_delta_reference"].as_f64().unwrap() < 1e-9);

    let zero = TempDir::new().unwrap();
    invoke(&[
        "--out",
        out_dir(&zero),
        "--set",
        "theta1=0",
        "--set",
        "theta3=0",
        "--set",
        "theta4=0",
        "ucc",
    ]);
    let doc = read_json(&zero.path().join("ucc.json"));
    let amps: Vec<f64> = (0..10)
        .map(|i| doc["amplitudes"][i]["value"]["re"].as_f64().unwrap())
        .collect();
    assert!((amps[0] - FRAC_1_SQRT_2).abs() < 1e-12);
    assert!((amps[1] + FRAC_1_SQRT_2).abs() < 1e-12);
    assert!(amps[2..].iter().all(|a| a.abs() < 1e-12));
}

#[test]
fn greens_files() {
    let dir = TempDir::new().unwrap();
    let d = out_dir(&dir);
    invoke(&["--out", d, "greens", "--state", "exact"]);
    invoke(&["--out", d, "greens", "--state", "ucc"]);
    for name in ["k0_up", "k1_up", "k2_up", "k3_up", "r0-0_up"] {
        let f = SeriesFile::read(&dir.path().join(format!("greens_exact_{name}.csv"))).unwrap();
        assert_eq!(f.axis, Axis::Time);
        assert_eq!(f.x.len(), 2001);
        assert_eq!(f.x[0], 0.0);
        assert!(
            f.re[0].abs() < 1e-12 && (f.im[0] + 1.0).abs() < 1e-12,
            "{name}"
        );
    }
    let text = fs::read_to_string(dir.path().join("greens_exact_k0_up.csv")).unwrap();
    assert!(text.starts_with("t,re_g,im_g\n0,"));
    assert!(!text.contains('\r'));

    let k1 = SeriesFile::read(&dir.path().join("greens_exact_k1_up.csv")).unwrap();
    let k3 = SeriesFile::read(&dir.path().join("greens_exact_k3_up.csv")).unwrap();
    let gap = k1
        .re
        .iter()
        .zip(&k3.re)
        .chain(k1.im.iter().zip(&k3.im))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(gap < 1e-12, "{gap}");

    let m = compare_files(
        &dir.path().join("greens_exact_r0-0_up.csv"),
        &dir.path().join("greens_ucc_r0-0_up.csv"),
    )
    .unwrap();
    assert!(m.max_abs_diff > 1e-5 && m.max_abs_diff < 1e-3);
}

#[test]
fn identical_configs_give_identical_bytes() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for dir in [&a, &b] {
        invoke(&[
            "--out",
            out_dir(dir),
            "--tmax",
            "10",
            "greens",
            "--state",
            "ucc",
        ]);
        invoke(&["--out", out_dir(dir), "--format", "json", "spectral"]);
    }
    let mut names: Vec<_> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert!(names.len() >= 10);
    for name in names {
        assert_eq!(
            fs::read(a.path().join(&name)).unwrap(),
            fs::read(b.path().join(&name)).unwrap(),
            "{name:?}"
        );
    }
}

#[test]
fn json_and_csv_give_the_same_metrics() {
    let csv = TempDir::new().unwrap();
    let json = TempDir::new().unwrap();
    for (dir, fmt) in [(&csv, "csv"), (&json, "json")] {
        for state in ["exact", "ucc"] {
            invoke(&[
                "--out",
                out_dir(dir),
                "--format",
                fmt,
                "--channel",
                "k1_up",
                "greens",
                "--state",
                state,
            ]);
        }
    }
    let from_csv = compare_files(
        &csv.path().join("greens_exact_k1_up.csv"),
        &csv.path().join("greens_ucc_k1_up.csv"),
    )
    .unwrap();
    let from_json = compare_files(
        &json.path().join("greens_exact_k1_up.json"),
        &json.path().join("greens_ucc_k1_up.json"),
    )
    .unwrap();
    assert_eq!(from_csv, from_json);
    let mixed = compare_files(
        &csv.path().join("greens_exact_k1_up.csv"),
        &json.path().join("greens_exact_k1_up.json"),
    )
    .unwrap();
    assert_eq!(mixed.max_abs_diff, 0.0);
}

#[test]
fn compare_examples() {
    let dir = TempDir::new().unwrap();
    let base = SeriesFile {
        stage: "greens".into(),
        state: "exact".into(),
        channel: "k0_up".into(),
        axis: Axis::Time,
        x: vec![0.0, 0.5, 1.0],
        re: vec![0.0, 0.25, -0.5],
        im: vec![-1.0, -0.75, 0.125],
    };
    let a = base
        .write(dir.path(), hubbard_gf::cli::format::Format::Csv)
        .unwrap();
    let shifted = SeriesFile {
        state: "ucc".into(),
        re: base.re.iter().map(|r| r + 0.3).collect(),
        ..base.clone()
    };
    let b = shifted
        .write(dir.path(), hubbard_gf::cli::format::Format::Csv)
        .unwrap();
    let same = compare_files(&a, &a).unwrap();
    assert_eq!(same.max_abs_diff, 0.0);
    assert_eq!(same.rms_diff, 0.0);
    let m = compare_files(&a, &b).unwrap();
    assert!((m.max_abs_diff - 0.3).abs() < 1e-15);
    assert_eq!(m.max_im_diff, 0.0);

    let short = SeriesFile {
        state: "short".into(),
        x: vec![0.0, 0.5],
        re: vec![0.0; 2],
        im: vec![0.0; 2],
        ..base.clone()
    };
    let c = short
        .write(dir.path(), hubbard_gf::cli::format::Format::Csv)
        .unwrap();
    assert!(compare_files(&a, &c).is_err());
}

#[test]
fn spectral_lehmann_summary() {
    let dir = TempDir::new().unwrap();
    let text = invoke(&[
        "--out",
        out_dir(&dir),
        "--channel",
        "k0_up",
        "spectral",
        "--source",
        "lehmann",
    ]);
    let line = text
        .lines()
        .find(|l| l.starts_with("sum rule k0_up = "))
        .unwrap();
    let value: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!((value - 1.0).abs() < 1e-2);

    let doc = read_json(&dir.path().join("spectral_lehmann_summary.json"));
    let model = HubbardModel::new(HubbardParams::default()).unwrap();
    let e0 = model
        .sector(SectorKey::new(4, 2, 2))
        .unwrap()
        .eigen
        .ground_energy();
    let plus = model.sector(SectorKey::new(4, 3, 2)).unwrap();
    let minus = model.sector(SectorKey::new(4, 1, 2)).unwrap();
    for p in doc["channels"][0]["poles"].as_array().unwrap() {
        let e = p["energy"].as_f64().unwrap();
        let found = if p["addition"].as_bool().unwrap() {
            plus.eigen
                .eigenvalues
                .iter()
                .any(|x: &f64| (x - e0 - e).abs() < 1e-12)
        } else {
            minus
                .eigen
                .eigenvalues
                .iter()
                .any(|x: &f64| (e0 - x - e).abs() < 1e-12)
        };
        assert!(found, "pole {e}");
    }
}

#[test]
fn transformed_and_noninteracting_sources() {
    let dir = TempDir::new().unwrap();
    invoke(&[
        "--out",
        out_dir(&dir),
        "--tmax",
        "20",
        "spectral",
        "--source",
        "transformed",
        "--state",
        "ucc",
    ]);
    let f = SeriesFile::read(&dir.path().join("spectral_ucc_k2_up.csv")).unwrap();
    assert_eq!(f.axis, Axis::Frequency);
    assert_eq!(f.x.len(), 1201);
    invoke(&[
        "--out",
        out_dir(&dir),
        "spectral",
        "--source",
        "noninteracting",
    ]);
    assert!(dir
        .path()
        .join("spectral_noninteracting_k3_up.csv")
        .exists());
    assert!(!dir
        .path()
        .join("spectral_noninteracting_r0-0_up.csv")
        .exists());
}

#[test]
fn noninteracting_self_energy_vanishes() {
    let dir = TempDir::new().unwrap();
    invoke(&["--out", out_dir(&dir), "--set", "u=0", "selfenergy"]);
    let doc = read_json(&dir.path().join("selfenergy_lehmann_summary.json"));
    for c in doc["channels"].as_array().unwrap() {
        assert!(c["sup_norm"].as_f64().unwrap() < 1e-8);
        assert!(c["invalid_points"].as_array().unwrap().is_empty());
    }
    let f = SeriesFile::read(&dir.path().join("selfenergy_lehmann_k0_up.csv")).unwrap();
    assert!(f.re.iter().chain(&f.im).all(|v| v.abs() < 1e-8));
}

#[test]
fn interacting_self_energy_summary() {
    let dir = TempDir::new().unwrap();
    invoke(&[
        "--out",
        out_dir(&dir),
        "--set",
        "omega_max=10",
        "selfenergy",
    ]);
    let doc = read_json(&dir.path().join("selfenergy_lehmann_summary.json"));
    for c in doc["channels"].as_array().unwrap() {
        let re = c["edge_re_sigma"].as_f64().unwrap();
        let hartree = c["hartree"].as_f64().unwrap();
        assert!((re / hartree - 1.0).abs() < 0.15, "{c}");
    }
}

fn binary(args: &[&str]) -> (i32, String) {
    let out = Process::new(env!("CARGO_BIN_EXE_hubbard-gf"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(binary(&["--out", out_dir(&dir), "info"]).0, 0);

    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\n  \"grid\": {\n    \"dt\": \"fast\"\n  }\n}\n").unwrap();
    let (code, err) = binary(&["--config", bad.to_str().unwrap(), "info"]);
    assert_eq!(code, 2);
    assert!(err.contains("line 3"), "{err}");
    assert_eq!(binary(&["--set", "nonsense=1", "info"]).0, 2);
    assert_eq!(binary(&["--eta", "-1", "info"]).0, 2);
    assert_eq!(binary(&["--format", "xml", "info"]).0, 2);
    assert_eq!(binary(&["no-such-command"]).0, 2);

    assert_eq!(
        binary(&["--set", "sites=6", "--out", out_dir(&dir), "ucc"]).0,
        3
    );
    assert_eq!(
        binary(&["--channel", "r0-0_up", "--out", out_dir(&dir), "selfenergy"]).0,
        2
    );

    let missing = dir.path().join("missing.csv");
    assert_eq!(
        binary(&[
            "compare",
            missing.to_str().unwrap(),
            missing.to_str().unwrap()
        ])
        .0,
        4
    );
    let blocked = dir.path().join("file-not-dir");
    fs::write(&blocked, "").unwrap();
    assert_eq!(
        binary(&["--out", blocked.to_str().unwrap(), "groundstate"]).0,
        4
    );
}
