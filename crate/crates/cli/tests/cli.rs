//! End-to-end checks of the binary: exit codes, determinism, idempotent
//! reruns, and the empty-run contract.

use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_latgauge"))
}

/// Small config with per-test overrides; later `key = value` lines replace
/// the defaults before writing, keeping the TOML free of duplicate keys.
fn write_config(dir: &Path, extra: &str) -> std::path::PathBuf {
    let path = dir.join("exp.toml");
    let mut lines = vec![
        ("group", "\"su2\"".to_string()),
        ("action", "\"villain\"".to_string()),
        ("n0", "1".to_string()),
        ("n1", "2".to_string()),
        ("seed", "11".to_string()),
        ("samples", "2".to_string()),
        ("burnin", "40".to_string()),
        ("thin", "10".to_string()),
    ];
    for ov in extra.lines().filter(|l| !l.trim().is_empty()) {
        let (k, v) = ov.split_once('=').unwrap();
        let (k, v) = (k.trim(), v.trim().to_string());
        match lines.iter_mut().find(|(key, _)| *key == k) {
            Some(slot) => slot.1 = v,
            None => lines.push((Box::leak(k.to_string().into_boxed_str()), v)),
        }
    }
    let text: String = lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
    fs::write(&path, text).unwrap();
    path
}

fn tree_bytes(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().map(|x| x != "json").unwrap_or(true) {
                // Manifests carry wall times; every other byte must agree.
                let rel = p.strip_prefix(root).unwrap().display().to_string();
                out.push((rel, fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn zero_samples_empty_manifest_exit_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "samples = 0\n");
    let out = tmp.path().join("out");
    let st = bin().args(["sample", "-c"]).arg(&cfg).arg("-o").arg(&out).status().unwrap();
    assert!(st.success());
    let manifest = fs::read_to_string(out.join("manifest_sample.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&manifest).unwrap();
    assert_eq!(v["files"].as_array().unwrap().len(), 0);
    assert_eq!(fs::read_dir(out.join("samples")).unwrap().count(), 0);
}

#[test]
fn bad_config_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "n0 = 5\n"); // n0 > n1
    let st = bin().args(["sample", "-c"]).arg(&cfg).status().unwrap();
    assert_eq!(st.code(), Some(2));

    let missing = tmp.path().join("nope.toml");
    let st = bin().args(["sample", "-c"]).arg(&missing).status().unwrap();
    assert_eq!(st.code(), Some(2));
}

#[test]
fn full_pipeline_is_deterministic_and_idempotent() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "chains = 2\nalpha = [0.4, 0.9]\n");
    let out1 = tmp.path().join("a");
    let out2 = tmp.path().join("b");
    for out in [&out1, &out2] {
        let st = bin().args(["all", "-c"]).arg(&cfg).arg("-o").arg(out).status().unwrap();
        assert!(st.success());
    }
    let t1 = tree_bytes(&out1);
    assert!(!t1.is_empty());
    assert_eq!(t1, tree_bytes(&out2), "reruns must be byte-identical");

    // Rerunning a stage in place reproduces its own outputs.
    let before = tree_bytes(&out1);
    let st = bin().args(["gaugefix", "-c"]).arg(&cfg).arg("-o").arg(&out1).status().unwrap();
    assert!(st.success());
    assert_eq!(before, tree_bytes(&out1));

    // Expected artifacts exist.
    for f in [
        "samples/c00_s0000.snap",
        "samples/c01_s0000.snap",
        "gauge/c00_s0000.form",
        "gauge/diagnostics.csv",
        "norms/norms.csv",
        "scaling/buckets.csv",
        "scaling/sup.csv",
    ] {
        assert!(out1.join(f).exists(), "{f} missing");
    }
    // Seed override changes the snapshots.
    let out3 = tmp.path().join("c");
    let st = bin()
        .args(["sample", "-c"])
        .arg(&cfg)
        .arg("-o")
        .arg(&out3)
        .args(["--seed", "12"])
        .status()
        .unwrap();
    assert!(st.success());
    assert_ne!(
        fs::read(out1.join("samples/c00_s0000.snap")).unwrap(),
        fs::read(out3.join("samples/c00_s0000.snap")).unwrap()
    );
}

#[test]
fn csvs_carry_config_hash_and_manifests_exist() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "group = \"u1\"\n");
    let out = tmp.path().join("out");
    let st = bin().args(["all", "-c"]).arg(&cfg).arg("-o").arg(&out).status().unwrap();
    assert!(st.success());
    let manifest = fs::read_to_string(out.join("manifest_norms.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&manifest).unwrap();
    let hash = v["config_hash"].as_str().unwrap().to_string();
    assert_eq!(hash.len(), 16);
    for csv in ["gauge/diagnostics.csv", "norms/norms.csv", "scaling/buckets.csv", "scaling/sup.csv"]
    {
        let text = fs::read_to_string(out.join(csv)).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("config_hash,"));
        let mut rows = 0;
        for line in lines {
            assert!(line.starts_with(&hash), "{csv}: row missing hash: {line}");
            rows += 1;
        }
        assert!(rows > 0, "{csv} has no data rows");
    }
    for m in ["manifest_sample.json", "manifest_gaugefix.json", "manifest_scaling.json"] {
        assert!(out.join(m).exists());
    }
}

#[test]
fn norms_guard_refuses_large_scans() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("big.toml");
    fs::write(
        &cfg_path,
        "group = \"u1\"\naction = \"villain\"\nn0 = 2\nn1 = 8\nseed = 1\nsamples = 1\n",
    )
    .unwrap();
    let st = bin().args(["norms", "-c"]).arg(&cfg_path).status().unwrap();
    assert_eq!(st.code(), Some(2));
}

#[test]
fn output_root_falls_back_to_env() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "samples = 0\n");
    let env_out = tmp.path().join("envout");
    let st = bin()
        .args(["sample", "-c"])
        .arg(&cfg)
        .env("LATGAUGE_OUT", &env_out)
        .status()
        .unwrap();
    assert!(st.success());
    assert!(env_out.join("manifest_sample.json").exists());
}
