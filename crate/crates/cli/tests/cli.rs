use std::path::Path;
use std::process::{Command, Output};

fn helipoly(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_helipoly")).args(args).current_dir(cwd).output().unwrap()
}

fn stderr_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(out.stderr.trim_ascii()).unwrap()
}

const SMALL: &str = "[solver]\nnodes_per_side = 16\nsamples = 50\n[analysis]\nn_max = 20\nterms = 64\n";

const IDS: [&str; 10] = [
    "table1-chp",
    "table1-hhp",
    "table2",
    "fig3-cm",
    "fig4-cl",
    "fig5-7",
    "fig8-10",
    "fig11-triskelion",
    "fig12-13",
    "fig14-15",
];

#[test]
fn list_shows_every_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let out = helipoly(&["list"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let listed: Vec<&str> = text.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(listed, IDS);
}

#[test]
fn unknown_id_fails_before_anything_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = helipoly(&["run", "table2", "fig3cm", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["error"]["kind"], "unknown-experiment");
    assert_eq!(err["error"]["nearest"][0], "fig3-cm");
    // table2 was valid but must not have started
    assert!(!dir.path().join("o").exists());
}

#[test]
fn validate_config_reports_outputs_and_typos() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("ok.toml"), "[run]\nexperiments = [\"table2\", \"fig5-7\"]\n").unwrap();
    let out = helipoly(&["validate-config", "ok.toml"], dir.path());
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["valid"], true);
    assert_eq!(v["experiments"][0]["outputs"][0], "c_theta0_errors.csv");
    assert_eq!(v["experiments"][1]["id"], "fig5-7");

    std::fs::write(dir.path().join("bad.toml"), "[solver]\ncourrant = 0.2\n").unwrap();
    let out = helipoly(&["validate-config", "--config", "bad.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["error"]["kind"], "config");
    assert_eq!(err["error"]["nearest"][0], "courant");
}

#[test]
fn fixed_polygon_rejects_polygon_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.toml"), "[polygon]\nm = 7\n").unwrap();
    let out = helipoly(&["run", "fig5-7", "--config", "c.toml", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn runs_are_deterministic_and_match_their_manifest() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("small.toml"), SMALL).unwrap();
    let ids = ["fig5-7", "fig12-13", "fig3-cm"];
    for (out, jobs) in [("a", "1"), ("b", "3")] {
        let mut args = vec!["run"];
        args.extend(ids);
        args.extend(["--config", "small.toml", "--out", out, "--jobs", jobs]);
        let res = helipoly(&args, dir.path());
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    }
    for id in ids {
        let a = read_dir_sorted(&dir.path().join("a").join(id));
        let b = read_dir_sorted(&dir.path().join("b").join(id));
        let csv = |f: &[(String, Vec<u8>)]| {
            f.iter().filter(|(n, _)| n.ends_with(".csv")).cloned().collect::<Vec<_>>()
        };
        assert_eq!(csv(&a), csv(&b), "{id} differs between runs");

        let manifest: serde_json::Value =
            serde_json::from_slice(&a.iter().find(|(n, _)| n == "manifest.json").unwrap().1).unwrap();
        let mut declared: Vec<String> =
            manifest["outputs"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
        declared.push("manifest.json".into());
        declared.sort();
        let present: Vec<String> = a.iter().map(|(n, _)| n.clone()).collect();
        assert_eq!(present, declared);
        assert_eq!(manifest["experiment"], id);
        let n = &manifest["solver"]["nodes_per_side"];
        assert!(n == 16 || n.as_array().is_some_and(|a| a.iter().all(|x| x == 16)), "{id}: {n}");
    }
}

#[test]
fn table2_golden_rows() {
    let dir = tempfile::tempdir().unwrap();
    let res = helipoly(&["run", "table2", "--out", "o"], dir.path());
    assert!(res.status.success());
    let text = std::fs::read_to_string(dir.path().join("o/table2/c_theta0_errors.csv")).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<Vec<f64>> = rows
        .records()
        .map(|r| r.unwrap().iter().map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 8);
    // q, CHP error, HHP error reference values; the q = 4000 row
    // carries exponent 1e-6, as the halving pattern of its neighbours requires
    let reference = [
        (1000.0, 2.8194e-5, 2.6876e-5),
        (2000.0, 1.4181e-5, 1.3628e-5),
        (4000.0, 7.1117e-6, 6.8621e-6),
        (8000.0, 3.5611e-6, 3.4427e-6),
    ];
    for ((q, chp, hhp), row) in reference.iter().zip(&rows) {
        assert_eq!(row[0], *q);
        assert!((row[2] / chp - 1.0).abs() < 1e-3, "chp q={q}: {}", row[2]);
        assert!((row[4] / hhp - 1.0).abs() < 1e-3, "hhp q={q}: {}", row[4]);
    }
    for w in rows.windows(2) {
        assert!((w[0][2] / w[1][2] - 2.0).abs() < 0.02);
    }
}
