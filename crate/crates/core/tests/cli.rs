use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use risbeam::experiment::{read_rows, summarize, CSV_COLUMNS};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ris-experiment")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn bad_config_exits_two_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.conf", "[system]\nnum_users = 2\nnoise = quiet\n");
    let out = bin(&["run", &cfg, "-o", dir.path().join("out").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3:"), "{err}");
    assert!(!dir.path().join("out").exists());
}

#[test]
fn sweep_writes_one_row_per_point_trial_and_method() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sweep.conf",
        "[system]\nnum_users = 2\nunits_per_user = 3K\nnoise = -114dBm\n\
         [scenario]\nseed = 9\n\
         [run]\nmethods = DM, MRT, ZF\ntrials = 2\n\
         [sweep]\nparameter = sinr_target\nvalues = 0dB, 3dB, 6dB, 10dB\n",
    );
    let out_dir = dir.path().join("out");
    let out = bin(&["run", &cfg, "-o", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("summary.txt").exists());
    let (rows, skipped) = read_rows(&out_dir.join("results.csv")).unwrap();
    assert_eq!(skipped, 0);
    assert_eq!(rows.len(), 4 * 2 * 3);
    assert!(rows.iter().all(|r| r.units_per_user == 6 && r.num_users == 2));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("savings DM over MRT"), "{stdout}");
}

#[test]
fn flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.conf", "[system]\nnum_users = 2\nunits_per_user = 4\n[run]\nmethods = DM, MRT, ZF\ntrials = 5\n");
    let out_dir = dir.path().join("o");
    let out = bin(&["run", &cfg, "-o", out_dir.to_str().unwrap(), "--trials", "2", "--methods", "MRT", "--seed", "77"]);
    assert_eq!(out.status.code(), Some(0));
    let (rows, _) = read_rows(&out_dir.join("results.csv")).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.method == "MRT"));
    assert_eq!(rows[0].seed, 77);
    assert_eq!(rows[1].seed, 78);
}

#[test]
fn summary_skips_malformed_rows() {
    let dir = tempfile::tempdir().unwrap();
    let header = CSV_COLUMNS.join(",");
    let good = "p0-t0,1,DM,2,4,3,3,centralized,0,optimal,0.001,0,1,5,0,";
    let other = "p0-t0,1,MRT,2,4,3,3,centralized,0,feasible,0.002,3.01,1,7,,";
    let csv = write(dir.path(), "r.csv", &format!("{header}\n{good}\nnot,a,row\n{other}\np0-t1,x,DM\n"));
    let out = bin(&["summary", &csv]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("2 malformed rows skipped"), "{stdout}");
    assert!(stdout.contains("savings DM over MRT: 50.0%"), "{stdout}");
}

#[test]
fn summary_rejects_empty_file() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "empty.csv", &format!("{}\n", CSV_COLUMNS.join(",")));
    let out = bin(&["summary", &csv]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no result rows"));
}

#[test]
fn identical_methods_save_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.conf", "[system]\nnum_users = 2\nunits_per_user = 4\n[run]\nmethods = MRT\ntrials = 3\n");
    let out_dir = dir.path().join("o");
    assert_eq!(bin(&["run", &cfg, "-o", out_dir.to_str().unwrap()]).status.code(), Some(0));
    let (mut rows, _) = read_rows(&out_dir.join("results.csv")).unwrap();
    let copies: Vec<_> = rows
        .iter()
        .cloned()
        .map(|mut r| {
            r.method = "MRT2".into();
            r
        })
        .collect();
    rows.extend(copies);
    let text = summarize(&rows, 0).render();
    assert!(text.contains("savings MRT over MRT2: 0.0%"), "{text}");
    assert!(text.contains("savings MRT2 over MRT: 0.0%"), "{text}");
}
