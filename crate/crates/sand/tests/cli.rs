use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sand::netfile;
use sand::output::RESULTS_HEADER;

fn sand(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sand"))
        .args(args)
        .output()
        .expect("spawn sand")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn assert_one_line_failure(out: &Output, needle: &str) {
    assert!(!out.status.success());
    let err = stderr(out);
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    assert!(err.contains(needle), "{err}");
}

#[test]
fn run_without_seed_names_the_flag() {
    assert_one_line_failure(&sand(&["run", "--devices", "10"]), "--seed");
    assert_one_line_failure(&sand(&["sweep"]), "--seed");
    assert_one_line_failure(&sand(&["generate"]), "--seed");
}

#[test]
fn bad_arguments() {
    assert_one_line_failure(
        &sand(&["run", "--seed", "1", "--colour", "red"]),
        "--colour",
    );
    assert_one_line_failure(&sand(&["run", "--seed", "x"]), "--seed");
    assert_one_line_failure(&sand(&["run", "--seed", "1", "--ttl", "soon"]), "ttl");
    assert_one_line_failure(
        &sand(&["run", "--seed", "1", "--features", "2"]),
        "features",
    );
    assert_one_line_failure(
        &sand(&["rank", "/nonexistent/net.txt"]),
        "/nonexistent/net.txt",
    );
    assert_one_line_failure(
        &sand(&["report", "/nonexistent/a.csv"]),
        "/nonexistent/a.csv",
    );
}

#[test]
fn generate_then_load() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("net.txt");
    let p = path.to_str().unwrap();
    let out = sand(&[
        "generate",
        "--topology",
        "scale-free",
        "--devices",
        "1000",
        "--seed",
        "1",
        "--out",
        p,
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(&path).unwrap();
    let net = netfile::load_from_str(&text).unwrap();
    assert_eq!(net.len(), 1000);
    assert_eq!(net.seed(), 1);
    assert_eq!(net.social_edge_count(), net.comm_edge_count());
    assert_eq!(netfile::save_to_string(&net), text);

    let ranks = sand(&["rank", p]);
    assert!(ranks.status.success());
    let csv = String::from_utf8(ranks.stdout).unwrap();
    assert_eq!(csv.lines().next(), Some("device,k,d,c,b,R"));
    assert_eq!(csv.lines().count(), 1001);
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn sweep_defaults_cover_the_feature_range() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let out = sand(&[
        "sweep",
        "--seed",
        "2",
        "--devices",
        "400",
        "--requests",
        "40",
        "--out-dir",
        out_dir,
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = read(dir.path(), "results.csv");
    assert_eq!(String::from_utf8(out.stdout).unwrap(), csv);
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 15);
    for scheme in ["broadcast", "centralized", "sand"] {
        let fs: Vec<&str> = rows
            .iter()
            .filter(|r| r.starts_with(&format!("{scheme},")))
            .map(|r| r.split(',').nth(1).unwrap())
            .collect();
        assert_eq!(fs, ["2000", "4000", "6000", "8000", "10000"]);
    }
    assert!(dir.path().join("network-6000.txt").exists());
    assert!(dir.path().join("hist-sand-10000.csv").exists());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(
        &cfg,
        "topology = \"random\"\ndevices = 80\nfeatures = 20\nrequests = 30\nschemes = [\"sand\"]\nseed = 4\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = sand(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--requests",
        "25",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = read(&out_dir, "results.csv");
    assert_eq!(csv.lines().next(), Some(RESULTS_HEADER));
    assert!(csv.lines().nth(1).unwrap().starts_with("sand,20,25,"));
    assert!(read(&out_dir, "network.txt")
        .starts_with("sand-network 1\ntopology random\nseed 4\ndevices 80\n"));

    fs::write(&cfg, "seed = 4\nrequest = 3\n").unwrap();
    let bad = sand(&["run", "--config", cfg.to_str().unwrap()]);
    assert_one_line_failure(&bad, "request");
}

#[test]
fn report_merges_and_rejects_duplicates() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for (d, f) in [(&a, "20"), (&b, "30")] {
        let out = sand(&[
            "run",
            "--seed",
            "3",
            "--topology",
            "random",
            "--devices",
            "60",
            "--features",
            f,
            "--requests",
            "20",
            "--schemes",
            "sand,broadcast",
            "--out-dir",
            d.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let (ra, rb) = (a.join("results.csv"), b.join("results.csv"));
    let merged = sand(&["report", rb.to_str().unwrap(), ra.to_str().unwrap()]);
    assert!(merged.status.success());
    let text = String::from_utf8(merged.stdout).unwrap();
    let keys: Vec<String> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').take(2).collect::<Vec<_>>().join(","))
        .collect();
    assert_eq!(keys, ["broadcast,20", "broadcast,30", "sand,20", "sand,30"]);

    let dup = sand(&["report", ra.to_str().unwrap(), ra.to_str().unwrap()]);
    assert_one_line_failure(&dup, "duplicate");
}
