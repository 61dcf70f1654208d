use std::fs;
use std::path::Path;

use sand::config::{ExperimentConfig, TopologyChoice};
use sand::netfile;
use sand::output::parse_results_csv;
use sand::runner::{run_experiment, sweep_features, RunOptions, DEFAULT_FEATURE_COUNTS};
use sand_core::{generate_topology, Scheme, SimTime, TopologyParams};

fn small_random(seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        topology: TopologyChoice::Random,
        devices: 50,
        features: 10,
        requests: 100,
        ttl: SimTime::INFINITE,
        depth_limit: 50,
        ..ExperimentConfig::new(seed)
    }
}

#[test]
fn unbounded_sand_matches_broadcast_success() {
    for seed in 1..=5 {
        let r = run_experiment(&small_random(seed), &RunOptions::default()).unwrap();
        let rate = |s: Scheme| {
            r.summaries
                .iter()
                .find(|x| x.scheme == s.as_str())
                .unwrap()
                .success_rate
        };
        assert_eq!(rate(Scheme::Sand), rate(Scheme::Broadcast), "seed {seed}");
        assert_eq!(rate(Scheme::Broadcast), 1.0);
    }
}

#[test]
fn sweep_row_counts() {
    let cfg = ExperimentConfig {
        devices: 300,
        requests: 30,
        schemes: vec![Scheme::Sand, Scheme::Broadcast],
        ..ExperimentConfig::new(1)
    };
    let rows = sweep_features(&cfg, &DEFAULT_FEATURE_COUNTS, &RunOptions::default()).unwrap();
    assert_eq!(rows.len(), 10);
    let single = ExperimentConfig {
        schemes: vec![Scheme::Centralized],
        ..cfg
    };
    assert_eq!(
        sweep_features(&single, &[2000], &RunOptions::default())
            .unwrap()
            .len(),
        1
    );
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().into_string().unwrap(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let cfg = ExperimentConfig {
        devices: 500,
        requests: 200,
        ..ExperimentConfig::new(8)
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for (dir, threads) in [(&a, Some(1)), (&b, Some(4))] {
        let opts = RunOptions {
            out_dir: Some(dir.path().to_owned()),
            threads,
            trace_requests: 3,
        };
        sweep_features(&cfg, &[2000, 4000], &opts).unwrap();
    }
    let fa = files(a.path());
    assert!(fa.len() >= 9);
    assert_eq!(fa, files(b.path()));
}

#[test]
fn results_csv_round_trips_to_printed_precision() {
    let dir = tempfile::tempdir().unwrap();
    let opts = RunOptions {
        out_dir: Some(dir.path().to_owned()),
        ..Default::default()
    };
    let result = run_experiment(&small_random(3), &opts).unwrap();
    let text = fs::read(dir.path().join("results.csv")).unwrap();
    let parsed = parse_results_csv(&text[..]).unwrap();
    assert_eq!(parsed.len(), result.summaries.len());
    for p in &parsed {
        let s = result
            .summaries
            .iter()
            .find(|s| s.scheme == p.scheme)
            .unwrap();
        assert_eq!(
            (p.features, p.requests, p.successes),
            (s.features, s.requests, s.successes)
        );
        for (x, y) in [
            (p.success_rate, s.success_rate),
            (p.avg_contacted, s.avg_contacted),
            (p.avg_hops, s.avg_hops),
        ] {
            assert!((x - y).abs() <= 5e-5, "{x} vs {y}");
        }
    }
    let net = netfile::load_from_str(&fs::read_to_string(dir.path().join("network.txt")).unwrap())
        .unwrap();
    assert_eq!(net, result.network);
}

#[test]
fn scale_free_thousand_resaves_identically() {
    let net = generate_topology(TopologyParams::ScaleFree { m: 3 }, 1000, 1).unwrap();
    let text = netfile::save_to_string(&net);
    let back = netfile::load_from_str(&text).unwrap();
    assert_eq!(back, net);
    assert_eq!(netfile::save_to_string(&back), text);
}
