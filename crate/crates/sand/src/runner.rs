//! Experiment orchestration: network construction, workloads, scheme runs
//! and result files.

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sand_core::seed::{self, Domain};
use sand_core::{
    assign_features, broadcast_discover, build_overlay, build_rank_table, centralized_discover,
    generate_topology, sand_discover, sand_discover_traced, summarize, DiscoveryOutcome,
    GenerateError, MetricsSummary, Network, RankTable, RequestWorkload, Scheme, WorkloadError,
};
use thiserror::Error;

use crate::config::{ConfigError, ExperimentConfig};
use crate::netfile;
use crate::output::{self, CsvError};

pub const RESULTS_FILE: &str = "results.csv";
pub const NETWORK_FILE: &str = "network.txt";
pub const TRACE_FILE: &str = "trace-sand.csv";

/// Feature counts swept when none are given.
pub const DEFAULT_FEATURE_COUNTS: [u32; 5] = [2_000, 4_000, 6_000, 8_000, 10_000];

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    Workload(#[from] WorkloadError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: CsvError },
    #[error("thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
    #[error("feature count list is empty")]
    NoFeatureCounts,
    #[error("duplicate result row for scheme {scheme} with {features} features")]
    DuplicateRow { scheme: String, features: u32 },
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Where result files go; nothing is written when `None`.
    pub out_dir: Option<PathBuf>,
    /// Worker threads for request-level parallelism; rayon's default if `None`.
    pub threads: Option<usize>,
    /// Number of leading requests whose SAND token moves are logged.
    pub trace_requests: usize,
}

#[derive(Debug)]
pub struct ExperimentResult {
    pub network: Network,
    /// One summary per configured scheme, in scheme order.
    pub summaries: Vec<MetricsSummary>,
}

/// Communication topology only; identical for every feature count.
pub fn build_topology(cfg: &ExperimentConfig) -> Result<Network, RunError> {
    Ok(generate_topology(
        cfg.topology_params(),
        cfg.devices,
        cfg.seed,
    )?)
}

/// Draws profiles for `cfg.features` and rebuilds the overlay.
pub fn populate(net: &mut Network, cfg: &ExperimentConfig) -> Result<(), RunError> {
    let mut rng = seed::rng(cfg.seed, Domain::Features, u64::from(cfg.features));
    assign_features(net, cfg.features, cfg.features_per_device, &mut rng)?;
    build_overlay(net, cfg.overlay);
    Ok(())
}

pub fn build_network(cfg: &ExperimentConfig) -> Result<Network, RunError> {
    cfg.validate()?;
    let mut net = build_topology(cfg)?;
    populate(&mut net, cfg)?;
    Ok(net)
}

pub fn run_scheme(
    scheme: Scheme,
    net: &Network,
    ranks: &RankTable,
    workload: &RequestWorkload,
) -> Vec<DiscoveryOutcome> {
    workload
        .requests
        .par_iter()
        .map(|req| match scheme {
            Scheme::Sand => sand_discover(net, ranks, req),
            Scheme::Broadcast => broadcast_discover(net, req),
            Scheme::Centralized => centralized_discover(net, req),
        })
        .collect()
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, RunError> {
    match threads {
        Some(n) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()?
            .install(f)),
        None => Ok(f()),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, RunError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| RunError::Io {
            path: path.to_owned(),
            source,
        })
}

fn write_file(
    path: &Path,
    f: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>,
) -> Result<(), RunError> {
    let mut w = create(path)?;
    f(&mut w)
        .and_then(|()| w.flush())
        .map_err(|source| RunError::Io {
            path: path.to_owned(),
            source,
        })
}

fn prepare_dir(dir: &Path) -> Result<(), RunError> {
    fs::create_dir_all(dir).map_err(|source| RunError::Io {
        path: dir.to_owned(),
        source,
    })
}

pub fn histogram_file_name(scheme: &str, features: u32) -> String {
    format!("hist-{scheme}-{features}.csv")
}

/// Runs every configured scheme over one workload on an already populated
/// network.
fn run_on(
    net: &Network,
    cfg: &ExperimentConfig,
    opts: &RunOptions,
    trace_name: &str,
) -> Result<Vec<MetricsSummary>, RunError> {
    let ranks = build_rank_table(net);
    let workload =
        RequestWorkload::generate(net, cfg.seed, cfg.requests, cfg.ttl, cfg.depth_limit)?;
    let mut summaries = Vec::with_capacity(cfg.schemes.len());
    for &scheme in &cfg.schemes {
        let outcomes = with_pool(opts.threads, || run_scheme(scheme, net, &ranks, &workload))?;
        let summary = summarize(scheme.as_str(), &outcomes)
            .expect("validated configs have at least one request")
            .with_features(cfg.features);
        summaries.push(summary);
    }
    if let Some(dir) = &opts.out_dir {
        for s in &summaries {
            let path = dir.join(histogram_file_name(&s.scheme, s.features));
            write_file(&path, |w| output::emit_histogram_csv(&s.hop_histogram, w))?;
        }
        if opts.trace_requests > 0 && cfg.schemes.contains(&Scheme::Sand) {
            let path = dir.join(trace_name);
            write_file(&path, |w| {
                writeln!(w, "{}", output::TRACE_HEADER)?;
                for (i, req) in workload
                    .requests
                    .iter()
                    .take(opts.trace_requests)
                    .enumerate()
                {
                    let mut result = Ok(());
                    sand_discover_traced(net, &ranks, req, |e| {
                        if result.is_ok() {
                            result = output::write_trace_event(w, i, &e);
                        }
                    });
                    result?;
                }
                Ok(())
            })?;
        }
    }
    Ok(summaries)
}

fn write_results(dir: &Path, summaries: &[MetricsSummary]) -> Result<(), RunError> {
    write_file(&dir.join(RESULTS_FILE), |w| output::emit_csv(summaries, w))
}

fn write_network(path: &Path, net: &Network) -> Result<(), RunError> {
    write_file(path, |w| netfile::save_network(net, w))
}

/// One experiment: build the network, rank it once, generate the workload
/// and run every configured scheme on it.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    opts: &RunOptions,
) -> Result<ExperimentResult, RunError> {
    let network = build_network(cfg)?;
    if let Some(dir) = &opts.out_dir {
        prepare_dir(dir)?;
    }
    let summaries = run_on(&network, cfg, opts, TRACE_FILE)?;
    if let Some(dir) = &opts.out_dir {
        write_results(dir, &summaries)?;
        write_network(&dir.join(NETWORK_FILE), &network)?;
    }
    Ok(ExperimentResult { network, summaries })
}

pub fn network_file_name(features: u32) -> String {
    format!("network-{features}.txt")
}

/// Runs the experiment once per feature count on a single topology. Profiles
/// and overlay are redrawn per count, so a sweep row equals the matching
/// `run_experiment` row.
pub fn sweep_features(
    cfg: &ExperimentConfig,
    feature_counts: &[u32],
    opts: &RunOptions,
) -> Result<Vec<MetricsSummary>, RunError> {
    if feature_counts.is_empty() {
        return Err(RunError::NoFeatureCounts);
    }
    let mut counts = feature_counts.to_vec();
    counts.sort_unstable();
    counts.dedup();
    for &f in &counts {
        cfg.with_features(f).validate()?;
    }
    if let Some(dir) = &opts.out_dir {
        prepare_dir(dir)?;
    }
    let topology = build_topology(cfg)?;
    let mut all = Vec::new();
    for f in counts {
        let cfg = cfg.with_features(f);
        let mut net = topology.clone();
        populate(&mut net, &cfg)?;
        all.extend(run_on(&net, &cfg, opts, &format!("trace-sand-{f}.csv"))?);
        if let Some(dir) = &opts.out_dir {
            write_network(&dir.join(network_file_name(f)), &net)?;
        }
    }
    if let Some(dir) = &opts.out_dir {
        write_results(dir, &all)?;
    }
    Ok(all)
}

pub fn read_results(path: &Path) -> Result<Vec<MetricsSummary>, RunError> {
    let file = File::open(path).map_err(|source| RunError::Io {
        path: path.to_owned(),
        source,
    })?;
    output::parse_results_csv(BufReader::new(file)).map_err(|source| RunError::Csv {
        path: path.to_owned(),
        source,
    })
}

/// Concatenates result files; a `(scheme, features)` pair may appear once.
pub fn merge_reports(paths: &[PathBuf]) -> Result<Vec<MetricsSummary>, RunError> {
    let mut rows = Vec::new();
    for p in paths {
        rows.extend(read_results(p)?);
    }
    rows.sort_by(|a, b| (&a.scheme, a.features).cmp(&(&b.scheme, b.features)));
    if let Some(w) = rows
        .windows(2)
        .find(|w| w[0].scheme == w[1].scheme && w[0].features == w[1].features)
    {
        return Err(RunError::DuplicateRow {
            scheme: w[0].scheme.clone(),
            features: w[0].features,
        });
    }
    Ok(rows)
}
