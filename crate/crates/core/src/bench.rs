//! Benchmark harness: timed prover runs over generated datasets.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generator::{self, GenError, GenParams, ManifestRow};
use crate::syntax::{parse_concept, Concept, Logic, ParseError};
use crate::tableau::{prove, ProverConfig, ProverError};

/// First line of every CSV the harness writes.
pub const CSV_VERSION_LINE: &str = "# alciota-bench v1";

pub const CSV_COLUMNS: [&str; 10] =
    ["id", "seed", "size", "k", "gds", "lds", "verdict", "runtime_ms", "timed_out", "excluded"];

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("{file}: {source}")]
    Parse { file: PathBuf, source: ParseError },
    #[error("concept {id}: {source}")]
    Prover { id: usize, source: ProverError },
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    /// Runs per concept; the minimum is recorded.
    pub runs: usize,
    pub timeout: Duration,
    /// Leave concepts of the form `¬∃r.C` out of the averages.
    pub exclude_trivial: bool,
    pub workers: usize,
    pub logic: Logic,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig { runs: 5, timeout: Duration::from_secs(10), exclude_trivial: true, workers: 1, logic: Logic::Alci }
    }
}

impl BenchConfig {
    fn validate(&self) -> Result<(), BenchError> {
        if self.runs == 0 {
            return Err(BenchError::Config("runs must be at least 1".into()));
        }
        if self.timeout.is_zero() {
            return Err(BenchError::Config("timeout must be positive".into()));
        }
        if self.workers == 0 {
            return Err(BenchError::Config("workers must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub id: usize,
    pub seed: u64,
    pub size: usize,
    pub k: usize,
    pub gds: usize,
    pub lds: usize,
    /// `sat`, `unsat` or `timeout`.
    pub verdict: String,
    /// Minimum over the completed runs; the elapsed time of the failing
    /// run when the concept timed out.
    pub runtime_ms: f64,
    pub timed_out: bool,
    pub excluded: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub runs_ms: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub dataset: String,
    pub concepts: usize,
    /// Rows entering the averages.
    pub measured: usize,
    pub avg_ms: f64,
    /// Sample standard deviation; 0 with fewer than two measured rows.
    pub std_ms: f64,
    pub timeouts: usize,
    pub excluded: usize,
    pub sat: usize,
    pub unsat: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub summary: BenchSummary,
    pub rows: Vec<BenchRow>,
}

/// `¬∃r.C`, which is satisfiable without applying any rule.
pub fn is_trivial_shape(c: &Concept) -> bool {
    matches!(c, Concept::Not(inner) if matches!(inner.as_ref(), Concept::Exists(..)))
}

pub fn summarize(dataset: &str, rows: &[BenchRow]) -> BenchSummary {
    let times: Vec<f64> = rows.iter().filter(|r| !r.timed_out && !r.excluded).map(|r| r.runtime_ms).collect();
    let n = times.len();
    let avg = if n == 0 { 0.0 } else { times.iter().sum::<f64>() / n as f64 };
    let std = if n < 2 { 0.0 } else { (times.iter().map(|t| (t - avg).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt() };
    BenchSummary {
        dataset: dataset.to_string(),
        concepts: rows.len(),
        measured: n,
        avg_ms: avg,
        std_ms: std,
        timeouts: rows.iter().filter(|r| r.timed_out).count(),
        excluded: rows.iter().filter(|r| r.excluded).count(),
        sat: rows.iter().filter(|r| r.verdict == "sat").count(),
        unsat: rows.iter().filter(|r| r.verdict == "unsat").count(),
    }
}

/// A concept to benchmark with its manifest data.
#[derive(Debug, Clone)]
pub struct BenchInput {
    pub id: usize,
    pub meta: ManifestRow,
    pub concept: Concept,
}

/// Runs one concept up to `cfg.runs` times, stopping at the first timeout.
pub fn bench_one(input: &BenchInput, cfg: &BenchConfig) -> Result<BenchRow, BenchError> {
    let pcfg = ProverConfig { logic: cfg.logic, timeout: Some(cfg.timeout), ..ProverConfig::default() };
    let mut runs = Vec::with_capacity(cfg.runs);
    let mut verdict = None;
    let mut timed_out = false;
    for _ in 0..cfg.runs {
        let start = Instant::now();
        let res = prove(&input.concept, None, &pcfg);
        let ms = start.elapsed().as_secs_f64() * 1e3;
        runs.push(ms);
        match res {
            Ok(r) => verdict = Some(r.verdict),
            Err(ProverError::Timeout(_)) => {
                timed_out = true;
                break;
            }
            Err(source) => return Err(BenchError::Prover { id: input.id, source }),
        }
    }
    let runtime_ms = if timed_out {
        *runs.last().expect("at least one run")
    } else {
        runs.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let verdict = match (timed_out, verdict) {
        (true, _) | (false, None) => "timeout".to_string(),
        (false, Some(v)) => v.to_string(),
    };
    Ok(BenchRow {
        id: input.id,
        seed: input.meta.seed,
        size: input.meta.size,
        k: input.meta.k,
        gds: input.meta.gds,
        lds: input.meta.lds,
        verdict,
        runtime_ms,
        timed_out,
        excluded: cfg.exclude_trivial && is_trivial_shape(&input.concept),
        runs_ms: runs,
    })
}

/// Benchmarks every input, on `cfg.workers` threads. Rows come back in id order.
pub fn bench_inputs(inputs: &[BenchInput], cfg: &BenchConfig) -> Result<Vec<BenchRow>, BenchError> {
    cfg.validate()?;
    if cfg.workers == 1 {
        return inputs.iter().map(|i| bench_one(i, cfg)).collect();
    }
    let next = AtomicUsize::new(0);
    let out: Mutex<Vec<Option<Result<BenchRow, BenchError>>>> = Mutex::new((0..inputs.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..cfg.workers.min(inputs.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= inputs.len() {
                    break;
                }
                let row = bench_one(&inputs[i], cfg);
                out.lock().expect("worker panicked")[i] = Some(row);
            });
        }
    });
    out.into_inner().expect("worker panicked").into_iter().map(|r| r.expect("every row filled")).collect()
}

/// Reads the manifest and concept files of a generated dataset.
pub fn load_dataset(dir: &Path) -> Result<Vec<BenchInput>, BenchError> {
    let manifest = generator::read_manifest(dir)?;
    let mut inputs = Vec::with_capacity(manifest.len());
    for (id, meta) in manifest.into_iter().enumerate() {
        let file = dir.join(generator::concept_file_name(id));
        let text = fs::read_to_string(&file).map_err(|source| BenchError::Io { path: file.clone(), source })?;
        let concept = parse_concept(&text).map_err(|source| BenchError::Parse { file, source })?;
        inputs.push(BenchInput { id, meta, concept });
    }
    Ok(inputs)
}

pub fn bench_dataset(dir: &Path, cfg: &BenchConfig) -> Result<BenchReport, BenchError> {
    let inputs = load_dataset(dir)?;
    let rows = bench_inputs(&inputs, cfg)?;
    let name = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| dir.display().to_string());
    Ok(BenchReport { summary: summarize(&name, &rows), rows })
}

pub fn write_csv<W: Write>(mut w: W, rows: &[BenchRow]) -> Result<(), BenchError> {
    writeln!(w, "{CSV_VERSION_LINE}").map_err(|source| BenchError::Io { path: PathBuf::from("<csv>"), source })?;
    let mut cw = csv::Writer::from_writer(w);
    cw.write_record(CSV_COLUMNS)?;
    for r in rows {
        cw.write_record([
            r.id.to_string(),
            r.seed.to_string(),
            r.size.to_string(),
            r.k.to_string(),
            r.gds.to_string(),
            r.lds.to_string(),
            r.verdict.clone(),
            format!("{:.6}", r.runtime_ms),
            r.timed_out.to_string(),
            r.excluded.to_string(),
        ])?;
    }
    cw.flush().map_err(|source| BenchError::Io { path: PathBuf::from("<csv>"), source })?;
    Ok(())
}

/// Parses a CSV written by [`write_csv`]; per-run times are not stored there.
pub fn read_csv<R: std::io::Read>(r: R) -> Result<Vec<BenchRow>, BenchError> {
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
    Ok(rd.deserialize().collect::<Result<Vec<BenchRow>, _>>()?)
}

/// Names and templates of the six comparison datasets: descriptions
/// making up 0.1, 0.3 and 0.5 of the binary operators, global first.
pub fn table_datasets() -> Vec<(String, GenParams)> {
    let mut out = Vec::new();
    for (kind, global) in [("gd", true), ("ld", false)] {
        for frac in [0.1, 0.3, 0.5] {
            let p = GenParams {
                gd_fraction: if global { frac } else { 0.0 },
                ld_fraction: if global { 0.0 } else { frac },
                ..GenParams::default()
            };
            out.push((format!("{kind}_{frac:.1}k"), p));
        }
    }
    out
}

/// Generates the six datasets under `root` (each with seeds
/// `base_seed .. base_seed + count`) and benchmarks them in order.
pub fn table_run(root: &Path, count: usize, base_seed: u64, cfg: &BenchConfig) -> Result<Vec<BenchReport>, BenchError> {
    let mut reports = Vec::new();
    for (name, tpl) in table_datasets() {
        let dir = root.join(&name);
        generator::generate_dataset(&tpl, count, base_seed, &dir)?;
        reports.push(bench_dataset(&dir, cfg)?);
    }
    Ok(reports)
}

/// Fixed-width text table of summaries, one line per dataset.
pub fn format_summaries(summaries: &[BenchSummary]) -> String {
    let mut s = format!(
        "{:<12} {:>8} {:>8} {:>12} {:>12} {:>8} {:>8}\n",
        "dataset", "concepts", "measured", "avg_ms", "std_ms", "timeouts", "excluded"
    );
    for m in summaries {
        s.push_str(&format!(
            "{:<12} {:>8} {:>8} {:>12.3} {:>12.3} {:>8} {:>8}\n",
            m.dataset, m.concepts, m.measured, m.avg_ms, m.std_ms, m.timeouts, m.excluded
        ));
    }
    s
}
