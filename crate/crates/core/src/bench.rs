//! Benchmark instances and the two-party sweep.
//!
//! SAT instances are split by clauses: the first `ceil(m/2)` go to the
//! consumer, the rest to the provider, and every variable is common.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::cnf::{parse_dimacs, CnfFormula, CnfMatrix, DimacsError};
use crate::oracle::dpll_plain;
use crate::protocol::{run_local, PartyInput, PartyReport, ProtocolError, RunConfig, Strategy, StrategySpec};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("{path}: {msg}")]
    Io { path: PathBuf, msg: String },
    #[error("{path}: {err}")]
    Dimacs { path: PathBuf, err: DimacsError },
    #[error("dataset {0} has no .cnf files")]
    MissingDataset(PathBuf),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("{instance}: two-party verdict {got} but the plaintext driver says {want}")]
    VerdictMismatch { instance: String, got: bool, want: bool },
    #[error("csv: {0}")]
    Csv(String),
}

/// Uniform random 3-CNF: each clause draws three distinct variables (fewer
/// when `n < 3`) and independent signs.
pub fn random_3cnf(rng: &mut impl Rng, n: usize, m: usize) -> CnfFormula {
    let width = n.min(3);
    let clauses = (0..m)
        .map(|_| {
            let mut vars: Vec<i32> = Vec::with_capacity(width);
            while vars.len() < width {
                let v = rng.gen_range(1..=n as i32);
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
            vars.into_iter().map(|v| if rng.gen() { v } else { -v }).collect()
        })
        .collect();
    CnfFormula::new(n, clauses).expect("literals within range")
}

pub fn split_half(f: &CnfFormula) -> (PartyInput, PartyInput) {
    let n = f.num_vars();
    let (a, b) = f.split_at(f.num_clauses().div_ceil(2));
    let widen = |g: CnfFormula| PartyInput::all_common(g.with_num_vars(n).expect("split keeps the variable range"));
    (widen(a), widen(b))
}

/// Every `*.cnf` file under `dir`, sorted by name.
pub fn load_satlib(dir: &Path) -> Result<Vec<(String, CnfFormula)>, BenchError> {
    let io = |e: std::io::Error| BenchError::Io { path: dir.to_path_buf(), msg: e.to_string() };
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "cnf"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(BenchError::MissingDataset(dir.to_path_buf()));
    }
    paths
        .into_iter()
        .map(|path| {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| BenchError::Io { path: path.clone(), msg: e.to_string() })?;
            let f = parse_dimacs(&text).map_err(|err| BenchError::Dimacs { path: path.clone(), err })?;
            let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            Ok((name, f))
        })
        .collect()
}

/// One row of the metrics CSV.
#[derive(Clone, Debug, Serialize)]
pub struct RunMetrics {
    pub n: usize,
    pub m: usize,
    pub instance: String,
    pub shuffle_delay_s: f64,
    pub total_delay_s: f64,
    pub bytes_total: u64,
    pub gc_iterations: u64,
    pub verdict: &'static str,
    pub plain_dpll_delay_s: Option<f64>,
    pub shuffle_bytes: u64,
    pub search_bytes: u64,
    /// Driver passes of the plaintext reference on the joint formula.
    pub plain_iterations: Option<u64>,
}

impl RunMetrics {
    pub fn from_report(instance: &str, report: &PartyReport) -> RunMetrics {
        RunMetrics {
            n: report.params.n(),
            m: report.params.m(),
            instance: instance.to_string(),
            shuffle_delay_s: report.shuffle_time.as_secs_f64(),
            total_delay_s: report.total_time.as_secs_f64(),
            bytes_total: report.transcript.total_bytes(),
            gc_iterations: report.metrics.iterations,
            verdict: verdict(report.satisfiable),
            plain_dpll_delay_s: None,
            shuffle_bytes: report.bytes.shuffle,
            search_bytes: report.bytes.search,
            plain_iterations: None,
        }
    }

    pub fn satisfiable(&self) -> bool {
        self.verdict == "SAT"
    }

    pub fn bytes_per_iteration(&self) -> f64 {
        self.search_bytes as f64 / self.gc_iterations.max(1) as f64
    }
}

pub fn verdict(sat: bool) -> &'static str {
    if sat {
        "SAT"
    } else {
        "UNSAT"
    }
}

/// Runs both parties in-process on a half/half split of `f` and checks the
/// verdict against the plaintext driver on the joint formula. Priorities are
/// distinct, so the driver's pass count does not depend on the shuffle.
pub fn run_instance(instance: &str, f: &CnfFormula, cfg: &RunConfig, reference: bool) -> Result<RunMetrics, BenchError> {
    let (a, b) = split_half(f);
    let (report, _) = run_local(&a, &b, &StrategySpec::default(), cfg, cfg)?;
    let mut metrics = RunMetrics::from_report(instance, &report);
    let started = Instant::now();
    let s = Strategy::default_for(f.num_vars());
    let mat = CnfMatrix::from_formula(f).map_err(ProtocolError::Cnf)?;
    let plain = dpll_plain(&mat, &s.prior, &s.assign);
    if reference {
        metrics.plain_dpll_delay_s = Some(started.elapsed().as_secs_f64());
    }
    metrics.plain_iterations = Some(plain.iterations as u64);
    if plain.satisfiable != report.satisfiable {
        return Err(BenchError::VerdictMismatch {
            instance: instance.to_string(),
            got: report.satisfiable,
            want: plain.satisfiable,
        });
    }
    Ok(metrics)
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub ns: Vec<usize>,
    pub ms: Vec<usize>,
    pub count: usize,
    pub seed: u64,
    pub run: RunConfig,
    pub reference: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            ns: vec![5, 10, 15, 20],
            ms: vec![10, 20, 30, 40],
            count: 5,
            seed: 1,
            run: RunConfig::default(),
            reference: false,
        }
    }
}

/// Random-instance sweep over every `(n, m)` cell, cells in order. Each
/// instance gets its own generator seed so cells are reproducible alone.
pub fn bench_sweep(cfg: &SweepConfig, mut on_run: impl FnMut(&RunMetrics)) -> Result<Vec<RunMetrics>, BenchError> {
    let mut out = Vec::new();
    for &n in &cfg.ns {
        for &m in &cfg.ms {
            for k in 0..cfg.count {
                let seed = cfg.seed ^ ((n as u64) << 48) ^ ((m as u64) << 32) ^ k as u64;
                let mut rng = ChaCha20Rng::seed_from_u64(seed);
                let f = random_3cnf(&mut rng, n, m);
                let mut run = cfg.run.clone();
                run.seed = cfg.run.seed.map(|s| s ^ seed);
                let metrics = run_instance(&format!("rand-n{n}-m{m}-{k}"), &f, &run, cfg.reference)?;
                on_run(&metrics);
                out.push(metrics);
            }
        }
    }
    Ok(out)
}

/// Runs every instance of a SATLIB directory.
pub fn bench_satlib(
    dir: &Path,
    run: &RunConfig,
    reference: bool,
    mut on_run: impl FnMut(&RunMetrics),
) -> Result<Vec<RunMetrics>, BenchError> {
    let mut out = Vec::new();
    for (name, f) in load_satlib(dir)? {
        let metrics = run_instance(&name, &f, run, reference)?;
        on_run(&metrics);
        out.push(metrics);
    }
    Ok(out)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Stat {
    fn of(values: impl Iterator<Item = f64>) -> Stat {
        let v: Vec<f64> = values.collect();
        if v.is_empty() {
            return Stat::default();
        }
        Stat {
            mean: v.iter().sum::<f64>() / v.len() as f64,
            min: v.iter().copied().fold(f64::INFINITY, f64::min),
            max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CellSummary {
    pub n: usize,
    pub m: usize,
    pub samples: usize,
    pub sat: usize,
    pub shuffle_delay_s: Stat,
    pub total_delay_s: Stat,
    pub bytes_total: Stat,
    pub gc_iterations: Stat,
}

#[derive(Serialize)]
struct SummaryRow {
    n: usize,
    m: usize,
    samples: usize,
    sat: usize,
    shuffle_delay_s_mean: f64,
    shuffle_delay_s_min: f64,
    shuffle_delay_s_max: f64,
    total_delay_s_mean: f64,
    total_delay_s_min: f64,
    total_delay_s_max: f64,
    bytes_total_mean: f64,
    bytes_total_min: f64,
    bytes_total_max: f64,
    gc_iterations_mean: f64,
    gc_iterations_min: f64,
    gc_iterations_max: f64,
}

/// Groups runs by the session's `(n, m)`, cells in ascending order.
pub fn summarize(runs: &[RunMetrics]) -> Vec<CellSummary> {
    let mut cells: BTreeMap<(usize, usize), Vec<&RunMetrics>> = BTreeMap::new();
    for r in runs {
        cells.entry((r.n, r.m)).or_default().push(r);
    }
    cells
        .into_iter()
        .map(|((n, m), rs)| CellSummary {
            n,
            m,
            samples: rs.len(),
            sat: rs.iter().filter(|r| r.satisfiable()).count(),
            shuffle_delay_s: Stat::of(rs.iter().map(|r| r.shuffle_delay_s)),
            total_delay_s: Stat::of(rs.iter().map(|r| r.total_delay_s)),
            bytes_total: Stat::of(rs.iter().map(|r| r.bytes_total as f64)),
            gc_iterations: Stat::of(rs.iter().map(|r| r.gc_iterations as f64)),
        })
        .collect()
}

fn csv_err(e: impl std::fmt::Display) -> BenchError {
    BenchError::Csv(e.to_string())
}

pub fn write_runs_csv(w: impl Write, runs: &[RunMetrics]) -> Result<(), BenchError> {
    let mut out = csv::Writer::from_writer(w);
    for r in runs {
        out.serialize(r).map_err(csv_err)?;
    }
    out.flush().map_err(csv_err)
}

pub fn write_summary_csv(w: impl Write, cells: &[CellSummary]) -> Result<(), BenchError> {
    let mut out = csv::Writer::from_writer(w);
    for c in cells {
        out.serialize(SummaryRow {
            n: c.n,
            m: c.m,
            samples: c.samples,
            sat: c.sat,
            shuffle_delay_s_mean: c.shuffle_delay_s.mean,
            shuffle_delay_s_min: c.shuffle_delay_s.min,
            shuffle_delay_s_max: c.shuffle_delay_s.max,
            total_delay_s_mean: c.total_delay_s.mean,
            total_delay_s_min: c.total_delay_s.min,
            total_delay_s_max: c.total_delay_s.max,
            bytes_total_mean: c.bytes_total.mean,
            bytes_total_min: c.bytes_total.min,
            bytes_total_max: c.bytes_total.max,
            gc_iterations_mean: c.gc_iterations.mean,
            gc_iterations_min: c.gc_iterations.min,
            gc_iterations_max: c.gc_iterations.max,
        })
        .map_err(csv_err)?;
    }
    out.flush().map_err(csv_err)
}

pub fn write_csv_file(path: &Path, write: impl FnOnce(std::fs::File) -> Result<(), BenchError>) -> Result<(), BenchError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| BenchError::Io { path: dir.to_path_buf(), msg: e.to_string() })?;
    }
    let file = std::fs::File::create(path).map_err(|e| BenchError::Io { path: path.to_path_buf(), msg: e.to_string() })?;
    write(file)
}

/// Least-squares line `y = a x + b` and its coefficient of determination.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub a: f64,
    pub b: f64,
    pub r2: f64,
}

pub fn linear_fit(points: &[(f64, f64)]) -> Option<LinearFit> {
    let k = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let a = sxy / sxx;
    let b = my - a * mx;
    let ss_res: f64 = points.iter().map(|p| (p.1 - a * p.0 - b).powi(2)).sum();
    let ss_tot: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Some(LinearFit { a, b, r2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_shape() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let f = random_3cnf(&mut rng, 20, 40);
        assert_eq!((f.num_vars(), f.num_clauses()), (20, 40));
        for c in f.clauses() {
            assert_eq!(c.len(), 3);
            let mut vars: Vec<_> = c.iter().map(|l| l.abs()).collect();
            vars.dedup();
            vars.sort_unstable();
            vars.dedup();
            assert_eq!(vars.len(), 3);
        }
        let f = random_3cnf(&mut rng, 2, 5);
        assert!(f.clauses().iter().all(|c| c.len() == 2));
    }

    #[test]
    fn split_is_ceil_floor() {
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let f = random_3cnf(&mut rng, 4, 7);
        let (a, b) = split_half(&f);
        assert_eq!((a.formula.num_clauses(), b.formula.num_clauses()), (4, 3));
        assert_eq!(a.formula.num_vars(), 4);
        assert_eq!(b.common, a.common);
    }

    #[test]
    fn fit_recovers_a_line() {
        let pts: Vec<(f64, f64)> = (0..10).map(|x| (x as f64, 3.0 * x as f64 + 2.0)).collect();
        let fit = linear_fit(&pts).unwrap();
        assert!((fit.a - 3.0).abs() < 1e-9 && (fit.b - 2.0).abs() < 1e-9 && (fit.r2 - 1.0).abs() < 1e-12);
        assert!(linear_fit(&[(1.0, 1.0)]).is_none());
    }

    #[test]
    fn summary_groups_cells() {
        let row = |n, m, t: f64, sat| RunMetrics {
            n,
            m,
            instance: String::new(),
            shuffle_delay_s: t / 2.0,
            total_delay_s: t,
            bytes_total: 10,
            gc_iterations: 3,
            verdict: verdict(sat),
            plain_dpll_delay_s: None,
            shuffle_bytes: 4,
            search_bytes: 6,
            plain_iterations: None,
        };
        let cells = summarize(&[row(5, 10, 1.0, true), row(5, 10, 3.0, false), row(4, 10, 2.0, true)]);
        assert_eq!(cells.len(), 2);
        assert_eq!((cells[1].n, cells[1].samples, cells[1].sat), (5, 2, 1));
        assert_eq!((cells[1].total_delay_s.mean, cells[1].total_delay_s.min, cells[1].total_delay_s.max), (2.0, 1.0, 3.0));
        let mut buf = Vec::new();
        write_summary_csv(&mut buf, &cells).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,m,samples,sat,shuffle_delay_s_mean"));
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn runs_csv_header() {
        let mut buf = Vec::new();
        let r = RunMetrics {
            n: 1,
            m: 2,
            instance: "x".into(),
            shuffle_delay_s: 0.5,
            total_delay_s: 1.0,
            bytes_total: 9,
            gc_iterations: 2,
            verdict: "UNSAT",
            plain_dpll_delay_s: None,
            shuffle_bytes: 1,
            search_bytes: 2,
            plain_iterations: Some(2),
        };
        write_runs_csv(&mut buf, &[r]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let header = text.lines().next().unwrap();
        assert!(header.starts_with("n,m,instance,shuffle_delay_s,total_delay_s,bytes_total,gc_iterations,verdict"));
    }
}
