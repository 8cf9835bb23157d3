//! Command-line front end shared by the consumer, provider and bench
//! binaries.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context, Result};
use clap::Parser;

use ppsat_core::bench::{self, BenchError, RunMetrics, SweepConfig};
use ppsat_core::bgp::{self, Scenario};
use ppsat_core::cnf::parse_dimacs;
use ppsat_core::crypto::PrfId;
use ppsat_core::protocol::{run_party, PartyInput, RunConfig, StrategySpec};
use ppsat_core::transport::{Channel, Role};

#[derive(Parser, Debug)]
#[command(version, about = "Two-party SAT verification of a provider's configuration against a consumer's agreement")]
pub struct Args {
    /// consumer or provider; must match the binary when it has a fixed role.
    #[arg(long, value_parser = parse_role)]
    pub role: Option<Role>,
    /// Peer address to dial, e.g. 127.0.0.1:7000.
    #[arg(long, conflicts_with = "listen")]
    pub connect: Option<String>,
    /// Address to accept one peer on.
    #[arg(long)]
    pub listen: Option<String>,
    /// DIMACS file holding this party's half of the formula.
    #[arg(long, conflicts_with = "scenario")]
    pub cnf: Option<PathBuf>,
    /// Scenario files (topology, configs or one agreement); repeatable.
    #[arg(long)]
    pub scenario: Vec<PathBuf>,
    /// The last K variables of --cnf are local auxiliaries, not shared.
    #[arg(long, default_value_t = 0)]
    pub aux_vars: usize,
    /// Provider search strategy: `<var> <priority> <0|1>` per line.
    #[arg(long)]
    pub strategy_file: Option<PathBuf>,
    /// Metrics CSV path (bench: per-run rows).
    #[arg(long)]
    pub metrics_out: Option<PathBuf>,
    /// Bench only: per-cell mean/min/max CSV.
    #[arg(long)]
    pub summary_out: Option<PathBuf>,
    /// Session seed; implies --deterministic.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Reproducible randomness from --seed (0 if absent). Announced to the peer.
    #[arg(long)]
    pub deterministic: bool,
    /// aes128 or test (two-round AES).
    #[arg(long, default_value = "aes128", value_parser = parse_prf)]
    pub prf: PrfId,
    /// One 128-bit block per two-bit cell during the shuffle.
    #[arg(long)]
    pub no_block_packing: bool,
    /// Random 3-CNF sweep: n values, m values, instances per cell.
    /// Ranges are `5,10,15` or `5-20:5`.
    #[arg(long, num_args = 3, value_names = ["N_RANGE", "M_RANGE", "COUNT"])]
    pub bench: Option<Vec<String>>,
    /// Bench every .cnf file in a SATLIB directory.
    #[arg(long, conflicts_with = "bench")]
    pub satlib: Option<PathBuf>,
    /// Bench: also time the plaintext driver on each instance.
    #[arg(long)]
    pub reference: bool,
    /// Seconds to wait for the peer (connect retries and handshake).
    #[arg(long, default_value_t = 30)]
    pub timeout: u64,
}

fn parse_role(s: &str) -> Result<Role, String> {
    Role::parse(s).ok_or_else(|| format!("unknown role `{s}`, expected consumer or provider"))
}

fn parse_prf(s: &str) -> Result<PrfId, String> {
    PrfId::parse(s).ok_or_else(|| format!("unknown PRF `{s}`, expected aes128 or test"))
}

/// `a,b,c` or `lo-hi[:step]`.
pub fn parse_range(s: &str) -> Result<Vec<usize>> {
    let bad = || anyhow!("bad range `{s}`");
    let values: Vec<usize> = if let Some((lo, rest)) = s.split_once('-') {
        let (hi, step) = rest.split_once(':').unwrap_or((rest, "1"));
        let (lo, hi, step): (usize, usize, usize) =
            (lo.parse().map_err(|_| bad())?, hi.parse().map_err(|_| bad())?, step.parse().map_err(|_| bad())?);
        if step == 0 || lo > hi {
            return Err(bad());
        }
        (lo..=hi).step_by(step).collect()
    } else {
        s.split(',').map(|v| v.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?
    };
    if values.is_empty() || values.contains(&0) {
        return Err(bad());
    }
    Ok(values)
}

impl Args {
    fn run_config(&self) -> RunConfig {
        RunConfig {
            prf: self.prf,
            packed: !self.no_block_packing,
            seed: self.seed.or(self.deterministic.then_some(0)),
            handshake_timeout: Some(Duration::from_secs(self.timeout)),
            ..RunConfig::default()
        }
    }

    fn role(&self, fixed: Option<Role>) -> Result<Role> {
        match (fixed, self.role) {
            (Some(f), Some(r)) if f != r => {
                bail!("this is the {} binary but --role {} was given", f.name(), r.name())
            }
            (Some(f), _) => Ok(f),
            (None, Some(r)) => Ok(r),
            (None, None) => bail!("--role is required"),
        }
    }
}

/// Entry point for all binaries. Configuration errors exit with 2, run
/// failures with 1.
pub fn main_with(fixed: Option<Role>) -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(fixed, &args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let config = e.downcast_ref::<ConfigError>().is_some();
            ExitCode::from(if config { 2 } else { 1 })
        }
    }
}

/// Bad flags or inputs, reported before any network traffic.
#[derive(Debug)]
struct ConfigError(String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_err(e: impl std::fmt::Display) -> anyhow::Error {
    anyhow::Error::new(ConfigError(e.to_string()))
}

pub fn run(fixed: Option<Role>, args: &Args) -> Result<()> {
    if args.bench.is_some() || args.satlib.is_some() {
        if args.role.is_some() || args.connect.is_some() || args.listen.is_some() {
            return Err(config_err("bench mode runs both parties in-process; drop --role/--connect/--listen"));
        }
        return run_bench(args);
    }
    let role = args.role(fixed).map_err(config_err)?;
    let (input, scenario) = load_input(role, args).map_err(config_err)?;
    let strategy = match (&args.strategy_file, &scenario) {
        (Some(path), _) => read(path)?.parse::<StrategySpec>().map_err(config_err)?,
        (None, Some(s)) if role == Role::Provider => bgp::provider_strategy(&s.topology),
        _ => StrategySpec::default(),
    };
    let mut channel = open_channel(args).map_err(config_err)?;
    let report = run_party(&mut channel, role, &input, &strategy, &args.run_config())?;

    let line = match (report.satisfiable, scenario.is_some()) {
        (false, true) => "UNSAT: agreement correctly implemented",
        (true, true) => "SAT: the configuration admits a route violating the agreement",
        (sat, false) => bench::verdict(sat),
    };
    println!("{line}");
    if let Some(path) = &args.metrics_out {
        let name = args
            .cnf
            .as_ref()
            .or(args.scenario.last())
            .and_then(|p| p.file_stem())
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let row = RunMetrics::from_report(&name, &report);
        bench::write_csv_file(path, |f| bench::write_runs_csv(f, &[row]))?;
    }
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_input(role: Role, args: &Args) -> Result<(PartyInput, Option<Scenario>)> {
    if let Some(path) = &args.cnf {
        let f = parse_dimacs(&read(path)?).with_context(|| path.display().to_string())?;
        let n = f.num_vars();
        if args.aux_vars > n {
            bail!("--aux-vars {} exceeds the {n} declared variables", args.aux_vars);
        }
        let common = (1..=n - args.aux_vars).map(|i| format!("x{i}")).collect();
        return Ok((PartyInput { formula: f, common, n_aux: args.aux_vars }, None));
    }
    if args.scenario.is_empty() {
        bail!("one of --cnf or --scenario is required");
    }
    let s = Scenario::from_files(&args.scenario)?;
    let input = match role {
        Role::Consumer => {
            let [agreement] = &s.agreements[..] else {
                bail!("the consumer needs exactly one agreement, found {}", s.agreements.len());
            };
            bgp::agreement_input(&s.topology, agreement)?
        }
        Role::Provider => {
            if !s.agreements.is_empty() {
                bail!("agreements belong to the consumer's scenario");
            }
            bgp::config_input(&s.topology, &s.configs)?
        }
    };
    Ok((input, Some(s)))
}

fn open_channel(args: &Args) -> Result<Channel> {
    let timeout = Duration::from_secs(args.timeout);
    match (&args.connect, &args.listen) {
        (Some(addr), _) => {
            let started = Instant::now();
            loop {
                match Channel::connect(addr.as_str()) {
                    Ok(c) => return Ok(c),
                    Err(e) if started.elapsed() >= timeout => return Err(anyhow!("connecting to {addr}: {e}")),
                    Err(_) => std::thread::sleep(Duration::from_millis(50)),
                }
            }
        }
        (None, Some(addr)) => Channel::listen(addr.as_str()).map_err(|e| anyhow!("listening on {addr}: {e}")),
        (None, None) => bail!("one of --connect or --listen is required"),
    }
}

fn run_bench(args: &Args) -> Result<()> {
    let progress = |r: &RunMetrics| {
        eprintln!(
            "{} n={} m={} {} {:.3}s {} bytes {} iterations",
            r.instance, r.n, r.m, r.verdict, r.total_delay_s, r.bytes_total, r.gc_iterations
        )
    };
    let mut run = args.run_config();
    run.handshake_timeout = None;
    let runs = match (&args.bench, &args.satlib) {
        (Some(spec), _) => {
            let cfg = SweepConfig {
                ns: parse_range(&spec[0]).map_err(config_err)?,
                ms: parse_range(&spec[1]).map_err(config_err)?,
                count: spec[2].parse().map_err(|_| config_err(format!("bad count `{}`", spec[2])))?,
                seed: args.seed.unwrap_or(1),
                run,
                reference: args.reference,
            };
            bench::bench_sweep(&cfg, progress)?
        }
        (None, Some(dir)) => bench::bench_satlib(dir, &run, args.reference, progress).map_err(|e| match e {
            BenchError::MissingDataset(_) => config_err(e),
            e => e.into(),
        })?,
        (None, None) => unreachable!("bench mode checked by the caller"),
    };
    match &args.metrics_out {
        Some(path) => bench::write_csv_file(path, |f| bench::write_runs_csv(f, &runs))?,
        None => bench::write_runs_csv(std::io::stdout().lock(), &runs)?,
    }
    if let Some(path) = &args.summary_out {
        let cells = bench::summarize(&runs);
        bench::write_csv_file(path, |f| bench::write_summary_csv(f, &cells))?;
    }
    Ok(())
}
