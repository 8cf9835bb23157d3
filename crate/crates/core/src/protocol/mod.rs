//! End-to-end sessions: handshake, alignment, shuffle, sharing and search.

mod strategy;

pub use strategy::{Strategy, StrategyEntry, StrategySpec, VarRef};

use std::time::{Duration, Instant};

use crate::cnf::{CnfError, CnfFormula, CnfMatrix, VariableOrder};
use crate::crypto::{PadLedger, Permutation, PrfId, SessionRng};
use crate::dpll::{SearchEvent, SharedFormula, SolveOutcome, Solver, StepMetrics};
use crate::gc::{GcError, GcSession, GcStats};
use crate::shuffle::{self, RowLayout, SharedMatrix, ShuffleError, ShuffleOptions};
use crate::transport::{bit_length, handshake, Channel, LocalParams, Role, SessionParams, Transcript, TransportError};

#[derive(Debug, thiserror::Error)]
pub enum ProtocolError {
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error(transparent)]
    Cnf(#[from] CnfError),
    #[error(transparent)]
    Shuffle(#[from] ShuffleError),
    #[error(transparent)]
    Gc(#[from] GcError),
    #[error("strategy: {0}")]
    Strategy(String),
    #[error("input: {0}")]
    Input(String),
}

/// One party's formula. Variables `1..=common.len()` are the shared ones in
/// the agreed order; the remaining `n_aux` are private auxiliaries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartyInput {
    pub formula: CnfFormula,
    pub common: Vec<String>,
    pub n_aux: usize,
}

impl PartyInput {
    /// Every variable of `formula` treated as common and named `x1..xn`.
    pub fn all_common(formula: CnfFormula) -> Self {
        let common = (1..=formula.num_vars()).map(|i| format!("x{i}")).collect();
        PartyInput { formula, common, n_aux: 0 }
    }

    fn check(&self) -> Result<(), ProtocolError> {
        let declared = self.common.len() + self.n_aux;
        if self.formula.num_vars() > declared {
            return Err(ProtocolError::Input(format!(
                "formula uses {} variables but only {declared} are declared",
                self.formula.num_vars()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub prf: PrfId,
    pub packed: bool,
    /// Fixed seed for reproducible runs; announced in the handshake.
    pub seed: Option<u64>,
    pub capture_payloads: bool,
    /// Keep this party's plaintext shuffle share in the report for
    /// test-side recombination.
    pub debug_shares: bool,
    pub force_permutation: Option<Permutation>,
    pub handshake_timeout: Option<Duration>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            prf: PrfId::Aes128,
            packed: true,
            seed: None,
            capture_payloads: false,
            debug_shares: false,
            force_permutation: None,
            handshake_timeout: Some(Duration::from_secs(30)),
        }
    }
}

/// Bytes on the wire in each phase, both directions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PhaseBytes {
    pub handshake: u64,
    /// Session setup, preparation and the row shuffle.
    pub shuffle: u64,
    /// Turning shuffle shares into circuit secrets.
    pub sharing: u64,
    pub search: u64,
}

impl PhaseBytes {
    pub fn total(&self) -> u64 {
        self.handshake + self.shuffle + self.sharing + self.search
    }
}

#[derive(Clone, Debug)]
pub struct DebugShares {
    pub payload: SharedMatrix,
    pub permutation: Permutation,
}

#[derive(Debug)]
pub struct PartyReport {
    pub role: Role,
    pub params: SessionParams,
    /// Satisfiability of the conjunction of both formulas.
    pub satisfiable: bool,
    pub events: Vec<SearchEvent>,
    pub event_times: Vec<Duration>,
    pub metrics: StepMetrics,
    pub gc: GcStats,
    pub bytes: PhaseBytes,
    pub shuffle_time: Duration,
    pub total_time: Duration,
    pub transcript: Transcript,
    pub debug: Option<DebugShares>,
}

fn local_params(role: Role, input: &PartyInput, prior_bits: u8, cfg: &RunConfig) -> LocalParams {
    let mut p = LocalParams::new(role, input.common.len() as u32, input.n_aux as u32, input.formula.num_clauses() as u32);
    p.prf = cfg.prf;
    p.packed = cfg.packed;
    p.deterministic = cfg.seed.is_some();
    p.seed = cfg.seed.unwrap_or(0);
    p.names_digest = VariableOrder::new(input.common.clone(), 0, 0).names_digest();
    p.prior_bits = prior_bits;
    p
}

fn cell_bits(mat: &CnfMatrix, row: usize, cols: std::ops::Range<usize>) -> Vec<bool> {
    cols.flat_map(|j| {
        let (o, p) = mat.get(row, j);
        [o, p]
    })
    .collect()
}

fn word(v: u64, width: usize) -> impl Iterator<Item = bool> {
    (0..width).map(move |k| k < 64 && (v >> k) & 1 == 1)
}

/// Splits a shuffled row share into the solver's bit vectors.
fn solver_bits(rows: &[Vec<bool>], m: usize, prior_bits: usize) -> Vec<bool> {
    let n = rows.len();
    let mut o = Vec::with_capacity(n * m);
    let mut p = Vec::with_capacity(n * m);
    let mut prior = Vec::with_capacity(n * prior_bits);
    let mut assign = Vec::with_capacity(n);
    for row in rows {
        for j in 0..m {
            o.push(row[2 * j]);
            p.push(row[2 * j + 1]);
        }
        prior.extend_from_slice(&row[2 * m..2 * m + prior_bits]);
        assign.push(row[2 * m + prior_bits]);
    }
    o.extend(p);
    o.extend(prior);
    o.extend(assign);
    o
}

/// Plaintext inputs hidden behind two debug shares: the permuted matrix,
/// priorities and initial assignment.
pub fn debug_recombine(a: &DebugShares, b: &DebugShares, m: usize, prior_bits: usize) -> (CnfMatrix, Vec<u64>, Vec<bool>) {
    let rows = SharedMatrix::recombine(&a.payload, &b.payload).expect("same shape");
    let n = rows.len();
    let mut mat = CnfMatrix::zeros(n, m);
    let mut prior = Vec::with_capacity(n);
    let mut assign = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        for j in 0..m {
            mat.set(i, j, row[2 * j], row[2 * j + 1]);
        }
        prior.push(row[2 * m..2 * m + prior_bits].iter().enumerate().map(|(k, &b)| (b as u64) << k).sum());
        assign.push(row[2 * m + prior_bits]);
    }
    (mat, prior, assign)
}

/// Runs one party's side of a session on an established channel.
/// `strategy` is only read when `role` is the provider.
pub fn run_party(
    channel: &mut Channel,
    role: Role,
    input: &PartyInput,
    strategy: &StrategySpec,
    cfg: &RunConfig,
) -> Result<PartyReport, ProtocolError> {
    let started = Instant::now();
    input.check()?;
    channel.transcript_mut().set_capture_payloads(cfg.capture_payloads);
    let announced_bits = match role {
        Role::Provider => bit_length(strategy.entries.iter().map(|e| e.priority).max().unwrap_or(1)).max(1),
        Role::Consumer => 0,
    };
    let bytes0 = channel.transcript().total_bytes();
    let params = handshake(channel, &local_params(role, input, announced_bits, cfg), cfg.handshake_timeout)?;
    let after_handshake = channel.transcript().total_bytes();

    let order = VariableOrder::new(input.common.clone(), params.n_aux_a as usize, params.n_aux_b as usize);
    let (n, m_a, m_b) = (params.n(), params.m_a as usize, params.m_b as usize);
    let prior_bits = params.prior_bits as usize;
    let local = order.to_matrix(&input.formula, role)?;

    let mut rng = match cfg.seed {
        Some(seed) => {
            let mixed = match role {
                Role::Consumer => params.seed_a ^ 0x5a5a_a5a5_0f0f_f0f0,
                Role::Provider => params.seed_b,
            };
            SessionRng::deterministic(seed ^ mixed.rotate_left(17))
        }
        None => SessionRng::from_entropy(),
    };
    let shuffle_started = Instant::now();
    let mut gc = GcSession::setup(channel, role, rng.fork("gc"))?;
    let layout = RowLayout::for_formula(m_a, m_b, prior_bits, params.packed);
    let opts = ShuffleOptions { force_permutation: cfg.force_permutation.clone() };
    let mut ledger = PadLedger::new();
    let shuffled = match role {
        Role::Consumer => {
            let rows: Vec<Vec<bool>> = (0..n).map(|i| cell_bits(&local, i, 0..m_a)).collect();
            shuffle::run_consumer(channel, &mut gc, &layout, &rows, params.prf, &opts, &mut rng, &mut ledger)?
        }
        Role::Provider => {
            let strat = strategy.resolve(&order)?;
            if let Some(&p) = strat.prior.iter().find(|&&p| p == 0 || bit_length(p) as usize > prior_bits) {
                return Err(ProtocolError::Strategy(format!("priority {p} does not fit {prior_bits} bits")));
            }
            let rows: Vec<Vec<bool>> = (0..n)
                .map(|i| {
                    let mut r = cell_bits(&local, i, 0..m_b);
                    r.extend(word(strat.prior[i], prior_bits));
                    r.push(strat.assign[i]);
                    r
                })
                .collect();
            shuffle::run_provider(channel, &mut gc, &layout, &rows, params.prf, &opts, &mut rng, &mut ledger)?
        }
    };
    let shuffle_time = shuffle_started.elapsed();
    let after_shuffle = channel.transcript().total_bytes();

    let m = m_a + m_b;
    let own = solver_bits(&shuffled.share.bits(), m, prior_bits);
    let all = gc.share(channel, &own)?;
    let nm = n * m;
    let shared = SharedFormula {
        n,
        m,
        prior_bits,
        o: all.slice(0..nm),
        p: all.slice(nm..2 * nm),
        prior: all.slice(2 * nm..2 * nm + n * prior_bits),
        assign: all.slice(2 * nm + n * prior_bits..all.len()),
    };
    let after_sharing = channel.transcript().total_bytes();

    let SolveOutcome { satisfiable, events, event_times, metrics } =
        Solver::new(channel, &mut gc, n, m, prior_bits).solve(&shared)?;
    let end = channel.transcript().total_bytes();

    let debug = cfg.debug_shares.then(|| DebugShares { payload: shuffled.share.clone(), permutation: shuffled.permutation.clone() });
    Ok(PartyReport {
        role,
        params,
        satisfiable,
        events,
        event_times,
        metrics,
        gc: gc.stats(),
        bytes: PhaseBytes {
            handshake: after_handshake - bytes0,
            shuffle: after_shuffle - after_handshake,
            sharing: after_sharing - after_shuffle,
            search: end - after_sharing,
        },
        shuffle_time,
        total_time: started.elapsed(),
        transcript: channel.take_transcript(),
        debug,
    })
}

/// Both parties in one process over an in-memory pipe, the provider on a
/// second thread.
pub fn run_local(
    consumer: &PartyInput,
    provider: &PartyInput,
    strategy: &StrategySpec,
    consumer_cfg: &RunConfig,
    provider_cfg: &RunConfig,
) -> Result<(PartyReport, PartyReport), ProtocolError> {
    let (mut ca, mut cb) = Channel::pair();
    let (provider, strategy, provider_cfg) = (provider.clone(), strategy.clone(), provider_cfg.clone());
    let handle = std::thread::spawn(move || {
        let r = run_party(&mut cb, Role::Provider, &provider, &strategy, &provider_cfg);
        if r.is_err() {
            cb.abort("provider failed");
        }
        r
    });
    let a = run_party(&mut ca, Role::Consumer, consumer, &StrategySpec::default(), consumer_cfg);
    if a.is_err() {
        ca.abort("consumer failed");
    }
    drop(ca);
    let b = handle.join().expect("provider thread panicked");
    Ok((a?, b?))
}
