//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any gating criterion fails. CSVs land in
//! `target/acceptance/`.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use ppsat_core::bench::{self, linear_fit, random_3cnf, split_half, RunMetrics, SweepConfig};
use ppsat_core::bgp::{agreement_input, config_input, provider_strategy, Scenario};
use ppsat_core::cnf::CnfFormula;
use ppsat_core::crypto::{unpack_bits, PadLedger, Permutation, PrfId, SessionRng};
use ppsat_core::dpll::{trace_text, SearchEvent};
use ppsat_core::gc::GcSession;
use ppsat_core::oracle::{brute_force_sat, dpll_plain};
use ppsat_core::protocol::{
    debug_recombine, run_local, PartyReport, RunConfig, StrategyEntry, StrategySpec, VarRef,
};
use ppsat_core::shuffle::{run_consumer, run_provider, RowLayout, SharedMatrix, ShuffleOptions};
use ppsat_core::transport::{Channel, Direction, FrameTag, ReleasePurpose, Role, Transcript};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn line(id: &str, title: &str, v: &Verdict, gating: bool) {
    let status = match (gating, v.pass) {
        (false, _) => "REPORT",
        (true, true) => "PASS",
        (true, false) => "FAIL",
    };
    println!("criterion {id} [{status}] {title}: {}", v.detail);
}

fn workspace() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn out_dir() -> PathBuf {
    let dir = workspace().join("target/acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn test_cfg(seed: u64) -> RunConfig {
    RunConfig { prf: PrfId::TestCipher, seed: Some(seed), ..RunConfig::default() }
}

// ---------------------------------------------------------------- criterion 1

fn figure1() -> Verdict {
    let dir = workspace().join("scenarios/figure1");
    let load = |f: &str| Scenario::from_files(&[dir.join("topology.txt"), dir.join(f)]).unwrap();
    let started = Instant::now();
    let (mut unsat, mut sat, mut wrong) = (0, 0, Vec::new());
    let mut rows = Vec::new();
    for k in 1..=5 {
        let ag = load(&format!("agreement-{k}.txt"));
        let consumer = agreement_input(&ag.topology, &ag.agreements[0]).unwrap();
        for (file, want_sat) in [
            ("config-1.txt".to_string(), false),
            ("config-2.txt".to_string(), false),
            ("config-3.txt".to_string(), false),
            (format!("mutant-{k}.txt"), true),
        ] {
            let cfg = load(&file);
            let provider = config_input(&cfg.topology, &cfg.configs).unwrap();
            let strategy = provider_strategy(&cfg.topology);
            let (ra, rb) = run_local(&consumer, &provider, &strategy, &test_cfg(k), &test_cfg(k)).unwrap();
            assert_eq!(ra.satisfiable, rb.satisfiable);
            let name = format!("agreement-{k}/{}", file.trim_end_matches(".txt"));
            if ra.satisfiable != want_sat {
                wrong.push(name.clone());
            } else if want_sat {
                sat += 1;
            } else {
                unsat += 1;
            }
            rows.push(RunMetrics::from_report(&name, &ra));
        }
    }
    let elapsed = started.elapsed();
    bench::write_csv_file(&out_dir().join("figure1.csv"), |f| bench::write_runs_csv(f, &rows)).unwrap();
    let budget = Duration::from_secs(600);
    Verdict {
        pass: unsat == 15 && sat == 5 && wrong.is_empty() && elapsed <= budget,
        detail: format!(
            "{unsat}/15 correct configs UNSAT, {sat}/5 mutants SAT, {:.0} s of 600 s budget{}",
            elapsed.as_secs_f64(),
            if wrong.is_empty() { String::new() } else { format!(", wrong: {}", wrong.join(" ")) }
        ),
    }
}

// ---------------------------------------------------------- criteria 2, 4, 5a

struct Instance {
    formula: CnfFormula,
    a: PartyReport,
    b: PartyReport,
}

fn random_instances(count: usize) -> (Vec<Instance>, Duration) {
    let mut rng = ChaCha20Rng::seed_from_u64(2024);
    let started = Instant::now();
    let mut out = Vec::with_capacity(count);
    // Rejection sampling for an even SAT/UNSAT mix; uniform m is mostly SAT.
    let (mut sat_left, mut unsat_left) = (count / 2, count - count / 2);
    while out.len() < count {
        let k = out.len();
        let n = rng.gen_range(3..=20);
        let m = rng.gen_range(n.min(40)..=40);
        let formula = random_3cnf(&mut rng, n, m);
        let slot = if brute_force_sat(&formula).unwrap() { &mut sat_left } else { &mut unsat_left };
        if *slot == 0 {
            continue;
        }
        *slot -= 1;
        let (a, b) = split_half(&formula);
        // Payload capture on the first few instances for the leakage audit.
        let cfg = RunConfig { debug_shares: true, capture_payloads: k < 25, ..test_cfg(10_000 + k as u64) };
        let (ra, rb) = run_local(&a, &b, &StrategySpec::default(), &cfg, &cfg).unwrap();
        out.push(Instance { formula, a: ra, b: rb });
    }
    (out, started.elapsed())
}

fn correctness(instances: &[Instance], elapsed: Duration) -> Verdict {
    let mut agree = 0;
    let mut sat = 0;
    for inst in instances {
        let want = brute_force_sat(&inst.formula).unwrap();
        if inst.a.satisfiable == want && inst.b.satisfiable == want {
            agree += 1;
        }
        sat += want as usize;
    }
    Verdict {
        pass: agree == instances.len() && elapsed <= Duration::from_secs(1800),
        detail: format!(
            "{agree}/{} verdicts equal brute force ({sat} SAT, {} UNSAT), {:.0} s of 1800 s budget",
            instances.len(),
            instances.len() - sat,
            elapsed.as_secs_f64()
        ),
    }
}

fn pattern_equivalence(instances: &[Instance]) -> (Verdict, usize) {
    let mut same = 0;
    let mut iters_equal = 0;
    for inst in instances {
        let m = inst.formula.num_clauses();
        let (mat, prior, assign) =
            debug_recombine(inst.a.debug.as_ref().unwrap(), inst.b.debug.as_ref().unwrap(), m, inst.a.params.prior_bits as usize);
        let plain = dpll_plain(&mat, &prior, &assign);
        if trace_text(&plain.events).as_bytes() == trace_text(&inst.a.events).as_bytes() && inst.a.events == inst.b.events {
            same += 1;
        }
        if plain.iterations as u64 == inst.a.metrics.iterations {
            iters_equal += 1;
        }
    }
    (
        Verdict {
            pass: same == instances.len(),
            detail: format!("{same}/{} event streams byte-identical to the plaintext driver on the recombined inputs", instances.len()),
        },
        iters_equal,
    )
}

/// Rebuilds the public event stream from nothing but the released values and
/// the trail rule. Returns the purposes seen and the rebuilt stream.
fn replay_releases(t: &Transcript, n: usize) -> Result<(BTreeMap<&'static str, usize>, Vec<SearchEvent>), String> {
    let index_bits = ppsat_core::transport::bit_length(n as u64) as usize;
    let mut seen: BTreeMap<&'static str, usize> = BTreeMap::new();
    let mut events = Vec::new();
    let mut trail: Vec<(usize, bool)> = Vec::new();
    let value = |bits: &[bool]| bits.iter().enumerate().fold(0usize, |acc, (k, &b)| acc | ((b as usize) << k));
    for r in t.records() {
        if !matches!(r.tag, FrameTag::OutputDecode | FrameTag::OutputToGarbler | FrameTag::ReleasedValue) {
            continue;
        }
        let payload = r.payload.as_ref().ok_or("payload not captured")?;
        let purpose = ReleasePurpose::from_u8(payload[0]).ok_or("unknown release purpose")?;
        let name = match purpose {
            ReleasePurpose::CheckFlags => "b_c/b_s",
            ReleasePurpose::UnitIndex => "ind",
            ReleasePurpose::BranchIndex => "ind'",
            ReleasePurpose::ShuffleMasked => "masked-shuffle",
            ReleasePurpose::Generic => return Err("generic release in a session".into()),
        };
        match (r.tag, purpose) {
            (FrameTag::OutputToGarbler, ReleasePurpose::ShuffleMasked) if r.direction == Direction::Sent => {}
            (FrameTag::OutputDecode | FrameTag::ReleasedValue, p) if p != ReleasePurpose::ShuffleMasked => {}
            (tag, p) => return Err(format!("{p:?} released through {}", tag.name())),
        }
        // The evaluator's ReleasedValue frame is the plaintext both learn;
        // the garbler's decode frame before it carries no extra value.
        if r.tag == FrameTag::OutputDecode {
            continue;
        }
        *seen.entry(name).or_default() += 1;
        if r.tag != FrameTag::ReleasedValue {
            continue;
        }
        let body = &payload[1..];
        match purpose {
            ReleasePurpose::CheckFlags => {
                let bits = unpack_bits(body, 2).ok_or("flag width")?;
                let (b_c, b_s) = (bits[0], bits[1]);
                if b_c {
                    events.push(SearchEvent::Contradiction);
                    while trail.last().is_some_and(|f| !f.1) {
                        trail.pop();
                    }
                    if let Some((i, _)) = trail.pop() {
                        trail.push((i, false));
                        events.push(SearchEvent::Backtrack(trail.len()));
                    }
                } else if b_s {
                    events.push(SearchEvent::Success);
                }
            }
            ReleasePurpose::UnitIndex => {
                let ind = value(&unpack_bits(body, index_bits).ok_or("index width")?);
                if ind != 0 {
                    events.push(SearchEvent::UnitPropagate(ind));
                }
            }
            ReleasePurpose::BranchIndex => {
                let ind = value(&unpack_bits(body, index_bits).ok_or("index width")?);
                trail.push((ind, true));
                events.push(SearchEvent::Branch(ind));
            }
            _ => {}
        }
    }
    Ok((seen, events))
}

fn audit_releases(instances: &[Instance]) -> (bool, String) {
    let mut checked = 0;
    let mut totals: BTreeMap<&'static str, usize> = BTreeMap::new();
    for inst in instances.iter().filter(|i| i.a.transcript.records().iter().any(|r| r.payload.is_some())) {
        let n = inst.a.params.n();
        let (seen, rebuilt) = match replay_releases(&inst.a.transcript, n) {
            Ok(x) => x,
            Err(e) => return (false, e),
        };
        if rebuilt != inst.a.events {
            return (false, format!("released values do not rebuild the event stream of {}", inst.formula.to_dimacs()));
        }
        if seen.get("masked-shuffle").copied() != Some(n) {
            return (false, format!("expected {n} masked shuffle rows, saw {:?}", seen.get("masked-shuffle")));
        }
        // The provider's shuffle share is masked: it never equals the
        // permuted plaintext.
        let (da, db) = (inst.a.debug.as_ref().unwrap(), inst.b.debug.as_ref().unwrap());
        let plain = SharedMatrix::recombine(&da.payload, &db.payload).unwrap();
        if db.payload.bits() == plain {
            return (false, "provider shuffle share equals the plaintext".into());
        }
        for (k, v) in seen {
            *totals.entry(k).or_default() += v;
        }
        checked += 1;
    }
    let kinds: Vec<String> = totals.iter().map(|(k, v)| format!("{k}×{v}")).collect();
    (checked > 0, format!("{checked} sessions audited, releases {{{}}}", kinds.join(", ")))
}

/// Flipping a variable's polarity everywhere together with its initial
/// value is a symmetry of the search, so the event stream cannot change.
fn flipped(f: &CnfFormula, flip: &[bool]) -> CnfFormula {
    let clauses = f
        .clauses()
        .iter()
        .map(|c| c.iter().map(|&l| if flip[l.unsigned_abs() as usize - 1] { -l } else { l }).collect())
        .collect();
    CnfFormula::new(f.num_vars(), clauses).unwrap()
}

fn flip_strategy(flip: &[bool]) -> StrategySpec {
    let n = flip.len();
    StrategySpec {
        entries: (0..n)
            .map(|i| StrategyEntry { var: VarRef::Name(format!("x{}", i + 1)), priority: (n - i) as u64, assign: !flip[i] })
            .collect(),
    }
}

fn same_pattern_same_lengths() -> (bool, String) {
    let mut rng = ChaCha20Rng::seed_from_u64(55);
    let mut pairs = 0;
    for k in 0..10 {
        let n = rng.gen_range(4..=10);
        let m = rng.gen_range(4..=24);
        let f = random_3cnf(&mut rng, n, m);
        let flip: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
        if flip.iter().all(|&x| !x) {
            continue;
        }
        let g = flipped(&f, &flip);
        if g.clauses() == f.clauses() {
            continue;
        }
        let cfg = test_cfg(900 + k);
        let (fa, fb) = split_half(&f);
        let (ga, gb) = split_half(&g);
        let (x, _) = run_local(&fa, &fb, &StrategySpec::default(), &cfg, &cfg).unwrap();
        let (y, _) = run_local(&ga, &gb, &flip_strategy(&flip), &cfg, &cfg).unwrap();
        if x.events != y.events {
            return (false, format!("flipped formula changed the event stream ({})", f.to_dimacs()));
        }
        if x.transcript.shape() != y.transcript.shape() {
            return (false, format!("frame-length sequences differ for n={n} m={m}"));
        }
        pairs += 1;
    }
    (pairs >= 5, format!("{pairs} pairs of distinct same-shape formulas with equal event streams have identical frame-length sequences"))
}

// ---------------------------------------------------------------- criterion 3

fn shuffle_once(
    seed: u64,
    layout: &RowLayout,
    a_rows: Vec<Vec<bool>>,
    b_rows: Vec<Vec<bool>>,
    force: Option<Permutation>,
) -> (Vec<Vec<bool>>, Permutation) {
    let (mut ca, mut cb) = Channel::pair();
    let opts = ShuffleOptions { force_permutation: force };
    let (lb, ob) = (layout.clone(), opts.clone());
    let handle = std::thread::spawn(move || {
        let mut rng = SessionRng::deterministic(seed);
        let mut gc = GcSession::setup(&mut cb, Role::Provider, rng.fork("gc")).unwrap();
        let out = run_provider(&mut cb, &mut gc, &lb, &b_rows, PrfId::TestCipher, &ob, &mut rng, &mut PadLedger::new());
        out.unwrap()
    });
    let mut rng = SessionRng::deterministic(seed ^ 0x3c3c);
    let mut gc = GcSession::setup(&mut ca, Role::Consumer, rng.fork("gc")).unwrap();
    let a = run_consumer(&mut ca, &mut gc, layout, &a_rows, PrfId::TestCipher, &opts, &mut rng, &mut PadLedger::new()).unwrap();
    let b = handle.join().unwrap();
    (SharedMatrix::recombine(&a.share, &b.share).unwrap(), a.permutation.then(&b.permutation))
}

fn shuffle_correctness() -> Verdict {
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let random_rows = |rng: &mut ChaCha20Rng, n: usize, w: usize| -> Vec<Vec<bool>> {
        (0..n).map(|_| (0..w).map(|_| rng.gen()).collect()).collect()
    };
    let (mut ok, mut identity_ok) = (0u64, 0u64);
    let runs = 100;
    let identity_runs = 10;
    for k in 0..runs {
        let n = rng.gen_range(1..=32);
        let m = rng.gen_range(2..=64);
        let m_a = rng.gen_range(1..m);
        let layout = RowLayout::for_formula(m_a, m - m_a, rng.gen_range(1..=6), rng.gen_bool(0.8));
        let a = random_rows(&mut rng, n, layout.a_bits());
        let b = random_rows(&mut rng, n, layout.b_bits());
        let joined: Vec<Vec<bool>> = a.iter().zip(&b).map(|(x, y)| x.iter().chain(y).copied().collect()).collect();
        let (got, pi) = shuffle_once(k, &layout, a, b, None);
        ok += (got == pi.apply(&joined)) as u64;
        if k < identity_runs {
            let a = random_rows(&mut rng, n, layout.a_bits());
            let b = random_rows(&mut rng, n, layout.b_bits());
            let joined: Vec<Vec<bool>> = a.iter().zip(&b).map(|(x, y)| x.iter().chain(y).copied().collect()).collect();
            let (got, _) = shuffle_once(k + 5000, &layout, a, b, Some(Permutation::identity(n)));
            identity_ok += (got == joined) as u64;
        }
    }
    Verdict {
        pass: ok == runs && identity_ok == identity_runs,
        detail: format!(
            "recombination identity {ok}/{runs} (up to 32 rows × 64 cells), forced identity returns the input {identity_ok}/{identity_runs}"
        ),
    }
}

// ---------------------------------------------------------------- criterion 6

fn packing_ratio() -> (Verdict, f64) {
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let f = random_3cnf(&mut rng, 20, 64);
    let (a, b) = split_half(&f);
    let run = |packed: bool| {
        let cfg = RunConfig { packed, ..test_cfg(66) };
        run_local(&a, &b, &StrategySpec::default(), &cfg, &cfg).unwrap().0
    };
    let (p, u) = (run(true), run(false));
    let ratio = u.bytes.shuffle as f64 / p.bytes.shuffle as f64;
    (
        Verdict {
            pass: (32.0..=64.0).contains(&ratio) && p.satisfiable == u.satisfiable,
            detail: format!(
                "n=20 m=64: shuffle phase {} bytes unpacked / {} bytes packed = {ratio:.1} (target [32, 64])",
                u.bytes.shuffle, p.bytes.shuffle
            ),
        },
        ratio,
    )
}

// ---------------------------------------------------- criteria 7 and 8 sweep

fn sweep() -> Vec<RunMetrics> {
    let cfg = SweepConfig { count: 3, seed: 7, run: test_cfg(7), reference: true, ..SweepConfig::default() };
    let runs = bench::bench_sweep(&cfg, |_| {}).unwrap();
    bench::write_csv_file(&out_dir().join("sweep.csv"), |f| bench::write_runs_csv(f, &runs)).unwrap();
    let cells = bench::summarize(&runs);
    bench::write_csv_file(&out_dir().join("sweep_summary.csv"), |f| bench::write_summary_csv(f, &cells)).unwrap();
    runs
}

fn complexity(runs: &[RunMetrics], instances: &[Instance], c2_iters_equal: usize) -> Verdict {
    let points: Vec<(f64, f64)> = runs.iter().map(|r| ((r.n * r.m) as f64, r.bytes_per_iteration())).collect();
    let fit = linear_fit(&points).unwrap();
    let sweep_equal = runs.iter().filter(|r| r.plain_iterations == Some(r.gc_iterations)).count();
    Verdict {
        pass: fit.r2 >= 0.95 && sweep_equal == runs.len() && c2_iters_equal == instances.len(),
        detail: format!(
            "bytes/iteration = {:.1}·(n·m) + {:.0}, R² = {:.4} over {} sweep runs; gc iterations = plain iterations on {sweep_equal}/{} sweep runs and {c2_iters_equal}/{} recombined instances",
            fit.a,
            fit.b,
            fit.r2,
            runs.len(),
            runs.len(),
            instances.len()
        ),
    }
}

fn trends(runs: &[RunMetrics], ratio: f64) -> Verdict {
    let cells = bench::summarize(runs);
    let mut monotone_m = true;
    let mut by_n: BTreeMap<usize, Vec<(usize, f64)>> = BTreeMap::new();
    for c in &cells {
        by_n.entry(c.n).or_default().push((c.m, c.bytes_total.mean));
    }
    for v in by_n.values() {
        monotone_m &= v.windows(2).all(|w| w[1].1 > w[0].1);
    }
    let shuffle_share: f64 =
        runs.iter().map(|r| r.shuffle_delay_s).sum::<f64>() / runs.iter().map(|r| r.total_delay_s).sum::<f64>();
    let slowdown: f64 = runs
        .iter()
        .filter_map(|r| r.plain_dpll_delay_s.map(|p| r.total_delay_s / p.max(1e-9)))
        .fold(0.0, f64::max);
    let largest = cells.last().unwrap();

    // One full-cipher session for the absolute numbers.
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    let f = random_3cnf(&mut rng, 50, 100);
    let (a, b) = split_half(&f);
    let cfg = RunConfig { seed: Some(8), ..RunConfig::default() };
    let (full, _) = run_local(&a, &b, &StrategySpec::default(), &cfg, &cfg).unwrap();
    let row = RunMetrics::from_report("aes128-n50-m100", &full);
    bench::write_csv_file(&out_dir().join("aes128.csv"), |f| bench::write_runs_csv(f, &[row])).unwrap();

    Verdict {
        pass: true,
        detail: format!(
            "bytes monotone in m at fixed n: {monotone_m}; shuffle share of total delay {:.0}%; largest cell n={} m={} mean {:.2} s, {:.1} MB; \
             full AES n=50 m=100: shuffle {:.2} s, total {:.2} s, {:.1} MB, {} iterations; worst GC/plain slowdown {:.0}×; packing ratio {ratio:.1}; \
             CSVs in target/acceptance/",
            100.0 * shuffle_share,
            largest.n,
            largest.m,
            largest.total_delay_s.mean,
            largest.bytes_total.mean / 1e6,
            full.shuffle_time.as_secs_f64(),
            full.total_time.as_secs_f64(),
            full.transcript.total_bytes() as f64 / 1e6,
            full.metrics.iterations,
            slowdown
        ),
    }
}

fn main() {
    // `cargo test -- --list` must not run anything.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let started = Instant::now();
    let mut failed = Vec::new();
    let mut record = |id: &'static str, title: &str, v: Verdict, gating: bool| {
        line(id, title, &v, gating);
        if gating && !v.pass {
            failed.push(id);
        }
    };

    record("1", "Figure-1 agreements over two-party runs", figure1(), true);

    let (instances, c2_time) = random_instances(200);
    record("2", "two-party verdict equals brute force", correctness(&instances, c2_time), true);

    record("3", "shuffle recombination", shuffle_correctness(), true);

    let (v4, c2_iters_equal) = pattern_equivalence(&instances);
    record("4", "event stream equals the plaintext driver", v4, true);

    let (releases_ok, releases) = audit_releases(&instances);
    let (lengths_ok, lengths) = same_pattern_same_lengths();
    record(
        "5",
        "leakage boundary",
        Verdict { pass: releases_ok && lengths_ok, detail: format!("{releases}; {lengths}") },
        true,
    );

    let (v6, ratio) = packing_ratio();
    record("6", "block-packing shuffle bytes ratio", v6, true);

    let runs = sweep();
    record("7", "per-iteration bytes linear in n·m", complexity(&runs, &instances, c2_iters_equal), true);

    record("8", "absolute delays and trends (reported only)", trends(&runs, ratio), false);

    println!("acceptance finished in {:.0} s", started.elapsed().as_secs_f64());
    if !failed.is_empty() {
        println!("failed criteria: {}", failed.join(", "));
        std::process::exit(1);
    }
}

