use ppsat_core::cnf::CnfFormula;
use ppsat_core::crypto::{Permutation, PrfId};
use ppsat_core::dpll::{SearchEvent, Subroutine};
use ppsat_core::oracle::{brute_force_sat, dpll_plain};
use ppsat_core::protocol::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn config(seed: u64) -> RunConfig {
    RunConfig { prf: PrfId::TestCipher, seed: Some(seed), debug_shares: true, ..RunConfig::default() }
}

fn split(f: &CnfFormula) -> (PartyInput, PartyInput) {
    let half = f.num_clauses().div_ceil(2);
    let (a, b) = f.split_at(half);
    (PartyInput::all_common(a.with_num_vars(f.num_vars()).unwrap()), PartyInput::all_common(b.with_num_vars(f.num_vars()).unwrap()))
}

fn random_3cnf(rng: &mut impl Rng, n: usize, m: usize) -> CnfFormula {
    let clauses = (0..m)
        .map(|_| {
            let mut vars: Vec<i32> = Vec::new();
            while vars.len() < 3.min(n) {
                let v = rng.gen_range(1..=n as i32);
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
            vars.into_iter().map(|v| if rng.gen() { v } else { -v }).collect()
        })
        .collect();
    CnfFormula::new(n, clauses).unwrap()
}

fn check_instance(f: &CnfFormula, seed: u64) -> (PartyReport, PartyReport) {
    let (a, b) = split(f);
    let (ra, rb) = run_local(&a, &b, &StrategySpec::default(), &config(seed), &config(seed)).unwrap();
    assert_eq!(ra.satisfiable, brute_force_sat(f).unwrap(), "verdict on {}", f.to_dimacs());
    assert_eq!(ra.satisfiable, rb.satisfiable);
    assert_eq!(ra.events, rb.events);
    let (mat, prior, assign) =
        debug_recombine(ra.debug.as_ref().unwrap(), rb.debug.as_ref().unwrap(), f.num_clauses(), ra.params.prior_bits as usize);
    let plain = dpll_plain(&mat, &prior, &assign);
    assert_eq!(plain.events, ra.events);
    assert_eq!(plain.iterations as u64, ra.metrics.iterations);
    (ra, rb)
}

#[test]
fn contradiction_is_unsatisfiable() {
    let f = CnfFormula::new(1, vec![vec![1], vec![-1]]).unwrap();
    let (ra, _) = check_instance(&f, 1);
    assert!(!ra.satisfiable);
}

#[test]
fn two_clause_example_is_satisfiable() {
    let f = CnfFormula::new(2, vec![vec![1, 2], vec![-1, 2]]).unwrap();
    let (ra, _) = check_instance(&f, 2);
    assert!(ra.satisfiable);
}

#[test]
fn random_instances_match_the_oracles() {
    let mut rng = ChaCha20Rng::seed_from_u64(77);
    for k in 0..12 {
        let n = rng.gen_range(1..=10);
        let m = rng.gen_range(1..=20);
        let f = random_3cnf(&mut rng, n, m);
        let (ra, _) = check_instance(&f, 100 + k);
        assert!(ra.metrics.total_executions() <= 4 * ra.metrics.iterations);
    }
}

#[test]
fn shuffled_strategy_stays_row_consistent() {
    // Row i of the recombined matrix carries the priority given to the same
    // variable, whatever the permutation.
    let f = CnfFormula::new(4, vec![vec![1], vec![2, -3], vec![4], vec![-1, 3, 4]]).unwrap();
    let (a, b) = split(&f);
    let spec: StrategySpec = "x1 11 1\nx2 12 0\nx3 13 1\nx4 14 0\n".parse().unwrap();
    let (ra, rb) = run_local(&a, &b, &spec, &config(5), &config(5)).unwrap();
    let (mat, prior, assign) = debug_recombine(ra.debug.as_ref().unwrap(), rb.debug.as_ref().unwrap(), 4, ra.params.prior_bits as usize);
    let pi = ra.debug.as_ref().unwrap().permutation.then(&rb.debug.as_ref().unwrap().permutation);
    let original = ppsat_core::cnf::CnfMatrix::from_formula(&f).unwrap();
    for v in 0..4 {
        let row = pi.map(v);
        assert_eq!(prior[row], 11 + v as u64);
        assert_eq!(assign[row], v % 2 == 0);
        assert_eq!(mat.row(row), original.row(v));
    }
    let mut sorted = prior.clone();
    sorted.sort();
    assert_eq!(sorted, vec![11, 12, 13, 14]);
}

#[test]
fn identity_permutation_keeps_the_plain_trace() {
    let f = CnfFormula::new(2, vec![vec![-1, 2], vec![-1, -2]]).unwrap();
    let (a, b) = split(&f);
    let mut cfg = config(3);
    cfg.force_permutation = Some(Permutation::identity(2));
    let (ra, _) = run_local(&a, &b, &StrategySpec::default(), &cfg, &cfg).unwrap();
    assert_eq!(
        ra.events,
        vec![
            SearchEvent::Branch(1),
            SearchEvent::UnitPropagate(2),
            SearchEvent::Contradiction,
            SearchEvent::Backtrack(1),
            SearchEvent::Success,
        ]
    );
    assert_eq!(ra.metrics.executions_of(Subroutine::Branch), 1);
}

#[test]
fn auxiliary_variables_are_private_rows() {
    // A: x1 -> a, a -> x2 with a private; B: x1, -x2 and its own b.
    let a = PartyInput {
        formula: CnfFormula::new(3, vec![vec![-1, 3], vec![-3, 2]]).unwrap(),
        common: vec!["x1".into(), "x2".into()],
        n_aux: 1,
    };
    let b = PartyInput {
        formula: CnfFormula::new(3, vec![vec![1], vec![-2], vec![3, -1]]).unwrap(),
        common: vec!["x1".into(), "x2".into()],
        n_aux: 1,
    };
    let (ra, rb) = run_local(&a, &b, &StrategySpec::default(), &config(9), &config(9)).unwrap();
    assert!(!ra.satisfiable);
    assert_eq!(ra.params.n(), 4);
    assert_eq!(rb.events, ra.events);
}

#[test]
fn mismatched_common_names_abort() {
    let a = PartyInput { formula: CnfFormula::new(1, vec![vec![1]]).unwrap(), common: vec!["p".into()], n_aux: 0 };
    let b = PartyInput { formula: CnfFormula::new(1, vec![vec![1]]).unwrap(), common: vec!["q".into()], n_aux: 0 };
    assert!(run_local(&a, &b, &StrategySpec::default(), &config(1), &config(1)).is_err());
}

#[test]
fn largest_desk_instance() {
    let mut rng = ChaCha20Rng::seed_from_u64(4040);
    let f = random_3cnf(&mut rng, 20, 40);
    let t = std::time::Instant::now();
    let (ra, _) = check_instance(&f, 40);
    eprintln!("n=20 m=40 sat={} iters={} bytes={:?} shuffle={:?} total={:?} wall={:?}", ra.satisfiable, ra.metrics.iterations, ra.bytes, ra.shuffle_time, ra.total_time, t.elapsed());
}
