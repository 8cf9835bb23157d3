use crate::cnf::CnfMatrix;
use crate::dpll::SearchEvent;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlainOutcome {
    pub satisfiable: bool,
    pub events: Vec<SearchEvent>,
    /// Passes through the driver loop.
    pub iterations: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Tag {
    First,
    Second,
}

#[derive(Clone)]
struct Frame {
    o: Vec<bool>,
    assign: Vec<bool>,
    c: Vec<bool>,
    d: Vec<bool>,
    i: usize,
    tag: Tag,
}

/// The two-party driver run on plaintext data. `prior` entries must be at
/// least 1; row `i` of `f` is variable `i + 1`.
pub fn dpll_plain(f: &CnfMatrix, prior: &[u64], assign: &[bool]) -> PlainOutcome {
    let (n, m) = (f.n(), f.m());
    assert_eq!(prior.len(), n);
    assert_eq!(assign.len(), n);
    let mut o = vec![false; n * m];
    let mut p = vec![false; n * m];
    for i in 0..n {
        for j in 0..m {
            (o[i * m + j], p[i * m + j]) = f.get(i, j);
        }
    }
    let mut assign = assign.to_vec();
    let mut c = vec![false; m];
    let mut d = vec![false; n];
    let mut trail: Vec<Frame> = Vec::new();
    let mut events = Vec::new();
    let mut iterations = 0;
    let mut i = 0usize;

    loop {
        iterations += 1;
        if i != 0 {
            resolve(&mut o, &p, &assign, &mut c, n, m, i - 1);
            let (b_s, b_c) = check(&o, &c, n, m);
            if b_c {
                events.push(SearchEvent::Contradiction);
                let frame = loop {
                    match trail.pop() {
                        None => return PlainOutcome { satisfiable: false, events, iterations },
                        Some(fr) if fr.tag == Tag::First => break fr,
                        Some(_) => {}
                    }
                };
                o = frame.o;
                assign = frame.assign;
                c = frame.c;
                d = frame.d;
                i = frame.i;
                assign[i - 1] = !assign[i - 1];
                trail.push(Frame {
                    o: o.clone(),
                    assign: assign.clone(),
                    c: c.clone(),
                    d: d.clone(),
                    i,
                    tag: Tag::Second,
                });
                events.push(SearchEvent::Backtrack(trail.len()));
                continue;
            }
            if b_s {
                events.push(SearchEvent::Success);
                return PlainOutcome { satisfiable: true, events, iterations };
            }
        }
        let ind = unit_search(&o, &p, &mut assign, prior, n, m);
        if ind != 0 {
            events.push(SearchEvent::UnitPropagate(ind));
            i = ind;
            d[i - 1] = true;
        } else {
            i = branch(prior, &d);
            assert!(i != 0, "no undecided variable left to branch on");
            events.push(SearchEvent::Branch(i));
            d[i - 1] = true;
            trail.push(Frame { o: o.clone(), assign: assign.clone(), c: c.clone(), d: d.clone(), i, tag: Tag::First });
        }
    }
}

fn resolve(o: &mut [bool], p: &[bool], assign: &[bool], c: &mut [bool], n: usize, m: usize, i0: usize) {
    let b = assign[i0];
    for j in 0..m {
        let occ = o[i0 * m + j];
        let satisfied = occ && b == p[i0 * m + j];
        if satisfied {
            for i in 0..n {
                o[i * m + j] = false;
            }
            c[j] = true;
        } else if occ {
            o[i0 * m + j] = false;
        }
    }
}

fn check(o: &[bool], c: &[bool], n: usize, m: usize) -> (bool, bool) {
    let mut total = 0usize;
    let mut conflict = false;
    for j in 0..m {
        let z = (0..n).filter(|&i| o[i * m + j]).count();
        conflict |= z == 0 && !c[j];
        total += z;
    }
    (total == 0, conflict)
}

fn unit_search(o: &[bool], p: &[bool], assign: &mut [bool], prior: &[u64], n: usize, m: usize) -> usize {
    let mut unit = vec![false; n];
    for j in 0..m {
        let count = (0..n).filter(|&i| o[i * m + j]).count();
        for i in 0..n {
            if count == 1 && o[i * m + j] {
                unit[i] = true;
                assign[i] = p[i * m + j];
            }
        }
    }
    let (mut ind, mut pri) = (0, 0);
    for i in 0..n {
        if unit[i] && prior[i] > pri {
            ind = i + 1;
            pri = prior[i];
        }
    }
    ind
}

fn branch(prior: &[u64], d: &[bool]) -> usize {
    let (mut ind, mut pri) = (0, 0);
    for (i, (&pr, &dec)) in prior.iter().zip(d).enumerate() {
        if !dec && pr > pri {
            ind = i + 1;
            pri = pr;
        }
    }
    ind
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::CnfFormula;

    fn run(n: usize, clauses: Vec<Vec<i32>>) -> PlainOutcome {
        let f = CnfFormula::new(n, clauses).unwrap();
        let mat = CnfMatrix::from_formula(&f).unwrap();
        let prior: Vec<u64> = (1..=n as u64).rev().collect();
        dpll_plain(&mat, &prior, &vec![true; n])
    }

    #[test]
    fn contradiction_trace() {
        let out = run(1, vec![vec![1], vec![-1]]);
        assert!(!out.satisfiable);
        assert_eq!(out.events, vec![SearchEvent::UnitPropagate(1), SearchEvent::Contradiction]);
        assert_eq!(out.iterations, 2);
    }

    #[test]
    fn small_satisfiable() {
        let out = run(2, vec![vec![1, 2], vec![-1, 2]]);
        assert!(out.satisfiable);
        assert_eq!(out.events.last(), Some(&SearchEvent::Success));
    }

    #[test]
    fn backtracking_flips_the_branch() {
        // x1 first true makes (-1 v 2) and (-1 v -2) clash; the flip succeeds.
        let out = run(2, vec![vec![-1, 2], vec![-1, -2]]);
        assert!(out.satisfiable);
        assert_eq!(
            out.events,
            vec![
                SearchEvent::Branch(1),
                SearchEvent::UnitPropagate(2),
                SearchEvent::Contradiction,
                SearchEvent::Backtrack(1),
                SearchEvent::Success,
            ]
        );
    }

    #[test]
    fn priorities_pick_the_unit() {
        let f = CnfFormula::new(3, vec![vec![-2], vec![3], vec![1, 2, 3]]).unwrap();
        let mat = CnfMatrix::from_formula(&f).unwrap();
        let out = dpll_plain(&mat, &[1, 5, 9], &[true; 3]);
        assert_eq!(out.events[0], SearchEvent::UnitPropagate(3));
        let out = dpll_plain(&mat, &[1, 9, 5], &[true; 3]);
        assert_eq!(out.events[0], SearchEvent::UnitPropagate(2));
    }
}
