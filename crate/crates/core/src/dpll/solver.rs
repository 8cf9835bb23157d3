use std::collections::HashMap;
use std::time::{Duration, Instant};

use crate::gc::{Bit, Circuit, CircuitBuilder, GcError, GcSession, OutputGroup, ReleaseTarget, SecretRef};
use crate::transport::{bit_length, Channel, ReleasePurpose};

use super::SearchEvent;

/// Shared inputs to the solver, all in permuted row order. Matrices are row
/// major; `prior` holds `prior_bits` little-endian bits per row.
#[derive(Clone, Debug)]
pub struct SharedFormula {
    pub n: usize,
    pub m: usize,
    pub prior_bits: usize,
    pub o: SecretRef,
    pub p: SecretRef,
    pub prior: SecretRef,
    pub assign: SecretRef,
}

impl SharedFormula {
    fn check(&self) -> Result<(), GcError> {
        let want = [self.n * self.m, self.n * self.m, self.n * self.prior_bits, self.n];
        let got = [self.o.len(), self.p.len(), self.prior.len(), self.assign.len()];
        for (w, g) in want.into_iter().zip(got) {
            if w != g {
                return Err(GcError::Arity { expected: w, found: g });
            }
        }
        if self.n == 0 {
            return Err(GcError::Malformed("no variables".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Subroutine {
    Resolve,
    Check,
    UnitSearch,
    Branch,
}

impl Subroutine {
    pub const ALL: [Subroutine; 4] = [Subroutine::Resolve, Subroutine::Check, Subroutine::UnitSearch, Subroutine::Branch];

    pub fn name(self) -> &'static str {
        match self {
            Subroutine::Resolve => "resolve",
            Subroutine::Check => "check",
            Subroutine::UnitSearch => "unit_search",
            Subroutine::Branch => "branch",
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StepMetrics {
    /// Passes through the driver loop.
    pub iterations: u64,
    pub executions: [u64; 4],
    /// Wire bytes in both directions.
    pub bytes: [u64; 4],
    pub and_gates: [u64; 4],
}

impl StepMetrics {
    pub fn executions_of(&self, s: Subroutine) -> u64 {
        self.executions[s.slot()]
    }

    pub fn bytes_of(&self, s: Subroutine) -> u64 {
        self.bytes[s.slot()]
    }

    pub fn total_bytes(&self) -> u64 {
        self.bytes.iter().sum()
    }

    pub fn total_executions(&self) -> u64 {
        self.executions.iter().sum()
    }
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub satisfiable: bool,
    pub events: Vec<SearchEvent>,
    /// Time since the solver started, one entry per event.
    pub event_times: Vec<Duration>,
    pub metrics: StepMetrics,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Tag {
    First,
    Second,
}

struct TrailFrame {
    o: SecretRef,
    assign: SecretRef,
    c: SecretRef,
    d: Vec<bool>,
    i: usize,
    tag: Tag,
}

/// The resolution circuit. Carried inputs: the O and P rows of the resolved
/// variable, its assignment bit, the O bits of every other row, then `c`.
pub fn resolve_circuit(n: usize, m: usize) -> Circuit {
    let mut b = CircuitBuilder::new();
    let o_row = b.carried_inputs(m);
    let p_row = b.carried_inputs(m);
    let a = b.carried_input();
    let others = b.carried_inputs((n - 1) * m);
    let c = b.carried_inputs(m);
    let sat: Vec<Bit> = (0..m)
        .map(|j| {
            let differ = b.xor(a, p_row[j]);
            let agree = b.not(differ);
            b.and(o_row[j], agree)
        })
        .collect();
    let mut out = Vec::with_capacity(n * m);
    for (k, &o) in others.iter().enumerate() {
        let keep = b.not(sat[k % m]);
        out.push(b.and(o, keep));
    }
    for j in 0..m {
        out.push(b.or(c[j], sat[j]));
    }
    b.finish(&out)
}

/// Outputs `[b_c, b_s]`.
pub fn check_circuit(n: usize, m: usize) -> Circuit {
    let mut b = CircuitBuilder::new();
    let o = b.carried_inputs(n * m);
    let c = b.carried_inputs(m);
    let mut empty = Vec::with_capacity(m);
    let mut conflict = Vec::with_capacity(m);
    for j in 0..m {
        let col: Vec<Bit> = (0..n).map(|i| o[i * m + j]).collect();
        let any = b.or_all(&col);
        let z = b.not(any);
        let open = b.not(c[j]);
        conflict.push(b.and(z, open));
        empty.push(z);
    }
    let b_c = b.or_all(&conflict);
    let b_s = b.and_all(&empty);
    b.finish(&[b_c, b_s])
}

/// Highest strictly greater priority among `rows` whose `flag` holds; the
/// result is the 1-based row index in `index_bits` bits, 0 if none.
fn argmax(b: &mut CircuitBuilder, prior: &[Vec<Bit>], flags: &[(usize, Option<Bit>)], index_bits: usize) -> Vec<Bit> {
    let width = prior.first().map_or(0, |p| p.len());
    let mut pri = b.constant_word(0, width);
    let mut ind = b.constant_word(0, index_bits);
    for &(i, flag) in flags {
        let greater = b.gt(&prior[i], &pri);
        let sel = match flag {
            Some(f) => b.and(f, greater),
            None => greater,
        };
        pri = b.mux_vec(sel, &prior[i], &pri);
        let idx = b.constant_word(i as u64 + 1, index_bits);
        ind = b.mux_vec(sel, &idx, &ind);
    }
    ind
}

/// Outputs the updated assignment (`n` bits) then the unit index.
pub fn unit_search_circuit(n: usize, m: usize, prior_bits: usize) -> Circuit {
    let index_bits = bit_length(n as u64) as usize;
    let mut b = CircuitBuilder::new();
    let o = b.carried_inputs(n * m);
    let p = b.carried_inputs(n * m);
    let mut assign = b.carried_inputs(n);
    let prior: Vec<Vec<Bit>> = (0..n).map(|_| b.carried_inputs(prior_bits)).collect();
    let mut unit = vec![b.constant(false); n];
    for j in 0..m {
        let mut any = b.constant(false);
        let mut two = b.constant(false);
        for i in 0..n {
            let x = o[i * m + j];
            let both = b.and(any, x);
            two = b.or(two, both);
            let t = b.xor(any, x);
            any = b.xor(t, both);
        }
        let many = b.not(two);
        let exactly_one = b.and(any, many);
        for i in 0..n {
            let cond = b.and(exactly_one, o[i * m + j]);
            unit[i] = b.or(unit[i], cond);
            assign[i] = b.mux(cond, p[i * m + j], assign[i]);
        }
    }
    let flags: Vec<(usize, Option<Bit>)> = (0..n).map(|i| (i, Some(unit[i]))).collect();
    let ind = argmax(&mut b, &prior, &flags, index_bits);
    let mut out = assign;
    out.extend(ind);
    b.finish(&out)
}

/// Argmax over the undecided rows of `decided`.
pub fn branch_circuit(decided: &[bool], prior_bits: usize) -> Circuit {
    let n = decided.len();
    let index_bits = bit_length(n as u64) as usize;
    let mut b = CircuitBuilder::new();
    let prior: Vec<Vec<Bit>> = (0..n).map(|_| b.carried_inputs(prior_bits)).collect();
    let flags: Vec<(usize, Option<Bit>)> = (0..n).filter(|&i| !decided[i]).map(|i| (i, None)).collect();
    let ind = argmax(&mut b, &prior, &flags, index_bits);
    b.finish(&ind)
}

fn index_of(bits: &[bool], n: usize) -> Result<usize, GcError> {
    let v = bits.iter().enumerate().fold(0usize, |acc, (k, &b)| acc | ((b as usize) << k));
    if v > n {
        return Err(GcError::Malformed(format!("released index {v} exceeds {n}")));
    }
    Ok(v)
}

/// Runs the search on shared inputs. Both parties call this in lock-step
/// and obtain the same verdict and event stream.
pub struct Solver<'a> {
    channel: &'a mut Channel,
    gc: &'a mut GcSession,
    n: usize,
    m: usize,
    prior_bits: usize,
    resolve: Option<Circuit>,
    check: Option<Circuit>,
    unit: Option<Circuit>,
    branch: HashMap<Vec<bool>, Circuit>,
    metrics: StepMetrics,
}

impl<'a> Solver<'a> {
    pub fn new(channel: &'a mut Channel, gc: &'a mut GcSession, n: usize, m: usize, prior_bits: usize) -> Self {
        Solver {
            channel,
            gc,
            n,
            m,
            prior_bits,
            resolve: None,
            check: None,
            unit: None,
            branch: HashMap::new(),
            metrics: StepMetrics::default(),
        }
    }

    fn run(
        &mut self,
        which: Subroutine,
        circuit: &Circuit,
        carried: &[&SecretRef],
        groups: &[OutputGroup],
    ) -> Result<Vec<crate::gc::GroupResult>, GcError> {
        let before = self.channel.transcript().total_bytes();
        let out = self.gc.execute(self.channel, circuit, &[], carried, groups)?;
        let slot = which.slot();
        self.metrics.executions[slot] += 1;
        self.metrics.bytes[slot] += self.channel.transcript().total_bytes() - before;
        self.metrics.and_gates[slot] += circuit.and_count() as u64;
        Ok(out)
    }

    fn obliv_res(&mut self, i0: usize, o: &SecretRef, p: &SecretRef, assign: &SecretRef, c: &SecretRef) -> Result<(SecretRef, SecretRef), GcError> {
        let (n, m) = (self.n, self.m);
        let circuit = self.resolve.take().unwrap_or_else(|| resolve_circuit(n, m));
        let row = i0 * m..(i0 + 1) * m;
        let before = o.slice(0..i0 * m);
        let after = o.slice((i0 + 1) * m..n * m);
        let others = SecretRef::concat(&[&before, &after]);
        let carried = [&o.slice(row.clone()), &p.slice(row), &assign.slice(i0..i0 + 1), &others, c];
        let out = self.run(Subroutine::Resolve, &circuit, &carried, &[OutputGroup::keep((n - 1) * m), OutputGroup::keep(m)]);
        self.resolve = Some(circuit);
        let mut out = out?.into_iter().map(|g| g.into_secret().unwrap());
        let others = out.next().unwrap();
        let c = out.next().unwrap();
        let zero = self.gc.constant(&vec![false; m]);
        let o = SecretRef::concat(&[&others.slice(0..i0 * m), &zero, &others.slice(i0 * m..(n - 1) * m)]);
        Ok((o, c))
    }

    fn obliv_cc(&mut self, o: &SecretRef, c: &SecretRef) -> Result<(bool, bool), GcError> {
        let circuit = self.check.take().unwrap_or_else(|| check_circuit(self.n, self.m));
        let groups = [OutputGroup::new(2, ReleaseTarget::ToBoth, ReleasePurpose::CheckFlags)];
        let out = self.run(Subroutine::Check, &circuit, &[o, c], &groups);
        self.check = Some(circuit);
        let out = out?;
        let bits = out[0].bits().ok_or_else(|| GcError::Malformed("check flags".into()))?;
        Ok((bits[1], bits[0]))
    }

    fn obliv_uls(&mut self, o: &SecretRef, p: &SecretRef, assign: &SecretRef, prior: &SecretRef) -> Result<(usize, SecretRef), GcError> {
        let index_bits = bit_length(self.n as u64) as usize;
        let circuit = self.unit.take().unwrap_or_else(|| unit_search_circuit(self.n, self.m, self.prior_bits));
        let groups = [
            OutputGroup::keep(self.n),
            OutputGroup::new(index_bits, ReleaseTarget::ToBoth, ReleasePurpose::UnitIndex),
        ];
        let out = self.run(Subroutine::UnitSearch, &circuit, &[o, p, assign, prior], &groups);
        self.unit = Some(circuit);
        let mut out = out?.into_iter();
        let assign = out.next().unwrap().into_secret().unwrap();
        let ind = index_of(out.next().unwrap().bits().unwrap(), self.n)?;
        Ok((ind, assign))
    }

    fn obliv_branch(&mut self, d: &[bool], prior: &SecretRef) -> Result<usize, GcError> {
        let index_bits = bit_length(self.n as u64) as usize;
        let circuit = match self.branch.remove(d) {
            Some(c) => c,
            None => branch_circuit(d, self.prior_bits),
        };
        let groups = [OutputGroup::new(index_bits, ReleaseTarget::ToBoth, ReleasePurpose::BranchIndex)];
        let out = self.run(Subroutine::Branch, &circuit, &[prior], &groups);
        self.branch.insert(d.to_vec(), circuit);
        let ind = index_of(out?[0].bits().unwrap(), self.n)?;
        if ind == 0 || d[ind - 1] {
            return Err(GcError::Malformed(format!("branch index {ind} is not undecided")));
        }
        Ok(ind)
    }

    pub fn solve(mut self, input: &SharedFormula) -> Result<SolveOutcome, GcError> {
        input.check()?;
        if (input.n, input.m, input.prior_bits) != (self.n, self.m, self.prior_bits) {
            return Err(GcError::Malformed("solver shape".into()));
        }
        let started = Instant::now();
        let n = self.n;
        let p = input.p.clone();
        let prior = input.prior.clone();
        let mut o = input.o.clone();
        let mut assign = input.assign.clone();
        let mut c = self.gc.constant(&vec![false; self.m]);
        let mut d = vec![false; n];
        let mut trail: Vec<TrailFrame> = Vec::new();
        let mut events = Vec::new();
        let mut times = Vec::new();
        let mut push = |events: &mut Vec<SearchEvent>, e: SearchEvent| {
            events.push(e);
            times.push(started.elapsed());
        };
        let mut i = 0usize;

        let satisfiable = 'search: loop {
            self.metrics.iterations += 1;
            if i != 0 {
                (o, c) = self.obliv_res(i - 1, &o, &p, &assign, &c)?;
                let (b_s, b_c) = self.obliv_cc(&o, &c)?;
                if b_c {
                    push(&mut events, SearchEvent::Contradiction);
                    let frame = loop {
                        match trail.pop() {
                            None => break 'search false,
                            Some(f) if f.tag == Tag::First => break f,
                            Some(_) => {}
                        }
                    };
                    o = frame.o;
                    c = frame.c;
                    d = frame.d;
                    i = frame.i;
                    let flipped = self.gc.negate(&assign_bit(&frame.assign, i - 1))?;
                    assign = replace_bit(&frame.assign, i - 1, &flipped);
                    trail.push(TrailFrame { o: o.clone(), assign: assign.clone(), c: c.clone(), d: d.clone(), i, tag: Tag::Second });
                    push(&mut events, SearchEvent::Backtrack(trail.len()));
                    continue;
                }
                if b_s {
                    push(&mut events, SearchEvent::Success);
                    break true;
                }
            }
            let (ind, updated) = self.obliv_uls(&o, &p, &assign, &prior)?;
            assign = updated;
            if ind != 0 {
                push(&mut events, SearchEvent::UnitPropagate(ind));
                i = ind;
                d[i - 1] = true;
            } else {
                i = self.obliv_branch(&d, &prior)?;
                push(&mut events, SearchEvent::Branch(i));
                d[i - 1] = true;
                trail.push(TrailFrame { o: o.clone(), assign: assign.clone(), c: c.clone(), d: d.clone(), i, tag: Tag::First });
            }
        };
        Ok(SolveOutcome { satisfiable, events, event_times: times, metrics: self.metrics })
    }
}

fn assign_bit(assign: &SecretRef, i: usize) -> SecretRef {
    assign.slice(i..i + 1)
}

fn replace_bit(v: &SecretRef, i: usize, bit: &SecretRef) -> SecretRef {
    SecretRef::concat(&[&v.slice(0..i), bit, &v.slice(i + 1..v.len())])
}
