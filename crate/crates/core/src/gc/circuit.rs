use std::collections::VecDeque;

use super::GcError;

pub type Wire = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InputKind {
    /// Supplied by the garbler (party B).
    Garbler,
    /// Supplied by the evaluator (party A) through oblivious transfer.
    Evaluator,
    /// A value carried over from an earlier execution.
    Carried,
    /// A public constant.
    Constant(bool),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Input {
    pub wire: Wire,
    pub kind: InputKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateKind {
    Xor,
    And,
    /// Unary; `b` is ignored.
    Not,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    pub a: Wire,
    pub b: Wire,
    pub out: Wire,
}

/// Gate descriptions accepted by [`Circuit::build`]. Macros expand into XOR,
/// AND and NOT gates; multi-bit operands are least-significant bit first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GateSpec {
    Xor(Wire, Wire, Wire),
    And(Wire, Wire, Wire),
    Not(Wire, Wire),
    /// `out = c ? a : b`
    Mux { c: Wire, a: Wire, b: Wire, out: Wire },
    Eq { a: Vec<Wire>, b: Vec<Wire>, out: Wire },
    /// Sum without the final carry, `out.len() == a.len()`.
    Add { a: Vec<Wire>, b: Vec<Wire>, out: Vec<Wire> },
    /// Unsigned `a > b`.
    Gt { a: Vec<Wire>, b: Vec<Wire>, out: Wire },
}

/// A validated boolean circuit with gates in topological order.
#[derive(Clone, Debug)]
pub struct Circuit {
    num_wires: usize,
    inputs: Vec<Input>,
    gates: Vec<Gate>,
    outputs: Vec<Wire>,
}

impl Circuit {
    /// Checks ranges, single drivers, drivenness and acyclicity, and sorts the
    /// gates topologically.
    pub fn from_parts(
        num_wires: usize,
        inputs: Vec<Input>,
        gates: Vec<Gate>,
        outputs: Vec<Wire>,
    ) -> Result<Circuit, GcError> {
        const NONE: usize = usize::MAX;
        const INPUT: usize = usize::MAX - 1;
        let mut driver = vec![NONE; num_wires];
        let check = |w: Wire| {
            if (w as usize) < num_wires {
                Ok(w as usize)
            } else {
                Err(GcError::WireOutOfRange(w))
            }
        };
        for inp in &inputs {
            let w = check(inp.wire)?;
            if driver[w] != NONE {
                return Err(GcError::MultiplyDriven(inp.wire));
            }
            driver[w] = INPUT;
        }
        for (g, gate) in gates.iter().enumerate() {
            let w = check(gate.out)?;
            check(gate.a)?;
            if gate.kind != GateKind::Not {
                check(gate.b)?;
            }
            if driver[w] != NONE {
                return Err(GcError::MultiplyDriven(gate.out));
            }
            driver[w] = g;
        }
        let operands = |gate: &Gate| -> Vec<Wire> {
            if gate.kind == GateKind::Not {
                vec![gate.a]
            } else {
                vec![gate.a, gate.b]
            }
        };
        for gate in &gates {
            for w in operands(gate) {
                if driver[w as usize] == NONE {
                    return Err(GcError::Undriven(w));
                }
            }
        }
        for &w in &outputs {
            if driver[check(w)?] == NONE {
                return Err(GcError::Undriven(w));
            }
        }

        // Kahn's algorithm over gate dependencies.
        let mut pending = vec![0usize; gates.len()];
        let mut users: Vec<Vec<usize>> = vec![Vec::new(); gates.len()];
        for (g, gate) in gates.iter().enumerate() {
            for w in operands(gate) {
                let d = driver[w as usize];
                if d != INPUT {
                    pending[g] += 1;
                    users[d].push(g);
                }
            }
        }
        let mut ready: VecDeque<usize> = (0..gates.len()).filter(|&g| pending[g] == 0).collect();
        let mut order = Vec::with_capacity(gates.len());
        while let Some(g) = ready.pop_front() {
            order.push(gates[g]);
            for &u in &users[g] {
                pending[u] -= 1;
                if pending[u] == 0 {
                    ready.push_back(u);
                }
            }
        }
        if order.len() != gates.len() {
            return Err(GcError::CycleDetected);
        }
        Ok(Circuit { num_wires, inputs, gates: order, outputs })
    }

    /// Expands macro gates and validates.
    pub fn build(inputs: Vec<Input>, specs: Vec<GateSpec>, outputs: Vec<Wire>) -> Result<Circuit, GcError> {
        let mut max = inputs.iter().map(|i| i.wire).chain(outputs.iter().copied()).max().unwrap_or(0);
        for spec in &specs {
            let ws: Vec<Wire> = match spec {
                GateSpec::Xor(a, b, o) | GateSpec::And(a, b, o) => vec![*a, *b, *o],
                GateSpec::Not(a, o) => vec![*a, *o],
                GateSpec::Mux { c, a, b, out } => vec![*c, *a, *b, *out],
                GateSpec::Eq { a, b, out } | GateSpec::Gt { a, b, out } => {
                    a.iter().chain(b).copied().chain([*out]).collect()
                }
                GateSpec::Add { a, b, out } => a.iter().chain(b).chain(out).copied().collect(),
            };
            max = max.max(ws.into_iter().max().unwrap_or(0));
        }
        let mut next = max + 1;
        let mut fresh = || {
            let w = next;
            next += 1;
            w
        };
        let mut gates = Vec::new();
        let mut push = |kind, a, b, out| gates.push(Gate { kind, a, b, out });
        for spec in specs {
            match spec {
                GateSpec::Xor(a, b, o) => push(GateKind::Xor, a, b, o),
                GateSpec::And(a, b, o) => push(GateKind::And, a, b, o),
                GateSpec::Not(a, o) => push(GateKind::Not, a, a, o),
                GateSpec::Mux { c, a, b, out } => {
                    let d = fresh();
                    let e = fresh();
                    push(GateKind::Xor, a, b, d);
                    push(GateKind::And, c, d, e);
                    push(GateKind::Xor, b, e, out);
                }
                GateSpec::Eq { a, b, out } => {
                    if a.len() != b.len() || a.is_empty() {
                        return Err(GcError::Arity { expected: a.len(), found: b.len() });
                    }
                    let last = a.len() - 1;
                    let mut acc: Option<Wire> = None;
                    for k in 0..a.len() {
                        let d = fresh();
                        push(GateKind::Xor, a[k], b[k], d);
                        let e = if k == last && acc.is_none() { out } else { fresh() };
                        push(GateKind::Not, d, d, e);
                        acc = Some(match acc {
                            None => e,
                            Some(p) => {
                                let q = if k == last { out } else { fresh() };
                                push(GateKind::And, p, e, q);
                                q
                            }
                        });
                    }
                }
                GateSpec::Add { a, b, out } => {
                    if a.len() != b.len() || a.len() != out.len() || a.is_empty() {
                        return Err(GcError::Arity { expected: a.len(), found: b.len() });
                    }
                    push(GateKind::Xor, a[0], b[0], out[0]);
                    let mut c = fresh();
                    push(GateKind::And, a[0], b[0], c);
                    for k in 1..a.len() {
                        let s = fresh();
                        push(GateKind::Xor, a[k], b[k], s);
                        push(GateKind::Xor, s, c, out[k]);
                        if k + 1 < a.len() {
                            let (x, y, z, c2) = (fresh(), fresh(), fresh(), fresh());
                            push(GateKind::Xor, a[k], c, x);
                            push(GateKind::Xor, b[k], c, y);
                            push(GateKind::And, x, y, z);
                            push(GateKind::Xor, z, c, c2);
                            c = c2;
                        }
                    }
                }
                GateSpec::Gt { a, b, out } => {
                    if a.len() != b.len() || a.is_empty() {
                        return Err(GcError::Arity { expected: a.len(), found: b.len() });
                    }
                    // Carry-out of a + !b.
                    let nb0 = fresh();
                    push(GateKind::Not, b[0], b[0], nb0);
                    let mut c = if a.len() == 1 { out } else { fresh() };
                    push(GateKind::And, a[0], nb0, c);
                    for k in 1..a.len() {
                        let (nb, x, y, z) = (fresh(), fresh(), fresh(), fresh());
                        let c2 = if k + 1 == a.len() { out } else { fresh() };
                        push(GateKind::Not, b[k], b[k], nb);
                        push(GateKind::Xor, a[k], c, x);
                        push(GateKind::Xor, nb, c, y);
                        push(GateKind::And, x, y, z);
                        push(GateKind::Xor, z, c, c2);
                        c = c2;
                    }
                }
            }
        }
        Circuit::from_parts(next as usize, inputs, gates, outputs)
    }

    pub(crate) fn from_builder(num_wires: usize, inputs: Vec<Input>, gates: Vec<Gate>, outputs: Vec<Wire>) -> Circuit {
        Circuit { num_wires, inputs, gates, outputs }
    }

    pub fn num_wires(&self) -> usize {
        self.num_wires
    }

    pub fn inputs(&self) -> &[Input] {
        &self.inputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[Wire] {
        &self.outputs
    }

    pub fn count_inputs(&self, kind: InputKind) -> usize {
        self.inputs.iter().filter(|i| i.kind == kind).count()
    }

    pub fn and_count(&self) -> usize {
        self.gates.iter().filter(|g| g.kind == GateKind::And).count()
    }

    pub fn free_count(&self) -> usize {
        self.gates.len() - self.and_count()
    }
}
