use super::circuit::{Circuit, Gate, GateKind, Input, InputKind, Wire};

/// Handle to a wire inside a [`CircuitBuilder`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bit(pub(crate) Wire);

impl Bit {
    pub fn wire(self) -> Wire {
        self.0
    }
}

/// Builds circuits gate by gate in topological order, folding constants.
/// Multi-bit values are little-endian slices of [`Bit`]s.
#[derive(Default)]
pub struct CircuitBuilder {
    inputs: Vec<Input>,
    gates: Vec<Gate>,
    known: Vec<Option<bool>>,
    consts: [Option<Bit>; 2],
}

impl CircuitBuilder {
    pub fn new() -> Self {
        CircuitBuilder::default()
    }

    fn wire(&mut self, value: Option<bool>) -> Bit {
        self.known.push(value);
        Bit(self.known.len() as Wire - 1)
    }

    fn input(&mut self, kind: InputKind) -> Bit {
        let value = match kind {
            InputKind::Constant(v) => Some(v),
            _ => None,
        };
        let b = self.wire(value);
        self.inputs.push(Input { wire: b.0, kind });
        b
    }

    pub fn garbler_input(&mut self) -> Bit {
        self.input(InputKind::Garbler)
    }

    pub fn evaluator_input(&mut self) -> Bit {
        self.input(InputKind::Evaluator)
    }

    pub fn carried_input(&mut self) -> Bit {
        self.input(InputKind::Carried)
    }

    pub fn garbler_inputs(&mut self, n: usize) -> Vec<Bit> {
        (0..n).map(|_| self.garbler_input()).collect()
    }

    pub fn evaluator_inputs(&mut self, n: usize) -> Vec<Bit> {
        (0..n).map(|_| self.evaluator_input()).collect()
    }

    pub fn carried_inputs(&mut self, n: usize) -> Vec<Bit> {
        (0..n).map(|_| self.carried_input()).collect()
    }

    pub fn constant(&mut self, v: bool) -> Bit {
        if let Some(b) = self.consts[v as usize] {
            return b;
        }
        let b = self.input(InputKind::Constant(v));
        self.consts[v as usize] = Some(b);
        b
    }

    pub fn known(&self, b: Bit) -> Option<bool> {
        self.known[b.0 as usize]
    }

    fn gate(&mut self, kind: GateKind, a: Bit, b: Bit) -> Bit {
        let out = self.wire(None);
        self.gates.push(Gate { kind, a: a.0, b: b.0, out: out.0 });
        out
    }

    pub fn xor(&mut self, a: Bit, b: Bit) -> Bit {
        match (self.known(a), self.known(b)) {
            (Some(x), Some(y)) => self.constant(x ^ y),
            (Some(false), _) => b,
            (_, Some(false)) => a,
            (Some(true), _) => self.not(b),
            (_, Some(true)) => self.not(a),
            _ if a == b => self.constant(false),
            _ => self.gate(GateKind::Xor, a, b),
        }
    }

    pub fn and(&mut self, a: Bit, b: Bit) -> Bit {
        match (self.known(a), self.known(b)) {
            (Some(x), Some(y)) => self.constant(x & y),
            (Some(false), _) | (_, Some(false)) => self.constant(false),
            (Some(true), _) => b,
            (_, Some(true)) => a,
            _ if a == b => a,
            _ => self.gate(GateKind::And, a, b),
        }
    }

    pub fn not(&mut self, a: Bit) -> Bit {
        match self.known(a) {
            Some(x) => self.constant(!x),
            None => self.gate(GateKind::Not, a, a),
        }
    }

    pub fn or(&mut self, a: Bit, b: Bit) -> Bit {
        let na = self.not(a);
        let nb = self.not(b);
        let n = self.and(na, nb);
        self.not(n)
    }

    /// `c ? a : b`
    pub fn mux(&mut self, c: Bit, a: Bit, b: Bit) -> Bit {
        let d = self.xor(a, b);
        let e = self.and(c, d);
        self.xor(b, e)
    }

    pub fn mux_vec(&mut self, c: Bit, a: &[Bit], b: &[Bit]) -> Vec<Bit> {
        a.iter().zip(b).map(|(&x, &y)| self.mux(c, x, y)).collect()
    }

    pub fn and_all(&mut self, bits: &[Bit]) -> Bit {
        let mut acc = self.constant(true);
        for &b in bits {
            acc = self.and(acc, b);
        }
        acc
    }

    pub fn or_all(&mut self, bits: &[Bit]) -> Bit {
        let mut acc = self.constant(false);
        for &b in bits {
            acc = self.or(acc, b);
        }
        acc
    }

    pub fn xor_vec(&mut self, a: &[Bit], b: &[Bit]) -> Vec<Bit> {
        a.iter().zip(b).map(|(&x, &y)| self.xor(x, y)).collect()
    }

    pub fn eq(&mut self, a: &[Bit], b: &[Bit]) -> Bit {
        assert_eq!(a.len(), b.len());
        let same: Vec<Bit> = a
            .iter()
            .zip(b)
            .map(|(&x, &y)| {
                let d = self.xor(x, y);
                self.not(d)
            })
            .collect();
        self.and_all(&same)
    }

    /// Sum modulo `2^len`.
    pub fn add(&mut self, a: &[Bit], b: &[Bit]) -> Vec<Bit> {
        assert_eq!(a.len(), b.len());
        let mut c = self.constant(false);
        let mut out = Vec::with_capacity(a.len());
        for (&x, &y) in a.iter().zip(b) {
            let s = self.xor(x, y);
            out.push(self.xor(s, c));
            let xc = self.xor(x, c);
            let yc = self.xor(y, c);
            let t = self.and(xc, yc);
            c = self.xor(t, c);
        }
        out
    }

    /// Unsigned `a > b`, one AND per bit.
    pub fn gt(&mut self, a: &[Bit], b: &[Bit]) -> Bit {
        assert_eq!(a.len(), b.len());
        let mut c = self.constant(false);
        for (&x, &y) in a.iter().zip(b) {
            let ny = self.not(y);
            let xc = self.xor(x, c);
            let yc = self.xor(ny, c);
            let t = self.and(xc, yc);
            c = self.xor(t, c);
        }
        c
    }

    /// Little-endian constant of `width` bits.
    pub fn constant_word(&mut self, value: u64, width: usize) -> Vec<Bit> {
        (0..width).map(|k| self.constant(k < 64 && (value >> k) & 1 == 1)).collect()
    }

    pub fn and_count(&self) -> usize {
        self.gates.iter().filter(|g| g.kind == GateKind::And).count()
    }

    pub fn finish(self, outputs: &[Bit]) -> Circuit {
        Circuit::from_builder(self.known.len(), self.inputs, self.gates, outputs.iter().map(|b| b.0).collect())
    }
}
