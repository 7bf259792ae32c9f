//! Circuit programs: composition, inversion, decomposition into
//! `{CNOT, single-qubit}` and resource counting.

use std::fmt::Write as _;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::sim::{GateOp, QuantumState};

/// Half-open run of consecutive qubits `[start, start + len)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Span {
    pub start: usize,
    pub len: usize,
}

impl Span {
    pub const fn new(start: usize, len: usize) -> Self {
        Self { start, len }
    }

    pub fn end(&self) -> usize {
        self.start + self.len
    }

    pub fn qubits(&self) -> Range<usize> {
        self.start..self.end()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.qubits().collect()
    }

    pub fn contains(&self, q: usize) -> bool {
        self.qubits().contains(&q)
    }

    /// Qubit at position `j` of the span.
    pub fn at(&self, j: usize) -> usize {
        debug_assert!(j < self.len);
        self.start + j
    }
}

/// Named register spans of a program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RegisterLayout {
    pub data: Span,
    pub ancilla: Span,
    pub flag: Option<usize>,
}

impl RegisterLayout {
    /// Every qubit is a data qubit.
    pub fn plain(n_qubits: usize) -> Self {
        Self {
            data: Span::new(0, n_qubits),
            ancilla: Span::new(n_qubits, 0),
            flag: None,
        }
    }

    pub fn n_declared(&self) -> usize {
        self.data.len + self.ancilla.len + usize::from(self.flag.is_some())
    }

    pub fn n_ancilla(&self) -> usize {
        self.ancilla.len + usize::from(self.flag.is_some())
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        let mut seen = vec![false; n_qubits];
        let spans = [self.data, self.ancilla]
            .into_iter()
            .chain(self.flag.map(|f| Span::new(f, 1)));
        for span in spans {
            for q in span.qubits() {
                match seen.get_mut(q) {
                    None => return Err(Error::QubitIndex { index: q, n_qubits }),
                    Some(true) => {
                        return Err(Error::Validation(format!(
                            "qubit {q} belongs to more than one register"
                        )))
                    }
                    Some(s) => *s = true,
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Validation(
                "register layout does not cover every qubit".into(),
            ));
        }
        Ok(())
    }
}

/// A named sub-range of a program's op list, used to keep track of the
/// arithmetic blocks an ansatz was assembled from.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockLabel {
    pub name: String,
    pub inverse: bool,
    pub ops: Range<usize>,
}

/// Ordered gate/channel list over a fixed register layout.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitProgram {
    n_qubits: usize,
    ops: Vec<GateOp>,
    layout: RegisterLayout,
    labels: Vec<BlockLabel>,
}

/// Qubit and gate counts of one ansatz layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceReport {
    pub n_data_qubits: usize,
    pub n_ancilla_qubits: usize,
    /// CNOTs in the decomposed layer.
    pub two_qubit_gates_per_layer: usize,
    pub single_qubit_gates_per_layer: usize,
    /// Depth of the decomposed layer times the layer count.
    pub total_depth: usize,
}

impl CircuitProgram {
    pub fn new(n_qubits: usize, layout: RegisterLayout) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::Validation("circuit needs at least one qubit".into()));
        }
        layout.validate(n_qubits)?;
        Ok(Self {
            n_qubits,
            ops: Vec::new(),
            layout,
            labels: Vec::new(),
        })
    }

    /// Program over `n_qubits` data qubits with no ancillas.
    pub fn plain(n_qubits: usize) -> Self {
        Self::new(n_qubits, RegisterLayout::plain(n_qubits)).expect("plain layout is valid")
    }

    /// Empty program sharing this program's register layout.
    pub fn empty_like(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            ops: Vec::new(),
            layout: self.layout,
            labels: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn labels(&self) -> &[BlockLabel] {
        &self.labels
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn push(&mut self, op: GateOp) -> Result<()> {
        op.validate(self.n_qubits)?;
        self.ops.push(op);
        Ok(())
    }

    pub fn with(mut self, op: GateOp) -> Result<Self> {
        self.push(op)?;
        Ok(self)
    }

    /// Marks the whole op list as one named block.
    pub fn labeled(mut self, name: &str) -> Self {
        self.labels.insert(
            0,
            BlockLabel {
                name: name.to_string(),
                inverse: false,
                ops: 0..self.ops.len(),
            },
        );
        self
    }

    /// Number of top-level or nested blocks called `name` with the given orientation.
    pub fn count_blocks(&self, name: &str, inverse: bool) -> usize {
        self.labels
            .iter()
            .filter(|l| l.name == name && l.inverse == inverse)
            .count()
    }

    /// Appends `other` in place.
    pub fn append(&mut self, other: &CircuitProgram) -> Result<()> {
        if self.n_qubits != other.n_qubits || self.layout != other.layout {
            return Err(Error::LayoutMismatch(format!(
                "{} qubits {:?} vs {} qubits {:?}",
                self.n_qubits, self.layout, other.n_qubits, other.layout
            )));
        }
        let offset = self.ops.len();
        self.ops.extend_from_slice(&other.ops);
        self.labels.extend(other.labels.iter().map(|l| BlockLabel {
            name: l.name.clone(),
            inverse: l.inverse,
            ops: l.ops.start + offset..l.ops.end + offset,
        }));
        Ok(())
    }

    pub fn has_measurements(&self) -> bool {
        self.ops.iter().any(GateOp::is_measurement)
    }

    /// One line per op: kind, targets, angle.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for op in &self.ops {
            let _ = writeln!(out, "{op}");
        }
        out
    }

    pub fn two_qubit_count(&self) -> usize {
        self.ops.iter().filter(|o| o.is_two_qubit()).count()
    }

    /// Circuit depth with every op occupying one time step on its qubits.
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.n_qubits];
        for op in &self.ops {
            let next = op.qubits().map(|q| level[q]).max().unwrap_or(0) + 1;
            for q in op.qubits() {
                level[q] = next;
            }
        }
        level.into_iter().max().unwrap_or(0)
    }
}

/// `a` followed by `b`. Both must share qubit count and register layout.
pub fn compose(a: &CircuitProgram, b: &CircuitProgram) -> Result<CircuitProgram> {
    let mut out = a.clone();
    out.append(b)?;
    Ok(out)
}

/// Reversed op order with every gate replaced by its inverse.
pub fn invert(c: &CircuitProgram) -> Result<CircuitProgram> {
    let ops = c
        .ops
        .iter()
        .rev()
        .map(|op| op.inverse().ok_or(Error::NonInvertible))
        .collect::<Result<Vec<_>>>()?;
    let len = c.ops.len();
    let labels = c
        .labels
        .iter()
        .rev()
        .map(|l| BlockLabel {
            name: l.name.clone(),
            inverse: !l.inverse,
            ops: len - l.ops.end..len - l.ops.start,
        })
        .collect();
    Ok(CircuitProgram {
        n_qubits: c.n_qubits,
        ops,
        layout: c.layout,
        labels,
    })
}

/// Rewrites every two-qubit gate other than CNOT into CNOTs and single-qubit
/// rotations, equal to the original up to global phase:
///
/// * `CPhase(θ)` on `(a, b)` → `RZ_a(θ/2) · CNOT · RZ_b(−θ/2) · CNOT · RZ_b(θ/2)`
/// * `SWAP` → three alternating CNOTs
///
/// Measurement channels are kept as-is.
pub fn decompose(c: &CircuitProgram) -> CircuitProgram {
    let mut ops = Vec::with_capacity(c.ops.len() * 2);
    for op in &c.ops {
        match *op {
            GateOp::CPhase(a, b, t) => {
                ops.push(GateOp::Rz(a, t / 2.0));
                ops.push(GateOp::Cnot { control: a, target: b });
                ops.push(GateOp::Rz(b, -t / 2.0));
                ops.push(GateOp::Cnot { control: a, target: b });
                ops.push(GateOp::Rz(b, t / 2.0));
            }
            GateOp::Swap(a, b) => {
                ops.push(GateOp::Cnot { control: a, target: b });
                ops.push(GateOp::Cnot { control: b, target: a });
                ops.push(GateOp::Cnot { control: a, target: b });
            }
            other => ops.push(other),
        }
    }
    CircuitProgram {
        n_qubits: c.n_qubits,
        ops,
        layout: c.layout,
        labels: Vec::new(),
    }
}

/// Resource counts for a single ansatz layer `layer`, repeated `layers` times.
pub fn count_resources(layer: &CircuitProgram, layers: usize) -> ResourceReport {
    let decomposed = decompose(layer);
    let two = decomposed.two_qubit_count();
    let single = decomposed
        .ops
        .iter()
        .filter(|o| !o.is_two_qubit() && !o.is_measurement())
        .count();
    ResourceReport {
        n_data_qubits: layer.layout.data.len,
        n_ancilla_qubits: layer.layout.n_ancilla(),
        two_qubit_gates_per_layer: two,
        single_qubit_gates_per_layer: single,
        total_depth: decomposed.depth() * layers,
    }
}

/// Applies every op of `c` in order to `initial`.
pub fn run(c: &CircuitProgram, initial: QuantumState) -> Result<QuantumState> {
    if initial.n_qubits() != c.n_qubits {
        return Err(Error::Validation(format!(
            "state has {} qubits, circuit has {}",
            initial.n_qubits(),
            c.n_qubits
        )));
    }
    if c.has_measurements() && !initial.backend().supports_channels() {
        return Err(Error::UnsupportedChannel {
            backend: initial.backend().name(),
        });
    }
    let mut state = initial;
    for op in &c.ops {
        state.apply(op)?;
    }
    Ok(state)
}
