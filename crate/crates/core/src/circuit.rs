//! Gate-level circuit IR.
//!
//! A [`Circuit`] is an ordered list of [`TimeSlice`]s; every slice holds gates
//! on pairwise disjoint qubits. Circuits are normally built with
//! [`asap_schedule`], which places each gate in the earliest slice after the
//! last slice touching any of its operands.
//!
//! The text format is line oriented:
//!
//! ```text
//! # comment
//! qubits 4
//! cx 0 1
//! rz 2 @0.5
//! --
//! cx 1 2
//! ```
//!
//! `--` is a slice barrier: gates after it are never packed into an earlier
//! slice than the barrier's position.

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};

/// A one- or two-qubit gate. The kind is an opaque name.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    kind: String,
    qubits: [usize; 2],
    arity: u8,
    param: Option<f64>,
}

impl Gate {
    pub fn new(kind: impl Into<String>, operands: &[usize]) -> Result<Self> {
        let kind = kind.into();
        match *operands {
            [q] => Ok(Gate {
                kind,
                qubits: [q, q],
                arity: 1,
                param: None,
            }),
            [a, b] if a == b => Err(Error::RepeatedOperand { kind, qubit: a }),
            [a, b] => Ok(Gate {
                kind,
                qubits: [a, b],
                arity: 2,
                param: None,
            }),
            _ => Err(Error::Arity {
                arity: operands.len(),
                kind,
            }),
        }
    }

    pub fn single(kind: impl Into<String>, q: usize) -> Self {
        Gate {
            kind: kind.into(),
            qubits: [q, q],
            arity: 1,
            param: None,
        }
    }

    /// Panics if `a == b`; generators only build well-formed pairs.
    pub fn pair(kind: impl Into<String>, a: usize, b: usize) -> Self {
        assert_ne!(a, b, "two-qubit gate on a single qubit");
        Gate {
            kind: kind.into(),
            qubits: [a, b],
            arity: 2,
            param: None,
        }
    }

    pub fn with_param(mut self, param: f64) -> Self {
        self.param = Some(param);
        self
    }

    pub fn kind(&self) -> &str {
        &self.kind
    }

    pub fn param(&self) -> Option<f64> {
        self.param
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits[..self.arity as usize]
    }

    pub fn is_two_qubit(&self) -> bool {
        self.arity == 2
    }

    /// The unordered operand pair `(min, max)` of a two-qubit gate.
    pub fn interaction(&self) -> Option<(usize, usize)> {
        self.is_two_qubit().then(|| {
            (
                self.qubits[0].min(self.qubits[1]),
                self.qubits[0].max(self.qubits[1]),
            )
        })
    }

    /// Same gate with operands renamed through `f`.
    pub fn remapped(&self, mut f: impl FnMut(usize) -> usize) -> Gate {
        let mut g = self.clone();
        g.qubits = [f(self.qubits[0]), f(self.qubits[1])];
        g
    }

    fn check_width(&self, width: usize) -> Result<()> {
        match self.qubits().iter().find(|&&q| q >= width) {
            Some(&qubit) => Err(Error::QubitOutOfRange { qubit, width }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        for q in self.qubits() {
            write!(f, " {q}")?;
        }
        if let Some(p) = self.param {
            write!(f, " @{p}")?;
        }
        Ok(())
    }
}

/// Gates that execute in parallel, stored in ascending order of first operand.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TimeSlice {
    gates: Vec<Gate>,
}

impl TimeSlice {
    fn from_unsorted(mut gates: Vec<Gate>) -> Self {
        gates.sort_by_key(|g| g.qubits[0]);
        TimeSlice { gates }
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Unordered pairs of the two-qubit gates in this slice.
    pub fn interactions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.gates.iter().filter_map(Gate::interaction)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    width: usize,
    slices: Vec<TimeSlice>,
}

impl Circuit {
    /// An empty circuit of the given width.
    pub fn empty(width: usize) -> Self {
        Circuit {
            width,
            slices: Vec::new(),
        }
    }

    /// Builds a circuit from explicit slices, checking operand ranges and
    /// per-slice disjointness. Empty slices are rejected.
    pub fn from_slices(width: usize, slices: Vec<Vec<Gate>>) -> Result<Self> {
        let mut seen = vec![usize::MAX; width];
        let mut out = Vec::with_capacity(slices.len());
        for (t, gates) in slices.into_iter().enumerate() {
            if gates.is_empty() {
                return Err(Error::EmptySlice { slice: t });
            }
            for g in &gates {
                g.check_width(width)?;
                for &q in g.qubits() {
                    if seen[q] == t {
                        return Err(Error::SliceConflict { slice: t, qubit: q });
                    }
                    seen[q] = t;
                }
            }
            out.push(TimeSlice::from_unsorted(gates));
        }
        Ok(Circuit { width, slices: out })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn slices(&self) -> &[TimeSlice] {
        &self.slices
    }

    pub fn depth(&self) -> usize {
        self.slices.len()
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates().filter(|g| g.is_two_qubit()).count()
    }

    pub fn gate_count(&self) -> usize {
        self.slices.iter().map(|s| s.gates.len()).sum()
    }

    /// All gates, slice-major.
    pub fn gates(&self) -> impl Iterator<Item = &Gate> + '_ {
        self.slices.iter().flat_map(|s| s.gates.iter())
    }

    /// Two-qubit gates only, ASAP packed. Single-qubit gates never cause
    /// communication, so this is the circuit the mapper's slices come from.
    pub fn interaction_skeleton(&self) -> Circuit {
        asap_schedule(
            self.gates().filter(|g| g.is_two_qubit()).cloned(),
            self.width,
        )
        .expect("gates already validated")
    }

    /// Depth of [`Circuit::interaction_skeleton`].
    pub fn two_qubit_depth(&self) -> usize {
        let mut level = vec![0usize; self.width];
        let mut depth = 0;
        for g in self.gates().filter(|g| g.is_two_qubit()) {
            let l = g.qubits().iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
            for &q in g.qubits() {
                level[q] = l;
            }
            depth = depth.max(l);
        }
        depth
    }

    /// Re-packs the gate list with [`asap_schedule`].
    pub fn repacked(&self) -> Circuit {
        asap_schedule(self.gates().cloned(), self.width).expect("gates already validated")
    }
}

/// Incremental ASAP packer.
#[derive(Debug)]
pub struct Scheduler {
    width: usize,
    next_free: Vec<usize>,
    floor: usize,
    slices: Vec<Vec<Gate>>,
}

impl Scheduler {
    pub fn new(width: usize) -> Self {
        Scheduler {
            width,
            next_free: vec![0; width],
            floor: 0,
            slices: Vec::new(),
        }
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.check_width(self.width)?;
        let t = gate
            .qubits()
            .iter()
            .map(|&q| self.next_free[q])
            .max()
            .unwrap_or(0)
            .max(self.floor);
        for &q in gate.qubits() {
            self.next_free[q] = t + 1;
        }
        if t == self.slices.len() {
            self.slices.push(Vec::new());
        }
        self.slices[t].push(gate);
        Ok(())
    }

    /// Later gates start no earlier than the current depth.
    pub fn barrier(&mut self) {
        self.floor = self.slices.len();
    }

    pub fn finish(self) -> Circuit {
        Circuit {
            width: self.width,
            slices: self
                .slices
                .into_iter()
                .map(TimeSlice::from_unsorted)
                .collect(),
        }
    }
}

/// Packs an ordered gate list into time slices as early as possible.
pub fn asap_schedule(gates: impl IntoIterator<Item = Gate>, width: usize) -> Result<Circuit> {
    let mut s = Scheduler::new(width);
    for g in gates {
        s.push(g)?;
    }
    Ok(s.finish())
}

/// One parsed directive of the circuit text format.
#[derive(Debug)]
pub(crate) enum Line {
    Header(usize),
    Gate(Gate),
    Barrier,
}

/// Parses a single non-comment line. `text` must already be comment-stripped and trimmed.
pub(crate) fn parse_line(text: &str, line: usize) -> Result<Line> {
    let err = |msg: String| Error::Parse { line, msg };
    if text == "--" {
        return Ok(Line::Barrier);
    }
    let mut tokens = text.split_whitespace();
    let kind = tokens.next().ok_or_else(|| err("empty directive".into()))?;
    if kind == "qubits" {
        let n = tokens
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| err("expected `qubits <n>`".into()))?;
        if tokens.next().is_some() {
            return Err(err("trailing tokens after qubit count".into()));
        }
        return Ok(Line::Header(n));
    }
    let mut operands = Vec::with_capacity(2);
    let mut param = None;
    for tok in tokens {
        if param.is_some() {
            return Err(err(format!("unexpected token `{tok}` after parameter")));
        }
        if let Some(p) = tok.strip_prefix('@') {
            param = Some(
                p.parse::<f64>()
                    .map_err(|_| err(format!("bad parameter `{tok}`")))?,
            );
        } else {
            operands.push(
                tok.parse::<usize>()
                    .map_err(|_| err(format!("bad operand `{tok}`")))?,
            );
        }
    }
    let gate = Gate::new(kind, &operands).map_err(|e| err(e.to_string()))?;
    Ok(Line::Gate(match param {
        Some(p) => gate.with_param(p),
        None => gate,
    }))
}

pub(crate) fn strip_comment(raw: &str) -> &str {
    raw.split('#').next().unwrap_or("").trim()
}

/// Parses the circuit text format.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut sched: Option<Scheduler> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = strip_comment(raw);
        if body.is_empty() {
            continue;
        }
        match (parse_line(body, line)?, sched.as_mut()) {
            (Line::Header(n), None) => sched = Some(Scheduler::new(n)),
            (Line::Header(_), Some(_)) => {
                return Err(Error::Parse {
                    line,
                    msg: "duplicate `qubits` header".into(),
                })
            }
            (_, None) => {
                return Err(Error::Parse {
                    line,
                    msg: "expected `qubits <n>` header first".into(),
                })
            }
            (Line::Barrier, Some(s)) => s.barrier(),
            (Line::Gate(g), Some(s)) => s.push(g).map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })?,
        }
    }
    sched.map(Scheduler::finish).ok_or(Error::Parse {
        line: 0,
        msg: "missing `qubits <n>` header".into(),
    })
}

/// Emits the text format: slice-major, ascending first operand, with a
/// barrier between consecutive slices so that parsing restores the slicing.
pub fn emit_circuit(circuit: &Circuit) -> String {
    emit_with_comments(circuit, &[])
}

/// Like [`emit_circuit`] with leading `# ` comment lines.
pub fn emit_with_comments(circuit: &Circuit, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "qubits {}", circuit.width);
    for (t, slice) in circuit.slices.iter().enumerate() {
        if t > 0 {
            out.push_str("--\n");
        }
        for g in &slice.gates {
            let _ = writeln!(out, "{g}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(a: usize, b: usize) -> Gate {
        Gate::pair("cx", a, b)
    }

    #[test]
    fn disjoint_gates_share_a_slice() {
        let c = asap_schedule([cx(0, 1), cx(2, 3), cx(1, 2)], 4).unwrap();
        assert_eq!(c.depth(), 2);
        assert_eq!(c.slices()[0].gates(), &[cx(0, 1), cx(2, 3)]);
        assert_eq!(c.slices()[1].gates(), &[cx(1, 2)]);
    }

    #[test]
    fn empty_program() {
        let c = asap_schedule(Vec::new(), 4).unwrap();
        assert_eq!((c.depth(), c.two_qubit_count()), (0, 0));
        assert_eq!(c.width(), 4);
    }

    #[test]
    fn operand_out_of_range() {
        assert!(matches!(
            asap_schedule([cx(0, 4)], 4),
            Err(Error::QubitOutOfRange { qubit: 4, width: 4 })
        ));
    }

    #[test]
    fn single_qubit_gates_occupy_slices() {
        let c = asap_schedule([Gate::single("h", 0), cx(0, 1), Gate::single("x", 2)], 3).unwrap();
        assert_eq!(c.depth(), 2);
        assert_eq!(c.two_qubit_count(), 1);
        assert_eq!(c.gate_count(), 3);
    }

    #[test]
    fn parse_sequential_dependency() {
        let c = parse_circuit("qubits 4\ncx 0 1\ncx 1 2").unwrap();
        assert_eq!((c.width(), c.gate_count(), c.depth()), (4, 2, 2));
    }

    #[test]
    fn parse_rejects_repeated_operand() {
        let e = parse_circuit("qubits 4\ncx 0 0").unwrap_err();
        match e {
            Error::Parse { line, msg } => {
                assert_eq!(line, 2);
                assert!(msg.contains("repeats operand 0"), "{msg}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        for (text, line) in [
            ("qubits 2\n\n# c\nccx 0 1 2", 4),
            ("cx 0 1", 1),
            ("qubits 2\ncx 0 x", 2),
            ("qubits 2\nrz 0 @abc", 2),
            ("qubits 2\nqubits 3", 2),
            ("qubits 2\ncx 0 2", 2),
        ] {
            match parse_circuit(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert!(parse_circuit("# only comments\n").is_err());
    }

    #[test]
    fn barrier_and_params_round_trip() {
        let text = "# hello\nqubits 3\nh 0\n--\nrz 1 @0.125 # trailing\ncp 0 2 @-3.5\n";
        let c = parse_circuit(text).unwrap();
        assert_eq!(c.depth(), 2);
        assert_eq!(c.slices()[1].gates()[0].param(), Some(-3.5));
        let again = parse_circuit(&emit_circuit(&c)).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn from_slices_checks_invariants() {
        assert!(matches!(
            Circuit::from_slices(3, vec![vec![cx(0, 1), cx(1, 2)]]),
            Err(Error::SliceConflict { slice: 0, qubit: 1 })
        ));
        assert!(matches!(
            Circuit::from_slices(3, vec![vec![]]),
            Err(Error::EmptySlice { slice: 0 })
        ));
        let c = Circuit::from_slices(3, vec![vec![cx(1, 2)], vec![cx(0, 1)]]).unwrap();
        assert_eq!(c.repacked(), c);
    }

    #[test]
    fn emit_orders_by_first_operand() {
        let c = asap_schedule([cx(2, 3), cx(0, 1)], 4).unwrap();
        assert_eq!(emit_circuit(&c), "qubits 4\ncx 0 1\ncx 2 3\n");
    }
}
