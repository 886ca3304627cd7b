//! Mapped circuits: the original gates on physical slots, with non-local
//! swaps inserted before every slice whose assignment differs from the last.
//!
//! Slot `s` belongs to cluster `s / p`. Each skeleton slice `t` becomes a
//! segment: the transition into `t` (layers of `swap-nl` ops) followed by the
//! gates of phase `t`. A two-qubit gate's phase is its slice in the
//! interaction skeleton; a single-qubit gate joins the phase of the last
//! two-qubit gate on its qubit.
//!
//! Text form, which also parses as a plain circuit over `k * p` slots:
//!
//! ```text
//! qubits 4
//! ## mapped k=2 p=2 algorithm=fgp-roee width=3 depth=2
//! ## initial 0 1 2
//! ## slice 0
//! cx 0 1
//! --
//! ## transition 1 cost=1 rounds=1
//! swap-nl 1 3
//! --
//! ## slice 1
//! cx 2 3
//! ```

use std::fmt::Write as _;

use super::path::{Algorithm, Path};
use crate::circuit::{asap_schedule, parse_line, strip_comment, Circuit, Gate, Line};
use crate::error::{Error, Result};
use crate::partition::{Assignment, Machine};

pub const SWAP_KIND: &str = "swap-nl";

#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    /// Index of the slice this transition prepares.
    pub slice: usize,
    pub cost: usize,
    pub rounds: usize,
    /// Layers of slot pairs; swaps in one layer touch disjoint clusters.
    pub layers: Vec<Vec<(usize, usize)>>,
}

impl Transition {
    pub fn swap_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub slice: usize,
    pub transition: Option<Transition>,
    /// Gate layers on physical slots.
    pub layers: Vec<Vec<Gate>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MappedCircuit {
    pub machine: Machine,
    pub algorithm: String,
    /// Logical circuit width.
    pub width: usize,
    /// Depth of the unmapped interaction skeleton.
    pub depth_unmapped: usize,
    /// Slot of each logical qubit before the first slice.
    pub initial: Vec<usize>,
    pub segments: Vec<Segment>,
}

/// Phase of every gate in slice-major order, and the phase count.
fn phases(circuit: &Circuit) -> (Vec<usize>, usize) {
    let mut level = vec![0usize; circuit.width()];
    let mut out = Vec::with_capacity(circuit.gate_count());
    let mut count = 0;
    for g in circuit.gates() {
        if g.is_two_qubit() {
            let l = g.qubits().iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
            for &q in g.qubits() {
                level[q] = l;
            }
            out.push(l - 1);
            count = count.max(l);
        } else {
            out.push(level[g.qubits()[0]].saturating_sub(1));
        }
    }
    (out, count)
}

/// Holder -> slot, holders of each cluster taking its slots in id order.
fn initial_slots(a: &Assignment) -> Vec<usize> {
    let p = a.capacity();
    let mut next = (0..a.clusters()).map(|c| c * p).collect::<Vec<_>>();
    a.as_slice()
        .iter()
        .map(|&c| {
            next[c] += 1;
            next[c] - 1
        })
        .collect()
}

/// Interleaves `circuit` with the moves of `path`, which must have been built
/// on `circuit.interaction_skeleton()`.
pub fn insert_movement(circuit: &Circuit, path: &Path) -> Result<MappedCircuit> {
    let (phase, count) = phases(circuit);
    if path.len() != count {
        return Err(Error::Mapped(format!(
            "path has {} assignments but the circuit has {count} interaction slices",
            path.len()
        )));
    }
    let machine = path.machine;
    let first = match path.assignments.first() {
        Some(a) => a.clone(),
        None => Assignment::cluster_major(&machine, circuit.width())?,
    };
    if first.qubits() != circuit.width() {
        return Err(Error::Mismatch);
    }
    let mut slot = initial_slots(&first);
    let initial = slot[..circuit.width()].to_vec();

    let mut per_phase: Vec<Vec<Gate>> = vec![Vec::new(); count.max(1)];
    for (g, &t) in circuit.gates().zip(&phase) {
        per_phase[t].push(g.clone());
    }

    let p = machine.capacity();
    let mut segments = Vec::with_capacity(per_phase.len());
    for (t, gates) in per_phase.into_iter().enumerate() {
        let moves = t.checked_sub(1).map(|i| &path.transitions[i]);
        let transition = match moves {
            None => None,
            Some(m) if m.is_empty() => None,
            Some(moves) => {
                let mut layers: Vec<Vec<(usize, usize)>> = Vec::new();
                let mut busy = vec![0usize; machine.clusters()];
                for (a, b) in moves.swaps() {
                    let (sa, sb) = (slot[a], slot[b]);
                    let (ca, cb) = (sa / p, sb / p);
                    let l = busy[ca].max(busy[cb]);
                    if l == layers.len() {
                        layers.push(Vec::new());
                    }
                    layers[l].push((sa.min(sb), sa.max(sb)));
                    busy[ca] = l + 1;
                    busy[cb] = l + 1;
                    slot.swap(a, b);
                }
                Some(Transition {
                    slice: t,
                    cost: moves.cost,
                    rounds: moves.rounds(),
                    layers,
                })
            }
        };
        let physical = gates.iter().map(|g| g.remapped(|q| slot[q]));
        let packed = asap_schedule(physical, machine.slots())?;
        let layers = packed.slices().iter().map(|s| s.gates().to_vec()).collect();
        segments.push(Segment {
            slice: t,
            transition,
            layers,
        });
    }
    if circuit.gate_count() == 0 && count == 0 {
        segments.clear();
    }
    Ok(MappedCircuit {
        machine,
        algorithm: path.algorithm.name().to_string(),
        width: circuit.width(),
        depth_unmapped: count,
        initial,
        segments,
    })
}

impl MappedCircuit {
    pub fn transitions(&self) -> impl Iterator<Item = &Transition> + '_ {
        self.segments.iter().filter_map(|s| s.transition.as_ref())
    }

    /// Annotated non-local operations.
    pub fn total_cost(&self) -> usize {
        self.transitions().map(|t| t.cost).sum()
    }

    pub fn total_rounds(&self) -> usize {
        self.transitions().map(|t| t.rounds).sum()
    }

    /// Number of `swap-nl` operations present.
    pub fn swap_count(&self) -> usize {
        self.transitions().map(Transition::swap_count).sum()
    }

    pub fn movement_layers(&self) -> usize {
        self.transitions().map(|t| t.layers.len()).sum()
    }

    /// Total layers: movement layers plus gate layers.
    pub fn depth(&self) -> usize {
        self.segments
            .iter()
            .map(|s| s.layers.len() + s.transition.as_ref().map_or(0, |t| t.layers.len()))
            .sum()
    }

    /// Depth counting only layers that hold a two-qubit gate, plus movement layers.
    pub fn two_qubit_depth(&self) -> usize {
        self.segments
            .iter()
            .map(|s| {
                s.layers
                    .iter()
                    .filter(|l| l.iter().any(Gate::is_two_qubit))
                    .count()
                    + s.transition.as_ref().map_or(0, |t| t.layers.len())
            })
            .sum()
    }

    /// Flattens to a circuit over `k * p` slots with `swap-nl` gates.
    pub fn to_circuit(&self) -> Circuit {
        let mut slices = Vec::new();
        for seg in &self.segments {
            if let Some(t) = &seg.transition {
                for l in &t.layers {
                    slices.push(
                        l.iter()
                            .map(|&(a, b)| Gate::pair(SWAP_KIND, a, b))
                            .collect(),
                    );
                }
            }
            slices.extend(seg.layers.iter().cloned());
        }
        Circuit::from_slices(self.machine.slots(), slices).expect("mapped layers are valid slices")
    }

    /// Replays every swap from the initial placement. Returns the slot of each
    /// logical qubit as each slice starts, after checking that swaps cross
    /// clusters and every two-qubit gate runs inside one cluster.
    pub fn replay(&self) -> Result<Vec<Vec<usize>>> {
        let p = self.machine.capacity();
        let slots = self.machine.slots();
        let mut occupant: Vec<Option<usize>> = vec![None; slots];
        for (q, &s) in self.initial.iter().enumerate() {
            if s >= slots || occupant[s].is_some() {
                return Err(Error::Mapped(format!(
                    "initial slot {s} of qubit {q} is invalid"
                )));
            }
            occupant[s] = Some(q);
        }
        let mut slot = self.initial.clone();
        let mut out = Vec::with_capacity(self.segments.len());
        for seg in &self.segments {
            if let Some(t) = &seg.transition {
                for &(a, b) in t.layers.iter().flatten() {
                    if a / p == b / p {
                        return Err(Error::Mapped(format!(
                            "swap {a} {b} stays inside cluster {}",
                            a / p
                        )));
                    }
                    occupant.swap(a, b);
                    for s in [a, b] {
                        if let Some(q) = occupant[s] {
                            slot[q] = s;
                        }
                    }
                }
            }
            out.push(slot.clone());
            for g in seg.layers.iter().flatten() {
                if let Some((a, b)) = g.interaction() {
                    if a / p != b / p {
                        return Err(Error::Mapped(format!(
                            "slice {}: `{g}` spans clusters",
                            seg.slice
                        )));
                    }
                }
            }
        }
        Ok(out)
    }

    /// True when replay puts every logical qubit in the cluster `path` assigns it.
    pub fn matches_path(&self, path: &Path) -> Result<bool> {
        let placements = self.replay()?;
        if placements.len() != path.len() {
            return Ok(path.is_empty() && placements.len() <= 1);
        }
        let p = self.machine.capacity();
        Ok(placements.iter().zip(&path.assignments).all(|(slots, a)| {
            slots
                .iter()
                .enumerate()
                .all(|(q, &s)| s / p == a.cluster(q))
        }))
    }

    pub fn emit(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "qubits {}", self.machine.slots());
        let _ = writeln!(
            out,
            "## mapped k={} p={} algorithm={} width={} depth={}",
            self.machine.clusters(),
            self.machine.capacity(),
            self.algorithm,
            self.width,
            self.depth_unmapped
        );
        let init: Vec<String> = self.initial.iter().map(usize::to_string).collect();
        let _ = writeln!(out, "## initial {}", init.join(" "));
        for seg in &self.segments {
            if let Some(t) = &seg.transition {
                let _ = writeln!(
                    out,
                    "## transition {} cost={} rounds={}",
                    t.slice, t.cost, t.rounds
                );
                for l in &t.layers {
                    for &(a, b) in l {
                        let _ = writeln!(out, "{SWAP_KIND} {a} {b}");
                    }
                    out.push_str("--\n");
                }
            }
            let _ = writeln!(out, "## slice {}", seg.slice);
            for l in &seg.layers {
                for g in l {
                    let _ = writeln!(out, "{g}");
                }
                out.push_str("--\n");
            }
        }
        out
    }
}

fn field<'a>(tokens: &[&'a str], key: &str, line: usize) -> Result<&'a str> {
    tokens
        .iter()
        .find_map(|t| t.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .ok_or_else(|| Error::Parse {
            line,
            msg: format!("missing `{key}=`"),
        })
}

fn num(text: &str, line: usize) -> Result<usize> {
    text.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad number `{text}`"),
    })
}

/// Parses the mapped text format. Files without the `## mapped` header are rejected.
pub fn parse_mapped(text: &str) -> Result<MappedCircuit> {
    if !text
        .lines()
        .any(|l| l.trim_start().starts_with("## mapped"))
    {
        return Err(Error::Mapped(
            "missing `## mapped` header; file is not annotated".into(),
        ));
    }
    let mut header: Option<(Machine, String, usize, usize)> = None;
    let mut slots_decl: Option<usize> = None;
    let mut initial: Option<Vec<usize>> = None;
    let mut segments: Vec<Segment> = Vec::new();
    let mut pending: Option<Transition> = None;
    let mut layer: Vec<Gate> = Vec::new();
    let mut swaps: Vec<(usize, usize)> = Vec::new();
    // 0: before any section, 1: in a transition, 2: in a slice.
    let mut mode = 0;

    fn flush_gates(segments: &mut [Segment], layer: &mut Vec<Gate>) {
        if !layer.is_empty() {
            segments
                .last_mut()
                .expect("slice open")
                .layers
                .push(std::mem::take(layer));
        }
    }

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if let Some(rest) = trimmed.strip_prefix("##") {
            let tokens: Vec<&str> = rest.split_whitespace().collect();
            match tokens.first().copied() {
                Some("mapped") => {
                    let k = num(field(&tokens, "k", line)?, line)?;
                    let p = num(field(&tokens, "p", line)?, line)?;
                    let alg = field(&tokens, "algorithm", line)?.to_string();
                    let width = num(field(&tokens, "width", line)?, line)?;
                    let depth = num(field(&tokens, "depth", line)?, line)?;
                    let m = Machine::new(k, p, 1.0).map_err(|e| Error::Parse {
                        line,
                        msg: e.to_string(),
                    })?;
                    header = Some((m, alg, width, depth));
                }
                Some("initial") => {
                    initial = Some(
                        tokens[1..]
                            .iter()
                            .map(|t| num(t, line))
                            .collect::<Result<_>>()?,
                    );
                }
                Some("transition") => {
                    if mode == 2 {
                        flush_gates(&mut segments, &mut layer);
                    }
                    let slice = num(tokens.get(1).copied().unwrap_or(""), line)?;
                    let cost = num(field(&tokens, "cost", line)?, line)?;
                    let rounds = num(field(&tokens, "rounds", line)?, line)?;
                    pending = Some(Transition {
                        slice,
                        cost,
                        rounds,
                        layers: Vec::new(),
                    });
                    mode = 1;
                }
                Some("slice") => {
                    match mode {
                        1 => {
                            if !swaps.is_empty() {
                                pending
                                    .as_mut()
                                    .unwrap()
                                    .layers
                                    .push(std::mem::take(&mut swaps));
                            }
                        }
                        2 => flush_gates(&mut segments, &mut layer),
                        _ => {}
                    }
                    let slice = num(tokens.get(1).copied().unwrap_or(""), line)?;
                    segments.push(Segment {
                        slice,
                        transition: pending.take(),
                        layers: Vec::new(),
                    });
                    mode = 2;
                }
                _ => {}
            }
            continue;
        }
        let body = strip_comment(raw);
        if body.is_empty() {
            continue;
        }
        match parse_line(body, line)? {
            Line::Header(n) => slots_decl = Some(n),
            Line::Barrier => match mode {
                1 if !swaps.is_empty() => pending
                    .as_mut()
                    .unwrap()
                    .layers
                    .push(std::mem::take(&mut swaps)),
                2 => flush_gates(&mut segments, &mut layer),
                _ => {}
            },
            Line::Gate(g) if g.kind() == SWAP_KIND => {
                if mode != 1 {
                    return Err(Error::Parse {
                        line,
                        msg: "swap outside a transition".into(),
                    });
                }
                let q = g.qubits();
                swaps.push((q[0].min(q[1]), q[0].max(q[1])));
            }
            Line::Gate(g) => {
                if mode != 2 {
                    return Err(Error::Parse {
                        line,
                        msg: "gate outside a slice".into(),
                    });
                }
                layer.push(g);
            }
        }
    }
    if mode == 2 {
        flush_gates(&mut segments, &mut layer);
    }
    if pending.is_some() {
        return Err(Error::Mapped("transition without a following slice".into()));
    }
    let (machine, algorithm, width, depth_unmapped) = header
        .ok_or_else(|| Error::Mapped("missing `## mapped` header; file is not annotated".into()))?;
    if slots_decl != Some(machine.slots()) {
        return Err(Error::Mapped(format!(
            "`qubits` must equal k*p = {}",
            machine.slots()
        )));
    }
    let initial = initial.ok_or_else(|| Error::Mapped("missing `## initial` line".into()))?;
    if initial.len() != width {
        return Err(Error::Mapped(format!(
            "initial placement lists {} qubits, width is {width}",
            initial.len()
        )));
    }
    let mc = MappedCircuit {
        machine,
        algorithm,
        width,
        depth_unmapped,
        initial,
        segments,
    };
    for t in mc.transitions() {
        if t.swap_count() != t.cost {
            return Err(Error::Mapped(format!(
                "transition {} declares cost {} but has {} swaps",
                t.slice,
                t.cost,
                t.swap_count()
            )));
        }
    }
    Ok(mc)
}

/// Whether `algorithm` names a known path algorithm.
pub fn known_algorithm(name: &str) -> bool {
    name.parse::<Algorithm>().is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;
    use crate::graph::{LookaheadKind, LookaheadSpec};
    use crate::mapper::path::{build_path, InitialLayout, MapOptions};
    use crate::Exec;

    fn compile(src: &str, k: usize, p: usize, alg: Algorithm) -> (Circuit, Path, MappedCircuit) {
        let c = parse_circuit(src).unwrap();
        let m = Machine::new(k, p, 1.0).unwrap();
        let spec = LookaheadSpec::new(LookaheadKind::Exponential, 1.0).unwrap();
        let opts = MapOptions::new(alg)
            .with_lookahead(spec)
            .with_layout(InitialLayout::ClusterMajor)
            .with_exec(Exec::Sequential);
        let path = build_path(&c.interaction_skeleton(), &m, &opts).unwrap();
        let mapped = insert_movement(&c, &path).unwrap();
        (c, path, mapped)
    }

    #[test]
    fn zero_cost_keeps_the_circuit() {
        let (c, path, mapped) = compile(
            "qubits 4\ncx 0 1\nh 2\ncx 2 3\ncx 1 0\n",
            2,
            2,
            Algorithm::FgpRoee,
        );
        assert_eq!(path.total_cost(), 0);
        assert_eq!(mapped.swap_count(), 0);
        assert_eq!(mapped.to_circuit().gate_count(), c.gate_count());
        assert!(mapped.matches_path(&path).unwrap());
    }

    #[test]
    fn one_swap_one_layer() {
        // Static partition keeps {0,1} and {2,3}; slice 1 needs (1,2) on a full machine.
        let src = "qubits 4\ncx 0 1\ncx 2 3\ncx 0 1\ncx 2 3\ncx 1 2\n";
        let (_, path, mapped) = compile(src, 2, 2, Algorithm::StaticOee);
        assert_eq!(path.total_cost(), 1);
        let t: Vec<_> = mapped.transitions().collect();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].layers.len(), 1);
        assert_eq!(t[0].swap_count(), 1);
        assert!(mapped.matches_path(&path).unwrap());
    }

    #[test]
    fn text_round_trip() {
        let src = "qubits 5\ncx 0 1\nh 3\ncx 2 3\ncx 1 2\nx 0\ncx 0 3\ncx 4 1\ncx 2 4\n";
        for alg in Algorithm::ALL {
            let (c, path, mapped) = compile(src, 3, 2, alg);
            let text = mapped.emit();
            let back = parse_mapped(&text).unwrap();
            assert_eq!(back, mapped, "{alg}");
            assert!(mapped.matches_path(&path).unwrap());
            assert_eq!(mapped.swap_count(), path.total_cost());
            let plain = parse_circuit(&text).unwrap();
            assert_eq!(plain.gate_count(), c.gate_count() + mapped.swap_count());
        }
    }

    #[test]
    fn unannotated_file_is_rejected() {
        assert!(matches!(
            parse_mapped("qubits 4\ncx 0 1\n"),
            Err(Error::Mapped(_))
        ));
    }

    #[test]
    fn cost_mismatch_is_rejected() {
        let (_, _, mapped) = compile(
            "qubits 4\ncx 0 1\ncx 2 3\ncx 0 1\ncx 2 3\ncx 1 2\n",
            2,
            2,
            Algorithm::StaticOee,
        );
        let text = mapped.emit().replace("cost=1", "cost=2");
        assert!(parse_mapped(&text).is_err());
    }

    #[test]
    fn single_qubit_gates_follow_their_qubit() {
        let c = parse_circuit("qubits 3\nh 0\ncx 0 1\nx 1\ncx 1 2\nh 2\n").unwrap();
        let (ph, n) = phases(&c);
        assert_eq!(n, 2);
        assert_eq!(ph, vec![0, 0, 0, 1, 1]);
    }
}
