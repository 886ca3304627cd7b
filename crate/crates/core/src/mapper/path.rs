use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::cost::{comm_cost, MoveSet};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graph::{
    total_interaction_graph, InteractionGraph, LookaheadKind, LookaheadSpec, SliceIndex,
};
use crate::partition::{
    oee, oee_logged, repair_moves, required_satisfied, roee_logged, Assignment, Machine,
};

/// Lookahead graphs are built this many slices at a time.
const CHUNK: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    StaticOee,
    FgpOee,
    FgpRoee,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::StaticOee, Algorithm::FgpOee, Algorithm::FgpRoee];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::StaticOee => "static-oee",
            Algorithm::FgpOee => "fgp-oee",
            Algorithm::FgpRoee => "fgp-roee",
        }
    }

    pub fn uses_lookahead(self) -> bool {
        self != Algorithm::StaticOee
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "static-oee" | "static" => Ok(Algorithm::StaticOee),
            "fgp-oee" => Ok(Algorithm::FgpOee),
            "fgp-roee" => Ok(Algorithm::FgpRoee),
            _ => Err(Error::Machine(format!("unknown algorithm `{s}`"))),
        }
    }
}

/// Starting placement handed to the static partitioner.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InitialLayout {
    /// Holder `i` in cluster `i / p`.
    ClusterMajor,
    /// Cluster-major labels shuffled by a seeded ChaCha8 stream.
    Shuffled(u64),
}

impl InitialLayout {
    pub const DEFAULT_SEED: u64 = 2019;

    pub fn assignment(self, machine: &Machine, qubits: usize) -> Result<Assignment> {
        let base = Assignment::cluster_major(machine, qubits)?;
        match self {
            InitialLayout::ClusterMajor => Ok(base),
            InitialLayout::Shuffled(seed) => {
                let mut labels = base.as_slice().to_vec();
                labels.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
                Assignment::from_clusters(machine, qubits, labels)
            }
        }
    }
}

impl Default for InitialLayout {
    fn default() -> Self {
        InitialLayout::Shuffled(Self::DEFAULT_SEED)
    }
}

impl fmt::Display for InitialLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialLayout::ClusterMajor => f.write_str("cluster-major"),
            InitialLayout::Shuffled(seed) => write!(f, "shuffled:{seed}"),
        }
    }
}

/// Everything besides the circuit and machine that shapes a path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MapOptions {
    pub algorithm: Algorithm,
    pub lookahead: LookaheadSpec,
    pub layout: InitialLayout,
    pub exec: Exec,
}

impl Default for MapOptions {
    /// FGP with relaxed OEE and exponential lookahead, scale 1.
    fn default() -> Self {
        MapOptions {
            algorithm: Algorithm::FgpRoee,
            lookahead: LookaheadSpec::new(LookaheadKind::Exponential, 1.0).expect("positive scale"),
            layout: InitialLayout::default(),
            exec: Exec::default(),
        }
    }
}

impl MapOptions {
    pub fn new(algorithm: Algorithm) -> Self {
        MapOptions {
            algorithm,
            ..Self::default()
        }
    }

    pub fn with_lookahead(mut self, lookahead: LookaheadSpec) -> Self {
        self.lookahead = lookahead;
        self
    }

    pub fn with_layout(mut self, layout: InitialLayout) -> Self {
        self.layout = layout;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }
}

/// One valid assignment per slice and the moves between consecutive ones.
#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    pub algorithm: Algorithm,
    pub machine: Machine,
    pub assignments: Vec<Assignment>,
    /// `transitions[t - 1]` takes assignment `t - 1` to assignment `t`.
    pub transitions: Vec<MoveSet>,
    /// Partitioner exchanges performed while building the path.
    pub exchanges: usize,
}

impl Path {
    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// Total non-local communication operations.
    pub fn total_cost(&self) -> usize {
        self.transitions.iter().map(|m| m.cost).sum()
    }

    /// Sum over transitions of the longest sequential hop chain.
    pub fn total_rounds(&self) -> usize {
        self.transitions.iter().map(MoveSet::rounds).sum()
    }

    /// First slice index whose assignment leaves an interacting pair split.
    pub fn first_invalid(&self, circuit: &Circuit) -> Option<usize> {
        let index = SliceIndex::new(circuit);
        (0..index.depth().min(self.len()))
            .find(|&t| {
                index
                    .pairs(t)
                    .iter()
                    .any(|&(a, b)| !self.assignments[t].co_located(a, b))
            })
            .or_else(|| (self.len() != index.depth()).then_some(self.len().min(index.depth())))
    }
}

fn check_feasible(index: &SliceIndex, machine: &Machine, width: usize) -> Result<()> {
    machine.check_width(width)?;
    let limit = machine.pair_limit();
    for t in 0..index.depth() {
        let pairs = index.pairs(t).len();
        if pairs > limit {
            return Err(Error::Infeasible {
                slice: t,
                pairs,
                limit,
            });
        }
    }
    Ok(())
}

/// Global partition of the total interaction graph, starting from `layout`.
pub fn static_seed(
    circuit: &Circuit,
    machine: &Machine,
    layout: InitialLayout,
) -> Result<Assignment> {
    let seed = layout.assignment(machine, circuit.width())?;
    oee(&total_interaction_graph(circuit), &seed)
}

/// Appends `raw` as the next assignment, keeping idle holders where the
/// realized swaps leave them.
fn push_next(path: &mut Path, raw: &Assignment) -> Result<()> {
    let prev = path
        .assignments
        .last()
        .expect("path has a first assignment");
    let moves = comm_cost(prev, raw)?;
    let next = moves.apply(prev);
    debug_assert!(next.same_qubit_placement(raw));
    path.assignments.push(next);
    path.transitions.push(moves);
    Ok(())
}

/// Owner-computes baseline: every slice's assignment is the static partition
/// minimally repaired for that slice.
pub fn static_path(circuit: &Circuit, machine: &Machine, layout: InitialLayout) -> Result<Path> {
    let index = SliceIndex::new(circuit);
    check_feasible(&index, machine, circuit.width())?;
    let s = static_seed(circuit, machine, layout)?;
    let mut path = Path {
        algorithm: Algorithm::StaticOee,
        machine: *machine,
        assignments: Vec::with_capacity(index.depth()),
        transitions: Vec::new(),
        exchanges: 0,
    };
    for t in 0..index.depth() {
        let (raw, moves) = repair_moves(&s, index.pairs(t))?;
        path.exchanges += moves.len();
        if t == 0 {
            path.assignments.push(raw);
        } else {
            push_next(&mut path, &raw)?;
        }
    }
    Ok(path)
}

/// Fine-grained partitioning with relaxed OEE and default options.
pub fn fgp_path(circuit: &Circuit, machine: &Machine, lookahead: &LookaheadSpec) -> Result<Path> {
    fgp_path_with(
        circuit,
        machine,
        &MapOptions::default().with_lookahead(*lookahead),
    )
}

/// Fine-grained partitioning: slice 0 refines the static partition, every
/// later slice refines the previous assignment, each against its lookahead
/// graph. `FgpOee` runs full OEE and repairs if the result is still invalid.
pub fn fgp_path_with(circuit: &Circuit, machine: &Machine, opts: &MapOptions) -> Result<Path> {
    let algorithm = opts.algorithm;
    if algorithm == Algorithm::StaticOee {
        return static_path(circuit, machine, opts.layout);
    }
    let index = SliceIndex::new(circuit);
    check_feasible(&index, machine, circuit.width())?;
    let mut prev = static_seed(circuit, machine, opts.layout)?;
    let mut path = Path {
        algorithm,
        machine: *machine,
        assignments: Vec::with_capacity(index.depth()),
        transitions: Vec::new(),
        exchanges: 0,
    };
    let depth = index.depth();
    for start in (0..depth).step_by(CHUNK) {
        let len = CHUNK.min(depth - start);
        let graphs: Vec<InteractionGraph> = opts.exec.map_range(len, |i| {
            index
                .lookahead_graph(start + i, &opts.lookahead)
                .expect("slice in range")
        });
        for (i, g) in graphs.iter().enumerate() {
            let t = start + i;
            let raw = refine(g, &prev, index.pairs(t), algorithm, &mut path.exchanges)?;
            if t == 0 {
                path.assignments.push(raw);
            } else {
                push_next(&mut path, &raw)?;
            }
            prev = path.assignments.last().unwrap().clone();
        }
    }
    Ok(path)
}

fn refine(
    graph: &InteractionGraph,
    seed: &Assignment,
    pairs: &[(usize, usize)],
    algorithm: Algorithm,
    exchanges: &mut usize,
) -> Result<Assignment> {
    match algorithm {
        Algorithm::FgpRoee => {
            let (a, log) = roee_logged(graph, seed)?;
            *exchanges += log.len();
            Ok(a)
        }
        _ => {
            let (a, log) = oee_logged(graph, seed)?;
            *exchanges += log.len();
            if required_satisfied(&a, graph) {
                return Ok(a);
            }
            let (fixed, moves) = repair_moves(&a, pairs)?;
            *exchanges += moves.len();
            Ok(fixed)
        }
    }
}

/// Path for any algorithm; the lookahead is ignored by the static baseline.
pub fn build_path(circuit: &Circuit, machine: &Machine, opts: &MapOptions) -> Result<Path> {
    fgp_path_with(circuit, machine, opts)
}
