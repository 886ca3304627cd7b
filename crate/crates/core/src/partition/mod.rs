//! Capacity-bounded k-way partitioning of interaction graphs.
//!
//! Every cluster always holds exactly `p` slot-holders: the circuit qubits
//! `0..n` plus idle padding holders `n..k*p`. Because occupancy never changes,
//! every move is a pairwise exchange, and a qubit moving onto a free slot is
//! simply an exchange with an idle holder.

mod oee;
mod repair;

pub use oee::{oee, oee_logged, roee, roee_logged, Exchange, ExchangeLog};
pub use repair::{repair, repair_moves};

use crate::error::{Error, Result};
use crate::graph::{InteractionGraph, Weight};

/// `k` clusters of `p` fully connected slots.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Machine {
    clusters: usize,
    capacity: usize,
    comm_multiplier: f64,
}

impl Machine {
    pub fn new(clusters: usize, capacity: usize, comm_multiplier: f64) -> Result<Self> {
        if clusters < 2 {
            return Err(Error::Machine(format!(
                "need at least 2 clusters, got {clusters}"
            )));
        }
        if capacity < 1 {
            return Err(Error::Machine("cluster capacity must be at least 1".into()));
        }
        if comm_multiplier.is_nan() || comm_multiplier < 1.0 {
            return Err(Error::Machine(format!(
                "communication multiplier {comm_multiplier} < 1"
            )));
        }
        Ok(Machine {
            clusters,
            capacity,
            comm_multiplier,
        })
    }

    /// Ten clusters of ten qubits.
    pub fn reference() -> Self {
        Machine {
            clusters: 10,
            capacity: 10,
            comm_multiplier: 1.0,
        }
    }

    pub fn clusters(&self) -> usize {
        self.clusters
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn comm_multiplier(&self) -> f64 {
        self.comm_multiplier
    }

    pub fn with_multiplier(self, comm_multiplier: f64) -> Result<Self> {
        Machine::new(self.clusters, self.capacity, comm_multiplier)
    }

    pub fn slots(&self) -> usize {
        self.clusters * self.capacity
    }

    pub fn cluster_of_slot(&self, slot: usize) -> usize {
        slot / self.capacity
    }

    pub fn check_width(&self, width: usize) -> Result<()> {
        if width > self.slots() {
            return Err(Error::Capacity {
                width,
                slots: self.slots(),
            });
        }
        Ok(())
    }

    /// Most disjoint interacting pairs any valid assignment can host.
    pub fn pair_limit(&self) -> usize {
        self.clusters * (self.capacity / 2)
    }
}

/// Placement of every slot-holder into a cluster.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Assignment {
    pub(crate) clusters: usize,
    pub(crate) capacity: usize,
    pub(crate) qubits: usize,
    pub(crate) cluster_of: Vec<usize>,
}

impl Assignment {
    /// Holder `i` goes to cluster `i / p`; idle holders fill the tail.
    pub fn cluster_major(machine: &Machine, qubits: usize) -> Result<Self> {
        machine.check_width(qubits)?;
        let p = machine.capacity;
        Ok(Assignment {
            clusters: machine.clusters,
            capacity: p,
            qubits,
            cluster_of: (0..machine.slots()).map(|h| h / p).collect(),
        })
    }

    /// Validates that every cluster receives exactly `p` holders.
    pub fn from_clusters(machine: &Machine, qubits: usize, cluster_of: Vec<usize>) -> Result<Self> {
        machine.check_width(qubits)?;
        if cluster_of.len() != machine.slots() {
            return Err(Error::Machine(format!(
                "assignment has {} holders, machine has {} slots",
                cluster_of.len(),
                machine.slots()
            )));
        }
        let mut load = vec![0usize; machine.clusters];
        for &c in &cluster_of {
            if c >= machine.clusters {
                return Err(Error::Machine(format!("cluster {c} out of range")));
            }
            load[c] += 1;
        }
        if let Some(c) = load.iter().position(|&l| l != machine.capacity) {
            return Err(Error::Machine(format!(
                "cluster {c} holds {} holders, capacity {}",
                load[c], machine.capacity
            )));
        }
        Ok(Assignment {
            clusters: machine.clusters,
            capacity: machine.capacity,
            qubits,
            cluster_of,
        })
    }

    pub fn clusters(&self) -> usize {
        self.clusters
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Number of circuit qubits (holders `0..qubits`).
    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn holders(&self) -> usize {
        self.cluster_of.len()
    }

    pub fn is_idle(&self, holder: usize) -> bool {
        holder >= self.qubits
    }

    pub fn cluster(&self, holder: usize) -> usize {
        self.cluster_of[holder]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.cluster_of
    }

    /// Holders of cluster `c` in ascending order.
    pub fn members(&self, c: usize) -> impl Iterator<Item = usize> + '_ {
        self.cluster_of
            .iter()
            .enumerate()
            .filter(move |(_, &x)| x == c)
            .map(|(h, _)| h)
    }

    /// Swaps the clusters of two holders.
    pub fn exchange(&mut self, a: usize, b: usize) {
        self.cluster_of.swap(a, b);
    }

    pub fn co_located(&self, a: usize, b: usize) -> bool {
        self.cluster_of[a] == self.cluster_of[b]
    }

    /// True when both assignments describe the same holder set on the same machine.
    pub fn compatible(&self, other: &Assignment) -> bool {
        self.clusters == other.clusters
            && self.capacity == other.capacity
            && self.qubits == other.qubits
    }

    /// Capacity invariant: exactly `p` holders per cluster.
    pub fn capacity_holds(&self) -> bool {
        let mut load = vec![0usize; self.clusters];
        for &c in &self.cluster_of {
            load[c] += 1;
        }
        load.iter().all(|&l| l == self.capacity)
    }

    /// Same real-qubit placement, ignoring which idle holder sits where.
    pub fn same_qubit_placement(&self, other: &Assignment) -> bool {
        self.compatible(other) && self.cluster_of[..self.qubits] == other.cluster_of[..other.qubits]
    }
}

fn check_covers(graph: &InteractionGraph, assignment: &Assignment) -> Result<()> {
    if graph.vertex_count() > assignment.holders() {
        return Err(Error::MissingHolder(assignment.holders()));
    }
    Ok(())
}

/// Sum of the weights of edges whose endpoints lie in different clusters.
pub fn cut_weight(graph: &InteractionGraph, assignment: &Assignment) -> Result<Weight> {
    check_covers(graph, assignment)?;
    Ok(graph
        .edges()
        .filter(|&((a, b), _)| !assignment.co_located(a, b))
        .map(|(_, w)| w)
        .sum())
}

/// Cut reduction from exchanging `a` and `b`:
/// `D_a + D_b - 2 w(a, b)`, where `D_v` is the weight from `v` to the other
/// holder's cluster minus the weight to its own.
pub fn exchange_gain(
    graph: &InteractionGraph,
    assignment: &Assignment,
    a: usize,
    b: usize,
) -> Result<Weight> {
    check_covers(graph, assignment)?;
    for h in [a, b] {
        if h >= assignment.holders() {
            return Err(Error::MissingHolder(h));
        }
    }
    let (ca, cb) = (assignment.cluster(a), assignment.cluster(b));
    if ca == cb {
        return Err(Error::SameCluster { a, b, cluster: ca });
    }
    let mut gain = Weight::ZERO;
    for ((u, v), w) in graph.edges() {
        for (x, y) in [(u, v), (v, u)] {
            let (home, away) = if x == a {
                (ca, cb)
            } else if x == b {
                (cb, ca)
            } else {
                continue;
            };
            let c = assignment.cluster(y);
            if c == away {
                gain += w;
            } else if c == home {
                gain -= w;
            }
        }
    }
    Ok(gain - graph.weight(a, b) * 2)
}

/// Every edge of `slice_graph` has both endpoints in one cluster.
pub fn is_valid(assignment: &Assignment, slice_graph: &InteractionGraph) -> bool {
    slice_graph
        .edges()
        .all(|((a, b), _)| assignment.co_located(a, b))
}

/// Every required edge is internal to a cluster.
pub fn required_satisfied(assignment: &Assignment, graph: &InteractionGraph) -> bool {
    graph
        .required_edges()
        .all(|(a, b)| assignment.co_located(a, b))
}
