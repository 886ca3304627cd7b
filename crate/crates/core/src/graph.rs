//! Interaction graphs over circuit qubits.
//!
//! Edge weights are two-level: a `required` count for pairs that must be
//! co-located in the current slice and a `finite` weight for everything else
//! (interaction counts, lookahead). Comparison is lexicographic, so one
//! required unit dominates any finite amount.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::exec::Exec;

/// Finite components closer than this compare as equal in gain decisions.
pub const FINITE_EPS: f64 = 1e-9;

/// Lookahead terms below this are dropped.
pub const LOOKAHEAD_CUTOFF: f64 = 1e-12;

/// Two-level weight; also used for signed gains.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Weight {
    pub required: i64,
    pub finite: f64,
}

impl Weight {
    pub const ZERO: Weight = Weight {
        required: 0,
        finite: 0.0,
    };

    pub const fn new(required: i64, finite: f64) -> Self {
        Weight { required, finite }
    }

    pub const fn finite(finite: f64) -> Self {
        Weight {
            required: 0,
            finite,
        }
    }

    pub const fn required(required: i64) -> Self {
        Weight {
            required,
            finite: 0.0,
        }
    }

    /// Exact lexicographic order (`total_cmp` on the finite part).
    pub fn lex_cmp(&self, other: &Weight) -> Ordering {
        self.required
            .cmp(&other.required)
            .then(self.finite.total_cmp(&other.finite))
    }

    /// Lexicographic "greater than" with [`FINITE_EPS`] slack on the finite part.
    pub fn exceeds(&self, other: &Weight) -> bool {
        match self.required.cmp(&other.required) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => self.finite > other.finite + FINITE_EPS,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.exceeds(&Weight::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.required == 0 && self.finite == 0.0
    }

    pub fn approx_eq(&self, other: &Weight, tol: f64) -> bool {
        self.required == other.required && (self.finite - other.finite).abs() <= tol
    }
}

impl PartialOrd for Weight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.lex_cmp(other))
    }
}

impl Add for Weight {
    type Output = Weight;
    fn add(self, o: Weight) -> Weight {
        Weight::new(self.required + o.required, self.finite + o.finite)
    }
}

impl Sub for Weight {
    type Output = Weight;
    fn sub(self, o: Weight) -> Weight {
        Weight::new(self.required - o.required, self.finite - o.finite)
    }
}

impl Neg for Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        Weight::new(-self.required, -self.finite)
    }
}

impl Mul<i64> for Weight {
    type Output = Weight;
    fn mul(self, k: i64) -> Weight {
        Weight::new(self.required * k, self.finite * k as f64)
    }
}

impl AddAssign for Weight {
    fn add_assign(&mut self, o: Weight) {
        self.required += o.required;
        self.finite += o.finite;
    }
}

impl SubAssign for Weight {
    fn sub_assign(&mut self, o: Weight) {
        self.required -= o.required;
        self.finite -= o.finite;
    }
}

impl std::iter::Sum for Weight {
    fn sum<I: Iterator<Item = Weight>>(iter: I) -> Weight {
        iter.fold(Weight::ZERO, Add::add)
    }
}

/// Undirected weighted graph over vertices `0..n`, no self-loops.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InteractionGraph {
    n: usize,
    edges: BTreeMap<(usize, usize), Weight>,
}

impl InteractionGraph {
    pub fn new(n: usize) -> Self {
        InteractionGraph {
            n,
            edges: BTreeMap::new(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Adds `w` to edge `{a, b}`.
    pub fn add_edge(&mut self, a: usize, b: usize, w: Weight) {
        assert!(a != b, "self-loop on vertex {a}");
        assert!(
            a < self.n && b < self.n,
            "edge ({a}, {b}) outside {} vertices",
            self.n
        );
        *self.edges.entry((a.min(b), a.max(b))).or_default() += w;
    }

    pub fn weight(&self, a: usize, b: usize) -> Weight {
        self.edges
            .get(&(a.min(b), a.max(b)))
            .copied()
            .unwrap_or_default()
    }

    /// Edges as `((a, b), w)` with `a < b`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), Weight)> + '_ {
        self.edges.iter().map(|(&k, &w)| (k, w))
    }

    /// Edges carrying a non-zero `required` component.
    pub fn required_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges
            .iter()
            .filter(|(_, w)| w.required > 0)
            .map(|(&k, _)| k)
    }

    /// Componentwise sum with another graph on the same vertex set.
    pub fn merge(&mut self, other: &InteractionGraph) {
        assert_eq!(self.n, other.n, "merging graphs of different order");
        for (&(a, b), &w) in &other.edges {
            *self.edges.entry((a, b)).or_default() += w;
        }
    }

    /// Debug dump, one `a b required finite` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (&(a, b), w) in &self.edges {
            let _ = writeln!(out, "{a} {b} {} {}", w.required, w.finite);
        }
        out
    }
}

/// Finite weight of `{a, b}` is the number of two-qubit gates on that pair.
pub fn total_interaction_graph(circuit: &Circuit) -> InteractionGraph {
    let mut g = InteractionGraph::new(circuit.width());
    for (a, b) in circuit.slices().iter().flat_map(|s| s.interactions()) {
        g.add_edge(a, b, Weight::finite(1.0));
    }
    g
}

/// Unit finite edges for the pairs interacting in slice `t`.
pub fn slice_graph(circuit: &Circuit, t: usize) -> Result<InteractionGraph> {
    let slice = circuit.slices().get(t).ok_or(Error::SliceOutOfRange {
        index: t,
        depth: circuit.depth(),
    })?;
    let mut g = InteractionGraph::new(circuit.width());
    for (a, b) in slice.interactions() {
        g.add_edge(a, b, Weight::finite(1.0));
    }
    Ok(g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LookaheadKind {
    Constant,
    Exponential,
    Gaussian,
}

impl LookaheadKind {
    pub fn name(self) -> &'static str {
        match self {
            LookaheadKind::Constant => "const",
            LookaheadKind::Exponential => "expon",
            LookaheadKind::Gaussian => "gauss",
        }
    }
}

impl std::str::FromStr for LookaheadKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "const" | "constant" => Ok(LookaheadKind::Constant),
            "expon" | "exp" | "exponential" => Ok(LookaheadKind::Exponential),
            "gauss" | "gaussian" => Ok(LookaheadKind::Gaussian),
            _ => Err(Error::UnknownLookahead(s.to_string())),
        }
    }
}

/// Decay function `D` with scale `sigma`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LookaheadSpec {
    kind: LookaheadKind,
    sigma: f64,
}

impl LookaheadSpec {
    /// `sigma` must be positive for exponential and Gaussian decay; the
    /// constant window accepts 0 (no lookahead) and `f64::INFINITY`.
    pub fn new(kind: LookaheadKind, sigma: f64) -> Result<Self> {
        let ok = match kind {
            LookaheadKind::Constant => sigma >= 0.0,
            LookaheadKind::Exponential | LookaheadKind::Gaussian => sigma > 0.0,
        };
        if !ok {
            return Err(Error::Sigma {
                kind: kind.name(),
                sigma,
            });
        }
        Ok(LookaheadSpec { kind, sigma })
    }

    pub fn none() -> Self {
        LookaheadSpec {
            kind: LookaheadKind::Constant,
            sigma: 0.0,
        }
    }

    pub fn kind(&self) -> LookaheadKind {
        self.kind
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `D(n)` for a slice distance `n >= 1`.
    pub fn value(&self, n: usize) -> f64 {
        let n = n as f64;
        match self.kind {
            LookaheadKind::Constant => {
                if n <= self.sigma {
                    1.0
                } else {
                    0.0
                }
            }
            LookaheadKind::Exponential => (-n / self.sigma).exp2(),
            LookaheadKind::Gaussian => (-(n * n) / (self.sigma * self.sigma)).exp(),
        }
    }
}

pub fn lookahead_value(spec: &LookaheadSpec, n: usize) -> f64 {
    spec.value(n)
}

/// Per-slice interaction lists, built once per circuit and shared by all
/// lookahead graphs.
#[derive(Clone, Debug)]
pub struct SliceIndex {
    width: usize,
    pairs: Vec<Vec<(usize, usize)>>,
}

impl SliceIndex {
    pub fn new(circuit: &Circuit) -> Self {
        SliceIndex {
            width: circuit.width(),
            pairs: circuit
                .slices()
                .iter()
                .map(|s| s.interactions().collect())
                .collect(),
        }
    }

    pub fn depth(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self, t: usize) -> &[(usize, usize)] {
        &self.pairs[t]
    }

    /// Current-slice pairs get one required unit; every pair gains
    /// `sum over later slices m of I(m, pair) * D(m - t)`.
    pub fn lookahead_graph(&self, t: usize, spec: &LookaheadSpec) -> Result<InteractionGraph> {
        if t >= self.depth() {
            return Err(Error::SliceOutOfRange {
                index: t,
                depth: self.depth(),
            });
        }
        let mut g = InteractionGraph::new(self.width);
        for &(a, b) in &self.pairs[t] {
            g.add_edge(a, b, Weight::required(1));
        }
        for m in t + 1..self.depth() {
            let d = spec.value(m - t);
            if d < LOOKAHEAD_CUTOFF {
                break;
            }
            for &(a, b) in &self.pairs[m] {
                g.add_edge(a, b, Weight::finite(d));
            }
        }
        Ok(g)
    }

    /// Lookahead graphs for every slice; slices are independent.
    pub fn lookahead_graphs(&self, spec: &LookaheadSpec, exec: Exec) -> Vec<InteractionGraph> {
        exec.map_range(self.depth(), |t| {
            self.lookahead_graph(t, spec).expect("t < depth")
        })
    }
}

pub fn lookahead_graph(
    circuit: &Circuit,
    t: usize,
    spec: &LookaheadSpec,
) -> Result<InteractionGraph> {
    SliceIndex::new(circuit).lookahead_graph(t, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{asap_schedule, Circuit, Gate};

    fn cx(a: usize, b: usize) -> Gate {
        Gate::pair("cx", a, b)
    }

    #[test]
    fn weight_order_is_lexicographic() {
        assert!(Weight::new(1, -100.0) > Weight::new(0, 1e9));
        assert!(Weight::new(0, 2.0) > Weight::new(0, 1.0));
        assert!(Weight::new(0, 1e-12).lex_cmp(&Weight::ZERO).is_gt());
        assert!(!Weight::new(0, 1e-12).is_positive());
        assert!(Weight::new(1, -5.0).is_positive());
        assert_eq!(
            Weight::new(1, 2.0) * 2 - Weight::new(1, 1.0),
            Weight::new(1, 3.0)
        );
    }

    #[test]
    fn repeated_pair_counts() {
        let c = asap_schedule([cx(0, 1), cx(1, 0)], 2).unwrap();
        let g = total_interaction_graph(&c);
        assert_eq!(g.weight(0, 1), Weight::finite(2.0));
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn empty_circuit_graphs() {
        let c = Circuit::empty(3);
        assert_eq!(total_interaction_graph(&c).edge_count(), 0);
        assert!(matches!(
            slice_graph(&c, 0),
            Err(Error::SliceOutOfRange { .. })
        ));
    }

    #[test]
    fn slice_graph_edges() {
        let c = asap_schedule([cx(0, 1), cx(2, 3), Gate::single("h", 0)], 4).unwrap();
        let g = slice_graph(&c, 0).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.weight(2, 3), Weight::finite(1.0));
        let h = slice_graph(&c, 1).unwrap();
        assert_eq!(h.edge_count(), 0);
    }

    #[test]
    fn lookahead_values() {
        let e = LookaheadSpec::new(LookaheadKind::Exponential, 1.0).unwrap();
        assert_eq!(e.value(2), 0.25);
        let g = LookaheadSpec::new(LookaheadKind::Gaussian, 2.0).unwrap();
        assert!((g.value(2) - (-1.0f64).exp()).abs() < 1e-15);
        let c0 = LookaheadSpec::new(LookaheadKind::Constant, 0.0).unwrap();
        assert!((1..50).all(|n| c0.value(n) == 0.0));
        let c3 = LookaheadSpec::new(LookaheadKind::Constant, 3.0).unwrap();
        assert_eq!((c3.value(3), c3.value(4)), (1.0, 0.0));
        assert!(LookaheadSpec::new(LookaheadKind::Exponential, 0.0).is_err());
        assert!(LookaheadSpec::new(LookaheadKind::Gaussian, -1.0).is_err());
        assert!(LookaheadSpec::new(LookaheadKind::Constant, -1.0).is_err());
    }

    #[test]
    fn lookahead_sum_hand_evaluated() {
        // q0,q1 interact in slices 3 and 5; other slices keep q2,q3 busy.
        let slices = vec![
            vec![cx(2, 3)],
            vec![cx(2, 3)],
            vec![cx(2, 3)],
            vec![cx(0, 1)],
            vec![cx(2, 3)],
            vec![cx(0, 1)],
        ];
        let c = Circuit::from_slices(4, slices).unwrap();
        let spec = LookaheadSpec::new(LookaheadKind::Exponential, 1.0).unwrap();
        let g = lookahead_graph(&c, 2, &spec).unwrap();
        assert_eq!(g.weight(0, 1), Weight::finite(0.625));
        assert_eq!(g.weight(2, 3), Weight::new(1, 0.25));
    }

    #[test]
    fn last_slice_has_only_required_edges() {
        let c = asap_schedule([cx(0, 1), cx(1, 2), cx(0, 1)], 3).unwrap();
        let spec = LookaheadSpec::new(LookaheadKind::Constant, f64::INFINITY).unwrap();
        let last = lookahead_graph(&c, c.depth() - 1, &spec).unwrap();
        assert_eq!(
            last.edges().collect::<Vec<_>>(),
            vec![((0, 1), Weight::required(1))]
        );
        // Unbounded constant window counts future interactions.
        let first = lookahead_graph(&c, 0, &spec).unwrap();
        assert_eq!(first.weight(0, 1), Weight::new(1, 1.0));
        assert_eq!(first.weight(1, 2), Weight::finite(1.0));
    }

    #[test]
    fn edge_list_dump() {
        let mut g = InteractionGraph::new(3);
        g.add_edge(2, 0, Weight::new(1, 0.5));
        assert_eq!(g.to_edge_list(), "0 2 1 0.5\n");
    }
}
