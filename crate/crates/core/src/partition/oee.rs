//! Overall Extreme Exchange and its relaxed variant.
//!
//! Both run KL-style passes over all cluster pairs at once: each step picks the
//! best unlocked cross-cluster exchange (gain first, then smallest holder ids),
//! applies it tentatively and locks both holders. OEE keeps the prefix with the
//! largest cumulative gain and repeats until a pass gains nothing. rOEE runs
//! the same passes but stops as soon as all required edges are internal.

use super::repair::repair_moves;
use super::Assignment;
use crate::error::{Error, Result};
use crate::graph::{InteractionGraph, Weight};

const MAX_PASSES: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exchange {
    pub a: usize,
    pub b: usize,
    /// Cut reduction measured when the exchange was made.
    pub gain: Weight,
}

/// Realized exchanges in order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExchangeLog {
    pub entries: Vec<Exchange>,
}

impl ExchangeLog {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_gain(&self) -> Weight {
        self.entries.iter().map(|e| e.gain).sum()
    }

    pub fn prefix_gains(&self) -> Vec<Weight> {
        self.entries
            .iter()
            .scan(Weight::ZERO, |acc, e| {
                *acc += e.gain;
                Some(*acc)
            })
            .collect()
    }

    /// One `a b required finite` line per exchange.
    pub fn trace(&self) -> String {
        self.entries
            .iter()
            .map(|e| format!("{} {} {} {}\n", e.a, e.b, e.gain.required, e.gain.finite))
            .collect()
    }
}

/// Incremental gain bookkeeping: `conn[v][c]` is the weight from vertex `v`
/// into cluster `c`.
struct State {
    k: usize,
    n: usize,
    qubits: usize,
    cluster: Vec<usize>,
    adj: Vec<Vec<(usize, Weight)>>,
    dense: Vec<Weight>,
    conn: Vec<Weight>,
    cut: Weight,
}

impl State {
    fn new(graph: &InteractionGraph, seed: &Assignment) -> Result<Self> {
        let n = graph.vertex_count();
        if n > seed.holders() {
            return Err(Error::MissingHolder(seed.holders()));
        }
        let k = seed.clusters();
        let mut adj = vec![Vec::new(); n];
        let mut dense = vec![Weight::ZERO; n * n];
        let mut conn = vec![Weight::ZERO; n * k];
        let mut cut = Weight::ZERO;
        for ((a, b), w) in graph.edges() {
            adj[a].push((b, w));
            adj[b].push((a, w));
            dense[a * n + b] = w;
            dense[b * n + a] = w;
            conn[a * k + seed.cluster(b)] += w;
            conn[b * k + seed.cluster(a)] += w;
            if !seed.co_located(a, b) {
                cut += w;
            }
        }
        Ok(State {
            k,
            n,
            qubits: seed.qubits(),
            cluster: seed.as_slice().to_vec(),
            adj,
            dense,
            conn,
            cut,
        })
    }

    fn gain(&self, a: usize, b: usize) -> Weight {
        let (ca, cb) = (self.cluster[a], self.cluster[b]);
        let (k, n) = (self.k, self.n);
        let mut g = Weight::ZERO;
        if a < n {
            g += self.conn[a * k + cb] - self.conn[a * k + ca];
        }
        if b < n {
            g += self.conn[b * k + ca] - self.conn[b * k + cb];
            if a < n {
                g -= self.dense[a * n + b] * 2;
            }
        }
        g
    }

    fn exchange(&mut self, a: usize, b: usize) -> Weight {
        let g = self.gain(a, b);
        let (ca, cb) = (self.cluster[a], self.cluster[b]);
        let k = self.k;
        for (v, from, to) in [(a, ca, cb), (b, cb, ca)] {
            if v < self.n {
                for &(u, w) in &self.adj[v] {
                    self.conn[u * k + from] -= w;
                    self.conn[u * k + to] += w;
                }
            }
        }
        self.cluster.swap(a, b);
        self.cut -= g;
        g
    }

    /// Best unlocked cross-cluster pair. Idle holders are interchangeable, so
    /// only the lowest unlocked idle holder of each cluster is considered.
    fn best_pair(&self, locked: &[bool]) -> Option<(usize, usize)> {
        let mut cands: Vec<Vec<usize>> = vec![Vec::new(); self.k];
        let mut idle_seen = vec![false; self.k];
        for (h, &c) in self.cluster.iter().enumerate() {
            if locked[h] {
                continue;
            }
            if h >= self.qubits {
                if idle_seen[c] {
                    continue;
                }
                idle_seen[c] = true;
            }
            cands[c].push(h);
        }
        let mut best: Option<(Weight, usize, usize)> = None;
        for ca in 0..self.k {
            for cb in ca + 1..self.k {
                for &a in &cands[ca] {
                    for &b in &cands[cb] {
                        let g = self.gain(a, b);
                        let ids = (a.min(b), a.max(b));
                        let better = match &best {
                            None => true,
                            Some((bg, x, y)) => {
                                g.lex_cmp(bg).then_with(|| (*x, *y).cmp(&ids)).is_gt()
                            }
                        };
                        if better {
                            best = Some((g, ids.0, ids.1));
                        }
                    }
                }
            }
        }
        best.map(|(_, a, b)| (a, b))
    }

    fn into_assignment(self, template: &Assignment) -> Assignment {
        Assignment {
            clusters: template.clusters,
            capacity: template.capacity,
            qubits: template.qubits,
            cluster_of: self.cluster,
        }
    }
}

pub fn oee(graph: &InteractionGraph, seed: &Assignment) -> Result<Assignment> {
    oee_logged(graph, seed).map(|(a, _)| a)
}

/// OEE that also returns the realized exchanges, in order.
pub fn oee_logged(
    graph: &InteractionGraph,
    seed: &Assignment,
) -> Result<(Assignment, ExchangeLog)> {
    let mut st = State::new(graph, seed)?;
    let mut log = ExchangeLog::default();
    for _ in 0..MAX_PASSES {
        let mut locked = vec![false; st.cluster.len()];
        let mut tentative = Vec::new();
        let (mut cum, mut best, mut best_len) = (Weight::ZERO, Weight::ZERO, 0);
        while let Some((a, b)) = st.best_pair(&locked) {
            let gain = st.exchange(a, b);
            locked[a] = true;
            locked[b] = true;
            tentative.push(Exchange { a, b, gain });
            cum += gain;
            if cum.exceeds(&best) {
                best = cum;
                best_len = tentative.len();
            }
        }
        for e in tentative[best_len..].iter().rev() {
            st.exchange(e.a, e.b);
        }
        if best_len == 0 {
            break;
        }
        log.entries.extend_from_slice(&tentative[..best_len]);
    }
    Ok((st.into_assignment(seed), log))
}

pub fn roee(graph: &InteractionGraph, seed: &Assignment) -> Result<Assignment> {
    roee_logged(graph, seed).map(|(a, _)| a)
}

/// rOEE with its exchange log. Passes run as in OEE but return the moment
/// every required edge is internal. A pass that ends invalid keeps its best
/// prefix; if that prefix is empty, a repair sweep finishes the job and its
/// exchanges are logged too.
pub fn roee_logged(
    graph: &InteractionGraph,
    seed: &Assignment,
) -> Result<(Assignment, ExchangeLog)> {
    let mut st = State::new(graph, seed)?;
    let mut log = ExchangeLog::default();
    if st.cut.required == 0 {
        return Ok((seed.clone(), log));
    }
    for _ in 0..MAX_PASSES {
        let mut locked = vec![false; st.cluster.len()];
        let mut tentative = Vec::new();
        let (mut cum, mut best, mut best_len) = (Weight::ZERO, Weight::ZERO, 0);
        while let Some((a, b)) = st.best_pair(&locked) {
            let gain = st.exchange(a, b);
            locked[a] = true;
            locked[b] = true;
            tentative.push(Exchange { a, b, gain });
            if st.cut.required == 0 {
                log.entries.extend(tentative);
                return Ok((st.into_assignment(seed), log));
            }
            cum += gain;
            if cum.exceeds(&best) {
                best = cum;
                best_len = tentative.len();
            }
        }
        for e in tentative[best_len..].iter().rev() {
            st.exchange(e.a, e.b);
        }
        if best_len == 0 {
            break;
        }
        log.entries.extend_from_slice(&tentative[..best_len]);
    }
    let current = Assignment {
        cluster_of: st.cluster.clone(),
        ..seed.clone()
    };
    let pairs: Vec<_> = graph.required_edges().collect();
    let (_, moves) = repair_moves(&current, &pairs)?;
    for (a, b) in moves {
        let gain = st.exchange(a, b);
        log.entries.push(Exchange { a, b, gain });
    }
    Ok((st.into_assignment(seed), log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{cut_weight, required_satisfied, Machine};

    fn machine(k: usize, p: usize) -> Machine {
        Machine::new(k, p, 1.0).unwrap()
    }

    #[test]
    fn split_pairs_are_rejoined() {
        // {0,2} | {1,3} with heavy 0-1 and 2-3 edges: one exchange fixes both.
        let m = machine(2, 2);
        let seed = Assignment::from_clusters(&m, 4, vec![0, 1, 0, 1]).unwrap();
        let mut g = InteractionGraph::new(4);
        g.add_edge(0, 1, Weight::finite(5.0));
        g.add_edge(2, 3, Weight::finite(5.0));
        let (out, log) = oee_logged(&g, &seed).unwrap();
        assert_eq!(cut_weight(&g, &out).unwrap(), Weight::ZERO);
        assert_eq!(log.total_gain(), Weight::finite(10.0));
        assert!(out.capacity_holds());
    }

    #[test]
    fn local_optimum_is_a_fixed_point() {
        let m = machine(2, 2);
        let seed = Assignment::cluster_major(&m, 4).unwrap();
        let mut g = InteractionGraph::new(4);
        g.add_edge(0, 1, Weight::finite(1.0));
        g.add_edge(2, 3, Weight::finite(1.0));
        let (out, log) = oee_logged(&g, &seed).unwrap();
        assert_eq!(out, seed);
        assert!(log.is_empty());
    }

    #[test]
    fn roee_valid_seed_is_untouched() {
        let m = machine(2, 2);
        let seed = Assignment::cluster_major(&m, 4).unwrap();
        let mut g = InteractionGraph::new(4);
        g.add_edge(0, 1, Weight::required(1));
        g.add_edge(1, 2, Weight::finite(3.0));
        let (out, log) = roee_logged(&g, &seed).unwrap();
        assert_eq!(out, seed);
        assert!(log.is_empty());
    }

    #[test]
    fn roee_ties_break_on_smallest_ids() {
        // Qubits 0,1 in cluster 0 and qubit 2 with one idle holder (3) in cluster 1.
        // Both (0,2) and (1,3) join the pair; the smaller ids win.
        let m = machine(2, 2);
        let seed = Assignment::cluster_major(&m, 3).unwrap();
        let mut g = InteractionGraph::new(3);
        g.add_edge(1, 2, Weight::required(1));
        let (out, log) = roee_logged(&g, &seed).unwrap();
        assert!(required_satisfied(&out, &g));
        assert_eq!(log.len(), 1);
        assert_eq!((log.entries[0].a, log.entries[0].b), (0, 2));
        assert_eq!(log.entries[0].gain, Weight::required(1));
    }

    #[test]
    fn trace_format() {
        let log = ExchangeLog {
            entries: vec![Exchange {
                a: 1,
                b: 3,
                gain: Weight::new(1, 0.5),
            }],
        };
        assert_eq!(log.trace(), "1 3 1 0.5\n");
        assert_eq!(log.prefix_gains(), vec![Weight::new(1, 0.5)]);
    }
}
