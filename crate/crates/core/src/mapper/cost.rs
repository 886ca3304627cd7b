//! Non-local communication cost of a transition between two assignments.
//!
//! Real qubits that change cluster form a directed multigraph on clusters.
//! Every cycle of length `L` in it is realized by `L - 1` swaps, every edge
//! left over by one swap with an idle holder, so the cost is
//! `C = r + sum (L - 1) c_L = E - (number of cycles)`. 2-cycles are taken
//! first; the rest is an exact maximum edge-disjoint cycle packing, searched
//! with a node budget and seeded by greedy shortest-first extraction.

use crate::error::{Error, Result};
use crate::partition::Assignment;

const SEARCH_BUDGET: usize = 200_000;

/// Holders rotated along a cycle of clusters: `holders[i]` moves from
/// `clusters[i]` to `clusters[(i + 1) % len]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    pub clusters: Vec<usize>,
    pub holders: Vec<usize>,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.holders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.holders.is_empty()
    }

    /// Swaps, as holder pairs in execution order. Each step exchanges the
    /// holder sitting in the first holder's original slot with the next one.
    pub fn swaps(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.len().saturating_sub(1));
        let mut resident = self.holders[0];
        for &h in &self.holders[1..] {
            out.push((resident, h));
            resident = h;
        }
        out
    }
}

/// A real qubit moving onto an idle holder's slot; the idle holder takes its place.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResidualMove {
    pub holder: usize,
    pub from: usize,
    pub to: usize,
    pub partner: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MoveSet {
    pub cycles: Vec<Cycle>,
    pub residual: Vec<ResidualMove>,
    pub cost: usize,
}

impl MoveSet {
    pub fn is_empty(&self) -> bool {
        self.cost == 0
    }

    /// Longest sequential hop chain: a cycle of length `L` needs `L - 1`
    /// dependent swaps, a residual move one.
    pub fn rounds(&self) -> usize {
        let cyc = self.cycles.iter().map(|c| c.len() - 1).max().unwrap_or(0);
        let res = usize::from(!self.residual.is_empty());
        cyc.max(res)
    }

    /// Every swap, cycles first, as holder pairs.
    pub fn swaps(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = self.cycles.iter().flat_map(Cycle::swaps).collect();
        out.extend(self.residual.iter().map(|m| (m.holder, m.partner)));
        out
    }

    /// The assignment reached by performing every swap on `from`.
    pub fn apply(&self, from: &Assignment) -> Assignment {
        let mut out = from.clone();
        for c in &self.cycles {
            for (i, &h) in c.holders.iter().enumerate() {
                out.cluster_of[h] = c.clusters[(i + 1) % c.len()];
            }
        }
        for m in &self.residual {
            out.cluster_of[m.holder] = m.to;
            out.cluster_of[m.partner] = m.from;
        }
        out
    }
}

/// Minimum set of non-local swaps turning `from` into `to` on the real qubits.
/// Idle holders are interchangeable, so only real qubit placement must match.
pub fn comm_cost(from: &Assignment, to: &Assignment) -> Result<MoveSet> {
    if !from.compatible(to) {
        return Err(Error::Mismatch);
    }
    let k = from.clusters();
    let mut edges: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); k]; k];
    let mut total = 0;
    for h in 0..from.qubits() {
        let (a, b) = (from.cluster(h), to.cluster(h));
        if a != b {
            edges[a][b].push(h);
            total += 1;
        }
    }
    if total == 0 {
        return Ok(MoveSet::default());
    }
    for row in &mut edges {
        for list in row.iter_mut() {
            list.reverse();
        }
    }
    let mut cluster_cycles: Vec<Vec<usize>> = Vec::new();
    let mut cnt = vec![0usize; k * k];
    for i in 0..k {
        for j in 0..k {
            cnt[i * k + j] = edges[i][j].len();
        }
    }
    for i in 0..k {
        for j in i + 1..k {
            let m = cnt[i * k + j].min(cnt[j * k + i]);
            for _ in 0..m {
                cluster_cycles.push(vec![i, j]);
            }
            cnt[i * k + j] -= m;
            cnt[j * k + i] -= m;
        }
    }
    let mut longer = max_cycle_packing(k, &mut cnt);
    longer.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    cluster_cycles.extend(longer);

    let mut cycles = Vec::with_capacity(cluster_cycles.len());
    for cl in cluster_cycles {
        let holders = (0..cl.len())
            .map(|i| {
                edges[cl[i]][cl[(i + 1) % cl.len()]]
                    .pop()
                    .expect("cycle edge")
            })
            .collect();
        cycles.push(Cycle {
            clusters: cl,
            holders,
        });
    }

    let residual = order_residual(from, &mut edges);
    let cost = cycles.iter().map(|c| c.len() - 1).sum::<usize>() + residual.len();
    debug_assert_eq!(cost, total - cycles.len());
    Ok(MoveSet {
        cycles,
        residual,
        cost,
    })
}

/// Residual moves in an order where each destination has an idle holder when
/// its move runs: a move is ready once its destination has no pending
/// departures. Ties go to the smallest holder id.
fn order_residual(from: &Assignment, edges: &mut [Vec<Vec<usize>>]) -> Vec<ResidualMove> {
    let k = from.clusters();
    let mut pending: Vec<(usize, usize, usize)> = Vec::new();
    for (i, row) in edges.iter_mut().enumerate() {
        for (j, list) in row.iter_mut().enumerate() {
            pending.extend(list.drain(..).map(|h| (h, i, j)));
        }
    }
    pending.sort_unstable();
    let mut outgoing = vec![0usize; k];
    for &(_, a, _) in &pending {
        outgoing[a] += 1;
    }
    let mut idle: Vec<Vec<usize>> = vec![Vec::new(); k];
    for h in from.qubits()..from.holders() {
        idle[from.cluster(h)].push(h);
    }
    for list in &mut idle {
        list.sort_unstable_by(|a, b| b.cmp(a));
    }
    let mut out = Vec::with_capacity(pending.len());
    while !pending.is_empty() {
        let pos = pending
            .iter()
            .position(|&(_, _, to)| outgoing[to] == 0)
            .expect("residual moves are acyclic");
        let (holder, a, b) = pending.remove(pos);
        let partner = idle[b].pop().expect("destination has an idle holder");
        idle[a].push(partner);
        idle[a].sort_unstable_by(|x, y| y.cmp(x));
        outgoing[a] -= 1;
        out.push(ResidualMove {
            holder,
            from: a,
            to: b,
            partner,
        });
    }
    out
}

/// Maximum set of edge-disjoint directed cycles (length >= 3) in the
/// multigraph with `cnt[i * k + j]` parallel edges `i -> j`. Consumes the
/// packed edges from `cnt`.
pub(crate) fn max_cycle_packing(k: usize, cnt: &mut [usize]) -> Vec<Vec<usize>> {
    let greedy = greedy_packing(k, &mut cnt.to_vec());
    let mut p = Packer {
        k,
        cnt: cnt.to_vec(),
        budget: SEARCH_BUDGET,
        cur: Vec::new(),
        best: greedy,
    };
    p.search();
    let best = p.best;
    for c in &best {
        for i in 0..c.len() {
            cnt[c[i] * k + c[(i + 1) % c.len()]] -= 1;
        }
    }
    best
}

/// Repeatedly removes the shortest cycle, smallest cluster sequence first.
fn greedy_packing(k: usize, cnt: &mut [usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    'outer: loop {
        for len in 3..=k {
            for s in 0..k {
                let mut path = vec![s];
                if let Some(c) = first_cycle(k, cnt, &mut path, len) {
                    for i in 0..c.len() {
                        cnt[c[i] * k + c[(i + 1) % c.len()]] -= 1;
                    }
                    out.push(c);
                    continue 'outer;
                }
            }
        }
        return out;
    }
}

/// First cycle of exactly `len` vertices extending `path`, with every vertex
/// after the first larger than it, in lexicographic order.
fn first_cycle(k: usize, cnt: &[usize], path: &mut Vec<usize>, len: usize) -> Option<Vec<usize>> {
    let (s, last) = (path[0], *path.last().unwrap());
    if path.len() == len {
        return (cnt[last * k + s] > 0).then(|| path.clone());
    }
    for v in s + 1..k {
        if cnt[last * k + v] > 0 && !path.contains(&v) {
            path.push(v);
            let found = first_cycle(k, cnt, path, len);
            path.pop();
            if found.is_some() {
                return found;
            }
        }
    }
    None
}

struct Packer {
    k: usize,
    cnt: Vec<usize>,
    budget: usize,
    cur: Vec<Vec<usize>>,
    best: Vec<Vec<usize>>,
}

impl Packer {
    /// Each cycle passes through at least three vertices, using one in-edge
    /// and one out-edge at each.
    fn upper_bound(&self) -> usize {
        let k = self.k;
        let balance: usize = (0..k)
            .map(|v| {
                let out: usize = (0..k).map(|u| self.cnt[v * k + u]).sum();
                let inn: usize = (0..k).map(|u| self.cnt[u * k + v]).sum();
                out.min(inn)
            })
            .sum();
        balance / 3
    }

    fn search(&mut self) {
        if self.budget == 0 {
            return;
        }
        self.budget -= 1;
        if self.cur.len() + self.upper_bound() <= self.best.len() {
            return;
        }
        let k = self.k;
        let Some(e) = self.cnt.iter().position(|&c| c > 0) else {
            if self.cur.len() > self.best.len() {
                self.best = self.cur.clone();
            }
            return;
        };
        let (i, j) = (e / k, e % k);
        for len in 3..=k {
            let mut found = Vec::new();
            let mut path = vec![i, j];
            if j > i {
                self.collect(&mut path, len, &mut found);
            }
            for c in found {
                self.take(&c, false);
                self.cur.push(c);
                self.search();
                let c = self.cur.pop().unwrap();
                self.take(&c, true);
                if self.budget == 0 {
                    return;
                }
            }
        }
        self.cnt[e] -= 1;
        self.search();
        self.cnt[e] += 1;
    }

    /// All cycles of `len` vertices extending `path` back to `path[0]`.
    /// Vertices below `path[0]` have no out-edges left, so they never appear.
    fn collect(&mut self, path: &mut Vec<usize>, len: usize, out: &mut Vec<Vec<usize>>) {
        if self.budget == 0 {
            return;
        }
        self.budget -= 1;
        let (s, last, k) = (path[0], *path.last().unwrap(), self.k);
        if path.len() == len {
            if self.cnt[last * k + s] > 0 {
                out.push(path.clone());
            }
            return;
        }
        for v in s + 1..k {
            if self.cnt[last * k + v] > 0 && !path.contains(&v) {
                path.push(v);
                self.collect(path, len, out);
                path.pop();
            }
        }
    }

    fn take(&mut self, c: &[usize], restore: bool) {
        let k = self.k;
        for i in 0..c.len() {
            let e = c[i] * k + c[(i + 1) % c.len()];
            if restore {
                self.cnt[e] += 1;
            } else {
                self.cnt[e] -= 1;
            }
        }
    }
}
