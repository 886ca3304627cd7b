//! Oracles shared by the integration tests: a dense statevector simulator,
//! a breadth-first minimum-swap search and an exhaustive path optimizer.
#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use num_complex::Complex64;
use qslice::circuit::{Circuit, Gate};
use qslice::mapper::MappedCircuit;
use qslice::partition::Assignment;

/// Dense state over `n` qubits; bit `q` of the index is qubit `q`.
pub struct State {
    pub n: usize,
    pub amp: Vec<Complex64>,
}

impl State {
    pub fn basis(n: usize, index: usize) -> Self {
        let mut amp = vec![Complex64::new(0.0, 0.0); 1 << n];
        amp[index] = Complex64::new(1.0, 0.0);
        State { n, amp }
    }

    fn single(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let bit = 1 << q;
        for i in 0..self.amp.len() {
            if i & bit == 0 {
                let (a, b) = (self.amp[i], self.amp[i | bit]);
                self.amp[i] = m[0][0] * a + m[0][1] * b;
                self.amp[i | bit] = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    fn phase_where(&mut self, mask: usize, phase: Complex64) {
        for (i, a) in self.amp.iter_mut().enumerate() {
            if i & mask == mask {
                *a *= phase;
            }
        }
    }

    pub fn apply(&mut self, g: &Gate) {
        let q = g.qubits();
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let eit = |t: f64| Complex64::from_polar(1.0, t);
        match (g.kind(), q.len()) {
            ("h", 1) => self.single(q[0], [[one * r, one * r], [one * r, -one * r]]),
            ("x", 1) => self.single(q[0], [[zero, one], [one, zero]]),
            ("z", 1) => self.phase_where(1 << q[0], -one),
            ("s", 1) => self.phase_where(1 << q[0], eit(std::f64::consts::FRAC_PI_2)),
            ("sdg", 1) => self.phase_where(1 << q[0], eit(-std::f64::consts::FRAC_PI_2)),
            ("t", 1) => self.phase_where(1 << q[0], eit(std::f64::consts::FRAC_PI_4)),
            ("tdg", 1) => self.phase_where(1 << q[0], eit(-std::f64::consts::FRAC_PI_4)),
            ("cx", 2) => {
                let (c, t) = (1 << q[0], 1 << q[1]);
                for i in 0..self.amp.len() {
                    if i & c != 0 && i & t == 0 {
                        self.amp.swap(i, i | t);
                    }
                }
            }
            ("cz", 2) => self.phase_where((1 << q[0]) | (1 << q[1]), -one),
            ("cp", 2) => {
                self.phase_where((1 << q[0]) | (1 << q[1]), eit(g.param().expect("cp angle")))
            }
            ("swap" | "swap-nl", 2) => {
                let (a, b) = (1 << q[0], 1 << q[1]);
                for i in 0..self.amp.len() {
                    if i & a != 0 && i & b == 0 {
                        self.amp.swap(i, i ^ a ^ b);
                    }
                }
            }
            (k, n) => panic!("simulator has no {n}-qubit gate `{k}`"),
        }
    }

    /// The basis index holding (nearly) all the probability, if any.
    pub fn classical(&self) -> Option<usize> {
        let (i, a) = self
            .amp
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.norm_sqr().total_cmp(&y.1.norm_sqr()))?;
        (a.norm_sqr() > 1.0 - 1e-9).then_some(i)
    }
}

pub fn run(circuit: &Circuit, input: usize) -> State {
    let mut s = State::basis(circuit.width(), input);
    for g in circuit.gates() {
        s.apply(g);
    }
    s
}

/// Runs the mapped circuit on the basis input of the logical circuit and maps
/// the result back through the final placement.
pub fn run_mapped(mapped: &MappedCircuit, input: usize) -> Option<usize> {
    let flat = mapped.to_circuit();
    let mut start = 0usize;
    for (q, &slot) in mapped.initial.iter().enumerate() {
        if input >> q & 1 == 1 {
            start |= 1 << slot;
        }
    }
    let out = run(&flat, start).classical()?;
    let last = mapped
        .replay()
        .ok()?
        .last()
        .cloned()
        .unwrap_or_else(|| mapped.initial.clone());
    let mut logical = 0usize;
    for (q, &slot) in last.iter().enumerate() {
        if out >> slot & 1 == 1 {
            logical |= 1 << q;
        }
    }
    Some(logical)
}

/// Cluster of each real qubit.
pub fn placement(a: &Assignment) -> Vec<usize> {
    a.as_slice()[..a.qubits()].to_vec()
}

fn encode(state: &[usize]) -> u64 {
    state.iter().rev().fold(0, |acc, &c| acc << 3 | c as u64)
}

fn neighbours(state: &[usize], k: usize, p: usize, mut visit: impl FnMut(&[usize])) {
    let mut load = vec![0usize; k];
    for &c in state {
        load[c] += 1;
    }
    let mut s = state.to_vec();
    for a in 0..state.len() {
        for b in a + 1..state.len() {
            if state[a] != state[b] {
                s.swap(a, b);
                visit(&s);
                s.swap(a, b);
            }
        }
        for (c, &held) in load.iter().enumerate() {
            if c != state[a] && held < p {
                s[a] = c;
                visit(&s);
                s[a] = state[a];
            }
        }
    }
}

/// Breadth-first distances from `from`, stopping early once `to` is reached.
fn bfs(from: &[usize], to: Option<&[usize]>, k: usize, p: usize) -> HashMap<u64, usize> {
    assert!(k <= 8, "states pack three bits per qubit");
    let goal = to.map(encode);
    let mut seen = HashMap::new();
    let mut queue = VecDeque::new();
    seen.insert(encode(from), 0);
    queue.push_back(from.to_vec());
    while let Some(s) = queue.pop_front() {
        let d = seen[&encode(&s)];
        if goal.is_some_and(|g| seen.contains_key(&g)) {
            break;
        }
        neighbours(&s, k, p, |n| {
            let key = encode(n);
            if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(key) {
                e.insert(d + 1);
                queue.push_back(n.to_vec());
            }
        });
    }
    seen
}

/// Fewest inter-cluster swaps turning placement `from` into `to`, where a swap
/// exchanges two real qubits or moves one onto an idle slot.
pub fn min_swaps(from: &[usize], to: &[usize], k: usize, p: usize) -> usize {
    bfs(from, Some(to), k, p)[&encode(to)]
}

/// Distances from `from` to every reachable placement.
pub fn all_distances(from: &[usize], k: usize, p: usize) -> HashMap<u64, usize> {
    bfs(from, None, k, p)
}

/// Every placement of `q` qubits into `k` clusters of capacity `p`.
pub fn placements(q: usize, k: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; q];
    let mut load = vec![0usize; k];
    fn rec(
        i: usize,
        cur: &mut Vec<usize>,
        load: &mut Vec<usize>,
        p: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for c in 0..load.len() {
            if load[c] < p {
                load[c] += 1;
                cur[i] = c;
                rec(i + 1, cur, load, p, out);
                load[c] -= 1;
            }
        }
    }
    rec(0, &mut cur, &mut load, p, &mut out);
    out
}

/// Cheapest total communication over all valid placement sequences; the
/// first placement is free.
pub fn optimal_path_cost(slices: &[Vec<(usize, usize)>], q: usize, k: usize, p: usize) -> usize {
    let all = placements(q, k, p);
    let valid = |t: usize| -> Vec<usize> {
        (0..all.len())
            .filter(|&i| slices[t].iter().all(|&(a, b)| all[i][a] == all[i][b]))
            .collect()
    };
    let mut dist: HashMap<usize, HashMap<u64, usize>> = HashMap::new();
    let mut best: Vec<(usize, usize)> = valid(0).into_iter().map(|i| (i, 0)).collect();
    for t in 1..slices.len() {
        let mut next = Vec::new();
        for j in valid(t) {
            let mut m = usize::MAX;
            for &(i, c) in &best {
                let d = dist
                    .entry(i)
                    .or_insert_with(|| all_distances(&all[i], k, p));
                m = m.min(c + d[&encode(&all[j])]);
            }
            next.push((j, m));
        }
        best = next;
    }
    best.iter()
        .map(|&(_, c)| c)
        .min()
        .expect("some valid placement per slice")
}

/// Pairs of each slice of `circuit`.
pub fn slice_pairs(circuit: &Circuit) -> Vec<Vec<(usize, usize)>> {
    circuit
        .slices()
        .iter()
        .map(|s| s.interactions().collect())
        .collect()
}
