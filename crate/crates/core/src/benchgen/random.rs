use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::coloring::edge_coloring;
use crate::circuit::{asap_schedule, Circuit, Gate};
use crate::error::{Error, Result};

/// Uniform draw in `[0, 1)` from the top 53 bits of the next word.
fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `samples` Erdős–Rényi layers of `cz` gates, concatenated and ASAP packed.
/// The stream is ChaCha8 seeded with `seed_from_u64(seed)`; pairs are visited
/// as `(i, j)`, `i < j`, in lexicographic order, one draw per pair. Within a
/// sample the gates are emitted by colour class of a Misra–Gries edge
/// colouring, so each sample packs into at most `max_degree + 1` slices.
pub fn gen_random(n: usize, p_edge: f64, samples: usize, seed: u64) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::Bench(format!(
            "random circuits need at least 2 qubits, got {n}"
        )));
    }
    if samples < 1 {
        return Err(Error::Bench(
            "random circuits need at least one sample".into(),
        ));
    }
    if !(0.0..=1.0).contains(&p_edge) {
        return Err(Error::Bench(format!(
            "edge probability {p_edge} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Vec::new();
    for _ in 0..samples {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if unit(&mut rng) < p_edge {
                    edges.push((i, j));
                }
            }
        }
        let colors = edge_coloring(n, &edges);
        let mut order: Vec<usize> = (0..edges.len()).collect();
        order.sort_by_key(|&e| (colors[e], edges[e]));
        g.extend(
            order
                .into_iter()
                .map(|e| Gate::pair("cz", edges[e].0, edges[e].1)),
        );
    }
    asap_schedule(g, n)
}
