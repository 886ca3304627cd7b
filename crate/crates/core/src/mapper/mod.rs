//! Slice-by-slice mapping onto a clustered machine.

pub mod cost;
pub mod latency;
pub mod movement;
pub mod path;

pub use cost::{comm_cost, Cycle, MoveSet, ResidualMove};
pub use latency::{latency_estimate, LatencyEstimate, GATE_NS, REPORT_MULTIPLIERS};
pub use movement::{insert_movement, parse_mapped, MappedCircuit, Segment, Transition, SWAP_KIND};
pub use path::{
    build_path, fgp_path, fgp_path_with, static_path, static_seed, Algorithm, InitialLayout,
    MapOptions, Path,
};

use crate::circuit::Circuit;
use crate::error::Result;
use crate::partition::Machine;

/// Maps `circuit`: slices its interaction skeleton, builds the path and
/// inserts the movement.
pub fn map_circuit(
    circuit: &Circuit,
    machine: &Machine,
    opts: &MapOptions,
) -> Result<(Path, MappedCircuit)> {
    let skeleton = circuit.interaction_skeleton();
    let path = build_path(&skeleton, machine, opts)?;
    let mapped = insert_movement(circuit, &path)?;
    Ok((path, mapped))
}
