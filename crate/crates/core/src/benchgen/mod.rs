//! Deterministic benchmark circuit generators.
//!
//! Every generator is a pure function of its [`BenchSpec`] and emits only
//! one- and two-qubit gates. Toffolis are expanded to eight CNOTs plus
//! single-qubit gates.

mod arith;
mod coloring;
mod control;
mod random;
mod toffoli;

use std::fmt;
use std::str::FromStr;

pub use arith::{gen_cuccaro, gen_qft_adder, qft_adder_cphase_count, CuccaroLayout};
pub use control::{gen_multi_control, gen_multi_target, AncillaKind, MAX_MULTI_CONTROL_DATA};
pub use random::gen_random;

use crate::circuit::{emit_with_comments, Circuit};
use crate::error::{Error, Result};

pub const DEFAULT_TOTAL_QUBITS: usize = 100;
pub const DEFAULT_SEED: u64 = 2019;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Cuccaro,
    QftAdder,
    MultiControlClean,
    MultiTargetClean,
    MultiTargetDirty,
    Random,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Cuccaro,
        Family::QftAdder,
        Family::MultiControlClean,
        Family::MultiTargetClean,
        Family::MultiTargetDirty,
        Family::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Cuccaro => "cuccaro",
            Family::QftAdder => "qft_adder",
            Family::MultiControlClean => "multi_control_clean",
            Family::MultiTargetClean => "multi_target_clean",
            Family::MultiTargetDirty => "multi_target_dirty",
            Family::Random => "random",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        let fam = match norm.as_str() {
            "cuccaro" => Family::Cuccaro,
            "qft_adder" | "qft" => Family::QftAdder,
            "multi_control_clean" | "multi_control" => Family::MultiControlClean,
            "multi_target_clean" => Family::MultiTargetClean,
            "multi_target_dirty" => Family::MultiTargetDirty,
            "random" => Family::Random,
            _ => return Err(Error::Bench(format!("unknown family `{s}`"))),
        };
        Ok(fam)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchSpec {
    pub family: Family,
    pub data_qubits: usize,
    pub total_qubits: usize,
    /// Edge probability, random family only.
    pub p_edge: f64,
    /// Number of layers, random family only.
    pub samples: usize,
    pub seed: u64,
}

impl BenchSpec {
    pub fn new(family: Family, data_qubits: usize) -> Self {
        BenchSpec {
            family,
            data_qubits,
            total_qubits: DEFAULT_TOTAL_QUBITS.max(data_qubits),
            p_edge: 0.0,
            samples: 1,
            seed: DEFAULT_SEED,
        }
    }

    pub fn random(data_qubits: usize, p_edge: f64, seed: u64) -> Self {
        BenchSpec {
            p_edge,
            seed,
            ..BenchSpec::new(Family::Random, data_qubits)
        }
    }

    pub fn with_total(mut self, total_qubits: usize) -> Self {
        self.total_qubits = total_qubits;
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.data_qubits > self.total_qubits {
            return Err(Error::Bench(format!(
                "data qubits {} exceed total qubits {}",
                self.data_qubits, self.total_qubits
            )));
        }
        if !(0.0..=1.0).contains(&self.p_edge) {
            return Err(Error::Bench(format!(
                "edge probability {} outside [0, 1]",
                self.p_edge
            )));
        }
        Ok(())
    }

    /// Short identifier such as `cuccaro-76` or `random-0.2-50`.
    pub fn name(&self) -> String {
        match self.family {
            Family::Random => format!("random-{}-{}", self.p_edge, self.data_qubits),
            f => format!("{}-{}", f.name(), self.data_qubits),
        }
    }

    /// Header comment lines recorded with a generated circuit.
    pub fn provenance(&self) -> Vec<String> {
        let mut line = format!(
            "family={} data={} total={}",
            self.family, self.data_qubits, self.total_qubits
        );
        if self.family == Family::Random {
            line.push_str(&format!(" p_edge={} samples={}", self.p_edge, self.samples));
        }
        line.push_str(&format!(" seed={}", self.seed));
        vec![line]
    }
}

pub fn generate(spec: &BenchSpec) -> Result<Circuit> {
    spec.validate()?;
    let (d, t) = (spec.data_qubits, spec.total_qubits);
    match spec.family {
        Family::Cuccaro => gen_cuccaro(d, t),
        Family::QftAdder => gen_qft_adder(d, t),
        Family::MultiControlClean => gen_multi_control(d, t),
        Family::MultiTargetClean => gen_multi_target(d, t, AncillaKind::Clean),
        Family::MultiTargetDirty => gen_multi_target(d, t, AncillaKind::Dirty),
        Family::Random => gen_random(d, spec.p_edge, spec.samples, spec.seed),
    }
}

/// Circuit text with the provenance header.
pub fn generate_text(spec: &BenchSpec) -> Result<String> {
    let circuit = generate(spec)?;
    Ok(emit_with_comments(&circuit, &spec.provenance()))
}
