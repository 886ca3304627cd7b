//! Run harness behind the `qslice` binary: single compiles, parameter sweeps
//! and the fixed CSV schema.

use std::io::Write;
use std::time::Instant;

use qslice::benchgen::{self, BenchSpec, Family};
use qslice::circuit::Circuit;
use qslice::graph::{LookaheadKind, LookaheadSpec};
use qslice::mapper::{
    build_path, insert_movement, latency_estimate, Algorithm, InitialLayout, MapOptions,
    MappedCircuit, Path,
};
use qslice::partition::Machine;
use qslice::{Error, Exec, Result};
use serde::Serialize;

/// Communication multipliers that get their own CSV columns.
pub const MULTIPLIERS: [f64; 3] = [5.0, 10.0, 100.0];

/// Where a run's circuit comes from.
#[derive(Clone, Debug)]
pub enum Source {
    Bench(BenchSpec),
    File { name: String, circuit: Circuit },
}

impl Source {
    pub fn name(&self) -> String {
        match self {
            Source::Bench(spec) => spec.name(),
            Source::File { name, .. } => name.clone(),
        }
    }

    fn family(&self) -> String {
        match self {
            Source::Bench(spec) => spec.family.name().to_string(),
            Source::File { .. } => "file".to_string(),
        }
    }

    pub fn circuit(&self) -> Result<Circuit> {
        match self {
            Source::Bench(spec) => benchgen::generate(spec),
            Source::File { circuit, .. } => Ok(circuit.clone()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub source: Source,
    pub machine: Machine,
    pub options: MapOptions,
    pub seed: u64,
}

/// One CSV row; field order is the column order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub benchmark: String,
    pub family: String,
    pub n_data: usize,
    pub n_total: usize,
    pub k: usize,
    pub p: usize,
    pub algorithm: String,
    pub lookahead: String,
    pub sigma: Option<f64>,
    pub seed: u64,
    pub depth_unmapped: usize,
    pub two_qubit_ops: usize,
    pub nonlocal_ops: usize,
    pub depth_mapped: usize,
    pub seq_ns_5x: u64,
    pub seq_ns_10x: u64,
    pub seq_ns_100x: u64,
    pub par_ns_5x: u64,
    pub par_ns_10x: u64,
    pub par_ns_100x: u64,
    pub wall_ms: Option<f64>,
}

pub const CSV_HEADER: [&str; 21] = [
    "benchmark",
    "family",
    "n_data",
    "n_total",
    "k",
    "p",
    "algorithm",
    "lookahead",
    "sigma",
    "seed",
    "depth_unmapped",
    "two_qubit_ops",
    "nonlocal_ops",
    "depth_mapped",
    "seq_ns_5x",
    "seq_ns_10x",
    "seq_ns_100x",
    "par_ns_5x",
    "par_ns_10x",
    "par_ns_100x",
    "wall_ms",
];

pub struct Compiled {
    pub row: Row,
    pub path: Path,
    pub mapped: MappedCircuit,
}

/// Maps one circuit. `wall_ms` is only filled when `timing` is set, so rows
/// stay byte-identical across runs by default.
pub fn compile(cfg: &RunConfig, timing: bool) -> Result<Compiled> {
    let circuit = cfg.source.circuit()?;
    cfg.machine.check_width(circuit.width())?;
    let start = Instant::now();
    let path = build_path(&circuit.interaction_skeleton(), &cfg.machine, &cfg.options)?;
    let mapped = insert_movement(&circuit, &path)?;
    let wall = start.elapsed().as_secs_f64() * 1e3;

    let depth = circuit.two_qubit_depth();
    let cost = path.total_cost();
    let rounds = path.total_rounds();
    let lat = MULTIPLIERS.map(|m| latency_estimate(depth, cost, rounds, m));
    let static_run = cfg.options.algorithm == Algorithm::StaticOee;
    let n_data = match &cfg.source {
        Source::Bench(spec) => spec.data_qubits,
        Source::File { .. } => circuit.width(),
    };
    let row = Row {
        benchmark: cfg.source.name(),
        family: cfg.source.family(),
        n_data,
        n_total: circuit.width(),
        k: cfg.machine.clusters(),
        p: cfg.machine.capacity(),
        algorithm: cfg.options.algorithm.name().to_string(),
        lookahead: if static_run {
            "none".into()
        } else {
            cfg.options.lookahead.kind().name().into()
        },
        sigma: (!static_run).then(|| cfg.options.lookahead.sigma()),
        seed: cfg.seed,
        depth_unmapped: depth,
        two_qubit_ops: circuit.two_qubit_count(),
        nonlocal_ops: cost,
        depth_mapped: mapped.two_qubit_depth(),
        seq_ns_5x: lat[0].sequential_ns.round() as u64,
        seq_ns_10x: lat[1].sequential_ns.round() as u64,
        seq_ns_100x: lat[2].sequential_ns.round() as u64,
        par_ns_5x: lat[0].parallel_ns.round() as u64,
        par_ns_10x: lat[1].parallel_ns.round() as u64,
        par_ns_100x: lat[2].parallel_ns.round() as u64,
        wall_ms: timing.then_some(wall),
    };
    Ok(Compiled { row, path, mapped })
}

/// Cross product of families, sizes, algorithms and lookahead settings.
#[derive(Clone, Debug)]
pub struct SweepPlan {
    pub families: Vec<Family>,
    pub sizes: Vec<usize>,
    pub total_qubits: usize,
    pub p_edges: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    pub lookaheads: Vec<LookaheadSpec>,
    pub machine: Machine,
    pub layout: Option<InitialLayout>,
    pub seed: u64,
}

impl SweepPlan {
    /// The benchmark instances, in canonical order.
    pub fn benches(&self) -> Vec<BenchSpec> {
        let mut out = Vec::new();
        for &family in &self.families {
            for &n in &self.sizes {
                let base = BenchSpec::new(family, n).with_total(self.total_qubits.max(n));
                if family == Family::Random {
                    for &p in &self.p_edges {
                        out.push(BenchSpec {
                            p_edge: p,
                            seed: self.seed,
                            ..base.clone()
                        });
                    }
                } else {
                    out.push(BenchSpec {
                        seed: self.seed,
                        ..base
                    });
                }
            }
        }
        out
    }

    /// Every run, in canonical order. The static baseline ignores lookahead
    /// and runs once per benchmark.
    pub fn runs(&self) -> Vec<RunConfig> {
        let layout = self.layout.unwrap_or(InitialLayout::Shuffled(self.seed));
        let mut out = Vec::new();
        for spec in self.benches() {
            for &alg in &self.algorithms {
                let settings = if alg.uses_lookahead() {
                    self.lookaheads.clone()
                } else {
                    vec![LookaheadSpec::none()]
                };
                for la in settings {
                    out.push(RunConfig {
                        source: Source::Bench(spec.clone()),
                        machine: self.machine,
                        options: MapOptions::new(alg).with_lookahead(la).with_layout(layout),
                        seed: self.seed,
                    });
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunFailure {
    pub benchmark: String,
    pub algorithm: String,
    pub message: String,
}

/// Runs every configuration of `plan`; failures are reported, not fatal.
/// Results come back in canonical order whatever `exec` is.
pub fn sweep(
    plan: &SweepPlan,
    exec: Exec,
    timing: bool,
) -> Vec<std::result::Result<Row, RunFailure>> {
    let runs = plan.runs();
    exec.map(&runs, |cfg| {
        let inner = RunConfig {
            options: cfg.options.with_exec(exec),
            ..cfg.clone()
        };
        compile(&inner, timing)
            .map(|c| c.row)
            .map_err(|e| RunFailure {
                benchmark: cfg.source.name(),
                algorithm: cfg.options.algorithm.name().to_string(),
                message: e.to_string(),
            })
    })
}

pub fn write_csv<W: Write>(out: W, rows: &[Row]) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()
}

/// Appends rows to `out`, writing the header first when `with_header` is set.
pub fn append_csv<W: Write>(out: W, rows: &[Row], with_header: bool) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    if with_header {
        w.write_record(CSV_HEADER)?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()
}

/// FGP-rOEE against the static baseline for one benchmark and lookahead.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reduction {
    pub benchmark: String,
    pub lookahead: String,
    pub sigma: Option<f64>,
    pub static_ops: usize,
    pub fgp_ops: usize,
    pub reduction_pct: f64,
}

/// Pairs each `fgp-roee` row with the `static-oee` row of the same
/// benchmark, machine and seed.
pub fn reductions(rows: &[Row]) -> Vec<Reduction> {
    let key = |r: &Row| (r.benchmark.clone(), r.k, r.p, r.seed);
    rows.iter()
        .filter(|r| r.algorithm == Algorithm::FgpRoee.name())
        .filter_map(|r| {
            let base = rows
                .iter()
                .find(|s| s.algorithm == Algorithm::StaticOee.name() && key(s) == key(r))?;
            let pct = if base.nonlocal_ops == 0 {
                0.0
            } else {
                100.0 * (1.0 - r.nonlocal_ops as f64 / base.nonlocal_ops as f64)
            };
            Some(Reduction {
                benchmark: r.benchmark.clone(),
                lookahead: r.lookahead.clone(),
                sigma: r.sigma,
                static_ops: base.nonlocal_ops,
                fgp_ops: r.nonlocal_ops,
                reduction_pct: pct,
            })
        })
        .collect()
}

pub fn write_reductions<W: Write>(out: W, items: &[Reduction]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in items {
        w.serialize(r)?;
    }
    if items.is_empty() {
        w.write_record([
            "benchmark",
            "lookahead",
            "sigma",
            "static_ops",
            "fgp_ops",
            "reduction_pct",
        ])?;
    }
    w.flush()
}

/// Geometric mean of `fgp / static` turned into a reduction percentage.
pub fn geometric_mean_reduction(items: &[Reduction]) -> Option<f64> {
    let ratios: Vec<f64> = items
        .iter()
        .filter(|r| r.static_ops > 0)
        .map(|r| r.fgp_ops.max(1) as f64 / r.static_ops as f64)
        .collect();
    if ratios.is_empty() {
        return None;
    }
    let mean = ratios.iter().map(|r| r.ln()).sum::<f64>() / ratios.len() as f64;
    Some(100.0 * (1.0 - mean.exp()))
}

/// A gnuplot script plotting non-local ops against data qubits, one line
/// per algorithm and benchmark family, read from `csv_path`.
pub fn gnuplot_script(csv_path: &str, rows: &[Row]) -> String {
    let mut series: Vec<(String, String)> = Vec::new();
    for r in rows {
        let s = (r.family.clone(), r.algorithm.clone());
        if !series.contains(&s) {
            series.push(s);
        }
    }
    let mut out = String::new();
    out.push_str("set datafile separator ','\n");
    out.push_str("set key autotitle columnhead outside\n");
    out.push_str("set xlabel 'data qubits'\nset ylabel 'non-local operations'\n");
    let plots: Vec<String> = series
        .iter()
        .map(|(fam, alg)| {
            format!(
                "'{csv_path}' using ((strcol(2) eq '{fam}' && strcol(7) eq '{alg}') ? $3 : 1/0):13 with linespoints title '{fam} {alg}'"
            )
        })
        .collect();
    if !plots.is_empty() {
        out.push_str("plot ");
        out.push_str(&plots.join(", \\\n     "));
        out.push('\n');
    }
    out
}

/// Parses a lookahead flag value such as `expon`, `gauss` or `const`.
pub fn lookahead(kind: &str, sigma: f64) -> Result<LookaheadSpec> {
    let kind: LookaheadKind = kind.parse()?;
    LookaheadSpec::new(kind, sigma)
}

/// Error class used for the process exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Capacity { .. } | Error::Infeasible { .. } => 3,
        _ => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(algorithms: Vec<Algorithm>) -> SweepPlan {
        SweepPlan {
            families: vec![Family::Cuccaro],
            sizes: vec![12],
            total_qubits: 16,
            p_edges: vec![0.2],
            algorithms,
            lookaheads: vec![
                lookahead("expon", 1.0).unwrap(),
                lookahead("gauss", 1.0).unwrap(),
            ],
            machine: Machine::new(4, 4, 1.0).unwrap(),
            layout: None,
            seed: 3,
        }
    }

    #[test]
    fn static_runs_once_per_benchmark() {
        let runs = plan(vec![Algorithm::StaticOee, Algorithm::FgpRoee]).runs();
        assert_eq!(runs.len(), 3);
    }

    #[test]
    fn empty_algorithm_list_gives_no_rows() {
        let rows = sweep(&plan(vec![]), Exec::Sequential, false);
        assert!(rows.is_empty());
        let mut buf = Vec::new();
        write_csv(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().trim(), CSV_HEADER.join(","));
    }

    #[test]
    fn rows_have_every_column() {
        let rows: Vec<Row> = sweep(&plan(Algorithm::ALL.to_vec()), Exec::Sequential, false)
            .into_iter()
            .collect::<std::result::Result<_, _>>()
            .unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        for line in text.lines() {
            assert_eq!(line.split(',').count(), 21, "{line}");
        }
        assert!(text.lines().nth(1).unwrap().ends_with(','));
    }

    #[test]
    fn reduction_pairs_static_rows() {
        let rows: Vec<Row> = sweep(
            &plan(vec![Algorithm::StaticOee, Algorithm::FgpRoee]),
            Exec::Sequential,
            false,
        )
        .into_iter()
        .map(|r| r.unwrap())
        .collect();
        let red = reductions(&rows);
        assert_eq!(red.len(), 2);
        assert!(red.iter().all(|r| r.static_ops == rows[0].nonlocal_ops));
    }

    #[test]
    fn gnuplot_mentions_each_series() {
        let rows: Vec<Row> = sweep(
            &plan(vec![Algorithm::StaticOee, Algorithm::FgpRoee]),
            Exec::Sequential,
            false,
        )
        .into_iter()
        .map(|r| r.unwrap())
        .collect();
        let script = gnuplot_script("out.csv", &rows);
        assert!(script.contains("cuccaro static-oee"));
        assert!(script.contains("cuccaro fgp-roee"));
    }
}
