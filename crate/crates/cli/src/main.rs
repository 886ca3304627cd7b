use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qslice::benchgen::{generate_text, BenchSpec, Family, DEFAULT_TOTAL_QUBITS};
use qslice::circuit::parse_circuit;
use qslice::graph::LookaheadSpec;
use qslice::mapper::{
    comm_cost, latency_estimate, parse_mapped, Algorithm, InitialLayout, MapOptions,
    REPORT_MULTIPLIERS,
};
use qslice::partition::{Assignment, Machine};
use qslice::{Error, Exec};
use qslice_cli::{
    append_csv, compile, exit_code, geometric_mean_reduction, gnuplot_script, lookahead,
    reductions, sweep, write_csv, write_reductions, RunConfig, Source, SweepPlan,
};

const DEFAULT_SEED: u64 = 2019;

#[derive(Parser)]
#[command(
    name = "qslice",
    version,
    about = "Map quantum circuits onto clustered machines one time slice at a time"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a benchmark circuit.
    Generate(GenerateArgs),
    /// Map one circuit and write the annotated result.
    Compile(CompileArgs),
    /// Run a cross product of benchmarks and settings into one CSV.
    Sweep(SweepArgs),
    /// Latency report for a mapped circuit file.
    Evaluate(EvaluateArgs),
    /// Quick internal consistency checks.
    Selftest,
}

#[derive(Args)]
struct MachineArgs {
    /// Number of clusters.
    #[arg(long, short = 'k', default_value_t = 10)]
    clusters: usize,
    /// Slots per cluster.
    #[arg(long, default_value_t = 10)]
    capacity: usize,
    /// Cost of one non-local operation in gate times.
    #[arg(long, default_value_t = 1.0)]
    multiplier: f64,
    /// Starting layout for the static partition: `shuffled` (seeded) or `cluster-major`.
    #[arg(long, default_value = "shuffled")]
    layout: String,
    /// Seed for random benchmarks and the shuffled layout.
    #[arg(long, env = "QSLICE_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads; 1 runs sequentially.
    #[arg(long)]
    jobs: Option<usize>,
}

impl MachineArgs {
    fn machine(&self) -> Result<Machine, Failure> {
        Ok(Machine::new(self.clusters, self.capacity, self.multiplier)?)
    }

    fn layout(&self) -> Result<InitialLayout, Failure> {
        match self.layout.as_str() {
            "shuffled" | "random" => Ok(InitialLayout::Shuffled(self.seed)),
            "cluster-major" | "cluster_major" => Ok(InitialLayout::ClusterMajor),
            other => Err(Failure::Usage(format!("unknown layout `{other}`"))),
        }
    }

    fn exec(&self) -> Exec {
        if self.jobs == Some(1) || !Exec::parallel_available() {
            Exec::Sequential
        } else {
            Exec::Parallel
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    family: String,
    /// Data qubits.
    #[arg(long, alias = "n")]
    data: usize,
    /// Total qubits; the rest are ancilla.
    #[arg(long, default_value_t = DEFAULT_TOTAL_QUBITS)]
    total: usize,
    /// Edge probability for random circuits.
    #[arg(long = "p", default_value_t = 0.0)]
    p_edge: f64,
    #[arg(long, default_value_t = 1)]
    samples: usize,
    #[arg(long, env = "QSLICE_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompileArgs {
    /// Circuit file. Use `--bench` instead to generate one.
    input: Option<PathBuf>,
    /// Benchmark family to generate instead of reading a file.
    #[arg(long, conflicts_with = "input")]
    bench: Option<String>,
    #[arg(long, alias = "n", default_value_t = 76)]
    data: usize,
    #[arg(long, default_value_t = DEFAULT_TOTAL_QUBITS)]
    total: usize,
    #[arg(long, default_value_t = 0.2)]
    p_edge: f64,
    #[arg(long, default_value_t = 1)]
    samples: usize,
    #[arg(long, default_value = "fgp-roee")]
    alg: String,
    /// Lookahead decay: `expon`, `gauss` or `const`.
    #[arg(long, default_value = "expon")]
    lookahead: String,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[command(flatten)]
    machine: MachineArgs,
    /// Mapped circuit output; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// CSV file to append a stats row to.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Record wall-clock time in the stats row.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "cuccaro,qft_adder,multi_control_clean,multi_target_clean,multi_target_dirty,random"
    )]
    families: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "50,76,100")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_TOTAL_QUBITS)]
    total: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.4,0.8")]
    p_edges: Vec<f64>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "static-oee,fgp-oee,fgp-roee"
    )]
    algs: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "expon")]
    lookaheads: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    sigmas: Vec<f64>,
    #[command(flatten)]
    machine: MachineArgs,
    /// CSV output; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Per-benchmark reduction of fgp-roee over static-oee.
    #[arg(long)]
    reductions: Option<PathBuf>,
    /// Gnuplot script reading the CSV output.
    #[arg(long)]
    gnuplot: Option<PathBuf>,
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    file: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = REPORT_MULTIPLIERS)]
    multipliers: Vec<f64>,
}

enum Failure {
    Usage(String),
    Lib(Error),
    Io(PathBuf, io::Error),
    Check(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> Failure + '_ {
    move |e| Failure::Io(path.to_path_buf(), e)
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(io_err(p)),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io("<stdout>".into(), e)),
    }
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    #[cfg(feature = "parallel")]
    if let Some(n) = jobs.filter(|&n| n > 1) {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            return pool.install(f);
        }
    }
    let _ = jobs;
    f()
}

fn algorithms(names: &[String]) -> Result<Vec<Algorithm>, Failure> {
    names
        .iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.parse::<Algorithm>()
                .map_err(|e| Failure::Usage(e.to_string()))
        })
        .collect()
}

fn cmd_generate(a: GenerateArgs) -> Result<(), Failure> {
    let family: Family = a
        .family
        .parse()
        .map_err(|e: Error| Failure::Usage(e.to_string()))?;
    let spec = BenchSpec {
        family,
        data_qubits: a.data,
        total_qubits: a.total,
        p_edge: a.p_edge,
        samples: a.samples,
        seed: a.seed,
    };
    let text = generate_text(&spec)?;
    write_out(a.out.as_deref(), &text)
}

fn cmd_compile(a: CompileArgs) -> Result<(), Failure> {
    let source = match (&a.input, &a.bench) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(io_err(path))?;
            let name = path
                .file_stem()
                .map_or("input".into(), |s| s.to_string_lossy().into_owned());
            Source::File {
                name,
                circuit: parse_circuit(&text)?,
            }
        }
        (None, Some(fam)) => {
            let family: Family = fam
                .parse()
                .map_err(|e: Error| Failure::Usage(e.to_string()))?;
            Source::Bench(BenchSpec {
                family,
                data_qubits: a.data,
                total_qubits: a.total,
                p_edge: if family == Family::Random {
                    a.p_edge
                } else {
                    0.0
                },
                samples: a.samples,
                seed: a.machine.seed,
            })
        }
        (None, None) => {
            return Err(Failure::Usage(
                "give a circuit file or `--bench <family>`".into(),
            ))
        }
    };
    let algorithm: Algorithm = a
        .alg
        .parse()
        .map_err(|e: Error| Failure::Usage(e.to_string()))?;
    let la = if algorithm.uses_lookahead() {
        lookahead(&a.lookahead, a.sigma).map_err(|e| Failure::Usage(e.to_string()))?
    } else {
        LookaheadSpec::none()
    };
    let cfg = RunConfig {
        source,
        machine: a.machine.machine()?,
        options: MapOptions::new(algorithm)
            .with_lookahead(la)
            .with_layout(a.machine.layout()?)
            .with_exec(a.machine.exec()),
        seed: a.machine.seed,
    };
    let done = with_jobs(a.machine.jobs, || compile(&cfg, a.timing))?;
    write_out(a.out.as_deref(), &done.mapped.emit())?;
    if let Some(path) = &a.stats {
        let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(io_err(path))?;
        append_csv(file, std::slice::from_ref(&done.row), fresh).map_err(io_err(path))?;
    }
    eprintln!(
        "{} {}: {} non-local ops, {} rounds, depth {} -> {}",
        done.row.benchmark,
        done.row.algorithm,
        done.row.nonlocal_ops,
        done.path.total_rounds(),
        done.row.depth_unmapped,
        done.row.depth_mapped
    );
    Ok(())
}

fn cmd_sweep(a: SweepArgs) -> Result<(), Failure> {
    let families = a
        .families
        .iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.parse::<Family>()
                .map_err(|e| Failure::Usage(e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut lookaheads = Vec::new();
    for kind in a.lookaheads.iter().filter(|s| !s.trim().is_empty()) {
        for &sigma in &a.sigmas {
            lookaheads.push(lookahead(kind, sigma).map_err(|e| Failure::Usage(e.to_string()))?);
        }
    }
    let plan = SweepPlan {
        families,
        sizes: a.sizes.clone(),
        total_qubits: a.total,
        p_edges: a.p_edges.clone(),
        algorithms: algorithms(&a.algs)?,
        lookaheads,
        machine: a.machine.machine()?,
        layout: Some(a.machine.layout()?),
        seed: a.machine.seed,
    };
    let exec = a.machine.exec();
    let results = with_jobs(a.machine.jobs, || sweep(&plan, exec, a.timing));
    let mut rows = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(f) => eprintln!("skipped {} {}: {}", f.benchmark, f.algorithm, f.message),
        }
    }
    let mut buf = Vec::new();
    write_csv(&mut buf, &rows).map_err(|e| Failure::Io("<csv>".into(), e))?;
    write_out(a.out.as_deref(), &String::from_utf8_lossy(&buf))?;
    let red = reductions(&rows);
    if let Some(path) = &a.reductions {
        let file = fs::File::create(path).map_err(io_err(path))?;
        write_reductions(file, &red).map_err(io_err(path))?;
    }
    if let Some(path) = &a.gnuplot {
        let csv = a
            .out
            .as_ref()
            .map_or("sweep.csv".to_string(), |p| p.display().to_string());
        fs::write(path, gnuplot_script(&csv, &rows)).map_err(io_err(path))?;
    }
    if let Some(g) = geometric_mean_reduction(&red) {
        eprintln!("{} runs, geometric-mean reduction {g:.1}%", rows.len());
    }
    Ok(())
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&a.file).map_err(io_err(&a.file))?;
    let mapped = parse_mapped(&text)?;
    mapped.replay()?;
    let depth = mapped.depth_unmapped;
    let cost = mapped.total_cost();
    let rounds = mapped.total_rounds();
    println!(
        "{} k={} p={} depth={} nonlocal_ops={} rounds={}",
        mapped.algorithm,
        mapped.machine.clusters(),
        mapped.machine.capacity(),
        depth,
        cost,
        rounds
    );
    println!("multiplier,sequential_ms,parallel_ms");
    for &m in &a.multipliers {
        if m < 1.0 {
            return Err(Failure::Usage(format!("multiplier {m} is below 1")));
        }
        let l = latency_estimate(depth, cost, rounds, m);
        println!(
            "{m},{:.4},{:.4}",
            l.sequential_ns / 1e6,
            l.parallel_ns / 1e6
        );
    }
    Ok(())
}

fn cmd_selftest() -> Result<(), Failure> {
    let m = Machine::new(3, 2, 1.0)?;
    let asg = |v: Vec<usize>| Assignment::from_clusters(&m, 4, v);
    let cost = |a: Vec<usize>, b: Vec<usize>| -> Result<usize, Error> {
        Ok(comm_cost(&asg(a)?, &asg(b)?)?.cost)
    };
    let mut checks: Vec<(&str, bool)> = vec![
        (
            "identity transition costs 0",
            cost(vec![0, 0, 1, 1, 2, 2], vec![0, 0, 1, 1, 2, 2])? == 0,
        ),
        (
            "2-cycle costs 1",
            cost(vec![0, 0, 1, 1, 2, 2], vec![1, 0, 0, 1, 2, 2])? == 1,
        ),
        (
            "3-cycle costs 2",
            cost(vec![0, 1, 2, 0, 1, 2], vec![1, 2, 0, 0, 1, 2])? == 2,
        ),
        (
            "lone move costs 1",
            cost(vec![0, 0, 1, 2, 1, 2], vec![2, 0, 1, 2, 1, 0])? == 1,
        ),
    ];
    let l = latency_estimate(265, 1297, 0, 100.0);
    checks.push((
        "latency 265/1297/100x is 39 ms",
        (l.sequential_ns / 1e6 - 39.0).abs() < 0.5,
    ));
    let cfg = RunConfig {
        source: Source::Bench(BenchSpec::new(Family::Cuccaro, 10).with_total(12)),
        machine: Machine::new(2, 6, 1.0)?,
        options: MapOptions::default(),
        seed: DEFAULT_SEED,
    };
    let done = compile(&cfg, false)?;
    let back = parse_mapped(&done.mapped.emit())?;
    checks.push(("mapped output round-trips", back == done.mapped));
    checks.push((
        "replay matches the path",
        done.mapped.matches_path(&done.path)?,
    ));
    checks.push((
        "swap count equals cost",
        done.mapped.swap_count() == done.path.total_cost(),
    ));
    let mut failed = 0;
    for (name, ok) in &checks {
        println!("{} {name}", if *ok { "ok  " } else { "FAIL" });
        failed += usize::from(!ok);
    }
    if failed > 0 {
        return Err(Failure::Check(failed));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Compile(a) => cmd_compile(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Selftest => cmd_selftest(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
        Err(Failure::Io(path, e)) => {
            eprintln!("error: {}: {e}", path.display());
            ExitCode::from(2)
        }
        Err(Failure::Check(n)) => {
            eprintln!("selftest: {n} check(s) failed");
            ExitCode::from(2)
        }
    }
}
