//! Command-line front end of the `qaoa-bench` binary.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::arith::{adder, test_block, RegisterPlan};
use crate::circuit::{compose, run};
use crate::encoding::{AnsatzParams, EncodingMethod, MethodTag};
use crate::error::{Error, Result};
use crate::harness::{self, ExperimentConfig};
use crate::knapsack::{brute_force, generate};
use crate::qubo::build_qubo;
use crate::reduced::ReducedEvaluator;
use crate::sim::{Backend, QuantumState};
use crate::simulate::{Evaluator, Simulator};

#[derive(Debug, Parser)]
#[command(name = "qaoa-bench", version, about = "Constraint encodings for QAOA on knapsack problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write seeded random instances as text files.
    Gen(GenArgs),
    /// Optimize and evaluate a single (method, size, p, instance) cell.
    Run(RunArgs),
    /// Run a full sweep and write results.csv plus the report.
    Sweep(SweepArgs),
    /// Aggregate a results CSV and draw the figure panels.
    Report(ReportArgs),
    /// Check circuits against brute-force oracles on random instances.
    Selftest(SelftestArgs),
}

/// Overrides for [`ExperimentConfig`] fields; unset flags keep the config
/// file (or default) value.
#[derive(Debug, Args, Default)]
struct ConfigFlags {
    /// Flat `key = value` config file applied before the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    instances: Option<String>,
    /// QUBO penalty weight P.
    #[arg(long)]
    penalty: Option<String>,
    /// Penalty-dephasing strength.
    #[arg(long)]
    alpha: Option<String>,
    /// flat | proportional
    #[arg(long)]
    penal_mode: Option<String>,
    #[arg(long)]
    penal_fixed_angle: Option<String>,
    /// exact | paper
    #[arg(long)]
    slack: Option<String>,
    /// auto | statevector | density | trajectory | ensemble
    #[arg(long)]
    backend: Option<String>,
    /// reduced | circuit
    #[arg(long)]
    objective: Option<String>,
    /// Sample this many shots instead of using exact distributions.
    #[arg(long)]
    shots: Option<String>,
    #[arg(long)]
    trajectories: Option<String>,
    #[arg(long)]
    restarts: Option<String>,
    #[arg(long)]
    max_iterations: Option<String>,
    #[arg(long)]
    tolerance: Option<String>,
    #[arg(long)]
    initial_step: Option<String>,
    #[arg(long)]
    w_max: Option<String>,
    #[arg(long)]
    v_max: Option<String>,
    #[arg(long)]
    tightness: Option<String>,
    #[arg(long)]
    output_dir: Option<String>,
}

impl ConfigFlags {
    fn build(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        let pairs = [
            ("seed", &self.seed),
            ("instances", &self.instances),
            ("penalty", &self.penalty),
            ("alpha", &self.alpha),
            ("penal_mode", &self.penal_mode),
            ("penal_fixed_angle", &self.penal_fixed_angle),
            ("slack", &self.slack),
            ("backend", &self.backend),
            ("objective", &self.objective),
            ("shots", &self.shots),
            ("trajectories", &self.trajectories),
            ("restarts", &self.restarts),
            ("max_iterations", &self.max_iterations),
            ("tolerance", &self.tolerance),
            ("initial_step", &self.initial_step),
            ("w_max", &self.w_max),
            ("v_max", &self.v_max),
            ("tightness", &self.tightness),
            ("output_dir", &self.output_dir),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Sizes, e.g. `3,4` or `3..=6`.
    #[arg(long, default_value = "3..=6")]
    sizes: String,
    #[arg(long, default_value_t = 50)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "instances")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    method: String,
    /// Number of items.
    #[arg(long = "size", short = 'm', default_value_t = 3)]
    size: usize,
    #[arg(long, short = 'p', default_value_t = 5)]
    layers: usize,
    /// Instance index within the (seed, size) batch.
    #[arg(long, default_value_t = 0)]
    index: usize,
    #[command(flatten)]
    flags: ConfigFlags,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    methods: Option<String>,
    #[arg(long)]
    sizes: Option<String>,
    #[arg(long)]
    layers: Option<String>,
    /// Skip writing the SVG report.
    #[arg(long)]
    no_report: bool,
    #[command(flatten)]
    flags: ConfigFlags,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Results CSV written by `sweep`.
    input: PathBuf,
    /// Output directory (defaults to the CSV's directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 20)]
    instances: usize,
    #[arg(long, default_value_t = 4)]
    max_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code: 0 on success, 2 on usage errors and 1 on
/// configuration, I/O or check failures.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Report(a) => cmd_report(a),
        Command::Selftest(a) => cmd_selftest(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn cmd_gen(a: GenArgs) -> Result<i32> {
    let mut cfg = ExperimentConfig::default();
    cfg.set("sizes", &a.sizes)?;
    std::fs::create_dir_all(&a.out)?;
    let mut n = 0;
    for &m in &cfg.sizes {
        for i in 0..a.instances {
            let seed = harness::instance_seed(a.seed, m, i);
            let inst = generate(seed, m, cfg.generator)?;
            inst.write_file(a.out.join(format!("m{m}_{i:03}.txt")))?;
            n += 1;
        }
    }
    println!("wrote {n} instances to {}", a.out.display());
    Ok(0)
}

fn cmd_run(a: RunArgs) -> Result<i32> {
    let mut cfg = a.flags.build()?;
    let tag: MethodTag = a.method.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
    cfg.methods = vec![tag];
    cfg.sizes = vec![a.size];
    cfg.layers = vec![a.layers];
    cfg.validate()?;
    let record = harness::run_cell(&cfg, tag, a.size, a.layers, a.index)?;
    let stdout = std::io::stdout();
    harness::write_records(&[record], stdout.lock())?;
    Ok(0)
}

fn cmd_sweep(a: SweepArgs) -> Result<i32> {
    let mut cfg = a.flags.build()?;
    for (key, value) in [("methods", &a.methods), ("sizes", &a.sizes), ("layers", &a.layers)] {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    cfg.validate()?;
    let n_cells = harness::cells(&cfg).len();
    eprintln!("running {n_cells} cells");
    let records = harness::run_experiment(&cfg)?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    let csv_path = cfg.output_dir.join("results.csv");
    harness::emit_csv(&records, &csv_path)?;
    std::fs::write(cfg.output_dir.join("config.txt"), cfg.to_text())?;
    println!("wrote {} records to {}", records.len(), csv_path.display());
    if !a.no_report {
        let files = harness::emit_report(&records, &cfg.output_dir)?;
        println!("wrote {} report files to {}", files.len(), cfg.output_dir.display());
    }
    Ok(0)
}

fn cmd_report(a: ReportArgs) -> Result<i32> {
    let records = harness::read_csv(&a.input)?;
    let out = a.out.unwrap_or_else(|| {
        a.input
            .parent()
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("."))
    });
    let files = harness::emit_report(&records, &out)?;
    for f in files {
        println!("{}", f.display());
    }
    Ok(0)
}

fn report_line(out: &mut impl Write, name: &str, ok: bool, detail: &str) -> bool {
    let _ = writeln!(out, "[{}] {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn cmd_selftest(a: SelftestArgs) -> Result<i32> {
    if a.instances == 0 || a.max_size == 0 || a.max_size > 5 {
        return Err(Error::Config("selftest needs instances >= 1 and 1 <= max-size <= 5".into()));
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let mut all_ok = true;
    let (mut arith_bad, mut qubo_bad, mut reduced_worst) = (0usize, 0usize, 0.0f64);
    for k in 0..a.instances {
        let m = 1 + k % a.max_size;
        let inst = generate(harness::instance_seed(a.seed, m, k), m, Default::default())?;
        let oracle = brute_force(&inst)?;

        let plan = RegisterPlan::for_instance(&inst);
        let circuit = compose(&adder(&inst, &plan), &test_block(inst.capacity(), &plan))?;
        for x in 0..1usize << m {
            let s = QuantumState::basis(circuit.n_qubits(), x, Backend::StateVector)?;
            let amps = run(&circuit, s)?.amplitudes().map(<[_]>::to_vec).unwrap_or_default();
            let want = plan.basis_index(x, oracle.weight_of(x), !oracle.is_feasible(x));
            if (amps[want].norm() - 1.0).abs() > 1e-10 {
                arith_bad += 1;
            }
        }

        let penalty = 2.0 * inst.total_value() as f64;
        let model = build_qubo(&inst, penalty, Default::default())?;
        let table = model.energy_table();
        let (z, e) = table
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty table");
        if !oracle.is_best(model.data_mask(z)) || *e != -(oracle.best_value() as f64) {
            qubo_bad += 1;
        }

        let params = AnsatzParams::new(vec![0.7, -0.4], vec![0.3, 1.1])?;
        for method in [EncodingMethod::qubo(3.0), EncodingMethod::dephasing(5.0), EncodingMethod::Zeno] {
            if m > 3 && method.needs_channels() {
                continue;
            }
            let fast = ReducedEvaluator::new(&inst, &method)?.data_distribution(&params);
            let backend = if method.needs_channels() { Backend::Ensemble } else { Backend::StateVector };
            let slow = Simulator::new(&inst, &method, Evaluator::circuit(backend))?.data_distribution(&params)?;
            for (x, y) in fast.iter().zip(&slow) {
                reduced_worst = reduced_worst.max((x - y).abs());
            }
        }
    }
    all_ok &= report_line(&mut out, "adder + comparator vs oracle", arith_bad == 0, &format!("{arith_bad} mismatched basis inputs"));
    all_ok &= report_line(&mut out, "QUBO ground state vs oracle", qubo_bad == 0, &format!("{qubo_bad} mismatched instances"));
    all_ok &= report_line(
        &mut out,
        "reduced vs gate-level distributions",
        reduced_worst < 1e-10,
        &format!("max deviation {reduced_worst:.2e}"),
    );
    Ok(if all_ok { 0 } else { 1 })
}
