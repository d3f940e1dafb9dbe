use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qsample_cli::bench::{parse_values, run_sweep, write_csv, Axis, SamplerKind, SweepSpec};
use qsample_cli::qaoa::{run_qaoa, QaoaConfig};
use qsample_cli::source::{load, Generator, GeneratorParams};
use qsample_cli::{counts_csv, run_sampler, Backend, CliError, CliResult};
use qsample_core::stats::{exact_distribution, tvd};
use qsample_core::{optimize_circuit, Circuit};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "qsample", version, about = "Gate-by-gate bitstring sampling of quantum circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(clap::Args)]
struct SourceArgs {
    /// OpenQASM 2.0 input file.
    #[arg(long)]
    qasm: Option<PathBuf>,
    #[arg(long, value_enum)]
    generator: Option<Generator>,
    #[command(flatten)]
    params: GeneratorParams,
}

#[derive(Subcommand)]
enum Command {
    /// Sample bitstrings from a circuit.
    Sample {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, value_enum, default_value_t = Backend::Statevector)]
        backend: Backend,
        #[arg(long, default_value_t = 1000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Bond-dimension cap for the mps backend.
        #[arg(long)]
        chi_max: Option<usize>,
        /// Merge single-qubit runs before sampling.
        #[arg(long)]
        optimize: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Time sampling across a parameter sweep and write CSV.
    Bench {
        #[arg(long, value_enum)]
        axis: Axis,
        /// `a,b,c` or `start:end[:step]`.
        #[arg(long)]
        values: String,
        #[arg(long, value_enum, default_value_t = Generator::Random)]
        family: Generator,
        #[command(flatten)]
        params: GeneratorParams,
        #[arg(long, value_enum, default_value_t = Backend::Statevector)]
        backend: Backend,
        #[arg(long, value_enum, default_value_t = SamplerKind::GateByGate)]
        sampler: SamplerKind,
        #[arg(long, default_value_t = 1000)]
        shots: u64,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        chi_max: Option<usize>,
        #[arg(long)]
        optimize: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Merge single-qubit runs and report the effect.
    Optimize {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also time sampling before and after with this many shots.
        #[arg(long, default_value_t = 0)]
        shots: u64,
        #[arg(long, value_enum, default_value_t = Backend::Statevector)]
        backend: Backend,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// QAOA MaxCut on a random graph with a grid parameter search.
    Qaoa {
        #[arg(long, default_value_t = 10)]
        nodes: usize,
        #[arg(long, default_value_t = 0.3)]
        edge_prob: f64,
        #[arg(long, default_value_t = 1)]
        layers: usize,
        /// Points per parameter axis.
        #[arg(long, default_value_t = 8)]
        grid_size: usize,
        #[arg(long, default_value_t = 100)]
        sweep_shots: u64,
        #[arg(long, default_value_t = 1000)]
        final_shots: u64,
        #[arg(long, value_enum, default_value_t = Backend::Mps)]
        backend: Backend,
        #[arg(long)]
        chi_max: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct OptimizeReport {
    n_qubits: usize,
    ops_before: usize,
    ops_after: usize,
    two_qubit_ops: usize,
    /// Distance between exact output distributions (up to 20 qubits).
    distribution_tvd: Option<f64>,
    seconds_before: Option<f64>,
    seconds_after: Option<f64>,
    speedup: Option<f64>,
}

fn write_output(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => File::create(path)?.write_all(text.as_bytes())?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    text
}

fn load_source(source: &SourceArgs, seed: u64) -> CliResult<Circuit> {
    load(source.qasm.as_deref(), source.generator, &source.params, seed)
}

fn optimize_report(circuit: &Circuit, backend: Backend, shots: u64, seed: u64) -> CliResult<OptimizeReport> {
    let optimized = optimize_circuit(circuit);
    let unitary = !circuit.is_non_unitary() && !circuit.ops().iter().any(|op| op.kind.is_channel());
    let distribution_tvd = if unitary && circuit.n_qubits() <= 20 {
        Some(tvd(&exact_distribution(circuit)?, &exact_distribution(&optimized)?))
    } else {
        None
    };
    let (mut before, mut after) = (None, None);
    if shots > 0 {
        before = Some(run_sampler(circuit, backend, shots, seed, None)?.runtime_s);
        after = Some(run_sampler(&optimized, backend, shots, seed, None)?.runtime_s);
    }
    Ok(OptimizeReport {
        n_qubits: circuit.n_qubits(),
        ops_before: circuit.len(),
        ops_after: optimized.len(),
        two_qubit_ops: circuit.count_two_qubit(),
        distribution_tvd,
        seconds_before: before,
        seconds_after: after,
        speedup: before.zip(after).map(|(b, a)| b / a),
    })
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Sample { source, backend, shots, seed, chi_max, optimize, out, format } => {
            let mut circuit = load_source(&source, seed)?;
            if optimize {
                circuit = optimize_circuit(&circuit);
            }
            let result = run_sampler(&circuit, backend, shots, seed, chi_max)?;
            let text = match format {
                Format::Json => to_json(&result),
                Format::Csv => counts_csv(&result)?,
            };
            write_output(out.as_deref(), &text)
        }
        Command::Bench {
            axis,
            values,
            family,
            params,
            backend,
            sampler,
            shots,
            trials,
            seed,
            chi_max,
            optimize,
            out,
        } => {
            let values = parse_values(&values).map_err(CliError::Usage)?;
            let spec = SweepSpec {
                axis,
                values,
                family,
                params,
                backend,
                sampler,
                shots,
                trials,
                seed,
                chi_max,
                optimize,
            };
            let rows = run_sweep(&spec)?;
            match out {
                Some(path) => write_csv(&rows, File::create(path)?),
                None => write_csv(&rows, io::stdout().lock()),
            }
        }
        Command::Optimize { source, seed, shots, backend, out } => {
            let circuit = load_source(&source, seed)?;
            let report = optimize_report(&circuit, backend, shots, seed)?;
            write_output(out.as_deref(), &to_json(&report))
        }
        Command::Qaoa {
            nodes,
            edge_prob,
            layers,
            grid_size,
            sweep_shots,
            final_shots,
            backend,
            chi_max,
            seed,
            out,
        } => {
            let config = QaoaConfig {
                nodes,
                edge_prob,
                layers,
                grid_size,
                sweep_shots,
                final_shots,
                backend,
                chi_max,
                seed,
            };
            let report = run_qaoa(&config)?;
            write_output(out.as_deref(), &to_json(&report))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(3);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
