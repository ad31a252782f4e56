//! Command-line frontend: generate graphs, compute mappings, predict and
//! simulate timelines, compare them, emit kernel sources, and run batch
//! experiments.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use hetmap::experiment::{run_experiment, ExperimentConfig};
use hetmap::kernelgen::emit_kernel_tree;
use hetmap::mapper::{brute_force, cpu_only, simulated_annealing, SaConfig};
use hetmap::platform::{default_platform, DeviceKind, Platform};
use hetmap::predictor::{predict_with, Mapping, PredictorConfig};
use hetmap::simulator::{replay_report, simulate, SimConfig};
use hetmap::taskgraph::{self, GeneratorConfig, TaskGraph};
use hetmap::timeline::TimelineFile;

#[derive(Parser)]
#[command(
    name = "hetmap",
    about = "Task mapping workbench for heterogeneous CPU/GPU/FPGA platforms",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random annotated series-parallel task graph
    Generate(GenerateArgs),
    /// Compute a mapping and store it in the graph file
    Map(MapArgs),
    /// Predict the timeline of a mapped graph analytically
    Predict(PredictArgs),
    /// Simulate the execution of a mapped graph
    Simulate(SimulateArgs),
    /// Compare a predicted and a simulated timeline
    Compare(CompareArgs),
    /// Emit kernel sources and the host manifest for a mapped graph
    EmitKernels(EmitKernelsArgs),
    /// Run a batch sweep: generate, map, predict, simulate, compare
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct PlatformArgs {
    /// Platform description file (JSON)
    #[arg(long)]
    platform: Option<PathBuf>,
    /// Use these devices from the built-in platform, e.g. `cpu,gpu`
    #[arg(long, value_delimiter = ',')]
    devices: Option<Vec<DeviceFilter>>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DeviceFilter {
    Cpu,
    Gpu,
    Fpga,
}

impl PlatformArgs {
    fn resolve(&self) -> Result<Platform> {
        if let Some(path) = &self.platform {
            if self.devices.is_some() {
                bail!("--platform and --devices are mutually exclusive");
            }
            return Platform::load(path)
                .with_context(|| format!("loading platform {}", path.display()));
        }
        let mut platform = default_platform();
        if let Some(filters) = &self.devices {
            platform.devices.retain(|d| {
                filters.iter().any(|f| match f {
                    DeviceFilter::Cpu => matches!(d.kind, DeviceKind::Cpu { .. }),
                    DeviceFilter::Gpu => matches!(d.kind, DeviceKind::Gpu { .. }),
                    DeviceFilter::Fpga => matches!(d.kind, DeviceKind::Fpga { .. }),
                })
            });
            if platform.devices.is_empty() || !platform.devices.iter().any(|d| d.is_cpu()) {
                bail!("--devices must include cpu");
            }
        }
        Ok(platform)
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// Number of tasks
    #[arg(long)]
    nodes: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Data volume per edge in bytes
    #[arg(long, default_value_t = 10_000_000)]
    data_bytes: u64,
    #[arg(long, default_value_t = 2.0)]
    mu: f64,
    #[arg(long, default_value_t = 0.5)]
    sigma: f64,
    /// Fraction of tasks with parallelizability exactly 1
    #[arg(long, default_value_t = 0.5)]
    parallel_fraction: f64,
    /// Probability of a series split per expansion step
    #[arg(long, default_value_t = 0.5)]
    series_probability: f64,
    /// Output graph file
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Cpu,
    Sa,
    Brute,
}

#[derive(Args)]
struct MapArgs {
    /// Graph file to map
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Algo::Sa)]
    algo: Algo,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Geometric cooling factor
    #[arg(long, default_value_t = 0.95)]
    q: f64,
    /// Iterations per temperature level
    #[arg(long, default_value_t = 50)]
    iters: u32,
    #[arg(long, default_value_t = 10)]
    restarts: u32,
    /// Final-temperature exponent
    #[arg(long, default_value_t = 2.0)]
    k: f64,
    #[command(flatten)]
    platform: PlatformArgs,
    /// Write the mapped graph here instead of updating the input in place
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PredictArgs {
    /// Mapped graph file
    #[arg(short, long)]
    input: PathBuf,
    #[command(flatten)]
    platform: PlatformArgs,
    /// Charge transfers on the source device as well
    #[arg(long)]
    serialize_source_transfers: bool,
    /// Disable streaming supernodes
    #[arg(long)]
    force_ram: bool,
    /// Write the timeline here (JSON); prints the makespan either way
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Mapped graph file
    #[arg(short, long)]
    input: PathBuf,
    #[command(flatten)]
    platform: PlatformArgs,
    /// FIFO capacity between FPGA kernels, in elements
    #[arg(long, default_value_t = 20)]
    fifo_capacity: u32,
    /// Bytes per element for FIFO arithmetic
    #[arg(long, default_value_t = 1)]
    element_bytes: u64,
    /// Serialize host transfers with FPGA compute
    #[arg(long)]
    no_overlap: bool,
    /// Write the timeline here (JSON); prints a report either way
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Predicted timeline file
    #[arg(long)]
    predicted: PathBuf,
    /// Simulated timeline file
    #[arg(long)]
    simulated: PathBuf,
}

#[derive(Args)]
struct EmitKernelsArgs {
    /// Mapped graph file
    #[arg(short, long)]
    input: PathBuf,
    #[command(flatten)]
    platform: PlatformArgs,
    /// Output directory for kernel sources and manifest.json
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    graphs: u32,
    #[arg(long)]
    nodes: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    platform: PlatformArgs,
    /// Output directory; defaults to $HETMAP_OUT or ./hetmap_out
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0.95)]
    q: f64,
    #[arg(long, default_value_t = 50)]
    iters: u32,
    #[arg(long, default_value_t = 10)]
    restarts: u32,
    #[arg(long, default_value_t = 2.0)]
    k: f64,
    /// Data volume per edge in bytes
    #[arg(long, default_value_t = 10_000_000)]
    data_bytes: u64,
    /// Also write per-case timeline files
    #[arg(long)]
    write_timelines: bool,
}

fn load_mapped_graph(path: &Path) -> Result<(TaskGraph, Mapping)> {
    let (graph, mapping) = taskgraph::load(path)
        .with_context(|| format!("loading graph {}", path.display()))?;
    let records = mapping.context("mapping missing: run `hetmap map` first")?;
    Ok((graph, Mapping::from_records(&records)))
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Generate(args) => {
            let config = GeneratorConfig {
                node_count: args.nodes,
                data_bytes: args.data_bytes,
                lognormal_mu: args.mu,
                lognormal_sigma: args.sigma,
                parallel_full_fraction: args.parallel_fraction,
                series_probability: args.series_probability,
                seed: args.seed,
            };
            let graph = taskgraph::generate(&config)?;
            taskgraph::save(&args.output, &graph, None)?;
            println!(
                "generated {} tasks / {} edges -> {}",
                graph.tasks().len(),
                graph.edges().len(),
                args.output.display()
            );
        }
        Command::Map(args) => {
            let (graph, _) = taskgraph::load(&args.input)?;
            let platform = args.platform.resolve()?;
            let mapping = match args.algo {
                Algo::Cpu => cpu_only(&graph, &platform),
                Algo::Brute => brute_force(&graph, &platform)?,
                Algo::Sa => {
                    let config = SaConfig {
                        q: args.q,
                        iterations_per_level: args.iters,
                        restarts: args.restarts,
                        k: args.k,
                        seed: args.seed,
                        ..Default::default()
                    };
                    let result = simulated_annealing(&graph, &platform, &config)?;
                    println!(
                        "annealing: makespan {:.6e} s, {} levels, {} accepted / {} rejected",
                        result.predicted_makespan,
                        result.temperature_levels,
                        result.accepted_moves,
                        result.rejected_moves
                    );
                    result.mapping
                }
            };
            let target = args.output.as_ref().unwrap_or(&args.input);
            taskgraph::save(target, &graph, Some(&mapping.to_records()))?;
            println!("mapping written -> {}", target.display());
        }
        Command::Predict(args) => {
            let (graph, mapping) = load_mapped_graph(&args.input)?;
            let platform = args.platform.resolve()?;
            let config = PredictorConfig {
                serialize_source_transfers: args.serialize_source_transfers,
                force_ram: args.force_ram,
            };
            let timeline = predict_with(&graph, &mapping, &platform, &config)?;
            println!("predicted makespan: {:.9} s", timeline.makespan);
            if let Some(path) = args.output {
                TimelineFile::new(&timeline, &[]).save(&path)?;
                println!("timeline -> {}", path.display());
            }
        }
        Command::Simulate(args) => {
            let (graph, mapping) = load_mapped_graph(&args.input)?;
            let platform = args.platform.resolve()?;
            let config = SimConfig {
                fifo_capacity: args.fifo_capacity,
                overlap_fpga_transfers: !args.no_overlap,
                element_bytes: args.element_bytes,
            };
            let result = simulate(&graph, &mapping, &platform, &config)?;
            print!("{}", replay_report(&result));
            println!("simulated makespan: {:.9} s", result.timeline.makespan);
            if let Some(path) = args.output {
                TimelineFile::new(&result.timeline, &result.decisions).save(&path)?;
                println!("timeline -> {}", path.display());
            }
        }
        Command::Compare(args) => {
            let predicted = TimelineFile::load(&args.predicted)?;
            let simulated = TimelineFile::load(&args.simulated)?;
            println!("task   predicted window          simulated window         shift");
            for row in &predicted.tasks {
                if let Some(other) = simulated.tasks.iter().find(|r| r.task == row.task) {
                    println!(
                        "{:<5} [{:>10.6}, {:>10.6}]  [{:>10.6}, {:>10.6}]  {:+.6}",
                        row.task.to_string(),
                        row.start,
                        row.finish,
                        other.start,
                        other.finish,
                        other.finish - row.finish
                    );
                }
            }
            let rel_error = if simulated.makespan > 0.0 {
                (predicted.makespan - simulated.makespan).abs() / simulated.makespan
            } else {
                0.0
            };
            println!(
                "makespan: predicted {:.9} s, simulated {:.9} s",
                predicted.makespan, simulated.makespan
            );
            println!("relative error: {:.6}", rel_error);
        }
        Command::EmitKernels(args) => {
            let (graph, mapping) = load_mapped_graph(&args.input)?;
            let platform = args.platform.resolve()?;
            let manifest = emit_kernel_tree(&graph, &mapping, &platform, &args.output)?;
            println!(
                "emitted {} kernels + manifest.json -> {}",
                manifest.launches.len(),
                args.output.display()
            );
        }
        Command::Experiment(args) => {
            let platform = args.platform.resolve()?;
            let out_dir = args
                .out
                .or_else(|| std::env::var_os("HETMAP_OUT").map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("hetmap_out"));
            let mut config = ExperimentConfig::new(args.graphs, args.nodes, args.seed, platform);
            config.generator.data_bytes = args.data_bytes;
            config.sa = SaConfig {
                q: args.q,
                iterations_per_level: args.iters,
                restarts: args.restarts,
                k: args.k,
                seed: args.seed,
                ..Default::default()
            };
            config.out_dir = Some(out_dir.clone());
            config.write_timelines = args.write_timelines;
            let report = run_experiment(&config)?;
            let a = &report.aggregates;
            println!("cases: {}", report.cases.len());
            println!(
                "improvement (simulated): rate {:.2}, mean {:.4}, max {:.4}",
                a.improvement_rate_simulated, a.mean_improvement_simulated, a.max_improvement_simulated
            );
            println!(
                "relative error: cpu mean {:.4} median {:.4}, sa mean {:.4} median {:.4}",
                a.mean_rel_error_cpu, a.median_rel_error_cpu, a.mean_rel_error_sa, a.median_rel_error_sa
            );
            println!("results -> {}", out_dir.display());
        }
    }
    Ok(())
}
