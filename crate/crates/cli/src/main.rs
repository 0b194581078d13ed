//! `mlpctl`: train, evaluate, benchmark and simulate small perceptrons.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 data-integrity error,
//! 4 training diverged.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mlp_core::data::{format_float, lint_dataset, load_dataset_csv, read_weights, write_atomic, write_weights, Fixture, SENSOR_RANGE_M};
use mlp_core::mlp::{em, evaluate, train, Dataset, MlpNetwork, Mode, TargetCodec, TrainConfig};
use mlp_core::resource::{
    benchmark_sweep, compare_printed_laws, estimate_sram_with_budget, fit_module, load_paper_timing_fixture, timing_csv,
    ModuleTag, DEFAULT_REPS, DEFAULT_SRAM_BUDGET,
};
use mlp_core::robot::{simulate, EpisodeSettings, RobotState, WorldMap, DEFAULT_DT, DEFAULT_DURATION};
use mlp_core::Error;

const EXIT_USAGE: u8 = 2;
const EXIT_INTEGRITY: u8 = 3;
const EXIT_DIVERGED: u8 = 4;

#[derive(Parser)]
#[command(name = "mlpctl", version, about = "Matrix-form MLP trainer, benchmark and robot simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a network and write its weights and MSE trace.
    Train(TrainArgs),
    /// Run a trained network over a dataset.
    Eval(EvalArgs),
    /// Time the training modules against the hidden-layer size.
    Bench(BenchArgs),
    /// Drive the simulated robot with a trained controller.
    Sim(SimArgs),
    /// Itemised working-memory estimate for an architecture.
    Memory(MemoryArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct DataSource {
    /// Embedded dataset: xor, robot1, robot2 or robot3.
    #[arg(long)]
    fixture: Option<Fixture>,
    /// Dataset CSV with header in1..inP,out1..outM.
    #[arg(long, value_name = "PATH")]
    data: Option<PathBuf>,
}

impl DataSource {
    fn load(&self) -> anyhow::Result<Dataset> {
        let data = match (&self.fixture, &self.data) {
            (Some(f), _) => f.dataset()?,
            (None, Some(p)) => load_dataset_csv(p).with_context(|| format!("reading {}", p.display()))?,
            (None, None) => unreachable!("clap enforces one source"),
        };
        if data.input_width() == 3 {
            for w in lint_dataset(&data, SENSOR_RANGE_M) {
                eprintln!("warning: {w}");
            }
        }
        Ok(data)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CodecChoice {
    /// Fit when any target lies outside [0, 1].
    Auto,
    Fit,
    Identity,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    source: DataSource,
    /// Layer widths, input first, e.g. 2,2,1.
    #[arg(long, value_delimiter = ',', required = true)]
    widths: Vec<usize>,
    #[arg(long, default_value_t = 0.9)]
    eta: f32,
    #[arg(long, default_value_t = 0.8)]
    alpha: f32,
    /// Samples per update; defaults to the whole dataset. 1 selects online training.
    #[arg(long)]
    batch: Option<usize>,
    #[arg(long, default_value_t = 2000)]
    epochs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stop once an epoch's MSE reaches this value.
    #[arg(long)]
    mse_stop: Option<f32>,
    /// Reshuffle samples every epoch regardless of batch size.
    #[arg(long)]
    online: bool,
    #[arg(long, value_enum, default_value_t = CodecChoice::Auto)]
    codec: CodecChoice,
    /// Weights file to write.
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
    /// MSE trace CSV; defaults to the weights path with `.mse.csv` appended.
    #[arg(long, value_name = "PATH")]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, value_name = "PATH")]
    weights: PathBuf,
    #[command(flatten)]
    source: DataSource,
    /// Per-sample CSV; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Modules to time (ffm1, ffm2, em, bpm1, bpm2); all when omitted.
    #[arg(long, value_delimiter = ',')]
    module: Vec<ModuleTag>,
    /// Hidden sizes as start:end:step.
    #[arg(long, default_value = "2:38:2")]
    h1: String,
    #[arg(long, default_value_t = DEFAULT_REPS)]
    reps: usize,
    /// Fit the embedded reference timing table instead of timing this host.
    #[arg(long)]
    paper_fixture: bool,
    /// Samples CSV.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, value_name = "PATH")]
    weights: PathBuf,
    /// Built-in map (empty, bordered, cluttered) or a map file.
    #[arg(long, default_value = "empty")]
    map: String,
    /// Episode length in seconds.
    #[arg(long, default_value_t = DEFAULT_DURATION)]
    duration: f64,
    #[arg(long, default_value_t = DEFAULT_DT)]
    dt: f64,
    /// Start pose overrides, meters and radians.
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    y: Option<f64>,
    #[arg(long)]
    heading: Option<f64>,
    /// Trajectory CSV.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MemoryArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    widths: Vec<usize>,
    #[arg(long, default_value_t = 4)]
    batch: usize,
    #[arg(long, default_value_t = DEFAULT_SRAM_BUDGET)]
    budget: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Sim(a) => cmd_sim(a),
        Command::Memory(a) => cmd_memory(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.chain().find_map(|c| c.downcast_ref::<Error>()) {
        Some(Error::Integrity(_)) => EXIT_INTEGRITY,
        Some(Error::Diverged { .. }) => EXIT_DIVERGED,
        _ => EXIT_USAGE,
    }
}

fn cmd_train(a: TrainArgs) -> anyhow::Result<()> {
    let data = a.source.load()?;
    let codec = match a.codec {
        CodecChoice::Identity => TargetCodec::IDENTITY,
        CodecChoice::Fit => TargetCodec::fit(&data.targets)?,
        CodecChoice::Auto => {
            if data.targets.as_slice().iter().all(|t| (0.0..=1.0).contains(t)) {
                TargetCodec::IDENTITY
            } else {
                TargetCodec::fit(&data.targets)?
            }
        }
    };
    let encoded = data.with_targets(codec.encode(&data.targets))?;
    let batch_size = a.batch.unwrap_or(data.len());
    let config = TrainConfig {
        eta: a.eta,
        alpha: a.alpha,
        batch_size,
        max_epochs: a.epochs,
        mode: if a.online || batch_size == 1 { Mode::Online } else { Mode::Batch },
        seed: a.seed,
        mse_stop: a.mse_stop,
    };
    let mut net = MlpNetwork::init(&a.widths, a.seed)?;
    let report = train(&mut net, &encoded, &config)?;

    let trace_path = a.trace.unwrap_or_else(|| with_suffix(&a.out, ".mse.csv"));
    let mut trace = String::from("epoch,mse\n");
    for (i, m) in report.trace.iter().enumerate() {
        trace.push_str(&format!("{},{}\n", i + 1, format_float(*m as f64)));
    }
    write_weights(&a.out, &net, codec).with_context(|| format!("writing {}", a.out.display()))?;
    write_atomic(&trace_path, trace.as_bytes()).with_context(|| format!("writing {}", trace_path.display()))?;

    if !codec.is_identity() {
        let (lo, hi) = codec.range();
        println!("codec {lo} {hi}");
    }
    println!("epochs {}", report.epochs());
    println!("final_mse {}", format_float(report.final_mse as f64));
    Ok(())
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = OsString::from(path.as_os_str());
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_eval(a: EvalArgs) -> anyhow::Result<()> {
    let (net, codec) = read_weights(&a.weights).with_context(|| format!("reading {}", a.weights.display()))?;
    let data = a.source.load()?;
    if data.input_width() != net.inputs() || data.target_width() != net.outputs() {
        return Err(Error::InvalidShape(format!(
            "dataset is {} -> {} but network widths are {:?}",
            data.input_width(),
            data.target_width(),
            net.widths()
        ))
        .into());
    }
    let encoded = data.with_targets(codec.encode(&data.targets))?;
    let raw = net.predict(&encoded.inputs)?;
    let error = em(&raw, &encoded.targets)?;
    let outputs = codec.decode(&raw);

    let m = net.outputs();
    let mut csv = String::from("sample");
    for j in 1..=m {
        csv.push_str(&format!(",out{j}"));
    }
    for j in 1..=m {
        csv.push_str(&format!(",target{j}"));
    }
    csv.push_str(",error\n");
    for s in 0..data.len() {
        csv.push_str(&(s + 1).to_string());
        for j in 0..m {
            csv.push(',');
            csv.push_str(&format_float(outputs.get(j, s) as f64));
        }
        for j in 0..m {
            csv.push(',');
            csv.push_str(&format_float(data.targets.get(j, s) as f64));
        }
        let half_sq: f32 = error.column(s).iter().map(|e| e * e).sum::<f32>() / 2.0;
        csv.push(',');
        csv.push_str(&format_float(half_sq as f64));
        csv.push('\n');
    }
    let mse = evaluate(&net, &encoded)?;
    match &a.out {
        Some(p) => {
            write_atomic(p, csv.as_bytes()).with_context(|| format!("writing {}", p.display()))?;
            println!("mse {}", format_float(mse as f64));
        }
        None => {
            print!("{csv}");
            eprintln!("mse {}", format_float(mse as f64));
        }
    }
    Ok(())
}

fn parse_range(spec: &str) -> anyhow::Result<Vec<usize>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .with_context(|| format!("invalid range {spec:?}"))?;
    let (start, end, step) = match nums[..] {
        [v] => (v, v, 1),
        [s, e] => (s, e, 1),
        [s, e, st] => (s, e, st),
        _ => bail!("range must be start[:end[:step]], got {spec:?}"),
    };
    if start == 0 || step == 0 || end < start {
        bail!("range {spec:?} must be positive, ascending and have a positive step");
    }
    Ok((start..=end).step_by(step).collect())
}

fn cmd_bench(a: BenchArgs) -> anyhow::Result<()> {
    let modules = if a.module.is_empty() { ModuleTag::ALL.to_vec() } else { a.module.clone() };
    let samples = if a.paper_fixture {
        load_paper_timing_fixture()?
            .into_iter()
            .filter(|s| modules.contains(&s.module))
            .collect()
    } else {
        let h1 = parse_range(&a.h1)?;
        let mut all = Vec::new();
        for &m in &modules {
            all.extend(benchmark_sweep(m, &h1, a.reps)?);
        }
        all
    };
    if let Some(p) = &a.out {
        write_atomic(p, timing_csv(&samples).as_bytes()).with_context(|| format!("writing {}", p.display()))?;
    }

    println!("module,slope_ms_per_neuron,intercept_ms,r_squared,points");
    for &m in &modules {
        let fit = fit_module(&samples, m)?;
        println!(
            "{},{},{},{},{}",
            m,
            format_float(fit.slope),
            format_float(fit.intercept),
            format_float(fit.r_squared),
            fit.points
        );
    }
    if a.paper_fixture {
        let full = load_paper_timing_fixture()?;
        println!();
        println!("printed laws versus refit:");
        for c in compare_printed_laws(&full)?.iter().filter(|c| modules.contains(&c.printed.module)) {
            println!(
                "{}: printed t = {}·H + {}; refit t = {:.4}·H + {:.4} (R² {:.4}); column mean {:.2}{}{}",
                c.printed.module,
                c.printed.slope,
                c.printed.intercept,
                c.refit.slope,
                c.refit.intercept,
                c.refit.r_squared,
                c.column_mean,
                if c.slope_mismatch { "; DISCREPANCY: printed slope disagrees with the data" } else { "" },
                if c.intercept_is_mean { "; printed intercept equals the column mean" } else { "" },
            );
        }
    }
    Ok(())
}

fn cmd_sim(a: SimArgs) -> anyhow::Result<()> {
    let (net, codec) = read_weights(&a.weights).with_context(|| format!("reading {}", a.weights.display()))?;
    let map = match WorldMap::builtin(&a.map) {
        Some(m) => m,
        None => {
            let text = fs::read_to_string(&a.map).with_context(|| {
                format!("{:?} is neither a built-in map ({}) nor a readable file", a.map, WorldMap::BUILTIN_NAMES.join(", "))
            })?;
            WorldMap::parse(&text).with_context(|| format!("parsing map {}", a.map))?
        }
    };
    let mut settings = EpisodeSettings::for_map(&map, a.duration, a.dt);
    let s = settings.start;
    settings.start = RobotState::new(a.x.unwrap_or(s.x), a.y.unwrap_or(s.y), a.heading.unwrap_or(s.heading));

    let result = simulate(&map, &net, &codec, &settings)?;
    if let Some(p) = &a.out {
        write_atomic(p, result.to_csv().as_bytes()).with_context(|| format!("writing {}", p.display()))?;
    }
    println!("map {}", map.name);
    println!("steps {}", result.trajectory.len());
    println!("completed {}", result.completed);
    println!("collisions {}", result.collisions);
    println!("path_length_m {:.4}", result.path_length());
    println!("net_displacement_m {:.4}", result.net_displacement());
    Ok(())
}

fn cmd_memory(a: MemoryArgs) -> anyhow::Result<()> {
    let est = estimate_sram_with_budget(&a.widths, a.batch, a.budget)?;
    for (label, bytes) in est.breakdown() {
        println!("{label:<4} {bytes:>8}");
    }
    println!("total {:>7}", est.total);
    println!("budget {:>6}", est.budget);
    println!("fits {}", est.fits);
    Ok(())
}
