use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use planar_qec::{DecoderMode, NoiseModel, RankKey, TrialBudget, DEFAULT_TRIALS};
use planar_qec_cli::calibration::ingest_calibration;
use planar_qec_cli::config::{parse_grid, ArrangementChoice, ExperimentConfig, QubitSource};
use planar_qec_cli::error::CliError;
use planar_qec_cli::run::{load_config, run_experiment, Summary, Verb};

#[derive(Parser)]
#[command(
    name = "planar-qec",
    version,
    about = "Planar surface-code simulation under per-qubit decoherence"
)]
struct Cli {
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate and summarize a calibration CSV.
    Ingest {
        path: PathBuf,
        /// Re-emit the parsed table (unclamped) to this file, `-` for stdout.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Logical error rate curves.
    Sweep(SimArgs),
    /// Curves plus their crossing with P_L = p.
    Pseudothreshold(SimArgs),
    /// Pseudo-threshold statistics over random arrangements.
    Ensemble(SimArgs),
    /// Emit placement tables.
    OptimizeLayout(SimArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ArrangementArg {
    AsIndexed,
    Random,
    Optimized,
}

#[derive(Clone, Copy, ValueEnum)]
enum RankKeyArg {
    T2,
    T1,
    MinT,
    PFail,
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseArg {
    Iid,
    Inid,
}

#[derive(Clone, Copy, ValueEnum)]
enum DecoderArg {
    Mwpm,
    Rmwpm,
}

#[derive(Args)]
struct SimArgs {
    /// Re-run the configuration echoed in a summary JSON.
    #[arg(long, conflicts_with_all = ["calibration", "symmetric_t_us"])]
    config: Option<PathBuf>,
    /// Calibration CSV (`qubit_id,t1_us,t2_us`).
    #[arg(long)]
    calibration: Option<PathBuf>,
    /// Use identical qubits with T1 = T2 = this value instead of a calibration.
    #[arg(long)]
    symmetric_t_us: Option<f64>,
    /// Master seed.
    #[arg(long, required_unless_present = "config")]
    seed: Option<u64>,
    #[arg(short = 'd', long = "distance", default_values_t = [3])]
    distances: Vec<usize>,
    #[arg(long = "decoder", value_enum, default_values_t = [DecoderArg::Mwpm])]
    decoders: Vec<DecoderArg>,
    #[arg(long, value_enum, default_value_t = NoiseArg::Inid)]
    noise: NoiseArg,
    #[arg(long = "arrangement", value_enum, default_values_t = [ArrangementArg::AsIndexed])]
    arrangements: Vec<ArrangementArg>,
    /// Ranking used by `--arrangement optimized`.
    #[arg(long, value_enum, default_value_t = RankKeyArg::T2)]
    rank_key: RankKeyArg,
    /// Reference time in microseconds for `--rank-key p-fail`.
    #[arg(long, default_value_t = 1.0)]
    t_ref: f64,
    /// `lo:hi:count` (log-spaced) or a comma-separated list.
    #[arg(long, default_value = "0.001:0.3:16")]
    p_grid: String,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: u64,
    /// Stop each point after this many failures (up to `--max-trials`).
    #[arg(long)]
    adaptive: Option<u64>,
    #[arg(long, requires = "adaptive")]
    max_trials: Option<u64>,
    /// Ensemble size.
    #[arg(long = "arrangements-count", default_value_t = 100)]
    n_arrangements: usize,
    /// Per-class failure counts in the curve CSVs.
    #[arg(long)]
    breakdown: bool,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    no_plot: bool,
}

impl SimArgs {
    fn to_config(&self) -> Result<ExperimentConfig, CliError> {
        if let Some(path) = &self.config {
            let mut config = load_config(path)?;
            if let Some(seed) = self.seed {
                config.seed = seed;
            }
            return Ok(config);
        }
        let qubits = match (&self.calibration, self.symmetric_t_us) {
            (Some(path), None) => QubitSource::Calibration { path: path.clone() },
            (None, Some(t_us)) => QubitSource::Symmetric { t_us },
            _ => {
                return Err(CliError::Config(
                    "exactly one of --calibration or --symmetric-t-us is required".into(),
                ))
            }
        };
        let rank_key = match self.rank_key {
            RankKeyArg::T2 => RankKey::T2,
            RankKeyArg::T1 => RankKey::T1,
            RankKeyArg::MinT => RankKey::MinT,
            RankKeyArg::PFail => RankKey::PFail { t_ref: self.t_ref },
        };
        let budget = match self.adaptive {
            Some(target_failures) => TrialBudget::Adaptive {
                target_failures,
                max_trials: self.max_trials.unwrap_or(self.trials),
            },
            None => TrialBudget::Fixed { trials: self.trials },
        };
        Ok(ExperimentConfig {
            qubits,
            distances: self.distances.clone(),
            decoders: self
                .decoders
                .iter()
                .map(|d| match d {
                    DecoderArg::Mwpm => DecoderMode::Mwpm,
                    DecoderArg::Rmwpm => DecoderMode::Rmwpm,
                })
                .collect(),
            noise: match self.noise {
                NoiseArg::Iid => NoiseModel::Iid,
                NoiseArg::Inid => NoiseModel::Inid,
            },
            arrangements: self
                .arrangements
                .iter()
                .map(|a| match a {
                    ArrangementArg::AsIndexed => ArrangementChoice::AsIndexed,
                    ArrangementArg::Random => ArrangementChoice::Random,
                    ArrangementArg::Optimized => ArrangementChoice::Optimized { rank_key },
                })
                .collect(),
            p_grid: parse_grid(&self.p_grid)?,
            budget,
            seed: self.seed.expect("clap enforces --seed"),
            n_arrangements: self.n_arrangements,
            breakdown: self.breakdown,
        })
    }
}

fn report(summary: &Summary, out: &Path) {
    for c in &summary.curves {
        match (c.pseudothreshold, &c.pseudothreshold_note) {
            (Some(p), _) => println!("{:<40} p_pth = {p:.6}", c.label),
            (None, Some(note)) => println!("{:<40} {note}", c.label),
            (None, None) => println!("{}", c.label),
        }
    }
    for e in &summary.ensembles {
        println!(
            "{:<40} mean p_pth = {:.6} sd = {:.6} se = {:.6} ({} unbracketed)",
            e.label, e.mean, e.std_dev, e.std_error, e.excluded
        );
    }
    for l in &summary.layouts {
        println!("d={} {}", l.distance, l.file);
    }
    println!("results in {} (fingerprint {})", out.display(), summary.fingerprint);
}

fn ingest(path: &Path, emit: Option<&Path>) -> Result<(), CliError> {
    let cal = ingest_calibration(path)?;
    let s = cal.summary();
    println!("qubits: {}", s.qubits);
    for (name, r) in [("T1", &s.t1_us), ("T2", &s.t2_us)] {
        println!(
            "{name} (us): min {} max {} mean {:.4} C_v {:.4}",
            r.min, r.max, r.mean, r.cv
        );
    }
    println!("clamped to the Ramsey limit: {}", s.clamped);
    match emit {
        Some(p) if p == Path::new("-") => cal.write_raw(std::io::stdout().lock())?,
        Some(p) => cal.write_raw(std::fs::File::create(p)?)?,
        None => {}
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (verb, args) = match cli.command {
        Command::Ingest { path, emit } => return ingest(&path, emit.as_deref()),
        Command::Sweep(a) => (Verb::Sweep, a),
        Command::Pseudothreshold(a) => (Verb::Pseudothreshold, a),
        Command::Ensemble(a) => (Verb::Ensemble, a),
        Command::OptimizeLayout(a) => (Verb::OptimizeLayout, a),
    };
    let config = args.to_config()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Runtime(e.to_string()))?;
    let summary = pool.install(|| run_experiment(verb, &config, &args.out, !args.no_plot))?;
    report(&summary, &args.out);
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => {
            let _ = std::io::stdout().flush();
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
