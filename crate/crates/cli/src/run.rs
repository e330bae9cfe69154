//! Orchestration of the simulation verbs.

use std::path::Path;

use planar_qec::layout::{as_indexed, Arrangement};
use planar_qec::rng::derive_seed;
use planar_qec::{
    arrangement_ensemble_stats, estimate_pseudothreshold, optimize_layout, random_arrangement, sweep,
    ArrangementStrategy, CurvePoint, DecoderMode, PlanarLattice, QubitSpec, SweepConfig,
};
use serde::Serialize;

use crate::calibration::{ingest_calibration, CalibrationSummary};
use crate::config::{ArrangementChoice, ExperimentConfig, QubitSource};
use crate::error::CliError;
use crate::output;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verb {
    Sweep,
    Pseudothreshold,
    Ensemble,
    OptimizeLayout,
}

impl Verb {
    pub fn name(self) -> &'static str {
        match self {
            Verb::Sweep => "sweep",
            Verb::Pseudothreshold => "pseudothreshold",
            Verb::Ensemble => "ensemble",
            Verb::OptimizeLayout => "optimize-layout",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveSummary {
    pub label: String,
    pub curve: String,
    pub file: String,
    pub distance: usize,
    pub decoder: DecoderMode,
    pub arrangement: ArrangementStrategy,
    pub qubit_ids: Vec<u32>,
    pub pseudothreshold: Option<f64>,
    pub pseudothreshold_note: Option<String>,
    /// Pseudo-threshold relative to the first curve at the same distance.
    pub ratio_to_first: Option<f64>,
    pub points: Vec<CurvePoint>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleSummary {
    pub label: String,
    pub file: String,
    pub distance: usize,
    pub decoder: DecoderMode,
    pub n_arrangements: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub std_error: f64,
    pub excluded: usize,
    pub ratio_to_first: Option<f64>,
    pub samples: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LayoutSummary {
    pub file: String,
    pub distance: usize,
    pub arrangement: ArrangementStrategy,
    pub qubit_ids: Vec<u32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub verb: &'static str,
    pub fingerprint: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub calibration: Option<CalibrationSummary>,
    pub curves: Vec<CurveSummary>,
    pub ensembles: Vec<EnsembleSummary>,
    pub layouts: Vec<LayoutSummary>,
}

/// Qubit parameters for the experiment, plus the calibration summary if any.
pub fn load_qubits(config: &ExperimentConfig) -> Result<(Vec<QubitSpec>, Option<CalibrationSummary>), CliError> {
    match &config.qubits {
        QubitSource::Calibration { path } => {
            let cal = ingest_calibration(path)?;
            let summary = cal.summary();
            Ok((cal.specs, Some(summary)))
        }
        QubitSource::Symmetric { t_us } => {
            let d = config.distances.iter().copied().max().unwrap_or(2);
            let n = d * d + (d - 1) * (d - 1);
            let specs = (0..n as u32)
                .map(|id| QubitSpec {
                    id,
                    t1: *t_us,
                    t2: *t_us,
                })
                .collect();
            Ok((specs, None))
        }
    }
}

pub fn arrange(
    lattice: &PlanarLattice,
    specs: &[QubitSpec],
    choice: ArrangementChoice,
    seed: u64,
) -> Result<Arrangement, CliError> {
    Ok(match choice {
        ArrangementChoice::AsIndexed => as_indexed(lattice, specs)?,
        ArrangementChoice::Random => random_arrangement(lattice, specs, derive_seed(seed, lattice.distance() as u64))?,
        ArrangementChoice::Optimized { rank_key } => optimize_layout(lattice, specs, rank_key)?,
    })
}

fn lattice(d: usize) -> Result<PlanarLattice, CliError> {
    PlanarLattice::new(d).map_err(|e| CliError::Config(e.to_string()))
}

fn ratio(value: Option<f64>, first: Option<f64>) -> Option<f64> {
    match (value, first) {
        (Some(v), Some(f)) if f > 0.0 => Some(v / f),
        _ => None,
    }
}

/// Runs `verb` and writes its result files into `out_dir`.
pub fn run_experiment(verb: Verb, config: &ExperimentConfig, out_dir: &Path, plot: bool) -> Result<Summary, CliError> {
    config.validate()?;
    let (specs, calibration) = load_qubits(config)?;
    let fingerprint = output::fingerprint(verb.name(), config);
    let seed = config.seed;
    let mut summary = Summary {
        verb: verb.name(),
        fingerprint: fingerprint.clone(),
        seed,
        config: config.clone(),
        calibration,
        curves: Vec::new(),
        ensembles: Vec::new(),
        layouts: Vec::new(),
    };

    match verb {
        Verb::Sweep | Verb::Pseudothreshold => {
            for &d in &config.distances {
                let lattice = lattice(d)?;
                let mut first: Option<Option<f64>> = None;
                for &choice in &config.arrangements {
                    let arrangement = arrange(&lattice, &specs, choice, seed)?;
                    for &decoder in &config.decoders {
                        let sweep_config = SweepConfig {
                            distance: d,
                            decoder,
                            noise: config.noise,
                            arrangement: arrangement.strategy(),
                            budget: config.budget,
                            seed,
                        };
                        let result = sweep(&sweep_config, &arrangement, &config.p_grid)?;
                        let (pth, note) = match estimate_pseudothreshold(&result.points) {
                            Ok(p) if p.degenerate => (Some(p.p_pth), Some("degenerate: curve lies on P_L = p".into())),
                            Ok(p) => (Some(p.p_pth), None),
                            Err(e) => (None, Some(e.to_string())),
                        };
                        let first_pth = *first.get_or_insert(pth);
                        let label = format!("d={d} {decoder} {}", choice.label());
                        let file = format!("curve_d{d}_{decoder}_{}.csv", choice.label());
                        let csv = output::curve_csv(
                            &result.points,
                            &fingerprint,
                            seed,
                            &result.fingerprint,
                            config.breakdown,
                        )?;
                        output::write_file(out_dir, &file, &csv)?;
                        summary.curves.push(CurveSummary {
                            label,
                            curve: result.fingerprint,
                            file,
                            distance: d,
                            decoder,
                            arrangement: arrangement.strategy(),
                            qubit_ids: arrangement.ids(),
                            pseudothreshold: pth,
                            pseudothreshold_note: note,
                            ratio_to_first: ratio(pth, first_pth),
                            points: result.points,
                        });
                    }
                }
            }
            if plot {
                let curves: Vec<(String, Vec<CurvePoint>)> = summary
                    .curves
                    .iter()
                    .map(|c| (c.label.clone(), c.points.clone()))
                    .collect();
                output::write_file(out_dir, "plot.svg", &output::render_svg(&curves, &fingerprint, seed))?;
            }
        }
        Verb::Ensemble => {
            if config.n_arrangements < 2 {
                return Err(CliError::Config(format!(
                    "ensemble needs at least 2 arrangements, got {}",
                    config.n_arrangements
                )));
            }
            for &d in &config.distances {
                lattice(d)?;
                let mut first: Option<Option<f64>> = None;
                for &decoder in &config.decoders {
                    let sweep_config = SweepConfig {
                        distance: d,
                        decoder,
                        noise: config.noise,
                        arrangement: ArrangementStrategy::Random { seed },
                        budget: config.budget,
                        seed,
                    };
                    let stats = arrangement_ensemble_stats(
                        &sweep_config,
                        &specs,
                        &config.p_grid,
                        config.n_arrangements,
                        derive_seed(seed, d as u64),
                    )?;
                    let mean = (stats.excluded < stats.samples.len()).then_some(stats.mean);
                    let first_mean = *first.get_or_insert(mean);
                    let file = format!("ensemble_d{d}_{decoder}.csv");
                    let mut csv = format!("# fingerprint={fingerprint} seed={seed}\nmember,p_pth\n");
                    for (k, s) in stats.samples.iter().enumerate() {
                        csv.push_str(&format!("{k},{}\n", s.map_or(String::new(), |v| v.to_string())));
                    }
                    output::write_file(out_dir, &file, &csv)?;
                    summary.ensembles.push(EnsembleSummary {
                        label: format!("d={d} {decoder} random"),
                        file,
                        distance: d,
                        decoder,
                        n_arrangements: config.n_arrangements,
                        mean: stats.mean,
                        std_dev: stats.std_dev,
                        std_error: stats.std_error,
                        excluded: stats.excluded,
                        ratio_to_first: ratio(mean, first_mean),
                        samples: stats.samples,
                    });
                }
            }
        }
        Verb::OptimizeLayout => {
            for &d in &config.distances {
                let lattice = lattice(d)?;
                for &choice in &config.arrangements {
                    let arrangement = arrange(&lattice, &specs, choice, seed)?;
                    let file = format!("layout_d{d}_{}.csv", choice.label());
                    output::write_file(out_dir, &file, &output::layout_csv(&arrangement, &fingerprint, seed)?)?;
                    summary.layouts.push(LayoutSummary {
                        file,
                        distance: d,
                        arrangement: arrangement.strategy(),
                        qubit_ids: arrangement.ids(),
                    });
                }
            }
        }
    }

    let json = serde_json::to_string_pretty(&summary).map_err(|e| CliError::Runtime(e.to_string()))?;
    output::write_file(out_dir, "summary.json", &(json + "\n"))?;
    Ok(summary)
}

/// Reads the configuration echoed in a summary JSON (or a bare config file).
pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let config = value.get("config").cloned().unwrap_or(value);
    serde_json::from_value(config).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}
