//! Run configuration, output files and the command implementations behind the
//! `evoqas` binary.
//!
//! Output formats (UTF-8, `\n` line endings, `.` decimal separator):
//!
//! - `history.csv`: `generation,best_ed,mean_ed,p25,p75`
//! - `ed_sweep.csv` (and `ed_sweep_<model_id>.csv` for baselines):
//!   `n,effective_dimension,normalized_ed`
//! - `spectrum.csv`: `model_id,n_qubits,d,eigenvalue`, one eigenvalue per line
//! - `spectrum_summary.csv`: `model_id,n_qubits,d,num_eigenvalues,lambda_max,frac_below`
//! - `best_genotype.json`, `architecture.json`: the genotype / one-hot JSON
//! - `best_circuit.txt`, `circuit.txt`: the circuit text dump
//! - `config.json`: the effective configuration, without the output directory

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::architecture::{decode, enumerate_search_space, sample_architecture, ArchitectureSpec, Genotype, SamplingMode};
use crate::baseline::{mlp_match_param_count, Activation, MlpSpec};
use crate::error::{Error, Result};
use crate::evolution::{evolve_with, EvolutionConfig, EvolutionRecord};
use crate::information::{
    eigenspectrum, fisher_samples, frac_below, kappa, normalize_fisher_matrices, normalized_spectra,
    effective_dimension_from_spectra,
};
use crate::model::{ProbabilisticModel, QuantumModel};
use crate::rng::{derive_seed, stream};
use crate::simulator::CircuitSpec;

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "EVOQAS_OUT";
pub const DEFAULT_OUT_ROOT: &str = "runs";

pub const QNN_ID: &str = "qnn";
pub const MLP_IDENTITY_ID: &str = "mlp_identity";
pub const MLP_RELU_ID: &str = "mlp_relu";

/// Where an analysed model comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSource {
    /// Inline one-hot architecture; decoded at whatever qubit count is asked for.
    Architecture(ArchitectureSpec),
    /// A genotype JSON file, turned into an architecture with `mode`
    /// (softmax draws use the run seed).
    GenotypeFile {
        path: PathBuf,
        #[serde(default = "argmax")]
        mode: SamplingMode,
    },
    /// A circuit text dump; fixed qubit count.
    CircuitFile(PathBuf),
}

fn argmax() -> SamplingMode {
    SamplingMode::Argmax
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub n_list: Vec<u64>,
    pub gamma: f64,
    pub n_qubits: usize,
    pub num_theta_samples: usize,
    pub k: usize,
    pub include_baselines: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            n_list: vec![500, 1000, 2000, 5000, 10_000],
            gamma: 1.0,
            n_qubits: 4,
            num_theta_samples: 100,
            k: 100,
            include_baselines: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    /// Qubit counts for the quantum model; also the input sizes of the baselines.
    pub qubit_list: Vec<usize>,
    pub num_theta_samples: usize,
    pub k: usize,
    /// `c` in the `frac_below` summary (fraction of eigenvalues below `c·λ_max`).
    pub threshold: f64,
    pub include_baselines: bool,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            qubit_list: vec![4, 5, 6, 7],
            num_theta_samples: 100,
            k: 100,
            threshold: 1e-2,
            include_baselines: true,
        }
    }
}

/// Everything a command needs; one JSON file per run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Seed for the analysis commands. `--seed` overrides both this and
    /// `evolution.master_seed`.
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    pub evolution: EvolutionConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSource>,
    pub sweep: SweepConfig,
    pub spectrum: SpectrumConfig,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.evolution.master_seed = seed;
        self
    }

    fn model_source(&self) -> Result<&ModelSource> {
        self.model
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("config has no `model` entry".into()))
    }

    /// Write `config.json` into `dir` (the output directory itself is omitted
    /// so the file is independent of where the run was written).
    fn write_to(&self, dir: &Path) -> Result<()> {
        let stored = RunConfig {
            out_dir: None,
            ..self.clone()
        };
        fs::write(dir.join("config.json"), stored.to_json()?)?;
        Ok(())
    }
}

/// Error split by exit code: 2 for configuration problems, 1 otherwise.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(Error),
    #[error("{0}")]
    Runtime(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

/// `explicit` if given, else the config's `out_dir`, else
/// `$EVOQAS_OUT/<command>-seed<seed>` (root defaulting to `runs`).
pub fn resolve_out_dir(explicit: Option<&Path>, cfg: &RunConfig, command: &str, seed: u64) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    if let Some(p) = &cfg.out_dir {
        return p.clone();
    }
    let root = std::env::var_os(OUT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_ROOT));
    root.join(format!("{command}-seed{seed}"))
}

fn load_architecture(source: &ModelSource, seed: u64) -> Result<Option<ArchitectureSpec>> {
    match source {
        ModelSource::Architecture(a) => Ok(Some(a.clone())),
        ModelSource::GenotypeFile { path, mode } => {
            let g: Genotype = serde_json::from_str(&fs::read_to_string(path)?)?;
            Ok(Some(sample_architecture(&g, *mode, &mut stream(seed, &[]))))
        }
        ModelSource::CircuitFile(_) => Ok(None),
    }
}

/// Resolve the configured model into a circuit on `n_qubits` qubits.
pub fn load_circuit(cfg: &RunConfig, n_qubits: usize) -> Result<CircuitSpec> {
    let source = cfg.model_source()?;
    match load_architecture(source, cfg.seed)? {
        Some(a) => decode(&a, n_qubits),
        None => {
            let ModelSource::CircuitFile(path) = source else {
                unreachable!("only circuit files lack an architecture")
            };
            let c: CircuitSpec = fs::read_to_string(path)?.parse()?;
            if c.n_qubits() != n_qubits {
                return Err(Error::InvalidArgument(format!(
                    "circuit file has {} qubits, {n_qubits} requested",
                    c.n_qubits()
                )));
            }
            Ok(c)
        }
    }
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

pub fn history_csv(record: &EvolutionRecord) -> String {
    let mut out = String::from("generation,best_ed,mean_ed,p25,p75\n");
    for s in &record.history {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            s.generation,
            fmt_f64(s.best_fitness),
            fmt_f64(s.mean_fitness),
            fmt_f64(s.p25),
            fmt_f64(s.p75)
        );
    }
    out
}

/// Run the evolutionary search and write the run directory.
pub fn cmd_evolve(cfg: &RunConfig, out_dir: &Path, verbose: bool) -> std::result::Result<EvolutionRecord, CliError> {
    cfg.evolution.validate().map_err(CliError::Config)?;
    let run = || -> Result<EvolutionRecord> {
        fs::create_dir_all(out_dir)?;
        cfg.write_to(out_dir)?;
        let record = evolve_with(&cfg.evolution, |s| {
            if verbose {
                eprintln!(
                    "generation {:>5}  best {:.6}  mean {:.6}",
                    s.generation, s.best_fitness, s.mean_fitness
                );
            }
        })?;
        fs::write(out_dir.join("history.csv"), history_csv(&record))?;
        if let Some(best) = record.best() {
            let mut json = serde_json::to_string_pretty(&best.genotype)?;
            json.push('\n');
            fs::write(out_dir.join("best_genotype.json"), json)?;
            if let Some(arch) = &best.sampled_arch {
                let mut json = serde_json::to_string_pretty(arch)?;
                json.push('\n');
                fs::write(out_dir.join("best_architecture.json"), json)?;
                let circuit = decode(arch, cfg.evolution.n_qubits)?;
                fs::write(out_dir.join("best_circuit.txt"), circuit.to_string())?;
            }
        }
        Ok(record)
    };
    run().map_err(CliError::Runtime)
}

/// One row of an effective-dimension sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub n: u64,
    pub effective_dimension: f64,
    pub normalized_ed: f64,
}

/// Sweep rows from raw Fisher samples of a `d`-parameter model. Values of `n`
/// with `κ ≤ 1` yield an error entry.
pub fn sweep_from_fisher(matrices: &[DMatrix<f64>], d: usize, n_list: &[u64], gamma: f64) -> Result<Vec<Result<SweepRow>>> {
    let spectra = normalized_spectra(matrices, d)?;
    Ok(n_list
        .iter()
        .map(|&n| {
            let kappa = kappa(gamma, n)?;
            let value = spectra
                .as_ref()
                .map(|s| effective_dimension_from_spectra(s, kappa))
                .unwrap_or(0.0);
            Ok(SweepRow {
                n,
                effective_dimension: value,
                normalized_ed: if d == 0 { 0.0 } else { value / d as f64 },
            })
        })
        .collect())
}

/// Sweep for any model, sharing one Fisher sample set across all `n`.
pub fn sweep_model<M>(m: &M, sweep: &SweepConfig, seed: u64) -> Result<Vec<Result<SweepRow>>>
where
    M: ProbabilisticModel + ?Sized,
{
    let d = m.num_params();
    let matrices: Vec<DMatrix<f64>> = if d == 0 {
        Vec::new()
    } else {
        fisher_samples(m, sweep.num_theta_samples, sweep.k, seed)?
            .into_iter()
            .map(|s| s.matrix)
            .collect()
    };
    sweep_from_fisher(&matrices, d, &sweep.n_list, sweep.gamma)
}

/// CSV for sweep rows; failed rows are skipped and reported to stderr.
pub fn sweep_csv(rows: &[Result<SweepRow>]) -> String {
    let mut out = String::from("n,effective_dimension,normalized_ed\n");
    for row in rows {
        match row {
            Ok(r) => {
                let _ = writeln!(out, "{},{},{}", r.n, fmt_f64(r.effective_dimension), fmt_f64(r.normalized_ed));
            }
            Err(e) => eprintln!("skipping sweep row: {e}"),
        }
    }
    out
}

/// Matched-parameter baselines for a model with `d` parameters and `n_inputs` inputs.
pub fn baselines(d: usize, n_inputs: usize) -> Result<Vec<(&'static str, MlpSpec)>> {
    let (sizes, _) = mlp_match_param_count(d, n_inputs)?;
    Ok(vec![
        (MLP_IDENTITY_ID, MlpSpec::new(sizes.clone(), Activation::Identity)?),
        (MLP_RELU_ID, MlpSpec::new(sizes, Activation::ReLU)?),
    ])
}

/// Effective dimension versus data size for the configured model and,
/// optionally, matched classical baselines.
/// Sweep rows for one model, keyed by model id.
pub type ModelSweep = (String, Vec<Result<SweepRow>>);

pub fn cmd_ed_sweep(cfg: &RunConfig, out_dir: &Path) -> std::result::Result<Vec<ModelSweep>, CliError> {
    if !(cfg.sweep.gamma > 0.0 && cfg.sweep.gamma <= 1.0) {
        return Err(CliError::Config(Error::InvalidArgument(format!(
            "sweep.gamma must lie in (0, 1], got {}",
            cfg.sweep.gamma
        ))));
    }
    let circuit = load_circuit(cfg, cfg.sweep.n_qubits).map_err(CliError::Config)?;
    let run = || -> Result<Vec<ModelSweep>> {
        fs::create_dir_all(out_dir)?;
        cfg.write_to(out_dir)?;
        let model = QuantumModel::new(circuit);
        let d = model.num_params();
        let mut results = vec![(QNN_ID.to_string(), sweep_model(&model, &cfg.sweep, derive_seed(cfg.seed, &[0]))?)];
        if cfg.sweep.include_baselines {
            for (i, (id, mlp)) in baselines(d, model.num_inputs())?.into_iter().enumerate() {
                let rows = sweep_model(&mlp, &cfg.sweep, derive_seed(cfg.seed, &[1 + i as u64]))?;
                results.push((id.to_string(), rows));
            }
        }
        for (id, rows) in &results {
            let name = if id == QNN_ID {
                "ed_sweep.csv".to_string()
            } else {
                format!("ed_sweep_{id}.csv")
            };
            fs::write(out_dir.join(name), sweep_csv(rows))?;
        }
        Ok(results)
    };
    run().map_err(CliError::Runtime)
}

/// All Fisher eigenvalues of one model at one size.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumBlock {
    pub model_id: String,
    pub n_qubits: usize,
    pub d: usize,
    /// Per-θ-sample ascending spectra, concatenated in sample order.
    pub eigenvalues: Vec<f64>,
}

impl SpectrumBlock {
    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(0.0, f64::max)
    }

    pub fn frac_below(&self, c: f64) -> f64 {
        frac_below(&self.eigenvalues, c)
    }
}

/// Spectra of the trace-normalised Fisher samples. A degenerate (all-zero)
/// sample set reports the raw, all-zero spectra.
pub fn spectrum_from_fisher(model_id: &str, n_qubits: usize, d: usize, matrices: &[DMatrix<f64>]) -> Result<SpectrumBlock> {
    let normalized = match normalize_fisher_matrices(matrices, d) {
        Ok(m) => m,
        Err(Error::DegenerateFisher) => matrices.to_vec(),
        Err(e) => return Err(e),
    };
    let mut eigenvalues = Vec::with_capacity(d * matrices.len());
    for m in &normalized {
        eigenvalues.extend(eigenspectrum(m)?);
    }
    Ok(SpectrumBlock {
        model_id: model_id.to_string(),
        n_qubits,
        d,
        eigenvalues,
    })
}

pub fn spectrum_for_model<M>(model_id: &str, n_qubits: usize, m: &M, cfg: &SpectrumConfig, seed: u64) -> Result<SpectrumBlock>
where
    M: ProbabilisticModel + ?Sized,
{
    let d = m.num_params();
    if d == 0 {
        return Ok(SpectrumBlock {
            model_id: model_id.to_string(),
            n_qubits,
            d,
            eigenvalues: Vec::new(),
        });
    }
    let matrices: Vec<DMatrix<f64>> = fisher_samples(m, cfg.num_theta_samples, cfg.k, seed)?
        .into_iter()
        .map(|s| s.matrix)
        .collect();
    spectrum_from_fisher(model_id, n_qubits, d, &matrices)
}

pub fn spectrum_csv(blocks: &[SpectrumBlock]) -> String {
    let mut out = String::from("model_id,n_qubits,d,eigenvalue\n");
    for b in blocks {
        for &l in &b.eigenvalues {
            let _ = writeln!(out, "{},{},{},{}", b.model_id, b.n_qubits, b.d, fmt_f64(l));
        }
    }
    out
}

pub fn spectrum_summary_csv(blocks: &[SpectrumBlock], c: f64) -> String {
    let mut out = String::from("model_id,n_qubits,d,num_eigenvalues,lambda_max,frac_below\n");
    for b in blocks {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            b.model_id,
            b.n_qubits,
            b.d,
            b.eigenvalues.len(),
            fmt_f64(b.lambda_max()),
            fmt_f64(b.frac_below(c))
        );
    }
    out
}

/// Fisher spectra of the configured model at each qubit count, plus matched
/// classical baselines with as many inputs as qubits.
pub fn cmd_spectrum(cfg: &RunConfig, out_dir: &Path) -> std::result::Result<Vec<SpectrumBlock>, CliError> {
    let circuits = cfg
        .spectrum
        .qubit_list
        .iter()
        .map(|&n| load_circuit(cfg, n).map(|c| (n, c)))
        .collect::<Result<Vec<_>>>()
        .map_err(CliError::Config)?;
    let run = || -> Result<Vec<SpectrumBlock>> {
        fs::create_dir_all(out_dir)?;
        cfg.write_to(out_dir)?;
        let mut blocks = Vec::new();
        for (n, circuit) in circuits {
            let model = QuantumModel::new(circuit);
            let d = model.num_params();
            blocks.push(spectrum_for_model(QNN_ID, n, &model, &cfg.spectrum, derive_seed(cfg.seed, &[n as u64, 0]))?);
            if cfg.spectrum.include_baselines && d >= n + 2 {
                for (i, (id, mlp)) in baselines(d, n)?.into_iter().enumerate() {
                    let seed = derive_seed(cfg.seed, &[n as u64, 1 + i as u64]);
                    blocks.push(spectrum_for_model(id, n, &mlp, &cfg.spectrum, seed)?);
                }
            }
        }
        fs::write(out_dir.join("spectrum.csv"), spectrum_csv(&blocks))?;
        fs::write(
            out_dir.join("spectrum_summary.csv"),
            spectrum_summary_csv(&blocks, cfg.spectrum.threshold),
        )?;
        Ok(blocks)
    };
    run().map_err(CliError::Runtime)
}

pub fn cmd_enumerate(num_var_layers: usize) -> std::result::Result<u128, CliError> {
    enumerate_search_space(num_var_layers).ok_or_else(|| {
        CliError::Config(Error::InvalidArgument(format!(
            "search space for {num_var_layers} layers overflows u128"
        )))
    })
}

/// Decode the configured model at `evolution.n_qubits` and, when `out_dir`
/// is given, write `circuit.txt` and `architecture.json` there.
pub fn cmd_sample_circuit(cfg: &RunConfig, out_dir: Option<&Path>) -> std::result::Result<CircuitSpec, CliError> {
    let source = cfg.model_source().map_err(CliError::Config)?;
    let arch = load_architecture(source, cfg.seed).map_err(CliError::Config)?;
    let circuit = load_circuit(cfg, cfg.evolution.n_qubits).map_err(CliError::Config)?;
    if let Some(dir) = out_dir {
        let write = || -> Result<()> {
            fs::create_dir_all(dir)?;
            fs::write(dir.join("circuit.txt"), circuit.to_string())?;
            if let Some(a) = &arch {
                let mut json = serde_json::to_string_pretty(a)?;
                json.push('\n');
                fs::write(dir.join("architecture.json"), json)?;
            }
            Ok(())
        };
        write().map_err(CliError::Runtime)?;
    }
    Ok(circuit)
}
