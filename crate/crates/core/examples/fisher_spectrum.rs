//! Fisher eigenvalue spectra of a circuit family at 4 to 7 qubits, next to
//! classical networks with a matched parameter count.
//!
//! ```bash
//! cargo run --release -p evoqas --example fisher_spectrum -- ['<architecture json>']
//! ```

use evoqas::cli::{baselines, spectrum_for_model, SpectrumConfig};
use evoqas::{decode, ArchitectureSpec, ProbabilisticModel, QuantumModel};

const DEFAULT_ARCH: &str =
    r#"{"encoding_layer":[[0,1],[0,1,0]],"variational_layer":[[[1,0],[0,1,0]],[[0,1],[0,1,0]]]}"#;

fn histogram(eigs: &[f64], bins: usize) -> String {
    let max = eigs.iter().copied().fold(0.0, f64::max).max(1e-300);
    let mut counts = vec![0usize; bins];
    for &l in eigs {
        counts[((l.max(0.0) / max * bins as f64) as usize).min(bins - 1)] += 1;
    }
    counts.iter().map(|c| format!("{:>5}", c)).collect()
}

fn main() -> evoqas::Result<()> {
    let arch: ArchitectureSpec =
        serde_json::from_str(&std::env::args().nth(1).unwrap_or(DEFAULT_ARCH.into()))?;
    let cfg = SpectrumConfig::default();

    println!("{:<14}{:>3}{:>4}{:>10}{:>12}   histogram over [0, lambda_max]", "model", "n", "d", "frac<1e-2", "lambda_max");
    for n in 4..=7 {
        let qnn = QuantumModel::new(decode(&arch, n)?);
        let mut blocks = vec![spectrum_for_model("qnn", n, &qnn, &cfg, 3)?];
        for (id, mlp) in baselines(qnn.num_params(), n)? {
            blocks.push(spectrum_for_model(id, n, &mlp, &cfg, 3)?);
        }
        for b in &blocks {
            println!(
                "{:<14}{:>3}{:>4}{:>10.3}{:>12.3}   {}",
                b.model_id,
                b.n_qubits,
                b.d,
                b.frac_below(cfg.threshold),
                b.lambda_max(),
                histogram(&b.eigenvalues, 8)
            );
        }
    }
    Ok(())
}
