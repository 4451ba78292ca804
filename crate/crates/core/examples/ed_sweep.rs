//! Effective dimension against data size for one circuit and its classical
//! baselines.
//!
//! ```bash
//! cargo run --release -p evoqas --example ed_sweep -- ['<architecture json>'] [qubits]
//! ```

use evoqas::cli::{baselines, sweep_model, SweepConfig};
use evoqas::{decode, ArchitectureSpec, ProbabilisticModel, QuantumModel};

const DEFAULT_ARCH: &str =
    r#"{"encoding_layer":[[0,1],[0,1,0]],"variational_layer":[[[1,0],[0,1,0]],[[0,1],[0,1,0]]]}"#;

fn main() -> evoqas::Result<()> {
    let mut args = std::env::args().skip(1);
    let arch: ArchitectureSpec = serde_json::from_str(&args.next().unwrap_or(DEFAULT_ARCH.into()))?;
    let n_qubits = args.next().and_then(|a| a.parse().ok()).unwrap_or(4);

    let model = QuantumModel::new(decode(&arch, n_qubits)?);
    let sweep = SweepConfig::default();
    let mut models: Vec<(&str, Box<dyn ProbabilisticModel>)> = vec![("qnn", Box::new(model.clone()))];
    for (id, mlp) in baselines(model.num_params(), n_qubits)? {
        models.push((id, Box::new(mlp)));
    }

    println!("{:<14}{:>3}  {}", "model", "d", sweep.n_list.iter().map(|n| format!("{n:>9}")).collect::<String>());
    for (id, m) in &models {
        let rows = sweep_model(m.as_ref(), &sweep, 11)?;
        let cells: String = rows
            .iter()
            .map(|r| match r {
                Ok(r) => format!("{:>9.4}", r.normalized_ed),
                Err(_) => format!("{:>9}", "-"),
            })
            .collect();
        println!("{:<14}{:>3}  {cells}", id, m.num_params());
    }
    println!("(values are effective dimension / d)");
    Ok(())
}
