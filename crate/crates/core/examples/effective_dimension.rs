//! Effective dimension of a circuit, with the identity-Fisher closed form for
//! reference.
//!
//! ```bash
//! cargo run --release -p evoqas --example effective_dimension -- ['<architecture json>'] [n]
//! ```

use evoqas::information::{effective_dimension_from_fisher, kappa};
use evoqas::{decode, effective_dimension, ArchitectureSpec, EdParams, ProbabilisticModel, QuantumModel};
use nalgebra::DMatrix;

const DEFAULT_ARCH: &str =
    r#"{"encoding_layer":[[1,0],[0,1,0]],"variational_layer":[[[0,1],[1,0,0]],[[1,0],[0,1,0]]]}"#;

fn main() -> evoqas::Result<()> {
    let mut args = std::env::args().skip(1);
    let arch: ArchitectureSpec = serde_json::from_str(&args.next().unwrap_or(DEFAULT_ARCH.into()))?;
    let n = args.next().and_then(|a| a.parse().ok()).unwrap_or(1000);

    let model = QuantumModel::new(decode(&arch, 4)?);
    let d = model.num_params();
    let params = EdParams { n, ..EdParams::default() };
    let ed = effective_dimension(&model, &params, 3)?;
    println!("d = {d}, gamma = {}, n = {n}, kappa = {:.4}", ed.gamma, ed.kappa);
    println!("effective dimension {:.4} ({:.1}% of d)", ed.value, 100.0 * ed.normalized());

    let k = kappa(1.0, n)?;
    let ident = vec![DMatrix::<f64>::identity(d, d)];
    println!(
        "identity Fisher: {:.6} (closed form {:.6})",
        effective_dimension_from_fisher(&ident, d, 1.0, n)?,
        d as f64 * k.ln_1p() / k.ln()
    );
    Ok(())
}
