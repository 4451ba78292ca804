//! Search-space sizes and an exhaustive decode of every one-layer architecture.
//!
//! ```bash
//! cargo run -p evoqas --example search_space -- [qubits]
//! ```

use std::collections::HashSet;

use evoqas::{decode, enumerate_search_space, ArchitectureSpec, Entangler, HLayer, LayerChoice, Rotation};

fn main() -> evoqas::Result<()> {
    let n_qubits = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(4);
    for layers in 0..=5 {
        println!("{layers} layers: {} architectures", enumerate_search_space(layers).unwrap());
    }

    let mut dumps = HashSet::new();
    for h_layer in [HLayer::WithH, HLayer::WithoutH] {
        for encoding_rot in Rotation::ALL {
            for entangler in Entangler::ALL {
                for rot in Rotation::ALL {
                    let a = ArchitectureSpec {
                        h_layer,
                        encoding_rot,
                        layers: vec![LayerChoice { entangler, rot }],
                    };
                    let c = decode(&a, n_qubits)?;
                    println!(
                        "{:<9}{:?}  {:?}+{:?}  {:>2} gates  {}",
                        format!("{h_layer:?}"),
                        encoding_rot,
                        entangler,
                        rot,
                        c.gates().len(),
                        serde_json::to_string(&a)?
                    );
                    dumps.insert(c.to_string());
                }
            }
        }
    }
    println!("{} distinct circuits on {n_qubits} qubits", dumps.len());
    Ok(())
}
