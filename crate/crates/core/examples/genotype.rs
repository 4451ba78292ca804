//! Genotype logits, softmax sampling, argmax decoding and mutation.
//!
//! ```bash
//! cargo run -p evoqas --example genotype -- [seed]
//! ```

use std::collections::BTreeMap;

use evoqas::architecture::softmax;
use evoqas::rng::stream;
use evoqas::{init_genotype, mutate, sample_architecture, SamplingMode};

fn main() -> evoqas::Result<()> {
    let seed = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(5);
    let mut rng = stream(seed, &[]);
    let g = init_genotype(2, &mut rng);
    println!("genotype  {}", serde_json::to_string(&g)?);
    println!("encoding rotation probabilities {:.3?}", softmax(&g.encoding_rot_logits));
    println!("argmax    {}", serde_json::to_string(&sample_architecture(&g, SamplingMode::Argmax, &mut rng))?);

    let mut counts = BTreeMap::new();
    for _ in 0..10_000 {
        let a = sample_architecture(&g, SamplingMode::Softmax, &mut rng);
        *counts.entry(serde_json::to_string(&a)?).or_insert(0usize) += 1;
    }
    let mut top: Vec<_> = counts.into_iter().collect();
    top.sort_by(|a, b| b.1.cmp(&a.1));
    println!("most frequent of {} sampled architectures:", top.len());
    for (a, c) in top.iter().take(5) {
        println!("  {c:>5}  {a}");
    }

    let child = mutate(&g, 0.02, &mut rng)?;
    let moved: f64 = g.logits().iter().zip(child.logits()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("sigma 0.02 mutation moves logits by at most {moved:.4}");
    Ok(())
}
