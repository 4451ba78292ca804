//! Desk-scale evolutionary search on 4 qubits with two variational layers.
//!
//! ```bash
//! cargo run --release -p evoqas --example evolve -- [generations] [seed]
//! ```

use std::time::Instant;

use evoqas::evolution::evolve_with;
use evoqas::{decode, EdParams, EvolutionConfig};

fn main() -> evoqas::Result<()> {
    let mut args = std::env::args().skip(1);
    let generations = args.next().and_then(|a| a.parse().ok()).unwrap_or(30);
    let seed = args.next().and_then(|a| a.parse().ok()).unwrap_or(7);

    let cfg = EvolutionConfig {
        population_size: 20,
        num_parents: 5,
        sigma: 0.02,
        num_generations: generations,
        n_qubits: 4,
        num_var_layers: 2,
        ed: EdParams {
            n: 1000,
            ..EdParams::default()
        },
        master_seed: seed,
        elitism: true,
    };

    let start = Instant::now();
    let record = evolve_with(&cfg, |s| {
        println!(
            "gen {:>3}  best {:.4}  mean {:.4}  p25 {:.4}  p75 {:.4}",
            s.generation, s.best_fitness, s.mean_fitness, s.p25, s.p75
        );
    })?;
    println!("elapsed {:.1?}", start.elapsed());

    let best = record.best().expect("non-empty population");
    println!("best effective dimension {:.4}", best.fitness.unwrap_or(0.0));
    println!("{}", serde_json::to_string(&best.sampled_arch)?);
    if let Some(arch) = &best.sampled_arch {
        print!("{}", decode(arch, cfg.n_qubits)?);
    }
    Ok(())
}
