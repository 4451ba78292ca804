//! Parent selection and Gaussian mutation with effective-dimension fitness.
//!
//! Each generation: evaluate every individual that has no fitness yet, keep
//! the `num_parents` fittest, and refill the population with mutated copies
//! of the parents taken round-robin. With elitism the parents themselves are
//! carried over with their stored fitness.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::architecture::{
    decode, init_genotype, mutate, sample_architecture, ArchitectureSpec, Genotype, SamplingMode,
};
use crate::error::{Error, Result};
use crate::information::{effective_dimension, EdParams};
use crate::model::QuantumModel;
use crate::rng::{derive_seed, stream};

const INIT_TAG: u64 = 0;
const EVAL_TAG: u64 = 1;
const MUTATE_TAG: u64 = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub genotype: Genotype,
    pub sampled_arch: Option<ArchitectureSpec>,
    pub fitness: Option<f64>,
    pub eval_seed: u64,
}

impl Individual {
    pub fn new(genotype: Genotype, eval_seed: u64) -> Self {
        Self {
            genotype,
            sampled_arch: None,
            fitness: None,
            eval_seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionConfig {
    pub population_size: usize,
    pub num_parents: usize,
    pub sigma: f64,
    pub num_generations: usize,
    pub n_qubits: usize,
    pub num_var_layers: usize,
    #[serde(default)]
    pub ed: EdParams,
    pub master_seed: u64,
    #[serde(default = "default_elitism")]
    pub elitism: bool,
}

fn default_elitism() -> bool {
    true
}

impl Default for EvolutionConfig {
    /// Population 50, 10 parents, σ = 0.02, 1000 generations.
    fn default() -> Self {
        Self {
            population_size: 50,
            num_parents: 10,
            sigma: 0.02,
            num_generations: 1000,
            n_qubits: 4,
            num_var_layers: 2,
            ed: EdParams::default(),
            master_seed: 0,
            elitism: true,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidArgument(msg));
        if self.population_size == 0 || self.num_parents == 0 {
            return fail("population_size and num_parents must be positive".into());
        }
        if self.num_parents > self.population_size {
            return fail(format!(
                "num_parents {} exceeds population_size {}",
                self.num_parents, self.population_size
            ));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return fail(format!("sigma must be finite and >= 0, got {}", self.sigma));
        }
        if self.n_qubits == 0 || self.n_qubits > crate::simulator::MAX_QUBITS {
            return fail(format!("n_qubits {} outside 1..=12", self.n_qubits));
        }
        if self.num_var_layers > 0 && self.n_qubits < 2 {
            return fail("variational layers need at least 2 qubits".into());
        }
        if self.ed.num_theta_samples == 0 || self.ed.k == 0 {
            return fail("ed.num_theta_samples and ed.k must be positive".into());
        }
        crate::information::kappa(self.ed.gamma, self.ed.n)?;
        Ok(())
    }
}

/// Per-generation summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub p25: f64,
    pub median: f64,
    pub p75: f64,
    pub best_genotype: Genotype,
    pub best_arch: Option<ArchitectureSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionRecord {
    pub history: Vec<GenerationStats>,
    pub final_population: Vec<Individual>,
}

impl EvolutionRecord {
    /// Fittest member of the final population (first by index on ties).
    pub fn best(&self) -> Option<&Individual> {
        self.final_population.iter().fold(None, |best: Option<&Individual>, ind| match best {
            Some(b) if b.fitness.unwrap_or(0.0) >= ind.fitness.unwrap_or(0.0) => Some(b),
            _ => Some(ind),
        })
    }
}

/// Sample, decode and score an individual. Already-scored individuals are
/// returned untouched. Failures to compute the effective dimension score 0.
pub fn evaluate(ind: &Individual, cfg: &EvolutionConfig) -> Individual {
    if ind.fitness.is_some() {
        return ind.clone();
    }
    let mut rng = stream(ind.eval_seed, &[0]);
    let arch = sample_architecture(&ind.genotype, SamplingMode::Softmax, &mut rng);
    let fitness = decode(&arch, cfg.n_qubits)
        .and_then(|c| {
            effective_dimension(&QuantumModel::new(c), &cfg.ed, derive_seed(ind.eval_seed, &[1]))
        })
        .map(|r| r.value)
        .unwrap_or(0.0);
    Individual {
        genotype: ind.genotype.clone(),
        sampled_arch: Some(arch),
        fitness: Some(fitness),
        eval_seed: ind.eval_seed,
    }
}

/// The `num_parents` fittest individuals, ties broken by lower index.
pub fn select_parents(population: &[Individual], num_parents: usize) -> Result<Vec<Individual>> {
    if num_parents > population.len() {
        return Err(Error::InvalidArgument(format!(
            "cannot select {num_parents} parents from {} individuals",
            population.len()
        )));
    }
    let mut ranked: Vec<(usize, f64)> = population
        .iter()
        .enumerate()
        .map(|(i, ind)| ind.fitness.map(|f| (i, f)).ok_or(Error::Unevaluated { index: i }))
        .collect::<Result<_>>()?;
    // stable sort keeps index order among equal fitness
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
    Ok(ranked[..num_parents].iter().map(|&(i, _)| population[i].clone()).collect())
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn summarize(generation: usize, population: &[Individual]) -> GenerationStats {
    let fitness: Vec<f64> = population.iter().map(|i| i.fitness.unwrap_or(0.0)).collect();
    let mut sorted = fitness.clone();
    sorted.sort_by(f64::total_cmp);
    let best_idx = fitness
        .iter()
        .enumerate()
        .fold(0, |b, (i, &f)| if f > fitness[b] { i } else { b });
    GenerationStats {
        generation,
        best_fitness: fitness[best_idx],
        mean_fitness: fitness.iter().sum::<f64>() / fitness.len() as f64,
        p25: quantile(&sorted, 0.25),
        median: quantile(&sorted, 0.5),
        p75: quantile(&sorted, 0.75),
        best_genotype: population[best_idx].genotype.clone(),
        best_arch: population[best_idx].sampled_arch.clone(),
    }
}

pub fn evolve(cfg: &EvolutionConfig) -> Result<EvolutionRecord> {
    evolve_with(cfg, |_| {})
}

/// [`evolve`] with a callback after each generation's statistics are recorded.
pub fn evolve_with<F>(cfg: &EvolutionConfig, mut on_generation: F) -> Result<EvolutionRecord>
where
    F: FnMut(&GenerationStats),
{
    cfg.validate()?;
    let seed = cfg.master_seed;
    let mut population: Vec<Individual> = (0..cfg.population_size)
        .map(|slot| {
            let g = init_genotype(cfg.num_var_layers, &mut stream(seed, &[INIT_TAG, slot as u64]));
            Individual::new(g, derive_seed(seed, &[EVAL_TAG, 0, slot as u64]))
        })
        .collect();

    let mut history = Vec::with_capacity(cfg.num_generations + 1);
    for generation in 0..=cfg.num_generations {
        population = population.par_iter().map(|ind| evaluate(ind, cfg)).collect();
        let stats = summarize(generation, &population);
        on_generation(&stats);
        history.push(stats);
        if generation == cfg.num_generations {
            break;
        }

        let parents = select_parents(&population, cfg.num_parents)?;
        let next_gen = (generation + 1) as u64;
        let mut next = if cfg.elitism { parents.clone() } else { Vec::new() };
        let mut turn = 0;
        while next.len() < cfg.population_size {
            let slot = next.len() as u64;
            let parent = &parents[turn % parents.len()];
            let mut rng = stream(seed, &[MUTATE_TAG, next_gen, slot]);
            let child = mutate(&parent.genotype, cfg.sigma, &mut rng)?;
            next.push(Individual::new(child, derive_seed(seed, &[EVAL_TAG, next_gen, slot])));
            turn += 1;
        }
        population = next;
    }

    Ok(EvolutionRecord {
        history,
        final_population: population,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scored(fitness: &[f64]) -> Vec<Individual> {
        fitness
            .iter()
            .enumerate()
            .map(|(i, &f)| Individual {
                genotype: Genotype::from_logits(0, &[i as f64, 0.0, 0.0, 0.0, 0.0]).unwrap(),
                sampled_arch: None,
                fitness: Some(f),
                eval_seed: i as u64,
            })
            .collect()
    }

    fn small_config() -> EvolutionConfig {
        EvolutionConfig {
            population_size: 6,
            num_parents: 2,
            sigma: 0.5,
            num_generations: 3,
            n_qubits: 3,
            num_var_layers: 1,
            ed: EdParams {
                num_theta_samples: 6,
                k: 8,
                ..EdParams::default()
            },
            master_seed: 17,
            elitism: true,
        }
    }

    #[test]
    fn select_top_by_fitness() {
        let pop = scored(&[3.0, 1.0, 2.0]);
        let parents = select_parents(&pop, 2).unwrap();
        assert_eq!(parents[0].eval_seed, 0);
        assert_eq!(parents[1].eval_seed, 2);
    }

    #[test]
    fn select_ties_by_index() {
        let pop = scored(&[1.0; 5]);
        let parents = select_parents(&pop, 3).unwrap();
        let seeds: Vec<u64> = parents.iter().map(|p| p.eval_seed).collect();
        assert_eq!(seeds, vec![0, 1, 2]);
    }

    #[test]
    fn select_errors() {
        let mut pop = scored(&[1.0, 2.0]);
        assert!(select_parents(&pop, 3).is_err());
        pop[1].fitness = None;
        assert!(matches!(select_parents(&pop, 1), Err(Error::Unevaluated { index: 1 })));
    }

    #[test]
    fn full_scale_selection() {
        let pop = scored(&(0..50).map(|i| ((i * 37) % 50) as f64).collect::<Vec<_>>());
        let parents = select_parents(&pop, 10).unwrap();
        assert_eq!(parents.len(), 10);
        assert!(parents.iter().all(|p| p.fitness.unwrap() >= 40.0));
    }

    #[test]
    fn evaluation_is_deterministic() {
        let cfg = small_config();
        let g = init_genotype(1, &mut stream(5, &[]));
        let a = evaluate(&Individual::new(g.clone(), 99), &cfg);
        let b = evaluate(&Individual::new(g, 99), &cfg);
        assert_eq!(a.fitness.unwrap().to_bits(), b.fitness.unwrap().to_bits());
        assert_eq!(a.sampled_arch, b.sampled_arch);
        // stored fitness is never recomputed
        let mut c = a.clone();
        c.fitness = Some(-1.0);
        assert_eq!(evaluate(&c, &cfg).fitness, Some(-1.0));
    }

    #[test]
    fn no_variational_layers_scores_zero() {
        let cfg = EvolutionConfig {
            num_var_layers: 0,
            ..small_config()
        };
        let g = init_genotype(0, &mut stream(5, &[]));
        assert_eq!(evaluate(&Individual::new(g, 1), &cfg).fitness, Some(0.0));
    }

    #[test]
    fn zero_generations_records_initial_population() {
        let cfg = EvolutionConfig {
            num_generations: 0,
            ..small_config()
        };
        let rec = evolve(&cfg).unwrap();
        assert_eq!(rec.history.len(), 1);
        assert_eq!(rec.history[0].generation, 0);
        assert_eq!(rec.final_population.len(), 6);
    }

    #[test]
    fn elitist_run_invariants() {
        let cfg = small_config();
        let rec = evolve(&cfg).unwrap();
        assert_eq!(rec.history.len(), 4);
        assert!(rec.history.windows(2).all(|w| w[1].best_fitness >= w[0].best_fitness));
        assert_eq!(rec.final_population.len(), cfg.population_size);
        assert_eq!(rec, evolve(&cfg).unwrap());
        for s in &rec.history {
            assert!(s.p25 <= s.median && s.median <= s.p75 && s.p75 <= s.best_fitness);
        }
    }

    #[test]
    fn non_elitist_population_is_all_offspring() {
        let cfg = EvolutionConfig {
            elitism: false,
            num_generations: 1,
            sigma: 0.0,
            ..small_config()
        };
        let rec = evolve(&cfg).unwrap();
        assert_eq!(rec.final_population.len(), 6);
        // σ = 0 offspring are copies of parents, cycled round-robin
        let g = &rec.final_population;
        assert_eq!(g[0].genotype, g[2].genotype);
        assert_eq!(g[1].genotype, g[3].genotype);
    }

    #[test]
    fn config_validation() {
        let bad = |f: fn(&mut EvolutionConfig)| {
            let mut c = small_config();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.num_parents = 7));
        assert!(bad(|c| c.population_size = 0));
        assert!(bad(|c| c.sigma = -1.0));
        assert!(bad(|c| c.n_qubits = 1));
        assert!(bad(|c| c.ed.n = 10));
        assert!(!bad(|_| {}));
    }

    #[test]
    fn quantile_interpolates() {
        let s = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile(&s, 0.25), 2.0);
        assert_eq!(quantile(&[1.0, 2.0], 0.25), 1.25);
        assert_eq!(quantile(&[7.0], 0.75), 7.0);
    }
}
