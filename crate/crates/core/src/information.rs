//! Fisher information and effective dimension.
//!
//! The effective dimension of a model with `d` parameters at data scale `n` is
//!
//! ```text
//!            2 · log( mean_θ sqrt(det(I + κ F̂(θ))) )
//! d_{γ,n} = ----------------------------------------,   κ = γ n / (2π log n)
//!                          log κ
//! ```
//!
//! where `F̂` is the Fisher information rescaled so that its trace averages to
//! `d` over the parameter domain. Both averages are Monte Carlo estimates over
//! one shared set of uniformly drawn parameter vectors, which makes the
//! mean-trace normalisation exact on that set.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ProbabilisticModel;
use crate::rng::stream;

/// Attempts per data point before a vanishing class probability is fatal.
pub const MAX_RESAMPLES: usize = 16;

const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// Mean traces at or below this are rounding residue from parameters that
/// cannot move the output; such sample sets count as all-zero.
pub const DEGENERATE_MEAN_TRACE: f64 = 1e-20;

/// One estimate `F̃_k(θ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FisherSample {
    pub theta: Vec<f64>,
    pub matrix: DMatrix<f64>,
    pub trace: f64,
}

/// Monte Carlo budget and scale for one effective-dimension estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EdParams {
    pub gamma: f64,
    pub n: u64,
    pub num_theta_samples: usize,
    /// Data points per Fisher estimate.
    pub k: usize,
}

impl Default for EdParams {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            n: 1000,
            num_theta_samples: 100,
            k: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveDimensionResult {
    pub gamma: f64,
    pub n: u64,
    pub kappa: f64,
    pub value: f64,
    pub d: usize,
    pub num_theta_samples: usize,
    pub fisher_dataset_size: usize,
    pub seed: u64,
}

impl EffectiveDimensionResult {
    /// Effective dimension as a fraction of the parameter count.
    pub fn normalized(&self) -> f64 {
        if self.d == 0 {
            0.0
        } else {
            self.value / self.d as f64
        }
    }
}

/// `κ = γ n / (2π ln n)`, required to exceed 1.
pub fn kappa(gamma: f64, n: u64) -> Result<f64> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidArgument(format!("gamma must lie in (0, 1], got {gamma}")));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must exceed 1, got {n}")));
    }
    let nf = n as f64;
    let kappa = gamma * nf / (std::f64::consts::TAU * nf.ln());
    if kappa <= 1.0 {
        return Err(Error::KappaTooSmall { kappa, gamma, n });
    }
    Ok(kappa)
}

/// Average of `k` score outer products at `theta`, with `x ~ N(0, I)` and
/// `y` drawn from the model itself.
pub fn empirical_fisher<M, R>(m: &M, theta: &[f64], k: usize, rng: &mut R) -> Result<FisherSample>
where
    M: ProbabilisticModel + ?Sized,
    R: Rng + ?Sized,
{
    if k == 0 {
        return Err(Error::InvalidArgument("Fisher estimate needs k >= 1".into()));
    }
    let d = m.num_params();
    if theta.len() != d {
        return Err(Error::DimensionMismatch {
            what: "theta",
            expected: d,
            actual: theta.len(),
        });
    }
    let mut acc = DMatrix::<f64>::zeros(d, d);
    let mut x = vec![0.0; m.num_inputs()];
    for _ in 0..k {
        let score = sample_score(m, theta, &mut x, rng)?;
        for i in 0..d {
            for j in i..d {
                acc[(i, j)] += score[i] * score[j];
            }
        }
    }
    let scale = 1.0 / k as f64;
    for i in 0..d {
        for j in i..d {
            let v = acc[(i, j)] * scale;
            acc[(i, j)] = v;
            acc[(j, i)] = v;
        }
    }
    let trace = acc.trace();
    Ok(FisherSample {
        theta: theta.to_vec(),
        matrix: acc,
        trace,
    })
}

fn sample_score<M, R>(m: &M, theta: &[f64], x: &mut [f64], rng: &mut R) -> Result<Vec<f64>>
where
    M: ProbabilisticModel + ?Sized,
    R: Rng + ?Sized,
{
    let mut last = Error::VanishingProbability { probability: 0.0 };
    for _ in 0..MAX_RESAMPLES {
        x.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
        let p = m.forward(x, theta)?;
        let u: f64 = rng.random();
        let y = usize::from(u >= p[0]);
        match m.log_prob_gradient(x, y, theta) {
            Ok(score) => return Ok(score),
            Err(e @ Error::VanishingProbability { .. }) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// Scale every sample by `d · S / Σ_s tr F_s` so the mean trace is exactly `d`.
pub fn normalize_fisher(samples: &[FisherSample], d: usize) -> Result<Vec<DMatrix<f64>>> {
    let matrices: Vec<DMatrix<f64>> = samples.iter().map(|s| s.matrix.clone()).collect();
    normalize_fisher_matrices(&matrices, d)
}

/// [`normalize_fisher`] on bare matrices.
pub fn normalize_fisher_matrices(matrices: &[DMatrix<f64>], d: usize) -> Result<Vec<DMatrix<f64>>> {
    if matrices.is_empty() {
        return Err(Error::InvalidArgument("no Fisher samples to normalise".into()));
    }
    if let Some(bad) = matrices.iter().find(|m| m.nrows() != d || m.ncols() != d) {
        return Err(Error::DimensionMismatch {
            what: "Fisher matrix rows",
            expected: d,
            actual: bad.nrows(),
        });
    }
    let total: f64 = matrices.iter().map(|m| m.trace()).sum();
    if !(total / matrices.len() as f64 > DEGENERATE_MEAN_TRACE) {
        return Err(Error::DegenerateFisher);
    }
    let factor = d as f64 * matrices.len() as f64 / total;
    Ok(matrices.iter().map(|m| m * factor).collect())
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn eigenspectrum(matrix: &DMatrix<f64>) -> Result<Vec<f64>> {
    if !matrix.is_square() {
        return Err(Error::DimensionMismatch {
            what: "matrix columns",
            expected: matrix.nrows(),
            actual: matrix.ncols(),
        });
    }
    let asym = (matrix - matrix.transpose()).amax();
    if asym > SYMMETRY_TOLERANCE * matrix.amax().max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    let mut eigs: Vec<f64> = SymmetricEigen::new(matrix.clone()).eigenvalues.iter().copied().collect();
    eigs.sort_by(f64::total_cmp);
    Ok(eigs)
}

/// `ln det(I + κ F)` from the eigenvalues of `F`, clamping negatives to 0.
pub fn log_det_shifted(eigenvalues: &[f64], kappa: f64) -> f64 {
    eigenvalues.iter().map(|&l| (kappa * l.max(0.0)).ln_1p()).sum()
}

/// Effective dimension from the spectra of already-normalised Fisher samples.
///
/// The average of `sqrt(det(I + κF̂))` is taken in the log domain with a
/// max shift so large determinants do not overflow.
pub fn effective_dimension_from_spectra(spectra: &[Vec<f64>], kappa: f64) -> f64 {
    if spectra.is_empty() {
        return 0.0;
    }
    let halves: Vec<f64> = spectra.iter().map(|e| 0.5 * log_det_shifted(e, kappa)).collect();
    let max = halves.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean_shifted = halves.iter().map(|h| (h - max).exp()).sum::<f64>() / halves.len() as f64;
    let log_avg = max + mean_shifted.ln();
    (2.0 * log_avg / kappa.ln()).max(0.0)
}

/// Normalised spectra for a sample set; `None` when every trace is zero.
pub fn normalized_spectra(matrices: &[DMatrix<f64>], d: usize) -> Result<Option<Vec<Vec<f64>>>> {
    if d == 0 {
        return Ok(None);
    }
    match normalize_fisher_matrices(matrices, d) {
        Ok(normed) => normed.iter().map(eigenspectrum).collect::<Result<_>>().map(Some),
        Err(Error::DegenerateFisher) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Effective dimension of raw Fisher samples (normalisation included).
/// An all-zero sample set has effective dimension 0.
pub fn effective_dimension_from_fisher(
    matrices: &[DMatrix<f64>],
    d: usize,
    gamma: f64,
    n: u64,
) -> Result<f64> {
    let kappa = kappa(gamma, n)?;
    Ok(normalized_spectra(matrices, d)?
        .map(|s| effective_dimension_from_spectra(&s, kappa))
        .unwrap_or(0.0))
}

/// Draw `num_theta_samples` parameter vectors uniformly from the model's
/// domain and estimate the Fisher at each. Sample `s` uses the stream
/// `(seed, s)` so the result is independent of thread scheduling.
pub fn fisher_samples<M>(m: &M, num_theta_samples: usize, k: usize, seed: u64) -> Result<Vec<FisherSample>>
where
    M: ProbabilisticModel + ?Sized,
{
    if num_theta_samples == 0 {
        return Err(Error::InvalidArgument("need at least one theta sample".into()));
    }
    let domain = m.parameter_domain();
    let d = m.num_params();
    (0..num_theta_samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = stream(seed, &[s as u64]);
            let theta: Vec<f64> = (0..d)
                .map(|_| domain.lo + domain.width() * rng.random::<f64>())
                .collect();
            empirical_fisher(m, &theta, k, &mut rng)
        })
        .collect()
}

pub fn effective_dimension<M>(m: &M, params: &EdParams, seed: u64) -> Result<EffectiveDimensionResult>
where
    M: ProbabilisticModel + ?Sized,
{
    effective_dimension_sweep(m, &[params.n], params.gamma, params.num_theta_samples, params.k, seed)?.remove(0)
}

/// Effective dimension at several data scales from one shared Fisher sample
/// set. The outer error covers sampling failures; per-`n` errors (κ ≤ 1) are
/// reported individually.
pub fn effective_dimension_sweep<M>(
    m: &M,
    ns: &[u64],
    gamma: f64,
    num_theta_samples: usize,
    k: usize,
    seed: u64,
) -> Result<Vec<Result<EffectiveDimensionResult>>>
where
    M: ProbabilisticModel + ?Sized,
{
    let d = m.num_params();
    let spectra = if d == 0 {
        None
    } else {
        let samples = fisher_samples(m, num_theta_samples, k, seed)?;
        let matrices: Vec<DMatrix<f64>> = samples.into_iter().map(|s| s.matrix).collect();
        normalized_spectra(&matrices, d)?
    };
    Ok(ns
        .iter()
        .map(|&n| {
            let kappa = kappa(gamma, n)?;
            let value = spectra
                .as_ref()
                .map(|s| effective_dimension_from_spectra(s, kappa))
                .unwrap_or(0.0);
            Ok(EffectiveDimensionResult {
                gamma,
                n,
                kappa,
                value,
                d,
                num_theta_samples,
                fisher_dataset_size: k,
                seed,
            })
        })
        .collect())
}

/// Fraction of `eigenvalues` strictly below `c · λ_max`. Zero for an empty
/// or all-zero set.
pub fn frac_below(eigenvalues: &[f64], c: f64) -> f64 {
    let max = eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if eigenvalues.is_empty() || max <= 0.0 {
        return 0.0;
    }
    eigenvalues.iter().filter(|&&l| l < c * max).count() as f64 / eigenvalues.len() as f64
}
