//! Two-class probabilistic models `p(y | x; θ)` with log-probability gradients.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulator::{run_circuit, CircuitSpec};

pub const NUM_CLASSES: usize = 2;

/// Below this the log-gradient of a class probability is treated as unusable.
pub const MIN_PROBABILITY: f64 = 1e-12;

/// Box `[lo, hi]^d` from which parameters are drawn for Fisher estimation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParameterDomain {
    pub lo: f64,
    pub hi: f64,
}

impl ParameterDomain {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Anything the Fisher and effective-dimension machinery can consume.
pub trait ProbabilisticModel: Sync {
    fn num_params(&self) -> usize;

    fn num_inputs(&self) -> usize;

    fn parameter_domain(&self) -> ParameterDomain;

    /// `(p(y=0|x;θ), p(y=1|x;θ))`.
    fn forward(&self, x: &[f64], theta: &[f64]) -> Result<[f64; NUM_CLASSES]>;

    /// `∂/∂θ log p(y|x;θ)`.
    fn log_prob_gradient(&self, x: &[f64], y: usize, theta: &[f64]) -> Result<Vec<f64>>;
}

/// Which observable turns the final state into class probabilities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputMap {
    /// Marginal of qubit 0 in the computational basis.
    #[default]
    Qubit0Marginal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumModel {
    pub circuit: CircuitSpec,
    pub output_map: OutputMap,
}

impl QuantumModel {
    pub fn new(circuit: CircuitSpec) -> Self {
        Self {
            circuit,
            output_map: OutputMap::Qubit0Marginal,
        }
    }
}

pub(crate) fn check_label(y: usize) -> Result<()> {
    if y >= NUM_CLASSES {
        return Err(Error::InvalidArgument(format!("class label {y} not in 0..{NUM_CLASSES}")));
    }
    Ok(())
}

impl ProbabilisticModel for QuantumModel {
    fn num_params(&self) -> usize {
        self.circuit.num_params()
    }

    fn num_inputs(&self) -> usize {
        self.circuit.num_inputs()
    }

    /// Rotation angles are 2π-periodic, so `[0, 2π]` covers every model.
    fn parameter_domain(&self) -> ParameterDomain {
        ParameterDomain {
            lo: 0.0,
            hi: std::f64::consts::TAU,
        }
    }

    fn forward(&self, x: &[f64], theta: &[f64]) -> Result<[f64; NUM_CLASSES]> {
        let state = run_circuit(&self.circuit, x, theta)?;
        let half = 1 << (self.circuit.n_qubits() - 1);
        let probs = state.probabilities();
        // qubit 0 is the most significant bit
        let p0: f64 = probs[..half].iter().sum();
        let p1: f64 = probs[half..].iter().sum();
        Ok([p0, p1])
    }

    /// Parameter-shift rule: every parameter feeds exactly one half-angle
    /// rotation, so `∂p_y/∂θ_j = (p_y(θ + π/2·e_j) − p_y(θ − π/2·e_j)) / 2`
    /// holds exactly.
    fn log_prob_gradient(&self, x: &[f64], y: usize, theta: &[f64]) -> Result<Vec<f64>> {
        check_label(y)?;
        let p = self.forward(x, theta)?[y];
        if p < MIN_PROBABILITY {
            return Err(Error::VanishingProbability { probability: p });
        }
        let mut shifted = theta.to_vec();
        (0..theta.len())
            .map(|j| {
                shifted[j] = theta[j] + FRAC_PI_2;
                let plus = self.forward(x, &shifted)?[y];
                shifted[j] = theta[j] - FRAC_PI_2;
                let minus = self.forward(x, &shifted)?[y];
                shifted[j] = theta[j];
                Ok((plus - minus) / (2.0 * p))
            })
            .collect()
    }
}
