//! Evolutionary quantum architecture search with effective-dimension fitness.
//!
//! The crate is organised bottom-up:
//!
//! - [`simulator`]: exact statevector simulation of `H`, `RX`, `RY`, `RZ` and `CNOT`.
//! - [`architecture`]: the logit genotype, softmax sampling into one-hot
//!   choices, decoding into a [`CircuitSpec`], Gaussian mutation.
//! - [`model`]: two-class probabilistic readout of a circuit with exact
//!   parameter-shift gradients of log-probabilities.
//! - [`information`]: empirical Fisher information, trace normalisation,
//!   eigenspectra and the effective dimension.
//! - [`evolution`]: the parent-selection / mutation loop using effective
//!   dimension as fitness.
//! - [`baseline`]: small classical feed-forward networks used as comparison
//!   models.
//! - [`cli`]: run configuration, persistence and the command implementations
//!   behind the `evoqas` binary.
//!
//! Qubit 0 is the most significant bit of a basis-state index throughout.

pub mod architecture;
pub mod baseline;
pub mod cli;
pub mod error;
pub mod evolution;
pub mod information;
pub mod model;
pub mod rng;
pub mod simulator;

pub use architecture::{
    decode, enumerate_search_space, init_genotype, mutate, sample_architecture, ArchitectureSpec,
    Entangler, Genotype, HLayer, LayerChoice, Rotation, SamplingMode, VarLayerLogits,
};
pub use baseline::{mlp_match_param_count, Activation, MlpSpec};
pub use error::{Error, Result};
pub use evolution::{evolve, EvolutionConfig, EvolutionRecord, Individual};
pub use information::{
    effective_dimension, eigenspectrum, empirical_fisher, normalize_fisher, EdParams,
    EffectiveDimensionResult, FisherSample,
};
pub use model::{ProbabilisticModel, QuantumModel};
pub use simulator::{AngleSource, CircuitSpec, GateKind, GateOp, StateVector};
