//! Circuit genotype and its decoding into concrete circuits.
//!
//! A [`Genotype`] holds one block of real logits per architectural choice:
//! whether to open with a Hadamard layer, which rotation encodes the input,
//! and for each variational layer which entangler and which trainable
//! rotation to use. Sampling turns each block into a categorical choice via
//! softmax; the resulting [`ArchitectureSpec`] decodes deterministically into
//! a [`CircuitSpec`].
//!
//! One-hot orderings (also used by the JSON form of [`ArchitectureSpec`]):
//!
//! | block      | index 0           | index 1                | index 2 |
//! |------------|-------------------|------------------------|---------|
//! | H layer    | with H            | without H              |         |
//! | rotation   | RX                | RY                     | RZ      |
//! | entangler  | chain (`entangling_layer`) | ring (`cycle_entangling_layer`) | |

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulator::{AngleSource, CircuitSpec, GateKind, GateOp};

pub const NUM_H_CHOICES: usize = 2;
pub const NUM_ROTATIONS: usize = 3;
pub const NUM_ENTANGLERS: usize = 2;

/// Number of distinct encoding sub-circuits (H choice × rotation).
pub const ENCODING_CHOICES: u128 = (NUM_H_CHOICES * NUM_ROTATIONS) as u128;
/// Number of distinct variational layers (entangler × rotation).
pub const LAYER_CHOICES: u128 = (NUM_ENTANGLERS * NUM_ROTATIONS) as u128;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarLayerLogits {
    pub entangle_logits: [f64; NUM_ENTANGLERS],
    pub rot_logits: [f64; NUM_ROTATIONS],
}

/// Logit representation of a circuit family.
///
/// Serialises as
/// `{"encoding_layer": [[h0, h1], [rx, ry, rz]], "variational_layer": [[[chain, ring], [rx, ry, rz]], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GenotypeJson", into = "GenotypeJson")]
pub struct Genotype {
    pub encoding_h_logits: [f64; NUM_H_CHOICES],
    pub encoding_rot_logits: [f64; NUM_ROTATIONS],
    pub var_layers: Vec<VarLayerLogits>,
}

#[derive(Serialize, Deserialize)]
struct GenotypeJson {
    encoding_layer: ([f64; NUM_H_CHOICES], [f64; NUM_ROTATIONS]),
    variational_layer: Vec<([f64; NUM_ENTANGLERS], [f64; NUM_ROTATIONS])>,
}

impl From<Genotype> for GenotypeJson {
    fn from(g: Genotype) -> Self {
        Self {
            encoding_layer: (g.encoding_h_logits, g.encoding_rot_logits),
            variational_layer: g
                .var_layers
                .into_iter()
                .map(|l| (l.entangle_logits, l.rot_logits))
                .collect(),
        }
    }
}

impl TryFrom<GenotypeJson> for Genotype {
    type Error = Error;

    fn try_from(raw: GenotypeJson) -> Result<Self> {
        let g = Genotype {
            encoding_h_logits: raw.encoding_layer.0,
            encoding_rot_logits: raw.encoding_layer.1,
            var_layers: raw
                .variational_layer
                .into_iter()
                .map(|(e, r)| VarLayerLogits {
                    entangle_logits: e,
                    rot_logits: r,
                })
                .collect(),
        };
        g.validate()?;
        Ok(g)
    }
}

impl Genotype {
    pub fn num_var_layers(&self) -> usize {
        self.var_layers.len()
    }

    pub fn num_logits(&self) -> usize {
        NUM_H_CHOICES + NUM_ROTATIONS + self.var_layers.len() * (NUM_ENTANGLERS + NUM_ROTATIONS)
    }

    /// All logits in canonical order: x₁, x₂, then (y₁, y₂) per layer.
    pub fn logits(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_logits());
        out.extend_from_slice(&self.encoding_h_logits);
        out.extend_from_slice(&self.encoding_rot_logits);
        for layer in &self.var_layers {
            out.extend_from_slice(&layer.entangle_logits);
            out.extend_from_slice(&layer.rot_logits);
        }
        out
    }

    /// Inverse of [`Genotype::logits`].
    pub fn from_logits(num_var_layers: usize, logits: &[f64]) -> Result<Self> {
        let expected =
            NUM_H_CHOICES + NUM_ROTATIONS + num_var_layers * (NUM_ENTANGLERS + NUM_ROTATIONS);
        if logits.len() != expected {
            return Err(Error::DimensionMismatch {
                what: "genotype logits",
                expected,
                actual: logits.len(),
            });
        }
        let mut it = logits.iter().copied();
        let mut take = |out: &mut [f64]| out.iter_mut().for_each(|v| *v = it.next().unwrap_or(0.0));
        let mut g = Genotype {
            encoding_h_logits: [0.0; NUM_H_CHOICES],
            encoding_rot_logits: [0.0; NUM_ROTATIONS],
            var_layers: Vec::with_capacity(num_var_layers),
        };
        take(&mut g.encoding_h_logits);
        take(&mut g.encoding_rot_logits);
        for _ in 0..num_var_layers {
            let mut layer = VarLayerLogits {
                entangle_logits: [0.0; NUM_ENTANGLERS],
                rot_logits: [0.0; NUM_ROTATIONS],
            };
            take(&mut layer.entangle_logits);
            take(&mut layer.rot_logits);
            g.var_layers.push(layer);
        }
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.logits().iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidArgument("genotype contains non-finite logits".into()))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HLayer {
    WithH,
    WithoutH,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rotation {
    RX,
    RY,
    RZ,
}

impl Rotation {
    pub const ALL: [Rotation; NUM_ROTATIONS] = [Rotation::RX, Rotation::RY, Rotation::RZ];

    pub fn gate_kind(self) -> GateKind {
        match self {
            Rotation::RX => GateKind::RX,
            Rotation::RY => GateKind::RY,
            Rotation::RZ => GateKind::RZ,
        }
    }
}

/// Entangling topology. Both are built from CNOTs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Entangler {
    /// `CNOT(i, i+1)` for `i = 0..n-1`.
    Chain,
    /// Chain plus the wrap-around `CNOT(n-1, 0)`.
    Ring,
}

impl Entangler {
    pub const ALL: [Entangler; NUM_ENTANGLERS] = [Entangler::Chain, Entangler::Ring];

    fn gates(self, n_qubits: usize) -> impl Iterator<Item = GateOp> {
        let chain = (0..n_qubits.saturating_sub(1)).map(|i| GateOp::cnot(i, i + 1));
        let wrap = (self == Entangler::Ring).then(|| GateOp::cnot(n_qubits - 1, 0));
        chain.chain(wrap)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LayerChoice {
    pub entangler: Entangler,
    pub rot: Rotation,
}

/// Discrete architecture. Serialises as one-hot vectors in the same shape as
/// the [`Genotype`] JSON.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "OneHotJson", into = "OneHotJson")]
pub struct ArchitectureSpec {
    pub h_layer: HLayer,
    pub encoding_rot: Rotation,
    pub layers: Vec<LayerChoice>,
}

#[derive(Serialize, Deserialize)]
struct OneHotJson {
    encoding_layer: ([u8; NUM_H_CHOICES], [u8; NUM_ROTATIONS]),
    variational_layer: Vec<([u8; NUM_ENTANGLERS], [u8; NUM_ROTATIONS])>,
}

fn one_hot<const N: usize>(index: usize) -> [u8; N] {
    let mut v = [0; N];
    v[index] = 1;
    v
}

fn from_one_hot<const N: usize>(v: [u8; N]) -> Result<usize> {
    match (v.iter().filter(|&&b| b == 1).count(), v.iter().all(|&b| b <= 1)) {
        (1, true) => Ok(v.iter().position(|&b| b == 1).unwrap_or(0)),
        _ => Err(Error::Parse(format!("{v:?} is not a one-hot vector"))),
    }
}

impl From<ArchitectureSpec> for OneHotJson {
    fn from(a: ArchitectureSpec) -> Self {
        Self {
            encoding_layer: (
                one_hot(a.h_layer as usize),
                one_hot(a.encoding_rot as usize),
            ),
            variational_layer: a
                .layers
                .iter()
                .map(|l| (one_hot(l.entangler as usize), one_hot(l.rot as usize)))
                .collect(),
        }
    }
}

impl TryFrom<OneHotJson> for ArchitectureSpec {
    type Error = Error;

    fn try_from(raw: OneHotJson) -> Result<Self> {
        let h = [HLayer::WithH, HLayer::WithoutH][from_one_hot(raw.encoding_layer.0)?];
        let rot = Rotation::ALL[from_one_hot(raw.encoding_layer.1)?];
        let layers = raw
            .variational_layer
            .into_iter()
            .map(|(e, r)| {
                Ok(LayerChoice {
                    entangler: Entangler::ALL[from_one_hot(e)?],
                    rot: Rotation::ALL[from_one_hot(r)?],
                })
            })
            .collect::<Result<_>>()?;
        Ok(ArchitectureSpec {
            h_layer: h,
            encoding_rot: rot,
            layers,
        })
    }
}

/// How a genotype is turned into an architecture.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    /// Draw each choice from `softmax(logits)`.
    #[default]
    Softmax,
    /// Take the highest logit; ties go to the lowest index.
    Argmax,
}

pub fn init_genotype<R: Rng + ?Sized>(num_var_layers: usize, rng: &mut R) -> Genotype {
    let n = NUM_H_CHOICES + NUM_ROTATIONS + num_var_layers * (NUM_ENTANGLERS + NUM_ROTATIONS);
    let logits: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    Genotype::from_logits(num_var_layers, &logits).expect("normal draws are finite")
}

/// `g + sigma * eps` with independent standard-normal `eps` per logit.
pub fn mutate<R: Rng + ?Sized>(g: &Genotype, sigma: f64, rng: &mut R) -> Result<Genotype> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "mutation sigma must be finite and >= 0, got {sigma}"
        )));
    }
    let logits: Vec<f64> = g
        .logits()
        .into_iter()
        .map(|v| {
            let eps: f64 = rng.sample(StandardNormal);
            v + sigma * eps
        })
        .collect();
    Genotype::from_logits(g.num_var_layers(), &logits)
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&v| (v - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

fn choose<R: Rng + ?Sized>(logits: &[f64], mode: SamplingMode, rng: &mut R) -> usize {
    match mode {
        SamplingMode::Argmax => logits
            .iter()
            .enumerate()
            .fold(0, |best, (i, &v)| if v > logits[best] { i } else { best }),
        SamplingMode::Softmax => {
            let probs = softmax(logits);
            let u: f64 = rng.random();
            let mut acc = 0.0;
            for (i, p) in probs.iter().enumerate() {
                acc += p;
                if u < acc {
                    return i;
                }
            }
            // u landed in the rounding gap above the cumulative sum
            probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
        }
    }
}

/// Draw one architecture from the genotype's per-choice distributions.
///
/// Choices are drawn independently in canonical order. In
/// [`SamplingMode::Argmax`] the stream is not consumed.
pub fn sample_architecture<R: Rng + ?Sized>(
    g: &Genotype,
    mode: SamplingMode,
    rng: &mut R,
) -> ArchitectureSpec {
    let h_layer = [HLayer::WithH, HLayer::WithoutH][choose(&g.encoding_h_logits, mode, rng)];
    let encoding_rot = Rotation::ALL[choose(&g.encoding_rot_logits, mode, rng)];
    let layers = g
        .var_layers
        .iter()
        .map(|l| LayerChoice {
            entangler: Entangler::ALL[choose(&l.entangle_logits, mode, rng)],
            rot: Rotation::ALL[choose(&l.rot_logits, mode, rng)],
        })
        .collect();
    ArchitectureSpec {
        h_layer,
        encoding_rot,
        layers,
    }
}

/// Build the gate list for `a` on `n_qubits` qubits.
///
/// Layout: optional H on every qubit, the encoding rotation on qubit `i` with
/// input slot `i`, then per variational layer `j` the entangler followed by
/// the layer rotation on qubit `i` with parameter slot `j * n_qubits + i`.
pub fn decode(a: &ArchitectureSpec, n_qubits: usize) -> Result<CircuitSpec> {
    if n_qubits == 0 {
        return Err(Error::InvalidArgument("circuit needs at least one qubit".into()));
    }
    if !a.layers.is_empty() && n_qubits < 2 {
        return Err(Error::InvalidArgument(format!(
            "entangling layers need at least 2 qubits, got {n_qubits}"
        )));
    }
    let mut gates = Vec::new();
    if a.h_layer == HLayer::WithH {
        gates.extend((0..n_qubits).map(GateOp::h));
    }
    let enc = a.encoding_rot.gate_kind();
    gates.extend((0..n_qubits).map(|q| GateOp::rotation(enc, q, AngleSource::InputSlot(q))));
    for (j, layer) in a.layers.iter().enumerate() {
        gates.extend(layer.entangler.gates(n_qubits));
        let kind = layer.rot.gate_kind();
        gates.extend(
            (0..n_qubits).map(|q| GateOp::rotation(kind, q, AngleSource::ParamSlot(j * n_qubits + q))),
        );
    }
    CircuitSpec::new(n_qubits, gates, n_qubits, n_qubits * a.layers.len())
}

/// Size of the search space: `6 · 6^num_var_layers`. `None` on `u128` overflow.
pub fn enumerate_search_space(num_var_layers: usize) -> Option<u128> {
    let exp = u32::try_from(num_var_layers).ok()?;
    LAYER_CHOICES.checked_pow(exp)?.checked_mul(ENCODING_CHOICES)
}
