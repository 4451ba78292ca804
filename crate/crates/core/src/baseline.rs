//! Classical feed-forward comparison models.
//!
//! An [`MlpSpec`] fixes layer sizes and the hidden activation; weights live in
//! the flat parameter vector `θ` so the network plugs into the same Fisher and
//! effective-dimension code as [`QuantumModel`](crate::model::QuantumModel).
//!
//! Parameter layout, layer by layer: the weight matrix row-major
//! (`out × in`), then the bias vector (`out`). The output layer has two units
//! followed by a softmax. The activation is applied after every layer except
//! the last. The ReLU derivative at exactly 0 is taken to be 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{check_label, ParameterDomain, ProbabilisticModel, NUM_CLASSES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    ReLU,
    Identity,
}

impl Activation {
    fn apply(self, v: f64) -> f64 {
        match self {
            Activation::ReLU => v.max(0.0),
            Activation::Identity => v,
        }
    }

    fn derivative(self, pre: f64) -> f64 {
        match self {
            Activation::ReLU => {
                if pre > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Identity => 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpSpec {
    /// Input size, hidden sizes, then 2.
    pub layer_sizes: Vec<usize>,
    pub activation: Activation,
}

/// Number of weights and biases for a stack of `layer_sizes`.
pub fn param_count(layer_sizes: &[usize]) -> usize {
    layer_sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
}

impl MlpSpec {
    pub fn new(layer_sizes: Vec<usize>, activation: Activation) -> Result<Self> {
        if layer_sizes.len() < 2 || layer_sizes.last() != Some(&NUM_CLASSES) {
            return Err(Error::InvalidArgument(format!(
                "layer sizes {layer_sizes:?} must end in {NUM_CLASSES} outputs"
            )));
        }
        if layer_sizes.contains(&0) {
            return Err(Error::InvalidArgument("layer sizes must be positive".into()));
        }
        Ok(Self {
            layer_sizes,
            activation,
        })
    }

    pub fn param_count(&self) -> usize {
        param_count(&self.layer_sizes)
    }

    fn check(&self, x: &[f64], params: &[f64]) -> Result<()> {
        if x.len() != self.layer_sizes[0] {
            return Err(Error::DimensionMismatch {
                what: "mlp input",
                expected: self.layer_sizes[0],
                actual: x.len(),
            });
        }
        if params.len() != self.param_count() {
            return Err(Error::DimensionMismatch {
                what: "mlp params",
                expected: self.param_count(),
                actual: params.len(),
            });
        }
        Ok(())
    }

    /// Pre-activations and activations of every layer; `acts[0] = x`.
    fn run(&self, x: &[f64], params: &[f64]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let depth = self.layer_sizes.len() - 1;
        let mut acts = vec![x.to_vec()];
        let mut pres = Vec::with_capacity(depth);
        let mut offset = 0;
        for (l, w) in self.layer_sizes.windows(2).enumerate() {
            let (n_in, n_out) = (w[0], w[1]);
            let weights = &params[offset..offset + n_in * n_out];
            let bias = &params[offset + n_in * n_out..offset + n_in * n_out + n_out];
            offset += n_in * n_out + n_out;
            let input = &acts[l];
            let pre: Vec<f64> = (0..n_out)
                .map(|o| {
                    let row = &weights[o * n_in..(o + 1) * n_in];
                    bias[o] + row.iter().zip(input).map(|(a, b)| a * b).sum::<f64>()
                })
                .collect();
            let act = if l + 1 == depth {
                pre.clone()
            } else {
                pre.iter().map(|&v| self.activation.apply(v)).collect()
            };
            pres.push(pre);
            acts.push(act);
        }
        (pres, acts)
    }
}

fn softmax2(logits: &[f64]) -> [f64; NUM_CLASSES] {
    let m = logits[0].max(logits[1]);
    let e0 = (logits[0] - m).exp();
    let e1 = (logits[1] - m).exp();
    [e0 / (e0 + e1), e1 / (e0 + e1)]
}

pub fn mlp_forward(m: &MlpSpec, params: &[f64], x: &[f64]) -> Result<[f64; NUM_CLASSES]> {
    m.check(x, params)?;
    let (_, acts) = m.run(x, params);
    Ok(softmax2(acts.last().map(Vec::as_slice).unwrap_or(&[0.0, 0.0])))
}

/// Exact `∂/∂θ log p(y|x)` by backpropagation, in the flat parameter layout.
pub fn mlp_log_prob_gradient(m: &MlpSpec, params: &[f64], x: &[f64], y: usize) -> Result<Vec<f64>> {
    check_label(y)?;
    m.check(x, params)?;
    let (pres, acts) = m.run(x, params);
    let depth = m.layer_sizes.len() - 1;
    let p = softmax2(&acts[depth]);
    // d log softmax_y / d logit_c = [c == y] - p_c
    let mut delta: Vec<f64> = (0..NUM_CLASSES).map(|c| f64::from(u8::from(c == y)) - p[c]).collect();

    let mut grad = vec![0.0; params.len()];
    let mut offsets = Vec::with_capacity(depth);
    let mut offset = 0;
    for w in m.layer_sizes.windows(2) {
        offsets.push(offset);
        offset += w[0] * w[1] + w[1];
    }
    for l in (0..depth).rev() {
        let (n_in, n_out) = (m.layer_sizes[l], m.layer_sizes[l + 1]);
        let base = offsets[l];
        let input = &acts[l];
        for o in 0..n_out {
            for i in 0..n_in {
                grad[base + o * n_in + i] = delta[o] * input[i];
            }
            grad[base + n_in * n_out + o] = delta[o];
        }
        if l > 0 {
            let weights = &params[base..base + n_in * n_out];
            delta = (0..n_in)
                .map(|i| {
                    let back: f64 = (0..n_out).map(|o| weights[o * n_in + i] * delta[o]).sum();
                    back * m.activation.derivative(pres[l - 1][i])
                })
                .collect();
        }
    }
    Ok(grad)
}

/// Hidden width whose single-hidden-layer network has the parameter count
/// closest to `target_d` (ties go to the smaller width). Returns the layer
/// sizes and the achieved count.
pub fn mlp_match_param_count(target_d: usize, n_inputs: usize) -> Result<(Vec<usize>, usize)> {
    if n_inputs == 0 {
        return Err(Error::InvalidArgument("baseline needs at least one input".into()));
    }
    if target_d < n_inputs + 2 {
        return Err(Error::InvalidArgument(format!(
            "target parameter count {target_d} too small for {n_inputs} inputs"
        )));
    }
    let count = |h: usize| param_count(&[n_inputs, h, NUM_CLASSES]);
    let mut best = 1;
    let mut h = 1;
    // count(h) is strictly increasing, so stop once we pass the target
    loop {
        if count(h).abs_diff(target_d) < count(best).abs_diff(target_d) {
            best = h;
        }
        if count(h) >= target_d {
            break;
        }
        h += 1;
    }
    Ok((vec![n_inputs, best, NUM_CLASSES], count(best)))
}

impl ProbabilisticModel for MlpSpec {
    fn num_params(&self) -> usize {
        self.param_count()
    }

    fn num_inputs(&self) -> usize {
        self.layer_sizes[0]
    }

    fn parameter_domain(&self) -> ParameterDomain {
        ParameterDomain { lo: -1.0, hi: 1.0 }
    }

    fn forward(&self, x: &[f64], theta: &[f64]) -> Result<[f64; NUM_CLASSES]> {
        mlp_forward(self, theta, x)
    }

    fn log_prob_gradient(&self, x: &[f64], y: usize, theta: &[f64]) -> Result<Vec<f64>> {
        mlp_log_prob_gradient(self, theta, x, y)
    }
}
