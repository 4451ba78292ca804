//! Independent reference implementations shared by the integration tests
//! and the acceptance harness.
#![allow(dead_code)]

use std::f64::consts::{PI, TAU};
use std::sync::Mutex;

use evoqas::model::{ParameterDomain, NUM_CLASSES};
use evoqas::{AngleSource, CircuitSpec, GateKind, GateOp, ProbabilisticModel, QuantumModel, Result};
use nalgebra::DMatrix;
use rand::Rng;

// ---------------------------------------------------------------------------
// eigenvalues from the characteristic polynomial

/// `det(A)` by Gaussian elimination with partial pivoting.
pub fn determinant(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut m = a.clone();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[(i, col)].abs().total_cmp(&m[(j, col)].abs()))
            .unwrap();
        if m[(pivot, col)] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap_rows(pivot, col);
            det = -det;
        }
        let p = m[(col, col)];
        det *= p;
        for row in col + 1..n {
            let f = m[(row, col)] / p;
            for c in col..n {
                m[(row, c)] -= f * m[(col, c)];
            }
        }
    }
    det
}

fn char_poly(a: &DMatrix<f64>, lambda: f64) -> f64 {
    let n = a.nrows();
    determinant(&(a - DMatrix::<f64>::identity(n, n) * lambda))
}

/// Roots of `det(A − λI)` found by scanning the Gershgorin interval for sign
/// changes and bisecting. Refines the scan until all `n` roots are bracketed.
pub fn char_poly_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let radius = (0..n)
        .map(|i| a[(i, i)].abs() + (0..n).filter(|&j| j != i).map(|j| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
        + 1.0;
    let mut steps = 4096;
    loop {
        let h = 2.0 * radius / steps as f64;
        let mut roots = Vec::new();
        let mut lo = -radius;
        let mut f_lo = char_poly(a, lo);
        for s in 1..=steps {
            let hi = -radius + s as f64 * h;
            let f_hi = char_poly(a, hi);
            if f_lo == 0.0 {
                roots.push(lo);
            } else if f_lo.signum() != f_hi.signum() && f_hi != 0.0 {
                roots.push(bisect(a, lo, hi, f_lo));
            }
            lo = hi;
            f_lo = f_hi;
        }
        if roots.len() == n || steps > 1 << 22 {
            roots.sort_by(f64::total_cmp);
            return roots;
        }
        steps *= 4;
    }
}

fn bisect(a: &DMatrix<f64>, mut lo: f64, mut hi: f64, mut f_lo: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = char_poly(a, mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn random_symmetric<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = rng.random_range(-1.0..1.0);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

// ---------------------------------------------------------------------------
// effective dimension closed form and quadrature

pub fn kappa(gamma: f64, n: f64) -> f64 {
    gamma * n / (TAU * n.ln())
}

/// Effective dimension of a model whose normalised Fisher is the identity.
pub fn identity_fisher_ed(d: usize, gamma: f64, n: f64) -> f64 {
    let k = kappa(gamma, n);
    d as f64 * k.ln_1p() / k.ln()
}

/// Two-qubit, two-parameter circuit with both parameters reaching qubit 0:
/// `RY(x0) q0, RY(x1) q1, RY(θ0) q1, CNOT(1→0), RY(θ1) q0`.
pub fn two_param_circuit() -> CircuitSpec {
    CircuitSpec::new(
        2,
        vec![
            GateOp::ry(0, AngleSource::InputSlot(0)),
            GateOp::ry(1, AngleSource::InputSlot(1)),
            GateOp::ry(1, AngleSource::ParamSlot(0)),
            GateOp::cnot(1, 0),
            GateOp::ry(0, AngleSource::ParamSlot(1)),
        ],
        2,
        2,
    )
    .unwrap()
}

/// Closed-form `p(y=0)` of [`two_param_circuit`].
pub fn two_param_p0(x: [f64; 2], theta: [f64; 2]) -> f64 {
    let a = 0.5 * (x[1] + theta[0]);
    let b = 0.5 * (x[0] + theta[1]);
    let c = 0.5 * (x[0] - theta[1]);
    a.cos().powi(2) * b.cos().powi(2) + a.sin().powi(2) * c.sin().powi(2)
}

fn two_param_grad_p0(x: [f64; 2], theta: [f64; 2]) -> [f64; 2] {
    let h = 1e-6;
    let mut g = [0.0; 2];
    for (j, gj) in g.iter_mut().enumerate() {
        let mut plus = theta;
        let mut minus = theta;
        plus[j] += h;
        minus[j] -= h;
        *gj = (two_param_p0(x, plus) - two_param_p0(x, minus)) / (2.0 * h);
    }
    g
}

/// Expected Fisher `E_x Σ_y p_y ∇log p_y ∇log p_yᵀ` of [`two_param_circuit`]
/// with `x ~ N(0, I)`. The integrand is 2π-periodic in each input, so the
/// Gaussian is wrapped onto one period and integrated with the trapezoid rule.
pub fn two_param_fisher(theta: [f64; 2], x_points: usize) -> [[f64; 2]; 2] {
    let h = TAU / x_points as f64;
    let weights: Vec<f64> = (0..x_points)
        .map(|i| {
            let t = i as f64 * h;
            (-8..=8)
                .map(|k| {
                    let u = t + TAU * k as f64;
                    (-0.5 * u * u).exp() / (TAU).sqrt()
                })
                .sum::<f64>()
                * h
        })
        .collect();
    let mut f = [[0.0; 2]; 2];
    for (i0, w0) in weights.iter().enumerate() {
        for (i1, w1) in weights.iter().enumerate() {
            let x = [i0 as f64 * h, i1 as f64 * h];
            let p0 = two_param_p0(x, theta);
            let p1 = 1.0 - p0;
            if p0 * p1 < 1e-14 {
                continue;
            }
            let g = two_param_grad_p0(x, theta);
            let s = w0 * w1 / (p0 * p1);
            for a in 0..2 {
                for b in 0..2 {
                    f[a][b] += s * g[a] * g[b];
                }
            }
        }
    }
    f
}

/// Effective dimension of [`two_param_circuit`] from a trapezoid grid over
/// `[0, 2π]²` with the exact expected Fisher at every node.
pub fn two_param_grid_ed(gamma: f64, n: f64, theta_points: usize, x_points: usize) -> f64 {
    let h = TAU / theta_points as f64;
    let fishers: Vec<[[f64; 2]; 2]> = (0..theta_points * theta_points)
        .map(|idx| {
            let theta = [(idx / theta_points) as f64 * h, (idx % theta_points) as f64 * h];
            two_param_fisher(theta, x_points)
        })
        .collect();
    let mean_trace = fishers.iter().map(|f| f[0][0] + f[1][1]).sum::<f64>() / fishers.len() as f64;
    let scale = 2.0 / mean_trace;
    let k = kappa(gamma, n);
    let mean_sqrt_det = fishers
        .iter()
        .map(|f| {
            let a = 1.0 + k * scale * f[0][0];
            let d = 1.0 + k * scale * f[1][1];
            let b = k * scale * f[0][1];
            (a * d - b * b).sqrt()
        })
        .sum::<f64>()
        / fishers.len() as f64;
    2.0 * mean_sqrt_det.ln() / k.ln()
}

// ---------------------------------------------------------------------------
// finite differences and random circuits

/// Central difference of `ln p_y` with respect to each parameter.
pub fn fd_log_prob_gradient<M: ProbabilisticModel>(m: &M, x: &[f64], y: usize, theta: &[f64], h: f64) -> Vec<f64> {
    let mut t = theta.to_vec();
    (0..theta.len())
        .map(|j| {
            t[j] = theta[j] + h;
            let plus = m.forward(x, &t).unwrap()[y].ln();
            t[j] = theta[j] - h;
            let minus = m.forward(x, &t).unwrap()[y].ln();
            t[j] = theta[j];
            (plus - minus) / (2.0 * h)
        })
        .collect()
}

/// A random circuit over `n` qubits mixing all gate kinds, each parameter
/// used once and a few encoding rotations.
pub fn random_circuit<R: Rng>(n: usize, num_gates: usize, rng: &mut R) -> CircuitSpec {
    let kinds = [GateKind::RX, GateKind::RY, GateKind::RZ];
    let mut gates: Vec<GateOp> = (0..n)
        .map(|q| GateOp::rotation(kinds[rng.random_range(0..3)], q, AngleSource::InputSlot(q)))
        .collect();
    let mut num_params = 0;
    for _ in 0..num_gates {
        match rng.random_range(0..5) {
            0 => gates.push(GateOp::h(rng.random_range(0..n))),
            1 => {
                let c = rng.random_range(0..n);
                let t = (c + rng.random_range(1..n)) % n;
                gates.push(GateOp::cnot(c, t));
            }
            2 => gates.push(GateOp::rotation(
                kinds[rng.random_range(0..3)],
                rng.random_range(0..n),
                AngleSource::Constant(rng.random_range(-PI..PI)),
            )),
            _ => {
                gates.push(GateOp::rotation(
                    kinds[rng.random_range(0..3)],
                    rng.random_range(0..n),
                    AngleSource::ParamSlot(num_params),
                ));
                num_params += 1;
            }
        }
    }
    CircuitSpec::new(n, gates, n, num_params).unwrap()
}

// ---------------------------------------------------------------------------
// model wrappers

/// Forwards to a quantum model and records every `(x, y)` whose score was
/// requested, so the Fisher estimate can be rebuilt independently.
pub struct Recording {
    pub inner: QuantumModel,
    pub calls: Mutex<Vec<(Vec<f64>, usize)>>,
}

impl Recording {
    pub fn new(inner: QuantumModel) -> Self {
        Self {
            inner,
            calls: Mutex::new(Vec::new()),
        }
    }
}

impl ProbabilisticModel for Recording {
    fn num_params(&self) -> usize {
        self.inner.num_params()
    }
    fn num_inputs(&self) -> usize {
        self.inner.num_inputs()
    }
    fn parameter_domain(&self) -> ParameterDomain {
        self.inner.parameter_domain()
    }
    fn forward(&self, x: &[f64], theta: &[f64]) -> Result<[f64; NUM_CLASSES]> {
        self.inner.forward(x, theta)
    }
    fn log_prob_gradient(&self, x: &[f64], y: usize, theta: &[f64]) -> Result<Vec<f64>> {
        let g = self.inner.log_prob_gradient(x, y, theta)?;
        self.calls.lock().unwrap().push((x.to_vec(), y));
        Ok(g)
    }
}

/// Multiplies every score by a constant, which scales the Fisher by its square.
pub struct Scaled<M> {
    pub inner: M,
    pub factor: f64,
}

impl<M: ProbabilisticModel> ProbabilisticModel for Scaled<M> {
    fn num_params(&self) -> usize {
        self.inner.num_params()
    }
    fn num_inputs(&self) -> usize {
        self.inner.num_inputs()
    }
    fn parameter_domain(&self) -> ParameterDomain {
        self.inner.parameter_domain()
    }
    fn forward(&self, x: &[f64], theta: &[f64]) -> Result<[f64; NUM_CLASSES]> {
        self.inner.forward(x, theta)
    }
    fn log_prob_gradient(&self, x: &[f64], y: usize, theta: &[f64]) -> Result<Vec<f64>> {
        Ok(self
            .inner
            .log_prob_gradient(x, y, theta)?
            .into_iter()
            .map(|g| g * self.factor)
            .collect())
    }
}

// ---------------------------------------------------------------------------
// command-line helpers

pub const BEST_ARCH: &str =
    r#"{"encoding_layer":[[0,1],[0,1,0]],"variational_layer":[[[1,0],[0,1,0]],[[0,1],[0,1,0]]]}"#;

/// A small configuration exercising every command in well under a second.
pub fn small_config(seed: u64) -> String {
    format!(
        r#"{{
  "seed": {seed},
  "evolution": {{
    "population_size": 6, "num_parents": 2, "sigma": 0.1, "num_generations": 3,
    "n_qubits": 3, "num_var_layers": 2, "master_seed": {seed},
    "ed": {{"gamma": 1.0, "n": 1000, "num_theta_samples": 6, "k": 10}}
  }},
  "model": {{"architecture": {BEST_ARCH}}},
  "sweep": {{"n_qubits": 4, "num_theta_samples": 12, "k": 20, "include_baselines": true}},
  "spectrum": {{"qubit_list": [3, 4], "num_theta_samples": 6, "k": 10}}
}}"#
    )
}

pub fn evoqas(args: &[&str]) -> std::process::Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_evoqas"))
        .args(args)
        .env_remove("EVOQAS_OUT")
        .output()
        .expect("binary runs")
}

/// Every file in `dir` with its bytes, sorted by name.
pub fn snapshot(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}
