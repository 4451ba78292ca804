mod common;

use common::*;
use evoqas::information::{effective_dimension_from_fisher, fisher_samples};
use evoqas::rng::stream;
use evoqas::{
    decode, effective_dimension, eigenspectrum, empirical_fisher, enumerate_search_space, init_genotype,
    normalize_fisher, sample_architecture, EdParams, ProbabilisticModel, QuantumModel, SamplingMode,
};
use nalgebra::DMatrix;
use rand::Rng;
use std::collections::HashSet;

#[test]
fn eigenspectrum_matches_characteristic_polynomial_roots() {
    let mut rng = stream(41, &[]);
    for _ in 0..5 {
        let a = random_symmetric(8, &mut rng);
        let ours = eigenspectrum(&a).unwrap();
        let oracle = char_poly_eigenvalues(&a);
        assert_eq!(oracle.len(), 8);
        for (x, y) in ours.iter().zip(&oracle) {
            assert!((x - y).abs() < 1e-8, "{ours:?} vs {oracle:?}");
        }
    }
}

#[test]
fn determinant_oracle_sanity() {
    let a = DMatrix::from_row_slice(3, 3, &[2.0, 0.0, 1.0, 0.0, 3.0, 0.0, 1.0, 0.0, 2.0]);
    assert!((determinant(&a) - 9.0).abs() < 1e-12);
    assert_eq!(char_poly_eigenvalues(&DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 1.0, 2.0]))).len(), 3);
}

#[test]
fn parameter_shift_matches_finite_differences_on_random_circuits() {
    let mut rng = stream(5, &[]);
    let mut checked = 0;
    for _ in 0..30 {
        let m = QuantumModel::new(random_circuit(4, 24, &mut rng));
        let theta: Vec<f64> = (0..m.num_params()).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        let x: Vec<f64> = (0..4).map(|_| rng.random_range(-2.0..2.0)).collect();
        let p = m.forward(&x, &theta).unwrap();
        for y in 0..2 {
            if p[y] < 1e-2 {
                continue;
            }
            let ours = m.log_prob_gradient(&x, y, &theta).unwrap();
            let fd = fd_log_prob_gradient(&m, &x, y, &theta, 1e-5);
            for (a, b) in ours.iter().zip(&fd) {
                assert!((a - b).abs() < 1e-6, "{a} vs {b}");
            }
            checked += 1;
        }
    }
    assert!(checked >= 20);
}

#[test]
fn empirical_fisher_matches_finite_difference_outer_products() {
    let mut rng = stream(9, &[]);
    let a = sample_architecture(&init_genotype(2, &mut rng), SamplingMode::Softmax, &mut rng);
    let m = Recording::new(QuantumModel::new(decode(&a, 4).unwrap()));
    let theta: Vec<f64> = (0..m.num_params()).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
    let f = empirical_fisher(&m, &theta, 10, &mut stream(10, &[])).unwrap();
    let calls = m.calls.lock().unwrap().clone();
    assert_eq!(calls.len(), 10);
    let d = m.num_params();
    let mut oracle = DMatrix::<f64>::zeros(d, d);
    for (x, y) in &calls {
        let g = nalgebra::DVector::from_vec(fd_log_prob_gradient(&m.inner, x, *y, &theta, 1e-5));
        oracle += &g * g.transpose();
    }
    oracle /= 10.0;
    let err = (&f.matrix - &oracle).amax();
    assert!(err < 1e-5, "max abs error {err}");
    assert!((f.trace - oracle.trace()).abs() < 1e-5);
}

#[test]
fn fisher_samples_are_symmetric_psd_and_normalise_to_d() {
    let mut rng = stream(12, &[]);
    let a = sample_architecture(&init_genotype(2, &mut rng), SamplingMode::Softmax, &mut rng);
    let m = QuantumModel::new(decode(&a, 4).unwrap());
    let samples = fisher_samples(&m, 20, 50, 3).unwrap();
    for s in &samples {
        assert!((&s.matrix - s.matrix.transpose()).amax() <= 1e-12);
        assert!(eigenspectrum(&s.matrix).unwrap()[0] > -1e-9);
    }
    let d = m.num_params();
    let normed = normalize_fisher(&samples, d).unwrap();
    let mean = normed.iter().map(|f| f.trace()).sum::<f64>() / normed.len() as f64;
    assert!((mean - d as f64).abs() < 1e-9);
}

#[test]
fn identity_fisher_matches_closed_form_on_a_grid() {
    for d in [1, 2, 5, 8, 20] {
        for gamma in [0.1, 0.5, 1.0] {
            for n in [1000u64, 5000, 100_000, 10_000_000] {
                if kappa(gamma, n as f64) <= 1.0 {
                    continue;
                }
                let ident = vec![DMatrix::<f64>::identity(d, d); 3];
                let ours = effective_dimension_from_fisher(&ident, d, gamma, n).unwrap();
                let want = identity_fisher_ed(d, gamma, n as f64);
                assert!((ours - want).abs() < 1e-9, "d={d} gamma={gamma} n={n}: {ours} vs {want}");
            }
        }
    }
}

#[test]
fn zero_fisher_has_zero_effective_dimension() {
    let zero = vec![DMatrix::<f64>::zeros(4, 4); 3];
    assert_eq!(effective_dimension_from_fisher(&zero, 4, 1.0, 1000).unwrap(), 0.0);
}

#[test]
fn closed_form_two_param_model_matches_simulator() {
    let m = QuantumModel::new(two_param_circuit());
    let mut rng = stream(2, &[]);
    for _ in 0..50 {
        let x = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
        let theta = [rng.random_range(0.0..6.3), rng.random_range(0.0..6.3)];
        let p = m.forward(&x, &theta).unwrap();
        assert!((p[0] - two_param_p0(x, theta)).abs() < 1e-12);
    }
}

#[test]
fn two_param_monte_carlo_matches_grid_quadrature() {
    let m = QuantumModel::new(two_param_circuit());
    let params = EdParams {
        gamma: 1.0,
        n: 1000,
        num_theta_samples: 1000,
        k: 1000,
    };
    let mc = effective_dimension(&m, &params, 77).unwrap().value;
    let grid = two_param_grid_ed(1.0, 1000.0, 48, 64);
    assert!(((mc - grid) / grid).abs() < 0.02, "monte carlo {mc} vs grid {grid}");
}

#[test]
fn exhaustive_decode_gives_distinct_circuits() {
    for (layers, want) in [(1usize, 36usize), (2, 216)] {
        assert_eq!(enumerate_search_space(layers), Some(want as u128));
        let circuits: HashSet<String> = all_architectures(layers)
            .iter()
            .map(|a| decode(a, 4).unwrap().to_string())
            .collect();
        assert_eq!(circuits.len(), want);
    }
}

fn all_architectures(layers: usize) -> Vec<evoqas::ArchitectureSpec> {
    use evoqas::{ArchitectureSpec, Entangler, HLayer, LayerChoice, Rotation};
    let mut out = Vec::new();
    let total = 6usize.pow(layers as u32 + 1);
    for mut code in 0..total {
        let mut next = |k: usize| {
            let v = code % k;
            code /= k;
            v
        };
        let h_layer = [HLayer::WithH, HLayer::WithoutH][next(2)];
        let encoding_rot = Rotation::ALL[next(3)];
        let layers = (0..layers)
            .map(|_| LayerChoice {
                entangler: Entangler::ALL[next(2)],
                rot: Rotation::ALL[next(3)],
            })
            .collect();
        out.push(ArchitectureSpec {
            h_layer,
            encoding_rot,
            layers,
        });
    }
    out
}
