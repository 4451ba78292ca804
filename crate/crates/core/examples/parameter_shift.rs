//! Parameter-shift score of a decoded circuit next to a central finite
//! difference.
//!
//! ```bash
//! cargo run -p evoqas --example parameter_shift -- [seed]
//! ```

use evoqas::rng::stream;
use evoqas::{decode, init_genotype, sample_architecture, ProbabilisticModel, QuantumModel, SamplingMode};
use rand::Rng;

fn main() -> evoqas::Result<()> {
    let seed = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1);
    let mut rng = stream(seed, &[]);
    let arch = sample_architecture(&init_genotype(2, &mut rng), SamplingMode::Softmax, &mut rng);
    let model = QuantumModel::new(decode(&arch, 4)?);
    println!("{}", serde_json::to_string(&arch)?);

    let theta: Vec<f64> = (0..model.num_params()).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
    let x: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
    let p = model.forward(&x, &theta)?;
    println!("p(y=0) = {:.6}  p(y=1) = {:.6}", p[0], p[1]);

    let y = usize::from(p[1] > p[0]);
    let shift = model.log_prob_gradient(&x, y, &theta)?;
    let h = 1e-5;
    println!("{:>3} {:>14} {:>14} {:>10}", "j", "shift", "finite diff", "|diff|");
    for (j, g) in shift.iter().enumerate() {
        let mut t = theta.clone();
        t[j] += h;
        let plus = model.forward(&x, &t)?[y].ln();
        t[j] -= 2.0 * h;
        let minus = model.forward(&x, &t)?[y].ln();
        let fd = (plus - minus) / (2.0 * h);
        println!("{j:>3} {g:>14.9} {fd:>14.9} {:>10.2e}", (g - fd).abs());
    }
    Ok(())
}
