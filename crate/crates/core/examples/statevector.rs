//! Gate-level simulation: a Bell pair, a GHZ state and a circuit text dump.
//!
//! ```bash
//! cargo run -p evoqas --example statevector
//! ```

use evoqas::simulator::{apply_gate, measurement_probabilities, run_circuit};
use evoqas::{AngleSource, CircuitSpec, GateOp, StateVector};

fn show(label: &str, probs: &[f64]) {
    let n = probs.len().trailing_zeros() as usize;
    print!("{label:<10}");
    for (i, p) in probs.iter().enumerate().filter(|(_, &p)| p > 1e-12) {
        print!(" |{i:0n$b}>:{p:.3}");
    }
    println!();
}

fn main() -> evoqas::Result<()> {
    let mut bell = StateVector::zero(2)?;
    bell = apply_gate(&bell, &GateOp::h(0), None)?;
    bell = apply_gate(&bell, &GateOp::cnot(0, 1), None)?;
    show("bell", &measurement_probabilities(&bell));

    let ghz = CircuitSpec::new(
        4,
        vec![GateOp::h(0), GateOp::cnot(0, 1), GateOp::cnot(1, 2), GateOp::cnot(2, 3)],
        0,
        0,
    )?;
    show("ghz", &run_circuit(&ghz, &[], &[])?.probabilities());

    // inputs and trainable angles are bound at run time
    let circuit = CircuitSpec::new(
        2,
        vec![
            GateOp::ry(0, AngleSource::InputSlot(0)),
            GateOp::rx(1, AngleSource::ParamSlot(0)),
            GateOp::cnot(0, 1),
            GateOp::rz(1, AngleSource::Constant(0.25)),
        ],
        1,
        1,
    )?;
    show("bound", &run_circuit(&circuit, &[1.2], &[0.7])?.probabilities());

    println!("\n{circuit}");
    let parsed: CircuitSpec = circuit.to_string().parse()?;
    assert_eq!(parsed, circuit);
    Ok(())
}
