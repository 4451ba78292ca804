//! Dense statevector simulation for the searchable gate alphabet.
//!
//! Conventions:
//! - qubit 0 is the most significant bit of the basis-state index, so for a
//!   two-qubit register `|10⟩` is index 2;
//! - rotations use the half-angle form `R_P(φ) = exp(−iφP/2)`, which makes the
//!   parameter-shift rule exact with shifts of `±π/2`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register the dense representation is meant for.
pub const MAX_QUBITS: usize = 12;

const NORM_TOLERANCE: f64 = 1e-10;

/// Pure state of an `n`-qubit register.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0⟩^⊗n`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        check_register(n_qubits)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Build a state from raw amplitudes. The vector must have length `2^n`
    /// and unit norm.
    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_register(n_qubits)?;
        if amplitudes.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch {
                what: "amplitudes",
                expected: 1 << n_qubits,
                actual: amplitudes.len(),
            });
        }
        let state = Self {
            n_qubits,
            amplitudes,
        };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "state is not normalised (squared norm {norm})"
            )));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Computational-basis outcome probabilities, `|amplitude_b|²`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    fn apply_single(&mut self, qubit: usize, m: [[Complex64; 2]; 2]) {
        let mask = self.mask(qubit);
        for i in 0..self.amplitudes.len() {
            if i & mask == 0 {
                let j = i | mask;
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[j];
                self.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amplitudes[j] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn apply_cnot(&mut self, control: usize, target: usize) {
        let cmask = self.mask(control);
        let tmask = self.mask(target);
        for i in 0..self.amplitudes.len() {
            if i & cmask != 0 && i & tmask == 0 {
                self.amplitudes.swap(i, i | tmask);
            }
        }
    }

    /// Apply `gate` in place. `angle` is the resolved rotation angle.
    pub(crate) fn apply_mut(&mut self, gate: &GateOp, angle: Option<f64>) -> Result<()> {
        gate.validate(self.n_qubits)?;
        Self::check_angle(gate, angle)?;
        self.apply_unchecked(gate, angle);
        Ok(())
    }

    /// Apply a gate already validated against this register, with `angle`
    /// present exactly for rotations.
    fn apply_unchecked(&mut self, gate: &GateOp, angle: Option<f64>) {
        debug_assert!(gate.validate(self.n_qubits).is_ok());
        debug_assert_eq!(gate.kind.is_rotation(), angle.is_some());
        match gate.kind {
            GateKind::H => self.apply_single(gate.target, hadamard()),
            GateKind::RX => self.apply_single(gate.target, rx(angle.unwrap_or_default())),
            GateKind::RY => self.apply_single(gate.target, ry(angle.unwrap_or_default())),
            GateKind::RZ => self.apply_single(gate.target, rz(angle.unwrap_or_default())),
            GateKind::CNOT => self.apply_cnot(gate.control.unwrap_or_default(), gate.target),
        }
    }

    fn check_angle(gate: &GateOp, angle: Option<f64>) -> Result<()> {
        match (gate.kind.is_rotation(), angle) {
            (true, None) => Err(Error::InvalidGate(format!("{} requires an angle", gate.kind))),
            (false, Some(_)) => Err(Error::InvalidGate(format!("{} does not take an angle", gate.kind))),
            _ => Ok(()),
        }
    }
}

fn check_register(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::InvalidArgument(format!(
            "register size {n_qubits} outside 1..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn hadamard() -> [[Complex64; 2]; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]]
}

fn rx(phi: f64) -> [[Complex64; 2]; 2] {
    let (s, co) = (phi / 2.0).sin_cos();
    [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
}

fn ry(phi: f64) -> [[Complex64; 2]; 2] {
    let (s, co) = (phi / 2.0).sin_cos();
    [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
}

fn rz(phi: f64) -> [[Complex64; 2]; 2] {
    let (s, co) = (phi / 2.0).sin_cos();
    [[c(co, -s), c(0.0, 0.0)], [c(0.0, 0.0), c(co, s)]]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    H,
    RX,
    RY,
    RZ,
    CNOT,
}

impl GateKind {
    pub fn is_rotation(self) -> bool {
        matches!(self, GateKind::RX | GateKind::RY | GateKind::RZ)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GateKind::H => "H",
            GateKind::RX => "RX",
            GateKind::RY => "RY",
            GateKind::RZ => "RZ",
            GateKind::CNOT => "CNOT",
        };
        f.write_str(s)
    }
}

/// Where a rotation gets its angle from when a circuit is run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum AngleSource {
    Constant(f64),
    InputSlot(usize),
    ParamSlot(usize),
}

impl AngleSource {
    fn resolve(self, inputs: &[f64], params: &[f64]) -> f64 {
        match self {
            AngleSource::Constant(v) => v,
            AngleSource::InputSlot(i) => inputs[i],
            AngleSource::ParamSlot(i) => params[i],
        }
    }
}

impl fmt::Display for AngleSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AngleSource::Constant(v) => write!(f, "const:{v:?}"),
            AngleSource::InputSlot(i) => write!(f, "in{i}"),
            AngleSource::ParamSlot(i) => write!(f, "p{i}"),
        }
    }
}

impl FromStr for AngleSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad angle source `{s}`"));
        if let Some(v) = s.strip_prefix("const:") {
            return v.parse().map(AngleSource::Constant).map_err(|_| bad());
        }
        if let Some(i) = s.strip_prefix("in") {
            return i.parse().map(AngleSource::InputSlot).map_err(|_| bad());
        }
        if let Some(i) = s.strip_prefix('p') {
            return i.parse().map(AngleSource::ParamSlot).map_err(|_| bad());
        }
        Err(bad())
    }
}

/// One gate of a circuit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    pub kind: GateKind,
    pub target: usize,
    pub control: Option<usize>,
    pub angle: Option<AngleSource>,
}

impl GateOp {
    pub fn h(target: usize) -> Self {
        Self {
            kind: GateKind::H,
            target,
            control: None,
            angle: None,
        }
    }

    pub fn rotation(kind: GateKind, target: usize, angle: AngleSource) -> Self {
        Self {
            kind,
            target,
            control: None,
            angle: Some(angle),
        }
    }

    pub fn rx(target: usize, angle: AngleSource) -> Self {
        Self::rotation(GateKind::RX, target, angle)
    }

    pub fn ry(target: usize, angle: AngleSource) -> Self {
        Self::rotation(GateKind::RY, target, angle)
    }

    pub fn rz(target: usize, angle: AngleSource) -> Self {
        Self::rotation(GateKind::RZ, target, angle)
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self {
            kind: GateKind::CNOT,
            target,
            control: Some(control),
            angle: None,
        }
    }

    /// Check the structural invariants against a register of `n_qubits`.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        if self.target >= n_qubits {
            return Err(Error::QubitOutOfRange {
                index: self.target,
                n_qubits,
            });
        }
        match (self.kind, self.control) {
            (GateKind::CNOT, Some(ctrl)) => {
                if ctrl >= n_qubits {
                    return Err(Error::QubitOutOfRange {
                        index: ctrl,
                        n_qubits,
                    });
                }
                if ctrl == self.target {
                    return Err(Error::InvalidGate(format!(
                        "CNOT control and target are both {ctrl}"
                    )));
                }
            }
            (GateKind::CNOT, None) => {
                return Err(Error::InvalidGate("CNOT without a control".into()))
            }
            (kind, Some(_)) => {
                return Err(Error::InvalidGate(format!("{kind} cannot have a control")))
            }
            _ => {}
        }
        if self.kind.is_rotation() != self.angle.is_some() {
            return Err(Error::InvalidGate(format!(
                "{} has an angle source iff it is a rotation",
                self.kind
            )));
        }
        Ok(())
    }
}

/// Text form: `KIND target [control] [angle_source]`.
impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind, self.target)?;
        if let Some(ctrl) = self.control {
            write!(f, " {ctrl}")?;
        }
        if let Some(angle) = self.angle {
            write!(f, " {angle}")?;
        }
        Ok(())
    }
}

impl FromStr for GateOp {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::Parse(format!("bad gate line `{line}`"));
        let qubit = |s: &str| s.parse::<usize>().map_err(|_| bad());
        match parts.as_slice() {
            ["H", t] => Ok(GateOp::h(qubit(t)?)),
            ["CNOT", t, ctrl] => Ok(GateOp::cnot(qubit(ctrl)?, qubit(t)?)),
            [kind, t, angle] => {
                let kind = match *kind {
                    "RX" => GateKind::RX,
                    "RY" => GateKind::RY,
                    "RZ" => GateKind::RZ,
                    _ => return Err(bad()),
                };
                Ok(GateOp::rotation(kind, qubit(t)?, angle.parse()?))
            }
            _ => Err(bad()),
        }
    }
}

/// A gate list with input and parameter slots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitSpec {
    n_qubits: usize,
    gates: Vec<GateOp>,
    num_inputs: usize,
    num_params: usize,
}

impl CircuitSpec {
    /// Validate and build a circuit. Every `ParamSlot` index below
    /// `num_params` must be used exactly once.
    pub fn new(
        n_qubits: usize,
        gates: Vec<GateOp>,
        num_inputs: usize,
        num_params: usize,
    ) -> Result<Self> {
        check_register(n_qubits)?;
        let mut param_uses = vec![0usize; num_params];
        for gate in &gates {
            gate.validate(n_qubits)?;
            match gate.angle {
                Some(AngleSource::InputSlot(i)) if i >= num_inputs => {
                    return Err(Error::InvalidGate(format!(
                        "input slot {i} >= num_inputs {num_inputs}"
                    )))
                }
                Some(AngleSource::ParamSlot(i)) => {
                    if i >= num_params {
                        return Err(Error::InvalidGate(format!(
                            "param slot {i} >= num_params {num_params}"
                        )));
                    }
                    param_uses[i] += 1;
                }
                Some(AngleSource::Constant(v)) if !v.is_finite() => {
                    return Err(Error::InvalidGate("non-finite constant angle".into()))
                }
                _ => {}
            }
        }
        if let Some(slot) = param_uses.iter().position(|&u| u != 1) {
            return Err(Error::InvalidGate(format!(
                "param slot {slot} used {} times (must be exactly once)",
                param_uses[slot]
            )));
        }
        Ok(Self {
            n_qubits,
            gates,
            num_inputs,
            num_params,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }
}

/// One gate per line, preceded by a `#` header carrying the register size and
/// slot counts. [`FromStr`] reads the same format back.
impl fmt::Display for CircuitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "# n_qubits={} num_inputs={} num_params={}",
            self.n_qubits, self.num_inputs, self.num_params
        )?;
        for gate in &self.gates {
            writeln!(f, "{gate}")?;
        }
        Ok(())
    }
}

impl FromStr for CircuitSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut header = None;
        let mut gates = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(rest) = line.strip_prefix('#') {
                let mut fields = [None; 3];
                for kv in rest.split_whitespace() {
                    let (key, value) = kv
                        .split_once('=')
                        .ok_or_else(|| Error::Parse(format!("bad header field `{kv}`")))?;
                    let value: usize = value
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad header value `{kv}`")))?;
                    match key {
                        "n_qubits" => fields[0] = Some(value),
                        "num_inputs" => fields[1] = Some(value),
                        "num_params" => fields[2] = Some(value),
                        _ => {}
                    }
                }
                header = Some(fields);
            } else {
                gates.push(line.parse()?);
            }
        }
        match header {
            Some([Some(n), Some(inputs), Some(params)]) => CircuitSpec::new(n, gates, inputs, params),
            _ => Err(Error::Parse("missing circuit header".into())),
        }
    }
}

/// Apply one gate to a copy of `state`.
///
/// `angle` must be given for rotations and omitted otherwise.
pub fn apply_gate(state: &StateVector, gate: &GateOp, angle: Option<f64>) -> Result<StateVector> {
    let mut out = state.clone();
    out.apply_mut(gate, angle)?;
    debug_assert!((out.norm_sqr() - 1.0).abs() < NORM_TOLERANCE);
    Ok(out)
}

/// Run `circuit` from `|0⟩^⊗n`, resolving slot angles from `inputs` and `params`.
pub fn run_circuit(circuit: &CircuitSpec, inputs: &[f64], params: &[f64]) -> Result<StateVector> {
    if inputs.len() != circuit.num_inputs {
        return Err(Error::DimensionMismatch {
            what: "inputs",
            expected: circuit.num_inputs,
            actual: inputs.len(),
        });
    }
    if params.len() != circuit.num_params {
        return Err(Error::DimensionMismatch {
            what: "params",
            expected: circuit.num_params,
            actual: params.len(),
        });
    }
    let mut state = StateVector::zero(circuit.n_qubits)?;
    for gate in &circuit.gates {
        // gates were validated when the circuit was built
        let angle = gate.angle.map(|a| a.resolve(inputs, params));
        state.apply_unchecked(gate, angle);
    }
    Ok(state)
}

pub fn measurement_probabilities(state: &StateVector) -> Vec<f64> {
    state.probabilities()
}
