//! Noisy stabilizer circuits: Clifford operations interleaved with
//! independent Pauli channels, plus detector and observable annotations
//! over the measurement record.

use crate::code::Qubit;
use crate::pauli::Pauli;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    Gate,
    Idle,
    Crosstalk,
}

/// One outcome of a channel: a Pauli string and its probability.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    pub paulis: Vec<(Qubit, Pauli)>,
    pub probability: f64,
}

/// Mutually exclusive Pauli outcomes; identity with the remaining weight.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliChannel {
    pub kind: ChannelKind,
    pub terms: Vec<PauliTerm>,
}

impl PauliChannel {
    pub fn total_probability(&self) -> f64 {
        self.terms.iter().map(|t| t.probability).sum()
    }

    pub fn single(kind: ChannelKind, paulis: Vec<(Qubit, Pauli)>, probability: f64) -> Self {
        PauliChannel {
            kind,
            terms: vec![PauliTerm {
                paulis,
                probability,
            }],
        }
    }

    /// Single-qubit depolarizing: X, Y, Z each with `p / 3`.
    pub fn depolarize1(kind: ChannelKind, q: Qubit, p: f64) -> Self {
        PauliChannel {
            kind,
            terms: Pauli::NON_IDENTITY
                .iter()
                .map(|&s| PauliTerm {
                    paulis: vec![(q, s)],
                    probability: p / 3.0,
                })
                .collect(),
        }
    }

    /// Two-qubit depolarizing: the 15 non-identity Paulis each with `p / 15`.
    pub fn depolarize2(kind: ChannelKind, a: Qubit, b: Qubit, p: f64) -> Self {
        let all = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        let mut terms = Vec::with_capacity(15);
        for &pa in &all {
            for &pb in &all {
                if pa == Pauli::I && pb == Pauli::I {
                    continue;
                }
                let mut paulis = Vec::with_capacity(2);
                if pa != Pauli::I {
                    paulis.push((a, pa));
                }
                if pb != Pauli::I {
                    paulis.push((b, pb));
                }
                terms.push(PauliTerm {
                    paulis,
                    probability: p / 15.0,
                });
            }
        }
        PauliChannel { kind, terms }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Op {
    /// Prepare |0>.
    Reset(Qubit),
    Hadamard(Qubit),
    Cnot {
        control: Qubit,
        target: Qubit,
    },
    /// Z-basis measurement appended to the record.
    Measure(Qubit),
    Channel(PauliChannel),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DetectorInfo {
    /// Ancilla qubit the detector compares, if it belongs to one.
    pub ancilla: Qubit,
    pub round: usize,
    pub basis: crate::code::Basis,
}

#[derive(Clone, Debug, Default)]
pub struct NoisyCircuit {
    pub num_qubits: usize,
    pub ops: Vec<Op>,
    pub num_measurements: usize,
    /// Each detector is the parity of these measurement indices.
    pub detectors: Vec<Vec<usize>>,
    pub detector_info: Vec<DetectorInfo>,
    /// Logical observable as a parity of measurement indices.
    pub observable: Vec<usize>,
    pub rounds: usize,
    /// Duration of one extraction round in two-qubit gate units.
    pub round_duration: f64,
}

impl NoisyCircuit {
    pub fn push(&mut self, op: Op) {
        if let Op::Measure(_) = op {
            self.num_measurements += 1;
        }
        self.ops.push(op);
    }

    pub fn channels(&self) -> impl Iterator<Item = &PauliChannel> {
        self.ops.iter().filter_map(|op| match op {
            Op::Channel(c) => Some(c),
            _ => None,
        })
    }

    pub fn num_channels(&self, kind: ChannelKind) -> usize {
        self.channels().filter(|c| c.kind == kind).count()
    }

    /// Same circuit with every channel dropped.
    pub fn noiseless(&self) -> NoisyCircuit {
        NoisyCircuit {
            ops: self
                .ops
                .iter()
                .filter(|op| !matches!(op, Op::Channel(_)))
                .cloned()
                .collect(),
            ..self.clone()
        }
    }

    /// Human-readable op list, one op per line, followed by the detector and
    /// observable annotations.
    pub fn to_text(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "qubits {} rounds {} round_duration {}",
            self.num_qubits, self.rounds, self.round_duration
        );
        for op in &self.ops {
            let _ = match op {
                Op::Reset(q) => writeln!(out, "R {q}"),
                Op::Hadamard(q) => writeln!(out, "H {q}"),
                Op::Cnot { control, target } => writeln!(out, "CX {control} {target}"),
                Op::Measure(q) => writeln!(out, "M {q}"),
                Op::Channel(c) => {
                    let kind = match c.kind {
                        ChannelKind::Gate => "GATE",
                        ChannelKind::Idle => "IDLE",
                        ChannelKind::Crosstalk => "XTALK",
                    };
                    let terms: Vec<String> = c
                        .terms
                        .iter()
                        .map(|t| {
                            let ps: Vec<String> =
                                t.paulis.iter().map(|(q, p)| format!("{p}{q}")).collect();
                            format!("{}:{:e}", ps.join("*"), t.probability)
                        })
                        .collect();
                    writeln!(out, "{kind} {}", terms.join(" "))
                }
            };
        }
        for (det, info) in self.detectors.iter().zip(&self.detector_info) {
            let recs: Vec<String> = det.iter().map(|m| m.to_string()).collect();
            let _ = writeln!(
                out,
                "DETECTOR {:?} ancilla {} round {} rec {}",
                info.basis,
                info.ancilla,
                info.round,
                recs.join(" ")
            );
        }
        let recs: Vec<String> = self.observable.iter().map(|m| m.to_string()).collect();
        let _ = writeln!(out, "OBSERVABLE rec {}", recs.join(" "));
        out
    }

    /// Keep only channels of the given kinds.
    pub fn filter_channels(&self, keep: &[ChannelKind]) -> NoisyCircuit {
        NoisyCircuit {
            ops: self
                .ops
                .iter()
                .filter(|op| match op {
                    Op::Channel(c) => keep.contains(&c.kind),
                    _ => true,
                })
                .cloned()
                .collect(),
            ..self.clone()
        }
    }
}
