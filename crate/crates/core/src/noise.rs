//! Physical error channels and construction of noisy syndrome-extraction
//! circuits from a layout and a gate schedule.
//!
//! Time is measured in units of one two-qubit gate. Each scheduled step
//! (H, CNOT group, measurement) idles every qubit that is not in a CNOT or
//! being measured during it; H itself is ideal and only costs time.

use std::collections::HashMap;

use crate::circuit::{ChannelKind, DetectorInfo, NoisyCircuit, Op, PauliChannel};
use crate::code::{Basis, CodeLayout, Gate, Qubit, Schedule};
use crate::error::{Error, Result};
use crate::pauli::Pauli;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Durations {
    pub two_qubit: f64,
    pub single_qubit: f64,
    pub measurement: f64,
}

impl Default for Durations {
    fn default() -> Self {
        Durations {
            two_qubit: 1.0,
            single_qubit: 0.1,
            measurement: 5.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IdleModel {
    /// Depolarizing coherence time `T`; `f64::INFINITY` disables idling.
    CoherenceTime(f64),
    /// Idle error probability per unit time.
    RatePerUnit(f64),
}

impl IdleModel {
    pub fn coherence_time(&self) -> Result<f64> {
        match *self {
            IdleModel::CoherenceTime(t) => {
                if t > 0.0 {
                    Ok(t)
                } else {
                    Err(Error::invalid(format!(
                        "coherence time must be positive, got {t}"
                    )))
                }
            }
            IdleModel::RatePerUnit(p) => coherence_from_idle(p),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PowerLaw {
    pub coefficient: f64,
    pub exponent: f64,
    /// Smallest distance (lattice constants) the law is trusted at.
    pub r_min: f64,
    /// Value used below `r_min`; defaults to the law evaluated at `r_min`.
    pub clamp: Option<f64>,
}

impl PowerLaw {
    pub fn new(coefficient: f64, exponent: f64, r_min: f64) -> Self {
        PowerLaw {
            coefficient,
            exponent,
            r_min,
            clamp: None,
        }
    }

    pub fn eval(&self, r_over_a: f64) -> f64 {
        if r_over_a >= self.r_min {
            self.coefficient * r_over_a.powf(-self.exponent)
        } else {
            self.clamp
                .unwrap_or_else(|| self.coefficient * self.r_min.powf(-self.exponent))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CrosstalkModel {
    Uniform(f64),
    PowerLaw(PowerLaw),
    /// Per-pair probabilities keyed by unordered qubit pair.
    Matrix(HashMap<(Qubit, Qubit), f64>),
}

/// Which Pauli a crosstalk event applies to its two qubits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CrosstalkPauli {
    /// X on a CNOT control, Z on a target.
    #[default]
    Role,
    /// Two-qubit depolarizing with the same total probability.
    Depolarizing,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseParams {
    pub p_gate: f64,
    pub idle: IdleModel,
    pub crosstalk: CrosstalkModel,
    pub crosstalk_pauli: CrosstalkPauli,
    pub durations: Durations,
}

impl NoiseParams {
    pub fn noiseless() -> Self {
        NoiseParams {
            p_gate: 0.0,
            idle: IdleModel::CoherenceTime(f64::INFINITY),
            crosstalk: CrosstalkModel::Uniform(0.0),
            crosstalk_pauli: CrosstalkPauli::Role,
            durations: Durations::default(),
        }
    }

    /// `p_g = p_i = p_c = p`, the single-parameter sweep.
    pub fn uniform(p: f64) -> Self {
        NoiseParams {
            p_gate: p,
            idle: IdleModel::RatePerUnit(p),
            crosstalk: CrosstalkModel::Uniform(p),
            ..Self::noiseless()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let prob = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::invalid(format!(
                    "{name} must be a probability, got {p}"
                )))
            }
        };
        prob("p_g", self.p_gate)?;
        self.idle.coherence_time()?;
        match &self.crosstalk {
            CrosstalkModel::Uniform(p) => prob("p_c", *p)?,
            CrosstalkModel::PowerLaw(law) => {
                if !(law.coefficient >= 0.0 && law.exponent > 0.0 && law.r_min > 0.0) {
                    return Err(Error::invalid(
                        "power law needs c >= 0, gamma > 0, r_min > 0",
                    ));
                }
                prob("power-law clamp", law.eval(0.0))?;
            }
            CrosstalkModel::Matrix(table) => {
                for &p in table.values() {
                    prob("crosstalk matrix entry", p)?;
                }
            }
        }
        let d = &self.durations;
        if !(d.two_qubit > 0.0 && d.single_qubit > 0.0 && d.measurement > 0.0) {
            return Err(Error::invalid("durations must be positive"));
        }
        Ok(())
    }
}

/// Depolarizing probability after idling for `t` with coherence time `T`.
pub fn idle_error_prob(t: f64, coherence: f64) -> Result<f64> {
    if t < 0.0 || !(coherence > 0.0) {
        return Err(Error::invalid(format!(
            "idle needs t >= 0 and T > 0, got t={t}, T={coherence}"
        )));
    }
    Ok(-0.75 * (-t / coherence).exp_m1())
}

/// Coherence time whose unit-time idle probability is `p`.
pub fn coherence_from_idle(p: f64) -> Result<f64> {
    if !(0.0..0.75).contains(&p) {
        return Err(Error::invalid(format!(
            "idle probability must be in [0, 3/4), got {p}"
        )));
    }
    if p == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-1.0 / (-4.0 * p / 3.0).ln_1p())
}

/// Position on the triangular lattice in units of the lattice constant.
pub fn lattice_position(layout: &CodeLayout, q: Qubit) -> [f64; 2] {
    let (i, j) = layout.coord(q).lattice_site();
    let (i, j) = (i as f64, j as f64);
    [i + 0.5 * j, j * 3f64.sqrt() / 2.0]
}

pub fn lattice_distance(layout: &CodeLayout, a: Qubit, b: Qubit) -> f64 {
    let (pa, pb) = (lattice_position(layout, a), lattice_position(layout, b));
    (pa[0] - pb[0]).hypot(pa[1] - pb[1])
}

/// Crosstalk probability between two qubits `r_over_a` lattice constants apart.
pub fn crosstalk_prob(model: &CrosstalkModel, a: Qubit, b: Qubit, r_over_a: f64) -> Result<f64> {
    match model {
        CrosstalkModel::Uniform(p) => Ok(*p),
        CrosstalkModel::PowerLaw(law) => Ok(law.eval(r_over_a)),
        CrosstalkModel::Matrix(table) => table
            .get(&(a.min(b), a.max(b)))
            .copied()
            .ok_or(Error::MissingCrosstalkPair(a.min(b), a.max(b))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrosstalkLocation {
    pub qubit_a: Qubit,
    pub pauli_a: Pauli,
    pub qubit_b: Qubit,
    pub pauli_b: Pauli,
    pub probability: f64,
}

fn role_pauli(gate: &Gate, q: Qubit) -> Pauli {
    if q == gate.control {
        Pauli::X
    } else {
        Pauli::Z
    }
}

/// All cross-gate qubit pairs in one simultaneous group: 4 per gate pair.
pub fn crosstalk_locations(
    layout: &CodeLayout,
    group: &[Gate],
    model: &CrosstalkModel,
) -> Result<Vec<CrosstalkLocation>> {
    let mut out = Vec::with_capacity(2 * group.len() * group.len().saturating_sub(1));
    for (i, g1) in group.iter().enumerate() {
        for g2 in &group[i + 1..] {
            for qa in [g1.control, g1.target] {
                for qb in [g2.control, g2.target] {
                    let r = lattice_distance(layout, qa, qb);
                    out.push(CrosstalkLocation {
                        qubit_a: qa,
                        pauli_a: role_pauli(g1, qa),
                        qubit_b: qb,
                        pauli_b: role_pauli(g2, qb),
                        probability: crosstalk_prob(model, qa, qb, r)?,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Total crosstalk probability per round divided by the CNOT count.
pub fn effective_crosstalk_per_gate(
    layout: &CodeLayout,
    schedule: &Schedule,
    model: &CrosstalkModel,
) -> Result<f64> {
    let mut total = 0.0;
    for group in &schedule.groups {
        total += crosstalk_locations(layout, group, model)?
            .iter()
            .map(|l| l.probability)
            .sum::<f64>();
    }
    Ok(total / schedule.num_gates() as f64)
}

struct RoundBuilder<'a> {
    layout: &'a CodeLayout,
    schedule: &'a Schedule,
    params: &'a NoiseParams,
    coherence: f64,
}

impl<'a> RoundBuilder<'a> {
    fn new(
        layout: &'a CodeLayout,
        schedule: &'a Schedule,
        params: &'a NoiseParams,
    ) -> Result<Self> {
        params.validate()?;
        schedule.validate(layout)?;
        let n = layout.num_qubits();
        for gate in schedule.groups.iter().flatten() {
            for q in [gate.control, gate.target] {
                if q >= n {
                    return Err(Error::UnknownQubit(q));
                }
            }
        }
        Ok(RoundBuilder {
            layout,
            schedule,
            params,
            coherence: params.idle.coherence_time()?,
        })
    }

    fn idle(&self, circuit: &mut NoisyCircuit, dt: f64, busy: &[bool]) -> Result<()> {
        let p = idle_error_prob(dt, self.coherence)?;
        if p <= 0.0 {
            return Ok(());
        }
        for q in 0..self.layout.num_qubits() {
            if !busy[q] {
                circuit.push(Op::Channel(PauliChannel::depolarize1(
                    ChannelKind::Idle,
                    q,
                    p,
                )));
            }
        }
        Ok(())
    }

    /// One extraction round; if `final_data` the data qubits are measured
    /// together with the ancillas. Returns the ancilla record offset.
    fn round(&self, circuit: &mut NoisyCircuit, final_data: bool) -> Result<usize> {
        let layout = self.layout;
        let n = layout.num_qubits();
        let dur = &self.params.durations;
        let x_ancillas: Vec<Qubit> = layout.stabilizers(Basis::X).map(|a| a.qubit).collect();

        for a in layout.ancillas() {
            circuit.push(Op::Reset(a.qubit));
        }
        let idle_all = vec![false; n];
        for &q in &x_ancillas {
            circuit.push(Op::Hadamard(q));
        }
        self.idle(circuit, dur.single_qubit, &idle_all)?;

        let mut busy = vec![false; n];
        for group in &self.schedule.groups {
            busy.iter_mut().for_each(|b| *b = false);
            for g in group {
                circuit.push(Op::Cnot {
                    control: g.control,
                    target: g.target,
                });
                busy[g.control] = true;
                busy[g.target] = true;
            }
            if self.params.p_gate > 0.0 {
                for g in group {
                    circuit.push(Op::Channel(PauliChannel::depolarize2(
                        ChannelKind::Gate,
                        g.control,
                        g.target,
                        self.params.p_gate,
                    )));
                }
            }
            for loc in crosstalk_locations(layout, group, &self.params.crosstalk)? {
                if loc.probability <= 0.0 {
                    continue;
                }
                let channel = match self.params.crosstalk_pauli {
                    CrosstalkPauli::Role => PauliChannel::single(
                        ChannelKind::Crosstalk,
                        vec![(loc.qubit_a, loc.pauli_a), (loc.qubit_b, loc.pauli_b)],
                        loc.probability,
                    ),
                    CrosstalkPauli::Depolarizing => PauliChannel::depolarize2(
                        ChannelKind::Crosstalk,
                        loc.qubit_a,
                        loc.qubit_b,
                        loc.probability,
                    ),
                };
                circuit.push(Op::Channel(channel));
            }
            self.idle(circuit, dur.two_qubit, &busy)?;
        }

        for &q in &x_ancillas {
            circuit.push(Op::Hadamard(q));
        }
        self.idle(circuit, dur.single_qubit, &idle_all)?;

        let mut measured = vec![false; n];
        for a in layout.ancillas() {
            measured[a.qubit] = true;
        }
        if final_data {
            measured.iter_mut().for_each(|m| *m = true);
        }
        self.idle(circuit, dur.measurement, &measured)?;
        let offset = circuit.num_measurements;
        for a in layout.ancillas() {
            circuit.push(Op::Measure(a.qubit));
        }
        if final_data {
            for q in layout.data_qubits() {
                circuit.push(Op::Measure(q));
            }
        }
        Ok(offset)
    }
}

/// One noisy extraction round without detectors, measuring every ancilla.
pub fn attach_noise(
    layout: &CodeLayout,
    schedule: &Schedule,
    params: &NoiseParams,
) -> Result<NoisyCircuit> {
    let builder = RoundBuilder::new(layout, schedule, params)?;
    let mut circuit = NoisyCircuit {
        num_qubits: layout.num_qubits(),
        rounds: 1,
        round_duration: schedule.round_duration(&params.durations),
        ..Default::default()
    };
    builder.round(&mut circuit, false)?;
    Ok(circuit)
}

/// Logical |0> memory: data resets, `rounds` extraction rounds, and a final
/// transversal Z measurement of the data co-scheduled with the last round.
pub fn build_memory_circuit(
    layout: &CodeLayout,
    schedule: &Schedule,
    params: &NoiseParams,
    rounds: usize,
) -> Result<NoisyCircuit> {
    if rounds < 1 {
        return Err(Error::invalid("need at least one round"));
    }
    let builder = RoundBuilder::new(layout, schedule, params)?;
    let mut circuit = NoisyCircuit {
        num_qubits: layout.num_qubits(),
        rounds,
        round_duration: schedule.round_duration(&params.durations),
        ..Default::default()
    };
    for q in layout.data_qubits() {
        circuit.push(Op::Reset(q));
    }
    let mut offsets = Vec::with_capacity(rounds);
    for r in 0..rounds {
        offsets.push(builder.round(&mut circuit, r + 1 == rounds)?);
    }
    let data_offset = offsets[rounds - 1] + layout.ancillas().len();
    let rec = |r: usize, a: usize| offsets[r] + a;

    for r in 0..rounds {
        for (a, anc) in layout.ancillas().iter().enumerate() {
            let records = if r == 0 {
                // only Z stabilizers are deterministic on |0...0>
                if anc.basis == Basis::X {
                    continue;
                }
                vec![rec(0, a)]
            } else {
                vec![rec(r - 1, a), rec(r, a)]
            };
            circuit.detectors.push(records);
            circuit.detector_info.push(DetectorInfo {
                ancilla: anc.qubit,
                round: r,
                basis: anc.basis,
            });
        }
    }
    for (a, anc) in layout.ancillas().iter().enumerate() {
        if anc.basis != Basis::Z {
            continue;
        }
        let mut records = vec![rec(rounds - 1, a)];
        records.extend(anc.support.iter().map(|&q| data_offset + q));
        records.sort_unstable();
        circuit.detectors.push(records);
        circuit.detector_info.push(DetectorInfo {
            ancilla: anc.qubit,
            round: rounds,
            basis: Basis::Z,
        });
    }
    circuit.observable = layout
        .logical_z()
        .iter()
        .map(|&q| data_offset + q)
        .collect();
    Ok(circuit)
}
