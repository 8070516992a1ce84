use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::circuit::{ChannelKind, NoisyCircuit, Op, PauliTerm};
use crate::code::Basis;
use crate::code::Qubit;
use crate::pauli::Pauli;
use crate::sim::{enumerate_single_faults, Fault};

/// Probability that exactly one of two independent events occurs.
pub fn merge_probability(p1: f64, p2: f64) -> f64 {
    p1 * (1.0 - p2) + p2 * (1.0 - p1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mechanism {
    pub probability: f64,
    /// Sorted detector ids.
    pub detectors: Vec<u32>,
    pub observable: bool,
    /// Symptoms of the single-qubit factors of a nonlocal (crosstalk) fault,
    /// whose XOR is this mechanism; empty when the mechanism is kept whole.
    pub parts: Vec<(Vec<u32>, bool)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetectorErrorModel {
    pub num_detectors: usize,
    pub mechanisms: Vec<Mechanism>,
    pub merged: bool,
    /// Optional sector label per detector (e.g. stabilizer basis). Matching
    /// never joins detectors of different sectors.
    pub sectors: Option<Vec<u8>>,
    /// Sector whose edges carry observable flips.
    pub observable_sector: u8,
}

impl DetectorErrorModel {
    /// Merge faults with identical symptoms; harmless faults are dropped.
    pub fn from_faults(num_detectors: usize, faults: &[Fault]) -> Self {
        Self::merge(num_detectors, faults, &vec![Vec::new(); faults.len()])
    }

    /// As [`from_faults`](Self::from_faults), with optional factor parts per
    /// fault. A merged mechanism keeps parts only if every contributing fault
    /// has them; the first fault's parts are used.
    fn merge(num_detectors: usize, faults: &[Fault], parts: &[Vec<(Vec<u32>, bool)>]) -> Self {
        let mut table: BTreeMap<(Vec<u32>, bool), (f64, Option<Vec<(Vec<u32>, bool)>>)> =
            BTreeMap::new();
        for (f, fparts) in faults.iter().zip(parts) {
            if f.probability <= 0.0 || (f.detectors.is_empty() && !f.observable) {
                continue;
            }
            let mut dets = f.detectors.clone();
            dets.sort_unstable();
            let entry = table
                .entry((dets, f.observable))
                .or_insert_with(|| (0.0, Some(fparts.clone())));
            entry.0 = merge_probability(entry.0, f.probability);
            if fparts.is_empty() {
                entry.1 = None;
            }
        }
        DetectorErrorModel {
            num_detectors,
            mechanisms: table
                .into_iter()
                .map(
                    |((detectors, observable), (probability, parts))| Mechanism {
                        probability,
                        detectors,
                        observable,
                        parts: parts.unwrap_or_default(),
                    },
                )
                .collect(),
            merged: true,
            sectors: None,
            observable_sector: 0,
        }
    }

    /// One mechanism per line: probability, detector ids, observable bit.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# detectors={} mechanisms={}",
            self.num_detectors,
            self.mechanisms.len()
        );
        for m in &self.mechanisms {
            let dets: Vec<String> = m.detectors.iter().map(u32::to_string).collect();
            let _ = writeln!(
                out,
                "{:e} [{}] {}",
                m.probability,
                dets.join(" "),
                u8::from(m.observable)
            );
        }
        out
    }
}

/// DEM of a memory circuit, with Z- and X-stabilizer detectors in separate
/// sectors (Z carries the observable). Crosstalk faults carry the symptoms
/// of their single-qubit factors so decomposition keeps the graph local.
pub fn build_dem(circuit: &NoisyCircuit) -> DetectorErrorModel {
    let faults = enumerate_single_faults(circuit);
    let parts = crosstalk_factor_parts(circuit, &faults);
    let mut dem = DetectorErrorModel::merge(circuit.detectors.len(), &faults, &parts);
    if circuit.detector_info.len() == circuit.detectors.len() {
        dem.sectors = Some(
            circuit
                .detector_info
                .iter()
                .map(|i| u8::from(i.basis == Basis::X))
                .collect(),
        );
        dem.observable_sector = 0;
    }
    dem
}

/// Per fault, the nontrivial symptoms of each single-qubit factor of a
/// multi-qubit crosstalk term (empty for every other fault).
fn crosstalk_factor_parts(circuit: &NoisyCircuit, faults: &[Fault]) -> Vec<Vec<(Vec<u32>, bool)>> {
    let is_split = |f: &Fault| f.kind == ChannelKind::Crosstalk;
    if !faults.iter().any(is_split) {
        return vec![Vec::new(); faults.len()];
    }
    // same channel order, each crosstalk channel reduced to its distinct factors
    let mut factored = circuit.clone();
    let mut factor_lists: Vec<Vec<(Qubit, Pauli)>> = Vec::new();
    for op in factored.ops.iter_mut() {
        let Op::Channel(ch) = op else { continue };
        let mut singles: Vec<(Qubit, Pauli)> = Vec::new();
        if ch.kind == ChannelKind::Crosstalk {
            for t in ch.terms.iter().filter(|t| t.paulis.len() > 1) {
                for &f in &t.paulis {
                    if !singles.contains(&f) {
                        singles.push(f);
                    }
                }
            }
        }
        ch.terms = singles
            .iter()
            .map(|&f| PauliTerm {
                paulis: vec![f],
                probability: 1.0,
            })
            .collect();
        factor_lists.push(singles);
    }
    let mut symptom: BTreeMap<(usize, Qubit, Pauli), (Vec<u32>, bool)> = BTreeMap::new();
    for f in enumerate_single_faults(&factored) {
        let (q, p) = factor_lists[f.channel][f.term];
        let mut dets = f.detectors;
        dets.sort_unstable();
        symptom.insert((f.channel, q, p), (dets, f.observable));
    }
    let channels: Vec<_> = circuit.channels().collect();
    faults
        .iter()
        .map(|f| {
            let term = &channels[f.channel].terms[f.term];
            if !is_split(f) || term.paulis.len() < 2 {
                return Vec::new();
            }
            term.paulis
                .iter()
                .map(|&(q, p)| symptom[&(f.channel, q, p)].clone())
                .filter(|(dets, obs)| !dets.is_empty() || *obs)
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fault(p: f64, dets: &[u32], obs: bool) -> Fault {
        Fault {
            channel: 0,
            term: 0,
            kind: ChannelKind::Gate,
            probability: p,
            detectors: dets.to_vec(),
            observable: obs,
        }
    }

    #[test]
    fn merge_rule() {
        assert_eq!(merge_probability(0.1, 0.0), 0.1);
        assert!((merge_probability(0.1, 0.2) - 0.26).abs() < 1e-15);
        let dem = DetectorErrorModel::from_faults(
            4,
            &[
                fault(0.1, &[1, 2], false),
                fault(0.2, &[2, 1], false),
                fault(0.3, &[], false),
                fault(0.1, &[1, 2], true),
            ],
        );
        assert_eq!(dem.mechanisms.len(), 2);
        assert!((dem.mechanisms[0].probability - 0.26).abs() < 1e-15);
        assert_eq!(dem.mechanisms[0].detectors, [1, 2]);
    }
}
