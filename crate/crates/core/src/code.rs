//! Rotated surface code geometry, the four CNOT layers of syndrome
//! extraction, and schedules that split each layer into parallel groups.
//!
//! Coordinates: data qubits sit at odd (x, y) in `[1, 2d-1]`, ancillas at
//! even (x, y). `y` grows downwards, so "north" is `y - 1`.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type Qubit = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord {
    pub x: i32,
    pub y: i32,
}

impl Coord {
    pub const fn new(x: i32, y: i32) -> Self {
        Coord { x, y }
    }

    /// Index on the triangular lattice the layout embeds into.
    pub fn lattice_site(self) -> (i32, i32) {
        ((self.x + self.y) / 2, (self.x - self.y) / 2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    X,
    Z,
}

#[derive(Clone, Debug)]
pub struct Ancilla {
    pub qubit: Qubit,
    pub coord: Coord,
    pub basis: Basis,
    /// Data qubits in the stabilizer, in this ancilla's CNOT order.
    pub support: Vec<Qubit>,
}

/// One syndrome-extraction CNOT. For X stabilizers the ancilla is the
/// control; for Z stabilizers the data qubit is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gate {
    pub control: Qubit,
    pub target: Qubit,
    pub ancilla: Qubit,
    pub data: Qubit,
    /// CNOT layer, 0..4.
    pub layer: usize,
}

#[derive(Clone, Debug)]
pub struct CodeLayout {
    pub distance: usize,
    coords: Vec<Coord>,
    index: HashMap<Coord, Qubit>,
    num_data: usize,
    ancillas: Vec<Ancilla>,
    layers: [Vec<Gate>; 4],
    logical_x: Vec<Qubit>,
    logical_z: Vec<Qubit>,
}

// (dx, dy) offsets from ancilla to data, indexed NW, NE, SW, SE.
const NW: (i32, i32) = (-1, -1);
const NE: (i32, i32) = (1, -1);
const SW: (i32, i32) = (-1, 1);
const SE: (i32, i32) = (1, 1);
const X_ORDER: [(i32, i32); 4] = [NW, NE, SW, SE];
const Z_ORDER: [(i32, i32); 4] = [NW, SW, NE, SE];

fn ancilla_basis(x: i32, y: i32) -> Basis {
    if ((x + y) / 2) % 2 == 0 {
        Basis::X
    } else {
        Basis::Z
    }
}

pub fn build_rotated_surface_code(d: usize) -> Result<CodeLayout> {
    if d < 3 || d % 2 == 0 {
        return Err(Error::invalid(format!(
            "code distance must be odd and at least 3, got {d}"
        )));
    }
    let n = d as i32;
    let top = 2 * n;

    let mut coords = Vec::with_capacity(2 * d * d - 1);
    for y in (1..top).step_by(2) {
        for x in (1..top).step_by(2) {
            coords.push(Coord::new(x, y));
        }
    }
    let num_data = coords.len();

    let mut anc_coords = Vec::new();
    for y in (0..=top).step_by(2) {
        for x in (0..=top).step_by(2) {
            let basis = ancilla_basis(x, y);
            let x_interior = x > 0 && x < top;
            let y_interior = y > 0 && y < top;
            let keep = match (x_interior, y_interior) {
                (true, true) => true,
                // top/bottom edges carry X stabilizers, left/right edges Z
                (true, false) => basis == Basis::X,
                (false, true) => basis == Basis::Z,
                (false, false) => false,
            };
            if keep {
                anc_coords.push((Coord::new(x, y), basis));
            }
        }
    }
    coords.extend(anc_coords.iter().map(|&(c, _)| c));
    let index: HashMap<Coord, Qubit> = coords.iter().enumerate().map(|(q, &c)| (c, q)).collect();

    let mut layers: [Vec<Gate>; 4] = Default::default();
    let mut ancillas = Vec::with_capacity(anc_coords.len());
    for (a, &(c, basis)) in anc_coords.iter().enumerate() {
        let qubit = num_data + a;
        let order = match basis {
            Basis::X => X_ORDER,
            Basis::Z => Z_ORDER,
        };
        let mut support = Vec::with_capacity(4);
        for (layer, &(dx, dy)) in order.iter().enumerate() {
            let Some(&data) = index.get(&Coord::new(c.x + dx, c.y + dy)) else {
                continue;
            };
            support.push(data);
            let (control, target) = match basis {
                Basis::X => (qubit, data),
                Basis::Z => (data, qubit),
            };
            layers[layer].push(Gate {
                control,
                target,
                ancilla: qubit,
                data,
                layer,
            });
        }
        ancillas.push(Ancilla {
            qubit,
            coord: c,
            basis,
            support,
        });
    }

    let logical_x = (0..num_data).filter(|&q| coords[q].x == 1).collect();
    let logical_z = (0..num_data).filter(|&q| coords[q].y == 1).collect();

    Ok(CodeLayout {
        distance: d,
        coords,
        index,
        num_data,
        ancillas,
        layers,
        logical_x,
        logical_z,
    })
}

impl CodeLayout {
    pub fn num_qubits(&self) -> usize {
        self.coords.len()
    }

    pub fn num_data(&self) -> usize {
        self.num_data
    }

    pub fn data_qubits(&self) -> std::ops::Range<Qubit> {
        0..self.num_data
    }

    pub fn is_data(&self, q: Qubit) -> bool {
        q < self.num_data
    }

    pub fn coord(&self, q: Qubit) -> Coord {
        self.coords[q]
    }

    pub fn coords(&self) -> &[Coord] {
        &self.coords
    }

    pub fn qubit_at(&self, c: Coord) -> Option<Qubit> {
        self.index.get(&c).copied()
    }

    /// Ancillas in row-major order; `ancillas()[a].qubit == num_data() + a`.
    pub fn ancillas(&self) -> &[Ancilla] {
        &self.ancillas
    }

    pub fn ancilla(&self, q: Qubit) -> Option<&Ancilla> {
        q.checked_sub(self.num_data)
            .and_then(|a| self.ancillas.get(a))
    }

    pub fn stabilizers(&self, basis: Basis) -> impl Iterator<Item = &Ancilla> {
        self.ancillas.iter().filter(move |a| a.basis == basis)
    }

    pub fn cnot_layer(&self, layer: usize) -> &[Gate] {
        &self.layers[layer]
    }

    pub fn cnot_layers(&self) -> &[Vec<Gate>; 4] {
        &self.layers
    }

    /// Column `x = 1`; commutes with every Z stabilizer.
    pub fn logical_x(&self) -> &[Qubit] {
        &self.logical_x
    }

    /// Row `y = 1`; commutes with every X stabilizer.
    pub fn logical_z(&self) -> &[Qubit] {
        &self.logical_z
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchedulePolicy {
    /// Gates in layout order, chunked into runs of `k`.
    Raster,
    /// Each layer shuffled with a seeded RNG before chunking.
    Randomized { seed: u64 },
}

/// Parallel gate groups in execution order. Every group lies in one layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub groups: Vec<Vec<Gate>>,
}

impl Schedule {
    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn num_gates(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    /// Duration of one extraction round in two-qubit gate units:
    /// one slot per group plus H, H and measurement.
    pub fn round_duration(&self, durations: &crate::noise::Durations) -> f64 {
        self.groups.len() as f64 * durations.two_qubit
            + 2.0 * durations.single_qubit
            + durations.measurement
    }

    /// Text form: a header line, then `layer group control target` per gate
    /// with qubits as `x,y` coordinates.
    pub fn to_text(&self, layout: &CodeLayout) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# schedule d={} groups={} gates={}",
            layout.distance,
            self.num_groups(),
            self.num_gates()
        );
        for (g, group) in self.groups.iter().enumerate() {
            for gate in group {
                let c = layout.coord(gate.control);
                let t = layout.coord(gate.target);
                let _ = writeln!(out, "{} {} {},{} {},{}", gate.layer, g, c.x, c.y, t.x, t.y);
            }
        }
        out
    }

    pub fn from_text(layout: &CodeLayout, text: &str) -> Result<Schedule> {
        let parse_coord = |s: &str, line: usize| -> Result<Qubit> {
            let (x, y) = s.split_once(',').ok_or_else(|| Error::Parse {
                line,
                message: format!("bad coordinate {s:?}"),
            })?;
            let c = Coord::new(
                x.parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("bad x in {s:?}"),
                })?,
                y.parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("bad y in {s:?}"),
                })?,
            );
            layout.qubit_at(c).ok_or_else(|| Error::Parse {
                line,
                message: format!("no qubit at {s}"),
            })
        };
        let mut groups: Vec<Vec<Gate>> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let raw = raw.trim();
            if raw.is_empty() || raw.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = raw.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(Error::Parse {
                    line,
                    message: "expected 4 fields".into(),
                });
            }
            let layer: usize = fields[0].parse().map_err(|_| Error::Parse {
                line,
                message: "bad layer".into(),
            })?;
            let g: usize = fields[1].parse().map_err(|_| Error::Parse {
                line,
                message: "bad group".into(),
            })?;
            let control = parse_coord(fields[2], line)?;
            let target = parse_coord(fields[3], line)?;
            let gate = layout
                .cnot_layers()
                .get(layer)
                .and_then(|l| {
                    l.iter()
                        .find(|gt| gt.control == control && gt.target == target)
                })
                .copied()
                .ok_or_else(|| Error::Parse {
                    line,
                    message: format!("no CNOT {} -> {} in layer {layer}", fields[2], fields[3]),
                })?;
            if g >= groups.len() {
                groups.resize_with(g + 1, Vec::new);
            }
            groups[g].push(gate);
        }
        let schedule = Schedule { groups };
        schedule.validate(layout)?;
        Ok(schedule)
    }

    /// Each layout CNOT appears exactly once and every group is single-layer.
    pub fn validate(&self, layout: &CodeLayout) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for (g, group) in self.groups.iter().enumerate() {
            if group.is_empty() {
                continue;
            }
            let layer = group[0].layer;
            if group.iter().any(|gt| gt.layer != layer) {
                return Err(Error::invalid(format!("group {g} mixes CNOT layers")));
            }
            for gt in group {
                if !seen.insert((gt.control, gt.target)) {
                    return Err(Error::invalid(format!(
                        "gate {} -> {} scheduled twice",
                        gt.control, gt.target
                    )));
                }
            }
        }
        let total: usize = layout.cnot_layers().iter().map(Vec::len).sum();
        if seen.len() != total {
            return Err(Error::invalid(format!(
                "schedule covers {} of {total} gates",
                seen.len()
            )));
        }
        // layers must run in order for the stabilizer circuit to be valid
        let mut last = 0;
        for group in self.groups.iter().filter(|g| !g.is_empty()) {
            if group[0].layer < last {
                return Err(Error::invalid("groups are out of layer order"));
            }
            last = group[0].layer;
        }
        Ok(())
    }
}

/// Split each layer into groups of at most `k` simultaneous gates.
pub fn schedule_gates(layout: &CodeLayout, k: usize, policy: SchedulePolicy) -> Result<Schedule> {
    let per_layer = layout.cnot_layer(0).len();
    if k < 1 || k > per_layer {
        return Err(Error::invalid(format!(
            "parallelism k must be in [1, {per_layer}], got {k}"
        )));
    }
    let mut rng = match policy {
        SchedulePolicy::Raster => None,
        SchedulePolicy::Randomized { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
    };
    let mut groups = Vec::new();
    for layer in layout.cnot_layers() {
        let mut gates = layer.clone();
        if let Some(rng) = rng.as_mut() {
            gates.shuffle(rng);
        }
        groups.extend(gates.chunks(k).map(<[Gate]>::to_vec));
    }
    Ok(Schedule { groups })
}

/// Group gates by layer and by the data qubit's triangular-lattice site
/// modulo `2l`, giving `8 l^2` groups. Simultaneous gates are then at least
/// `(2l - 1)` lattice constants apart. Empty groups are kept so the round
/// always lasts `8 l^2` gate slots.
pub fn sublattice_schedule(layout: &CodeLayout, l: usize) -> Result<Schedule> {
    if l < 1 {
        return Err(Error::invalid("sublattice spacing l must be at least 1"));
    }
    let m = 2 * l as i32;
    // data sites have odd i + j, which survives reduction mod 2l
    let classes: Vec<(i32, i32)> = (0..m)
        .flat_map(|a| (0..m).map(move |b| (a, b)))
        .filter(|&(a, b)| (a + b) % 2 == 1)
        .collect();
    let mut groups = Vec::with_capacity(4 * classes.len());
    for layer in layout.cnot_layers() {
        for &class in &classes {
            groups.push(
                layer
                    .iter()
                    .filter(|g| {
                        let (i, j) = layout.coord(g.data).lattice_site();
                        (i.rem_euclid(m), j.rem_euclid(m)) == class
                    })
                    .copied()
                    .collect(),
            );
        }
    }
    Ok(Schedule { groups })
}
