//! Bit-packed Pauli-frame sampling and exhaustive single-fault propagation.
//!
//! Shots are processed in batches of [`BATCH_SHOTS`] lanes; each batch owns
//! a ChaCha8 stream selected by its index, so results depend only on
//! `(circuit, shots, seed)` and never on how batches are spread over threads.
//! Channels fire by geometric skipping across lanes, so the cost of a channel
//! is proportional to the number of errors it produces, not to the shot count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circuit::{ChannelKind, NoisyCircuit, Op};

pub const BATCH_SHOTS: usize = 1024;
const WORDS: usize = BATCH_SHOTS / 64;

#[derive(Clone, Copy, Debug)]
enum Instr {
    Reset(u32),
    H(u32),
    Cnot(u32, u32),
    Measure(u32),
    Channel(u32),
}

#[derive(Clone, Debug)]
struct Channel {
    probability: f64,
    ln_keep: f64,
    kind: ChannelKind,
    /// Cumulative term weights normalised to the channel total.
    cumulative: Vec<f64>,
    /// Per term: (qubit, x flip, z flip).
    terms: Vec<Vec<(u32, bool, bool)>>,
    term_probability: Vec<f64>,
}

/// A circuit lowered to flat instructions for frame propagation.
#[derive(Clone, Debug)]
pub struct FrameSimulator {
    num_qubits: usize,
    num_measurements: usize,
    instrs: Vec<Instr>,
    channels: Vec<Channel>,
    detectors: Vec<Vec<usize>>,
    observable: Vec<usize>,
}

/// Detector and observable flips for up to [`BATCH_SHOTS`] shots, packed
/// with one bit per shot.
#[derive(Clone, Debug)]
pub struct RawBatch {
    pub shots: usize,
    /// `num_detectors * WORDS` words, detector-major.
    pub detector_words: Vec<u64>,
    pub observable_words: Vec<u64>,
}

impl RawBatch {
    pub fn words_per_detector(&self) -> usize {
        WORDS
    }

    /// Flipped detector ids for each shot in the batch.
    pub fn flipped_per_shot(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); self.shots];
        for (d, words) in self.detector_words.chunks_exact(WORDS).enumerate() {
            for (w, &word) in words.iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let lane = w * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    if lane < self.shots {
                        out[lane].push(d as u32);
                    }
                }
            }
        }
        out
    }

    pub fn observable_flip(&self, lane: usize) -> bool {
        self.observable_words[lane / 64] >> (lane % 64) & 1 == 1
    }
}

/// Sampled shots, one packed row of detector bits per shot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleBatch {
    pub shots: usize,
    pub num_detectors: usize,
    row_words: usize,
    detector_bits: Vec<u64>,
    observable_flips: Vec<bool>,
}

impl SampleBatch {
    pub fn detector(&self, shot: usize, detector: usize) -> bool {
        self.detector_bits[shot * self.row_words + detector / 64] >> (detector % 64) & 1 == 1
    }

    pub fn observable_flip(&self, shot: usize) -> bool {
        self.observable_flips[shot]
    }

    pub fn flipped(&self, shot: usize) -> Vec<usize> {
        (0..self.num_detectors)
            .filter(|&d| self.detector(shot, d))
            .collect()
    }

    pub fn count_flips(&self, detector: usize) -> usize {
        (0..self.shots)
            .filter(|&s| self.detector(s, detector))
            .count()
    }

    pub fn is_all_zero(&self) -> bool {
        self.detector_bits.iter().all(|&w| w == 0) && !self.observable_flips.iter().any(|&b| b)
    }

    /// CSV with one row per shot: detector bits then the observable bit.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.shots * (2 * self.num_detectors + 4));
        for d in 0..self.num_detectors {
            out.push_str(&format!("D{d},"));
        }
        out.push_str("L0\n");
        for s in 0..self.shots {
            for d in 0..self.num_detectors {
                out.push(if self.detector(s, d) { '1' } else { '0' });
                out.push(',');
            }
            out.push(if self.observable_flips[s] { '1' } else { '0' });
            out.push('\n');
        }
        out
    }
}

/// Symptom of one Pauli component of one channel.
#[derive(Clone, Debug, PartialEq)]
pub struct Fault {
    /// Index among the circuit's channels, in op order.
    pub channel: usize,
    pub term: usize,
    pub kind: ChannelKind,
    pub probability: f64,
    pub detectors: Vec<u32>,
    pub observable: bool,
}

struct Frame {
    x: Vec<u64>,
    z: Vec<u64>,
    records: Vec<u64>,
}

impl Frame {
    fn new(num_qubits: usize, num_records: usize) -> Self {
        Frame {
            x: vec![0; num_qubits * WORDS],
            z: vec![0; num_qubits * WORDS],
            records: vec![0; num_records * WORDS],
        }
    }

    #[inline]
    fn flip(&mut self, q: u32, lane: usize, x: bool, z: bool) {
        let i = q as usize * WORDS + lane / 64;
        let bit = 1u64 << (lane % 64);
        if x {
            self.x[i] ^= bit;
        }
        if z {
            self.z[i] ^= bit;
        }
    }
}

impl FrameSimulator {
    pub fn new(circuit: &NoisyCircuit) -> Self {
        let mut instrs = Vec::with_capacity(circuit.ops.len());
        let mut channels = Vec::new();
        let mut measured = 0usize;
        for op in &circuit.ops {
            match op {
                Op::Reset(q) => instrs.push(Instr::Reset(*q as u32)),
                Op::Hadamard(q) => instrs.push(Instr::H(*q as u32)),
                Op::Cnot { control, target } => {
                    instrs.push(Instr::Cnot(*control as u32, *target as u32))
                }
                Op::Measure(q) => {
                    instrs.push(Instr::Measure(*q as u32));
                    measured += 1;
                }
                Op::Channel(ch) => {
                    // silent channels keep their index (faults refer to
                    // circuit channel order) but never execute
                    let total = ch.total_probability();
                    let mut acc = 0.0;
                    let cumulative = ch
                        .terms
                        .iter()
                        .map(|t| {
                            acc += t.probability / total.max(f64::MIN_POSITIVE);
                            acc
                        })
                        .collect();
                    channels.push(Channel {
                        probability: total,
                        ln_keep: (-total).ln_1p(),
                        kind: ch.kind,
                        cumulative,
                        terms: ch
                            .terms
                            .iter()
                            .map(|t| {
                                t.paulis
                                    .iter()
                                    .map(|&(q, p)| (q as u32, p.x_bit(), p.z_bit()))
                                    .collect()
                            })
                            .collect(),
                        term_probability: ch.terms.iter().map(|t| t.probability).collect(),
                    });
                    if total > 0.0 {
                        instrs.push(Instr::Channel(channels.len() as u32 - 1));
                    }
                }
            }
        }
        debug_assert_eq!(measured, circuit.num_measurements);
        FrameSimulator {
            num_qubits: circuit.num_qubits,
            num_measurements: measured,
            instrs,
            channels,
            detectors: circuit.detectors.clone(),
            observable: circuit.observable.clone(),
        }
    }

    pub fn num_detectors(&self) -> usize {
        self.detectors.len()
    }

    /// Propagate through the circuit, calling `inject` at each channel.
    fn run(&self, frame: &mut Frame, mut inject: impl FnMut(usize, &mut Frame)) {
        let mut rec = 0;
        for &instr in &self.instrs {
            match instr {
                Instr::Reset(q) => {
                    let r = q as usize * WORDS..(q as usize + 1) * WORDS;
                    frame.x[r.clone()].fill(0);
                    frame.z[r].fill(0);
                }
                Instr::H(q) => {
                    let r = q as usize * WORDS..(q as usize + 1) * WORDS;
                    for i in r {
                        std::mem::swap(&mut frame.x[i], &mut frame.z[i]);
                    }
                }
                Instr::Cnot(c, t) => {
                    let (c, t) = (c as usize * WORDS, t as usize * WORDS);
                    for w in 0..WORDS {
                        frame.x[t + w] ^= frame.x[c + w];
                        frame.z[c + w] ^= frame.z[t + w];
                    }
                }
                Instr::Measure(q) => {
                    let q = q as usize * WORDS;
                    let dst = rec * WORDS;
                    frame.records[dst..dst + WORDS].copy_from_slice(&frame.x[q..q + WORDS]);
                    rec += 1;
                }
                Instr::Channel(c) => inject(c as usize, frame),
            }
        }
    }

    fn collect(&self, frame: &Frame, shots: usize) -> RawBatch {
        let parity = |records: &[usize]| {
            let mut acc = [0u64; WORDS];
            for &r in records {
                for (a, &w) in acc
                    .iter_mut()
                    .zip(&frame.records[r * WORDS..(r + 1) * WORDS])
                {
                    *a ^= w;
                }
            }
            acc
        };
        let mut detector_words = Vec::with_capacity(self.detectors.len() * WORDS);
        for det in &self.detectors {
            detector_words.extend_from_slice(&parity(det));
        }
        RawBatch {
            shots,
            detector_words,
            observable_words: parity(&self.observable).to_vec(),
        }
    }

    /// Sample batch `index` (up to [`BATCH_SHOTS`] shots) of the stream `seed`.
    pub fn sample_batch(&self, seed: u64, index: u64, shots: usize) -> RawBatch {
        assert!(shots <= BATCH_SHOTS);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let mut frame = Frame::new(self.num_qubits, self.num_measurements);
        self.run(&mut frame, |c, frame| {
            let ch = &self.channels[c];
            let mut lane = 0usize;
            loop {
                if ch.probability < 1.0 {
                    let u: f64 = 1.0 - rng.random::<f64>();
                    let gap = (u.ln() / ch.ln_keep).floor();
                    if gap >= (BATCH_SHOTS - lane) as f64 {
                        break;
                    }
                    lane += gap as usize;
                }
                let term = if ch.terms.len() == 1 {
                    0
                } else {
                    let r: f64 = rng.random();
                    ch.cumulative
                        .partition_point(|&c| c <= r)
                        .min(ch.terms.len() - 1)
                };
                for &(q, x, z) in &ch.terms[term] {
                    frame.flip(q, lane, x, z);
                }
                lane += 1;
                if lane >= BATCH_SHOTS {
                    break;
                }
            }
        });
        self.collect(&frame, shots)
    }

    /// Batches covering `shots`, as `(index, size)`.
    pub fn batches(shots: usize) -> impl IndexedParallelIterator<Item = (u64, usize)> {
        (0..shots.div_ceil(BATCH_SHOTS))
            .into_par_iter()
            .map(move |b| (b as u64, BATCH_SHOTS.min(shots - b * BATCH_SHOTS)))
    }

    /// Every nontrivial Pauli component of every channel, propagated alone.
    pub fn enumerate_single_faults(&self) -> Vec<Fault> {
        let locations: Vec<(usize, usize)> = self
            .channels
            .iter()
            .enumerate()
            .filter(|(_, ch)| ch.probability > 0.0)
            .flat_map(|(c, ch)| (0..ch.terms.len()).map(move |t| (c, t)))
            .collect();
        locations
            .par_chunks(BATCH_SHOTS)
            .flat_map_iter(|chunk| {
                let mut frame = Frame::new(self.num_qubits, self.num_measurements);
                let mut next = 0usize;
                self.run(&mut frame, |c, frame| {
                    while next < chunk.len() && chunk[next].0 == c {
                        let (_, t) = chunk[next];
                        for &(q, x, z) in &self.channels[c].terms[t] {
                            frame.flip(q, next, x, z);
                        }
                        next += 1;
                    }
                });
                let raw = self.collect(&frame, chunk.len());
                let flipped = raw.flipped_per_shot();
                chunk
                    .iter()
                    .zip(flipped)
                    .enumerate()
                    .map(|(lane, (&(c, t), detectors))| Fault {
                        channel: c,
                        term: t,
                        kind: self.channels[c].kind,
                        probability: self.channels[c].term_probability[t],
                        detectors,
                        observable: raw.observable_flip(lane),
                    })
                    .collect::<Vec<_>>()
            })
            .collect()
    }
}

pub fn pauli_frame_sample(circuit: &NoisyCircuit, shots: usize, seed: u64) -> SampleBatch {
    let sim = FrameSimulator::new(circuit);
    let num_detectors = sim.num_detectors();
    let row_words = num_detectors.div_ceil(64).max(1);
    let raws: Vec<RawBatch> = FrameSimulator::batches(shots)
        .map(|(index, size)| sim.sample_batch(seed, index, size))
        .collect();
    let mut detector_bits = vec![0u64; shots * row_words];
    let mut observable_flips = Vec::with_capacity(shots);
    for (b, raw) in raws.iter().enumerate() {
        let base = b * BATCH_SHOTS;
        for (d, words) in raw.detector_words.chunks_exact(WORDS).enumerate() {
            for (w, &word) in words.iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let lane = w * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    if lane < raw.shots {
                        detector_bits[(base + lane) * row_words + d / 64] |= 1 << (d % 64);
                    }
                }
            }
        }
        observable_flips.extend((0..raw.shots).map(|lane| raw.observable_flip(lane)));
    }
    SampleBatch {
        shots,
        num_detectors,
        row_words,
        detector_bits,
        observable_flips,
    }
}

pub fn enumerate_single_faults(circuit: &NoisyCircuit) -> Vec<Fault> {
    FrameSimulator::new(circuit).enumerate_single_faults()
}
