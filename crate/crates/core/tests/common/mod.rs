//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use ionqec::circuit::{NoisyCircuit, Op, PauliTerm};
use ionqec::decode::{Edge, MatchingGraph};
use ionqec::pauli::Pauli;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Aaronson–Gottesman stabilizer tableau.
pub struct Tableau {
    n: usize,
    x: Vec<Vec<bool>>,
    z: Vec<Vec<bool>>,
    r: Vec<bool>,
}

impl Tableau {
    pub fn new(n: usize) -> Self {
        let mut x = vec![vec![false; n]; 2 * n + 1];
        let mut z = vec![vec![false; n]; 2 * n + 1];
        for i in 0..n {
            x[i][i] = true;
            z[n + i][i] = true;
        }
        Tableau {
            n,
            x,
            z,
            r: vec![false; 2 * n + 1],
        }
    }

    pub fn h(&mut self, q: usize) {
        for i in 0..2 * self.n {
            self.r[i] ^= self.x[i][q] & self.z[i][q];
            std::mem::swap(&mut self.x[i][q], &mut self.z[i][q]);
        }
    }

    pub fn cnot(&mut self, a: usize, b: usize) {
        for i in 0..2 * self.n {
            self.r[i] ^= self.x[i][a] & self.z[i][b] & (self.x[i][b] ^ self.z[i][a] ^ true);
            self.x[i][b] ^= self.x[i][a];
            self.z[i][a] ^= self.z[i][b];
        }
    }

    /// Apply a Pauli: flips the sign of every generator it anticommutes with.
    pub fn pauli(&mut self, q: usize, p: Pauli) {
        for i in 0..2 * self.n {
            let anti = (p.x_bit() & self.z[i][q]) ^ (p.z_bit() & self.x[i][q]);
            self.r[i] ^= anti;
        }
    }

    fn g(x1: bool, z1: bool, x2: bool, z2: bool) -> i32 {
        match (x1, z1) {
            (false, false) => 0,
            (true, true) => z2 as i32 - x2 as i32,
            (true, false) => z2 as i32 * (2 * x2 as i32 - 1),
            (false, true) => x2 as i32 * (1 - 2 * z2 as i32),
        }
    }

    fn rowsum(&mut self, h: usize, i: usize) {
        let mut sum = 2 * self.r[h] as i32 + 2 * self.r[i] as i32;
        for j in 0..self.n {
            sum += Self::g(self.x[i][j], self.z[i][j], self.x[h][j], self.z[h][j]);
        }
        self.r[h] = sum.rem_euclid(4) == 2;
        for j in 0..self.n {
            self.x[h][j] ^= self.x[i][j];
            self.z[h][j] ^= self.z[i][j];
        }
    }

    /// Z measurement; random outcomes come from `coin`.
    pub fn measure(&mut self, q: usize, coin: &mut impl FnMut() -> bool) -> bool {
        let n = self.n;
        if let Some(p) = (n..2 * n).find(|&i| self.x[i][q]) {
            for i in 0..2 * n {
                if i != p && self.x[i][q] {
                    self.rowsum(i, p);
                }
            }
            self.x[p - n] = self.x[p].clone();
            self.z[p - n] = self.z[p].clone();
            self.r[p - n] = self.r[p];
            self.x[p] = vec![false; n];
            self.z[p] = vec![false; n];
            self.z[p][q] = true;
            let out = coin();
            self.r[p] = out;
            out
        } else {
            let s = 2 * n;
            self.x[s] = vec![false; n];
            self.z[s] = vec![false; n];
            self.r[s] = false;
            for i in 0..n {
                if self.x[i][q] {
                    self.rowsum(s, i + n);
                }
            }
            self.r[s]
        }
    }

    pub fn reset(&mut self, q: usize, coin: &mut impl FnMut() -> bool) {
        if self.measure(q, coin) {
            self.pauli(q, Pauli::X);
        }
    }
}

/// Detector values and observable of one noiseless run of `circuit`, with
/// `inject` applied at the given channel index (by order among channels).
pub fn tableau_run(
    circuit: &NoisyCircuit,
    seed: u64,
    inject: Option<(usize, &PauliTerm)>,
) -> (Vec<bool>, bool) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coin = move || rng.random::<bool>();
    let mut t = Tableau::new(circuit.num_qubits);
    let mut record = Vec::with_capacity(circuit.num_measurements);
    let mut channel = 0usize;
    for op in &circuit.ops {
        match op {
            Op::Reset(q) => t.reset(*q, &mut coin),
            Op::Hadamard(q) => t.h(*q),
            Op::Cnot { control, target } => t.cnot(*control, *target),
            Op::Measure(q) => record.push(t.measure(*q, &mut coin)),
            Op::Channel(_) => {
                if let Some((c, term)) = inject {
                    if c == channel {
                        for &(q, p) in &term.paulis {
                            t.pauli(q, p);
                        }
                    }
                }
                channel += 1;
            }
        }
    }
    let parity = |recs: &[usize]| recs.iter().fold(false, |acc, &m| acc ^ record[m]);
    let dets = circuit.detectors.iter().map(|d| parity(d)).collect();
    (dets, parity(&circuit.observable))
}

/// Minimum total weight of an edge subset whose odd-degree detector set is
/// exactly `flipped`, separately for each observable parity. Exhaustive over
/// all `2^E` subsets.
pub fn brute_force_matching(graph: &MatchingGraph, flipped: &[u32]) -> [Option<f64>; 2] {
    let e = graph.edges.len();
    assert!(e <= 22, "brute force limited to small graphs");
    let boundary = graph.boundary();
    let mask_of = |u: u32| if u == boundary { 0u64 } else { 1u64 << u };
    let target = flipped.iter().fold(0u64, |m, &d| m ^ (1u64 << d));
    let edge_masks: Vec<u64> = graph
        .edges
        .iter()
        .map(|ed| mask_of(ed.u) ^ mask_of(ed.v))
        .collect();
    let mut best = [None::<f64>; 2];
    for subset in 0u64..(1u64 << e) {
        let mut syn = 0u64;
        let mut w = 0.0;
        let mut obs = false;
        let mut bits = subset;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            syn ^= edge_masks[i];
            w += graph.edges[i].weight;
            obs ^= graph.edges[i].observable;
            bits &= bits - 1;
        }
        if syn == target {
            let slot = &mut best[obs as usize];
            if slot.is_none_or(|b| w < b) {
                *slot = Some(w);
            }
        }
    }
    best
}

/// Gauss–Legendre nodes and weights on [-1, 1] (Newton on P_n).
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Quadrature nodes on `[0, tau]` with panels aligned to segment edges.
fn panels(n_seg: usize, tau: f64, per_seg: usize) -> Vec<(f64, f64)> {
    let h = tau / n_seg as f64;
    let w = h / per_seg as f64;
    (0..n_seg * per_seg).map(|p| (p as f64 * w, w)).collect()
}

fn chi(amps: &[f64], mu: f64, h: f64, t: f64) -> f64 {
    let s = ((t / h) as usize).min(amps.len() - 1);
    amps[s] * (mu * t).sin()
}

/// `int_0^tau chi(t) e^{i w t} dt` by composite Gauss–Legendre.
pub fn quad_displacement(
    amps: &[f64],
    mu: f64,
    tau: f64,
    w: f64,
    per_seg: usize,
    gl: &[(f64, f64)],
) -> num_complex::Complex64 {
    let h = tau / amps.len() as f64;
    let mut acc = num_complex::Complex64::new(0.0, 0.0);
    for (a, len) in panels(amps.len(), tau, per_seg) {
        for &(x, wt) in gl {
            let t = a + 0.5 * len * (x + 1.0);
            acc += num_complex::Complex64::from_polar(1.0, w * t)
                * (chi(amps, mu, h, t) * 0.5 * len * wt);
        }
    }
    acc
}

/// `int_0^tau dt1 chi_a(t1) int_0^t1 dt2 chi_b(t2) sin(w (t1 - t2))`.
pub fn quad_ordered(
    a_amps: &[f64],
    b_amps: &[f64],
    mu: f64,
    tau: f64,
    w: f64,
    per_seg: usize,
    gl: &[(f64, f64)],
) -> f64 {
    use num_complex::Complex64;
    let h = tau / a_amps.len() as f64;
    let mut before = Complex64::new(0.0, 0.0); // int over completed panels of chi_b e^{-i w t}
    let mut total = 0.0;
    for (a, len) in panels(a_amps.len(), tau, per_seg) {
        for &(x, wt) in gl {
            let t1 = a + 0.5 * len * (x + 1.0);
            // partial panel [a, t1]
            let mut part = Complex64::new(0.0, 0.0);
            let sub = t1 - a;
            for &(y, wy) in gl {
                let t2 = a + 0.5 * sub * (y + 1.0);
                part +=
                    Complex64::from_polar(1.0, -w * t2) * (chi(b_amps, mu, h, t2) * 0.5 * sub * wy);
            }
            let inner = (Complex64::from_polar(1.0, w * t1) * (before + part)).im;
            total += chi(a_amps, mu, h, t1) * inner * 0.5 * len * wt;
        }
        for &(y, wy) in gl {
            let t2 = a + 0.5 * len * (y + 1.0);
            before +=
                Complex64::from_polar(1.0, -w * t2) * (chi(b_amps, mu, h, t2) * 0.5 * len * wy);
        }
    }
    total
}

/// Quadrature α and Θ for all ions of `pulse`.
pub fn quad_alpha_theta(
    pulse: &ionqec::ionphys::PulseSequence,
    modes: &ionqec::ionphys::ModeData,
    per_seg: usize,
) -> (
    nalgebra::DMatrix<num_complex::Complex64>,
    nalgebra::DMatrix<f64>,
) {
    let gl = gauss_legendre(16);
    let n = pulse.ions.len();
    let nk = modes.num_modes();
    let mut alpha = nalgebra::DMatrix::zeros(n, nk);
    let mut theta = nalgebra::DMatrix::zeros(n, n);
    for k in 0..nk {
        let w = modes.omega[k];
        for (i, &ion) in pulse.ions.iter().enumerate() {
            let f = quad_displacement(&pulse.amplitudes[i], pulse.mu, pulse.tau, w, per_seg, &gl);
            alpha[(i, k)] =
                num_complex::Complex64::new(0.0, -1.0) * modes.eta[k] * modes.b[(ion, k)] * f;
        }
        for i in 0..n {
            for j in i + 1..n {
                let c = modes.eta[k]
                    * modes.eta[k]
                    * modes.b[(pulse.ions[i], k)]
                    * modes.b[(pulse.ions[j], k)];
                let ai = &pulse.amplitudes[i];
                let aj = &pulse.amplitudes[j];
                let v = c
                    * (quad_ordered(ai, aj, pulse.mu, pulse.tau, w, per_seg, &gl)
                        + quad_ordered(aj, ai, pulse.mu, pulse.tau, w, per_seg, &gl));
                theta[(i, j)] += v;
                theta[(j, i)] += v;
            }
        }
    }
    (alpha, theta)
}

/// Random short pulse on a few ions of `modes`, for integral cross-checks.
pub fn random_pulse(
    rng: &mut ChaCha8Rng,
    modes: &ionqec::ionphys::ModeData,
) -> ionqec::ionphys::PulseSequence {
    let n_ions = modes.b.nrows();
    let mut ions: Vec<usize> = (0..n_ions).collect();
    for i in (1..ions.len()).rev() {
        let j = rng.random_range(0..=i);
        ions.swap(i, j);
    }
    ions.truncate(3.min(n_ions));
    let n_seg = rng.random_range(2..=6);
    let tau = rng.random_range(2e-6..8e-6);
    // detuning near the band, occasionally exactly resonant with a mode
    let mu = if rng.random_bool(0.15) {
        modes.omega[rng.random_range(0..modes.num_modes())]
    } else {
        modes.omega[0] + rng.random_range(-2.0..2.0) * 2.0 * std::f64::consts::PI * 2e5
    };
    let amps = ions
        .iter()
        .map(|_| {
            (0..n_seg)
                .map(|_| rng.random_range(-1.0..1.0) * 2.0 * std::f64::consts::PI * 3e5)
                .collect()
        })
        .collect();
    ionqec::ionphys::PulseSequence::new(n_seg, tau, mu, ions, amps).unwrap()
}

/// Connected random graph with 3–10 detectors, chords and boundary edges.
pub fn random_graph(rng: &mut ChaCha8Rng) -> MatchingGraph {
    let n = rng.random_range(3..=10u32);
    let mut edges = Vec::new();
    let mut push = |u: u32, v: u32, rng: &mut ChaCha8Rng| {
        let p: f64 = rng.random_range(0.001..0.3);
        edges.push(Edge {
            u,
            v,
            probability: p,
            weight: ((1.0 - p) / p).ln(),
            observable: rng.random_bool(0.3),
            sources: Vec::new(),
        });
    };
    // spanning path plus random chords and boundary edges
    for v in 1..n {
        let u = rng.random_range(0..v);
        push(u, v, rng);
    }
    let extra = rng.random_range(0..=(18 - (n - 1)).min(8));
    for _ in 0..extra {
        let u = rng.random_range(0..n);
        let v = if rng.random_bool(0.35) {
            n
        } else {
            rng.random_range(0..n)
        };
        if u != v {
            push(u.min(v), u.max(v), rng);
        }
    }
    MatchingGraph {
        num_detectors: n as usize,
        edges,
    }
}
