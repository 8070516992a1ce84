//! Closed-form integrals for `chi(t) = Omega_s sin(mu t)` on equal segments.
//!
//! With `E(z) = (e^{iz} - 1)/(iz)`, the displacement of one segment
//! `[t0, t0 + h]` is
//! `F = (h/2i) [e^{i(w+mu)t0} E((w+mu)h) - e^{i(w-mu)t0} E((w-mu)h)]`,
//! and the ordered double integral over a single segment reduces to
//! `Q(x, y) = int_0^1 e^{ixu} u E(yu) du`. Both switch to series near their
//! removable singularities, so resonant detunings need no special casing.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::modes::ModeData;
use super::sequence::PulseSequence;
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn cis(phase: f64) -> Complex64 {
    Complex64::new(phase.cos(), phase.sin())
}

/// `(e^{iz} - 1) / (iz)`.
fn expm1_ratio(z: f64) -> Complex64 {
    if z.abs() < 0.1 {
        // sum_n (iz)^n / (n+1)!
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for n in 1..14 {
            term *= I * z / (n + 1) as f64;
            sum += term;
        }
        sum
    } else {
        (cis(z) - 1.0) / (I * z)
    }
}

/// `m_j(x) = int_0^1 u^j e^{ixu} du` for `j = 0..=jmax`.
fn moments(x: f64, jmax: usize) -> Vec<Complex64> {
    if x.abs() < 2.0 {
        (0..=jmax)
            .map(|j| {
                // sum_n (ix)^n / (n! (n + j + 1))
                let mut pow = Complex64::new(1.0, 0.0);
                let mut sum = Complex64::new(0.0, 0.0);
                for n in 0..40 {
                    if n > 0 {
                        pow *= I * x / n as f64;
                    }
                    sum += pow / (n + j + 1) as f64;
                }
                sum
            })
            .collect()
    } else {
        let e = cis(x);
        let mut m = Vec::with_capacity(jmax + 1);
        m.push(expm1_ratio(x));
        for j in 1..=jmax {
            let prev = m[j - 1];
            m.push((e - j as f64 * prev) / (I * x));
        }
        m
    }
}

/// `int_0^1 du1 int_0^{u1} du2 e^{i x u1} e^{i y u2}`.
fn triangle(x: f64, y: f64) -> Complex64 {
    if y.abs() >= 1e-3 {
        (expm1_ratio(x + y) - expm1_ratio(x)) / (I * y)
    } else {
        const TERMS: usize = 7;
        let m = moments(x, TERMS);
        let mut coef = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for n in 0..TERMS {
            if n > 0 {
                coef *= I * y / (n + 1) as f64;
            }
            sum += coef * m[n + 1];
        }
        sum
    }
}

/// `int_{t0}^{t0+h} sin(mu t) e^{i w t} dt`.
pub fn segment_displacement(mu: f64, omega: f64, t0: f64, h: f64) -> Complex64 {
    let (p, m) = (omega + mu, omega - mu);
    (cis(p * t0) * expm1_ratio(p * h) - cis(m * t0) * expm1_ratio(m * h)) * (h / (2.0 * I))
}

/// `int_0^1 s e^{izs} ds`.
fn first_moment(z: f64) -> Complex64 {
    if z.abs() < 0.1 {
        // sum_n (iz)^n / (n! (n+2))
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term / 2.0;
        for n in 1..14 {
            term *= I * z / n as f64;
            sum += term / (n + 2) as f64;
        }
        sum
    } else {
        cis(z) / (I * z) + (cis(z) - 1.0) / (z * z)
    }
}

/// Derivative of [`segment_displacement`] with respect to `mu`.
pub fn segment_displacement_dmu(mu: f64, omega: f64, t0: f64, h: f64) -> Complex64 {
    let (p, m) = (omega + mu, omega - mu);
    let part = |l: f64| cis(l * t0) * (t0 * expm1_ratio(l * h) + h * first_moment(l * h));
    (part(p) + part(m)) * (h / 2.0)
}

/// `int_{t0}^{t0+h} dt1 int_{t0}^{t1} dt2 sin(mu t1) sin(mu t2) sin(w (t1 - t2))`.
pub fn segment_self_phase(mu: f64, omega: f64, t0: f64, h: f64) -> f64 {
    let (p, m) = (omega + mu, omega - mu);
    let terms = [(p, -m, 1.0), (p, -p, -1.0), (m, -m, -1.0), (m, -p, 1.0)];
    let mut acc = Complex64::new(0.0, 0.0);
    for (l1, l2, sign) in terms {
        acc += cis((l1 + l2) * t0) * triangle(l1 * h, l2 * h) * sign;
    }
    (acc * (-0.25 * h * h)).im
}

/// Per-mode, per-segment integrals for one `(mu, tau, n_seg)` timing grid.
#[derive(Clone, Debug)]
pub struct SegmentKernel {
    pub n_seg: usize,
    pub tau: f64,
    pub mu: f64,
    pub omega: Vec<f64>,
    f: Vec<Complex64>,
    d: Vec<f64>,
}

impl SegmentKernel {
    pub fn new(omega: &[f64], mu: f64, tau: f64, n_seg: usize) -> Result<Self> {
        if n_seg == 0 || !(tau > 0.0) {
            return Err(Error::invalid("need n_seg >= 1 and tau > 0"));
        }
        let h = tau / n_seg as f64;
        let mut f = Vec::with_capacity(omega.len() * n_seg);
        let mut d = Vec::with_capacity(omega.len() * n_seg);
        for &w in omega {
            for s in 0..n_seg {
                let t0 = s as f64 * h;
                f.push(segment_displacement(mu, w, t0, h));
                d.push(segment_self_phase(mu, w, t0, h));
            }
        }
        Ok(SegmentKernel {
            n_seg,
            tau,
            mu,
            omega: omega.to_vec(),
            f,
            d,
        })
    }

    pub fn num_modes(&self) -> usize {
        self.omega.len()
    }

    /// Displacement integrals of mode `k`, one per segment.
    pub fn f(&self, k: usize) -> &[Complex64] {
        &self.f[k * self.n_seg..(k + 1) * self.n_seg]
    }

    /// Within-segment phase integrals of mode `k`.
    pub fn d(&self, k: usize) -> &[f64] {
        &self.d[k * self.n_seg..(k + 1) * self.n_seg]
    }

    /// `out += scale * S_k v`, where `S_k` is the symmetric segment-pair
    /// phase matrix of mode `k`, in O(n_seg).
    pub fn apply_phase(&self, k: usize, v: &[f64], scale: f64, out: &mut [f64]) {
        let (f, d) = (self.f(k), self.d(k));
        let mut acc = Complex64::new(0.0, 0.0);
        for s in 0..self.n_seg {
            out[s] += scale * ((f[s] * acc.conj()).im + 2.0 * d[s] * v[s]);
            acc += f[s] * v[s];
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for s in (0..self.n_seg).rev() {
            out[s] += scale * (acc * f[s].conj()).im;
            acc += f[s] * v[s];
        }
    }

    /// Dense `S_k` (for tests and small problems).
    pub fn phase_matrix(&self, k: usize) -> DMatrix<f64> {
        let n = self.n_seg;
        let mut m = DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            e.fill(0.0);
            e[j] = 1.0;
            col.fill(0.0);
            self.apply_phase(k, &e, 1.0, &mut col);
            m.set_column(j, &nalgebra::DVector::from_column_slice(&col));
        }
        m
    }

    /// `alpha[(i, k)]` for amplitude vectors of ions with mode rows `ions`.
    pub fn alpha(
        &self,
        modes: &ModeData,
        ions: &[usize],
        amplitudes: &[Vec<f64>],
    ) -> DMatrix<Complex64> {
        let mut out = DMatrix::zeros(ions.len(), self.num_modes());
        for (i, (&ion, amp)) in ions.iter().zip(amplitudes).enumerate() {
            for k in 0..self.num_modes() {
                let sum: Complex64 = self.f(k).iter().zip(amp).map(|(f, &u)| f * u).sum();
                out[(i, k)] = -I * modes.eta[k] * modes.b[(ion, k)] * sum;
            }
        }
        out
    }

    /// Symmetric two-qubit phases among the given ions, zero diagonal.
    pub fn theta(&self, modes: &ModeData, ions: &[usize], amplitudes: &[Vec<f64>]) -> DMatrix<f64> {
        let (na, nk, ns) = (ions.len(), self.num_modes(), self.n_seg);
        // process modes in blocks to bound the size of the GEMM operands
        let block = (THETA_BLOCK_ENTRIES / (na.max(1) * ns)).clamp(1, nk.max(1));
        let mut theta = DMatrix::zeros(na, na);
        for k0 in (0..nk).step_by(block) {
            let k1 = (k0 + block).min(nk);
            let width = (k1 - k0) * ns;
            // rows: ions; columns: (mode, segment)
            let mut p_re = DMatrix::zeros(na, 2 * width);
            let mut c_im = DMatrix::zeros(na, 2 * width);
            let mut v = DMatrix::zeros(na, width);
            let mut vd = DMatrix::zeros(na, width);
            for (i, (&ion, amp)) in ions.iter().zip(amplitudes).enumerate() {
                for k in k0..k1 {
                    let g = modes.eta[k] * modes.b[(ion, k)];
                    let (f, d) = (self.f(k), self.d(k));
                    let mut acc = Complex64::new(0.0, 0.0);
                    for s in 0..ns {
                        let col = (k - k0) * ns + s;
                        let p = f[s] * (g * amp[s]);
                        p_re[(i, col)] = p.re;
                        p_re[(i, width + col)] = p.im;
                        c_im[(i, col)] = -acc.im;
                        c_im[(i, width + col)] = acc.re;
                        acc += p;
                        v[(i, col)] = g * amp[s];
                        vd[(i, col)] = g * amp[s] * d[s];
                    }
                }
            }
            let t = &p_re * c_im.transpose();
            theta += &t + t.transpose() + 2.0 * (&v * vd.transpose());
        }
        theta.fill_diagonal(0.0);
        theta
    }
}

const THETA_BLOCK_ENTRIES: usize = 1 << 22;

pub fn alpha_integrals(pulse: &PulseSequence, modes: &ModeData) -> Result<DMatrix<Complex64>> {
    let kernel = SegmentKernel::new(&modes.omega, pulse.mu, pulse.tau, pulse.n_seg)?;
    Ok(kernel.alpha(modes, &pulse.ions, &pulse.amplitudes))
}

pub fn theta_integrals(pulse: &PulseSequence, modes: &ModeData) -> Result<DMatrix<f64>> {
    let kernel = SegmentKernel::new(&modes.omega, pulse.mu, pulse.tau, pulse.n_seg)?;
    Ok(kernel.theta(modes, &pulse.ions, &pulse.amplitudes))
}

/// Average infidelity over the `N` qubits indexing `alpha`'s rows, `D = 2^N`.
pub fn gate_infidelity(
    alpha: &DMatrix<Complex64>,
    theta: &DMatrix<f64>,
    target: &DMatrix<f64>,
    nbar: &[f64],
) -> f64 {
    let n = alpha.nrows();
    let dim = 2f64.powi(n as i32);
    let mut motional = 0.0;
    for j in 0..n {
        for k in 0..alpha.ncols() {
            motional +=
                alpha[(j, k)].norm_sqr() * (2.0 * nbar.get(k).copied().unwrap_or(0.0) + 1.0);
        }
    }
    let mut phase = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            phase += (theta[(i, j)] - target[(i, j)]).powi(2);
        }
    }
    dim / (dim + 1.0) * (motional + phase)
}
